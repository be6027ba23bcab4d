//! Quick closed-form and oracle equivalence checks, runnable from the CLI.

use twinbeam_core::criteria::{self, closed_form_bs_output, closed_form_noiseless, CriterionId, Mode};
use twinbeam_core::moments::{twin_beam_distribution, twin_beam_pnd_closed_form, Engine};
use twinbeam_core::oracle::{bernoulli_downsample, factorial_moment_from_pnd, BsCoefficientTable};
use twinbeam_core::quantifiers;
use twinbeam_core::roots;
use twinbeam_core::state::{attenuate, beam_splitter, beam_splitter_twin_beam, twin_beam, BeamSplitterParams, TwinBeamParams};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Largest observed error (relative or absolute, per check).
    pub error: f64,
    pub tol: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.error <= self.tol
    }
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    roots::linspace(lo.ln(), hi.ln(), n).into_iter().map(f64::exp).collect()
}

fn worst(errs: impl IntoIterator<Item = f64>) -> f64 {
    // a NaN error must fail the check
    errs.into_iter().fold(0.0, |m, e| if e.is_nan() { f64::INFINITY } else { m.max(e) })
}

fn noiseless_ids() -> Vec<CriterionId> {
    let mut ids: Vec<CriterionId> = [(0, 0), (1, 1), (2, 2), (0, 1), (0, 2)]
        .iter()
        .flat_map(|&(a, b)| [CriterionId::e_w(a, b), CriterionId::e_p(a, b)])
        .collect();
    ids.push(CriterionId::m_w());
    ids.push(CriterionId::m_p());
    ids
}

fn noiseless_closed_forms() -> Check {
    let mut errs = Vec::new();
    for bp in log_grid(1e-2, 1e2, 9) {
        let s = twin_beam(TwinBeamParams::noiseless(bp).unwrap());
        for id in noiseless_ids() {
            let v = criteria::evaluate(&s, id).map_or(f64::NAN, |r| r.value);
            let c = closed_form_noiseless(id, bp).unwrap();
            // E_p(0,1) vanishes identically; compare on the scale of its terms
            errs.push(if c == 0.0 { v.abs() } else { rel(v, c) });
        }
    }
    Check {
        name: "noiseless twin-beam closed forms",
        error: worst(errs),
        tol: 1e-8,
    }
}

fn splitter_closed_forms() -> Check {
    let ids = [CriterionId::e_p(0, 0), CriterionId::e_p(1, 1), CriterionId::e_p(2, 2), CriterionId::e_p(0, 2), CriterionId::m_p()];
    let mut errs = Vec::new();
    for bp in [0.1, 1.0, 10.0] {
        for t in [0.1, 0.3, 0.55, 0.8, 0.95] {
            let s = beam_splitter_twin_beam(TwinBeamParams::noiseless(bp).unwrap(), t).unwrap();
            for id in ids {
                let v = criteria::evaluate(&s, id).map_or(f64::NAN, |r| r.value);
                errs.push(rel(v, closed_form_bs_output(id, bp, t).unwrap()));
            }
        }
    }
    Check {
        name: "beam-splitter output closed forms",
        error: worst(errs),
        tol: 1e-8,
    }
}

fn table_endpoints() -> Check {
    let mut errs = Vec::new();
    for id in [CriterionId::e_p(0, 0), CriterionId::e_p(1, 1), CriterionId::e_p(2, 2), CriterionId::e_p(0, 2)] {
        let f = |t: f64| {
            let s = beam_splitter_twin_beam(TwinBeamParams::noiseless(1.0).unwrap(), t).unwrap();
            criteria::evaluate(&s, id).map_or(f64::NAN, |r| r.value)
        };
        let found: Vec<f64> = roots::sign_changes(f, 0.5, 1.0, 201, 1e-10).into_iter().map(|r| r.x).collect();
        let expected = criteria::table_endpoints(id).unwrap();
        if found.len() != expected.len() {
            errs.push(f64::INFINITY);
            continue;
        }
        errs.extend(found.iter().zip(&expected).map(|(a, b)| (a - b).abs()));
    }
    Check {
        name: "sign-change endpoints in T",
        error: worst(errs),
        tol: 1e-6,
    }
}

fn pnd_closed_form() -> Check {
    let p = TwinBeamParams::new(0.5, 0.2, 0.1).unwrap();
    let s = twin_beam(p);
    let engine = Engine::default();
    let mut errs = Vec::new();
    for n1 in 0..=6 {
        for n2 in 0..=(6 - n1) {
            let e = engine.pnd_element(&s, n1, n2).unwrap_or(f64::NAN);
            errs.push((e - twin_beam_pnd_closed_form(p, n1, n2)).abs());
        }
    }
    Check {
        name: "noisy twin-beam photon-number distribution",
        error: worst(errs),
        tol: 1e-10,
    }
}

fn splitter_oracle() -> Check {
    let engine = Engine::with_max_order(16);
    let mut errs = Vec::new();
    for (bp, bs, bi, t) in [(0.8, 0.1, 0.3, 0.3), (1.5, 0.0, 0.0, 0.5), (0.3, 0.4, 0.0, 0.85)] {
        let p = TwinBeamParams::new(bp, bs, bi).unwrap();
        let out = BsCoefficientTable::new(t, 32).unwrap().transform(&twin_beam_distribution(p, 32));
        let s = beam_splitter(&twin_beam(p), BeamSplitterParams::with_transmissivity(t).unwrap());
        for n1 in 0..=8 {
            for n2 in 0..=8 {
                errs.push((out.get(n1, n2) - engine.pnd_element(&s, n1, n2).unwrap_or(f64::NAN)).abs());
            }
        }
    }
    Check {
        name: "Fock-basis beam-splitter oracle",
        error: worst(errs),
        tol: 1e-8,
    }
}

fn factorial_moments() -> Check {
    let engine = Engine::default();
    let s = beam_splitter(
        &twin_beam(TwinBeamParams::new(0.7, 0.2, 0.1).unwrap()),
        BeamSplitterParams::new(0.6, 0.4).unwrap(),
    );
    let mut errs = Vec::new();
    match engine.distribution_truncated(&s, 200) {
        Ok(pnd) => {
            for k1 in 0..=6 {
                for k2 in 0..=(6 - k1) {
                    let m = engine.intensity_moment(&s, k1, k2).unwrap_or(f64::NAN);
                    errs.push(rel(factorial_moment_from_pnd(&pnd, k1, k2).value, m));
                }
            }
        }
        Err(_) => errs.push(f64::INFINITY),
    }
    Check {
        name: "factorial moments of the distribution",
        error: worst(errs),
        tol: 1e-7,
    }
}

fn bernoulli_loss() -> Check {
    let engine = Engine::default();
    let s = twin_beam(TwinBeamParams::new(0.6, 0.2, 0.3).unwrap());
    let err = engine
        .distribution(&s, 1e-13)
        .and_then(|d| bernoulli_downsample(&d, 0.3, 0.8))
        .and_then(|thinned| {
            let direct = engine.distribution_truncated(&attenuate(&s, 0.3, 0.8)?, thinned.n_max1())?;
            Ok(thinned.max_abs_diff(&direct))
        })
        .unwrap_or(f64::INFINITY);
    Check {
        name: "Bernoulli thinning equals attenuation",
        error: err,
        tol: 1e-9,
    }
}

fn negativity_formula() -> Check {
    let errs = log_grid(1e-3, 1e2, 30).into_iter().map(|bp| {
        let n = quantifiers::negativity(&twin_beam(TwinBeamParams::noiseless(bp).unwrap())).unwrap_or(f64::NAN);
        rel(n, (bp * (bp + 1.0)).sqrt() + bp)
    });
    Check {
        name: "twin-beam negativity",
        error: worst(errs),
        tol: 1e-10,
    }
}

fn r22p_boundary() -> Check {
    let id = CriterionId::r_p(Mode::One, 2, 2);
    let mut errs = Vec::new();
    for t in [0.6, 0.75, 0.9] {
        let f = |bp: f64| {
            let s = beam_splitter_twin_beam(TwinBeamParams::noiseless(bp).unwrap(), t).unwrap();
            criteria::evaluate(&s, id).map_or(f64::NAN, |r| r.value)
        };
        let closed = criteria::boundary_r22p(t).unwrap();
        let err = roots::bisect(f, 1e-3, 10.0 * closed + 1.0, 1e-10, 200)
            .map_or(f64::INFINITY, |r| (r.x - closed).abs());
        errs.push(err);
    }
    Check {
        name: "R_p(2,2) pair-number boundary",
        error: worst(errs),
        tol: 1e-6,
    }
}

pub fn run() -> Vec<Check> {
    vec![
        noiseless_closed_forms(),
        splitter_closed_forms(),
        table_endpoints(),
        pnd_closed_form(),
        splitter_oracle(),
        factorial_moments(),
        bernoulli_loss(),
        negativity_formula(),
        r22p_boundary(),
    ]
}
