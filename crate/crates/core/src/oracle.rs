//! Brute-force Fock-space routes, independent of the generating function,
//! used to cross-check the engine: factorial moments summed over a
//! photon-number table, the beam splitter acting photon by photon, and
//! Bernoulli thinning of each mode.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;
use crate::moments::PhotonNumberDistribution;
use crate::{Error, Result};

/// Default total-photon cutoff of a [`BsCoefficientTable`].
pub const DEFAULT_CUTOFF: usize = 32;

/// A factorial moment together with an estimate of what the truncated tail
/// could have contributed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorialMoment {
    pub value: f64,
    pub error_bound: f64,
}

/// `Σ p(n1, n2) n1!/(n1-k1)! n2!/(n2-k2)!` over the retained table.
///
/// The error bound treats the missing tail mass as if it sat on geometric
/// tails beyond the table, with the means of the retained marginals, and adds
/// a rounding allowance for the sum itself.
pub fn factorial_moment_from_pnd(pnd: &PhotonNumberDistribution, k1: usize, k2: usize) -> FactorialMoment {
    let mut value = 0.0;
    let mut abs_sum = 0.0;
    for n1 in k1..=pnd.n_max1() {
        let f1 = math::falling_factorial(n1, k1);
        for n2 in k2..=pnd.n_max2() {
            let term = pnd.get(n1, n2) * f1 * math::falling_factorial(n2, k2);
            value += term;
            abs_sum += term.abs();
        }
    }
    let mean = |m: &[f64]| m.iter().enumerate().map(|(n, p)| n as f64 * p).sum::<f64>();
    let mu1 = mean(&pnd.marginal(1));
    let mu2 = mean(&pnd.marginal(2));
    let reach = |n_max: usize, k: usize, mu: f64| {
        math::powi(n_max as f64 + 1.0 + k as f64 * (mu + 1.0), k as i32)
    };
    let tail = pnd.tail_mass().max(0.0);
    let count = ((pnd.n_max1() + 1) * (pnd.n_max2() + 1)) as f64;
    let error_bound = 2.0 * tail * reach(pnd.n_max1(), k1, mu1) * reach(pnd.n_max2(), k2, mu2)
        + count * f64::EPSILON * abs_sum;
    FactorialMoment { value, error_bound }
}

/// Photon-by-photon beam-splitter amplitudes for all inputs with at most
/// `cutoff` photons in total, at transmissivity `t` and zero phase.
///
/// The amplitude of `(n1, n2) -> (m1, m2)` is non-zero only for
/// `m1 + m2 = n1 + n2`; transition probabilities are its square. Building the
/// table costs `O(cutoff⁴)`; afterwards it is read-only and can be shared.
#[derive(Debug, Clone, PartialEq)]
pub struct BsCoefficientTable {
    t: f64,
    cutoff: usize,
    // blocks[n] is (n + 1) × (n + 1), row n1, column m1, for total n
    blocks: Vec<Vec<f64>>,
}

impl BsCoefficientTable {
    pub fn new(t: f64, cutoff: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidParameter {
                name: "t",
                value: t,
                reason: "transmissivity must lie in [0, 1]",
            });
        }
        let r = 1.0 - t;
        let ln_st = 0.5 * math::ln(t);
        let ln_sr = 0.5 * math::ln(r);
        let blocks = (0..=cutoff)
            .map(|total| {
                let mut block = vec![0.0; (total + 1) * (total + 1)];
                for n1 in 0..=total {
                    let n2 = total - n1;
                    for m1 in 0..=total {
                        let m2 = total - m1;
                        block[n1 * (total + 1) + m1] = amplitude(n1, n2, m1, m2, ln_st, ln_sr);
                    }
                }
                block
            })
            .collect();
        Ok(Self { t, cutoff, blocks })
    }

    pub fn transmissivity(&self) -> f64 {
        self.t
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// Amplitude of `(n1, n2) -> (m1, m2)`; zero unless photon number is
    /// conserved and within the cutoff.
    pub fn coefficient(&self, n1: usize, n2: usize, m1: usize, m2: usize) -> f64 {
        let total = n1 + n2;
        if m1 + m2 != total || total > self.cutoff {
            return 0.0;
        }
        self.blocks[total][n1 * (total + 1) + m1]
    }

    /// Output distribution for the input `pnd`. Only inputs with at most
    /// `cutoff` photons are propagated, so the output tail also carries the
    /// input mass above the cutoff.
    pub fn transform(&self, pnd: &PhotonNumberDistribution) -> PhotonNumberDistribution {
        let n = self.cutoff;
        let mut out = vec![0.0; (n + 1) * (n + 1)];
        for total in 0..=n {
            let block = &self.blocks[total];
            for n1 in 0..=total {
                let p = pnd.get(n1, total - n1);
                if p == 0.0 {
                    continue;
                }
                for m1 in 0..=total {
                    let a = block[n1 * (total + 1) + m1];
                    out[m1 * (n + 1) + (total - m1)] += a * a * p;
                }
            }
        }
        PhotonNumberDistribution::from_table(n, n, out)
    }
}

/// Signed double sum over `k1`, with `k2` fixed by photon conservation.
fn amplitude(n1: usize, n2: usize, m1: usize, m2: usize, ln_st: f64, ln_sr: f64) -> f64 {
    debug_assert_eq!(n1 + n2, m1 + m2);
    let prefactor = 0.5
        * (math::ln_factorial(n1) + math::ln_factorial(n2) + math::ln_factorial(m1) + math::ln_factorial(m2));
    let mut acc = 0.0;
    for k1 in 0..=n1 {
        // m1 = n2 + k1 - k2
        let Some(k2) = (n2 + k1).checked_sub(m1) else {
            continue;
        };
        if k2 > n2 {
            continue;
        }
        let reflected = n1 + n2 - k1 - k2;
        let transmitted = k1 + k2;
        let ln_r = if reflected == 0 { 0.0 } else { reflected as f64 * ln_sr };
        let ln_t = if transmitted == 0 { 0.0 } else { transmitted as f64 * ln_st };
        let ln_term = prefactor + ln_r + ln_t
            - math::ln_factorial(k1)
            - math::ln_factorial(n1 - k1)
            - math::ln_factorial(k2)
            - math::ln_factorial(n2 - k2);
        let sign = if (n1 - k1) % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * math::exp(ln_term);
    }
    acc
}

/// Beam-splitter transform of `pnd` with a table sized to the input.
///
/// Fails with [`Error::Truncation`] if the output tail mass exceeds
/// `tail_tol`.
pub fn bs_transform_pnd(pnd: &PhotonNumberDistribution, t: f64, tail_tol: f64) -> Result<PhotonNumberDistribution> {
    let cutoff = pnd.n_max1().min(pnd.n_max2());
    let out = BsCoefficientTable::new(t, cutoff)?.transform(pnd);
    if out.tail_mass() > tail_tol {
        return Err(Error::Truncation {
            tail_mass: out.tail_mass(),
            n_max: cutoff,
        });
    }
    Ok(out)
}

fn check_efficiency(name: &'static str, eta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&eta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: eta,
            reason: "efficiency must lie in [0, 1]",
        })
    }
}

/// `thin[n][m] = C(n, m) η^m (1-η)^(n-m)`.
fn thinning_matrix(eta: f64, n_max: usize) -> Vec<Vec<f64>> {
    (0..=n_max)
        .map(|n| {
            (0..=n)
                .map(|m| {
                    let ln = math::ln_binomial(n, m) + math::ln_pow(eta, m) + math::ln_pow(1.0 - eta, n - m);
                    math::exp(ln)
                })
                .collect()
        })
        .collect()
}

/// Each photon of mode `j` is kept independently with probability `eta_j`.
pub fn bernoulli_downsample(pnd: &PhotonNumberDistribution, eta1: f64, eta2: f64) -> Result<PhotonNumberDistribution> {
    check_efficiency("eta1", eta1)?;
    check_efficiency("eta2", eta2)?;
    let (n1, n2) = (pnd.n_max1(), pnd.n_max2());
    let t1 = thinning_matrix(eta1, n1);
    let t2 = thinning_matrix(eta2, n2);
    // thin mode 2, then mode 1
    let mut half = vec![0.0; (n1 + 1) * (n2 + 1)];
    for a in 0..=n1 {
        for b in 0..=n2 {
            let p = pnd.get(a, b);
            if p == 0.0 {
                continue;
            }
            for (m, w) in t2[b].iter().enumerate() {
                half[a * (n2 + 1) + m] += w * p;
            }
        }
    }
    let mut out = vec![0.0; (n1 + 1) * (n2 + 1)];
    for a in 0..=n1 {
        for (m, w) in t1[a].iter().enumerate() {
            for b in 0..=n2 {
                out[m * (n2 + 1) + b] += w * half[a * (n2 + 1) + b];
            }
        }
    }
    Ok(PhotonNumberDistribution::from_table(n1, n2, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(n1: usize, n2: usize, n_max: usize) -> PhotonNumberDistribution {
        PhotonNumberDistribution::from_fn(n_max, n_max, |a, b| if (a, b) == (n1, n2) { 1.0 } else { 0.0 })
    }

    #[test]
    fn hong_ou_mandel() {
        let out = bs_transform_pnd(&single(1, 1, 4), 0.5, 1e-12).unwrap();
        assert!(out.get(1, 1) < 1e-30);
        assert!((out.get(2, 0) - 0.5).abs() < 1e-15);
        assert!((out.get(0, 2) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn single_photon_splits() {
        let table = BsCoefficientTable::new(0.3, 3).unwrap();
        let a = table.coefficient(1, 0, 1, 0);
        let b = table.coefficient(1, 0, 0, 1);
        assert!((a * a - 0.3).abs() < 1e-15);
        assert!((b * b - 0.7).abs() < 1e-15);
        assert_eq!(table.coefficient(1, 0, 1, 1), 0.0);
    }

    #[test]
    fn identity_at_full_transmission() {
        let table = BsCoefficientTable::new(1.0, 6).unwrap();
        for n1 in 0..=3 {
            for n2 in 0..=3 {
                for m1 in 0..=(n1 + n2) {
                    let c = table.coefficient(n1, n2, m1, n1 + n2 - m1);
                    assert_eq!(c.abs(), if m1 == n1 { 1.0 } else { 0.0 });
                }
            }
        }
    }

    #[test]
    fn blocks_are_orthogonal() {
        let table = BsCoefficientTable::new(0.37, 8).unwrap();
        let total = 8;
        for a in 0..=total {
            for b in 0..=total {
                let dot: f64 = (0..=total)
                    .map(|m| table.coefficient(a, total - a, m, total - m) * table.coefficient(b, total - b, m, total - m))
                    .sum();
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12, "{a} {b} {dot}");
            }
        }
    }

    #[test]
    fn transform_keeps_mass() {
        let pnd = PhotonNumberDistribution::from_fn(10, 10, |a, b| if a + b <= 10 { 1.0 / 66.0 } else { 0.0 });
        let out = bs_transform_pnd(&pnd, 0.8, 1e-10).unwrap();
        assert!((out.total() - pnd.total()).abs() < 1e-13);
    }

    #[test]
    fn truncation_is_reported() {
        let pnd = PhotonNumberDistribution::from_fn(3, 3, |_, _| 1.0 / 16.0);
        assert!(matches!(bs_transform_pnd(&pnd, 0.5, 1e-10), Err(Error::Truncation { .. })));
    }

    #[test]
    fn downsample_limits() {
        let pnd = PhotonNumberDistribution::from_fn(5, 5, |a, b| if a == b { 1.0 / 6.0 } else { 0.0 });
        let same = bernoulli_downsample(&pnd, 1.0, 1.0).unwrap();
        assert!(same.max_abs_diff(&pnd) < 1e-15);
        let dark = bernoulli_downsample(&pnd, 0.0, 0.0).unwrap();
        assert!((dark.get(0, 0) - 1.0).abs() < 1e-15);
        assert!(bernoulli_downsample(&pnd, 1.2, 0.5).is_err());
        let half = bernoulli_downsample(&single(1, 0, 2), 0.25, 1.0).unwrap();
        assert!((half.get(1, 0) - 0.25).abs() < 1e-15 && (half.get(0, 0) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn factorial_moments_of_tables() {
        let pnd = single(3, 2, 4);
        let m = factorial_moment_from_pnd(&pnd, 2, 1);
        assert_eq!(m.value, 6.0 * 2.0);
        assert!(m.error_bound < 1e-12);
        let vac = single(0, 0, 3);
        assert_eq!(factorial_moment_from_pnd(&vac, 1, 0).value, 0.0);
    }
}
