//! Two-mode Gaussian states in the normally-ordered parametrisation and the
//! physical maps acting on them.
//!
//! A state is fixed by six numbers: the mean photon numbers `b1`, `b2`, the
//! intra-mode variances `c1 = <Δa1²>`, `c2 = <Δa2²>`, the anomalous
//! correlation `d12 = <Δa1 Δa2>` and the normal correlation
//! `dbar12 = -<Δa1† Δa2>`.

use core::f64::consts::PI;

use num_complex::Complex64;

use crate::math;
use crate::{Error, Result};

/// Smallest admissible symplectic eigenvalue (vacuum variance is 1/2).
pub const PHYSICALITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeGaussianState {
    b1: f64,
    b2: f64,
    c1: Complex64,
    c2: Complex64,
    d12: Complex64,
    dbar12: Complex64,
}

/// Noisy twin beam: `bp` mean photon pairs plus independent thermal noise
/// with means `bs` (signal, mode 1) and `bi` (idler, mode 2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwinBeamParams {
    bp: f64,
    bs: f64,
    bi: f64,
}

/// Lossless beam splitter with intensity transmissivity `t` and phase `phi`.
/// The reflectance is always `1 - t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterParams {
    t: f64,
    phi: f64,
}

/// Normally-ordered covariance matrix over `(β1, β1*, β2, β2*)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrixN {
    entries: [[Complex64; 4]; 4],
}

fn check_non_negative(name: &'static str, value: f64) -> Result<f64> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        });
    }
    if value < 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be non-negative",
        });
    }
    Ok(value)
}

fn check_unit_interval(name: &'static str, value: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&value) {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must lie in [0, 1]",
        });
    }
    Ok(value)
}

fn check_complex(name: &'static str, z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::InvalidParameter {
            name,
            value: if z.re.is_finite() { z.im } else { z.re },
            reason: "must be finite",
        });
    }
    Ok(z)
}

/// `det(2Σ)` for a two-mode covariance with means `b1`, `b2` and complex
/// correlations `c1`, `c2`, `d`, `db`, where `Σ` is the real 4×4 covariance
/// of `(Re α1, Im α1, Re α2, Im α2)`.
///
/// With normal-ordered means this is the `λ1²λ2²` coefficient of the
/// generating-function polynomial; with means shifted by 1/2 it is the
/// determinant of the symmetrically-ordered quadrature covariance.
///
/// Two groupings of the same polynomial are evaluated and the one with the
/// smaller rounding scale is returned: around `(b1 b2 - |d|² - |d̄|²)²` for
/// pair-correlated states and around `(b1² - |c1|²)(b2² - |c2|²)` for
/// nearly independent squeezed modes. Either way no terms of order `b⁴`
/// cancel.
pub(crate) fn det_two_sigma(
    b1: f64,
    b2: f64,
    c1: Complex64,
    c2: Complex64,
    d: Complex64,
    db: Complex64,
) -> f64 {
    let c1s = c1.norm_sqr();
    let c2s = c2.norm_sqr();
    let ds = d.norm_sqr();
    let dbs = db.norm_sqr();
    let e = ds + dbs;
    let x2 = (c2 * db.conj() * d.conj()).re;
    let x1 = (c1 * db * d.conj()).re;
    let y1 = (c1 * c2 * d.conj() * d.conj()).re;
    let y2 = (c1 * c2.conj() * db * db).re;
    let rest = -4.0 * ds * dbs - 4.0 * b1 * x2 - 4.0 * b2 * x1 - 2.0 * y1 - 2.0 * y2;

    let g = b1 * b2 - e;
    let paired = g * g + c1s * c2s - b1 * b1 * c2s - b2 * b2 * c1s;
    let paired_scale = g * g + c1s * c2s + b1 * b1 * c2s + b2 * b2 * c1s;

    let k1 = (b1 - c1.norm()) * (b1 + c1.norm());
    let k2 = (b2 - c2.norm()) * (b2 + c2.norm());
    let squeezed = k1 * k2 + e * (e - 2.0 * b1 * b2);
    let squeezed_scale = (k1 * k2).abs() + e * (e + 2.0 * b1 * b2);

    if paired_scale <= squeezed_scale {
        paired + rest
    } else {
        squeezed + rest
    }
}

impl TwoModeGaussianState {
    /// Validates finiteness, `b1, b2 >= 0` and the uncertainty relation.
    pub fn new(
        b1: f64,
        b2: f64,
        c1: Complex64,
        c2: Complex64,
        d12: Complex64,
        dbar12: Complex64,
    ) -> Result<Self> {
        let state = Self {
            b1: check_non_negative("b1", b1)?,
            b2: check_non_negative("b2", b2)?,
            c1: check_complex("c1", c1)?,
            c2: check_complex("c2", c2)?,
            d12: check_complex("d12", d12)?,
            dbar12: check_complex("dbar12", dbar12)?,
        };
        if !state.is_physical() {
            let (nu_min, _) = state.symplectic_eigenvalues();
            return Err(Error::Unphysical { nu_min });
        }
        Ok(state)
    }

    pub(crate) fn from_parts(
        b1: f64,
        b2: f64,
        c1: Complex64,
        c2: Complex64,
        d12: Complex64,
        dbar12: Complex64,
    ) -> Self {
        Self {
            b1,
            b2,
            c1,
            c2,
            d12,
            dbar12,
        }
    }

    pub fn vacuum() -> Self {
        let zero = Complex64::new(0.0, 0.0);
        Self::from_parts(0.0, 0.0, zero, zero, zero, zero)
    }

    pub fn b1(&self) -> f64 {
        self.b1
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn c1(&self) -> Complex64 {
        self.c1
    }

    pub fn c2(&self) -> Complex64 {
        self.c2
    }

    pub fn d12(&self) -> Complex64 {
        self.d12
    }

    pub fn dbar12(&self) -> Complex64 {
        self.dbar12
    }

    /// Mean photon number of `mode` (1 or 2); panics otherwise.
    pub fn b(&self, mode: u8) -> f64 {
        match mode {
            1 => self.b1,
            2 => self.b2,
            _ => panic!("mode must be 1 or 2, got {mode}"),
        }
    }

    /// Intra-mode variance of `mode` (1 or 2); panics otherwise.
    pub fn c(&self, mode: u8) -> Complex64 {
        match mode {
            1 => self.c1,
            2 => self.c2,
            _ => panic!("mode must be 1 or 2, got {mode}"),
        }
    }

    /// Relabels mode 1 as mode 2 and vice versa.
    pub fn swap_modes(&self) -> Self {
        // <a2† a1> = conj(<a1† a2>)
        Self::from_parts(
            self.b2,
            self.b1,
            self.c2,
            self.c1,
            self.d12,
            self.dbar12.conj(),
        )
    }

    /// Symmetrically-ordered covariance of the quadratures
    /// `(x1, p1, x2, p2)` with `x = (a + a†)/√2`; the vacuum is `I/2`.
    pub fn symmetric_covariance(&self) -> [[f64; 4]; 4] {
        let (c1, c2, d, db) = (self.c1, self.c2, self.d12, self.dbar12);
        let mut v = [[0.0; 4]; 4];
        v[0][0] = self.b1 + c1.re + 0.5;
        v[1][1] = self.b1 - c1.re + 0.5;
        v[0][1] = c1.im;
        v[2][2] = self.b2 + c2.re + 0.5;
        v[3][3] = self.b2 - c2.re + 0.5;
        v[2][3] = c2.im;
        v[0][2] = d.re - db.re;
        v[1][3] = -d.re - db.re;
        v[0][3] = d.im - db.im;
        v[1][2] = d.im + db.im;
        for i in 0..4 {
            for j in 0..i {
                v[i][j] = v[j][i];
            }
        }
        v
    }

    /// Local invariants `(det A, det B, det C)` of the symmetric covariance
    /// split into 2×2 blocks.
    fn block_invariants(&self) -> (f64, f64, f64) {
        let a1 = self.b1 + 0.5;
        let a2 = self.b2 + 0.5;
        let det_a = (a1 - self.c1.norm()) * (a1 + self.c1.norm());
        let det_b = (a2 - self.c2.norm()) * (a2 + self.c2.norm());
        let det_c = self.dbar12.norm_sqr() - self.d12.norm_sqr();
        (det_a, det_b, det_c)
    }

    /// Determinant of the symmetric covariance.
    pub fn symmetric_determinant(&self) -> f64 {
        det_two_sigma(
            self.b1 + 0.5,
            self.b2 + 0.5,
            self.c1,
            self.c2,
            self.d12,
            self.dbar12,
        )
    }

    /// `Δ² - 4 det V` split as `(det A - det B)² + 4 det C (det A + det B)
    /// + 4 tr(A J C J B J Cᵀ J)`, with a rounding scale. Exact for product
    /// states, where the direct form loses half its digits.
    fn split_discriminant(&self, transpose: bool) -> (f64, f64) {
        type M2 = [[f64; 2]; 2];
        fn mul(x: &M2, y: &M2) -> M2 {
            [
                [x[0][0] * y[0][0] + x[0][1] * y[1][0], x[0][0] * y[0][1] + x[0][1] * y[1][1]],
                [x[1][0] * y[0][0] + x[1][1] * y[1][0], x[1][0] * y[0][1] + x[1][1] * y[1][1]],
            ]
        }
        fn norm(x: &M2) -> f64 {
            math::sqrt(x.iter().flatten().map(|v| v * v).sum())
        }
        let v = self.symmetric_covariance();
        let flip = if transpose { -1.0 } else { 1.0 };
        let a: M2 = [[v[0][0], v[0][1]], [v[1][0], v[1][1]]];
        let b: M2 = [[v[2][2], flip * v[2][3]], [flip * v[3][2], v[3][3]]];
        let c: M2 = [[v[0][2], flip * v[0][3]], [v[1][2], flip * v[1][3]]];
        let ct: M2 = [[c[0][0], c[1][0]], [c[0][1], c[1][1]]];
        let j: M2 = [[0.0, 1.0], [-1.0, 0.0]];
        let m = mul(&mul(&mul(&a, &j), &mul(&c, &j)), &mul(&mul(&b, &j), &mul(&ct, &j)));
        let tr = m[0][0] + m[1][1];
        let (det_a, det_b, det_c) = self.block_invariants();
        let det_c = flip * det_c;
        let value = (det_a - det_b) * (det_a - det_b) + 4.0 * det_c * (det_a + det_b) + 4.0 * tr;
        let scale = (det_a - det_b).abs() * (det_a.abs() + det_b.abs())
            + 4.0 * det_c.abs() * (det_a.abs() + det_b.abs())
            + 4.0 * norm(&a) * norm(&b) * norm(&c) * norm(&c);
        (value, scale)
    }

    fn spectrum(&self, transpose: bool) -> (f64, f64) {
        let (det_a, det_b, det_c) = self.block_invariants();
        let seralian = if transpose {
            det_a + det_b - 2.0 * det_c
        } else {
            det_a + det_b + 2.0 * det_c
        };
        let det_v = self.symmetric_determinant();
        let (split, split_scale) = self.split_discriminant(transpose);
        let direct_scale = seralian * seralian + 4.0 * det_v.abs();
        let disc = if split_scale < direct_scale {
            split
        } else {
            seralian * seralian - 4.0 * det_v
        }
        .max(0.0);
        let nu_plus_sq = 0.5 * (seralian + math::sqrt(disc));
        let nu_minus_sq = if nu_plus_sq > 0.0 {
            det_v / nu_plus_sq
        } else {
            0.0
        };
        (
            math::sqrt(nu_minus_sq.max(0.0)),
            math::sqrt(nu_plus_sq.max(0.0)),
        )
    }

    /// Symplectic eigenvalues `(ν−, ν+)` of the symmetric covariance.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        self.spectrum(false)
    }

    /// Symplectic eigenvalues of the partially transposed covariance.
    pub fn partial_transpose_eigenvalues(&self) -> (f64, f64) {
        self.spectrum(true)
    }

    /// Uncertainty relation `V + iΩ/2 >= 0`, i.e. `ν− >= 1/2` up to
    /// [`PHYSICALITY_TOL`].
    ///
    /// Tested through `(1/4 - ν−²)(1/4 - ν+²) = 1/16 - Δ/4 + det V >= 0`
    /// together with `det V >= 1/16`, which avoids the square root that makes
    /// the eigenvalues themselves inaccurate when `ν− ≈ ν+`.
    pub fn is_physical(&self) -> bool {
        let v = self.symmetric_covariance();
        let (det_a, det_b, det_c) = self.block_invariants();
        if !(v[0][0] > 0.0 && v[2][2] > 0.0 && det_a > 0.0 && det_b > 0.0) {
            return false;
        }
        let det_v = self.symmetric_determinant();
        let seralian = det_a + det_b + 2.0 * det_c;
        // det V carries terms of order b⁴ whose rounding no grouping removes
        // for every state; in eigenvalue terms this is a shift of ~ε b²
        let size = 1.0 + self.b1 + self.b2;
        let noise = 32.0 * f64::EPSILON * size * size * size * size;
        // both eigenvalues below 1/2 would also give a positive product
        if det_v < 0.0625 * (1.0 - 4.0 * PHYSICALITY_TOL) - noise {
            return false;
        }
        let product = 0.0625 - 0.25 * seralian + det_v;
        product >= -PHYSICALITY_TOL * (seralian - 0.5).max(0.0) - noise
    }

    /// Largest absolute difference over the six parameters.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let diffs = [
            (self.b1 - other.b1).abs(),
            (self.b2 - other.b2).abs(),
            (self.c1 - other.c1).norm(),
            (self.c2 - other.c2).norm(),
            (self.d12 - other.d12).norm(),
            (self.dbar12 - other.dbar12).norm(),
        ];
        diffs.into_iter().fold(0.0, f64::max)
    }
}

impl TwinBeamParams {
    pub fn new(bp: f64, bs: f64, bi: f64) -> Result<Self> {
        Ok(Self {
            bp: check_non_negative("bp", bp)?,
            bs: check_non_negative("bs", bs)?,
            bi: check_non_negative("bi", bi)?,
        })
    }

    pub fn noiseless(bp: f64) -> Result<Self> {
        Self::new(bp, 0.0, 0.0)
    }

    pub fn bp(&self) -> f64 {
        self.bp
    }

    pub fn bs(&self) -> f64 {
        self.bs
    }

    pub fn bi(&self) -> f64 {
        self.bi
    }

    /// `|D12| = sqrt(bp (bp + 1))`.
    pub fn pair_correlation(&self) -> f64 {
        math::sqrt(self.bp * (self.bp + 1.0))
    }
}

impl BeamSplitterParams {
    pub fn new(t: f64, phi: f64) -> Result<Self> {
        if !phi.is_finite() {
            return Err(Error::InvalidParameter {
                name: "phi",
                value: phi,
                reason: "must be finite",
            });
        }
        Ok(Self {
            t: check_unit_interval("t", t)?,
            phi,
        })
    }

    /// Beam splitter with zero phase.
    pub fn with_transmissivity(t: f64) -> Result<Self> {
        Self::new(t, 0.0)
    }

    pub fn balanced() -> Self {
        Self { t: 0.5, phi: 0.0 }
    }

    pub fn transmissivity(&self) -> f64 {
        self.t
    }

    pub fn reflectance(&self) -> f64 {
        1.0 - self.t
    }

    pub fn phase(&self) -> f64 {
        self.phi
    }

    /// The splitter undoing this one: `U(T, φ)† = U(T, φ + π)`.
    pub fn inverse(&self) -> Self {
        let mut phi = self.phi + PI;
        if phi > PI {
            phi -= 2.0 * PI;
        }
        Self { t: self.t, phi }
    }

    /// The 4×4 unitary acting on `(β1, β1*, β2, β2*)`.
    pub fn unitary(&self) -> [[Complex64; 4]; 4] {
        let st = Complex64::new(math::sqrt(self.t), 0.0);
        let sr = math::sqrt(self.reflectance());
        let e = Complex64::from_polar(sr, self.phi);
        let zero = Complex64::new(0.0, 0.0);
        [
            [st, zero, -e, zero],
            [zero, st, zero, -e.conj()],
            [e.conj(), zero, st, zero],
            [zero, e, zero, st],
        ]
    }
}

impl CovarianceMatrixN {
    pub fn from_state(state: &TwoModeGaussianState) -> Self {
        let s = state;
        let b1 = Complex64::new(-s.b1, 0.0);
        let b2 = Complex64::new(-s.b2, 0.0);
        let (c1, c2, d, db) = (s.c1, s.c2, s.d12, s.dbar12);
        Self {
            entries: [
                [b1, c1, db.conj(), d],
                [c1.conj(), b1, d.conj(), db],
                [db, d, b2, c2],
                [d.conj(), db.conj(), c2.conj(), b2],
            ],
        }
    }

    pub fn entries(&self) -> &[[Complex64; 4]; 4] {
        &self.entries
    }

    /// Reads the state parameters back from their canonical positions.
    pub fn to_state(&self) -> Result<TwoModeGaussianState> {
        let e = &self.entries;
        TwoModeGaussianState::new(-e[0][0].re, -e[2][2].re, e[0][1], e[2][3], e[0][3], e[2][0])
    }

    /// `U† A U`.
    pub fn congruence(&self, u: &[[Complex64; 4]; 4]) -> Self {
        let zero = Complex64::new(0.0, 0.0);
        let mut au = [[zero; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                au[i][j] = (0..4).map(|k| self.entries[i][k] * u[k][j]).sum();
            }
        }
        let mut out = [[zero; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = (0..4).map(|k| u[k][i].conj() * au[k][j]).sum();
            }
        }
        Self { entries: out }
    }

    /// Largest deviation from the block pattern (equal diagonal pairs and
    /// conjugate mirror entries).
    pub fn pattern_defect(&self) -> f64 {
        let e = &self.entries;
        let pairs = [
            (e[0][0], e[1][1]),
            (e[2][2], e[3][3]),
            (e[1][0], e[0][1].conj()),
            (e[3][2], e[2][3].conj()),
            (e[1][2], e[0][3].conj()),
            (e[1][3], e[2][0]),
            (e[0][2], e[2][0].conj()),
            (e[3][0], e[0][3].conj()),
            (e[3][1], e[2][0].conj()),
            (e[2][1], e[0][3]),
        ];
        pairs.iter().fold(0.0, |m, (a, b)| f64::max(m, (a - b).norm()))
    }
}

/// Noisy twin beam: `b1 = bp + bs`, `b2 = bp + bi`,
/// `d12 = i sqrt(bp (bp + 1))`, all other correlations zero.
pub fn twin_beam(params: TwinBeamParams) -> TwoModeGaussianState {
    let zero = Complex64::new(0.0, 0.0);
    TwoModeGaussianState::from_parts(
        params.bp + params.bs,
        params.bp + params.bi,
        zero,
        zero,
        Complex64::new(0.0, params.pair_correlation()),
        zero,
    )
}

/// General beam-splitter map `A_out = U† A_in U`.
pub fn beam_splitter(
    state: &TwoModeGaussianState,
    bs: BeamSplitterParams,
) -> TwoModeGaussianState {
    let out = CovarianceMatrixN::from_state(state).congruence(&bs.unitary());
    let e = out.entries();
    TwoModeGaussianState::from_parts(
        -e[0][0].re,
        -e[2][2].re,
        e[0][1],
        e[2][3],
        e[0][3],
        e[2][0],
    )
}

/// Closed-form beam-splitter output for a twin-beam input at zero phase.
/// Mean photon numbers are reported as non-negative magnitudes.
pub fn beam_splitter_twin_beam(
    params: TwinBeamParams,
    t: f64,
) -> Result<TwoModeGaussianState> {
    let t = check_unit_interval("t", t)?;
    let r = 1.0 - t;
    let d = params.pair_correlation();
    let str_ = math::sqrt(t * r);
    let c = Complex64::new(0.0, 2.0 * str_ * d);
    Ok(TwoModeGaussianState::from_parts(
        t * params.bs + params.bp + r * params.bi,
        t * params.bi + params.bp + r * params.bs,
        c,
        -c,
        Complex64::new(0.0, (2.0 * t - 1.0) * d),
        Complex64::new(str_ * (params.bs - params.bi), 0.0),
    ))
}

/// Independent Gaussian loss on each mode with efficiencies `eta1`, `eta2`.
pub fn attenuate(
    state: &TwoModeGaussianState,
    eta1: f64,
    eta2: f64,
) -> Result<TwoModeGaussianState> {
    let eta1 = check_unit_interval("eta1", eta1)?;
    let eta2 = check_unit_interval("eta2", eta2)?;
    let cross = math::sqrt(eta1 * eta2);
    Ok(TwoModeGaussianState::from_parts(
        eta1 * state.b1,
        eta2 * state.b2,
        state.c1 * eta1,
        state.c2 * eta2,
        state.d12 * cross,
        state.dbar12 * cross,
    ))
}

pub fn covariance_n(state: &TwoModeGaussianState) -> CovarianceMatrixN {
    CovarianceMatrixN::from_state(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tb(bp: f64, bs: f64, bi: f64) -> TwoModeGaussianState {
        twin_beam(TwinBeamParams::new(bp, bs, bi).unwrap())
    }

    #[test]
    fn twin_beam_parameters() {
        let vac = tb(0.0, 0.0, 0.0);
        assert_eq!(vac, TwoModeGaussianState::vacuum());

        let s = tb(1.0, 0.0, 0.0);
        assert_eq!(s.b1(), 1.0);
        assert_eq!(s.b2(), 1.0);
        assert!((s.d12() - c(0.0, 2f64.sqrt())).norm() < 1e-15);
        assert_eq!(s.c1(), c(0.0, 0.0));
        assert_eq!(s.dbar12(), c(0.0, 0.0));

        let s = tb(0.5, 0.2, 0.1);
        assert!((s.b1() - 0.7).abs() < 1e-15);
        assert!((s.b2() - 0.6).abs() < 1e-15);
        assert!((s.d12().norm_sqr() - 0.75).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(TwinBeamParams::new(-1.0, 0.0, 0.0).is_err());
        assert!(TwinBeamParams::new(f64::NAN, 0.0, 0.0).is_err());
        assert!(TwinBeamParams::new(1.0, f64::INFINITY, 0.0).is_err());
        assert!(BeamSplitterParams::with_transmissivity(1.2).is_err());
        assert!(BeamSplitterParams::with_transmissivity(-0.1).is_err());
        assert!(attenuate(&tb(1.0, 0.0, 0.0), 1.5, 0.5).is_err());
        assert!(attenuate(&tb(1.0, 0.0, 0.0), 0.5, -0.5).is_err());
    }

    #[test]
    fn physicality() {
        assert!(TwoModeGaussianState::vacuum().is_physical());
        assert!(tb(1.0, 0.3, 0.0).is_physical());
        assert!(tb(1e3, 0.0, 0.0).is_physical());
        // too much pair correlation for the given photon numbers
        let bad = TwoModeGaussianState::new(1.0, 1.0, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.5), c(0.0, 0.0));
        assert!(matches!(bad, Err(Error::Unphysical { .. })));
        // squeezing beyond the single-mode bound |C|^2 <= B(B+1)
        let bad = TwoModeGaussianState::new(1.0, 0.0, c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(bad.is_err());
        let ok = TwoModeGaussianState::new(1.0, 0.0, c(2f64.sqrt(), 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        assert!(ok.is_ok());
        assert!(TwoModeGaussianState::new(-0.1, 0.0, c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).is_err());
    }

    #[test]
    fn twin_beam_symplectic_spectrum_is_pure() {
        for bp in [1e-3, 0.1, 1.0, 10.0, 1e3] {
            let (lo, hi) = tb(bp, 0.0, 0.0).symplectic_eigenvalues();
            assert!((lo - 0.5).abs() < 1e-9, "bp={bp}: {lo}");
            assert!((hi - 0.5).abs() < 1e-9, "bp={bp}: {hi}");
        }
    }

    #[test]
    fn identity_splitter() {
        let s = tb(1.0, 0.0, 0.0);
        let out = beam_splitter(&s, BeamSplitterParams::with_transmissivity(1.0).unwrap());
        assert!(out.max_abs_diff(&s) < 1e-15);
    }

    #[test]
    fn balanced_splitter_bunches_pairs() {
        let s = tb(1.0, 0.0, 0.0);
        let out = beam_splitter(&s, BeamSplitterParams::balanced());
        assert!(out.d12().norm() < 1e-15);
        assert!((out.c1() - c(0.0, 2f64.sqrt())).norm() < 1e-15);
        assert!((out.c2() - c(0.0, -(2f64.sqrt()))).norm() < 1e-15);
        assert!(out.is_physical());
    }

    #[test]
    fn noisy_splitter_normal_correlation() {
        let p = TwinBeamParams::new(0.5, 0.3, 0.1).unwrap();
        let out = beam_splitter(&twin_beam(p), BeamSplitterParams::with_transmissivity(0.7).unwrap());
        assert!((out.dbar12().re - 0.0916515138991168).abs() < 1e-12);
        assert!(out.dbar12().im.abs() < 1e-15);
    }

    #[test]
    fn congruence_matches_closed_form() {
        for &(bp, bs, bi) in &[(0.5, 0.3, 0.1), (2.0, 0.0, 1.0), (0.01, 0.7, 0.7)] {
            for &t in &[0.0, 0.1, 0.5, 0.73, 1.0] {
                let p = TwinBeamParams::new(bp, bs, bi).unwrap();
                let a = beam_splitter(&twin_beam(p), BeamSplitterParams::with_transmissivity(t).unwrap());
                let b = beam_splitter_twin_beam(p, t).unwrap();
                assert!(a.max_abs_diff(&b) < 1e-13, "bp={bp} t={t}");
            }
        }
    }

    #[test]
    fn splitter_phase_and_inverse() {
        let s = beam_splitter_twin_beam(TwinBeamParams::new(0.4, 0.2, 0.05).unwrap(), 0.3).unwrap();
        let bs = BeamSplitterParams::new(0.62, 0.9).unwrap();
        let back = beam_splitter(&beam_splitter(&s, bs), bs.inverse());
        assert!(back.max_abs_diff(&s) < 1e-12);
    }

    #[test]
    fn two_balanced_splitters_swap_modes() {
        let s = tb(0.8, 0.3, 0.0);
        let twice = beam_splitter(&beam_splitter(&s, BeamSplitterParams::balanced()), BeamSplitterParams::balanced());
        assert!((twice.b1() - s.b2()).abs() < 1e-14);
        assert!((twice.b2() - s.b1()).abs() < 1e-14);
        assert!((twice.d12().norm() - s.d12().norm()).abs() < 1e-14);
    }

    #[test]
    fn attenuation_scaling() {
        let s = tb(1.0, 0.0, 0.0);
        assert_eq!(attenuate(&s, 1.0, 1.0).unwrap(), s);
        let a = attenuate(&s, 0.5, 0.5).unwrap();
        assert!((a.b1() - 0.5).abs() < 1e-15);
        assert!((a.d12().norm_sqr() - 0.5).abs() < 1e-15);
        assert!(a.is_physical());
    }

    #[test]
    fn covariance_layout() {
        let z = covariance_n(&TwoModeGaussianState::vacuum());
        assert!(z.entries().iter().flatten().all(|e| e.norm() == 0.0));

        let m = covariance_n(&tb(1.0, 0.0, 0.0));
        let e = m.entries();
        for i in 0..4 {
            assert_eq!(e[i][i], c(-1.0, 0.0));
        }
        let r2 = 2f64.sqrt();
        assert!((e[0][3] - c(0.0, r2)).norm() < 1e-15);
        assert!((e[1][2] - c(0.0, -r2)).norm() < 1e-15);
        assert!((e[2][1] - c(0.0, r2)).norm() < 1e-15);
        assert!((e[3][0] - c(0.0, -r2)).norm() < 1e-15);
        assert_eq!(m.pattern_defect(), 0.0);

        let s = beam_splitter(&tb(0.3, 0.2, 0.6), BeamSplitterParams::new(0.3, 0.4).unwrap());
        let m = covariance_n(&s);
        assert!(m.pattern_defect() < 1e-15);
        assert_eq!(m.to_state().unwrap(), s);
    }

    #[test]
    fn swap_is_an_involution() {
        let s = beam_splitter(&tb(0.3, 0.2, 0.6), BeamSplitterParams::new(0.3, 0.4).unwrap());
        assert_eq!(s.swap_modes().swap_modes(), s);
        assert!(s.swap_modes().is_physical());
    }

    #[test]
    fn discriminant_split_matches_direct_form() {
        let s = beam_splitter(&tb(0.7, 0.3, 0.2), BeamSplitterParams::new(0.3, 0.9).unwrap());
        let s = attenuate(&s, 0.8, 0.6).unwrap();
        for transpose in [false, true] {
            let (det_a, det_b, det_c) = s.block_invariants();
            let sign = if transpose { -2.0 } else { 2.0 };
            let delta = det_a + det_b + sign * det_c;
            let direct = delta * delta - 4.0 * s.symmetric_determinant();
            let (split, _) = s.split_discriminant(transpose);
            assert!((direct - split).abs() < 1e-12 * (1.0 + direct.abs()), "{direct} vs {split}");
        }
    }

    #[test]
    fn product_of_pure_modes_has_exact_spectrum() {
        let out = beam_splitter(&tb(10.0, 0.0, 0.0), BeamSplitterParams::balanced());
        let (lo, hi) = out.partial_transpose_eigenvalues();
        assert!((lo - 0.5).abs() < 1e-13 && (hi - 0.5).abs() < 1e-13, "{lo} {hi}");
    }
}
