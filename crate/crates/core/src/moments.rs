//! Intensity moments and photon-number distributions of two-mode Gaussian
//! states.
//!
//! Both follow from the normal generating function
//! `G(λ1, λ2) = Q(λ1, λ2)^(-1/2)` with `Q = λᵀ K λ` and
//! `λ = (1, λ1, λ2, λ1 λ2)`. Intensity moments are signed derivatives of `G`
//! at the origin, joint photon-number probabilities are signed Taylor
//! coefficients at `(1, 1)` and marginal probabilities are coefficients at
//! `(1, 0)` or `(0, 1)`. The derivatives come from [`BivariateSeries`].

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::math;
use crate::series::BivariateSeries;
use crate::state::{det_two_sigma, TwinBeamParams, TwoModeGaussianState};
use crate::{Error, Result};

/// Default limit on `k1 + k2` (or `n1 + n2`) for single-element queries.
pub const DEFAULT_MAX_ORDER: usize = 12;
/// Tail mass accepted by [`Engine::distribution`] by default.
pub const DEFAULT_TAIL_TOL: f64 = 1e-10;
/// Hard cap on the adaptive truncation of [`Engine::distribution`].
pub const MAX_TRUNCATION: usize = 4096;

/// Upper-triangular quadratic-form matrix of the generating function; the
/// `(1, 1)` entry is always 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMatrix {
    pub k12: f64,
    pub k13: f64,
    pub k14: f64,
    pub k22: f64,
    pub k24: f64,
    pub k33: f64,
    pub k34: f64,
    pub k44: f64,
}

impl KMatrix {
    pub fn from_state(state: &TwoModeGaussianState) -> Self {
        let (b1, b2) = (state.b1(), state.b2());
        let (c1, c2, d, db) = (state.c1(), state.c2(), state.d12(), state.dbar12());
        let c1s = c1.norm_sqr();
        let c2s = c2.norm_sqr();
        let cross = d.norm_sqr() + db.norm_sqr();
        // b1 b2 - |D|^2 - |D̄|^2 is evaluated once so that the twin-beam
        // cancellation happens at order b² rather than b⁴
        let g = b1 * b2 - cross;
        let re1 = (c1 * db * d.conj()).re;
        let re2 = (c2 * db.conj() * d.conj()).re;
        Self {
            k12: 2.0 * b1,
            k13: 2.0 * b2,
            k14: 2.0 * b1 * b2 + 2.0 * g,
            k22: (b1 - c1.norm()) * (b1 + c1.norm()),
            k24: 2.0 * b1 * g - 2.0 * b2 * c1s - 4.0 * re1,
            k33: (b2 - c2.norm()) * (b2 + c2.norm()),
            k34: 2.0 * b2 * g - 2.0 * b1 * c2s - 4.0 * re2,
            k44: det_two_sigma(b1, b2, c1, c2, d, db),
        }
    }

    /// Coefficient of `λ1^i λ2^j` in `Q`, for `i, j <= 2`.
    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => 1.0,
            (1, 0) => self.k12,
            (0, 1) => self.k13,
            (1, 1) => self.k14,
            (2, 0) => self.k22,
            (0, 2) => self.k33,
            (2, 1) => self.k24,
            (1, 2) => self.k34,
            (2, 2) => self.k44,
            _ => 0.0,
        }
    }

    /// `Q(λ1, λ2) = λᵀ K λ`.
    pub fn q(&self, l1: f64, l2: f64) -> f64 {
        let mut acc = 0.0;
        for i in (0..=2).rev() {
            let mut row = 0.0;
            for j in (0..=2).rev() {
                row = row * l2 + self.coefficient(i, j);
            }
            acc = acc * l1 + row;
        }
        acc
    }

    /// `G(λ1, λ2) = Q^(-1/2)`.
    pub fn generating_function(&self, l1: f64, l2: f64) -> f64 {
        1.0 / math::sqrt(self.q(l1, l2))
    }

    /// Coefficients of `Q(x + u, y + v)` as a series in `(u, v)`.
    pub fn expand_at(&self, x: f64, y: f64, order1: usize, order2: usize) -> BivariateSeries {
        let xp = [1.0, x, x * x];
        let yp = [1.0, y, y * y];
        let binom = [[1.0, 0.0, 0.0], [1.0, 1.0, 0.0], [1.0, 2.0, 1.0]];
        BivariateSeries::from_fn(order1, order2, |i, j| {
            if i > 2 || j > 2 {
                return 0.0;
            }
            let mut acc = 0.0;
            for a in i..=2 {
                for b in j..=2 {
                    acc += self.coefficient(a, b)
                        * binom[a][i]
                        * binom[b][j]
                        * xp[a - i]
                        * yp[b - j];
                }
            }
            acc
        })
    }
}

pub fn build_k_matrix(state: &TwoModeGaussianState) -> KMatrix {
    KMatrix::from_state(state)
}

/// Truncated joint photon-number distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct PhotonNumberDistribution {
    n_max1: usize,
    n_max2: usize,
    p: Vec<f64>,
    tail_mass: f64,
}

impl PhotonNumberDistribution {
    /// Wraps a row-major `(n_max1 + 1) × (n_max2 + 1)` table; the tail mass
    /// is whatever is missing from unit total.
    pub fn from_table(n_max1: usize, n_max2: usize, p: Vec<f64>) -> Self {
        assert_eq!(p.len(), (n_max1 + 1) * (n_max2 + 1), "table shape");
        let total: f64 = p.iter().sum();
        Self {
            n_max1,
            n_max2,
            p,
            tail_mass: 1.0 - total,
        }
    }

    pub fn from_fn(n_max1: usize, n_max2: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut p = Vec::with_capacity((n_max1 + 1) * (n_max2 + 1));
        for n1 in 0..=n_max1 {
            for n2 in 0..=n_max2 {
                p.push(f(n1, n2));
            }
        }
        Self::from_table(n_max1, n_max2, p)
    }

    pub fn n_max1(&self) -> usize {
        self.n_max1
    }

    pub fn n_max2(&self) -> usize {
        self.n_max2
    }

    /// `p(n1, n2)`, zero outside the table.
    pub fn get(&self, n1: usize, n2: usize) -> f64 {
        if n1 > self.n_max1 || n2 > self.n_max2 {
            0.0
        } else {
            self.p[n1 * (self.n_max2 + 1) + n2]
        }
    }

    pub fn table(&self) -> &[f64] {
        &self.p
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// Marginal of `mode` (1 or 2) over the retained table.
    pub fn marginal(&self, mode: u8) -> Vec<f64> {
        match mode {
            1 => (0..=self.n_max1)
                .map(|n1| (0..=self.n_max2).map(|n2| self.get(n1, n2)).sum())
                .collect(),
            2 => (0..=self.n_max2)
                .map(|n2| (0..=self.n_max1).map(|n1| self.get(n1, n2)).sum())
                .collect(),
            _ => panic!("mode must be 1 or 2, got {mode}"),
        }
    }

    /// Largest elementwise difference over the union of both supports.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n1 = self.n_max1.max(other.n_max1);
        let n2 = self.n_max2.max(other.n_max2);
        let mut m: f64 = 0.0;
        for i in 0..=n1 {
            for j in 0..=n2 {
                m = m.max((self.get(i, j) - other.get(i, j)).abs());
            }
        }
        m
    }
}

/// Generating-function engine with a configurable derivative-order limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Engine {
    max_order: usize,
}

impl Default for Engine {
    fn default() -> Self {
        Self {
            max_order: DEFAULT_MAX_ORDER,
        }
    }
}

impl Engine {
    pub fn with_max_order(max_order: usize) -> Self {
        Self { max_order }
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn check_order(&self, requested: usize) -> Result<()> {
        if requested > self.max_order {
            Err(Error::OrderExceeded {
                requested,
                max: self.max_order,
            })
        } else {
            Ok(())
        }
    }

    /// `<W1^k1 W2^k2>`, the normally-ordered moment `<a1†^k1 a1^k1 a2†^k2 a2^k2>`.
    pub fn intensity_moment(&self, state: &TwoModeGaussianState, k1: usize, k2: usize) -> Result<f64> {
        self.check_order(k1 + k2)?;
        let g = KMatrix::from_state(state).expand_at(0.0, 0.0, k1, k2).rsqrt()?;
        Ok(sign(k1 + k2) * math::factorial(k1) * math::factorial(k2) * g.coeff(k1, k2))
    }

    /// `p(n1, n2)`.
    pub fn pnd_element(&self, state: &TwoModeGaussianState, n1: usize, n2: usize) -> Result<f64> {
        self.check_order(n1 + n2)?;
        let g = KMatrix::from_state(state).expand_at(1.0, 1.0, n1, n2).rsqrt()?;
        Ok(sign(n1 + n2) * g.coeff(n1, n2))
    }

    /// `p̃(n1, n2) = n1! n2! p(n1, n2) / p(0, 0)`.
    pub fn modified_pnd_element(&self, state: &TwoModeGaussianState, n1: usize, n2: usize) -> Result<f64> {
        let p00 = self.pnd_element(state, 0, 0)?;
        if !(p00 > 0.0) {
            return Err(Error::VanishingVacuum);
        }
        let p = self.pnd_element(state, n1, n2)?;
        Ok(math::factorial(n1) * math::factorial(n2) * p / p00)
    }

    /// Marginal `p_j(n)` of `mode` (1 or 2).
    pub fn marginal_pnd(&self, state: &TwoModeGaussianState, mode: u8, n: usize) -> Result<f64> {
        self.check_order(n)?;
        Ok(marginal_series(state, mode, n)?[n])
    }

    /// `p̃_j(n) = n! p_j(n) / p_j(0)`.
    pub fn marginal_modified_pnd(&self, state: &TwoModeGaussianState, mode: u8, n: usize) -> Result<f64> {
        self.check_order(n)?;
        let p = marginal_series(state, mode, n)?;
        if !(p[0] > 0.0) {
            return Err(Error::VanishingVacuum);
        }
        Ok(math::factorial(n) * p[n] / p[0])
    }

    /// All statistics up to the configured order, computed once.
    pub fn statistics(&self, state: &TwoModeGaussianState) -> Result<Statistics> {
        Statistics::new(state, self.max_order)
    }

    /// Joint distribution truncated at `n_max` in both modes; not subject to
    /// the single-element order limit.
    pub fn distribution_truncated(&self, state: &TwoModeGaussianState, n_max: usize) -> Result<PhotonNumberDistribution> {
        let g = KMatrix::from_state(state).expand_at(1.0, 1.0, n_max, n_max).rsqrt()?;
        Ok(PhotonNumberDistribution::from_fn(n_max, n_max, |i, j| {
            sign(i + j) * g.coeff(i, j)
        }))
    }

    /// Joint distribution with `n_max` doubled until the tail mass drops
    /// below `tail_tol`; fails past [`MAX_TRUNCATION`] or once doubling stops
    /// reducing the tail.
    pub fn distribution(&self, state: &TwoModeGaussianState, tail_tol: f64) -> Result<PhotonNumberDistribution> {
        let mean = state.b1().max(state.b2());
        let mut n_max = 16usize;
        while (n_max as f64) < 4.0 * mean && n_max < MAX_TRUNCATION {
            n_max *= 2;
        }
        let mut prev_tail = f64::INFINITY;
        loop {
            let pnd = self.distribution_truncated(state, n_max)?;
            let tail = pnd.tail_mass();
            if tail < tail_tol {
                return Ok(pnd);
            }
            // a tail that no longer shrinks has hit the rounding floor of 1 - Σp
            if n_max >= MAX_TRUNCATION || tail > 0.5 * prev_tail {
                return Err(Error::Truncation {
                    tail_mass: pnd.tail_mass(),
                    n_max,
                });
            }
            prev_tail = tail;
            n_max = (2 * n_max).min(MAX_TRUNCATION);
        }
    }
}

#[inline]
fn sign(n: usize) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `p_j(0..=n)` from the marginal generating function `G(λ, 0)` or `G(0, λ)`.
fn marginal_series(state: &TwoModeGaussianState, mode: u8, n: usize) -> Result<Vec<f64>> {
    let k = KMatrix::from_state(state);
    let g = match mode {
        1 => k.expand_at(1.0, 0.0, n, 0).rsqrt()?,
        2 => k.expand_at(0.0, 1.0, 0, n).rsqrt()?,
        _ => {
            return Err(Error::InvalidParameter {
                name: "mode",
                value: mode as f64,
                reason: "must be 1 or 2",
            })
        }
    };
    Ok((0..=n)
        .map(|m| {
            let c = if mode == 1 { g.coeff(m, 0) } else { g.coeff(0, m) };
            sign(m) * c
        })
        .collect())
}

/// Precomputed moments and photon-number statistics of one state.
///
/// Criteria evaluated over a parameter grid reuse one `Statistics` per cell
/// instead of expanding the generating function per element.
#[derive(Debug, Clone)]
pub struct Statistics {
    max_order: usize,
    moments: BivariateSeries,
    pnd: BivariateSeries,
    marginal1: Vec<f64>,
    marginal2: Vec<f64>,
}

impl Statistics {
    pub fn new(state: &TwoModeGaussianState, max_order: usize) -> Result<Self> {
        let k = KMatrix::from_state(state);
        let n = max_order;
        let at_origin = k.expand_at(0.0, 0.0, n, n).rsqrt()?;
        let at_one = k.expand_at(1.0, 1.0, n, n).rsqrt()?;
        let moments = BivariateSeries::from_fn(n, n, |i, j| {
            sign(i + j) * math::factorial(i) * math::factorial(j) * at_origin.coeff(i, j)
        });
        let pnd = BivariateSeries::from_fn(n, n, |i, j| sign(i + j) * at_one.coeff(i, j));
        Ok(Self {
            max_order,
            moments,
            pnd,
            marginal1: marginal_series(state, 1, n)?,
            marginal2: marginal_series(state, 2, n)?,
        })
    }

    pub fn max_order(&self) -> usize {
        self.max_order
    }

    fn check_order(&self, requested: usize) -> Result<()> {
        if requested > self.max_order {
            Err(Error::OrderExceeded {
                requested,
                max: self.max_order,
            })
        } else {
            Ok(())
        }
    }

    pub fn moment(&self, k1: usize, k2: usize) -> Result<f64> {
        self.check_order(k1 + k2)?;
        Ok(self.moments.coeff(k1, k2))
    }

    /// Single-mode moment `<W_j^k>`.
    pub fn marginal_moment(&self, mode: u8, k: usize) -> Result<f64> {
        match mode {
            1 => self.moment(k, 0),
            2 => self.moment(0, k),
            _ => Err(bad_mode(mode)),
        }
    }

    pub fn pnd(&self, n1: usize, n2: usize) -> Result<f64> {
        self.check_order(n1 + n2)?;
        Ok(self.pnd.coeff(n1, n2))
    }

    pub fn modified_pnd(&self, n1: usize, n2: usize) -> Result<f64> {
        self.check_order(n1 + n2)?;
        let p00 = self.pnd.coeff(0, 0);
        if !(p00 > 0.0) {
            return Err(Error::VanishingVacuum);
        }
        Ok(math::factorial(n1) * math::factorial(n2) * self.pnd.coeff(n1, n2) / p00)
    }

    pub fn marginal_pnd(&self, mode: u8, n: usize) -> Result<f64> {
        self.check_order(n)?;
        match mode {
            1 => Ok(self.marginal1[n]),
            2 => Ok(self.marginal2[n]),
            _ => Err(bad_mode(mode)),
        }
    }

    pub fn marginal_modified_pnd(&self, mode: u8, n: usize) -> Result<f64> {
        let p0 = self.marginal_pnd(mode, 0)?;
        let p = self.marginal_pnd(mode, n)?;
        if !(p0 > 0.0) {
            return Err(Error::VanishingVacuum);
        }
        Ok(math::factorial(n) * p / p0)
    }
}

fn bad_mode(mode: u8) -> Error {
    Error::InvalidParameter {
        name: "mode",
        value: mode as f64,
        reason: "must be 1 or 2",
    }
}

pub fn intensity_moment(state: &TwoModeGaussianState, k1: usize, k2: usize) -> Result<f64> {
    Engine::default().intensity_moment(state, k1, k2)
}

pub fn pnd_element(state: &TwoModeGaussianState, n1: usize, n2: usize) -> Result<f64> {
    Engine::default().pnd_element(state, n1, n2)
}

pub fn modified_pnd_element(state: &TwoModeGaussianState, n1: usize, n2: usize) -> Result<f64> {
    Engine::default().modified_pnd_element(state, n1, n2)
}

pub fn marginal_modified_pnd(state: &TwoModeGaussianState, mode: u8, n: usize) -> Result<f64> {
    Engine::default().marginal_modified_pnd(state, mode, n)
}

/// Joint distribution of a noisy twin beam from its finite-sum closed form.
///
/// Uses the non-cancelling expansions
/// `K̃ = bp (bs + bi + 1) + (bs + 1)(bi + 1)` and
/// `K̃ - B̃1 = bp (bs + bi) + bs bi + bi`; beyond `n = 50` the sum is
/// accumulated in the log domain.
pub fn twin_beam_pnd_closed_form(params: TwinBeamParams, n1: usize, n2: usize) -> f64 {
    let (bp, bs, bi) = (params.bp(), params.bs(), params.bi());
    let kt = bp * (bs + bi + 1.0) + (bs + 1.0) * (bi + 1.0);
    // 1 - B̃1/K̃ and 1 - B̃2/K̃
    let x1 = (bp * (bs + bi) + bs * bi + bi) / kt;
    let x2 = (bp * (bs + bi) + bs * bi + bs) / kt;
    let z = bp * (bp + 1.0) / (kt * kt);
    let m_max = n1.min(n2);

    if n1.max(n2) <= 50 {
        let mut sum = 0.0;
        for m in 0..=m_max {
            sum += math::binomial(n1, m)
                * math::binomial(n2, m)
                * pow0(x1, n2 - m)
                * pow0(x2, n1 - m)
                * pow0(z, m);
        }
        return sum / kt;
    }

    let logs: Vec<f64> = (0..=m_max)
        .map(|m| {
            math::ln_binomial(n1, m)
                + math::ln_binomial(n2, m)
                + math::ln_pow(x1, n2 - m)
                + math::ln_pow(x2, n1 - m)
                + math::ln_pow(z, m)
        })
        .collect();
    let top = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top == f64::NEG_INFINITY {
        return 0.0;
    }
    let acc: f64 = logs.iter().map(|l| math::exp(l - top)).sum();
    math::exp(top + math::ln(acc)) / kt
}

/// `x^k` with `0^0 = 1`.
fn pow0(x: f64, k: usize) -> f64 {
    if k == 0 {
        1.0
    } else {
        math::powi(x, k as i32)
    }
}

/// Normally-ordered moments of a single-mode thermal field, `k! B^k`.
pub fn thermal_moment(b: f64, k: usize) -> f64 {
    math::factorial(k) * math::powi(b, k as i32)
}

/// Convenience for tests and callers holding raw parameters.
pub fn single_mode_squeezed_thermal(b: f64, c: Complex64) -> Result<TwoModeGaussianState> {
    let zero = Complex64::new(0.0, 0.0);
    TwoModeGaussianState::new(b, 0.0, c, zero, zero, zero)
}

/// All `p(n1, n2)` for `n1, n2 <= n_max` straight from the closed form.
pub fn twin_beam_distribution(params: TwinBeamParams, n_max: usize) -> PhotonNumberDistribution {
    PhotonNumberDistribution::from_fn(n_max, n_max, |i, j| twin_beam_pnd_closed_form(params, i, j))
}
