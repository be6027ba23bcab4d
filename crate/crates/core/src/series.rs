//! Truncated bivariate Taylor series.
//!
//! A [`BivariateSeries`] holds the coefficients `s[i][j]` of
//! `Σ s[i][j] u^i v^j` for `i <= order1`, `j <= order2`. Products are
//! truncated coefficientwise, so coefficient `(i, j)` of any result only
//! depends on coefficients `(<= i, <= j)` of the operands. Real powers use
//! the exact recurrence obtained from `Q ∂g = α g ∂Q` and need no symbolic
//! algebra or finite differences.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Add, Mul, Neg, Sub};

use crate::math;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct BivariateSeries {
    order1: usize,
    order2: usize,
    coeffs: Vec<f64>,
}

impl BivariateSeries {
    pub fn zeros(order1: usize, order2: usize) -> Self {
        Self {
            order1,
            order2,
            coeffs: vec![0.0; (order1 + 1) * (order2 + 1)],
        }
    }

    pub fn constant(value: f64, order1: usize, order2: usize) -> Self {
        let mut s = Self::zeros(order1, order2);
        s.coeffs[0] = value;
        s
    }

    /// Builds a series from `f(i, j)` for every retained coefficient.
    pub fn from_fn(order1: usize, order2: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut s = Self::zeros(order1, order2);
        for i in 0..=order1 {
            for j in 0..=order2 {
                s.coeffs[i * (order2 + 1) + j] = f(i, j);
            }
        }
        s
    }

    pub fn order1(&self) -> usize {
        self.order1
    }

    pub fn order2(&self) -> usize {
        self.order2
    }

    /// Row-major coefficients, `(order1 + 1) × (order2 + 1)`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i <= self.order1 && j <= self.order2);
        i * (self.order2 + 1) + j
    }

    /// Coefficient of `u^i v^j`; zero outside the retained block.
    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i > self.order1 || j > self.order2 {
            0.0
        } else {
            self.coeffs[self.index(i, j)]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let k = self.index(i, j);
        self.coeffs[k] = value;
    }

    /// Truncates or zero-pads to new orders.
    pub fn resized(&self, order1: usize, order2: usize) -> Self {
        Self::from_fn(order1, order2, |i, j| self.coeff(i, j))
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            order1: self.order1,
            order2: self.order2,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    /// Value of the truncated polynomial at `(u, v)`.
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        let mut acc = 0.0;
        for i in (0..=self.order1).rev() {
            let mut row = 0.0;
            for j in (0..=self.order2).rev() {
                row = row * v + self.coeffs[self.index(i, j)];
            }
            acc = acc * u + row;
        }
        acc
    }

    fn nonzero_terms(&self) -> Vec<(usize, usize, f64)> {
        let mut terms = Vec::new();
        for i in 0..=self.order1 {
            for j in 0..=self.order2 {
                let c = self.coeffs[self.index(i, j)];
                if c != 0.0 {
                    terms.push((i, j, c));
                }
            }
        }
        terms
    }

    /// `self^alpha` for a positive constant term.
    ///
    /// The cost is `O(order1 · order2 · nnz)` where `nnz` counts non-zero
    /// coefficients of `self`, so sparse polynomial arguments are cheap.
    pub fn powf(&self, alpha: f64) -> Result<Self> {
        let q00 = self.coeffs[0];
        if !(q00 > 0.0) {
            return Err(Error::NonPositiveGenerator { value: q00 });
        }
        let terms: Vec<_> = self
            .nonzero_terms()
            .into_iter()
            .filter(|&(a, b, _)| a != 0 || b != 0)
            .collect();
        let (n1, n2) = (self.order1, self.order2);
        let mut g = Self::zeros(n1, n2);
        g.coeffs[0] = libm::pow(q00, alpha);
        for i in 0..=n1 {
            for j in 0..=n2 {
                if i == 0 && j == 0 {
                    continue;
                }
                let mut acc = 0.0;
                if i > 0 {
                    // coefficient of u^(i-1) v^j in Q ∂_u g = α g ∂_u Q
                    for &(a, b, q) in &terms {
                        if a <= i && b <= j {
                            let w = alpha * a as f64 - (i - a) as f64;
                            acc += w * q * g.coeffs[g.index(i - a, j - b)];
                        }
                    }
                    g.set(i, j, acc / (q00 * i as f64));
                } else {
                    for &(a, b, q) in &terms {
                        if a == 0 && b <= j {
                            let w = alpha * b as f64 - (j - b) as f64;
                            acc += w * q * g.coeffs[g.index(0, j - b)];
                        }
                    }
                    g.set(0, j, acc / (q00 * j as f64));
                }
            }
        }
        Ok(g)
    }

    /// `self^(-1/2)`.
    pub fn rsqrt(&self) -> Result<Self> {
        self.powf(-0.5)
    }

    /// `self^(1/2)`.
    pub fn sqrt(&self) -> Result<Self> {
        self.powf(0.5)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.order1, self.order2), (other.order1, other.order2));
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .fold(0.0, |m, (a, b)| f64::max(m, math::abs(a - b)))
    }

    fn assert_same_shape(&self, other: &Self) {
        assert_eq!(
            (self.order1, self.order2),
            (other.order1, other.order2),
            "series orders differ"
        );
    }
}

impl Add for &BivariateSeries {
    type Output = BivariateSeries;

    fn add(self, rhs: Self) -> BivariateSeries {
        self.assert_same_shape(rhs);
        BivariateSeries {
            order1: self.order1,
            order2: self.order2,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &BivariateSeries {
    type Output = BivariateSeries;

    fn sub(self, rhs: Self) -> BivariateSeries {
        self.assert_same_shape(rhs);
        BivariateSeries {
            order1: self.order1,
            order2: self.order2,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &BivariateSeries {
    type Output = BivariateSeries;

    fn neg(self) -> BivariateSeries {
        self.scale(-1.0)
    }
}

impl Mul for &BivariateSeries {
    type Output = BivariateSeries;

    fn mul(self, rhs: Self) -> BivariateSeries {
        self.assert_same_shape(rhs);
        let mut out = BivariateSeries::zeros(self.order1, self.order2);
        for (a, b, x) in self.nonzero_terms() {
            for i in a..=self.order1 {
                for j in b..=self.order2 {
                    let k = out.index(i, j);
                    out.coeffs[k] += x * rhs.coeffs[rhs.index(i - a, j - b)];
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(order: usize) -> BivariateSeries {
        let mut p = BivariateSeries::zeros(order, order);
        p.set(0, 0, 1.5);
        p.set(1, 0, 0.7);
        p.set(0, 1, -0.4);
        p.set(1, 1, 0.3);
        p.set(2, 0, 0.2);
        p.set(2, 2, 0.05);
        p
    }

    #[test]
    fn product_truncates() {
        let mut a = BivariateSeries::zeros(2, 1);
        a.set(1, 0, 1.0);
        let sq = &a * &a;
        assert_eq!(sq.coeff(2, 0), 1.0);
        let cube = &sq * &a;
        assert!(cube.coeffs().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn rsqrt_squares_back() {
        let p = poly(10);
        let r = p.rsqrt().unwrap();
        let one = &(&r * &r) * &p;
        let id = BivariateSeries::constant(1.0, 10, 10);
        assert!(one.max_abs_diff(&id) < 1e-12);
    }

    #[test]
    fn univariate_geometric() {
        // (1 + x)^-1 = Σ (-x)^n
        let mut p = BivariateSeries::zeros(8, 0);
        p.set(0, 0, 1.0);
        p.set(1, 0, 1.0);
        let inv = p.powf(-1.0).unwrap();
        for n in 0..=8 {
            assert!((inv.coeff(n, 0) - if n % 2 == 0 { 1.0 } else { -1.0 }).abs() < 1e-14);
        }
    }

    #[test]
    fn sqrt_round_trip() {
        let p = poly(6);
        let s = p.sqrt().unwrap();
        assert!((&s * &s).max_abs_diff(&p) < 1e-13);
    }

    #[test]
    fn eval_matches_horner() {
        let p = poly(3);
        let direct = 1.5 + 0.7 * 0.3 - 0.4 * 0.2 + 0.3 * 0.06 + 0.2 * 0.09 + 0.05 * 0.09 * 0.04;
        assert!((p.eval(0.3, 0.2) - direct).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_positive_constant() {
        let p = BivariateSeries::constant(0.0, 2, 2);
        assert!(matches!(p.rsqrt(), Err(Error::NonPositiveGenerator { .. })));
        let p = BivariateSeries::constant(-1.0, 2, 2);
        assert!(p.rsqrt().is_err());
    }

    #[test]
    fn add_sub_neg() {
        let p = poly(3);
        let z = &(&p + &p) - &p.scale(2.0);
        assert!(z.coeffs().iter().all(|&c| c == 0.0));
        assert_eq!((-&p).coeff(1, 0), -0.7);
        assert_eq!(p.resized(1, 1).coeff(2, 2), 0.0);
    }
}
