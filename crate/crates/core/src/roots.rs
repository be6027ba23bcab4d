//! Bracketing and bisection on scalar functions.

use alloc::vec::Vec;

use crate::{Error, Result};

/// Default absolute tolerance on the bracket width.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Default iteration cap.
pub const DEFAULT_MAX_ITER: usize = 200;

/// Outcome of a bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    /// Midpoint of the final bracket.
    pub x: f64,
    /// Final bracket `[lo, hi]`, always containing a sign change.
    pub lo: f64,
    pub hi: f64,
    pub iterations: usize,
}

/// Sign class with exact zeros counted as negative, so that a node sitting
/// on the boundary is attributed to the `f < 0` side.
#[inline]
pub fn is_negative(v: f64) -> bool {
    v <= 0.0
}

/// Bisects `f` on `[lo, hi]` until the bracket is narrower than `tol`.
///
/// Fails with [`Error::NoSignChange`] if both endpoints fall on the same side
/// (see [`is_negative`]) or either endpoint is not finite.
pub fn bisect(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<Root> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa = f(a);
    let fb = f(b);
    if !fa.is_finite() || !fb.is_finite() || is_negative(fa) == is_negative(fb) {
        return Err(Error::NoSignChange { lo: a, hi: b });
    }
    let neg_at_a = is_negative(fa);
    let mut iterations = 0;
    while b - a > tol && iterations < max_iter {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if !fm.is_finite() {
            return Err(Error::NoSignChange { lo: a, hi: b });
        }
        if is_negative(fm) == neg_at_a {
            a = m;
        } else {
            b = m;
        }
        iterations += 1;
    }
    Ok(Root {
        x: 0.5 * (a + b),
        lo: a,
        hi: b,
        iterations,
    })
}

/// `n` evenly spaced points on `[lo, hi]`, endpoints included.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => alloc::vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Every sign change of `f` between consecutive points of a uniform
/// `samples`-point grid on `[lo, hi]`, each refined by bisection.
pub fn sign_changes(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    samples: usize,
    tol: f64,
) -> Vec<Root> {
    let xs = linspace(lo, hi, samples.max(2));
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut out = Vec::new();
    for k in 1..xs.len() {
        let (va, vb) = (vals[k - 1], vals[k]);
        if va.is_finite() && vb.is_finite() && is_negative(va) != is_negative(vb) {
            if let Ok(r) = bisect(&mut f, xs[k - 1], xs[k], tol, DEFAULT_MAX_ITER) {
                out.push(r);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12, 200).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-12);
        assert!(r.lo <= r.x && r.x <= r.hi);
    }

    #[test]
    fn rejects_same_sign() {
        assert!(matches!(
            bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-8, 100),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn zero_node_counts_as_negative() {
        // f(0) = 0 sits on the negative side, so the change is in (0, 1]
        let r = bisect(|x| x, 0.0, 1.0, 1e-10, 200).unwrap();
        assert!(r.x < 1e-9);
        assert!(bisect(|x| x, -1.0, 0.0, 1e-10, 200).is_err());
    }

    #[test]
    fn all_crossings() {
        let roots = sign_changes(|x| (x - 0.25) * (x - 0.5) * (x - 0.8), 0.0, 1.0, 40, 1e-12);
        let xs: Vec<f64> = roots.iter().map(|r| r.x).collect();
        assert_eq!(xs.len(), 3);
        for (a, b) in xs.iter().zip([0.25, 0.5, 0.8]) {
            assert!((a - b).abs() < 1e-11);
        }
    }

    #[test]
    fn linspace_endpoints() {
        let xs = linspace(1.0, 2.0, 5);
        assert_eq!(xs, [1.0, 1.25, 1.5, 1.75, 2.0]);
        assert_eq!(linspace(3.0, 4.0, 1), [3.0]);
    }
}
