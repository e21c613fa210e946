//! Compensated summation and the tolerance convention shared by every check.

use serde::{Deserialize, Serialize};

/// Kahan–Babuška–Neumaier compensated accumulator.
///
/// Every moment sum in the crate goes through this so that equality-style
/// checks can run at 1e-12 relative tolerance without drowning in rounding
/// noise from plain left-to-right summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of an iterator of terms.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut acc = CompensatedSum::new();
    for t in terms {
        acc.add(t);
    }
    acc.total()
}

/// Σ_{i=0}^{terms-1} x^i · y^(terms-1-i), the divided-difference form of
/// (y^terms − x^terms) / (y − x).
///
/// Evaluating moment-bound formulas through this sum avoids the cancellation
/// (and the 0/0 at x = y) of the quotient form: at x = y it degenerates to
/// `terms · x^(terms-1)` with no special casing.
pub fn power_sum(x: f64, y: f64, terms: u32) -> f64 {
    let mut acc = CompensatedSum::new();
    for i in 0..terms {
        acc.add(x.powi(i as i32) * y.powi((terms - 1 - i) as i32));
    }
    acc.total()
}

/// Mixed absolute/relative tolerance.
///
/// A lower bound `b` on a quantity `v` passes iff
/// `v >= b - max(abs, rel * max(|v|, |b|))`; upper bounds mirror this.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-12, rel: 1e-9 }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Tolerance { abs, rel }
    }

    /// Slack granted when comparing `lhs` against `rhs`.
    pub fn slack(&self, lhs: f64, rhs: f64) -> f64 {
        self.abs.max(self.rel * lhs.abs().max(rhs.abs()))
    }

    /// Does `actual` respect the lower bound `bound`?
    pub fn lower_holds(&self, actual: f64, bound: f64) -> bool {
        actual >= bound - self.slack(actual, bound)
    }

    /// Does `actual` respect the upper bound `bound`?
    pub fn upper_holds(&self, actual: f64, bound: f64) -> bool {
        actual <= bound + self.slack(actual, bound)
    }

    /// Are the two values equal within tolerance?
    pub fn close(&self, a: f64, b: f64) -> bool {
        (a - b).abs() <= self.slack(a, b)
    }
}

/// |a − b| relative to the larger magnitude; 0 when both are exactly equal.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    (a - b).abs() / a.abs().max(b.abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_cancellation() {
        // 1 + 1e-16 repeated: naive summation stays at 1.0
        let mut acc = CompensatedSum::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-16);
        }
        let exact = 1.0 + 1000.0 * 1e-16;
        assert!((acc.total() - exact).abs() < 1e-18);
    }

    #[test]
    fn power_sum_matches_quotient_form() {
        let (x, y) = (1.5, 4.0);
        for terms in 1..=8u32 {
            let dd = power_sum(x, y, terms);
            let quotient = (y.powi(terms as i32) - x.powi(terms as i32)) / (y - x);
            assert!((dd - quotient).abs() <= 1e-12 * quotient.abs());
        }
    }

    #[test]
    fn power_sum_degenerate_point() {
        // At x = y the sum is terms * x^(terms-1); no 0/0.
        assert_eq!(power_sum(2.0, 2.0, 3), 12.0);
        assert_eq!(power_sum(0.0, 0.0, 5), 0.0);
    }

    #[test]
    fn tolerance_convention() {
        let tol = Tolerance::default();
        assert!(tol.lower_holds(1.0, 1.0));
        assert!(tol.lower_holds(1.0, 1.0 + 1e-10)); // within 1e-9 relative
        assert!(!tol.lower_holds(1.0, 1.0 + 1e-8));
        assert!(tol.upper_holds(0.0, 0.0));
        assert!(tol.close(0.0, 1e-13));
    }
}
