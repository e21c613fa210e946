//! Moment polynomials, their factorization, and the general-order witness
//! constraint solver.
//!
//! The degree-r polynomial f(x) = x^r − S1·x + S0 with
//! S1 = α^{r-1} + α^{r-2}β + … + β^{r-1} and S0 = αβ(α^{r-2} + … + β^{r-2})
//! vanishes at α and β and factors as (x − α)(x − β)·g(x) with g ≥ 0 on the
//! relevant domain (x, α, β ≥ 0 for odd r; everywhere for even r). The g ≥ 0
//! property is what turns E[f(X)] ≥ 0 into a usable moment bound, so the
//! builder checks it numerically on a grid instead of trusting the algebra.

use crate::bounds::BoundError;
use crate::numeric::power_sum;

/// Relative tolerance on synthetic-division residuals, against the largest
/// coefficient magnitude of f.
pub const RESIDUAL_REL_TOL: f64 = 1e-9;

/// g(x) may dip to −LEMMA_REL_TOL·scale on the evaluation grid before the
/// factorization is declared unsound.
pub const LEMMA_REL_TOL: f64 = 1e-9;

const GRID_POINTS: usize = 1024;
const BISECT_REL_TOL: f64 = 1e-13;
const BISECT_MAX_ITER: u32 = 200;

/// f(x) = x^r − S1 x + S0 together with its quadratic-free factor g.
///
/// Coefficients are stored in ascending order (index = power). Both the
/// division residuals and the nonnegativity of g on the evaluation grid are
/// certified at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentPolynomial {
    pub order: u32,
    pub alpha: f64,
    pub beta: f64,
    pub coeffs_f: Vec<f64>,
    pub coeffs_g: Vec<f64>,
}

impl MomentPolynomial {
    pub fn eval_f(&self, x: f64) -> f64 {
        horner(&self.coeffs_f, x)
    }

    pub fn eval_g(&self, x: f64) -> f64 {
        horner(&self.coeffs_g, x)
    }
}

/// Evaluate a polynomial with ascending coefficients at `x`.
pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

/// Divide an ascending-coefficient polynomial by (x − c).
/// Returns (quotient, remainder); the remainder equals f(c).
pub fn synthetic_divide(coeffs: &[f64], c: f64) -> (Vec<f64>, f64) {
    let n = coeffs.len();
    if n <= 1 {
        return (Vec::new(), coeffs.first().copied().unwrap_or(0.0));
    }
    let mut quotient = vec![0.0; n - 1];
    let mut carry = coeffs[n - 1];
    for k in (0..n - 1).rev() {
        quotient[k] = carry;
        carry = coeffs[k] + carry * c;
    }
    (quotient, carry)
}

/// Multiply two ascending-coefficient polynomials (test oracle for the
/// factorization round trip).
pub fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += ai * bj;
        }
    }
    out
}

/// Build the order-r moment polynomial for the witness pair (α, β) and
/// certify its factorization f = (x − α)(x − β) g.
///
/// Odd r requires α, β ≥ 0 (the nonnegativity of g is only guaranteed on
/// x ≥ 0 there); even r accepts any reals. The grid spans [0, 2·max(α, β)]
/// for odd r and [−span, span] with span = 2·max(|α|, |β|) for even r.
pub fn build_moment_polynomial(
    alpha: f64,
    beta: f64,
    r: u32,
) -> Result<MomentPolynomial, BoundError> {
    if r < 2 {
        return Err(BoundError::OrderTooSmall { r, min: 2 });
    }
    if alpha == beta {
        return Err(BoundError::EqualWitnessPoints(alpha));
    }
    if r % 2 == 1 && (alpha < 0.0 || beta < 0.0) {
        return Err(BoundError::UnsupportedRegime {
            r,
            what: "witness points",
            value: alpha.min(beta),
        });
    }

    let s1 = power_sum(alpha, beta, r);
    let s0 = alpha * beta * power_sum(alpha, beta, r - 1);
    let mut coeffs_f = vec![0.0; r as usize + 1];
    coeffs_f[r as usize] = 1.0;
    coeffs_f[1] = -s1;
    coeffs_f[0] = s0;

    let scale = coeffs_f.iter().fold(1.0f64, |m, c| m.max(c.abs()));
    let (quotient, rem_alpha) = synthetic_divide(&coeffs_f, alpha);
    let (coeffs_g, rem_beta) = synthetic_divide(&quotient, beta);
    let residual = rem_alpha.abs().max(rem_beta.abs());
    if residual > RESIDUAL_REL_TOL * scale {
        return Err(BoundError::DivisionResidual { residual, tol: RESIDUAL_REL_TOL, scale });
    }

    let (lo, hi) = if r % 2 == 1 {
        (0.0, 2.0 * alpha.max(beta))
    } else {
        let span = 2.0 * alpha.abs().max(beta.abs());
        (-span, span)
    };
    for i in 0..GRID_POINTS {
        let x = lo + (hi - lo) * i as f64 / (GRID_POINTS - 1) as f64;
        let gx = horner(&coeffs_g, x);
        if gx < -LEMMA_REL_TOL * scale {
            return Err(BoundError::LemmaViolation { x, value: gx });
        }
    }

    Ok(MomentPolynomial { order: r, alpha, beta, coeffs_f, coeffs_g })
}

/// Right-hand side of the witness constraint for order r on [a, β]:
/// ((r−1)β^r + (r−1)aβ^{r-1} − 2a²β^{r-2} − … − 2a^{r-1}β − 2a^r)
///   / ((r+1)(β − a)).
fn constraint_target(a: f64, beta: f64, r: u32) -> f64 {
    let r_i = r as i32;
    let mut num = (r as f64 - 1.0) * (beta.powi(r_i) + a * beta.powi(r_i - 1));
    for k in 2..=r_i {
        num -= 2.0 * a.powi(k) * beta.powi(r_i - k);
    }
    num / ((r as f64 + 1.0) * (beta - a))
}

/// Left-hand side α^{r-1} + α^{r-2}β + … + αβ^{r-2}, monotone increasing in
/// α for α, β ≥ 0.
fn constraint_lhs(alpha: f64, beta: f64, r: u32) -> f64 {
    alpha * power_sum(alpha, beta, r - 1)
}

/// Solve the witness constraint ∫_a^β f(x) dx = 0 for α ∈ [a, β] by
/// bisection, given the right endpoint β and order r.
///
/// For r = 2 the solution is the closed form (2a + β)/3; higher orders have
/// no closed form, hence the bracketed search (guaranteed to converge, unlike
/// a Newton iteration on a nearly-flat residual).
pub fn solve_witness_constraint(a: f64, beta: f64, r: u32) -> Result<f64, BoundError> {
    if r < 2 {
        return Err(BoundError::OrderTooSmall { r, min: 2 });
    }
    if !(a < beta) {
        return Err(BoundError::InvalidInterval { lo: a, hi: beta });
    }
    if r % 2 == 1 && a < 0.0 {
        return Err(BoundError::UnsupportedRegime { r, what: "left endpoint", value: a });
    }

    let target = constraint_target(a, beta, r);
    let residual = |alpha: f64| constraint_lhs(alpha, beta, r) - target;

    let (mut lo, mut hi) = (a, beta);
    let (f_lo, f_hi) = (residual(lo), residual(hi));
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return Err(BoundError::ConstraintInfeasible { lo: a, hi: beta, r });
    }

    // The sign at `lo` is invariant under the bracket updates below.
    let sign_lo = f_lo.signum();
    for _ in 0..BISECT_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= BISECT_REL_TOL * lo.abs().max(hi.abs()).max(1.0) {
            return Ok(mid);
        }
        let f_mid = residual(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == sign_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn quadratic_case_has_unit_g() {
        let p = build_moment_polynomial(0.25, 0.75, 2).unwrap();
        assert_eq!(p.coeffs_g, vec![1.0]);
        assert_eq!(p.coeffs_f, vec![0.1875, -1.0, 1.0]);
    }

    #[test]
    fn cubic_factorization() {
        // f = x³ − 7x + 6 = (x − 1)(x − 2)(x + 3)
        let p = build_moment_polynomial(1.0, 2.0, 3).unwrap();
        assert_eq!(p.coeffs_f, vec![6.0, -7.0, 0.0, 1.0]);
        assert_eq!(p.coeffs_g, vec![3.0, 1.0]);
        assert!(p.eval_f(1.0).abs() < 1e-12);
        assert!(p.eval_f(2.0).abs() < 1e-12);
    }

    #[test]
    fn quartic_factorization_round_trip() {
        // x⁴ − 15x + 14 divided by (x − 1)(x − 2): recompute g by synthetic
        // division and check the multiplication oracle reproduces f.
        let p = build_moment_polynomial(1.0, 2.0, 4).unwrap();
        assert_eq!(p.coeffs_g, vec![7.0, 3.0, 1.0]);
        let quad = poly_mul(&[-1.0, 1.0], &[-2.0, 1.0]); // (x−1)(x−2)
        let product = poly_mul(&quad, &p.coeffs_g);
        for (got, want) in product.iter().zip(&p.coeffs_f) {
            assert!(rel_close(*got, *want, 1e-12));
        }
        // g has negative discriminant, so it is positive on the whole grid.
        assert!(p.eval_g(-10.0) > 0.0);
    }

    #[test]
    fn odd_order_rejects_negative_witness() {
        let err = build_moment_polynomial(-1.0, 2.0, 3).unwrap_err();
        assert!(matches!(err, BoundError::UnsupportedRegime { .. }));
    }

    #[test]
    fn even_order_accepts_negative_witness() {
        let p = build_moment_polynomial(-2.0, 1.0, 4).unwrap();
        assert!(p.eval_f(-2.0).abs() < 1e-9);
        assert!(p.eval_f(1.0).abs() < 1e-9);
    }

    #[test]
    fn constraint_recovers_quadratic_closed_form() {
        for (a, beta) in [(0.0, 1.0), (0.5, 2.0), (1.0, 7.5)] {
            let alpha = solve_witness_constraint(a, beta, 2).unwrap();
            let closed = (2.0 * a + beta) / 3.0;
            assert!(rel_close(alpha, closed, 1e-12), "alpha={alpha} closed={closed}");
        }
    }

    #[test]
    fn constraint_root_zeroes_the_integral() {
        // Composite-Simpson quadrature of ∫_a^β f over the bracket as an
        // independent oracle for the solved α.
        let (a, beta, r) = (0.0, 1.0, 3);
        let alpha = solve_witness_constraint(a, beta, r).unwrap();
        let p = build_moment_polynomial(alpha, beta, r).unwrap();
        let n = 10_000;
        let h = (beta - a) / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let x0 = a + i as f64 * h;
            let x1 = x0 + h;
            acc += h / 6.0 * (p.eval_f(x0) + 4.0 * p.eval_f(0.5 * (x0 + x1)) + p.eval_f(x1));
        }
        assert!(acc.abs() < 1e-10, "integral = {acc:e}");
    }

    #[test]
    fn constraint_requires_sign_change_bracket() {
        let err = solve_witness_constraint(1.0, 1.0, 3).unwrap_err();
        assert!(matches!(err, BoundError::InvalidInterval { .. }));
    }

    #[test]
    fn synthetic_division_remainder_is_value() {
        let f = [6.0, -7.0, 0.0, 1.0];
        let (_, rem) = synthetic_divide(&f, 3.0);
        assert_eq!(rem, horner(&f, 3.0));
    }
}
