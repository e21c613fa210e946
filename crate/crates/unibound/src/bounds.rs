//! Lower (and reference upper) bounds on variance and higher moments of
//! monotone and unimodal distributions.
//!
//! The engine behind the whole catalog is the two-point inequality
//! E[(X − α)(X − β)] ≥ 0: for shape-constrained distributions one can pick
//! distinct α, β for which it provably holds, and it then bounds a higher
//! moment linearly in the mean. The quadratic witnesses have closed forms;
//! the general-order witnesses come from [`solve_witness_constraint`].
//!
//! Every bound carries a [`BoundSource`] tag so reports are self-citing, and
//! where a witness certifies the bound it is returned alongside the value.

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::dist::{MomentKind, ShapeClass};
use crate::numeric::power_sum;
use crate::poly::solve_witness_constraint;

/// Gap below which the divided-difference bounds return their analytic limit
/// (continuity of the divided difference; the formulas never divide by the
/// vanishing gap).
const SINGULAR_GAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("witness points coincide (alpha = beta = {0}); the tangent bound covers that case")]
    EqualWitnessPoints(f64),
    #[error("mean {mean} lies outside [{lo}, {hi}] required for the {context} bound")]
    MeanOutOfRange { mean: f64, lo: f64, hi: f64, context: &'static str },
    #[error("invalid interval: need {lo} < {hi}")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("odd moment order {r} needs a nonnegative regime; {what} = {value}")]
    UnsupportedRegime { r: u32, what: &'static str, value: f64 },
    #[error("moment order {r} below the minimum {min} for this operation")]
    OrderTooSmall { r: u32, min: u32 },
    #[error("witness constraint has no sign change on [{lo}, {hi}] for order {r}")]
    ConstraintInfeasible { lo: f64, hi: f64, r: u32 },
    #[error("synthetic-division residual {residual:e} exceeds {tol:e} at coefficient scale {scale:e}")]
    DivisionResidual { residual: f64, tol: f64, scale: f64 },
    #[error("factor polynomial reaches {value:e} at x = {x}; nonnegativity violated")]
    LemmaViolation { x: f64, value: f64 },
    #[error("degenerate witness: mean {mean} equals mode {mode}")]
    DegenerateWitness { mean: f64, mode: f64 },
    #[error("missing parameter `{0}` for the requested bound family")]
    MissingParameter(&'static str),
}

/// Which theorem/inequality produced a bound. The tags are stable strings
/// used in reports and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BoundSource {
    /// Variance of a non-increasing density: σ² ≥ (μ − a)²/3.
    VarianceNonIncreasing,
    /// Variance of a non-decreasing density: σ² ≥ (μ − b)²/3.
    VarianceNonDecreasing,
    /// Variance of a unimodal density: σ² ≥ (μ − M)²/3.
    VarianceUnimodal,
    /// Tangent-line bound μ_r' ≥ rα^{r-1}μ − (r−1)α^r, any distribution.
    TangentRaw,
    /// Raw moment of a non-increasing density.
    RawNonIncreasing,
    /// Raw moment of a unimodal density.
    RawUnimodal,
    /// Even central moment of a unimodal density: μ_{2r} ≥ (μ−M)^{2r}/(2r+1).
    CentralEvenUnimodal,
    /// Even central moment of a discrete distribution from the support window
    /// straddling the mean.
    DiscreteCentralWindow,
    /// Variance of a unit-lattice unimodal pmf: 3σ² ≥ (μ−M)² + |μ−M|.
    LatticeVariance,
    /// Variance upper bound for unimodal densities: σ² ≤ (b−a)²/9.
    JacobsonUpper,
}

impl BoundSource {
    /// Stable report tag.
    pub fn tag(&self) -> &'static str {
        match self {
            BoundSource::VarianceNonIncreasing => "Thm2.1-eq2.4",
            BoundSource::VarianceNonDecreasing => "Thm2.1-eq2.5",
            BoundSource::VarianceUnimodal => "Thm2.2-eq2.16",
            BoundSource::TangentRaw => "Eq2.24",
            BoundSource::RawNonIncreasing => "Thm2.3-eq2.27",
            BoundSource::RawUnimodal => "Thm2.4-eq2.38",
            BoundSource::CentralEvenUnimodal => "Eq2.39",
            BoundSource::DiscreteCentralWindow => "Thm2.5-eq2.40",
            BoundSource::LatticeVariance => "Eq1.1",
            BoundSource::JacobsonUpper => "Jacobson",
        }
    }

    /// Human-facing label, e.g. "Thm 2.2 / Eq 2.16".
    pub fn label(&self) -> &'static str {
        match self {
            BoundSource::VarianceNonIncreasing => "Thm 2.1 / Eq 2.4",
            BoundSource::VarianceNonDecreasing => "Thm 2.1 / Eq 2.5",
            BoundSource::VarianceUnimodal => "Thm 2.2 / Eq 2.16",
            BoundSource::TangentRaw => "Eq 2.24",
            BoundSource::RawNonIncreasing => "Thm 2.3 / Eq 2.27",
            BoundSource::RawUnimodal => "Thm 2.4 / Eq 2.38",
            BoundSource::CentralEvenUnimodal => "Eq 2.39",
            BoundSource::DiscreteCentralWindow => "Thm 2.5 / Eq 2.40",
            BoundSource::LatticeVariance => "Eq 1.1",
            BoundSource::JacobsonUpper => "Jacobson",
        }
    }

    pub const ALL: [BoundSource; 10] = [
        BoundSource::VarianceNonIncreasing,
        BoundSource::VarianceNonDecreasing,
        BoundSource::VarianceUnimodal,
        BoundSource::TangentRaw,
        BoundSource::RawNonIncreasing,
        BoundSource::RawUnimodal,
        BoundSource::CentralEvenUnimodal,
        BoundSource::DiscreteCentralWindow,
        BoundSource::LatticeVariance,
        BoundSource::JacobsonUpper,
    ];
}

impl Serialize for BoundSource {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.tag())
    }
}

impl std::fmt::Display for BoundSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// The (α, β) pair certifying a two-point bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticWitness {
    pub alpha: f64,
    pub beta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Lower,
    Upper,
}

/// A computed bound: its value, direction, source tag, the moment it
/// constrains, and (when available) the witness pair certifying it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundResult {
    pub value: f64,
    pub kind: BoundKind,
    pub source: BoundSource,
    pub target_kind: MomentKind,
    pub target_order: u32,
    pub witness: Option<QuadraticWitness>,
}

impl BoundResult {
    fn lower(
        value: f64,
        source: BoundSource,
        target_kind: MomentKind,
        target_order: u32,
        witness: Option<QuadraticWitness>,
    ) -> Self {
        BoundResult { value, kind: BoundKind::Lower, source, target_kind, target_order, witness }
    }
}

/// Monotone direction of a density.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    NonIncreasing,
    NonDecreasing,
}

/// Slack applied to precondition range checks so that means computed in
/// floating point from valid distributions never trip a strict comparison.
fn pre_slack(x: f64, y: f64) -> f64 {
    1e-12f64.max(1e-9 * x.abs().max(y.abs()))
}

/// Two-point lower bound on the r-th raw moment from E[(X−α)(X−β)·g(X)] ≥ 0:
/// μ_r' ≥ S1·μ − S0 with the divided-difference sums
/// S1 = (β^r − α^r)/(β − α) and S0 = (β^r α − α^r β)/(β − α).
///
/// Degenerate α = β is rejected; use [`tangent_raw_lb`] there.
pub fn two_point_raw_lb(alpha: f64, beta: f64, mean: f64, r: u32) -> Result<f64, BoundError> {
    if alpha == beta {
        return Err(BoundError::EqualWitnessPoints(alpha));
    }
    if r < 1 {
        return Err(BoundError::OrderTooSmall { r, min: 1 });
    }
    let s1 = power_sum(alpha, beta, r);
    let s0 = alpha * beta * power_sum(alpha, beta, r.saturating_sub(1));
    Ok(s1 * mean - s0)
}

/// Tangent-line lower bound μ_r' ≥ rα^{r-1}μ − (r−1)α^r, valid for every
/// real α (even r; odd r needs a nonnegative support and α ≥ 0). The choice
/// α = μ gives the classical μ_r' ≥ μ^r.
pub fn tangent_raw_lb(alpha: f64, mean: f64, r: u32) -> f64 {
    let rf = r as f64;
    rf * alpha.powi(r as i32 - 1) * mean - (rf - 1.0) * alpha.powi(r as i32)
}

/// Witness pair for the non-increasing variance bound:
/// β = 2μ − a, α = (2μ + a)/3; satisfies a ≤ α ≤ β.
pub fn witness_monotone(a: f64, mean: f64) -> QuadraticWitness {
    let beta = 2.0 * mean - a;
    let alpha = (2.0 * a + beta) / 3.0;
    QuadraticWitness { alpha, beta }
}

/// Witness pair for the unimodal variance bound: β = 2μ − M, α = (2M + β)/3
/// when μ ≥ M; reflected through M when μ < M. Satisfies α ≤ β.
pub fn witness_unimodal(mode: f64, mean: f64) -> QuadraticWitness {
    if mean >= mode {
        let beta = 2.0 * mean - mode;
        QuadraticWitness { alpha: (2.0 * mode + beta) / 3.0, beta }
    } else {
        let alpha = 2.0 * mean - mode;
        QuadraticWitness { alpha, beta: (2.0 * mode + alpha) / 3.0 }
    }
}

/// Variance lower bound for a monotone density on [a, b]:
/// σ² ≥ (μ − a)²/3 (non-increasing) or σ² ≥ (μ − b)²/3 (non-decreasing).
///
/// The mean of a non-increasing density always lies in [a, (a+b)/2]
/// (mirrored for non-decreasing); a mean outside that range is an input
/// error, reported with the violated range.
pub fn variance_lb_monotone(
    a: f64,
    b: f64,
    mean: f64,
    direction: Monotonicity,
) -> Result<BoundResult, BoundError> {
    if !(a < b) {
        return Err(BoundError::InvalidInterval { lo: a, hi: b });
    }
    let mid = 0.5 * (a + b);
    let slack = pre_slack(a, b);
    match direction {
        Monotonicity::NonIncreasing => {
            if mean < a - slack || mean > mid + slack {
                return Err(BoundError::MeanOutOfRange {
                    mean,
                    lo: a,
                    hi: mid,
                    context: "non-increasing variance",
                });
            }
            let d = mean - a;
            Ok(BoundResult::lower(
                d * d / 3.0,
                BoundSource::VarianceNonIncreasing,
                MomentKind::Central,
                2,
                Some(witness_monotone(a, mean)),
            ))
        }
        Monotonicity::NonDecreasing => {
            if mean < mid - slack || mean > b + slack {
                return Err(BoundError::MeanOutOfRange {
                    mean,
                    lo: mid,
                    hi: b,
                    context: "non-decreasing variance",
                });
            }
            let d = mean - b;
            let alpha = 2.0 * mean - b;
            let witness = QuadraticWitness { alpha, beta: (2.0 * b + alpha) / 3.0 };
            Ok(BoundResult::lower(
                d * d / 3.0,
                BoundSource::VarianceNonDecreasing,
                MomentKind::Central,
                2,
                Some(witness),
            ))
        }
    }
}

/// Variance lower bound for a unimodal density: σ² ≥ (μ − M)²/3.
///
/// The mean range (a+M)/2 ≤ μ ≤ (b+M)/2 is a consequence of unimodality and
/// is audited by the verification suite rather than enforced here.
pub fn variance_lb_unimodal(mean: f64, mode: f64) -> BoundResult {
    let d = mean - mode;
    BoundResult::lower(
        d * d / 3.0,
        BoundSource::VarianceUnimodal,
        MomentKind::Central,
        2,
        Some(witness_unimodal(mode, mean)),
    )
}

/// Variance upper bound for a unimodal density on [a, b]: σ² ≤ (b − a)²/9.
pub fn variance_ub_jacobson(a: f64, b: f64) -> Result<BoundResult, BoundError> {
    if !(a < b) {
        return Err(BoundError::InvalidInterval { lo: a, hi: b });
    }
    let d = b - a;
    Ok(BoundResult {
        value: d * d / 9.0,
        kind: BoundKind::Upper,
        source: BoundSource::JacobsonUpper,
        target_kind: MomentKind::Central,
        target_order: 2,
        witness: None,
    })
}

/// Shared divided-difference evaluation of
/// ((2μ − m)^{r+1} − m^{r+1}) / (2(r+1)(μ − m)) = Σ_i m^i (2μ−m)^{r-i} / (r+1),
/// which is also the r-th raw moment of the uniform density on [m, 2μ−m].
/// The analytic limit m^r at μ = m falls out of the sum form.
fn uniform_witness_raw_moment(m: f64, mean: f64, r: u32) -> f64 {
    if (mean - m).abs() < SINGULAR_GAP * m.abs().max(1.0) {
        return m.powi(r as i32);
    }
    power_sum(m, 2.0 * mean - m, r + 1) / (r as f64 + 1.0)
}

/// Raw-moment lower bound for a non-increasing density on [a, b]:
/// μ_r' ≥ ((2μ − a)^{r+1} − a^{r+1}) / (2(r+1)(μ − a)).
///
/// Odd r requires a ≥ 0. The attached witness is the solved constraint pair
/// (α, β = 2μ − a) when the sign regime admits one.
pub fn raw_moment_lb_monotone(a: f64, mean: f64, r: u32) -> Result<BoundResult, BoundError> {
    if r < 1 {
        return Err(BoundError::OrderTooSmall { r, min: 1 });
    }
    if r % 2 == 1 && a < 0.0 {
        return Err(BoundError::UnsupportedRegime { r, what: "left endpoint", value: a });
    }
    if mean < a - pre_slack(a, mean) {
        return Err(BoundError::MeanOutOfRange {
            mean,
            lo: a,
            hi: f64::INFINITY,
            context: "non-increasing raw-moment",
        });
    }
    let value = uniform_witness_raw_moment(a, mean.max(a), r);
    let witness = constraint_witness(a, mean, r);
    Ok(BoundResult::lower(value, BoundSource::RawNonIncreasing, MomentKind::Raw, r, witness))
}

/// Raw-moment lower bound for a density unimodal at M:
/// μ_r' ≥ ((2μ − M)^{r+1} − M^{r+1}) / (2(r+1)(μ − M)).
///
/// Odd r requires M ≥ 0 and 2μ − M ≥ 0, which this checks; the caller must
/// additionally ensure the support itself is nonnegative for odd r; the
/// distribution is not visible from here, so the audit gates on it.
pub fn raw_moment_lb_unimodal(mode: f64, mean: f64, r: u32) -> Result<BoundResult, BoundError> {
    if r < 1 {
        return Err(BoundError::OrderTooSmall { r, min: 1 });
    }
    if r % 2 == 1 {
        if mode < 0.0 {
            return Err(BoundError::UnsupportedRegime { r, what: "mode", value: mode });
        }
        let reflected = 2.0 * mean - mode;
        if reflected < 0.0 {
            return Err(BoundError::UnsupportedRegime { r, what: "2*mean - mode", value: reflected });
        }
    }
    let value = uniform_witness_raw_moment(mode, mean, r);
    let witness = if mean >= mode { constraint_witness(mode, mean, r) } else { None };
    Ok(BoundResult::lower(value, BoundSource::RawUnimodal, MomentKind::Raw, r, witness))
}

fn constraint_witness(m: f64, mean: f64, r: u32) -> Option<QuadraticWitness> {
    if r < 2 || m < 0.0 || mean - m <= SINGULAR_GAP * m.abs().max(1.0) {
        return None;
    }
    let beta = 2.0 * mean - m;
    solve_witness_constraint(m, beta, r)
        .ok()
        .map(|alpha| QuadraticWitness { alpha, beta })
}

/// Even central-moment lower bound for a density unimodal at M:
/// μ_{2r} ≥ (μ − M)^{2r} / (2r + 1). At r = 1 this is the unimodal variance
/// bound.
pub fn central_even_lb_unimodal(mean: f64, mode: f64, r: u32) -> BoundResult {
    let order = 2 * r;
    let d = mean - mode;
    BoundResult::lower(
        d.powi(order as i32) / (order as f64 + 1.0),
        BoundSource::CentralEvenUnimodal,
        MomentKind::Central,
        order,
        None,
    )
}

/// Even central-moment lower bound for a discrete distribution whose
/// consecutive support points (x_lo, x_hi) straddle the mean:
/// μ_{2r} ≥ ((μ − x_lo)(x_hi − μ)^{2r} + (x_hi − μ)(μ − x_lo)^{2r}) / (x_hi − x_lo).
pub fn discrete_central_lb(
    x_lo: f64,
    x_hi: f64,
    mean: f64,
    r: u32,
) -> Result<BoundResult, BoundError> {
    if !(x_lo < x_hi) {
        return Err(BoundError::InvalidInterval { lo: x_lo, hi: x_hi });
    }
    let slack = pre_slack(x_lo, x_hi);
    if mean < x_lo - slack || mean > x_hi + slack {
        return Err(BoundError::MeanOutOfRange {
            mean,
            lo: x_lo,
            hi: x_hi,
            context: "discrete window",
        });
    }
    let m = mean.clamp(x_lo, x_hi);
    let order = 2 * r;
    let (dl, dh) = (m - x_lo, x_hi - m);
    let value = (dl * dh.powi(order as i32) + dh * dl.powi(order as i32)) / (x_hi - x_lo);
    Ok(BoundResult::lower(
        value,
        BoundSource::DiscreteCentralWindow,
        MomentKind::Central,
        order,
        None,
    ))
}

/// Variance lower bound for a unimodal pmf on consecutive integers with mode
/// M: σ² ≥ ((μ − M)² + |μ − M|) / 3.
///
/// The lattice-support precondition is the caller's (audited by the
/// verification suite, not enforced here).
pub fn lattice_variance_lb(mean: f64, mode: f64) -> BoundResult {
    let d = mean - mode;
    BoundResult::lower(
        (d * d + d.abs()) / 3.0,
        BoundSource::LatticeVariance,
        MomentKind::Central,
        2,
        None,
    )
}

/// The plateau endpoint that maximizes a mode-distance bound (the admissible
/// mode farthest from the mean; ties resolve to the lower endpoint).
pub fn best_plateau_mode(mode_lo: f64, mode_hi: f64, mean: f64) -> f64 {
    if (mean - mode_lo).abs() >= (mode_hi - mean).abs() {
        mode_lo
    } else {
        mode_hi
    }
}

/// Parameters for a bound request: support interval, admissible-mode
/// plateau, mean, moment order, and the shape the request assumes.
///
/// This is the carrier the CLI builds from flags; `evaluate` emits every
/// bound applicable to the shape with the inputs provided.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundQuery {
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub mode: Option<(f64, f64)>,
    pub mean: f64,
    pub order: u32,
    pub shape: ShapeClass,
}

impl BoundQuery {
    fn validate(&self) -> Result<(), BoundError> {
        if let (Some(a), Some(b)) = (self.a, self.b) {
            if !(a < b) {
                return Err(BoundError::InvalidInterval { lo: a, hi: b });
            }
            let slack = pre_slack(a, b);
            if self.mean < a - slack || self.mean > b + slack {
                return Err(BoundError::MeanOutOfRange {
                    mean: self.mean,
                    lo: a,
                    hi: b,
                    context: "support interval",
                });
            }
            if let Some((lo, hi)) = self.mode {
                if lo < a - slack || hi > b + slack {
                    return Err(BoundError::MeanOutOfRange {
                        mean: lo.min(hi),
                        lo: a,
                        hi: b,
                        context: "mode within support",
                    });
                }
            }
        }
        Ok(())
    }

    /// All bounds applicable to the query's shape.
    pub fn evaluate(&self) -> Result<Vec<BoundResult>, BoundError> {
        self.validate()?;
        let mut out = Vec::new();
        let r = self.order;
        let mean = self.mean;

        // Odd raw orders additionally need a nonnegative support, which is
        // only knowable here when `a` was provided.
        let support_nonneg = self.a.is_some_and(|a| a >= 0.0);
        let push_unimodal_family = |out: &mut Vec<BoundResult>, mode: f64| {
            out.push(variance_lb_unimodal(mean, mode));
            if r >= 2 && (r % 2 == 0 || support_nonneg) {
                if let Ok(b) = raw_moment_lb_unimodal(mode, mean, r) {
                    out.push(b);
                }
            }
            out.push(central_even_lb_unimodal(mean, mode, r.max(1)));
        };

        match self.shape {
            ShapeClass::NonIncreasing => {
                let a = self.a.ok_or(BoundError::MissingParameter("a"))?;
                let b = self.b.ok_or(BoundError::MissingParameter("b"))?;
                out.push(variance_lb_monotone(a, b, mean, Monotonicity::NonIncreasing)?);
                if r >= 2 {
                    if let Ok(bnd) = raw_moment_lb_monotone(a, mean, r) {
                        out.push(bnd);
                    }
                }
                push_unimodal_family(&mut out, a);
                out.push(variance_ub_jacobson(a, b)?);
            }
            ShapeClass::NonDecreasing => {
                let a = self.a.ok_or(BoundError::MissingParameter("a"))?;
                let b = self.b.ok_or(BoundError::MissingParameter("b"))?;
                out.push(variance_lb_monotone(a, b, mean, Monotonicity::NonDecreasing)?);
                push_unimodal_family(&mut out, b);
                out.push(variance_ub_jacobson(a, b)?);
            }
            ShapeClass::Unimodal { mode_lo, mode_hi } => {
                let mode = best_plateau_mode(mode_lo, mode_hi, mean);
                push_unimodal_family(&mut out, mode);
                if let (Some(a), Some(b)) = (self.a, self.b) {
                    out.push(variance_ub_jacobson(a, b)?);
                }
            }
            ShapeClass::NotUnimodal => {}
        }

        // The tangent bound applies to any distribution; odd orders need a
        // provably nonnegative support.
        if r >= 2 && (r % 2 == 0 || self.a.is_some_and(|a| a >= 0.0)) {
            out.push(BoundResult::lower(
                tangent_raw_lb(mean, mean, r),
                BoundSource::TangentRaw,
                MomentKind::Raw,
                r,
                None,
            ));
        }
        Ok(out)
    }
}
