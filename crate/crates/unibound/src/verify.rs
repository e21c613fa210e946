//! Random distribution generators, bound audits against the exact oracle,
//! tightness witnesses, and the window-vs-lattice comparison harness.
//!
//! Determinism contract: every trial derives its own seed from
//! (master_seed, stream, trial index) through a splitmix64 mix, trials own
//! their generator state, and results are assembled in trial order, so the
//! suite output is byte-identical across runs and worker counts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::{
    best_plateau_mode, central_even_lb_unimodal, discrete_central_lb, lattice_variance_lb,
    raw_moment_lb_monotone, raw_moment_lb_unimodal, tangent_raw_lb, variance_lb_monotone,
    variance_lb_unimodal, variance_ub_jacobson, BoundError, BoundKind, BoundResult, BoundSource,
    Monotonicity, QuadraticWitness,
};
use crate::dist::{
    DiscretePmf, Distribution, MomentKind, MomentValue, PiecewiseConstantDensity, ShapeClass,
};
use crate::numeric::{compensated_sum, rel_diff, CompensatedSum, Tolerance};

/// Relative margin under which a tightness witness counts as attaining its
/// bound with equality.
pub const TIGHTNESS_REL_MARGIN: f64 = 1e-12;

/// Number of (mode, mean) pairs exercised by the tightness section.
pub const TIGHTNESS_PAIRS: u64 = 100;

/// Stored violations are capped at this many entries; counters always
/// reflect the full totals.
const MAX_STORED_VIOLATIONS: usize = 100;

const STREAM_DISCRETE: u64 = 1;
const STREAM_DENSITY: u64 = 2;
const STREAM_TIGHTNESS: u64 = 3;
const STREAM_COMPARE: u64 = 4;

/// Configuration of a verification or comparison run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub master_seed: u64,
    pub n_trials: u64,
    /// Discrete support size cap (inclusive).
    pub max_points: u32,
    /// Density piece-count cap (inclusive).
    pub max_pieces: u32,
    /// Bounds are audited for r up to this value (moments up to 2·r_max).
    pub r_max: u32,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            master_seed: 0,
            n_trials: 1000,
            max_points: 12,
            max_pieces: 64,
            r_max: 3,
            abs_tol: 1e-12,
            rel_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("n_trials must be at least 1")]
    ZeroTrials,
    #[error("max_points must be at least 2")]
    MaxPointsTooSmall,
    #[error("max_pieces must be at least 1")]
    MaxPiecesTooSmall,
    #[error("r_max must be at least 1")]
    RMaxTooSmall,
    #[error("tolerances must be finite and positive, got abs={abs}, rel={rel}")]
    BadTolerance { abs: f64, rel: f64 },
}

impl TrialConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_trials < 1 {
            return Err(ConfigError::ZeroTrials);
        }
        if self.max_points < 2 {
            return Err(ConfigError::MaxPointsTooSmall);
        }
        if self.max_pieces < 1 {
            return Err(ConfigError::MaxPiecesTooSmall);
        }
        if self.r_max < 1 {
            return Err(ConfigError::RMaxTooSmall);
        }
        let ok = |t: f64| t.is_finite() && t > 0.0;
        if !ok(self.abs_tol) || !ok(self.rel_tol) {
            return Err(ConfigError::BadTolerance { abs: self.abs_tol, rel: self.rel_tol });
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.abs_tol, self.rel_tol)
    }
}

/// splitmix64 finalizer; bijective on u64.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial seed from (master seed, stream id, trial index). Parallel
/// execution order cannot change the sequence a trial sees.
pub fn trial_seed(master_seed: u64, stream: u64, index: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index)))
}

/// Multiplicative decay step for the weight chains. Exactly 1 with
/// probability 1/4 (those draws create exact plateaus); otherwise the
/// log-weight decrement is Exp(1) = −ln U, i.e. the multiplier is U itself,
/// which also produces near-degenerate peaks at small U.
fn down_step(rng: &mut ChaCha8Rng) -> f64 {
    if rng.gen_range(0u32..4) == 0 {
        1.0
    } else {
        1.0 - rng.gen::<f64>()
    }
}

/// Weights that rise to a uniformly chosen peak index and fall after it.
fn unimodal_weights(rng: &mut ChaCha8Rng, n: usize, peak: usize) -> Vec<f64> {
    let mut w = vec![0.0; n];
    w[peak] = 1.0;
    for i in (0..peak).rev() {
        w[i] = w[i + 1] * down_step(rng);
    }
    for i in peak + 1..n {
        w[i] = w[i - 1] * down_step(rng);
    }
    w
}

/// Random unimodal pmf with `n` support points.
///
/// Lattice mode places the support on consecutive integers; otherwise the
/// points are sorted uniform draws from [−10, 10] kept at least 1e-6 apart.
pub fn gen_discrete_unimodal(seed: u64, n: usize, lattice: bool) -> DiscretePmf {
    assert!(n >= 2, "discrete generator needs n >= 2");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<f64> = if lattice {
        let start = rng.gen_range(-10i64..=10);
        (0..n).map(|i| (start + i as i64) as f64).collect()
    } else {
        loop {
            let mut p: Vec<f64> = (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect();
            p.sort_by(f64::total_cmp);
            if p.windows(2).all(|w| w[1] - w[0] >= 1e-6) {
                break p;
            }
        }
    };
    let peak = rng.gen_range(0..n);
    let w = unimodal_weights(&mut rng, n, peak);
    let total = compensated_sum(w.iter().copied());
    let probs = w.iter().map(|x| x / total).collect();
    DiscretePmf::new(points, probs).expect("generated pmf satisfies its invariants")
}

fn equal_width_breakpoints(a: f64, b: f64, pieces: usize) -> Vec<f64> {
    let mut breaks: Vec<f64> =
        (0..=pieces).map(|i| a + (b - a) * i as f64 / pieces as f64).collect();
    breaks[0] = a;
    breaks[pieces] = b;
    breaks
}

fn density_from_weights(a: f64, b: f64, pieces: usize, w: &[f64]) -> PiecewiseConstantDensity {
    let breaks = equal_width_breakpoints(a, b, pieces);
    let mut mass = CompensatedSum::new();
    for (k, &wk) in w.iter().enumerate() {
        mass.add(wk * (breaks[k + 1] - breaks[k]));
    }
    let total = mass.total();
    let heights = w.iter().map(|x| x / total).collect();
    PiecewiseConstantDensity::new(breaks, heights)
        .expect("generated density satisfies its invariants")
}

/// Random unimodal step density on [a, b] with equal-width pieces.
pub fn gen_density_unimodal(seed: u64, pieces: usize, a: f64, b: f64) -> PiecewiseConstantDensity {
    assert!(pieces >= 1, "density generator needs at least one piece");
    assert!(a < b, "density generator needs a < b");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let peak = rng.gen_range(0..pieces);
    let w = unimodal_weights(&mut rng, pieces, peak);
    density_from_weights(a, b, pieces, &w)
}

/// Random monotone step density (peak pinned to the matching end).
pub fn gen_density_monotone(
    seed: u64,
    pieces: usize,
    a: f64,
    b: f64,
    direction: Monotonicity,
) -> PiecewiseConstantDensity {
    assert!(pieces >= 1, "density generator needs at least one piece");
    assert!(a < b, "density generator needs a < b");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let peak = match direction {
        Monotonicity::NonIncreasing => 0,
        Monotonicity::NonDecreasing => pieces - 1,
    };
    let w = unimodal_weights(&mut rng, pieces, peak);
    density_from_weights(a, b, pieces, &w)
}

/// The uniform density on [M, 2μ − M] (ordered), which attains the unimodal
/// variance, raw-moment, and even-central-moment bounds with equality.
pub fn tightness_witness(mode: f64, mean: f64) -> Result<PiecewiseConstantDensity, BoundError> {
    if mean == mode {
        return Err(BoundError::DegenerateWitness { mean, mode });
    }
    let other = 2.0 * mean - mode;
    let (lo, hi) = (mode.min(other), mode.max(other));
    if !(lo < hi) {
        return Err(BoundError::DegenerateWitness { mean, mode });
    }
    Ok(PiecewiseConstantDensity::uniform(lo, hi).expect("ordered interval"))
}

/// One bound evaluation inside an audit: what was bounded, by which source,
/// at which mode, and whether the oracle moment respects it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCheck {
    pub source: BoundSource,
    pub kind: BoundKind,
    pub target_kind: MomentKind,
    pub target_order: u32,
    pub bound: f64,
    pub actual: f64,
    /// actual − bound for lower bounds, bound − actual for upper bounds.
    pub margin: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<QuadraticWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// A bound that does not apply to the audited distribution, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedBound {
    pub source: BoundSource,
    pub reason: String,
}

/// Full audit of one distribution: shape, oracle moments, and one entry per
/// applicable bound (per admissible plateau mode where relevant).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AuditReport {
    pub id: String,
    pub family: &'static str,
    pub shape: ShapeClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode_plateau: Option<(f64, f64)>,
    pub mean: f64,
    pub variance: f64,
    pub moments: Vec<MomentValue>,
    pub checks: Vec<BoundCheck>,
    pub not_applicable: Vec<SkippedBound>,
    pub pass: bool,
    pub distribution: Distribution,
}

impl AuditReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn find(&self, source: BoundSource) -> Option<&BoundCheck> {
        self.checks.iter().find(|c| c.source == source)
    }
}

struct Auditor {
    tol: Tolerance,
    checks: Vec<BoundCheck>,
    skipped: Vec<SkippedBound>,
}

impl Auditor {
    /// A comparison where either side left the binary64 range says nothing
    /// about the mathematics; report it as not-applicable, not failed.
    fn unevaluable(&mut self, source: BoundSource, bound: f64, actual: f64) -> bool {
        if bound.is_finite() && actual.is_finite() {
            return false;
        }
        self.skip(
            source,
            format!("unevaluable: value overflows binary64 (bound {bound:e}, moment {actual:e})"),
        );
        true
    }

    fn lower(&mut self, b: BoundResult, actual: f64, mode: Option<f64>) {
        if self.unevaluable(b.source, b.value, actual) {
            return;
        }
        self.checks.push(BoundCheck {
            source: b.source,
            kind: BoundKind::Lower,
            target_kind: b.target_kind,
            target_order: b.target_order,
            bound: b.value,
            actual,
            margin: actual - b.value,
            pass: self.tol.lower_holds(actual, b.value),
            mode,
            witness: b.witness,
            note: None,
        });
    }

    fn upper(&mut self, b: BoundResult, actual: f64) {
        if self.unevaluable(b.source, b.value, actual) {
            return;
        }
        self.checks.push(BoundCheck {
            source: b.source,
            kind: BoundKind::Upper,
            target_kind: b.target_kind,
            target_order: b.target_order,
            bound: b.value,
            actual,
            margin: b.value - actual,
            pass: self.tol.upper_holds(actual, b.value),
            mode: None,
            witness: b.witness,
            note: None,
        });
    }

    /// An operation refusing inputs that a valid distribution of the claimed
    /// shape cannot produce is itself a finding; record it as a failed check.
    fn op_error(&mut self, source: BoundSource, err: BoundError) {
        self.checks.push(BoundCheck {
            source,
            kind: BoundKind::Lower,
            target_kind: MomentKind::Central,
            target_order: 2,
            bound: f64::NAN,
            actual: f64::NAN,
            margin: f64::NAN,
            pass: false,
            mode: None,
            witness: None,
            note: Some(err.to_string()),
        });
    }

    fn skip(&mut self, source: BoundSource, reason: impl Into<String>) {
        self.skipped.push(SkippedBound { source, reason: reason.into() });
    }
}

fn plateau_modes(plateau: (f64, f64)) -> Vec<f64> {
    if plateau.0 == plateau.1 {
        vec![plateau.0]
    } else {
        vec![plateau.0, plateau.1]
    }
}

fn fnv1a(bytes: impl IntoIterator<Item = u8>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn content_hash(dist: &Distribution) -> String {
    let (tag, xs, ws): (u8, &[f64], &[f64]) = match dist {
        Distribution::Discrete(p) => (1, p.points(), p.probs()),
        Distribution::Piecewise(d) => (2, d.breakpoints(), d.heights()),
    };
    let bytes = std::iter::once(tag)
        .chain(xs.iter().flat_map(|x| x.to_bits().to_le_bytes()))
        .chain(ws.iter().flat_map(|w| w.to_bits().to_le_bytes()));
    format!("{:016x}", fnv1a(bytes))
}

/// Evaluate every applicable bound against the exact oracle moments.
///
/// Unimodal-family bounds are checked at each distinct plateau endpoint
/// (every plateau member is an admissible mode, and the endpoint farthest
/// from the mean maximizes the mode-distance bounds), so the report both
/// exposes the per-mode values and contains the plateau maximum.
pub fn audit(dist: &Distribution, cfg: &TrialConfig) -> AuditReport {
    let r_max = cfg.r_max.max(1);
    let shape = dist.shape();
    let plateau = dist.mode_plateau();
    let mean = dist.raw_moment(1);
    let variance = dist.central_moment(2);

    // Oracle moments, indexed by order.
    let raw: Vec<f64> = (0..=2 * r_max).map(|r| dist.raw_moment(r)).collect();
    let central: Vec<f64> = (0..=2 * r_max).map(|r| dist.central_moment(r)).collect();

    let mut moments = Vec::new();
    for r in 1..=2 * r_max {
        moments.push(MomentValue { order: r, kind: MomentKind::Raw, value: raw[r as usize] });
    }
    for r in 2..=2 * r_max {
        moments.push(MomentValue {
            order: r,
            kind: MomentKind::Central,
            value: central[r as usize],
        });
    }

    let mut au = Auditor { tol: cfg.tolerance(), checks: Vec::new(), skipped: Vec::new() };

    match dist {
        Distribution::Discrete(pmf) => {
            audit_discrete(&mut au, pmf, plateau, mean, variance, &central, r_max)
        }
        Distribution::Piecewise(d) => {
            audit_density(&mut au, d, shape, plateau, mean, variance, &raw, &central, r_max)
        }
    }
    audit_tangent(&mut au, dist.support().0, mean, &raw, r_max);

    let pass = au.checks.iter().all(|c| c.pass);
    AuditReport {
        id: content_hash(dist),
        family: match dist {
            Distribution::Discrete(_) => "discrete",
            Distribution::Piecewise(_) => "piecewise",
        },
        shape,
        mode_plateau: plateau,
        mean,
        variance,
        moments,
        checks: au.checks,
        not_applicable: au.skipped,
        pass,
        distribution: dist.clone(),
    }
}

fn audit_discrete(
    au: &mut Auditor,
    pmf: &DiscretePmf,
    plateau: Option<(f64, f64)>,
    mean: f64,
    variance: f64,
    central: &[f64],
    r_max: u32,
) {
    match pmf.window_around(mean) {
        Some((x_lo, x_hi)) => {
            for r in 1..=r_max {
                match discrete_central_lb(x_lo, x_hi, mean, r) {
                    Ok(b) => au.lower(b, central[2 * r as usize], None),
                    Err(e) => au.op_error(BoundSource::DiscreteCentralWindow, e),
                }
            }
        }
        None => au.skip(
            BoundSource::DiscreteCentralWindow,
            "single support point has no straddling window",
        ),
    }

    if !pmf.is_unit_lattice() {
        au.skip(BoundSource::LatticeVariance, "support is not a run of consecutive integers");
    } else {
        match plateau {
            Some(p) => {
                for m in plateau_modes(p) {
                    au.lower(lattice_variance_lb(mean, m), variance, Some(m));
                }
            }
            None => au.skip(BoundSource::LatticeVariance, "distribution is not unimodal"),
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn audit_density(
    au: &mut Auditor,
    d: &PiecewiseConstantDensity,
    shape: ShapeClass,
    plateau: Option<(f64, f64)>,
    mean: f64,
    variance: f64,
    raw: &[f64],
    central: &[f64],
    r_max: u32,
) {
    let (a, b) = d.support();

    match shape {
        ShapeClass::NonIncreasing => {
            match variance_lb_monotone(a, b, mean, Monotonicity::NonIncreasing) {
                Ok(bd) => au.lower(bd, variance, Some(a)),
                Err(e) => au.op_error(BoundSource::VarianceNonIncreasing, e),
            }
            let mut odd_skipped = false;
            for r in 2..=2 * r_max {
                if r % 2 == 1 && a < 0.0 {
                    odd_skipped = true;
                    continue;
                }
                match raw_moment_lb_monotone(a, mean, r) {
                    Ok(bd) => au.lower(bd, raw[r as usize], Some(a)),
                    Err(e) => au.op_error(BoundSource::RawNonIncreasing, e),
                }
            }
            if odd_skipped {
                au.skip(
                    BoundSource::RawNonIncreasing,
                    "odd orders need a nonnegative left endpoint",
                );
            }
            au.skip(BoundSource::VarianceNonDecreasing, "density is non-increasing");
        }
        ShapeClass::NonDecreasing => {
            match variance_lb_monotone(a, b, mean, Monotonicity::NonDecreasing) {
                Ok(bd) => au.lower(bd, variance, Some(b)),
                Err(e) => au.op_error(BoundSource::VarianceNonDecreasing, e),
            }
            au.skip(BoundSource::VarianceNonIncreasing, "density is non-decreasing");
            au.skip(BoundSource::RawNonIncreasing, "density is non-decreasing");
        }
        ShapeClass::Unimodal { .. } => {
            au.skip(BoundSource::VarianceNonIncreasing, "density is not monotone");
            au.skip(BoundSource::VarianceNonDecreasing, "density is not monotone");
            au.skip(BoundSource::RawNonIncreasing, "density is not monotone");
        }
        ShapeClass::NotUnimodal => {
            for source in [
                BoundSource::VarianceNonIncreasing,
                BoundSource::VarianceNonDecreasing,
                BoundSource::RawNonIncreasing,
                BoundSource::VarianceUnimodal,
                BoundSource::RawUnimodal,
                BoundSource::CentralEvenUnimodal,
                BoundSource::JacobsonUpper,
            ] {
                au.skip(source, "distribution is not unimodal");
            }
            return;
        }
    }

    let plateau = plateau.expect("unimodal-family shapes have a mode plateau");
    let modes = plateau_modes(plateau);

    for &m in &modes {
        au.lower(variance_lb_unimodal(mean, m), variance, Some(m));
    }

    let mut odd_skipped = false;
    for r in 2..=2 * r_max {
        let mut any = false;
        for &m in &modes {
            // Odd orders: the factorization needs x, alpha, beta all
            // nonnegative, so the support must not extend below zero and the
            // witness pair (m, 2*mean - m) must be nonnegative.
            if r % 2 == 1 && (a < 0.0 || m < 0.0 || 2.0 * mean - m < 0.0) {
                continue;
            }
            match raw_moment_lb_unimodal(m, mean, r) {
                Ok(bd) => {
                    au.lower(bd, raw[r as usize], Some(m));
                    any = true;
                }
                Err(e) => au.op_error(BoundSource::RawUnimodal, e),
            }
        }
        if !any && r % 2 == 1 {
            odd_skipped = true;
        }
    }
    if odd_skipped {
        au.skip(BoundSource::RawUnimodal, "odd orders out of the nonnegative regime");
    }

    for r in 1..=r_max {
        for &m in &modes {
            au.lower(central_even_lb_unimodal(mean, m, r), central[2 * r as usize], Some(m));
        }
    }

    match variance_ub_jacobson(a, b) {
        Ok(bd) => au.upper(bd, variance),
        Err(e) => au.op_error(BoundSource::JacobsonUpper, e),
    }
}

fn audit_tangent(au: &mut Auditor, support_min: f64, mean: f64, raw: &[f64], r_max: u32) {
    if support_min < 0.0 {
        au.skip(BoundSource::TangentRaw, "odd orders skipped: support extends below zero");
    }
    for r in 2..=2 * r_max {
        if r % 2 == 1 && support_min < 0.0 {
            continue;
        }
        let b = BoundResult {
            value: tangent_raw_lb(mean, mean, r),
            kind: BoundKind::Lower,
            source: BoundSource::TangentRaw,
            target_kind: MomentKind::Raw,
            target_order: r,
            witness: None,
        };
        au.lower(b, raw[r as usize], None);
    }
}

/// One bound violation (or generator/mean-range failure) found by the suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub section: &'static str,
    pub trial: u64,
    pub seed: u64,
    pub check: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub actual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<Distribution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectionReport {
    pub trials: u64,
    pub checks: u64,
    pub violations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TightnessSection {
    pub pairs: u64,
    pub checks: u64,
    pub violations: u64,
    pub max_rel_margin: f64,
}

/// Aggregated result of the verification suite.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub config: TrialConfig,
    pub discrete: SectionReport,
    pub density: SectionReport,
    pub mean_range: SectionReport,
    pub tightness: TightnessSection,
    pub total_checks: u64,
    pub total_violations: u64,
    pub pass: bool,
    /// First violations in deterministic order (capped).
    pub violations: Vec<Violation>,
    /// Smallest failing distribution, for reproduction.
    pub counterexample: Option<Violation>,
}

struct TrialOutcome {
    checks: u64,
    mean_range_failed: Option<Violation>,
    violations: Vec<Violation>,
}

fn violations_from_audit(
    section: &'static str,
    trial: u64,
    seed: u64,
    report: &AuditReport,
) -> Vec<Violation> {
    let mut out = Vec::new();
    if report.shape == ShapeClass::NotUnimodal {
        out.push(Violation {
            section,
            trial,
            seed,
            check: "generator-validity: classified NotUnimodal".to_string(),
            bound: None,
            actual: None,
            margin: None,
            distribution: Some(report.distribution.clone()),
        });
    }
    for c in report.failed_checks() {
        out.push(Violation {
            section,
            trial,
            seed,
            check: format!(
                "{} on {} moment r={}{}",
                c.source.tag(),
                match c.target_kind {
                    MomentKind::Raw => "raw",
                    MomentKind::Central => "central",
                },
                c.target_order,
                c.mode.map(|m| format!(" at mode {m}")).unwrap_or_default()
            ),
            bound: Some(c.bound),
            actual: Some(c.actual),
            margin: Some(c.margin),
            distribution: Some(report.distribution.clone()),
        });
    }
    out
}

fn run_discrete_trial(cfg: &TrialConfig, trial: u64) -> TrialOutcome {
    let seed = trial_seed(cfg.master_seed, STREAM_DISCRETE, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=cfg.max_points as usize);
    let lattice = trial % 2 == 0;
    let pmf = gen_discrete_unimodal(rng.gen(), n, lattice);
    let dist = Distribution::from(pmf);
    let report = audit(&dist, cfg);
    TrialOutcome {
        checks: report.checks.len() as u64,
        mean_range_failed: None,
        violations: violations_from_audit("discrete", trial, seed, &report),
    }
}

fn run_density_trial(cfg: &TrialConfig, trial: u64) -> TrialOutcome {
    let seed = trial_seed(cfg.master_seed, STREAM_DENSITY, trial);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = rng.gen_range(-10.0..5.0);
    let b = a + rng.gen_range(0.5..10.0);
    let pieces = rng.gen_range(1..=cfg.max_pieces as usize);
    let density = gen_density_unimodal(rng.gen(), pieces, a, b);
    let dist = Distribution::from(density);
    let report = audit(&dist, cfg);
    let mut violations = violations_from_audit("density", trial, seed, &report);

    // Mean-range consequence of unimodality: (a + M_lo)/2 <= mean <= (b + M_hi)/2.
    let tol = cfg.tolerance();
    let mean_range_failed = report.mode_plateau.and_then(|(m_lo, m_hi)| {
        let lo = 0.5 * (a + m_lo);
        let hi = 0.5 * (b + m_hi);
        let ok = report.mean >= lo - tol.slack(report.mean, lo)
            && report.mean <= hi + tol.slack(report.mean, hi);
        (!ok).then(|| Violation {
            section: "mean-range",
            trial,
            seed,
            check: format!("mean {} outside [{lo}, {hi}]", report.mean),
            bound: None,
            actual: Some(report.mean),
            margin: None,
            distribution: Some(report.distribution.clone()),
        })
    });

    if let Some(v) = &mean_range_failed {
        violations.push(v.clone());
    }
    TrialOutcome { checks: report.checks.len() as u64, mean_range_failed, violations }
}

/// Tightness section: uniform witnesses must attain the unimodal bounds with
/// relative margin at most [`TIGHTNESS_REL_MARGIN`].
pub fn tightness_suite(master_seed: u64, pairs: u64) -> TightnessSection {
    tightness_outcomes(master_seed, pairs).0
}

fn tightness_outcomes(master_seed: u64, pairs: u64) -> (TightnessSection, Vec<Violation>) {
    let outcomes: Vec<(u64, f64, Vec<Violation>)> = (0..pairs)
        .into_par_iter()
        .map(|i| run_tightness_pair(master_seed, i))
        .collect();

    let mut checks = 0;
    let mut max_rel_margin: f64 = 0.0;
    let mut violations = Vec::new();
    for (c, m, v) in outcomes {
        checks += c;
        max_rel_margin = max_rel_margin.max(m);
        violations.extend(v);
    }
    let section = TightnessSection {
        pairs,
        checks,
        violations: violations.len() as u64,
        max_rel_margin,
    };
    (section, violations)
}

fn run_tightness_pair(master_seed: u64, index: u64) -> (u64, f64, Vec<Violation>) {
    let seed = trial_seed(master_seed, STREAM_TIGHTNESS, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mode = rng.gen_range(-10.0..10.0);
    let delta = rng.gen_range(0.1..10.0);
    let mean = if rng.gen::<bool>() { mode + delta } else { mode - delta };
    let witness = tightness_witness(mode, mean).expect("mean differs from mode by >= 0.1");
    let dist = Distribution::from(witness);
    let mu = dist.raw_moment(1);

    let mut checks = 0u64;
    let mut max_margin: f64 = 0.0;
    let mut violations = Vec::new();
    let mut record = |name: String, bound: f64, actual: f64| {
        let m = rel_diff(actual, bound);
        checks += 1;
        max_margin = max_margin.max(m);
        if m > TIGHTNESS_REL_MARGIN {
            violations.push(Violation {
                section: "tightness",
                trial: index,
                seed,
                check: name,
                bound: Some(bound),
                actual: Some(actual),
                margin: Some(m),
                distribution: Some(dist.clone()),
            });
        }
    };

    record(
        format!("{} equality", BoundSource::VarianceUnimodal.tag()),
        variance_lb_unimodal(mu, mode).value,
        dist.central_moment(2),
    );
    for r in 2..=5u32 {
        if r % 2 == 1 && (mode < 0.0 || 2.0 * mu - mode < 0.0) {
            continue;
        }
        let bound = raw_moment_lb_unimodal(mode, mu, r)
            .expect("regime checked above")
            .value;
        record(
            format!("{} equality r={r}", BoundSource::RawUnimodal.tag()),
            bound,
            dist.raw_moment(r),
        );
    }
    for r in 1..=3u32 {
        record(
            format!("{} equality r={r}", BoundSource::CentralEvenUnimodal.tag()),
            central_even_lb_unimodal(mu, mode, r).value,
            dist.central_moment(2 * r),
        );
    }
    (checks, max_margin, violations)
}

fn build_pool(threads: Option<usize>) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .expect("rayon thread pool")
}

/// Run the full verification suite: generator validity, every bound audit,
/// the mean-range property, and the tightness section.
///
/// `threads` caps the worker count; it has no effect on the results.
pub fn run_suite(cfg: &TrialConfig, threads: Option<usize>) -> Result<SuiteReport, ConfigError> {
    cfg.validate()?;
    let pool = build_pool(threads);
    Ok(pool.install(|| run_suite_inner(cfg)))
}

fn run_suite_inner(cfg: &TrialConfig) -> SuiteReport {
    let discrete_outcomes: Vec<TrialOutcome> = (0..cfg.n_trials)
        .into_par_iter()
        .map(|i| run_discrete_trial(cfg, i))
        .collect();
    let density_outcomes: Vec<TrialOutcome> = (0..cfg.n_trials)
        .into_par_iter()
        .map(|i| run_density_trial(cfg, i))
        .collect();
    let (tightness, tightness_violations) = tightness_outcomes(cfg.master_seed, TIGHTNESS_PAIRS);

    let summarize = |outcomes: &[TrialOutcome], section: &str| {
        let checks = outcomes.iter().map(|o| o.checks).sum::<u64>();
        let violations = outcomes
            .iter()
            .flat_map(|o| &o.violations)
            .filter(|v| v.section == section)
            .count() as u64;
        SectionReport { trials: outcomes.len() as u64, checks, violations }
    };
    let discrete = summarize(&discrete_outcomes, "discrete");
    let density = summarize(&density_outcomes, "density");
    let mean_range = SectionReport {
        trials: density_outcomes.len() as u64,
        checks: density_outcomes.len() as u64,
        violations: density_outcomes.iter().filter(|o| o.mean_range_failed.is_some()).count()
            as u64,
    };

    let mut all: Vec<Violation> = Vec::new();
    for o in discrete_outcomes.iter().chain(&density_outcomes) {
        all.extend(o.violations.iter().cloned());
    }
    all.extend(tightness_violations);

    let total_violations = all.len() as u64;
    let counterexample = all
        .iter()
        .min_by_key(|v| {
            (v.distribution.as_ref().map_or(usize::MAX, |d| d.size()), v.trial)
        })
        .cloned();
    all.truncate(MAX_STORED_VIOLATIONS);

    let total_checks = discrete.checks + density.checks + mean_range.checks + tightness.checks;
    SuiteReport {
        config: cfg.clone(),
        discrete,
        density,
        mean_range,
        tightness,
        total_checks,
        total_violations,
        pass: total_violations == 0,
        violations: all,
        counterexample,
    }
}

/// One comparison data point between the window bound (Thm2.5-eq2.40, r = 1)
/// and the lattice bound (Eq1.1) on a lattice unimodal pmf.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareCase {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
    pub mean: f64,
    pub mode: f64,
    pub window_bound: f64,
    pub lattice_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CompareOutcome {
    WindowWin,
    LatticeWin,
    Tie,
}

/// Empirical comparison of the two discrete variance bounds over random
/// lattice unimodal pmfs. Nothing is asserted about which wins; the summary
/// just measures it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareReport {
    pub config: TrialConfig,
    /// Distribution family the measurement is taken over.
    pub generator: &'static str,
    pub trials: u64,
    pub window_wins: u64,
    pub lattice_wins: u64,
    pub ties: u64,
    pub window_win_fraction: f64,
    /// Arithmetic mean of window/lattice over trials with a positive lattice
    /// bound.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_ratio: Option<CompareCase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_ratio: Option<CompareCase>,
    /// Fixed reference case: the three-point lattice pmf with mean 1/10,
    /// where the ratio is (9/100)/(11/300) = 27/11.
    pub example1: CompareCase,
}

fn compare_case(pmf: &DiscretePmf, trial: Option<u64>, tol: Tolerance) -> (CompareCase, CompareOutcome) {
    let dist = Distribution::from(pmf.clone());
    let mean = dist.raw_moment(1);
    let (m_lo, m_hi) = dist.mode_plateau().expect("generated pmf is unimodal");
    let mode = best_plateau_mode(m_lo, m_hi, mean);
    let lattice_bound = lattice_variance_lb(mean, mode).value;
    let (x_lo, x_hi) = pmf.window_around(mean).expect("pmf has at least two points");
    let window_bound = discrete_central_lb(x_lo, x_hi, mean, 1)
        .expect("window straddles the mean")
        .value;
    let outcome = if tol.close(window_bound, lattice_bound) {
        CompareOutcome::Tie
    } else if window_bound > lattice_bound {
        CompareOutcome::WindowWin
    } else {
        CompareOutcome::LatticeWin
    };
    let ratio = (lattice_bound > 0.0).then(|| window_bound / lattice_bound);
    (CompareCase { trial, mean, mode, window_bound, lattice_bound, ratio }, outcome)
}

fn example1_pmf() -> DiscretePmf {
    DiscretePmf::new(vec![-1.0, 0.0, 1.0], vec![0.2, 0.5, 0.3]).expect("valid pmf")
}

/// Run the comparison study over `cfg.n_trials` lattice unimodal pmfs.
pub fn compare(cfg: &TrialConfig, threads: Option<usize>) -> Result<CompareReport, ConfigError> {
    cfg.validate()?;
    let pool = build_pool(threads);
    let tol = cfg.tolerance();
    let cases: Vec<(CompareCase, CompareOutcome)> = pool.install(|| {
        (0..cfg.n_trials)
            .into_par_iter()
            .map(|i| {
                let seed = trial_seed(cfg.master_seed, STREAM_COMPARE, i);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let n = rng.gen_range(2..=cfg.max_points as usize);
                let pmf = gen_discrete_unimodal(rng.gen(), n, true);
                compare_case(&pmf, Some(i), tol)
            })
            .collect()
    });

    let mut window_wins = 0u64;
    let mut lattice_wins = 0u64;
    let mut ties = 0u64;
    let mut ratio_sum = CompensatedSum::new();
    let mut ratio_count = 0u64;
    let mut max_ratio: Option<CompareCase> = None;
    let mut min_ratio: Option<CompareCase> = None;
    for (case, outcome) in &cases {
        match outcome {
            CompareOutcome::WindowWin => window_wins += 1,
            CompareOutcome::LatticeWin => lattice_wins += 1,
            CompareOutcome::Tie => ties += 1,
        }
        if let Some(r) = case.ratio {
            ratio_sum.add(r);
            ratio_count += 1;
            if max_ratio.as_ref().and_then(|c| c.ratio).is_none_or(|m| r > m) {
                max_ratio = Some(case.clone());
            }
            if min_ratio.as_ref().and_then(|c| c.ratio).is_none_or(|m| r < m) {
                min_ratio = Some(case.clone());
            }
        }
    }

    let (example1, _) = compare_case(&example1_pmf(), None, tol);
    Ok(CompareReport {
        config: cfg.clone(),
        generator: "consecutive-integer support, exponential-of-uniform unimodal weights, uniform peak index",
        trials: cfg.n_trials,
        window_wins,
        lattice_wins,
        ties,
        window_win_fraction: window_wins as f64 / cfg.n_trials as f64,
        mean_ratio: (ratio_count > 0).then(|| ratio_sum.total() / ratio_count as f64),
        max_ratio,
        min_ratio,
        example1,
    })
}
