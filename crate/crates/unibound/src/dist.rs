//! Concrete distribution representations, shape classification, and the
//! exact moment oracle.
//!
//! Two families are supported, both with closed-form moments so the oracle is
//! exact up to rounding:
//!
//! * [`DiscretePmf`]: finitely many support points with probabilities;
//! * [`PiecewiseConstantDensity`]: a step density on an interval.
//!
//! Construction validates the invariants (strictly increasing support,
//! nonnegative weights, unit mass within [`MASS_TOLERANCE`]); inputs outside
//! tolerance are rejected rather than renormalized so construction bugs
//! surface instead of being papered over.

use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numeric::{power_sum, CompensatedSum};

/// Absolute tolerance on |total mass − 1| at construction.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// Rejection reasons for invalid distribution data.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("distribution needs at least one support point / piece")]
    Empty,
    #[error("{points} support values vs {weights} weights")]
    LengthMismatch { points: usize, weights: usize },
    #[error("piecewise density needs len(breakpoints) = len(heights) + 1, got {breakpoints} breakpoints and {heights} heights")]
    BreakpointMismatch { breakpoints: usize, heights: usize },
    #[error("support values must be strictly increasing (violated at index {index})")]
    NotStrictlyIncreasing { index: usize },
    #[error("negative weight {value} at index {index}")]
    NegativeWeight { index: usize, value: f64 },
    #[error("non-finite value {value} at index {index} of {field}")]
    NonFinite { field: &'static str, index: usize, value: f64 },
    #[error("total mass {total} differs from 1 by more than {MASS_TOLERANCE:e}")]
    MassNotOne { total: f64 },
}

/// Failure to obtain a distribution from JSON text.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid distribution: {0}")]
    Invalid(#[from] DistError),
}

fn check_finite(field: &'static str, values: &[f64]) -> Result<(), DistError> {
    for (index, &value) in values.iter().enumerate() {
        if !value.is_finite() {
            return Err(DistError::NonFinite { field, index, value });
        }
    }
    Ok(())
}

fn check_strictly_increasing(values: &[f64]) -> Result<(), DistError> {
    for index in 1..values.len() {
        if !(values[index] > values[index - 1]) {
            return Err(DistError::NotStrictlyIncreasing { index });
        }
    }
    Ok(())
}

fn check_nonnegative(values: &[f64]) -> Result<(), DistError> {
    for (index, &value) in values.iter().enumerate() {
        if !(value >= 0.0) {
            return Err(DistError::NegativeWeight { index, value });
        }
    }
    Ok(())
}

/// A finite discrete distribution: strictly increasing support points with
/// nonnegative probabilities summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePmf {
    points: Vec<f64>,
    probs: Vec<f64>,
}

impl DiscretePmf {
    pub fn new(points: Vec<f64>, probs: Vec<f64>) -> Result<Self, DistError> {
        if points.is_empty() {
            return Err(DistError::Empty);
        }
        if points.len() != probs.len() {
            return Err(DistError::LengthMismatch { points: points.len(), weights: probs.len() });
        }
        check_finite("points", &points)?;
        check_finite("probs", &probs)?;
        check_strictly_increasing(&points)?;
        check_nonnegative(&probs)?;
        let total = CompensatedSum::default();
        let total = probs.iter().fold(total, |mut acc, &p| {
            acc.add(p);
            acc
        });
        let total = total.total();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(DistError::MassNotOne { total });
        }
        Ok(DiscretePmf { points, probs })
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Support endpoints (x_1, x_n).
    pub fn support(&self) -> (f64, f64) {
        (self.points[0], *self.points.last().unwrap())
    }

    /// Raw moment E[X^r] = Σ p_i x_i^r, compensated. `r = 0` returns the
    /// total mass.
    pub fn raw_moment(&self, r: u32) -> f64 {
        let mut acc = CompensatedSum::new();
        for (&x, &p) in self.points.iter().zip(&self.probs) {
            acc.add(p * x.powi(r as i32));
        }
        acc.total()
    }

    /// Central moment E[(X − μ)^r], computed on the shifted support.
    pub fn central_moment(&self, r: u32) -> f64 {
        let mean = self.raw_moment(1);
        let mut acc = CompensatedSum::new();
        for (&x, &p) in self.points.iter().zip(&self.probs) {
            acc.add(p * (x - mean).powi(r as i32));
        }
        acc.total()
    }

    /// The same distribution translated by `c`.
    pub fn shifted(&self, c: f64) -> Result<Self, DistError> {
        DiscretePmf::new(self.points.iter().map(|x| x + c).collect(), self.probs.clone())
    }

    /// True when the support is a run of consecutive integers (unit lattice).
    pub fn is_unit_lattice(&self) -> bool {
        self.points.iter().all(|x| x.fract() == 0.0)
            && self.points.windows(2).all(|w| w[1] - w[0] == 1.0)
    }

    /// Consecutive support points straddling `mean`: the pair
    /// (x_{j-1}, x_j) with x_{j-1} <= mean <= x_j. `None` for a single point.
    pub fn window_around(&self, mean: f64) -> Option<(f64, f64)> {
        if self.len() < 2 {
            return None;
        }
        let j = self
            .points
            .partition_point(|&x| x < mean)
            .clamp(1, self.len() - 1);
        Some((self.points[j - 1], self.points[j]))
    }
}

/// A step density on [t_0, t_m]: strictly increasing breakpoints and
/// nonnegative heights, total area one.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstantDensity {
    breakpoints: Vec<f64>,
    heights: Vec<f64>,
}

impl PiecewiseConstantDensity {
    pub fn new(breakpoints: Vec<f64>, heights: Vec<f64>) -> Result<Self, DistError> {
        if heights.is_empty() {
            return Err(DistError::Empty);
        }
        if breakpoints.len() != heights.len() + 1 {
            return Err(DistError::BreakpointMismatch {
                breakpoints: breakpoints.len(),
                heights: heights.len(),
            });
        }
        check_finite("breakpoints", &breakpoints)?;
        check_finite("heights", &heights)?;
        check_strictly_increasing(&breakpoints)?;
        check_nonnegative(&heights)?;
        let mut mass = CompensatedSum::new();
        for (k, &h) in heights.iter().enumerate() {
            mass.add(h * (breakpoints[k + 1] - breakpoints[k]));
        }
        let total = mass.total();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(DistError::MassNotOne { total });
        }
        Ok(PiecewiseConstantDensity { breakpoints, heights })
    }

    /// Uniform density on [a, b] (a single piece).
    pub fn uniform(a: f64, b: f64) -> Result<Self, DistError> {
        if !(b > a) {
            return Err(DistError::NotStrictlyIncreasing { index: 1 });
        }
        PiecewiseConstantDensity::new(vec![a, b], vec![1.0 / (b - a)])
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn pieces(&self) -> usize {
        self.heights.len()
    }

    /// Interval endpoints (t_0, t_m).
    pub fn support(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    /// Raw moment ∫ x^r φ(x) dx = Σ_k h_k (t_k^{r+1} − t_{k-1}^{r+1})/(r+1),
    /// evaluated piecewise in divided-difference form (exact closed form, no
    /// quadrature).
    pub fn raw_moment(&self, r: u32) -> f64 {
        let terms = r + 1;
        let mut acc = CompensatedSum::new();
        for (k, &h) in self.heights.iter().enumerate() {
            let (s, t) = (self.breakpoints[k], self.breakpoints[k + 1]);
            acc.add(h * (t - s) * power_sum(s, t, terms) / terms as f64);
        }
        acc.total()
    }

    /// Central moment ∫ (x − μ)^r φ(x) dx via the same closed form on the
    /// shifted breakpoints.
    pub fn central_moment(&self, r: u32) -> f64 {
        let mean = self.raw_moment(1);
        let terms = r + 1;
        let mut acc = CompensatedSum::new();
        for (k, &h) in self.heights.iter().enumerate() {
            let s = self.breakpoints[k] - mean;
            let t = self.breakpoints[k + 1] - mean;
            acc.add(h * (t - s) * power_sum(s, t, terms) / terms as f64);
        }
        acc.total()
    }

    /// The same density translated by `c`.
    pub fn shifted(&self, c: f64) -> Result<Self, DistError> {
        PiecewiseConstantDensity::new(
            self.breakpoints.iter().map(|t| t + c).collect(),
            self.heights.clone(),
        )
    }
}

/// Shape classification of the weight sequence (probabilities or heights).
///
/// `Unimodal` carries the full plateau of admissible modes in support
/// coordinates; a flat peak is unimodal at every point of the plateau.
/// Monotone sequences report the dedicated variants (the mode-at-left-end /
/// mode-at-right-end special cases); a constant sequence reports
/// `NonIncreasing` so downstream bound selection is deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ShapeClass {
    NonIncreasing,
    NonDecreasing,
    Unimodal { mode_lo: f64, mode_hi: f64 },
    NotUnimodal,
}

impl ShapeClass {
    pub fn is_unimodal_family(&self) -> bool {
        !matches!(self, ShapeClass::NotUnimodal)
    }
}

fn non_increasing(w: &[f64]) -> bool {
    w.windows(2).all(|p| p[0] >= p[1])
}

fn non_decreasing(w: &[f64]) -> bool {
    w.windows(2).all(|p| p[0] <= p[1])
}

/// Index range (first, last) of the maximal-weight run, or `None` when the
/// peak weights are not contiguous (no single-peak shape exists).
///
/// Comparisons are exact; there is no tolerance on weight ties.
fn peak_run(w: &[f64]) -> Option<(usize, usize)> {
    let mx = w.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let first = w.iter().position(|&x| x == mx)?;
    let last = w.iter().rposition(|&x| x == mx)?;
    if w[first..=last].iter().any(|&x| x != mx) {
        return None;
    }
    if !non_decreasing(&w[..=first]) || !non_increasing(&w[last..]) {
        return None;
    }
    Some((first, last))
}

/// Either distribution family, as consumed and produced by the JSON
/// interfaces.
///
/// The wire format is a tagged object:
/// `{"type":"discrete","points":[..],"probs":[..]}` or
/// `{"type":"piecewise","breakpoints":[..],"heights":[..]}`.
/// Deserialization always re-validates the invariants.
#[derive(Debug, Clone, PartialEq)]
pub enum Distribution {
    Discrete(DiscretePmf),
    Piecewise(PiecewiseConstantDensity),
}

impl From<DiscretePmf> for Distribution {
    fn from(p: DiscretePmf) -> Self {
        Distribution::Discrete(p)
    }
}

impl From<PiecewiseConstantDensity> for Distribution {
    fn from(d: PiecewiseConstantDensity) -> Self {
        Distribution::Piecewise(d)
    }
}

impl Distribution {
    pub fn raw_moment(&self, r: u32) -> f64 {
        match self {
            Distribution::Discrete(p) => p.raw_moment(r),
            Distribution::Piecewise(d) => d.raw_moment(r),
        }
    }

    pub fn central_moment(&self, r: u32) -> f64 {
        match self {
            Distribution::Discrete(p) => p.central_moment(r),
            Distribution::Piecewise(d) => d.central_moment(r),
        }
    }

    pub fn mean(&self) -> f64 {
        self.raw_moment(1)
    }

    pub fn variance(&self) -> f64 {
        self.central_moment(2)
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Distribution::Discrete(p) => p.support(),
            Distribution::Piecewise(d) => d.support(),
        }
    }

    fn weights(&self) -> &[f64] {
        match self {
            Distribution::Discrete(p) => p.probs(),
            Distribution::Piecewise(d) => d.heights(),
        }
    }

    /// Weight-sequence monotonicity flags (non-increasing, non-decreasing).
    /// A constant sequence reports both.
    pub fn weight_monotonicity(&self) -> (bool, bool) {
        let w = self.weights();
        (non_increasing(w), non_decreasing(w))
    }

    /// Tightest shape classification for this distribution.
    pub fn shape(&self) -> ShapeClass {
        let w = self.weights();
        if non_increasing(w) {
            return ShapeClass::NonIncreasing;
        }
        if non_decreasing(w) {
            return ShapeClass::NonDecreasing;
        }
        match peak_run(w) {
            Some((first, last)) => {
                let (lo, hi) = self.plateau_coords(first, last);
                ShapeClass::Unimodal { mode_lo: lo, mode_hi: hi }
            }
            None => ShapeClass::NotUnimodal,
        }
    }

    /// The full interval of admissible modes, in support coordinates.
    ///
    /// For monotone shapes this is the maximal-weight prefix/suffix run
    /// (every point of which is an admissible mode); `None` when the
    /// distribution is not unimodal.
    pub fn mode_plateau(&self) -> Option<(f64, f64)> {
        peak_run(self.weights()).map(|(first, last)| self.plateau_coords(first, last))
    }

    fn plateau_coords(&self, first: usize, last: usize) -> (f64, f64) {
        match self {
            Distribution::Discrete(p) => (p.points()[first], p.points()[last]),
            Distribution::Piecewise(d) => (d.breakpoints()[first], d.breakpoints()[last + 1]),
        }
    }

    /// Number of support points / density pieces.
    pub fn size(&self) -> usize {
        match self {
            Distribution::Discrete(p) => p.len(),
            Distribution::Piecewise(d) => d.pieces(),
        }
    }
}

/// Classify a distribution's weight sequence. See [`Distribution::shape`].
pub fn classify_shape(dist: &Distribution) -> ShapeClass {
    dist.shape()
}

#[derive(Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum RawDistribution {
    Discrete { points: Vec<f64>, probs: Vec<f64> },
    Piecewise { breakpoints: Vec<f64>, heights: Vec<f64> },
}

impl TryFrom<RawDistribution> for Distribution {
    type Error = DistError;

    fn try_from(raw: RawDistribution) -> Result<Self, DistError> {
        match raw {
            RawDistribution::Discrete { points, probs } => {
                Ok(Distribution::Discrete(DiscretePmf::new(points, probs)?))
            }
            RawDistribution::Piecewise { breakpoints, heights } => Ok(Distribution::Piecewise(
                PiecewiseConstantDensity::new(breakpoints, heights)?,
            )),
        }
    }
}

impl Serialize for Distribution {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Distribution::Discrete(p) => {
                let mut st = serializer.serialize_struct("Distribution", 3)?;
                st.serialize_field("type", "discrete")?;
                st.serialize_field("points", p.points())?;
                st.serialize_field("probs", p.probs())?;
                st.end()
            }
            Distribution::Piecewise(d) => {
                let mut st = serializer.serialize_struct("Distribution", 3)?;
                st.serialize_field("type", "piecewise")?;
                st.serialize_field("breakpoints", d.breakpoints())?;
                st.serialize_field("heights", d.heights())?;
                st.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawDistribution::deserialize(deserializer)?;
        Distribution::try_from(raw).map_err(D::Error::custom)
    }
}

/// Parse a distribution from JSON text, validating all invariants.
pub fn parse_distribution(text: &str) -> Result<Distribution, ParseError> {
    let raw: RawDistribution = serde_json::from_str(text)?;
    Ok(Distribution::try_from(raw)?)
}

/// Order and kind of a moment, with its value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentValue {
    pub order: u32,
    pub kind: MomentKind,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MomentKind {
    Raw,
    Central,
}
