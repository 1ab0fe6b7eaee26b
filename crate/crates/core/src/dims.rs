//! Box-counting and Assouad-type dimension estimates from exact counts.
//!
//! Limits are approximated by two-point log-log slopes; the estimate is the
//! max (or min) over the tail, the last half of the slope sequence.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::covers::{covering_number, local_cover_unchecked};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sets::LineSet;

/// Chain slack for [`dimension_chain_check`].
pub const CHAIN_SLACK: f64 = 0.05;

/// Scales `base · factor^j` for `j < depth`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScaleGrid {
    pub base: Scalar,
    pub factor: Scalar,
    pub depth: usize,
}

impl ScaleGrid {
    pub fn new(base: Scalar, factor: Scalar, depth: usize) -> Result<Self> {
        if !base.is_positive() {
            return Err(Error::NonPositiveScale(base.to_string()));
        }
        if !factor.is_positive() || factor >= Scalar::one() {
            return Err(Error::RatioOutOfRange(factor.to_string()));
        }
        Ok(ScaleGrid { base, factor, depth })
    }

    /// `base^-from, …, base^-to` style grid: `r^lo, r^(lo+1), …, r^hi`.
    pub fn powers(r: Scalar, lo: i32, hi: i32) -> Result<Self> {
        let depth = (hi - lo + 1).max(0) as usize;
        ScaleGrid::new(r.pow(lo), r, depth)
    }

    pub fn scales(&self) -> Vec<Scalar> {
        let mut out = Vec::with_capacity(self.depth);
        let mut d = self.base.clone();
        for _ in 0..self.depth {
            out.push(d.clone());
            d = d * &self.factor;
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoxCount {
    pub delta: Scalar,
    pub count: usize,
}

/// Exact `N(F, δ)` at each scale.
pub fn box_counts<F: LineSet + ?Sized>(f: &F, scales: &[Scalar]) -> Result<Vec<BoxCount>> {
    if f.is_empty() {
        return Err(Error::EmptySet);
    }
    crate::par_map(scales, |d| covering_number(f, d).map(|c| BoxCount { delta: d.clone(), count: c.count }))
        .into_iter()
        .collect()
}

/// Tail of a slope sequence: the last `⌊len/2⌋` entries, at least one.
fn tail(slopes: &[f64]) -> &[f64] {
    let keep = (slopes.len() / 2).max(1).min(slopes.len());
    &slopes[slopes.len() - keep..]
}

fn slope(x0: f64, y0: f64, x1: f64, y1: f64) -> f64 {
    (y1 - y0) / (x1 - x0)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxEstimate {
    pub lower: f64,
    pub upper: f64,
    /// Two-point slopes from coarse to fine.
    pub slopes: Vec<f64>,
}

/// Min and max of the tail two-point slopes of `log N` against `log(1/δ)`.
pub fn box_dimension_estimate(counts: &[BoxCount]) -> Result<BoxEstimate> {
    let mut pts: Vec<&BoxCount> = counts.iter().collect();
    pts.sort_by(|a, b| b.delta.cmp(&a.delta));
    pts.dedup_by(|a, b| a.delta == b.delta);
    if pts.len() < 4 {
        return Err(Error::TooFewScales { needed: 4, got: pts.len() });
    }
    let slopes: Vec<f64> = pts
        .windows(2)
        .map(|w| slope(-w[0].delta.ln(), (w[0].count as f64).ln(), -w[1].delta.ln(), (w[1].count as f64).ln()))
        .collect();
    let t = tail(&slopes);
    Ok(BoxEstimate {
        lower: t.iter().copied().fold(f64::INFINITY, f64::min),
        upper: t.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        slopes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub delta: Scalar,
    pub rho: Scalar,
    pub sup_count: usize,
    pub inf_count: usize,
    pub argmax: Scalar,
    pub argmin: Scalar,
}

impl ProfileRow {
    pub fn scale_ratio(&self) -> Scalar {
        &self.delta / &self.rho
    }
}

/// Sampled `sup_x` and `inf_x` of `N(B_δ(x)∩F, ρ)`.
///
/// The sup is a lower bound for the true supremum and the inf an upper bound
/// for the true infimum, so every sup/inf ratio is a lower bound too.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalCoverProfile {
    /// Sorted by `(δ, ρ)`.
    pub rows: Vec<ProfileRow>,
    pub center_family: String,
}

/// `(δ, ρ)` for every δ in `deltas` and every `ρ = δ·r`, `r` in `ratios`.
pub fn grid_pairs(deltas: &[Scalar], ratios: &[Scalar]) -> Vec<(Scalar, Scalar)> {
    deltas.iter().flat_map(|d| ratios.iter().map(move |r| (d.clone(), d * r))).collect()
}

pub(crate) fn resolve_centers<F: LineSet + ?Sized>(f: &F, centers: Option<&[Scalar]>) -> Result<(Vec<Scalar>, String)> {
    if f.is_empty() {
        return Err(Error::EmptySet);
    }
    match centers {
        Some(c) => {
            if let Some(x) = c.iter().find(|x| !f.contains(x)) {
                return Err(Error::CenterNotInSet(x.to_string()));
            }
            if c.is_empty() {
                return Err(Error::EmptySet);
            }
            Ok((c.to_vec(), format!("{} supplied centers", c.len())))
        }
        None => {
            let pts = f.structural_points();
            let desc = format!("{} structural points (piece endpoints and midpoints)", pts.len());
            Ok((pts, desc))
        }
    }
}

pub(crate) fn check_pair(delta: &Scalar, rho: &Scalar) -> Result<()> {
    if !rho.is_positive() {
        return Err(Error::NonPositiveScale(rho.to_string()));
    }
    if rho >= delta {
        return Err(Error::ScaleOrderViolation(format!("rho {rho} must be below delta {delta}")));
    }
    Ok(())
}

/// Local covering numbers over the candidate centres for each `(δ, ρ)`.
pub fn local_cover_profile<F: LineSet + ?Sized>(
    f: &F,
    pairs: &[(Scalar, Scalar)],
    centers: Option<&[Scalar]>,
) -> Result<LocalCoverProfile> {
    pairs.iter().try_for_each(|(d, r)| check_pair(d, r))?;
    let (centers, center_family) = resolve_centers(f, centers)?;
    let mut rows: Vec<ProfileRow> = pairs.iter().map(|(d, r)| profile_row(f, &centers, d, r)).collect();
    rows.sort_by(|a, b| a.delta.cmp(&b.delta).then_with(|| a.rho.cmp(&b.rho)));
    rows.dedup_by(|a, b| a.delta == b.delta && a.rho == b.rho);
    Ok(LocalCoverProfile { rows, center_family })
}

pub(crate) fn profile_row<F: LineSet + ?Sized>(f: &F, centers: &[Scalar], delta: &Scalar, rho: &Scalar) -> ProfileRow {
    let counts = crate::par_map(centers, |x| local_cover_unchecked(f, x, delta, rho).count);
    let (mut hi, mut lo) = (0, 0);
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[hi] {
            hi = i;
        }
        if c < counts[lo] {
            lo = i;
        }
    }
    ProfileRow {
        delta: delta.clone(),
        rho: rho.clone(),
        sup_count: counts[hi],
        inf_count: counts[lo],
        argmax: centers[hi].clone(),
        argmin: centers[lo].clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssouadEstimate {
    pub dimension: f64,
    /// Least `C` with `count ≤ C·(δ/ρ)^dimension` (upper) or `count ≥ (δ/ρ)^dimension / C` (lower).
    pub constant: f64,
    /// `(log(δ/ρ), log count)` per distinct ratio, ascending.
    pub points: Vec<(f64, f64)>,
    pub slopes: Vec<f64>,
}

fn ratio_estimate(
    profile: &LocalCoverProfile,
    min_ratios: usize,
    upper: bool,
) -> Result<AssouadEstimate> {
    let mut by_ratio: BTreeMap<Scalar, usize> = BTreeMap::new();
    for row in &profile.rows {
        let count = if upper { row.sup_count } else { row.inf_count };
        by_ratio
            .entry(row.scale_ratio())
            .and_modify(|c| *c = if upper { (*c).max(count) } else { (*c).min(count) })
            .or_insert(count);
    }
    if by_ratio.len() < min_ratios {
        return Err(Error::TooFewScales { needed: min_ratios, got: by_ratio.len() });
    }
    let points: Vec<(f64, f64)> = by_ratio.iter().map(|(r, &c)| (r.ln(), (c as f64).ln())).collect();
    let slopes: Vec<f64> = points.windows(2).map(|w| slope(w[0].0, w[0].1, w[1].0, w[1].1)).collect();
    let t = tail(&slopes);
    let dimension = if upper {
        t.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        t.iter().copied().fold(f64::INFINITY, f64::min)
    };
    let constant = points
        .iter()
        .map(|&(lr, lc)| if upper { (lc - dimension * lr).exp() } else { (dimension * lr - lc).exp() })
        .fold(0.0, f64::max);
    Ok(AssouadEstimate { dimension, constant, points, slopes })
}

/// Max tail slope of `log sup_count` against `log(δ/ρ)`.
pub fn assouad_estimate(profile: &LocalCoverProfile) -> Result<AssouadEstimate> {
    ratio_estimate(profile, 4, true)
}

/// Min tail slope of `log inf_count` against `log(δ/ρ)`.
pub fn lower_assouad_estimate(profile: &LocalCoverProfile) -> Result<AssouadEstimate> {
    ratio_estimate(profile, 4, false)
}

pub(crate) fn single_point_estimate(profile: &LocalCoverProfile) -> Result<AssouadEstimate> {
    ratio_estimate(profile, 2, true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attainment {
    pub dimension: f64,
    /// Least `C_low` with `δ^{-dim} / C_low ≤ N(F, δ)`.
    pub c_low: f64,
    /// Least `C_high` with `N(F, δ) ≤ C_high · δ^{-dim}`.
    pub c_high: f64,
    pub counts: Vec<BoxCount>,
}

pub fn attainment_check<F: LineSet + ?Sized>(f: &F, dim_value: f64, scales: &[Scalar]) -> Result<Attainment> {
    let counts = box_counts(f, scales)?;
    Ok(attainment_from_counts(counts, dim_value))
}

pub fn attainment_from_counts(counts: Vec<BoxCount>, dim_value: f64) -> Attainment {
    let (mut c_low, mut c_high) = (0.0f64, 0.0f64);
    for b in &counts {
        let scale = (-dim_value * b.delta.ln()).exp();
        let n = b.count as f64;
        c_high = c_high.max(n / scale);
        c_low = c_low.max(scale / n);
    }
    Attainment { dimension: dim_value, c_low, c_high, counts }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub lower_box: f64,
    pub upper_box: f64,
    pub assouad: f64,
    pub lower_assouad: f64,
    pub box_slopes: Vec<f64>,
    pub assouad_slopes: Vec<f64>,
    pub lower_assouad_slopes: Vec<f64>,
    pub attainment: Option<Attainment>,
}

impl DimensionReport {
    pub fn from_estimates(
        boxes: &BoxEstimate,
        assouad: &AssouadEstimate,
        lower: &AssouadEstimate,
        attainment: Option<Attainment>,
    ) -> Self {
        DimensionReport {
            lower_box: boxes.lower,
            upper_box: boxes.upper,
            assouad: assouad.dimension,
            lower_assouad: lower.dimension,
            box_slopes: boxes.slopes.clone(),
            assouad_slopes: assouad.slopes.clone(),
            lower_assouad_slopes: lower.slopes.clone(),
            attainment,
        }
    }
}

/// `dim_LA ≤ dim_LB ≤ dim_B ≤ dim_A` up to [`CHAIN_SLACK`].
pub fn dimension_chain_check(report: &DimensionReport) -> bool {
    let chain = [report.lower_assouad, report.lower_box, report.upper_box, report.assouad];
    chain.iter().all(|v| v.is_finite()) && chain.windows(2).all(|w| w[0] <= w[1] + CHAIN_SLACK)
}
