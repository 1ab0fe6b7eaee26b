//! Equi-homogeneity: comparing the largest and smallest local covers at each pair of scales.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::covers::local_cover_unchecked;
use crate::dims::{check_pair, resolve_centers, single_point_estimate, AssouadEstimate};
use crate::error::{Error, Result};
use crate::ifs::{attractor_hull, moran_exponent, words_of_length, IndexedSystem, MoranCertificate};
use crate::scalar::Scalar;
use crate::sets::{Interval, LineSet};

/// Growth slope above which a ratio sequence counts as growing.
pub const GROWTH_THRESHOLD: f64 = 0.1;
/// Allowed drift of the tail maximum for a bounded verdict.
pub const STABILITY_BAND: f64 = 0.1;
/// Agreement required between a given exponent and the solved one.
pub const EXPONENT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Bounded,
    Growing,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquihomRow {
    pub delta: Scalar,
    pub rho: Scalar,
    /// `sup_x N(B_δ(x)∩F, ρ)`.
    pub sup_count: usize,
    /// `inf_x N(B_{c1·δ}(x)∩F, c2·ρ)`.
    pub inf_count: usize,
    pub ratio: f64,
    pub argmax: Scalar,
    pub argmin: Scalar,
}

/// Trend of the ratio along one `δ` as `ρ` shrinks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupTrend {
    pub delta: Scalar,
    pub growth: f64,
    pub monotone_tail: bool,
    pub head_max: f64,
    pub tail_max: f64,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquihomReport {
    pub rows: Vec<EquihomRow>,
    pub center_family: String,
    pub c1: Scalar,
    pub c2: Scalar,
    /// A lower bound for the true constant `M` at these scales.
    pub max_ratio: f64,
    /// Largest per-δ slope of `log ratio` against `log(1/ρ)` over the tail.
    pub growth_fit: f64,
    pub groups: Vec<GroupTrend>,
    pub verdict: Verdict,
}

/// `sup_x N(B_δ(x)∩F, ρ) / inf_x N(B_{c1δ}(x)∩F, c2ρ)` over the candidate centres.
pub fn equihom_certify<F: LineSet + ?Sized>(
    f: &F,
    pairs: &[(Scalar, Scalar)],
    c1: &Scalar,
    c2: &Scalar,
    centers: Option<&[Scalar]>,
) -> Result<EquihomReport> {
    if !c2.is_positive() || c2 > &Scalar::one() || c1 < &Scalar::one() {
        return Err(Error::ScaleOrderViolation(format!("need 0 < c2 {c2} <= 1 <= c1 {c1}")));
    }
    pairs.iter().try_for_each(|(d, r)| check_pair(d, r))?;
    if pairs.is_empty() {
        return Err(Error::TooFewScales { needed: 1, got: 0 });
    }
    let (centers, center_family) = resolve_centers(f, centers)?;

    let mut rows: Vec<EquihomRow> = pairs
        .iter()
        .map(|(delta, rho)| {
            let big = c1 * delta;
            let small = c2 * rho;
            let same = big == *delta && small == *rho;
            let counts = crate::par_map(&centers, |x| {
                let n = local_cover_unchecked(f, x, delta, rho).count;
                (n, if same { n } else { local_cover_unchecked(f, x, &big, &small).count })
            });
            let hi = (0..counts.len()).max_by_key(|&i| (counts[i].0, std::cmp::Reverse(i))).unwrap();
            let lo = (0..counts.len()).min_by_key(|&i| (counts[i].1, i)).unwrap();
            let (sup_count, inf_count) = (counts[hi].0, counts[lo].1);
            EquihomRow {
                delta: delta.clone(),
                rho: rho.clone(),
                sup_count,
                inf_count,
                ratio: sup_count as f64 / inf_count as f64,
                argmax: centers[hi].clone(),
                argmin: centers[lo].clone(),
            }
        })
        .collect();
    rows.sort_by(|a, b| a.delta.cmp(&b.delta).then_with(|| a.rho.cmp(&b.rho)));
    rows.dedup_by(|a, b| a.delta == b.delta && a.rho == b.rho);

    let mut by_delta: BTreeMap<&Scalar, Vec<&EquihomRow>> = BTreeMap::new();
    for row in &rows {
        by_delta.entry(&row.delta).or_default().push(row);
    }
    let groups: Vec<GroupTrend> = by_delta
        .into_iter()
        .map(|(delta, mut g)| {
            g.sort_by(|a, b| b.rho.cmp(&a.rho));
            group_trend(delta, &g)
        })
        .collect();

    let max_ratio = rows.iter().map(|r| r.ratio).fold(1.0, f64::max);
    let growth_fit = groups.iter().map(|g| g.growth).fold(f64::NEG_INFINITY, f64::max);
    let verdict = if groups.iter().any(|g| g.verdict == Verdict::Growing) {
        Verdict::Growing
    } else if groups.iter().all(|g| g.verdict == Verdict::Bounded) {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    };
    Ok(EquihomReport { rows, center_family, c1: c1.clone(), c2: c2.clone(), max_ratio, growth_fit, groups, verdict })
}

/// `g` is ordered by decreasing `ρ`. The tail is the last `⌊len/2⌋ + 1` rows.
fn group_trend(delta: &Scalar, g: &[&EquihomRow]) -> GroupTrend {
    let n = g.len();
    let tail_len = n / 2 + 1;
    let (head, tail) = g.split_at(n - tail_len.min(n));
    let x = |r: &EquihomRow| -r.rho.ln();
    let y = |r: &EquihomRow| r.ratio.ln();
    let (first, last) = (tail[0], tail[tail.len() - 1]);
    let growth = if tail.len() >= 2 { (y(last) - y(first)) / (x(last) - x(first)) } else { 0.0 };
    let monotone_tail = tail.windows(2).all(|w| w[1].ratio >= w[0].ratio);
    let head_max = head.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let tail_max = tail.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let verdict = if n < 3 {
        Verdict::Inconclusive
    } else if growth > GROWTH_THRESHOLD && monotone_tail {
        Verdict::Growing
    } else if growth <= GROWTH_THRESHOLD && tail_max <= (1.0 + STABILITY_BAND) * head_max {
        Verdict::Bounded
    } else {
        Verdict::Inconclusive
    };
    GroupTrend { delta: delta.clone(), growth, monotone_tail, head_max, tail_max, verdict }
}

/// Assouad estimate from local covers at the single point `x`.
///
/// Only meaningful when `F` is equi-homogeneous; otherwise it can miss the
/// worst point entirely.
pub fn equihom_singlepoint_assouad<F: LineSet + ?Sized>(
    f: &F,
    x: &Scalar,
    pairs: &[(Scalar, Scalar)],
) -> Result<AssouadEstimate> {
    if !f.contains(x) {
        return Err(Error::CenterNotInSet(x.to_string()));
    }
    let profile = crate::dims::local_cover_profile(f, pairs, Some(std::slice::from_ref(x)))?;
    single_point_estimate(&profile)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularitySample {
    pub x: Scalar,
    pub delta: Scalar,
    /// Weight of sampled cylinders inside `B_δ(x)`.
    pub inner: f64,
    /// Weight of sampled cylinders meeting `B_δ(x)`.
    pub outer: f64,
    pub ratio_low: f64,
    pub ratio_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    pub s: f64,
    pub sample_depth: usize,
    pub samples: Vec<RegularitySample>,
    pub c_observed: f64,
}

/// Bracket `μ(B_δ(x))` for the natural measure between the weights of
/// depth-`sample_depth` cylinders inside the ball and those meeting it.
///
/// Centres are images of the attractor's extreme points at half depth and
/// radii run over `diam(F)·σ_max^j`, `j ≤ sample_depth / 2`.
pub fn ahlfors_regularity_check(
    sys: &IndexedSystem,
    cert: &MoranCertificate,
    s: f64,
    sample_depth: usize,
) -> Result<RegularityReport> {
    if !sys.is_autonomous() {
        return Err(Error::NotAutonomous);
    }
    let ratios: Vec<Scalar> = sys.level(1)?.iter().map(|f| f.ratio().clone()).collect();
    let solved = moran_exponent(&ratios)?;
    if (solved - s).abs() > EXPONENT_TOLERANCE {
        return Err(Error::ExponentMismatch { given: s, solved });
    }
    if !cert.passed {
        return Err(Error::OpenSetConditionFailed);
    }
    let hull = attractor_hull(sys)?;

    let cylinders: Vec<(Interval, f64)> = words_of_length(sys, 0, sample_depth)?
        .iter()
        .map(|w| {
            let f = w.similarity(sys)?;
            Ok((f.image(&hull), (s * w.ratio.ln()).exp()))
        })
        .collect::<Result<_>>()?;

    let half = sample_depth / 2;
    let mut xs: Vec<Scalar> = Vec::new();
    for w in words_of_length(sys, 0, half)? {
        let f = w.similarity(sys)?;
        xs.push(f.apply(hull.lo()));
        xs.push(f.apply(hull.hi()));
    }
    xs.sort();
    xs.dedup();
    let sigma_max = sys.sigma_star_upper();
    let mut deltas = vec![hull.length()];
    for _ in 0..half {
        let next = deltas.last().unwrap() * sigma_max;
        deltas.push(next);
    }

    let jobs: Vec<(Scalar, Scalar)> =
        xs.iter().flat_map(|x| deltas.iter().map(move |d| (x.clone(), d.clone()))).collect();
    let samples = crate::par_map(&jobs, |(x, delta)| {
        let ball = Interval::new_unchecked(x - delta, x + delta);
        let (mut inner, mut outer) = (0.0, 0.0);
        for (c, w) in &cylinders {
            if ball.meets(c) {
                outer += w;
                if ball.contains_interval(c) {
                    inner += w;
                }
            }
        }
        let scale = (s * delta.ln()).exp();
        RegularitySample {
            x: x.clone(),
            delta: delta.clone(),
            inner,
            outer,
            ratio_low: inner / scale,
            ratio_high: outer / scale,
        }
    });
    let c_observed = samples
        .iter()
        .map(|r| r.ratio_high.max(1.0 / r.ratio_low))
        .fold(1.0, f64::max);
    Ok(RegularityReport { s, sample_depth, samples, c_observed })
}
