//! Non-autonomous iterated function systems of similarities on the line.
//!
//! Levels are numbered from 1. The set map `S^k` applies the maps of level
//! `k + 1`, and `S^{k,l} = S^k ∘ … ∘ S^{l−1}`, so the maps of the deepest
//! level act first.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sets::{Interval, IntervalSet, LineSet};

/// `x ↦ ratio · (orientation · x) + offset`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSimilarity", into = "RawSimilarity")]
pub struct Similarity {
    ratio: Scalar,
    offset: Scalar,
    orientation: i8,
}

#[derive(Serialize, Deserialize)]
struct RawSimilarity {
    ratio: Scalar,
    offset: Scalar,
    #[serde(default = "plus_one")]
    orientation: i8,
}

fn plus_one() -> i8 {
    1
}

impl TryFrom<RawSimilarity> for Similarity {
    type Error = Error;
    fn try_from(r: RawSimilarity) -> Result<Self> {
        Similarity::new(r.ratio, r.offset, r.orientation)
    }
}

impl From<Similarity> for RawSimilarity {
    fn from(s: Similarity) -> Self {
        RawSimilarity { ratio: s.ratio, offset: s.offset, orientation: s.orientation }
    }
}

impl Similarity {
    pub fn new(ratio: Scalar, offset: Scalar, orientation: i8) -> Result<Self> {
        if !ratio.is_positive() || ratio >= Scalar::one() {
            return Err(Error::RatioOutOfRange(ratio.to_string()));
        }
        if orientation != 1 && orientation != -1 {
            return Err(Error::Parse(format!("orientation must be 1 or -1, got {orientation}")));
        }
        Ok(Similarity { ratio, offset, orientation })
    }

    pub fn ratio(&self) -> &Scalar {
        &self.ratio
    }

    pub fn offset(&self) -> &Scalar {
        &self.offset
    }

    pub fn orientation(&self) -> i8 {
        self.orientation
    }

    pub fn apply(&self, x: &Scalar) -> Scalar {
        let y = &self.ratio * x;
        if self.orientation > 0 {
            y + &self.offset
        } else {
            &self.offset - y
        }
    }

    pub fn image(&self, iv: &Interval) -> Interval {
        let (a, b) = (self.apply(iv.lo()), self.apply(iv.hi()));
        if self.orientation > 0 {
            Interval::new_unchecked(a, b)
        } else {
            Interval::new_unchecked(b, a)
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Similarity) -> Similarity {
        Similarity {
            ratio: &self.ratio * &inner.ratio,
            offset: self.apply(&inner.offset),
            orientation: self.orientation * inner.orientation,
        }
    }

    fn identity() -> Similarity {
        Similarity { ratio: Scalar::one(), offset: Scalar::zero(), orientation: 1 }
    }
}

/// The unique fixed point of a contracting similarity.
pub fn fixed_point(f: &Similarity) -> Scalar {
    let denom = if f.orientation > 0 { Scalar::one() - &f.ratio } else { Scalar::one() + &f.ratio };
    &f.offset / denom
}

/// Levels `I_1, I_2, …` of similarity maps. A cyclic system repeats its levels forever.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct IndexedSystem {
    levels: Vec<Vec<Similarity>>,
    cyclic: bool,
    sigma_star_lower: Scalar,
    sigma_star_upper: Scalar,
    fixed_point_bound: Scalar,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    cyclic: bool,
    levels: Vec<Vec<Similarity>>,
}

impl TryFrom<RawSystem> for IndexedSystem {
    type Error = Error;
    fn try_from(r: RawSystem) -> Result<Self> {
        IndexedSystem::new(r.levels, r.cyclic)
    }
}

impl From<IndexedSystem> for RawSystem {
    fn from(s: IndexedSystem) -> Self {
        RawSystem { cyclic: s.cyclic, levels: s.levels }
    }
}

impl IndexedSystem {
    pub fn new(levels: Vec<Vec<Similarity>>, cyclic: bool) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Parse("system has no levels".into()));
        }
        if let Some(k) = levels.iter().position(Vec::is_empty) {
            return Err(Error::Parse(format!("level {} has no maps", k + 1)));
        }
        let all = || levels.iter().flatten();
        let sigma_star_lower = all().map(|f| f.ratio.clone()).min().unwrap();
        let sigma_star_upper = all().map(|f| f.ratio.clone()).max().unwrap();
        let fixed_point_bound = all().map(|f| fixed_point(f).abs()).max().unwrap();
        Ok(IndexedSystem { levels, cyclic, sigma_star_lower, sigma_star_upper, fixed_point_bound })
    }

    /// One level repeated forever.
    pub fn autonomous(maps: Vec<Similarity>) -> Result<Self> {
        IndexedSystem::new(vec![maps], true)
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    /// The same maps at every level.
    pub fn is_autonomous(&self) -> bool {
        self.cyclic && self.levels.iter().all(|l| l == &self.levels[0])
    }

    /// Deepest defined level; `None` for cyclic systems.
    pub fn horizon(&self) -> Option<usize> {
        (!self.cyclic).then_some(self.levels.len())
    }

    pub fn period(&self) -> usize {
        self.levels.len()
    }

    pub fn stored_levels(&self) -> &[Vec<Similarity>] {
        &self.levels
    }

    /// Maps of level `k` (1-based).
    pub fn level(&self, k: usize) -> Result<&[Similarity]> {
        if k == 0 {
            return Err(Error::LevelOutOfRange(0));
        }
        if self.cyclic {
            Ok(&self.levels[(k - 1) % self.levels.len()])
        } else {
            self.levels.get(k - 1).map(Vec::as_slice).ok_or(Error::LevelOutOfRange(k))
        }
    }

    pub fn sigma_star_lower(&self) -> &Scalar {
        &self.sigma_star_lower
    }

    pub fn sigma_star_upper(&self) -> &Scalar {
        &self.sigma_star_upper
    }

    /// `M = sup |b_i|` over the fixed points `b_i`.
    pub fn fixed_point_bound(&self) -> &Scalar {
        &self.fixed_point_bound
    }

    fn check_level(&self, k: usize) -> Result<()> {
        self.level(k).map(|_| ())
    }
}

/// `S^k(B) = ⋃_{i ∈ I_{k+1}} f_i(B)`.
pub fn apply_level<B: LineSet + ?Sized>(sys: &IndexedSystem, k: usize, b: &B) -> Result<IntervalSet> {
    let maps = sys.level(k + 1)?;
    let mut raw = Vec::with_capacity(maps.len() * b.piece_count());
    for f in maps {
        for i in 0..b.piece_count() {
            raw.push(f.image(&b.piece(i)));
        }
    }
    Ok(IntervalSet::normalize(raw))
}

/// `S^{k,l}(B)`; `S^{k,k}(B) = B`.
pub fn compose_chain<B: LineSet + ?Sized>(sys: &IndexedSystem, k: usize, l: usize, b: &B) -> Result<IntervalSet> {
    if k > l {
        return Err(Error::ScaleOrderViolation(format!("chain start {k} after end {l}")));
    }
    if l > k {
        sys.check_level(l)?;
    }
    let mut cur = b.to_interval_set();
    for j in (k..l).rev() {
        cur = apply_level(sys, j, &cur)?;
    }
    Ok(cur)
}

/// `R = 2(1 + σ*)M / (1 − σ*)`.
pub fn attractor_seed_radius(sys: &IndexedSystem) -> Scalar {
    let s = sys.sigma_star_upper();
    Scalar::from_integer(2) * (Scalar::one() + s) * sys.fixed_point_bound() / (Scalar::one() - s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pullback {
    pub set: IntervalSet,
    /// `d_j = ρ_H(K_j, K_{j+1})` for `j < m`.
    pub decay: Vec<Scalar>,
    /// `(σ*)^j · 2·max(R, L)` where `L` bounds the seed.
    pub bounds: Vec<Scalar>,
}

/// `K_m = S^{k,k+m}(seed)` with its Cauchy trace.
pub fn pullback_approximation(sys: &IndexedSystem, k: usize, m: usize, seed: &IntervalSet) -> Result<Pullback> {
    if seed.is_empty() {
        return Err(Error::EmptySet);
    }
    if m == 0 {
        return Err(Error::TooFewScales { needed: 1, got: 0 });
    }
    sys.check_level(k + m)?;
    let steps: Vec<usize> = (0..=m).collect();
    let chain = crate::par_map(&steps, |&j| compose_chain(sys, k, k + j, seed));
    let chain = chain.into_iter().collect::<Result<Vec<_>>>()?;

    let seed_radius = seed.min_point().unwrap().abs().max(seed.max_point().unwrap().abs());
    let radius = attractor_seed_radius(sys).max(seed_radius);
    let mut bound = Scalar::from_integer(2) * radius;
    let mut decay = Vec::with_capacity(m);
    let mut bounds = Vec::with_capacity(m);
    for (j, pair) in chain.windows(2).enumerate() {
        let d = crate::hausdorff::hausdorff_distance(&pair[0], &pair[1])?;
        if d > bound {
            return Err(Error::DecayViolation { step: j, distance: d.to_string(), bound: bound.to_string() });
        }
        decay.push(d);
        bounds.push(bound.clone());
        bound = bound * sys.sigma_star_upper();
    }
    Ok(Pullback { set: chain.into_iter().last().unwrap(), decay, bounds })
}

/// A finite union of open intervals `(lo, hi)`, sorted; neighbours may share an endpoint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct OpenSet {
    intervals: Vec<Interval>,
}

impl OpenSet {
    pub fn new(mut intervals: Vec<Interval>) -> Result<Self> {
        intervals.sort_by(|a, b| a.lo().cmp(b.lo()));
        if let Some(iv) = intervals.iter().find(|iv| iv.lo() >= iv.hi()) {
            return Err(Error::MalformedInterval { lo: iv.lo().to_string(), hi: iv.hi().to_string() });
        }
        if let Some(w) = intervals.windows(2).find(|w| w[0].hi() > w[1].lo()) {
            return Err(Error::Parse(format!("open intervals overlap near {}", w[1].lo())));
        }
        Ok(OpenSet { intervals })
    }

    /// `(0, 1)`.
    pub fn unit() -> Self {
        OpenSet { intervals: vec![Interval::unit()] }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn length(&self) -> Scalar {
        self.intervals.iter().map(Interval::length).sum()
    }

    /// Diameter of the closure.
    pub fn diameter(&self) -> Scalar {
        match (self.intervals.first(), self.intervals.last()) {
            (Some(a), Some(b)) => b.hi() - a.lo(),
            _ => Scalar::zero(),
        }
    }

    /// Closed hull of each component.
    pub fn closure(&self) -> IntervalSet {
        IntervalSet::normalize(self.intervals.clone())
    }

    /// Is the open interval `(iv.lo, iv.hi)` inside one component?
    fn holds(&self, iv: &Interval) -> bool {
        self.intervals.iter().any(|u| u.contains_interval(iv))
    }
}

impl TryFrom<Vec<Interval>> for OpenSet {
    type Error = Error;
    fn try_from(v: Vec<Interval>) -> Result<Self> {
        OpenSet::new(v)
    }
}

impl From<OpenSet> for Vec<Interval> {
    fn from(s: OpenSet) -> Self {
        s.intervals
    }
}

pub const MOSC_READING: &str = "images of U^{k+1} under the level k+1 maps are pairwise disjoint";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub k: usize,
    pub nested: bool,
    pub disjoint: bool,
    pub measure: bool,
    /// An offending image (nesting) or overlap (disjointness).
    pub witness: Option<Interval>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoranCertificate {
    pub open_sets: Vec<OpenSet>,
    pub epsilon0: Scalar,
    pub eta: Scalar,
    pub reading: String,
    pub checks: Vec<LevelCheck>,
    pub passed: bool,
}

impl MoranCertificate {
    pub fn open_set(&self, k: usize) -> &OpenSet {
        &self.open_sets[k.min(self.open_sets.len() - 1)]
    }
}

/// Check the Moran open-set conditions level by level.
///
/// `open_sets[k]` is `U^k`; the last entry is reused for deeper levels. Cyclic
/// systems are checked until the pattern of (open set, level) pairs repeats.
pub fn verify_mosc(sys: &IndexedSystem, open_sets: &[OpenSet], epsilon0: &Scalar) -> MoranCertificate {
    let open_sets: Vec<OpenSet> = if open_sets.is_empty() { vec![OpenSet::unit()] } else { open_sets.to_vec() };
    let u = |k: usize| &open_sets[k.min(open_sets.len() - 1)];
    let last_k = match sys.horizon() {
        Some(h) => h,
        None => open_sets.len() - 1 + sys.period(),
    };
    let mut checks = Vec::with_capacity(last_k);
    for k in 0..last_k {
        let maps = sys.level(k + 1).expect("level within horizon");
        let (outer, inner) = (u(k), u(k + 1));
        let images: Vec<Interval> =
            maps.iter().flat_map(|f| inner.intervals().iter().map(move |iv| f.image(iv))).collect();
        let mut witness = None;
        let nested = match images.iter().find(|im| !outer.holds(im)) {
            Some(im) => {
                witness = Some(im.clone());
                false
            }
            None => true,
        };
        let mut disjoint = true;
        'outer: for a in 0..images.len() {
            for b in a + 1..images.len() {
                let lo = images[a].lo().max(images[b].lo());
                let hi = images[a].hi().min(images[b].hi());
                if lo < hi {
                    disjoint = false;
                    if witness.is_none() {
                        witness = Some(Interval::new_unchecked(lo.clone(), hi.clone()));
                    }
                    break 'outer;
                }
            }
        }
        let measure = &outer.length() >= epsilon0;
        checks.push(LevelCheck { k, nested, disjoint, measure, witness });
    }
    let eta = open_sets.iter().map(OpenSet::diameter).max().unwrap();
    let passed = epsilon0.is_positive() && checks.iter().all(|c| c.nested && c.disjoint && c.measure);
    MoranCertificate {
        open_sets,
        epsilon0: epsilon0.clone(),
        eta,
        reading: MOSC_READING.to_string(),
        checks,
        passed,
    }
}

/// The unique `s ≥ 0` with `Σ σ_i^s = 1`, by bisection to `1e-12`.
pub fn moran_exponent(ratios: &[Scalar]) -> Result<f64> {
    if ratios.is_empty() {
        return Err(Error::EmptyRatios);
    }
    if let Some(r) = ratios.iter().find(|r| !r.is_positive() || **r >= Scalar::one()) {
        return Err(Error::RatioOutOfRange(r.to_string()));
    }
    let logs: Vec<f64> = ratios.iter().map(Scalar::ln).collect();
    let sum = |s: f64| logs.iter().map(|l| (s * l).exp()).sum::<f64>();
    if ratios.len() == 1 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while sum(hi) >= 1.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if sum(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `Σ_{i ∈ I_k} σ_i^s`.
pub fn level_sum(sys: &IndexedSystem, k: usize, s: f64) -> Result<f64> {
    Ok(sys.level(k)?.iter().map(|f| (s * f.ratio.ln()).exp()).sum())
}

pub const HIPPO_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HippoReport {
    pub s: f64,
    /// `r_k = Σ σ_i^s − 1` for `k = 1..=horizon`.
    pub residuals: Vec<f64>,
    pub passed: bool,
}

pub fn hippo_check(sys: &IndexedSystem, s: f64, horizon: usize) -> Result<HippoReport> {
    let residuals = (1..=horizon).map(|k| level_sum(sys, k, s).map(|v| v - 1.0)).collect::<Result<Vec<_>>>()?;
    let passed = residuals.iter().all(|r| r.abs() <= HIPPO_TOLERANCE);
    Ok(HippoReport { s, residuals, passed })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSum {
    pub k: usize,
    pub n: usize,
    pub sum: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragedMoran {
    pub s: f64,
    pub n0: usize,
    pub l_observed: f64,
    pub windows: Vec<WindowSum>,
}

impl AveragedMoran {
    pub fn holds_with(&self, l: f64) -> bool {
        self.windows.iter().all(|w| w.sum <= l && w.sum * l >= 1.0)
    }
}

/// Windows `Σ_{α∈J^{k,k+n}} σ_α^s = Π_{j=k+1}^{k+n} Σ_{i∈I_j} σ_i^s` for
/// `n ≥ n0`, `k + n ≤ horizon`, and the least `L` bracketing all of them.
pub fn averaged_moran_check(sys: &IndexedSystem, s: f64, n0: usize, horizon: usize) -> Result<AveragedMoran> {
    let n0 = n0.max(1);
    let mut prefix = vec![0.0f64; horizon + 1];
    for j in 1..=horizon {
        prefix[j] = prefix[j - 1] + level_sum(sys, j, s)?.ln();
    }
    let mut windows = Vec::new();
    let mut worst = 0.0f64;
    for k in 0..horizon {
        for n in n0..=horizon - k {
            let log_sum = prefix[k + n] - prefix[k];
            worst = worst.max(log_sum.abs());
            windows.push(WindowSum { k, n, sum: log_sum.exp() });
        }
    }
    Ok(AveragedMoran { s, n0, l_observed: worst.exp(), windows })
}

/// A composition `f_{i_{k+1}} ∘ … ∘ f_{i_n}` indexed by consecutive levels.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    /// `(level, index within level)`, levels `start_level + 1 ..= end_level`.
    pub entries: Vec<(usize, usize)>,
    pub ratio: Scalar,
    pub start_level: usize,
    pub end_level: usize,
}

impl Word {
    pub fn empty(k: usize) -> Word {
        Word { entries: Vec::new(), ratio: Scalar::one(), start_level: k, end_level: k }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn extend(&self, sys: &IndexedSystem, index: usize) -> Result<Word> {
        let level = self.end_level + 1;
        let f = sys.level(level)?.get(index).ok_or(Error::LevelOutOfRange(level))?;
        let mut entries = self.entries.clone();
        entries.push((level, index));
        Ok(Word { entries, ratio: &self.ratio * f.ratio(), start_level: self.start_level, end_level: level })
    }

    /// `α′`: drop the last entry.
    pub fn truncation(&self, sys: &IndexedSystem) -> Result<Word> {
        let mut w = Word::empty(self.start_level);
        for &(_, i) in &self.entries[..self.entries.len().saturating_sub(1)] {
            w = w.extend(sys, i)?;
        }
        Ok(w)
    }

    /// The composed map `f_α`.
    pub fn similarity(&self, sys: &IndexedSystem) -> Result<Similarity> {
        let mut f = Similarity::identity();
        for &(level, i) in &self.entries {
            f = f.compose(&sys.level(level)?[i]);
        }
        Ok(f)
    }
}

/// Stopping-time antichain `J^k_δ` for scale `delta` against the open-set diameter `eta`.
///
/// A word stops at the first prefix with `σ_α·η ≤ δ`, so its truncation still
/// has `σ_{α′}·η > δ`. At `δ = η` the empty word already stops.
pub fn cylinder_decomposition(sys: &IndexedSystem, k: usize, delta: &Scalar, eta: &Scalar) -> Result<Vec<Word>> {
    if !delta.is_positive() || delta > eta {
        return Err(Error::ScaleOrderViolation(format!("need 0 < delta {delta} <= eta {eta}")));
    }
    let threshold = delta / eta;
    let mut out = Vec::new();
    let mut stack = vec![Word::empty(k)];
    while let Some(w) = stack.pop() {
        if w.ratio <= threshold {
            out.push(w);
            continue;
        }
        let level = w.end_level + 1;
        let maps = sys.level(level).map_err(|_| Error::HorizonExceeded {
            requested: level,
            horizon: sys.horizon().unwrap_or(usize::MAX),
        })?;
        for i in (0..maps.len()).rev() {
            stack.push(w.extend(sys, i)?);
        }
    }
    Ok(out)
}

/// All words of `J^{k,k+n}` in lexicographic order.
pub fn words_of_length(sys: &IndexedSystem, k: usize, n: usize) -> Result<Vec<Word>> {
    let mut cur = vec![Word::empty(k)];
    for _ in 0..n {
        let mut next = Vec::new();
        for w in &cur {
            for i in 0..sys.level(w.end_level + 1)?.len() {
                next.push(w.extend(sys, i)?);
            }
        }
        cur = next;
    }
    Ok(cur)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NaturalMeasureWeight {
    pub word: Word,
    pub s: f64,
    pub weight: f64,
}

/// `μ^k(f_α(F^n)) = σ_α^s`.
pub fn natural_measure_weight(word: &Word, s: f64) -> NaturalMeasureWeight {
    let weight = if word.ratio == Scalar::one() { 1.0 } else { (s * word.ratio.ln()).exp() };
    NaturalMeasureWeight { word: word.clone(), s, weight }
}

/// Diagnostic constants for the cylinder-count bounds, with length 2 for the unit ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderConstants {
    pub kappa0: f64,
    pub kappa1: f64,
    pub kappa2: f64,
}

/// `κ0 = 2·(2η/σ_*)/ε0`, `κ1 = η^s`, `κ2 = κ0·(η/σ_*)^s`.
pub fn cylinder_constants(sys: &IndexedSystem, cert: &MoranCertificate, s: f64) -> CylinderConstants {
    let eta = cert.eta.to_f64();
    let sigma = sys.sigma_star_lower().to_f64();
    let kappa0 = 2.0 * (2.0 * eta / sigma) / cert.epsilon0.to_f64();
    CylinderConstants { kappa0, kappa1: eta.powf(s), kappa2: kappa0 * (eta / sigma).powf(s) }
}

/// Convex hull of the attractor of an autonomous system, exact.
///
/// The hull `[a, b]` is the unique fixed point of
/// `[a, b] ↦ hull(⋃ f_i([a, b]))`; each candidate pair of extreme maps gives a
/// linear system, and the consistent solution is returned.
pub fn attractor_hull(sys: &IndexedSystem) -> Result<Interval> {
    if !sys.is_autonomous() {
        return Err(Error::NotAutonomous);
    }
    let maps = sys.level(1)?;
    let image_hull = |a: &Scalar, b: &Scalar| {
        let iv = Interval::new_unchecked(a.clone(), b.clone());
        let imgs: Vec<Interval> = maps.iter().map(|f| f.image(&iv)).collect();
        let lo = imgs.iter().map(|i| i.lo().clone()).min().unwrap();
        let hi = imgs.iter().map(|i| i.hi().clone()).max().unwrap();
        (lo, hi)
    };
    for f in maps {
        for g in maps {
            // a = lo-end of f([a,b]), b = hi-end of g([a,b]).
            // f orientation +: a = σa + c  ; −: a = c − σb. Similarly for g.
            let one = Scalar::one();
            let (fa, fb, fc) = if f.orientation > 0 {
                (&one - &f.ratio, Scalar::zero(), f.offset.clone())
            } else {
                (one.clone(), f.ratio.clone(), f.offset.clone())
            };
            let (ga, gb, gc) = if g.orientation > 0 {
                (Scalar::zero(), &one - &g.ratio, g.offset.clone())
            } else {
                (g.ratio.clone(), one.clone(), g.offset.clone())
            };
            let det = &fa * &gb - &fb * &ga;
            if det.is_zero() {
                continue;
            }
            let a = (&fc * &gb - &fb * &gc) / &det;
            let b = (&fa * &gc - &fc * &ga) / &det;
            if a > b {
                continue;
            }
            let (lo, hi) = image_hull(&a, &b);
            if lo == a && hi == b {
                return Ok(Interval::new_unchecked(a, b));
            }
        }
    }
    unreachable!("a contracting hull map has a fixed point among the candidates")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::new(p, d)
    }

    fn sim(r: Scalar, b: Scalar) -> Similarity {
        Similarity::new(r, b, 1).unwrap()
    }

    fn middle_third() -> IndexedSystem {
        IndexedSystem::autonomous(vec![sim(q(1, 3), q(0, 1)), sim(q(1, 3), q(2, 3))]).unwrap()
    }

    fn c2() -> IntervalSet {
        IntervalSet::from_pairs([
            (q(0, 1), q(1, 9)),
            (q(2, 9), q(1, 3)),
            (q(2, 3), q(7, 9)),
            (q(8, 9), q(1, 1)),
        ])
        .unwrap()
    }

    #[test]
    fn fixed_points() {
        assert_eq!(fixed_point(&sim(q(1, 3), q(0, 1))), q(0, 1));
        assert_eq!(fixed_point(&sim(q(1, 3), q(2, 3))), q(1, 1));
        let flip = Similarity::new(q(1, 2), q(3, 4), -1).unwrap();
        assert_eq!(fixed_point(&flip), q(1, 2));
        assert_eq!(flip.apply(&q(1, 2)), q(1, 2));
    }

    #[test]
    fn similarity_validation() {
        assert!(matches!(Similarity::new(q(1, 1), q(0, 1), 1), Err(Error::RatioOutOfRange(_))));
        assert!(matches!(Similarity::new(q(0, 1), q(0, 1), 1), Err(Error::RatioOutOfRange(_))));
        assert!(Similarity::new(q(1, 2), q(0, 1), 0).is_err());
    }

    #[test]
    fn level_images() {
        let sys = middle_third();
        let c1 = apply_level(&sys, 0, &IntervalSet::unit()).unwrap();
        assert_eq!(c1, IntervalSet::from_pairs([(q(0, 1), q(1, 3)), (q(2, 3), q(1, 1))]).unwrap());
        let two = IntervalSet::from_pairs([(q(0, 1), q(1, 10)), (q(1, 2), q(1, 1))]).unwrap();
        let img = apply_level(&sys, 5, &two).unwrap();
        assert_eq!(img.len(), 4);
        assert_eq!(img.intervals()[1], Interval::new(q(1, 6), q(1, 3)).unwrap());
    }

    #[test]
    fn chains() {
        let sys = middle_third();
        let u = IntervalSet::unit();
        assert_eq!(compose_chain(&sys, 3, 3, &u).unwrap(), u);
        assert_eq!(compose_chain(&sys, 0, 2, &u).unwrap(), c2());
        let finite = IndexedSystem::new(vec![sys.level(1).unwrap().to_vec()], false).unwrap();
        assert_eq!(compose_chain(&finite, 0, 2, &u), Err(Error::LevelOutOfRange(2)));
    }

    #[test]
    fn seed_radius() {
        assert_eq!(attractor_seed_radius(&middle_third()), q(4, 1));
        let single = IndexedSystem::autonomous(vec![sim(q(1, 2), q(0, 1))]).unwrap();
        assert_eq!(attractor_seed_radius(&single), q(0, 1));
        let halves = IndexedSystem::autonomous(vec![sim(q(1, 2), q(0, 1)), sim(q(1, 2), q(1, 2))]).unwrap();
        assert_eq!(attractor_seed_radius(&halves), q(6, 1));
    }

    #[test]
    fn pullback_trace_for_middle_third() {
        let p = pullback_approximation(&middle_third(), 0, 3, &IntervalSet::unit()).unwrap();
        assert_eq!(p.decay, vec![q(1, 6), q(1, 18), q(1, 54)]);
        assert_eq!(p.set, compose_chain(&middle_third(), 0, 3, &IntervalSet::unit()).unwrap());
        assert_eq!(p.bounds[0], q(8, 1));
    }

    #[test]
    fn pullback_from_a_prefractal_stays_nested() {
        let sys = middle_third();
        let p = pullback_approximation(&sys, 0, 2, &c2()).unwrap();
        assert!(p.set.is_subset_of(&c2()));
        assert_eq!(p.set, compose_chain(&sys, 0, 4, &IntervalSet::unit()).unwrap());
    }

    #[test]
    fn mosc_examples() {
        let cert = verify_mosc(&middle_third(), &[OpenSet::unit()], &q(1, 1));
        assert!(cert.passed);
        assert_eq!(cert.eta, q(1, 1));

        let bad = IndexedSystem::autonomous(vec![sim(q(1, 2), q(0, 1)), sim(q(1, 2), q(1, 4))]).unwrap();
        let cert = verify_mosc(&bad, &[OpenSet::unit()], &q(1, 1));
        assert!(!cert.passed);
        let c = &cert.checks[0];
        assert!(c.nested && !c.disjoint);
        assert_eq!(c.witness, Some(Interval::new(q(1, 4), q(1, 2)).unwrap()));

        let cert = verify_mosc(&middle_third(), &[OpenSet::unit()], &q(2, 1));
        assert!(!cert.passed);
    }

    #[test]
    fn touching_open_sets_are_not_merged() {
        let split = OpenSet::new(vec![Interval::new(q(0, 1), q(1, 2)).unwrap(), Interval::new(q(1, 2), q(1, 1)).unwrap()])
            .unwrap();
        // The image (0, 1) under the identity-like wide map would straddle 1/2.
        let sys = IndexedSystem::autonomous(vec![sim(q(9, 10), q(0, 1))]).unwrap();
        let cert = verify_mosc(&sys, &[split.clone(), OpenSet::unit()], &q(1, 2));
        assert!(!cert.checks[0].nested);
        assert_eq!(split.length(), q(1, 1));
    }

    #[test]
    fn exponents() {
        let third = moran_exponent(&[q(1, 3), q(1, 3)]).unwrap();
        assert!((third - 2f64.ln() / 3f64.ln()).abs() < 1e-12);
        assert!((moran_exponent(&[q(1, 2), q(1, 4), q(1, 4)]).unwrap() - 1.0).abs() < 1e-12);
        let ninth = moran_exponent(&[q(1, 9), q(1, 9)]).unwrap();
        assert!((ninth - 0.3154648768).abs() < 1e-10);
        assert_eq!(moran_exponent(&[q(1, 2)]).unwrap(), 0.0);
        assert_eq!(moran_exponent(&[]), Err(Error::EmptyRatios));
    }

    #[test]
    fn hippo() {
        let s = 2f64.ln() / 3f64.ln();
        assert!(hippo_check(&middle_third(), s, 20).unwrap().passed);
        let mixed = IndexedSystem::autonomous(vec![sim(q(1, 2), q(0, 1)), sim(q(1, 4), q(1, 2)), sim(q(1, 4), q(3, 4))])
            .unwrap();
        let r = hippo_check(&mixed, 1.0, 5).unwrap();
        assert!(r.passed);
        assert!(r.residuals.iter().all(|x| x.abs() < 1e-15));
    }

    fn alternating() -> IndexedSystem {
        let halves = vec![sim(q(1, 2), q(0, 1)), sim(q(1, 2), q(1, 2))];
        let quarters = (0..4).map(|i| sim(q(1, 4), q(i, 4))).collect();
        IndexedSystem::new(vec![halves, quarters], true).unwrap()
    }

    #[test]
    fn averaged_moran() {
        let s = 2f64.ln() / 3f64.ln();
        assert!((averaged_moran_check(&middle_third(), s, 1, 12).unwrap().l_observed - 1.0).abs() < 1e-9);
        let alt = averaged_moran_check(&alternating(), 1.0, 1, 12).unwrap();
        assert!((alt.l_observed - 1.0).abs() < 1e-9);
        assert!(alt.holds_with(1.0 + 1e-9));
    }

    #[test]
    fn cylinders() {
        let sys = middle_third();
        let words = cylinder_decomposition(&sys, 0, &q(1, 4), &q(1, 1)).unwrap();
        assert_eq!(words.len(), 4);
        assert!(words.iter().all(|w| w.len() == 2 && w.ratio == q(1, 9)));
        assert_eq!(words[1].entries, vec![(1, 0), (2, 1)]);
        let at_eta = cylinder_decomposition(&sys, 0, &q(1, 1), &q(1, 1)).unwrap();
        assert_eq!(at_eta, vec![Word::empty(0)]);
        for j in 1..=6 {
            let d = q(1, 3).pow(j);
            assert_eq!(cylinder_decomposition(&sys, 0, &d, &q(1, 1)).unwrap().len(), 1 << j);
        }
        assert!(matches!(cylinder_decomposition(&sys, 0, &q(2, 1), &q(1, 1)), Err(Error::ScaleOrderViolation(_))));
        let finite = IndexedSystem::new(vec![sys.level(1).unwrap().to_vec()], false).unwrap();
        assert!(matches!(cylinder_decomposition(&finite, 0, &q(1, 27), &q(1, 1)), Err(Error::HorizonExceeded { .. })));
    }

    #[test]
    fn word_maps_and_weights() {
        let sys = middle_third();
        let w = Word::empty(0).extend(&sys, 1).unwrap().extend(&sys, 0).unwrap();
        let f = w.similarity(&sys).unwrap();
        assert_eq!(f.image(&Interval::unit()), Interval::new(q(2, 3), q(7, 9)).unwrap());
        assert_eq!(w.truncation(&sys).unwrap().ratio, q(1, 3));
        let s = 2f64.ln() / 3f64.ln();
        assert!((natural_measure_weight(&w, s).weight - 0.25).abs() < 1e-12);
        assert_eq!(natural_measure_weight(&Word::empty(0), s).weight, 1.0);
        let half = Word { entries: vec![(1, 0)], ratio: q(1, 2), start_level: 0, end_level: 1 };
        assert!((natural_measure_weight(&half, 1.0).weight - 0.5).abs() < 1e-15);
    }

    #[test]
    fn constants_for_middle_third() {
        let sys = middle_third();
        let cert = verify_mosc(&sys, &[OpenSet::unit()], &q(1, 1));
        let s = 2f64.ln() / 3f64.ln();
        let k = cylinder_constants(&sys, &cert, s);
        assert!((k.kappa0 - 12.0).abs() < 1e-12);
        assert!((k.kappa1 - 1.0).abs() < 1e-12);
        assert!((k.kappa2 - 24.0).abs() < 1e-9);
    }

    #[test]
    fn hulls() {
        assert_eq!(attractor_hull(&middle_third()).unwrap(), Interval::unit());
        let flip = IndexedSystem::autonomous(vec![
            Similarity::new(q(1, 3), q(1, 3), -1).unwrap(),
            sim(q(1, 3), q(2, 3)),
        ])
        .unwrap();
        // f1 maps [0,1] onto [0,1/3] reversed; the hull stays [0,1].
        assert_eq!(attractor_hull(&flip).unwrap(), Interval::unit());
        assert_eq!(attractor_hull(&alternating()), Err(Error::NotAutonomous));
    }

    #[test]
    fn system_json_round_trip() {
        let sys = middle_third();
        let json = serde_json::to_string(&sys).unwrap();
        assert_eq!(
            json,
            r#"{"cyclic":true,"levels":[[{"ratio":"1/3","offset":"0","orientation":1},{"ratio":"1/3","offset":"2/3","orientation":1}]]}"#
        );
        let back: IndexedSystem = serde_json::from_str(&json).unwrap();
        assert_eq!(back, sys);
        assert_eq!(back.sigma_star_upper(), &q(1, 3));
        assert_eq!(back.fixed_point_bound(), &q(1, 1));
    }
}
