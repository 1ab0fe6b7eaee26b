//! Canonical finite representations of compact subsets of the line.
//!
//! An [`IntervalSet`] is a finite union of disjoint closed intervals and a
//! [`PointSet`] a finite set of points. Both expose their sorted pieces
//! through [`LineSet`], which is all the covering and distance code needs:
//! a point is a degenerate piece with `lo == hi`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{cmp, Scalar};

/// A closed interval `[lo, hi]`, possibly degenerate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "(Scalar, Scalar)", into = "(Scalar, Scalar)")]
pub struct Interval {
    lo: Scalar,
    hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo > hi {
            return Err(Error::MalformedInterval { lo: lo.to_string(), hi: hi.to_string() });
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(x: Scalar) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn unit() -> Self {
        Interval { lo: Scalar::zero(), hi: Scalar::one() }
    }

    pub(crate) fn new_unchecked(lo: Scalar, hi: Scalar) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn length(&self) -> Scalar {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Scalar {
        self.lo.midpoint(&self.hi)
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn meets(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

impl TryFrom<(Scalar, Scalar)> for Interval {
    type Error = Error;
    fn try_from((lo, hi): (Scalar, Scalar)) -> Result<Self> {
        Interval::new(lo, hi)
    }
}

impl From<Interval> for (Scalar, Scalar) {
    fn from(i: Interval) -> Self {
        (i.lo, i.hi)
    }
}

/// Read access to a sorted sequence of pairwise disjoint closed pieces.
pub trait LineSet: Sync {
    fn piece_count(&self) -> usize;
    fn piece_lo(&self, i: usize) -> &Scalar;
    fn piece_hi(&self, i: usize) -> &Scalar;

    fn is_empty(&self) -> bool {
        self.piece_count() == 0
    }

    fn min_point(&self) -> Option<&Scalar> {
        (!self.is_empty()).then(|| self.piece_lo(0))
    }

    fn max_point(&self) -> Option<&Scalar> {
        (!self.is_empty()).then(|| self.piece_hi(self.piece_count() - 1))
    }

    /// Index of the first piece whose right end is `>= x`.
    fn first_piece_reaching(&self, x: &Scalar) -> usize {
        partition_point(self.piece_count(), |i| cmp(self.piece_hi(i), x) == Ordering::Less)
    }

    /// Index one past the last piece whose left end is `<= x`.
    fn pieces_starting_by(&self, x: &Scalar) -> usize {
        partition_point(self.piece_count(), |i| cmp(self.piece_lo(i), x) != Ordering::Greater)
    }

    fn contains(&self, x: &Scalar) -> bool {
        let i = self.first_piece_reaching(x);
        i < self.piece_count() && self.piece_lo(i) <= x
    }

    /// Exact distance from `x` to the set. Panics on an empty set.
    fn distance_to(&self, x: &Scalar) -> Scalar {
        let n = self.piece_count();
        assert!(n > 0, "distance to an empty set");
        let i = self.first_piece_reaching(x);
        let right = (i < n).then(|| {
            let lo = self.piece_lo(i);
            if lo <= x {
                Scalar::zero()
            } else {
                lo - x
            }
        });
        let left = (i > 0).then(|| x - self.piece_hi(i - 1));
        match (left, right) {
            (Some(l), Some(r)) => l.min(r),
            (Some(l), None) => l,
            (None, Some(r)) => r,
            (None, None) => unreachable!(),
        }
    }

    fn piece(&self, i: usize) -> Interval {
        Interval::new_unchecked(self.piece_lo(i).clone(), self.piece_hi(i).clone())
    }

    /// Piece endpoints plus the midpoints of non-degenerate pieces.
    fn structural_points(&self) -> Vec<Scalar> {
        let mut out = Vec::with_capacity(3 * self.piece_count());
        for i in 0..self.piece_count() {
            let (lo, hi) = (self.piece_lo(i), self.piece_hi(i));
            out.push(lo.clone());
            if lo != hi {
                out.push(lo.midpoint(hi));
                out.push(hi.clone());
            }
        }
        out
    }

    fn to_interval_set(&self) -> IntervalSet {
        IntervalSet { intervals: (0..self.piece_count()).map(|i| self.piece(i)).collect() }
    }
}

pub(crate) fn partition_point(n: usize, mut pred: impl FnMut(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A finite union of disjoint closed intervals, sorted with strictly positive gaps.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Interval>", into = "Vec<Interval>")]
pub struct IntervalSet {
    intervals: Vec<Interval>,
}

impl IntervalSet {
    /// Sort and merge overlapping or touching intervals.
    pub fn normalize(mut raw: Vec<Interval>) -> IntervalSet {
        raw.sort_by(|a, b| a.lo.cmp(&b.lo).then_with(|| a.hi.cmp(&b.hi)));
        let mut out: Vec<Interval> = Vec::with_capacity(raw.len());
        for iv in raw {
            match out.last_mut() {
                Some(last) if iv.lo <= last.hi => {
                    if iv.hi > last.hi {
                        last.hi = iv.hi;
                    }
                }
                _ => out.push(iv),
            }
        }
        IntervalSet { intervals: out }
    }

    /// Validate `(lo, hi)` pairs and normalize.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Scalar, Scalar)>) -> Result<IntervalSet> {
        let raw = pairs.into_iter().map(|(lo, hi)| Interval::new(lo, hi)).collect::<Result<Vec<_>>>()?;
        Ok(IntervalSet::normalize(raw))
    }

    pub fn single(iv: Interval) -> IntervalSet {
        IntervalSet { intervals: vec![iv] }
    }

    pub fn unit() -> IntervalSet {
        IntervalSet::single(Interval::unit())
    }

    pub fn empty() -> IntervalSet {
        IntervalSet { intervals: Vec::new() }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Total length `sum(hi - lo)`.
    pub fn length(&self) -> Scalar {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn hull(&self) -> Option<Interval> {
        let first = self.intervals.first()?;
        let last = self.intervals.last()?;
        Some(Interval::new_unchecked(first.lo.clone(), last.hi.clone()))
    }

    /// True when every point of `self` lies in `other`.
    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intervals.iter().all(|iv| {
            let j = other.first_piece_reaching(&iv.hi);
            j < other.len() && other.intervals[j].contains_interval(iv)
        })
    }

    pub fn into_intervals(self) -> Vec<Interval> {
        self.intervals
    }
}

impl TryFrom<Vec<Interval>> for IntervalSet {
    type Error = Error;
    fn try_from(v: Vec<Interval>) -> Result<Self> {
        Ok(IntervalSet::normalize(v))
    }
}

impl From<IntervalSet> for Vec<Interval> {
    fn from(s: IntervalSet) -> Self {
        s.intervals
    }
}

impl LineSet for IntervalSet {
    fn piece_count(&self) -> usize {
        self.intervals.len()
    }
    fn piece_lo(&self, i: usize) -> &Scalar {
        &self.intervals[i].lo
    }
    fn piece_hi(&self, i: usize) -> &Scalar {
        &self.intervals[i].hi
    }
}

/// A finite set of points stored strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<Scalar>", into = "Vec<Scalar>")]
pub struct PointSet {
    points: Vec<Scalar>,
}

impl PointSet {
    pub fn new(mut points: Vec<Scalar>) -> PointSet {
        points.sort();
        points.dedup();
        PointSet { points }
    }

    pub fn points(&self) -> &[Scalar] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `{ n^-alpha : 1 <= n <= count } ∪ {0}`.
    pub fn inverse_powers(alpha: f64, count: u64) -> Result<PointSet> {
        let mut pts = Vec::with_capacity(count as usize + 1);
        pts.push(Scalar::zero());
        for n in 1..=count {
            pts.push(Scalar::inverse_power(n, alpha)?);
        }
        Ok(PointSet::new(pts))
    }

    /// `{0, 1} ∪ { 2^-n : 1 <= n <= count }`.
    pub fn dyadic_sequence(count: u32) -> PointSet {
        let mut pts = vec![Scalar::zero(), Scalar::one()];
        let half = Scalar::new(1, 2);
        pts.extend((1..=count as i32).map(|n| half.pow(n)));
        PointSet::new(pts)
    }
}

impl From<Vec<Scalar>> for PointSet {
    fn from(v: Vec<Scalar>) -> Self {
        PointSet::new(v)
    }
}

impl From<PointSet> for Vec<Scalar> {
    fn from(p: PointSet) -> Self {
        p.points
    }
}

impl LineSet for PointSet {
    fn piece_count(&self) -> usize {
        self.points.len()
    }
    fn piece_lo(&self, i: usize) -> &Scalar {
        &self.points[i]
    }
    fn piece_hi(&self, i: usize) -> &Scalar {
        &self.points[i]
    }
    fn structural_points(&self) -> Vec<Scalar> {
        self.points.clone()
    }
}

/// Either kind of set, for callers that pick the representation at run time.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum AnySet {
    Intervals { intervals: IntervalSet },
    Points { points: PointSet },
}

impl LineSet for AnySet {
    fn piece_count(&self) -> usize {
        match self {
            AnySet::Intervals { intervals } => intervals.piece_count(),
            AnySet::Points { points } => points.piece_count(),
        }
    }
    fn piece_lo(&self, i: usize) -> &Scalar {
        match self {
            AnySet::Intervals { intervals } => intervals.piece_lo(i),
            AnySet::Points { points } => points.piece_lo(i),
        }
    }
    fn piece_hi(&self, i: usize) -> &Scalar {
        match self {
            AnySet::Intervals { intervals } => intervals.piece_hi(i),
            AnySet::Points { points } => points.piece_hi(i),
        }
    }
    fn structural_points(&self) -> Vec<Scalar> {
        match self {
            AnySet::Intervals { intervals } => intervals.structural_points(),
            AnySet::Points { points } => points.structural_points(),
        }
    }
}

impl From<IntervalSet> for AnySet {
    fn from(intervals: IntervalSet) -> Self {
        AnySet::Intervals { intervals }
    }
}

impl From<PointSet> for AnySet {
    fn from(points: PointSet) -> Self {
        AnySet::Points { points }
    }
}

/// The intersection of a set with a closed interval, borrowed from the set.
pub struct Window<'a, S: LineSet + ?Sized> {
    set: &'a S,
    start: usize,
    len: usize,
    first_lo: Scalar,
    last_hi: Scalar,
}

impl<'a, S: LineSet + ?Sized> Window<'a, S> {
    /// `set ∩ [lo, hi]`; `None` when the intersection is empty.
    pub fn clip(set: &'a S, lo: &Scalar, hi: &Scalar) -> Option<Self> {
        let start = set.first_piece_reaching(lo);
        let end = set.pieces_starting_by(hi);
        if start >= end {
            return None;
        }
        let first_lo = set.piece_lo(start).max(lo).clone();
        let last_hi = set.piece_hi(end - 1).min(hi).clone();
        Some(Window { set, start, len: end - start, first_lo, last_hi })
    }

    /// `set ∩ B_radius(x)` for the closed ball.
    pub fn ball(set: &'a S, x: &Scalar, radius: &Scalar) -> Option<Self> {
        Window::clip(set, &(x - radius), &(x + radius))
    }
}

impl<S: LineSet + ?Sized> LineSet for Window<'_, S> {
    fn piece_count(&self) -> usize {
        self.len
    }
    fn piece_lo(&self, i: usize) -> &Scalar {
        if i == 0 {
            &self.first_lo
        } else {
            self.set.piece_lo(self.start + i)
        }
    }
    fn piece_hi(&self, i: usize) -> &Scalar {
        if i + 1 == self.len {
            &self.last_hi
        } else {
            self.set.piece_hi(self.start + i)
        }
    }
}
