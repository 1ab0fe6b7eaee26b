#![allow(dead_code)]

use fracdim::{IndexedSystem, Interval, IntervalSet, PointSet, Scalar, Similarity};
use proptest::prelude::*;

pub fn q(p: i64, d: i64) -> Scalar {
    Scalar::new(p, d)
}

/// Rationals in `[0, 1]` with small denominators.
pub fn unit_scalar() -> impl Strategy<Value = Scalar> {
    (1i64..=24).prop_flat_map(|d| (0..=d).prop_map(move |p| q(p, d)))
}

pub fn positive_scale() -> impl Strategy<Value = Scalar> {
    (1i64..=12, 2i64..=60).prop_map(|(p, d)| q(p, d))
}

pub fn point_set(max_len: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(unit_scalar(), 1..=max_len).prop_map(PointSet::new)
}

pub fn interval() -> impl Strategy<Value = Interval> {
    (unit_scalar(), unit_scalar()).prop_map(|(a, b)| {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        Interval::new(lo, hi).unwrap()
    })
}

pub fn interval_set(max_len: usize) -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec(interval(), 1..=max_len).prop_map(IntervalSet::normalize)
}

pub fn similarity() -> impl Strategy<Value = Similarity> {
    (2i64..=6, unit_scalar(), prop::bool::ANY)
        .prop_map(|(m, b, flip)| Similarity::new(q(1, m), b, if flip { -1 } else { 1 }).unwrap())
}

pub fn system(max_levels: usize, cyclic: bool) -> impl Strategy<Value = IndexedSystem> {
    prop::collection::vec(prop::collection::vec(similarity(), 1..=3), 1..=max_levels)
        .prop_map(move |levels| IndexedSystem::new(levels, cyclic).unwrap())
}

/// Maps of `[0, 1]` into itself whose images overlap at most in endpoints, so the unit
/// open interval is a feasible open set.
pub fn separated_level() -> impl Strategy<Value = Vec<Similarity>> {
    prop::collection::vec((3i64..=7, prop::bool::ANY), 2..=3).prop_map(|spec| {
        let n = spec.len() as i64;
        let ratios: Vec<Scalar> = spec.iter().map(|(m, _)| q(1, *m)).collect();
        let total: Scalar = ratios.iter().cloned().sum();
        let gap = (Scalar::one() - total) / Scalar::from_integer(n - 1);
        let mut start = Scalar::zero();
        let mut maps = Vec::new();
        for (r, (_, flip)) in ratios.into_iter().zip(spec) {
            let (offset, o) = if flip { (&start + &r, -1) } else { (start.clone(), 1) };
            start = &start + &r + &gap;
            maps.push(Similarity::new(r, offset, o).unwrap());
        }
        maps
    })
}
