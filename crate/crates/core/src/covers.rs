//! Exact covering and packing numbers with closed balls centred in the set.
//!
//! In one dimension the greedy sweep is optimal for both problems, so every
//! count here is the true minimum (or maximum) together with a witness.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sets::{partition_point, LineSet, PointSet, Window};

/// Largest point set the brute-force oracle accepts.
pub const BRUTEFORCE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverCount {
    pub count: usize,
    pub centers: Vec<Scalar>,
}

fn check_scale(delta: &Scalar) -> Result<()> {
    if !delta.is_positive() {
        return Err(Error::NonPositiveScale(delta.to_string()));
    }
    Ok(())
}

/// Minimum number of closed `delta`-balls centred in `F` that cover `F`.
pub fn covering_number<F: LineSet + ?Sized>(f: &F, delta: &Scalar) -> Result<CoverCount> {
    if f.is_empty() {
        return Err(Error::EmptySet);
    }
    check_scale(delta)?;
    Ok(greedy_cover(f, delta))
}

pub(crate) fn greedy_cover<F: LineSet + ?Sized>(f: &F, delta: &Scalar) -> CoverCount {
    let n = f.piece_count();
    let mut centers = Vec::new();
    // `p` is the infimum of what is still uncovered; it lies in piece `i` or at its left end.
    let mut p = f.piece_lo(0).clone();
    loop {
        let reach = &p + delta;
        let j = f.pieces_starting_by(&reach) - 1;
        let c = f.piece_hi(j).min(&reach).clone();
        let covered_to = &c + delta;
        centers.push(c);
        let k = partition_point(n, |i| f.piece_hi(i) <= &covered_to);
        if k == n {
            break;
        }
        p = f.piece_lo(k).max(&covered_to).clone();
    }
    CoverCount { count: centers.len(), centers }
}

/// Maximum number of pairwise disjoint closed `delta`-balls centred in `F`.
///
/// Disjoint closed balls need centres more than `2·delta` apart. When the next
/// admissible centre would be the open end of an interval the sweep carries
/// it symbolically as `value + e·η` and fixes a concrete `η` at the end.
pub fn packing_number<F: LineSet + ?Sized>(f: &F, delta: &Scalar) -> Result<CoverCount> {
    if f.is_empty() {
        return Err(Error::EmptySet);
    }
    check_scale(delta)?;
    let n = f.piece_count();
    let two_delta = delta + delta;
    // (value, infinitesimal multiplier, piece index)
    let mut picks: Vec<(Scalar, u64, usize)> = vec![(f.piece_lo(0).clone(), 0, 0)];
    loop {
        let (v, e, _) = picks.last().unwrap();
        let threshold = v + &two_delta;
        let k = partition_point(n, |i| f.piece_hi(i) <= &threshold);
        if k == n {
            break;
        }
        let next = if f.piece_lo(k) > &threshold {
            (f.piece_lo(k).clone(), 0, k)
        } else {
            (threshold, e + 1, k)
        };
        picks.push(next);
    }

    let max_e = picks.iter().map(|p| p.1).max().unwrap_or(0);
    let centers = if max_e == 0 {
        picks.into_iter().map(|p| p.0).collect()
    } else {
        let mut slack: Option<Scalar> = None;
        let mut tighten = |s: Scalar| {
            if slack.as_ref().is_none_or(|cur| &s < cur) {
                slack = Some(s);
            }
        };
        for (v, e, k) in &picks {
            if *e > 0 {
                tighten(f.piece_hi(*k) - v);
            }
        }
        for w in picks.windows(2) {
            let gap = &w[1].0 - &w[0].0 - &two_delta;
            if gap.is_positive() {
                tighten(gap);
            }
        }
        let eta = slack.unwrap() / Scalar::from_integer(max_e as i64 + 2);
        picks.into_iter().map(|(v, e, _)| v + &eta * Scalar::from_integer(e as i64)).collect::<Vec<_>>()
    };
    debug_assert!(centers.windows(2).all(|w| &w[1] - &w[0] > two_delta));
    debug_assert!(centers.iter().all(|c| f.contains(c)));
    Ok(CoverCount { count: centers.len(), centers })
}

/// `N(B_delta(x) ∩ F, rho)` with centres constrained to the intersection.
pub fn local_covering_number<F: LineSet + ?Sized>(
    f: &F,
    x: &Scalar,
    delta: &Scalar,
    rho: &Scalar,
) -> Result<CoverCount> {
    check_scale(rho)?;
    if rho >= delta {
        return Err(Error::ScaleOrderViolation(format!("rho {rho} must be below delta {delta}")));
    }
    if !f.contains(x) {
        return Err(Error::CenterNotInSet(x.to_string()));
    }
    Ok(local_cover_unchecked(f, x, delta, rho))
}

/// Local cover without validating `x ∈ F` or the scale order. `x` must lie in `F`.
pub(crate) fn local_cover_unchecked<F: LineSet + ?Sized>(
    f: &F,
    x: &Scalar,
    delta: &Scalar,
    rho: &Scalar,
) -> CoverCount {
    let window = Window::ball(f, x, delta).expect("centre lies in the set");
    greedy_cover(&window, rho)
}

/// Exact minimum by dynamic programming over the sorted points.
///
/// The leftmost uncovered point `p_i` is covered by a ball centred at some
/// `p_j` with `p_i ≤ p_j ≤ p_i + delta`; every such choice is tried.
pub fn covering_number_bruteforce(f: &PointSet, delta: &Scalar) -> Result<CoverCount> {
    if f.len() > BRUTEFORCE_LIMIT {
        return Err(Error::TooLarge { limit: BRUTEFORCE_LIMIT, got: f.len() });
    }
    if f.is_empty() {
        return Err(Error::EmptySet);
    }
    check_scale(delta)?;
    let pts = f.points();
    let n = pts.len();
    // best[i] = (count, chosen centre index) for covering pts[i..].
    let mut best: Vec<(usize, usize)> = vec![(0, 0); n + 1];
    for i in (0..n).rev() {
        let mut choice = (usize::MAX, i);
        for j in i..n {
            if &pts[j] - &pts[i] > *delta {
                break;
            }
            let reach = &pts[j] + delta;
            let next = (j..n).find(|&t| pts[t] > reach).unwrap_or(n);
            let cost = 1 + best[next].0;
            if cost < choice.0 {
                choice = (cost, j);
            }
        }
        best[i] = choice;
    }
    let mut centers = Vec::new();
    let mut i = 0;
    while i < n {
        let j = best[i].1;
        centers.push(pts[j].clone());
        let reach = &pts[j] + delta;
        i = (j..n).find(|&t| pts[t] > reach).unwrap_or(n);
    }
    Ok(CoverCount { count: best[0].0, centers })
}

/// `N(F, 2δ) ≤ P(F, δ) ≤ N(F, δ)`, with `P(F, δ)` the packing by disjoint closed `δ`-balls.
///
/// The chain is sometimes stated as `N(F,2δ) ≤ P(F,2δ) ≤ N(F,δ)` with `P(F,2δ)`
/// read as a maximal `2δ`-separated set, which is the same packing. Taken
/// literally with disjoint `2δ`-balls the left inequality fails, e.g. for
/// `{0, 1/2, 1}` at `δ = 3/20`.
pub fn verify_cover_packing_sandwich<F: LineSet + ?Sized>(f: &F, delta: &Scalar) -> Result<bool> {
    let n2 = covering_number(f, &(delta + delta))?.count;
    let p = packing_number(f, delta)?.count;
    let n1 = covering_number(f, delta)?.count;
    Ok(n2 <= p && p <= n1)
}

/// `N(B_δ(x)∩F, ρ) ≤ N(B_δ(x)∩F, r) · sup_y N(B_r(y)∩F, ρ)`.
///
/// The supremum runs over the structural points of `F` together with the
/// centres of the optimal `r`-cover of `B_δ(x)∩F`.
pub fn verify_refinement<F: LineSet + ?Sized>(
    f: &F,
    x: &Scalar,
    delta: &Scalar,
    r: &Scalar,
    rho: &Scalar,
) -> Result<bool> {
    for s in [delta, r, rho] {
        check_scale(s)?;
    }
    if !f.contains(x) {
        return Err(Error::CenterNotInSet(x.to_string()));
    }
    if rho >= delta {
        return Ok(true);
    }
    let lhs = local_cover_unchecked(f, x, delta, rho).count;
    let r_cover = local_cover_unchecked(f, x, delta, r);
    let mut candidates = f.structural_points();
    candidates.extend(r_cover.centers.iter().cloned());
    let sup = crate::par_map(&candidates, |y| local_cover_unchecked(f, y, r, rho).count)
        .into_iter()
        .max()
        .unwrap_or(1);
    Ok(lhs <= r_cover.count * sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sets::IntervalSet;

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::new(p, d)
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

    fn pts(v: &[(i64, i64)]) -> PointSet {
        PointSet::new(v.iter().map(|&(a, b)| q(a, b)).collect())
    }

    #[test]
    fn unit_interval_quarter() {
        let c = covering_number(&IntervalSet::unit(), &q(1, 4)).unwrap();
        assert_eq!(c.count, 2);
        assert_eq!(c.centers, vec![q(1, 4), q(3, 4)]);
    }

    #[test]
    fn second_stage_at_one_ninth() {
        let c = covering_number(&c2(), &q(1, 9)).unwrap();
        assert_eq!(c.count, 4);
    }

    #[test]
    fn two_points_one_ball() {
        assert_eq!(covering_number(&pts(&[(0, 1), (1, 1)]), &q(2, 1)).unwrap().count, 1);
    }

    #[test]
    fn bad_inputs() {
        assert_eq!(covering_number(&IntervalSet::empty(), &q(1, 2)), Err(Error::EmptySet));
        assert!(matches!(covering_number(&IntervalSet::unit(), &q(0, 1)), Err(Error::NonPositiveScale(_))));
        assert!(matches!(packing_number(&IntervalSet::unit(), &q(-1, 2)), Err(Error::NonPositiveScale(_))));
    }

    #[test]
    fn packing_examples() {
        let p = packing_number(&IntervalSet::unit(), &q(1, 4)).unwrap();
        assert_eq!(p.count, 2);
        assert_eq!(p.centers[0], q(0, 1));
        assert!(p.centers[1] > q(1, 2) && p.centers[1] <= q(1, 1));
        assert_eq!(packing_number(&pts(&[(0, 1), (1, 1)]), &q(1, 2)).unwrap().count, 1);
        assert_eq!(packing_number(&pts(&[(0, 1), (1, 1)]), &q(1, 4)).unwrap().count, 2);
    }

    #[test]
    fn packing_with_several_open_picks() {
        // [0,1] at δ = 1/10: centres 0, 1/5+η, 2/5+2η, 3/5+3η, 4/5+4η.
        let p = packing_number(&IntervalSet::unit(), &q(1, 10)).unwrap();
        assert_eq!(p.count, 5);
        for w in p.centers.windows(2) {
            assert!(&w[1] - &w[0] > q(1, 5));
        }
        assert!(p.centers.iter().all(|c| c >= &q(0, 1) && c <= &q(1, 1)));
    }

    #[test]
    fn local_examples() {
        let c = local_covering_number(&c2(), &q(0, 1), &q(1, 3), &q(1, 9)).unwrap();
        assert_eq!(c.count, 2);
        assert_eq!(c.centers, vec![q(1, 9), q(1, 3)]);
        let isolated = pts(&[(0, 1), (5, 1)]);
        assert_eq!(local_covering_number(&isolated, &q(5, 1), &q(1, 1), &q(1, 2)).unwrap().count, 1);
        let seq = PointSet::dyadic_sequence(20);
        assert_eq!(local_covering_number(&seq, &q(1, 1), &q(1, 4), &q(1, 1000)).unwrap().count, 1);
    }

    #[test]
    fn local_errors() {
        let u = IntervalSet::unit();
        assert!(matches!(
            local_covering_number(&u, &q(1, 2), &q(1, 4), &q(1, 4)),
            Err(Error::ScaleOrderViolation(_))
        ));
        assert!(matches!(local_covering_number(&c2(), &q(1, 2), &q(1, 4), &q(1, 8)), Err(Error::CenterNotInSet(_))));
    }

    #[test]
    fn bruteforce_examples() {
        let c = covering_number_bruteforce(&pts(&[(0, 1), (1, 2), (1, 1)]), &q(1, 2)).unwrap();
        assert_eq!((c.count, c.centers), (1, vec![q(1, 2)]));
        assert_eq!(covering_number_bruteforce(&pts(&[(0, 1), (1, 1)]), &q(1, 4)).unwrap().count, 2);
        assert_eq!(covering_number_bruteforce(&pts(&[(0, 1)]), &q(7, 1)).unwrap().count, 1);
        let big = PointSet::new((0..25).map(Scalar::from_integer).collect());
        assert_eq!(covering_number_bruteforce(&big, &q(1, 1)), Err(Error::TooLarge { limit: 24, got: 25 }));
    }

    #[test]
    fn sandwich_examples() {
        let u = IntervalSet::unit();
        assert_eq!(covering_number(&u, &q(1, 4)).unwrap().count, 2);
        assert_eq!(packing_number(&u, &q(1, 4)).unwrap().count, 2);
        assert_eq!(covering_number(&u, &q(1, 8)).unwrap().count, 4);
        assert!(verify_cover_packing_sandwich(&u, &q(1, 8)).unwrap());
        assert!(verify_cover_packing_sandwich(&pts(&[(0, 1)]), &q(1, 3)).unwrap());
        assert!(verify_cover_packing_sandwich(&c2(), &q(1, 9)).unwrap());
    }

    #[test]
    fn literal_double_radius_packing_breaks_the_chain() {
        let f = pts(&[(0, 1), (1, 2), (1, 1)]);
        let delta = q(3, 20);
        let two = &delta + &delta;
        assert_eq!(covering_number(&f, &two).unwrap().count, 3);
        assert_eq!(packing_number(&f, &two).unwrap().count, 2);
        assert_eq!(packing_number(&f, &delta).unwrap().count, 3);
        assert!(verify_cover_packing_sandwich(&f, &delta).unwrap());
    }

    #[test]
    fn refinement_examples() {
        assert!(verify_refinement(&c2(), &q(0, 1), &q(1, 3), &q(1, 6), &q(1, 27)).unwrap());
        assert!(verify_refinement(&IntervalSet::unit(), &q(1, 2), &q(1, 2), &q(1, 4), &q(1, 8)).unwrap());
        assert!(verify_refinement(&IntervalSet::unit(), &q(1, 2), &q(1, 8), &q(1, 16), &q(1, 4)).unwrap());
    }
}
