//! Hausdorff semi-distance and distance between finite unions of closed intervals.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sets::LineSet;

/// `sup_{a∈A} inf_{b∈B} |a − b|`, exact.
///
/// On each piece of `A` the distance to `B` is piecewise linear, so the
/// supremum sits at a piece endpoint or at the midpoint of a gap of `B`
/// that lies inside `A`. Only those candidates are evaluated.
pub fn hausdorff_semidistance<A, B>(a: &A, b: &B) -> Result<Scalar>
where
    A: LineSet + ?Sized,
    B: LineSet + ?Sized,
{
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut best = Scalar::zero();
    for i in 0..a.piece_count() {
        for end in [a.piece_lo(i), a.piece_hi(i)] {
            let d = b.distance_to(end);
            if d > best {
                best = d;
            }
        }
    }
    for j in 1..b.piece_count() {
        let (left, right) = (b.piece_hi(j - 1), b.piece_lo(j));
        let half_gap = (right - left) / Scalar::from_integer(2);
        if half_gap <= best {
            continue;
        }
        if a.contains(&left.midpoint(right)) {
            best = half_gap;
        }
    }
    Ok(best)
}

/// Symmetric Hausdorff distance.
pub fn hausdorff_distance<A, B>(a: &A, b: &B) -> Result<Scalar>
where
    A: LineSet + ?Sized,
    B: LineSet + ?Sized,
{
    let ab = hausdorff_semidistance(a, b)?;
    let ba = hausdorff_semidistance(b, a)?;
    Ok(ab.max(ba))
}
