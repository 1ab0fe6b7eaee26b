//! Exact covering numbers and dimension estimates for generalised Cantor sets
//! and attractors of non-autonomous iterated function systems on the line.
//!
//! All geometry is done in exact rational arithmetic ([`Scalar`]). Floats
//! appear only once counts are turned into log-log slopes or when the Moran
//! exponent enters as a power.

pub mod cantor;
pub mod covers;
pub mod dims;
pub mod equihom;
pub mod error;
pub mod hausdorff;
pub mod ifs;
pub mod scalar;
pub mod sets;


pub use cantor::{CantorSpec, PiProduct, RatioRule};
pub use covers::CoverCount;
pub use dims::{DimensionReport, LocalCoverProfile, ProfileRow, ScaleGrid};
pub use equihom::{EquihomReport, RegularityReport, Verdict};


pub use error::{Error, Result};
pub use ifs::{IndexedSystem, MoranCertificate, OpenSet, Similarity, Word};
pub use hausdorff::{hausdorff_distance, hausdorff_semidistance};

pub use scalar::Scalar;
pub use sets::{AnySet, Interval, IntervalSet, LineSet, PointSet, Window};

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}
