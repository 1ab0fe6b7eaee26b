//! JSON inputs: sets, systems, open sets.

use std::path::Path;

use anyhow::{bail, Context, Result};
use fracdim::cantor::cantor_prefractal;
use fracdim::ifs::compose_chain;
use fracdim::{AnySet, CantorSpec, IndexedSystem, IntervalSet, OpenSet, PointSet};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

/// Deepest prefractal or chain the CLI will build.
pub const MAX_DEPTH: usize = 24;
/// Largest generated point sequence.
pub const MAX_POINTS: u64 = 1_000_000;

/// A set given directly or by a generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SetSpec {
    Intervals { intervals: IntervalSet },
    Points { points: PointSet },
    /// `{0} ∪ {n^-alpha : 1 ≤ n ≤ count}`.
    FAlpha { alpha: f64, count: u64 },
    /// `{0, 1} ∪ {2^-n : 1 ≤ n ≤ count}`.
    Prop38 { count: u32 },
    /// The prefractal `C^k_depth`.
    Cantor {
        spec: CantorSpec,
        #[serde(default)]
        k: usize,
        depth: usize,
    },
    /// `S^{k,k+depth}(seed)`, seed `[0, 1]` by default.
    Attractor {
        system: IndexedSystem,
        #[serde(default)]
        k: usize,
        depth: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<IntervalSet>,
    },
}

pub fn check_depth(depth: usize) -> Result<()> {
    if depth > MAX_DEPTH {
        bail!("depth {depth} exceeds the limit {MAX_DEPTH}");
    }
    Ok(())
}

impl SetSpec {
    pub fn build(&self) -> Result<AnySet> {
        Ok(match self {
            SetSpec::Intervals { intervals } => intervals.clone().into(),
            SetSpec::Points { points } => points.clone().into(),
            SetSpec::FAlpha { alpha, count } => {
                if *count > MAX_POINTS {
                    bail!("count {count} exceeds the limit {MAX_POINTS}");
                }
                PointSet::inverse_powers(*alpha, *count)?.into()
            }
            SetSpec::Prop38 { count } => {
                if u64::from(*count) > MAX_POINTS {
                    bail!("count {count} exceeds the limit {MAX_POINTS}");
                }
                PointSet::dyadic_sequence(*count).into()
            }
            SetSpec::Cantor { spec, k, depth } => {
                check_depth(*depth)?;
                cantor_prefractal(spec, *k, *depth)?.into()
            }
            SetSpec::Attractor { system, k, depth, seed } => {
                check_depth(*depth)?;
                let seed = seed.clone().unwrap_or_else(IntervalSet::unit);
                compose_chain(system, *k, k + depth, &seed)?.into()
            }
        })
    }
}

/// One open set for every level, or a list used level by level.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OpenSets {
    One(OpenSet),
    PerLevel(Vec<OpenSet>),
}

impl OpenSets {
    pub fn into_vec(self) -> Vec<OpenSet> {
        match self {
            OpenSets::One(u) => vec![u],
            OpenSets::PerLevel(v) => v,
        }
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_set(path: &Path) -> Result<AnySet> {
    read_json::<SetSpec>(path)?.build()
}
