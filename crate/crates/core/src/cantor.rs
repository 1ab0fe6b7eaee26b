//! Generalised Cantor sets: at step `k` the open middle `1 − 2c_k` of every
//! interval is removed.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ifs::{IndexedSystem, Similarity};
use crate::scalar::Scalar;
use crate::sets::{Interval, IntervalSet};

/// How `c_k` is produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RatioRule {
    Constant(Scalar),
    /// `c_k = even` when `⌊log2 k⌋` is even, `odd` otherwise.
    DyadicBlocks { even: Scalar, odd: Scalar },
    /// `c_k = ratios[(k − 1) mod len]`.
    Explicit(Vec<Scalar>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawSpec", into = "RawSpec")]
pub struct CantorSpec {
    rule: RatioRule,
    horizon: usize,
}

#[derive(Serialize, Deserialize)]
struct RawSpec {
    kind: String,
    #[serde(default)]
    ratios: Vec<Scalar>,
    horizon: usize,
}

impl TryFrom<RawSpec> for CantorSpec {
    type Error = Error;
    fn try_from(r: RawSpec) -> Result<Self> {
        let mut ratios = r.ratios;
        let rule = match r.kind.as_str() {
            "constant" => match ratios.len() {
                1 => RatioRule::Constant(ratios.pop().unwrap()),
                n => return Err(Error::Parse(format!("constant spec takes one ratio, got {n}"))),
            },
            "blocks-prop37" => match ratios.len() {
                0 => RatioRule::DyadicBlocks { even: Scalar::new(1, 3), odd: Scalar::new(1, 9) },
                2 => {
                    let odd = ratios.pop().unwrap();
                    RatioRule::DyadicBlocks { even: ratios.pop().unwrap(), odd }
                }
                n => return Err(Error::Parse(format!("block spec takes zero or two ratios, got {n}"))),
            },
            "explicit" => RatioRule::Explicit(ratios),
            other => return Err(Error::Parse(format!("unknown spec kind {other:?}"))),
        };
        CantorSpec::new(rule, r.horizon)
    }
}

impl From<CantorSpec> for RawSpec {
    fn from(s: CantorSpec) -> Self {
        let (kind, ratios) = match s.rule {
            RatioRule::Constant(c) => ("constant", vec![c]),
            RatioRule::DyadicBlocks { even, odd } => ("blocks-prop37", vec![even, odd]),
            RatioRule::Explicit(v) => ("explicit", v),
        };
        RawSpec { kind: kind.into(), ratios, horizon: s.horizon }
    }
}

fn check_ratio(c: &Scalar) -> Result<()> {
    if !c.is_positive() || c >= &Scalar::new(1, 2) {
        return Err(Error::RatioOutOfRange(c.to_string()));
    }
    Ok(())
}

impl CantorSpec {
    pub fn new(rule: RatioRule, horizon: usize) -> Result<Self> {
        match &rule {
            RatioRule::Constant(c) => check_ratio(c)?,
            RatioRule::DyadicBlocks { even, odd } => {
                check_ratio(even)?;
                check_ratio(odd)?;
            }
            RatioRule::Explicit(v) => {
                if v.is_empty() {
                    return Err(Error::EmptyRatios);
                }
                v.iter().try_for_each(check_ratio)?;
            }
        }
        Ok(CantorSpec { rule, horizon })
    }

    pub fn constant(c: Scalar, horizon: usize) -> Result<Self> {
        CantorSpec::new(RatioRule::Constant(c), horizon)
    }

    pub fn rule(&self) -> &RatioRule {
        &self.rule
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `c_k` for `1 ≤ k ≤ horizon`.
    pub fn ratio(&self, k: usize) -> Result<Scalar> {
        if k == 0 || k > self.horizon {
            return Err(Error::HorizonExceeded { requested: k, horizon: self.horizon });
        }
        Ok(self.ratio_unchecked(k))
    }

    fn ratio_unchecked(&self, k: usize) -> Scalar {
        match &self.rule {
            RatioRule::Constant(c) => c.clone(),
            RatioRule::DyadicBlocks { even, odd } => {
                if k.ilog2().is_multiple_of(2) {
                    even.clone()
                } else {
                    odd.clone()
                }
            }
            RatioRule::Explicit(v) => v[(k - 1) % v.len()].clone(),
        }
    }

    fn check_range(&self, k: usize, n: usize) -> Result<()> {
        if k + n > self.horizon {
            return Err(Error::HorizonExceeded { requested: k + n, horizon: self.horizon });
        }
        Ok(())
    }
}

/// The block rule: `c_k = 1/3` on `[4^{m−1}, 2·4^{m−1})` and `1/9` elsewhere.
pub fn prop37_spec(horizon: usize) -> CantorSpec {
    CantorSpec::new(RatioRule::DyadicBlocks { even: Scalar::new(1, 3), odd: Scalar::new(1, 9) }, horizon)
        .expect("block ratios are admissible")
}

/// Replace each `[a, b]` by `[a, a + λ(b − a)] ∪ [b − λ(b − a), b]`.
pub fn gen_step(c: &IntervalSet, lambda: &Scalar) -> Result<IntervalSet> {
    check_ratio(lambda)?;
    let mut out = Vec::with_capacity(2 * c.len());
    for iv in c.intervals() {
        let cut = lambda * iv.length();
        out.push(Interval::new_unchecked(iv.lo().clone(), iv.lo() + &cut));
        out.push(Interval::new_unchecked(iv.hi() - &cut, iv.hi().clone()));
    }
    Ok(IntervalSet::normalize(out))
}

/// `C^k_n`: apply `gen_step` with `c_{k+1}, …, c_{k+n}` to `[0, 1]`.
pub fn cantor_prefractal(spec: &CantorSpec, k: usize, n: usize) -> Result<IntervalSet> {
    spec.check_range(k, n)?;
    let mut c = IntervalSet::unit();
    for j in k + 1..=k + n {
        c = gen_step(&c, &spec.ratio_unchecked(j))?;
    }
    Ok(c)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiProduct {
    pub k: usize,
    pub n: usize,
    pub value: Scalar,
}

/// `π(k, n) = c_{k+1} ⋯ c_{k+n}`.
pub fn pi_product(spec: &CantorSpec, k: usize, n: usize) -> Result<PiProduct> {
    spec.check_range(k, n)?;
    let value = (k + 1..=k + n).map(|j| spec.ratio_unchecked(j)).product();
    Ok(PiProduct { k, n, value })
}

/// `s_n = n·log 2 / log(1/π(k, n))` for `n = 1..=n_max`.
pub fn cantor_box_sequence(spec: &CantorSpec, k: usize, n_max: usize) -> Result<Vec<(usize, f64)>> {
    spec.check_range(k, n_max)?;
    let mut out = Vec::with_capacity(n_max);
    let mut pi = Scalar::one();
    for n in 1..=n_max {
        pi = pi * spec.ratio_unchecked(k + n);
        out.push((n, n as f64 * std::f64::consts::LN_2 / -pi.ln()));
    }
    Ok(out)
}

/// Level `k` holds `x ↦ c_k x` and `x ↦ c_k x + 1 − c_k`.
///
/// Constant and explicit rules give cyclic systems; block rules are
/// materialised up to the horizon.
pub fn cantor_to_ifs(spec: &CantorSpec) -> IndexedSystem {
    let pair = |c: Scalar| {
        let right = Scalar::one() - &c;
        vec![
            Similarity::new(c.clone(), Scalar::zero(), 1).expect("c in (0, 1/2)"),
            Similarity::new(c, right, 1).expect("c in (0, 1/2)"),
        ]
    };
    let (levels, cyclic) = match &spec.rule {
        RatioRule::Constant(c) => (vec![pair(c.clone())], true),
        RatioRule::Explicit(v) => (v.iter().cloned().map(pair).collect(), true),
        RatioRule::DyadicBlocks { .. } => ((1..=spec.horizon).map(|k| pair(spec.ratio_unchecked(k))).collect(), false),
    };
    IndexedSystem::new(levels, cyclic).expect("levels are non-empty")
}
