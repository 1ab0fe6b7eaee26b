//! Scale grids on the command line: `2^-4..2^-12`, `1/4,1/8,3^-5` or a single value.

use anyhow::{bail, Context, Result};
use fracdim::Scalar;

fn parse_term(s: &str) -> Result<Scalar> {
    let s = s.trim();
    match s.split_once('^') {
        Some((base, exp)) => {
            let base: Scalar = base.trim().parse().with_context(|| format!("bad base in {s:?}"))?;
            let exp: i32 = exp.trim().parse().with_context(|| format!("bad exponent in {s:?}"))?;
            if base.is_zero() {
                bail!("zero base in {s:?}");
            }
            Ok(base.pow(exp))
        }
        None => s.parse().with_context(|| format!("bad rational {s:?}")),
    }
}

fn split_power(s: &str) -> Result<(Scalar, i32)> {
    let (base, exp) = s.trim().split_once('^').with_context(|| format!("range ends must be powers, got {s:?}"))?;
    Ok((base.trim().parse()?, exp.trim().parse()?))
}

/// Parse a grid. Ranges step the exponent by one in the direction written.
pub fn parse_grid(s: &str) -> Result<Vec<Scalar>> {
    if let Some((a, b)) = s.split_once("..") {
        let (base, from) = split_power(a)?;
        let (base_b, to) = split_power(b)?;
        if base != base_b {
            bail!("range {s:?} mixes bases {base} and {base_b}");
        }
        if base.is_zero() {
            bail!("zero base in {s:?}");
        }
        let exps: Vec<i32> = if from <= to { (from..=to).collect() } else { (to..=from).rev().collect() };
        return Ok(exps.into_iter().map(|e| base.pow(e)).collect());
    }
    let out = s.split(',').filter(|t| !t.trim().is_empty()).map(parse_term).collect::<Result<Vec<_>>>()?;
    if out.is_empty() {
        bail!("empty grid");
    }
    Ok(out)
}

pub fn parse_scalar(s: &str) -> Result<Scalar> {
    parse_term(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        let g = parse_grid("2^-1..2^-3").unwrap();
        assert_eq!(g, vec![Scalar::new(1, 2), Scalar::new(1, 4), Scalar::new(1, 8)]);
        let g = parse_grid("1/4, 3^-1,5").unwrap();
        assert_eq!(g, vec![Scalar::new(1, 4), Scalar::new(1, 3), Scalar::from_integer(5)]);
        assert_eq!(parse_grid("3^-4..3^-2").unwrap()[0], Scalar::new(1, 81));
        assert!(parse_grid("2^-1..3^-4").is_err());
        assert!(parse_grid("").is_err());
        assert!(parse_grid("x").is_err());
        assert!(parse_grid("0^-1").is_err());
    }
}
