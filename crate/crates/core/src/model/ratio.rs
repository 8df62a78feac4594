use std::fmt;
use std::str::FromStr;

use num_rational::Ratio as Rational;

use crate::error::{Error, Result};

/// Exact rational number kept in lowest terms with a positive denominator.
///
/// Used for selection ratios and the max-min ratio. Comparisons are exact.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Ratio(Rational<i64>);

impl Ratio {
    pub fn new(numer: i64, denom: i64) -> Result<Self> {
        if denom == 0 {
            return Err(Error::InvalidRatio(format!("{numer}/0")));
        }
        Ok(Ratio(Rational::new(numer, denom)))
    }

    pub fn zero() -> Self {
        Ratio(Rational::from_integer(0))
    }

    pub fn one() -> Self {
        Ratio(Rational::from_integer(1))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    /// `⌊self · n⌋` for a non-negative ratio.
    pub fn floor_mul(&self, n: usize) -> usize {
        let p = self.numer() as i128 * n as i128;
        p.div_euclid(self.denom() as i128).max(0) as usize
    }

    /// `⌈self · n⌉` for a non-negative ratio.
    pub fn ceil_mul(&self, n: usize) -> usize {
        let p = self.numer() as i128 * n as i128;
        let q = self.denom() as i128;
        (-((-p).div_euclid(q))).max(0) as usize
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidRatio(s.to_string());
        let (n, d) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s.trim(), "1"),
        };
        let n: i64 = n.parse().map_err(|_| bad())?;
        let d: i64 = d.parse().map_err(|_| bad())?;
        Ratio::new(n, d)
    }
}

/// A ratio extended with the two infinities used by the general selection ratio.
///
/// Variant order gives `NegInf < Finite(_) < PosInf`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum ExtRatio {
    NegInf,
    Finite(Ratio),
    PosInf,
}

impl fmt::Display for ExtRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRatio::NegInf => f.write_str("-inf"),
            ExtRatio::Finite(r) => r.fmt(f),
            ExtRatio::PosInf => f.write_str("+inf"),
        }
    }
}

/// Fraction of a group that is selected, `matched / group_size`.
pub fn selection_ratio(matched_in_group: usize, group_size: usize) -> Result<Ratio> {
    if group_size == 0 {
        return Err(Error::EmptyGroup);
    }
    if matched_in_group > group_size {
        return Err(Error::InvalidRatio(format!(
            "{matched_in_group} selected out of a group of {group_size}"
        )));
    }
    Ratio::new(matched_in_group as i64, group_size as i64)
}

/// Selection ratio relative to a lower and an upper target.
///
/// `(matched - lower) / (upper - lower)` when the targets differ; when they
/// coincide the ratio degenerates to `-inf` below the target and `+inf` at or
/// above it.
pub fn general_selection_ratio(matched: usize, upper: usize, lower: usize) -> Result<ExtRatio> {
    if upper < lower {
        return Err(Error::InvalidBounds { upper, lower });
    }
    if upper == lower {
        return Ok(if matched < upper {
            ExtRatio::NegInf
        } else {
            ExtRatio::PosInf
        });
    }
    let numer = matched as i64 - lower as i64;
    let denom = (upper - lower) as i64;
    Ok(ExtRatio::Finite(Ratio::new(numer, denom)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Ratio {
        Ratio::new(n, d).unwrap()
    }

    #[test]
    fn selection_ratio_examples() {
        assert_eq!(selection_ratio(25, 50).unwrap(), r(1, 2));
        assert_eq!(selection_ratio(0, 7).unwrap(), r(0, 1));
        assert_eq!(selection_ratio(3, 3).unwrap(), r(1, 1));
        assert!(matches!(selection_ratio(0, 0), Err(Error::EmptyGroup)));
        assert!(selection_ratio(4, 3).is_err());
    }

    #[test]
    fn general_ratio_examples() {
        assert_eq!(
            general_selection_ratio(25, 50, 0).unwrap(),
            ExtRatio::Finite(r(1, 2))
        );
        assert_eq!(general_selection_ratio(3, 5, 5).unwrap(), ExtRatio::NegInf);
        assert_eq!(general_selection_ratio(5, 5, 5).unwrap(), ExtRatio::PosInf);
        assert!(matches!(
            general_selection_ratio(1, 2, 3),
            Err(Error::InvalidBounds { .. })
        ));
        // below the lower target the ratio goes negative
        assert_eq!(
            general_selection_ratio(1, 6, 2).unwrap(),
            ExtRatio::Finite(r(-1, 4))
        );
    }

    #[test]
    fn lowest_terms_and_display() {
        let x = r(10, 20);
        assert_eq!((x.numer(), x.denom()), (1, 2));
        assert_eq!(x.to_string(), "1/2");
        assert_eq!(Ratio::zero().to_string(), "0/1");
        assert_eq!(r(3, -6).to_string(), "-1/2");
        assert_eq!("4/8".parse::<Ratio>().unwrap(), r(1, 2));
        assert!("1/0".parse::<Ratio>().is_err());
    }

    #[test]
    fn floor_and_ceil() {
        let x = r(2, 5);
        assert_eq!(x.floor_mul(3), 1);
        assert_eq!(x.ceil_mul(3), 2);
        assert_eq!(x.floor_mul(5), 2);
        assert_eq!(x.ceil_mul(5), 2);
        assert_eq!(Ratio::zero().ceil_mul(9), 0);
        assert_eq!(Ratio::one().ceil_mul(9), 9);
    }

    #[test]
    fn ext_order() {
        assert!(ExtRatio::NegInf < ExtRatio::Finite(r(-100, 1)));
        assert!(ExtRatio::Finite(r(100, 1)) < ExtRatio::PosInf);
    }
}
