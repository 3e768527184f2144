//! Exact numbers of the form `ln(A) / d` with `A ≥ 1` an integer and `d ≥ 1`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Equality and order compare values, so `ln(4)/2 == ln(2)`.
#[derive(Debug, Clone)]
pub struct LogRatio {
    arg: BigUint,
    denom: u64,
}

impl LogRatio {
    pub fn new(arg: impl Into<BigUint>, denom: u64) -> Result<Self> {
        let arg = arg.into();
        if arg.is_zero() || denom == 0 {
            return Err(Error::Invalid(
                "log ratio needs a positive argument and denominator".into(),
            ));
        }
        Ok(LogRatio { arg, denom })
    }

    pub fn zero() -> Self {
        LogRatio {
            arg: BigUint::one(),
            denom: 1,
        }
    }

    /// `q · ln(k)` for a rational `q = p / r ≥ 0`, i.e. `ln(k^p) / r`.
    pub fn rational_multiple(q: Ratio<u64>, k: u64) -> Result<Self> {
        let p: u32 = (*q.numer())
            .try_into()
            .map_err(|_| Error::Invalid("numerator too large for an exact power".into()))?;
        Self::new(BigUint::from(k).pow(p), *q.denom())
    }

    pub fn arg(&self) -> &BigUint {
        &self.arg
    }

    pub fn denom(&self) -> u64 {
        self.denom
    }

    pub fn is_zero(&self) -> bool {
        self.arg.is_one()
    }

    pub fn to_f64(&self) -> f64 {
        let ln = match self.arg.to_f64() {
            Some(x) if x.is_finite() => x.ln(),
            _ => {
                // ln(A) = ln(A / 2^s) + s ln 2 with A / 2^s representable
                let shift = self.arg.bits().saturating_sub(64);
                let top = (&self.arg >> shift).to_f64().unwrap_or(f64::MAX);
                top.ln() + shift as f64 * std::f64::consts::LN_2
            }
        };
        ln / self.denom as f64
    }

    /// `r` with `self = r · ln(base)`, when it is rational.
    pub fn as_log_multiple(&self, base: u64) -> Option<Ratio<u64>> {
        if base < 2 {
            return None;
        }
        if self.arg.is_one() {
            return Some(Ratio::from_integer(0));
        }
        let b = BigUint::from(base);
        let mut x = self.arg.clone();
        let mut e: u64 = 0;
        while (&x % &b).is_zero() {
            x /= &b;
            e += 1;
        }
        x.is_one().then(|| Ratio::new(e, self.denom))
    }
}

impl Ord for LogRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        // ln(A)/d1 vs ln(B)/d2  <=>  A^d2 vs B^d1
        if self.denom == other.denom {
            return self.arg.cmp(&other.arg);
        }
        let lhs = self.arg.pow(other.denom as u32);
        let rhs = other.arg.pow(self.denom as u32);
        lhs.cmp(&rhs)
    }
}

impl PartialEq for LogRatio {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LogRatio {}

impl PartialOrd for LogRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for LogRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        if self.denom == 1 {
            write!(f, "ln({})", self.arg)
        } else {
            write!(f, "ln({})/{}", self.arg, self.denom)
        }
    }
}

impl Serialize for LogRatio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LogRatio", 3)?;
        st.serialize_field("expr", &self.to_string())?;
        st.serialize_field("log_argument", &self.arg.to_string())?;
        st.serialize_field("denominator", &self.denom)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_values_compare_equal() {
        let a = LogRatio::new(8u32, 3).unwrap();
        let b = LogRatio::new(2u32, 1).unwrap();
        assert_eq!(a.cmp(&b), Ordering::Equal);
        assert_eq!(a, b);
        assert_eq!(a.as_log_multiple(2), Some(Ratio::from_integer(1)));
    }

    #[test]
    fn ordering() {
        let half_ln3 = LogRatio::rational_multiple(Ratio::new(1, 2), 3).unwrap();
        let ln2 = LogRatio::new(2u32, 1).unwrap();
        assert!(half_ln3 < ln2);
        assert!(LogRatio::zero() < half_ln3);
        assert!((half_ln3.to_f64() - 0.5 * 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn huge_arguments() {
        let big = LogRatio::new(BigUint::from(2u32).pow(5000), 5000).unwrap();
        assert!((big.to_f64() - std::f64::consts::LN_2).abs() < 1e-9);
        assert_eq!(big.as_log_multiple(2), Some(Ratio::from_integer(1)));
        assert_eq!(LogRatio::new(6u32, 1).unwrap().as_log_multiple(2), None);
    }
}
