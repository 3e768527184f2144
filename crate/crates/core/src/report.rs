//! Serialization helpers shared by report types.

use num_rational::Ratio;
use serde::Serializer;

/// Rationals serialize as `"p/q"` strings so reports stay exact.
pub fn ratio<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_ratio(r))
}

pub fn opt_ratio<S: Serializer>(r: &Option<Ratio<u64>>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => ratio(r, s),
        None => s.serialize_none(),
    }
}

pub fn format_ratio(r: &Ratio<u64>) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_ratio(text: &str) -> Option<Ratio<u64>> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let q: u64 = q.trim().parse().ok()?;
            (q != 0).then_some(())?;
            Some(Ratio::new(p.trim().parse().ok()?, q))
        }
        None => Some(Ratio::from_integer(text.parse().ok()?)),
    }
}
