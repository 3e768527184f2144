//! End-to-end runs on the system `X_{a-1}` of configurations over `F_2` that are
//! constant along every coset `t<a>`.

use num_rational::Ratio;
use serde::Serialize;

use crate::cover::{
    cover_from_tuples, entropy_lower_from_density, naive_entropy_upper, OpenCover, Region,
};
use crate::error::{Error, Result};
use crate::family::{Family, SetTuple};
use crate::group::{FiniteSubset, GroupElement, GroupSpec};
use crate::independence::{density_upper_estimate, family_ratio, max_independence_subset};
use crate::logratio::LogRatio;
use crate::ring::GroupRingElement;
use crate::subshift::{Alphabet, ShiftSystem};

/// `X_{a-1}` over `Z/n`: `x_{ta} = x_t` for every `t`.
pub fn xa1_system(n: u8) -> Result<ShiftSystem> {
    if n < 2 {
        return Err(Error::Precondition("the modulus must be at least 2".into()));
    }
    let group = GroupSpec::free(2)?;
    let f = GroupRingElement::parse(&group, "a - e")?;
    ShiftSystem::linear(group, n, f)
}

/// `{s a^k : 1 ≤ k ≤ K}`.
pub fn coset_region(group: &GroupSpec, s: &GroupElement, k: usize) -> FiniteSubset {
    let a = group.generator(0);
    FiniteSubset::new((1..=k as i64).map(|i| s.mul(&a.pow(i))))
}

/// `({x_s = 0}, {x_s = 1})`.
pub fn value_pair_at(n: u8, s: &GroupElement) -> Result<SetTuple> {
    SetTuple::value_pair(n, s, 0, 1)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NoOrbitRow {
    pub n: u8,
    pub base: String,
    pub k: usize,
    pub max_size: usize,
    pub exact: bool,
    pub holds: bool,
}

/// Largest independence set of `({x_s = 0}, {x_s = 1})` inside `{s a^k : k ≤ K}` for
/// every `K` up to `k_max`; each row should report exactly 1.
pub fn verify_no_orbit_ie(n: u8, s: &GroupElement, k_max: usize) -> Result<Vec<NoOrbitRow>> {
    let sys = xa1_system(n)?;
    let tuple = value_pair_at(n, s)?;
    (1..=k_max)
        .map(|k| {
            let region = coset_region(sys.group(), s, k);
            let m = max_independence_subset(&region, &tuple, &sys)?;
            let exact = m.exact && m.complete;
            Ok(NoOrbitRow {
                n,
                base: sys.group().format(s),
                k,
                max_size: m.size,
                exact,
                holds: exact && m.size == 1,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DemoRow {
    pub base: String,
    pub k: usize,
    pub region_size: usize,
    /// Ratio of the tuple based at `base` on its own region `{base a^k}`.
    #[serde(serialize_with = "crate::report::ratio")]
    pub single: Ratio<u64>,
    #[serde(serialize_with = "crate::report::ratio")]
    pub family: Ratio<u64>,
    /// Largest independence set per tuple of the family.
    pub per_tuple: Vec<usize>,
    pub holds: bool,
}

/// Family of value pairs at base points in distinct `<a>`-cosets: on `{s a^k}` the
/// tuple at `s` only reaches `1/K`, while another base point reaches ratio 1.
pub fn family_vs_single_demo(n: u8, bases: &[GroupElement], ks: &[usize]) -> Result<Vec<DemoRow>> {
    let sys = xa1_system(n)?;
    let g = sys.group();
    if bases.is_empty() {
        return Err(Error::Precondition("no base points".into()));
    }
    for (i, s) in bases.iter().enumerate() {
        for t in &bases[..i] {
            if g.cyclic_coset(s, 0).0 == g.cyclic_coset(t, 0).0 {
                return Err(Error::Precondition(format!(
                    "base points {} and {} share an <a>-coset",
                    g.format(t),
                    g.format(s)
                )));
            }
        }
    }
    let family: Family = bases
        .iter()
        .map(|s| value_pair_at(n, s))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();
    let mut rows = Vec::new();
    for (bi, s) in bases.iter().enumerate() {
        for &k in ks {
            let region = coset_region(g, s, k);
            let fr = family_ratio(&region, &family, &sys)?;
            let single = Ratio::new(fr.per_tuple[bi] as u64, region.len() as u64);
            let expect_family = if bases.len() > 1 {
                Ratio::from_integer(1)
            } else {
                single
            };
            rows.push(DemoRow {
                base: g.format(s),
                k,
                region_size: region.len(),
                single,
                family: fr.ratio,
                per_tuple: fr.per_tuple,
                holds: single == Ratio::new(1, k as u64) && fr.ratio == expect_family,
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EvidenceRow {
    pub radius: usize,
    pub size: usize,
    /// `ln N / |F|` for the value partition at the identity.
    pub value_upper: Option<LogRatio>,
    /// `ln N / |F|` for the cover built from the family's tuples.
    pub tuple_upper: Option<LogRatio>,
    /// Best independence ratio of the family on the ball.
    #[serde(serialize_with = "crate::report::ratio")]
    pub density: Ratio<u64>,
    /// `density · ln 2`.
    pub lower: LogRatio,
    /// `lower ≤ tuple_upper`.
    pub sandwich: bool,
    /// Value-partition ratio on the full shift with the same alphabet.
    pub full_shift: Option<LogRatio>,
    pub errors: Vec<String>,
}

/// Per ball: upper estimates of naive entropy (value partition and family cover),
/// the family's independence ratio, and the lower bound it certifies.
pub fn xa1_entropy_evidence(
    n: u8,
    bases: &[GroupElement],
    radii: &[usize],
) -> Result<Vec<EvidenceRow>> {
    let sys = xa1_system(n)?;
    let full = ShiftSystem::full(sys.group().clone(), Alphabet::Plain(n))?;
    let g = sys.group();
    let family: Family = bases
        .iter()
        .map(|s| value_pair_at(n, s))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();
    let partition = OpenCover::value_partition(n, &g.identity())?;
    let tuple_cover = cover_from_tuples(&family, &sys)?.joined;
    let mut rows = Vec::with_capacity(radii.len());
    for &r in radii {
        let region = [Region::new(format!("ball({r})"), g.ball(r))];
        let mut errors = Vec::new();
        let mut upper = |cover: &OpenCover, system: &ShiftSystem| -> Result<Option<LogRatio>> {
            let rep = naive_entropy_upper(cover, system, &region)?;
            errors.extend(rep.rows[0].error.clone());
            Ok(rep.rows[0].ratio.clone())
        };
        let value_upper = upper(&partition, &sys)?;
        let tuple_upper = upper(&tuple_cover, &sys)?;
        let full_shift = upper(&partition, &full)?;
        let density = density_upper_estimate(&family, &region, &sys)?;
        let q = density.infimum.unwrap_or(Ratio::from_integer(0));
        let lower = entropy_lower_from_density(q, 2)?;
        let sandwich = tuple_upper.as_ref().is_some_and(|u| lower <= *u);
        rows.push(EvidenceRow {
            radius: r,
            size: region[0].set.len(),
            value_upper,
            tuple_upper,
            density: q,
            lower,
            sandwich,
            full_shift,
            errors,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subshift::CylinderSet;

    #[test]
    fn system_examples() {
        let sys = xa1_system(2).unwrap();
        let g = sys.group().clone();
        let p = |pairs: &[(&str, u8)]| {
            let cells: Vec<_> = pairs
                .iter()
                .map(|(w, v)| (g.parse(w).unwrap(), *v))
                .collect();
            sys.realizable(&CylinderSet::pinned(2, &cells).unwrap())
                .unwrap()
                .is_realizable()
        };
        assert!(p(&[("e", 0), ("a^3", 0)]));
        assert!(!p(&[("e", 0), ("a^3", 1)]));
        assert!(p(&[("e", 0), ("b", 1)]));
        assert!(xa1_system(1).is_err());
    }

    #[test]
    fn no_orbit_rows() {
        let g = GroupSpec::free(2).unwrap();
        for rows in [
            verify_no_orbit_ie(2, &g.identity(), 6).unwrap(),
            verify_no_orbit_ie(3, &g.parse("b").unwrap(), 6).unwrap(),
        ] {
            assert!(rows.iter().all(|r| r.holds), "{rows:?}");
        }
    }

    #[test]
    fn demo_shared_coset_rejected() {
        let g = GroupSpec::free(2).unwrap();
        let bases = [g.identity(), g.parse("a^2").unwrap()];
        assert!(family_vs_single_demo(2, &bases, &[3]).is_err());
    }
}
