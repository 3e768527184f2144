//! One finite stage of the tower of families behind the Li-Yorke construction.
//!
//! Stage `m` holds a family `𝒜_m`, for each tuple its parent in `𝒜_{m-1}` and the
//! translate `ζ_m`, the accumulated frame `ξ_m` and the exclusion set `K_m`. A step
//! builds `𝐀''` from a separated set `E` for every tuple, validates the inclusion and
//! exclusion properties directly on the cylinders and splits to the next diameter.

use std::collections::HashMap;

use serde::Serialize;

use super::split::split_framed;
use crate::error::{Error, Result};
use crate::family::{Family, SetTuple};
use crate::group::{find_separated_set, FiniteSubset, GroupElement};
use crate::subshift::{cylinder_diameter, CylinderSet, Dyadic, ShiftSystem};

/// Radius up to which the set `E` is searched for.
const TOWER_RADIUS: usize = 8;

#[derive(Debug, Clone)]
pub struct ChaosStage {
    pub m: u32,
    pub family: Family,
    /// `π_m` as indices into the previous stage's family; empty at the first stage.
    pub parents: Vec<usize>,
    /// `ζ_m` per tuple (the identity at the first stage).
    pub zetas: Vec<GroupElement>,
    /// `ξ_m` per tuple.
    pub xis: Vec<GroupElement>,
    pub k_set: FiniteSubset,
}

impl ChaosStage {
    /// The first stage: `𝒜_1 = 𝒜` with trivial frames. Tuples need two or more
    /// entries and pairwise disjoint entries.
    pub fn initial(family: Family, k1: FiniteSubset, sys: &ShiftSystem) -> Result<Self> {
        if family.is_empty() {
            return Err(Error::Precondition("empty family".into()));
        }
        for (i, t) in family.tuples().iter().enumerate() {
            if t.k() < 2 {
                return Err(Error::Precondition(format!(
                    "tuple {i} has fewer than two entries"
                )));
            }
            if !t.pairwise_disjoint(sys)?.0 {
                return Err(Error::Precondition(format!(
                    "tuple {i} is not pairwise disjoint"
                )));
            }
        }
        let e = sys.group().identity();
        if !k1.contains(&e) {
            return Err(Error::Precondition(
                "the exclusion set must contain the identity".into(),
            ));
        }
        let n = family.len();
        Ok(ChaosStage {
            m: 1,
            family,
            parents: Vec::new(),
            zetas: vec![e.clone(); n],
            xis: vec![e; n],
            k_set: k1,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GammaCheck {
    /// Values `γ(1), .., γ(2ℓ)`, zero-based.
    pub gamma: Vec<u16>,
    #[serde(skip)]
    pub u: GroupElement,
    /// `u A_{i,j} ⊆ A_{γ(i+(j-1)ℓ)}` for every entry of every tuple.
    pub inclusions: bool,
    /// `u ∉ ξ^-1 K_m ξ s_0` over all frames `ξ` of the stage.
    pub outside_excluded: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChaosStepReport {
    pub ell: usize,
    pub n: u32,
    #[serde(skip)]
    pub e: FiniteSubset,
    #[serde(skip)]
    pub s0: GroupElement,
    #[serde(skip)]
    pub s1: GroupElement,
    pub exclusion_size: usize,
    pub gammas: Vec<GammaCheck>,
    /// Tuples dropped for having an entry that misses the system.
    pub dropped: Vec<usize>,
    pub before_split: usize,
    pub after_split: usize,
    /// `|𝐀''| = 2|π(𝐀'')|` and each parent entry contains exactly two entries of `s_0 𝐀''`.
    pub property2: bool,
    /// `diam(ξ_{m+1} 𝐀) ≤ 2^-(m+1)` for every output entry.
    pub property3: bool,
    pub property4: bool,
    pub property5: bool,
    /// Every output entry lies inside the entry of `𝐀''` it was split from.
    pub inherited: bool,
    pub exact: bool,
}

impl ChaosStepReport {
    pub fn all_hold(&self) -> bool {
        self.property2 && self.property3 && self.property4 && self.property5 && self.inherited
    }
}

/// `a ⊆ b` on the system: as pattern sets, or with `a \ b` certainly empty.
fn inside(a: &CylinderSet, b: &CylinderSet, sys: &ShiftSystem) -> Result<(bool, bool)> {
    if a.is_subset_of(b)? {
        return Ok((true, true));
    }
    let v = sys.realizable(&a.intersect(&b.complement()?)?)?;
    Ok((v.is_empty(), v.is_certain()))
}

fn smallest_n(ell: usize, limit: usize) -> Result<u32> {
    let need = (ell as u128)
        .checked_pow(2 * ell as u32)
        .and_then(|x| x.checked_add(2))
        .unwrap_or(u128::MAX);
    if need > limit as u128 {
        return Err(Error::budget("tower separated set", need, limit as u128));
    }
    Ok(need.next_power_of_two().trailing_zeros())
}

/// All `γ : [2ℓ] → [ℓ]` in lexicographic order.
fn all_gammas(ell: usize) -> Vec<Vec<u16>> {
    let len = 2 * ell;
    let total = ell.pow(len as u32);
    (0..total)
        .map(|mut x| {
            let mut g = vec![0u16; len];
            for slot in g.iter_mut().rev() {
                *slot = (x % ell) as u16;
                x /= ell;
            }
            g
        })
        .collect()
}

pub fn chaos_tower_step(
    stage: &ChaosStage,
    k_next: &FiniteSubset,
    sys: &ShiftSystem,
) -> Result<(ChaosStage, ChaosStepReport)> {
    if !stage.k_set.is_subset(k_next) {
        return Err(Error::Precondition(
            "the next exclusion set must contain the current one".into(),
        ));
    }
    let ell = stage
        .family
        .tuples()
        .iter()
        .map(SetTuple::k)
        .max()
        .unwrap_or(0);
    if ell < 2 {
        return Err(Error::Precondition(
            "tuples need at least two entries".into(),
        ));
    }
    let n = smallest_n(ell, sys.budget().max_items)?;
    let size = 1usize << n;

    // ξ^-1 K_m ξ over every frame in use
    let mut frames: Vec<GroupElement> = stage.xis.clone();
    frames.sort();
    frames.dedup();
    let frames = FiniteSubset::new(frames);
    let k_prime = frames.inverse().product(&stage.k_set).product(&frames);
    let e = find_separated_set(sys.group(), &k_prime, size, TOWER_RADIUS).ok_or_else(|| {
        Error::Precondition(format!(
            "no separated set of size {size} within radius {TOWER_RADIUS}"
        ))
    })?;
    let elems = e.as_slice();
    let (s0, s1) = (elems[0].clone(), elems[1].clone());
    let gammas = all_gammas(ell);
    let phi: Vec<GroupElement> = elems[2..2 + gammas.len()].to_vec();
    let position: HashMap<&GroupElement, usize> =
        phi.iter().enumerate().map(|(i, g)| (g, i)).collect();

    // 𝐀'' per tuple, with entries that miss X dropping the tuple
    let mut built: Vec<(usize, SetTuple)> = Vec::new();
    let mut dropped = Vec::new();
    let mut property5 = true;
    let mut exact = true;
    for (ti, tuple) in stage.family.tuples().iter().enumerate() {
        let l = tuple.k();
        let shifted: Vec<Vec<CylinderSet>> = elems
            .iter()
            .map(|s| tuple.entries().iter().map(|a| a.shift(s)).collect())
            .collect();
        let mut entries = Vec::with_capacity(2 * l);
        for j in 0..2usize {
            for i in 0..l {
                let mut parts = Vec::with_capacity(elems.len());
                for (si, s) in elems.iter().enumerate() {
                    let w = if si == 0 {
                        i
                    } else if si == 1 {
                        j
                    } else if let Some(&g) = position.get(s) {
                        gammas[g][i + j * l] as usize
                    } else {
                        0
                    };
                    // a tuple shorter than ℓ reads γ values modulo its own length
                    parts.push(shifted[si][w % l].clone());
                }
                entries.push(CylinderSet::intersect_all(&parts)?);
            }
        }
        let tuple2 = SetTuple::new(entries)?;
        if !tuple2.entries_nonempty(sys)? {
            dropped.push(ti);
            continue;
        }
        let (disjoint, sure) = tuple2.pairwise_disjoint(sys)?;
        property5 &= disjoint;
        exact &= sure;
        built.push((ti, tuple2));
    }
    if built.is_empty() {
        return Err(Error::Precondition(
            "every tuple of the next stage has an empty entry".into(),
        ));
    }

    // property (2): each parent entry contains exactly two entries of s_0 𝐀''
    let mut property2 = true;
    for (ti, t2) in &built {
        let parent = &stage.family.tuples()[*ti];
        property2 &= t2.k() == 2 * parent.k();
        let moved: Vec<CylinderSet> = t2.entries().iter().map(|a| a.translate(&s0)).collect();
        for b in parent.entries() {
            let mut count = 0;
            for a in &moved {
                let (yes, sure) = inside(a, b, sys)?;
                exact &= sure;
                count += usize::from(yes);
            }
            property2 &= count == 2;
        }
    }

    // property (4) for every γ
    let excluded = k_prime.right_translate(&s0);
    let mut gamma_checks = Vec::with_capacity(gammas.len());
    for (gamma, u) in gammas.iter().zip(&phi) {
        let mut inclusions = true;
        for (ti, t2) in &built {
            let parent = &stage.family.tuples()[*ti];
            let l = parent.k();
            for j in 0..2 {
                for i in 0..l {
                    let target = parent.entry(gamma[i + j * l] as usize % l);
                    let (yes, sure) = inside(&t2.entry(i + j * l).translate(u), target, sys)?;
                    exact &= sure;
                    inclusions &= yes;
                }
            }
        }
        gamma_checks.push(GammaCheck {
            gamma: gamma.clone(),
            u: u.clone(),
            inclusions,
            outside_excluded: !excluded.contains(u),
        });
    }
    let property4 = gamma_checks
        .iter()
        .all(|g| g.inclusions && g.outside_excluded);

    // split in the new frames
    let before = Family::new(built.iter().map(|(_, t)| t.clone()).collect());
    let new_frames: Vec<GroupElement> = built
        .iter()
        .map(|(ti, _)| stage.xis[*ti].mul(&s0))
        .collect();
    let next_m = stage.m + 1;
    let split = split_framed(&before, &new_frames, next_m, sys)?;

    let mut property3 = true;
    let mut inherited = true;
    let mut seen: HashMap<(usize, usize, CylinderSet), ()> = HashMap::new();
    for (t, &bi) in split.family.tuples().iter().zip(&split.parents) {
        for (ei, a) in t.entries().iter().enumerate() {
            if seen.insert((bi, ei, a.clone()), ()).is_some() {
                continue;
            }
            let d = cylinder_diameter(&a.translate(&new_frames[bi]), sys)?;
            exact &= d.exact;
            property3 &= d.value <= Dyadic::Pow(next_m);
            let (yes, sure) = inside(a, before.tuples()[bi].entry(ei), sys)?;
            exact &= sure;
            inherited &= yes;
        }
    }

    let parents: Vec<usize> = split.parents.iter().map(|&bi| built[bi].0).collect();
    let xis: Vec<GroupElement> = split
        .parents
        .iter()
        .map(|&bi| new_frames[bi].clone())
        .collect();
    let report = ChaosStepReport {
        ell,
        n,
        e: e.clone(),
        s0: s0.clone(),
        s1,
        exclusion_size: k_prime.len(),
        gammas: gamma_checks,
        dropped,
        before_split: before.len(),
        after_split: split.family.len(),
        property2,
        property3,
        property4,
        property5,
        inherited,
        exact,
    };
    let next = ChaosStage {
        m: next_m,
        zetas: vec![s0; split.family.len()],
        family: split.family,
        parents,
        xis,
        k_set: k_next.clone(),
    };
    Ok((next, report))
}
