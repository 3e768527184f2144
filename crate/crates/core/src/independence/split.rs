//! Splittings, power tuples and the splitting lemma extraction.

use std::collections::{BTreeMap, HashMap};

use num_rational::Ratio;
use serde::Serialize;

use super::search::{is_independence_set, max_independence_subset, Tri};
use crate::error::{Error, Result};
use crate::family::{Family, SetTuple};
use crate::group::{FiniteSubset, GroupElement};
use crate::subshift::{cylinder_diameter, CylinderSet, Dyadic, ShiftSystem};

/// Whether `a` and `b` agree on `X`: equal as pattern sets, or with a symmetric
/// difference that is certainly empty in the system.
pub fn same_in_system(a: &CylinderSet, b: &CylinderSet, sys: &ShiftSystem) -> Result<bool> {
    if a.same_set(b)? {
        return Ok(true);
    }
    for (x, y) in [(a, b), (b, a)] {
        let v = sys.realizable(&x.intersect(&y.complement()?)?)?;
        if !(v.is_empty() && v.is_certain()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Replaces tuple `idx` by the two tuples obtained from `A_j = A_{j,1} ∪ A_{j,2}`,
/// keeping their position in the list.
pub fn simple_split(
    family: &Family,
    idx: usize,
    j: usize,
    parts: (CylinderSet, CylinderSet),
    sys: &ShiftSystem,
) -> Result<Family> {
    let tuple = family
        .tuples()
        .get(idx)
        .ok_or_else(|| Error::Invalid(format!("no tuple {idx} in a family of {}", family.len())))?;
    let entry = tuple
        .entries()
        .get(j)
        .ok_or_else(|| Error::Invalid(format!("no entry {j} in a tuple of size {}", tuple.k())))?;
    let union = parts.0.union(&parts.1)?;
    if !same_in_system(&union, entry, sys)? {
        return Err(Error::Precondition(format!(
            "the parts do not cover entry {j} of tuple {idx}"
        )));
    }
    let mut tuples = family.tuples().to_vec();
    let with = |p: CylinderSet| {
        let mut entries = tuple.entries().to_vec();
        entries[j] = p;
        SetTuple::new(entries)
    };
    let second = with(parts.1)?;
    tuples[idx] = with(parts.0)?;
    tuples.insert(idx + 1, second);
    Ok(Family::new(tuples))
}

/// `𝐀^E`: entries `⋂_{s∈E} s^-1 A_{ω(s)}` over `ω ∈ [k]^E`, the first element of `E`
/// being the most significant digit of `ω`.
pub fn power_tuple(tuple: &SetTuple, e: &FiniteSubset, limit: usize) -> Result<SetTuple> {
    if e.is_empty() {
        return Err(Error::Precondition("power tuple over an empty set".into()));
    }
    let k = tuple.k() as u128;
    let total = k.checked_pow(e.len() as u32).unwrap_or(u128::MAX);
    if total > limit as u128 {
        return Err(Error::budget("power tuple entries", total, limit as u128));
    }
    let mut entries = vec![CylinderSet::whole(tuple.alphabet())];
    for s in e {
        let shifted: Vec<CylinderSet> = tuple.entries().iter().map(|a| a.shift(s)).collect();
        let mut next = Vec::with_capacity(entries.len() * shifted.len());
        for c in &entries {
            for a in &shifted {
                next.push(c.intersect(a)?);
            }
        }
        entries = next;
    }
    SetTuple::new(entries)
}

/// One entry split during [`split_until_diam`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitEvent {
    pub tuple: usize,
    pub entry: usize,
    pub pieces: usize,
}

#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub family: Family,
    /// Index of the input tuple each output tuple descends from.
    pub parents: Vec<usize>,
    pub events: Vec<SplitEvent>,
}

/// Pieces of `g·A` constant on `ball(m-1)`, pulled back by `g^-1`.
fn split_entry(
    a: &CylinderSet,
    frame: &GroupElement,
    m: u32,
    sys: &ShiftSystem,
) -> Result<Vec<CylinderSet>> {
    let b = a.translate(frame);
    if m == 0 || cylinder_diameter(&b, sys)?.value <= Dyadic::Pow(m) {
        return Ok(vec![a.clone()]);
    }
    let pinned = sys.group().ball(m as usize - 1);
    let domain = b.domain().union(&pinned);
    let (pruned, _) = sys.prune(&b.extend_to(&domain)?)?;
    if pruned.is_trivially_empty() {
        return Ok(vec![a.clone()]);
    }
    let positions: Vec<usize> = pinned.iter().map(|g| domain.index_of(g).unwrap()).collect();
    let mut groups: BTreeMap<Vec<u8>, Vec<Vec<u8>>> = BTreeMap::new();
    for row in pruned.patterns().rows() {
        let key = positions.iter().map(|&p| row[p]).collect();
        groups.entry(key).or_default().push(row.to_vec());
    }
    let inv = frame.inverse();
    groups
        .into_values()
        .map(|rows| {
            Ok(CylinderSet::new(b.alphabet(), domain.clone(), rows)?
                .normalize()
                .translate(&inv))
        })
        .collect()
}

/// Splits every entry `A` of tuple `i` so that `frames[i]·A` has diameter at most
/// `2^-m`, replacing each tuple by the product of its entries' pieces.
pub(crate) fn split_framed(
    family: &Family,
    frames: &[GroupElement],
    m: u32,
    sys: &ShiftSystem,
) -> Result<SplitOutcome> {
    let limit = sys.budget().max_items;
    let mut cache: HashMap<(CylinderSet, GroupElement), Vec<CylinderSet>> = HashMap::new();
    let mut tuples = Vec::new();
    let mut parents = Vec::new();
    let mut events = Vec::new();
    for (ti, (tuple, frame)) in family.tuples().iter().zip(frames).enumerate() {
        let mut per_entry = Vec::with_capacity(tuple.k());
        for (ei, a) in tuple.entries().iter().enumerate() {
            let key = (a.clone(), frame.clone());
            if !cache.contains_key(&key) {
                let pieces = split_entry(a, frame, m, sys)?;
                cache.insert(key.clone(), pieces);
            }
            let pieces = cache[&key].clone();
            if pieces.len() > 1 {
                events.push(SplitEvent {
                    tuple: ti,
                    entry: ei,
                    pieces: pieces.len(),
                });
            }
            per_entry.push(pieces);
        }
        let count = per_entry
            .iter()
            .try_fold(1usize, |acc, p| acc.checked_mul(p.len()));
        let count = count.unwrap_or(usize::MAX);
        if tuples.len().saturating_add(count) > limit {
            return Err(Error::budget(
                "split tuples",
                tuples.len() as u128 + count as u128,
                limit as u128,
            ));
        }
        let mut combos: Vec<Vec<CylinderSet>> = vec![Vec::new()];
        for pieces in &per_entry {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    pieces.iter().map(move |p| {
                        let mut c = c.clone();
                        c.push(p.clone());
                        c
                    })
                })
                .collect();
        }
        for c in combos {
            tuples.push(SetTuple::new(c)?);
            parents.push(ti);
        }
    }
    Ok(SplitOutcome {
        family: Family::new(tuples),
        parents,
        events,
    })
}

/// A splitting of the family whose entries all have diameter at most `2^-m`, obtained
/// by fixing the coordinates on `ball(m-1)`.
pub fn split_until_diam(family: &Family, m: u32, sys: &ShiftSystem) -> Result<SplitOutcome> {
    let frames = vec![sys.group().identity(); family.len()];
    split_framed(family, &frames, m, sys)
}

/// Largest diameter over all entries of a family.
pub fn family_diameter(family: &Family, sys: &ShiftSystem) -> Result<Dyadic> {
    let mut worst = Dyadic::Zero;
    for t in family.tuples() {
        for a in t.entries() {
            worst = worst.max(cylinder_diameter(a, sys)?.value);
        }
    }
    Ok(worst)
}

/// Result of [`comb2_extract`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comb2Outcome {
    #[serde(skip)]
    pub set: FiniteSubset,
    /// 1 or 2: the tuple of the splitting for which `set` is an independence set.
    pub branch: u8,
    pub size: usize,
    pub from: usize,
    #[serde(serialize_with = "crate::report::ratio")]
    pub ratio: Ratio<u64>,
    pub exact: bool,
}

/// The entry index at which two tuples of a simple splitting of `tuple` differ.
fn splitting_index(
    tuple: &SetTuple,
    a1: &SetTuple,
    a2: &SetTuple,
    sys: &ShiftSystem,
) -> Result<usize> {
    if a1.k() != tuple.k() || a2.k() != tuple.k() {
        return Err(Error::Precondition(
            "split tuples must have the same length as the original".into(),
        ));
    }
    let mut differing = None;
    for i in 0..tuple.k() {
        let (o, x, y) = (tuple.entry(i), a1.entry(i), a2.entry(i));
        if x == o && y == o {
            continue;
        }
        if differing.is_some() {
            return Err(Error::Precondition(
                "a simple splitting changes exactly one entry".into(),
            ));
        }
        if !same_in_system(&x.union(y)?, o, sys)? {
            return Err(Error::Precondition(format!(
                "entry {i} is not the union of its parts"
            )));
        }
        differing = Some(i);
    }
    // identical tuples are a valid (trivial) splitting
    Ok(differing.unwrap_or(0))
}

/// Largest `I ⊆ J` that is an independence set for one of the two tuples of a simple
/// splitting of `tuple`, given that `J` is one for `tuple`. Ties go to the first tuple.
pub fn comb2_extract(
    tuple: &SetTuple,
    split: (&SetTuple, &SetTuple),
    j: &FiniteSubset,
    sys: &ShiftSystem,
) -> Result<Comb2Outcome> {
    splitting_index(tuple, split.0, split.1, sys)?;
    if j.is_empty() {
        return Err(Error::Precondition("empty independence set".into()));
    }
    if is_independence_set(j, tuple, sys)?.status == Tri::No {
        return Err(Error::Precondition(
            "J is not an independence set for the tuple".into(),
        ));
    }
    let first = max_independence_subset(j, split.0, sys)?;
    let second = max_independence_subset(j, split.1, sys)?;
    let (branch, best) = if second.size > first.size {
        (2, second)
    } else {
        (1, first)
    };
    Ok(Comb2Outcome {
        ratio: Ratio::new(best.size as u64, j.len() as u64),
        size: best.size,
        from: j.len(),
        exact: best.exact && best.complete,
        set: best.set,
        branch,
    })
}
