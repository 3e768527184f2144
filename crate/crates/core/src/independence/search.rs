//! Independence sets of tuples and maximum independence subsets of regions.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use serde::Serialize;

use crate::cover::Region;
use crate::error::{Error, Result};
use crate::family::{Family, SetTuple};
use crate::group::{FiniteSubset, GroupElement};
use crate::subshift::{CylinderSet, ShiftSystem};

/// Three-valued answer for systems whose oracle may be inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

/// One realizable pattern for `⋂_{s∈M} s^-1 A_{ω(s)}` over the members `M` of a block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    /// Entry index chosen at each member, in member order.
    pub omega: Vec<u16>,
    #[serde(skip)]
    pub domain: FiniteSubset,
    pub pattern: Vec<u8>,
}

/// Certificates for the members of `J` whose translated entries interact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertificateBlock {
    /// Positions in `J` (canonical order), the first being the most significant digit
    /// of the local `ω`.
    pub members: Vec<usize>,
    pub certificates: Vec<Certificate>,
}

/// Certificates for every `ω ∈ [k]^J`, stored per interaction block: the certificate
/// for `ω` is the union of the block certificates for the restrictions of `ω`. Blocks
/// touch disjoint sets of coordinates that the system does not couple, so the union
/// pattern occurs whenever each piece does.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceWitness {
    pub set: FiniteSubset,
    pub blocks: Vec<CertificateBlock>,
}

impl IndependenceWitness {
    /// Number of assignments `ω` covered, `k^|J|`.
    pub fn assignments(&self, k: usize) -> u128 {
        (k as u128)
            .checked_pow(self.set.len() as u32)
            .unwrap_or(u128::MAX)
    }

    /// The assembled certificate for one `ω` given in canonical order of `J`.
    pub fn certificate(&self, omega: &[u16], k: usize) -> Option<(FiniteSubset, Vec<u8>)> {
        let mut pins: Vec<(GroupElement, u8)> = Vec::new();
        for b in &self.blocks {
            let index = b
                .members
                .iter()
                .fold(0usize, |acc, &m| acc * k + omega[m] as usize);
            let c = b.certificates.get(index)?;
            pins.extend(c.domain.iter().cloned().zip(c.pattern.iter().copied()));
        }
        let domain = FiniteSubset::new(pins.iter().map(|(g, _)| g.clone()));
        let mut row = vec![0u8; domain.len()];
        for (g, v) in pins {
            row[domain.index_of(&g)?] = v;
        }
        Some((domain, row))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceCheck {
    pub status: Tri,
    pub witness: Option<IndependenceWitness>,
}

type BlockKey = Option<GroupElement>;

/// Intersections `⋂_{s∈M} s^-1 A_{ω(s)}` for every local `ω`, in `ω` order, each
/// pruned to rows that are not refuted.
#[derive(Debug, Clone)]
pub(crate) struct Component {
    keys: BTreeSet<BlockKey>,
    members: Vec<usize>,
    cells: Vec<CylinderSet>,
}

/// Components over disjoint interaction blocks: the full intersection for `ω` occurs
/// iff every component's cell for the restriction of `ω` does.
#[derive(Debug, Clone)]
pub(crate) struct Frontier {
    components: Vec<Arc<Component>>,
    pub(crate) exact: bool,
}

fn block_keys(entries: &[CylinderSet], sys: &ShiftSystem) -> BTreeSet<BlockKey> {
    entries
        .iter()
        .flat_map(|a| a.domain().iter())
        .map(|g| sys.interaction_block(g))
        .collect()
}

impl Frontier {
    pub(crate) fn start() -> Self {
        Frontier {
            components: Vec::new(),
            exact: true,
        }
    }

    /// Adds the element at position `member` of `J`, whose translated entries are
    /// `shifted`; `None` if some intersection misses `X`.
    pub(crate) fn extend(
        &self,
        member: usize,
        shifted: &[CylinderSet],
        sys: &ShiftSystem,
        limit: usize,
    ) -> Result<Option<Frontier>> {
        let keys = block_keys(shifted, sys);
        let global = keys.contains(&None);
        let (touched, kept): (Vec<&Arc<Component>>, Vec<&Arc<Component>>) = self
            .components
            .iter()
            .partition(|c| global || c.keys.contains(&None) || !c.keys.is_disjoint(&keys));
        let size = touched
            .iter()
            .try_fold(shifted.len(), |acc, c| acc.checked_mul(c.cells.len()))
            .unwrap_or(usize::MAX);
        if size > limit {
            return Err(Error::budget(
                "independence certificates",
                size as u128,
                limit as u128,
            ));
        }
        let mut merged = Component {
            keys: keys.clone(),
            members: Vec::new(),
            cells: vec![CylinderSet::whole(shifted[0].alphabet())],
        };
        for c in &touched {
            merged.keys.extend(c.keys.iter().cloned());
            merged.members.extend_from_slice(&c.members);
            let mut cells = Vec::with_capacity(merged.cells.len() * c.cells.len());
            for x in &merged.cells {
                for y in &c.cells {
                    cells.push(x.intersect(y)?);
                }
            }
            merged.cells = cells;
        }
        merged.members.push(member);
        let mut exact = self.exact;
        let mut cells = Vec::with_capacity(size);
        for c in &merged.cells {
            for a in shifted {
                let joined = c.intersect(a)?;
                let (pruned, sure) = sys.prune(&joined)?;
                if pruned.is_trivially_empty() {
                    return Ok(None);
                }
                exact &= sure;
                cells.push(pruned);
            }
        }
        merged.cells = cells;
        let mut components: Vec<Arc<Component>> = kept.into_iter().cloned().collect();
        components.push(Arc::new(merged));
        Ok(Some(Frontier { components, exact }))
    }
}

/// `s^-1 A_i` for every entry.
pub(crate) fn shifted_entries(tuple: &SetTuple, s: &GroupElement) -> Vec<CylinderSet> {
    tuple.entries().iter().map(|a| a.shift(s)).collect()
}

fn omega_of(index: usize, k: usize, len: usize) -> Vec<u16> {
    let mut omega = vec![0u16; len];
    let mut x = index;
    for slot in omega.iter_mut().rev() {
        *slot = (x % k) as u16;
        x /= k;
    }
    omega
}

/// Checks every `ω : J → [k]`; subsets of `J` then follow by monotonicity.
pub fn is_independence_set(
    j: &FiniteSubset,
    tuple: &SetTuple,
    sys: &ShiftSystem,
) -> Result<IndependenceCheck> {
    let limit = sys.budget().max_patterns;
    let mut frontier = Frontier::start();
    for (pos, s) in j.iter().enumerate() {
        match frontier.extend(pos, &shifted_entries(tuple, s), sys, limit)? {
            Some(f) => frontier = f,
            None => {
                return Ok(IndependenceCheck {
                    status: Tri::No,
                    witness: None,
                })
            }
        }
    }
    let k = tuple.k();
    let mut blocks: Vec<CertificateBlock> = frontier
        .components
        .iter()
        .map(|c| CertificateBlock {
            members: c.members.clone(),
            certificates: c
                .cells
                .iter()
                .enumerate()
                .map(|(i, cell)| Certificate {
                    omega: omega_of(i, k, c.members.len()),
                    domain: cell.domain().clone(),
                    pattern: cell.patterns().row(0).to_vec(),
                })
                .collect(),
        })
        .collect();
    blocks.sort_by(|a, b| a.members.cmp(&b.members));
    let status = if frontier.exact {
        Tri::Yes
    } else {
        Tri::Unknown
    };
    Ok(IndependenceCheck {
        status,
        witness: Some(IndependenceWitness {
            set: j.clone(),
            blocks,
        }),
    })
}

/// Recomputes every block certificate from the tuple and checks that the blocks
/// partition `J` and touch pairwise uncoupled coordinates.
pub fn verify_witness(
    w: &IndependenceWitness,
    tuple: &SetTuple,
    sys: &ShiftSystem,
) -> Result<bool> {
    let k = tuple.k();
    let mut seen = vec![false; w.set.len()];
    let mut used_keys: BTreeSet<BlockKey> = BTreeSet::new();
    for block in &w.blocks {
        if block.certificates.len() as u128 != (k as u128).pow(block.members.len() as u32) {
            return Ok(false);
        }
        let mut keys = BTreeSet::new();
        for &m in &block.members {
            if m >= seen.len() || std::mem::replace(&mut seen[m], true) {
                return Ok(false);
            }
            keys.extend(block_keys(
                &shifted_entries(tuple, &w.set.as_slice()[m]),
                sys,
            ));
        }
        if (keys.contains(&None) && w.blocks.len() > 1) || !keys.is_disjoint(&used_keys) {
            return Ok(false);
        }
        used_keys.extend(keys);
        for (i, cert) in block.certificates.iter().enumerate() {
            if cert.omega != omega_of(i, k, block.members.len()) {
                return Ok(false);
            }
            let mut c = CylinderSet::whole(tuple.alphabet());
            for (&m, &o) in block.members.iter().zip(&cert.omega) {
                c = c.intersect(&tuple.entry(o as usize).shift(&w.set.as_slice()[m]))?;
            }
            let Ok(single) = CylinderSet::new(
                c.alphabet(),
                cert.domain.clone(),
                vec![cert.pattern.clone()],
            ) else {
                return Ok(false);
            };
            if !c.domain().is_subset(&cert.domain) || !c.accepts(&cert.domain, &cert.pattern) {
                return Ok(false);
            }
            if !sys.realizable(&single)?.is_realizable() {
                return Ok(false);
            }
        }
    }
    Ok(seen.iter().all(|&x| x))
}

/// Result of [`max_independence_subset`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MaxIndependence {
    #[serde(skip)]
    pub set: FiniteSubset,
    pub size: usize,
    /// False when the node budget stopped the search; `size` is then a lower bound.
    pub complete: bool,
    /// False when some accepted extension rested on inconclusive verdicts.
    pub exact: bool,
    pub nodes: u64,
}

struct SubsetSearch<'a> {
    elems: &'a [GroupElement],
    shifted: Vec<Vec<CylinderSet>>,
    sys: &'a ShiftSystem,
    best: Vec<usize>,
    best_exact: bool,
    current: Vec<usize>,
    nodes: u64,
    node_budget: u64,
    limit: usize,
    exhausted: bool,
}

impl SubsetSearch<'_> {
    fn run(&mut self, pos: usize, frontier: &Frontier) -> Result<()> {
        if self.current.len() > self.best.len() {
            self.best = self.current.clone();
            self.best_exact = frontier.exact;
        }
        if pos == self.elems.len()
            || self.current.len() + (self.elems.len() - pos) <= self.best.len()
        {
            return Ok(());
        }
        self.nodes += 1;
        if self.nodes > self.node_budget {
            self.exhausted = true;
            return Ok(());
        }
        if let Some(next) = frontier.extend(pos, &self.shifted[pos], self.sys, self.limit)? {
            self.current.push(pos);
            self.run(pos + 1, &next)?;
            self.current.pop();
            if self.exhausted {
                return Ok(());
            }
        }
        self.run(pos + 1, frontier)
    }
}

/// A largest `J ⊆ F` that is an independence set for the tuple. Branch and bound over
/// include/exclude decisions in canonical order; heredity lets a refuted extension
/// prune the include branch.
pub fn max_independence_subset(
    f: &FiniteSubset,
    tuple: &SetTuple,
    sys: &ShiftSystem,
) -> Result<MaxIndependence> {
    let elems = f.as_slice();
    let shifted = elems.iter().map(|s| shifted_entries(tuple, s)).collect();
    let mut search = SubsetSearch {
        elems,
        shifted,
        sys,
        best: Vec::new(),
        best_exact: true,
        current: Vec::new(),
        nodes: 0,
        node_budget: sys.budget().max_search_nodes,
        limit: sys.budget().max_patterns,
        exhausted: false,
    };
    search.run(0, &Frontier::start())?;
    let set = FiniteSubset::new(search.best.iter().map(|&i| elems[i].clone()));
    Ok(MaxIndependence {
        size: set.len(),
        set,
        complete: !search.exhausted,
        exact: search.best_exact,
        nodes: search.nodes,
    })
}

/// Best tuple of a family on one region.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyRatio {
    #[serde(serialize_with = "crate::report::ratio")]
    pub ratio: Ratio<u64>,
    pub tuple: usize,
    pub best: MaxIndependence,
    pub per_tuple: Vec<usize>,
}

pub fn family_ratio(f: &FiniteSubset, family: &Family, sys: &ShiftSystem) -> Result<FamilyRatio> {
    if family.is_empty() {
        return Err(Error::Precondition("empty family".into()));
    }
    if f.is_empty() {
        return Err(Error::Precondition("empty region".into()));
    }
    let mut best: Option<(usize, MaxIndependence)> = None;
    let mut per_tuple = Vec::with_capacity(family.len());
    for (i, t) in family.tuples().iter().enumerate() {
        let m = max_independence_subset(f, t, sys)?;
        per_tuple.push(m.size);
        if best.as_ref().is_none_or(|(_, b)| m.size > b.size) {
            best = Some((i, m));
        }
    }
    let (tuple, best) = best.unwrap();
    Ok(FamilyRatio {
        ratio: Ratio::new(best.size as u64, f.len() as u64),
        tuple,
        best,
        per_tuple,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityRow {
    pub region_id: String,
    pub size: usize,
    pub result: Option<FamilyRatio>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub rows: Vec<DensityRow>,
    /// Minimum ratio over the tested regions: an upper bound on the density.
    #[serde(serialize_with = "crate::report::opt_ratio")]
    pub infimum: Option<Ratio<u64>>,
    pub bound: &'static str,
    #[serde(skip)]
    pub timings: Vec<Duration>,
}

pub fn density_upper_estimate(
    family: &Family,
    regions: &[Region],
    sys: &ShiftSystem,
) -> Result<DensityReport> {
    if regions.is_empty() {
        return Err(Error::Precondition("no regions given".into()));
    }
    let mut rows = Vec::with_capacity(regions.len());
    let mut timings = Vec::with_capacity(regions.len());
    for region in regions {
        let start = Instant::now();
        let outcome = family_ratio(&region.set, family, sys);
        timings.push(start.elapsed());
        let (result, error) = match outcome {
            Ok(r) => (Some(r), None),
            Err(e) => (None, Some(e.to_string())),
        };
        rows.push(DensityRow {
            region_id: region.id.clone(),
            size: region.set.len(),
            result,
            error,
        });
    }
    let infimum = rows
        .iter()
        .filter_map(|r| r.result.as_ref().map(|x| x.ratio))
        .min();
    Ok(DensityReport {
        rows,
        infimum,
        bound: "upper",
        timings,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GrowthRow {
    pub radius: usize,
    pub ball_size: usize,
    pub max_size: usize,
    pub tuple: usize,
    pub complete: bool,
}

/// Largest independence set inside `ball(r)` for each radius, over the family.
pub fn growth_table(family: &Family, radii: &[usize], sys: &ShiftSystem) -> Result<Vec<GrowthRow>> {
    radii
        .iter()
        .map(|&r| {
            let ball = sys.group().ball(r);
            let fr = family_ratio(&ball, family, sys)?;
            Ok(GrowthRow {
                radius: r,
                ball_size: ball.len(),
                max_size: fr.best.size,
                tuple: fr.tuple,
                complete: fr.best.complete,
            })
        })
        .collect()
}
