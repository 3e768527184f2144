//! Finite clopen covers, their pullback joins over a region, exact minimal subcover
//! counts and naive entropy estimates.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{Family, SetTuple};
use crate::group::{FiniteSubset, GroupElement};
use crate::logratio::LogRatio;
use crate::setcover::min_set_cover;
use crate::subshift::{CylinderSet, PatternSet, ShiftSystem, Universe};

/// A finite list of cylinder sets meant to cover the system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenCover {
    items: Vec<CylinderSet>,
}

impl OpenCover {
    pub fn new(items: Vec<CylinderSet>) -> Result<Self> {
        let Some(first) = items.first() else {
            return Err(Error::Invalid("a cover needs at least one item".into()));
        };
        if items.iter().any(|c| c.alphabet() != first.alphabet()) {
            return Err(Error::Invalid(
                "cover items over different alphabets".into(),
            ));
        }
        Ok(OpenCover { items })
    }

    /// `{x_t = v}` for every letter `v`.
    pub fn value_partition(alphabet: u8, t: &GroupElement) -> Result<Self> {
        Ok(OpenCover {
            items: SetTuple::coordinate(alphabet, t)?.into_entries(),
        })
    }

    pub fn items(&self) -> &[CylinderSet] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn alphabet(&self) -> u8 {
        self.items[0].alphabet()
    }

    pub fn joint_domain(&self) -> FiniteSubset {
        self.items
            .iter()
            .fold(FiniteSubset::empty(), |acc, c| acc.union(c.domain()))
    }
}

/// Tests rows on a fixed superdomain against one cylinder.
struct Matcher {
    positions: Vec<usize>,
    patterns: PatternSet,
}

impl Matcher {
    fn new(c: &CylinderSet, domain: &FiniteSubset) -> Self {
        let positions = c
            .domain()
            .iter()
            .map(|g| domain.index_of(g).expect("superdomain"))
            .collect();
        Matcher {
            positions,
            patterns: c.patterns().clone(),
        }
    }

    fn matches(&self, row: &[u8], buf: &mut Vec<u8>) -> bool {
        buf.clear();
        buf.extend(self.positions.iter().map(|&p| row[p]));
        self.patterns.contains(buf)
    }
}

/// Outcome of [`validate_cover`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverCheck {
    pub covers: bool,
    /// False when the answer rests on rows whose realizability is unknown.
    pub exact: bool,
    /// A realizable pattern on the joint domain outside every item.
    pub uncovered: Option<Vec<u8>>,
}

pub fn validate_cover(cover: &OpenCover, sys: &ShiftSystem) -> Result<CoverCheck> {
    let domain = cover.joint_domain();
    let universe = sys.universe(&domain)?;
    let matchers: Vec<Matcher> = cover
        .items
        .iter()
        .map(|c| Matcher::new(c, &domain))
        .collect();
    let mut buf = Vec::new();
    let mut exact = universe.is_exact();
    for row in universe.possible.rows() {
        if matchers.iter().any(|m| m.matches(row, &mut buf)) {
            continue;
        }
        if universe.confirmed.contains(row) {
            return Ok(CoverCheck {
                covers: false,
                exact: true,
                uncovered: Some(row.to_vec()),
            });
        }
        exact = false;
    }
    Ok(CoverCheck {
        covers: true,
        exact,
        uncovered: None,
    })
}

#[derive(Debug, Clone)]
enum Membership {
    /// Item id of every universe row.
    Partition(Vec<u32>),
    /// Row set of every item.
    Sets(Vec<FixedBitSet>),
}

/// `𝒰^F = ⋁_{s∈F} s^-1 𝒰` with empty items removed.
#[derive(Debug, Clone)]
pub struct JoinedCover {
    region: FiniteSubset,
    domain: FiniteSubset,
    /// `ω` of each kept item: the index of the base item chosen at each element of
    /// the region, in canonical order.
    omegas: Vec<Vec<u16>>,
    membership: Membership,
    universe: Universe,
    /// Which rows of `universe.possible` are confirmed.
    confirmed: FixedBitSet,
}

impl JoinedCover {
    pub fn region(&self) -> &FiniteSubset {
        &self.region
    }

    pub fn domain(&self) -> &FiniteSubset {
        &self.domain
    }

    pub fn item_count(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[Vec<u16>] {
        &self.omegas
    }

    pub fn is_partition(&self) -> bool {
        matches!(self.membership, Membership::Partition(_))
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// The cylinder of item `i`: `⋂_{s∈F} s^-1 U_{ω(s)}` restricted to realizable rows.
    pub fn item_rows(&self, i: usize) -> Vec<Vec<u8>> {
        let rows = self.universe.possible.rows().enumerate();
        match &self.membership {
            Membership::Partition(a) => rows
                .filter(|(r, _)| a[*r] as usize == i)
                .map(|(_, x)| x.to_vec())
                .collect(),
            Membership::Sets(sets) => rows
                .filter(|(r, _)| sets[i].contains(*r))
                .map(|(_, x)| x.to_vec())
                .collect(),
        }
    }
}

pub fn refine_pullback(
    cover: &OpenCover,
    region: &FiniteSubset,
    sys: &ShiftSystem,
) -> Result<JoinedCover> {
    if region.is_empty() {
        return Err(Error::Precondition("pullback over an empty region".into()));
    }
    let shifted: Vec<Vec<CylinderSet>> = region
        .iter()
        .map(|s| cover.items.iter().map(|u| u.shift(s)).collect())
        .collect();
    let domain = shifted
        .iter()
        .flatten()
        .fold(FiniteSubset::empty(), |acc, c| acc.union(c.domain()));
    let universe = sys.universe(&domain)?;
    let matchers: Vec<Vec<Matcher>> = shifted
        .iter()
        .map(|row| row.iter().map(|c| Matcher::new(c, &domain)).collect())
        .collect();
    let nrows = universe.possible.len();
    let mut confirmed = FixedBitSet::with_capacity(nrows);
    for (r, row) in universe.possible.rows().enumerate() {
        if universe.confirmed.contains(row) {
            confirmed.insert(r);
        }
    }
    let budget = sys.budget().max_items;
    let mut buf = Vec::new();

    // Partition fast path: every row lies in exactly one item of each s^-1 𝒰.
    let mut partition = true;
    let mut row_omegas: Vec<Vec<u16>> = Vec::with_capacity(nrows);
    'rows: for row in universe.possible.rows() {
        let mut omega = Vec::with_capacity(region.len());
        for per_s in &matchers {
            let mut hit = None;
            for (i, m) in per_s.iter().enumerate() {
                if m.matches(row, &mut buf) {
                    if hit.is_some() {
                        partition = false;
                        break 'rows;
                    }
                    hit = Some(i as u16);
                }
            }
            match hit {
                Some(i) => omega.push(i),
                None => {
                    partition = false;
                    break 'rows;
                }
            }
        }
        row_omegas.push(omega);
    }
    if partition {
        let mut ids: BTreeMap<Vec<u16>, u32> = BTreeMap::new();
        for o in &row_omegas {
            ids.entry(o.clone()).or_insert(0);
        }
        if ids.len() > budget {
            return Err(Error::budget(
                "joined cover items",
                ids.len() as u128,
                budget as u128,
            ));
        }
        for (n, v) in ids.values_mut().enumerate() {
            *v = n as u32;
        }
        let assignment = row_omegas.iter().map(|o| ids[o]).collect();
        let omegas = ids.into_keys().collect();
        return Ok(JoinedCover {
            region: region.clone(),
            domain,
            omegas,
            membership: Membership::Partition(assignment),
            universe,
            confirmed,
        });
    }
    drop(row_omegas);

    // General path: depth-first over the region, intersecting row sets.
    let member_sets: Vec<Vec<FixedBitSet>> = matchers
        .iter()
        .map(|per_s| {
            per_s
                .iter()
                .map(|m| {
                    let mut set = FixedBitSet::with_capacity(nrows);
                    for (r, row) in universe.possible.rows().enumerate() {
                        if m.matches(row, &mut buf) {
                            set.insert(r);
                        }
                    }
                    set
                })
                .collect()
        })
        .collect();
    let mut omegas = Vec::new();
    let mut sets = Vec::new();
    let mut all = FixedBitSet::with_capacity(nrows);
    all.insert_range(..);
    let mut stack: Vec<(Vec<u16>, FixedBitSet)> = vec![(Vec::new(), all)];
    while let Some((omega, rows)) = stack.pop() {
        let depth = omega.len();
        if depth == region.len() {
            omegas.push(omega);
            sets.push(rows);
            if omegas.len() > budget {
                return Err(Error::budget(
                    "joined cover items",
                    omegas.len() as u128,
                    budget as u128,
                ));
            }
            continue;
        }
        for i in (0..cover.len()).rev() {
            let mut next = rows.clone();
            next.intersect_with(&member_sets[depth][i]);
            if !next.is_clear() {
                let mut o = omega.clone();
                o.push(i as u16);
                stack.push((o, next));
            }
        }
    }
    Ok(JoinedCover {
        region: region.clone(),
        domain,
        omegas,
        membership: Membership::Sets(sets),
        universe,
        confirmed,
    })
}

/// `N` of a joined cover: the lower value counts the confirmed universe, the upper one
/// every row that was not refuted. They agree on exact systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SubcoverCount {
    pub low: u64,
    pub high: u64,
}

impl SubcoverCount {
    pub fn is_exact(&self) -> bool {
        self.low == self.high
    }
}

pub fn minimal_subcover_count(jc: &JoinedCover, sys: &ShiftSystem) -> Result<SubcoverCount> {
    let nrows = jc.universe.possible.len();
    match &jc.membership {
        Membership::Partition(assign) => {
            let high = jc.omegas.len() as u64;
            let mut seen = FixedBitSet::with_capacity(jc.omegas.len());
            for r in jc.confirmed.ones() {
                seen.insert(assign[r] as usize);
            }
            Ok(SubcoverCount {
                low: seen.count_ones(..) as u64,
                high,
            })
        }
        Membership::Sets(sets) => {
            let nodes = sys.budget().max_search_nodes;
            let mut all = FixedBitSet::with_capacity(nrows);
            all.insert_range(..);
            let high = min_set_cover(&all, sets, nodes)?.map_or(0, |s| s.size) as u64;
            let low = if jc.confirmed.count_ones(..) == nrows {
                high
            } else {
                min_set_cover(&jc.confirmed, sets, nodes)?.map_or(0, |s| s.size) as u64
            };
            Ok(SubcoverCount { low, high })
        }
    }
}

/// A named region of the group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub id: String,
    pub set: FiniteSubset,
}

impl Region {
    pub fn new(id: impl Into<String>, set: FiniteSubset) -> Self {
        Region { id: id.into(), set }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntropyRow {
    pub region_id: String,
    pub size: usize,
    pub n: Option<SubcoverCount>,
    /// `ln(N_high) / |F|`, an upper bound on the naive entropy of the cover.
    pub ratio: Option<LogRatio>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntropyReport {
    pub rows: Vec<EntropyRow>,
    /// Minimum of the ratio column: an upper bound, never a certified infimum.
    pub min_ratio: Option<LogRatio>,
    pub min_region: Option<String>,
    pub bound: &'static str,
    /// Wall-clock time per row; kept out of the serialized report.
    #[serde(skip)]
    pub timings: Vec<Duration>,
}

pub fn naive_entropy_upper(
    cover: &OpenCover,
    sys: &ShiftSystem,
    regions: &[Region],
) -> Result<EntropyReport> {
    if regions.is_empty() {
        return Err(Error::Precondition("no regions given".into()));
    }
    let mut rows = Vec::with_capacity(regions.len());
    let mut timings = Vec::with_capacity(regions.len());
    for region in regions {
        let start = Instant::now();
        let outcome = refine_pullback(cover, &region.set, sys)
            .and_then(|jc| minimal_subcover_count(&jc, sys));
        timings.push(start.elapsed());
        let row = match outcome {
            Ok(n) => EntropyRow {
                region_id: region.id.clone(),
                size: region.set.len(),
                n: Some(n),
                ratio: Some(LogRatio::new(n.high.max(1), region.set.len() as u64)?),
                error: None,
            },
            Err(e) => EntropyRow {
                region_id: region.id.clone(),
                size: region.set.len(),
                n: None,
                ratio: None,
                error: Some(e.to_string()),
            },
        };
        rows.push(row);
    }
    let best = rows
        .iter()
        .filter_map(|r| r.ratio.as_ref().map(|q| (q, &r.region_id)))
        .min_by(|a, b| a.0.cmp(b.0));
    let (min_ratio, min_region) = match best {
        Some((q, id)) => (Some(q.clone()), Some(id.clone())),
        None => (None, None),
    };
    Ok(EntropyReport {
        rows,
        min_ratio,
        min_region,
        bound: "upper",
        timings,
    })
}

/// `q · ln k`, the entropy lower bound certified by independence density `q` of a
/// family whose tuples have at least `k` entries.
pub fn entropy_lower_from_density(q: Ratio<u64>, k_min: u64) -> Result<LogRatio> {
    if q > Ratio::from_integer(1) {
        return Err(Error::Precondition(format!("density {q} exceeds 1")));
    }
    if k_min < 2 {
        return Err(Error::Precondition(
            "tuples need at least two entries".into(),
        ));
    }
    LogRatio::rational_multiple(q, k_min)
}

/// Two-element covers whose join refines `cover`.
///
/// With `C_i = U_i \ (U_1 ∪ .. ∪ U_{i-1})` the covers are `{U_i, X \ C_i}`: a point
/// lies in the first `C_i` containing it, so each nonempty join item picks some `U_i`.
/// For partitions `X \ C_i = ⋃_{j≠i} U_j`. Covers whose `C_i` misses `X` are dropped.
pub fn two_cover_reduction(cover: &OpenCover, sys: &ShiftSystem) -> Result<Vec<OpenCover>> {
    if cover.len() < 2 {
        return Err(Error::Precondition(
            "two-cover reduction needs at least two items".into(),
        ));
    }
    if cover.len() == 2 {
        return Ok(vec![cover.clone()]);
    }
    let mut out = Vec::new();
    let mut earlier = CylinderSet::empty(cover.alphabet());
    for u in &cover.items {
        let c = u.intersect(&earlier.complement()?)?;
        if !sys.realizable(&c)?.is_empty() {
            out.push(OpenCover::new(vec![
                u.clone(),
                c.complement()?.normalize(),
            ])?);
        }
        earlier = earlier.union(u)?.normalize();
    }
    if out.is_empty() {
        return Err(Error::Precondition(
            "the cover items miss every point of the system".into(),
        ));
    }
    Ok(out)
}

/// Row sets of every item of every cover on a common universe.
fn member_rows(
    covers: &[&OpenCover],
    sys: &ShiftSystem,
) -> Result<(Universe, Vec<Vec<FixedBitSet>>)> {
    let domain = covers
        .iter()
        .fold(FiniteSubset::empty(), |acc, c| acc.union(&c.joint_domain()));
    let universe = sys.universe(&domain)?;
    let nrows = universe.possible.len();
    let mut buf = Vec::new();
    let sets = covers
        .iter()
        .map(|c| {
            c.items
                .iter()
                .map(|it| {
                    let m = Matcher::new(it, &domain);
                    let mut s = FixedBitSet::with_capacity(nrows);
                    for (r, row) in universe.possible.rows().enumerate() {
                        if m.matches(row, &mut buf) {
                            s.insert(r);
                        }
                    }
                    s
                })
                .collect()
        })
        .collect();
    Ok((universe, sets))
}

/// Nonempty items of `⋁ covers` as row sets, with the item index chosen per cover.
fn join_rows(
    sets: &[Vec<FixedBitSet>],
    nrows: usize,
    limit: usize,
) -> Result<Vec<(Vec<usize>, FixedBitSet)>> {
    let mut all = FixedBitSet::with_capacity(nrows);
    all.insert_range(..);
    let mut frontier = vec![(Vec::new(), all)];
    for per_cover in sets {
        let mut next = Vec::new();
        for (choice, rows) in &frontier {
            for (i, s) in per_cover.iter().enumerate() {
                let mut r = rows.clone();
                r.intersect_with(s);
                if !r.is_clear() {
                    let mut c = choice.clone();
                    c.push(i);
                    next.push((c, r));
                }
            }
        }
        if next.len() > limit {
            return Err(Error::budget(
                "join items",
                next.len() as u128,
                limit as u128,
            ));
        }
        frontier = next;
    }
    Ok(frontier)
}

/// Whether every nonempty item of `⋁ covers` lies inside some item of `target`.
pub fn join_refines(covers: &[OpenCover], target: &OpenCover, sys: &ShiftSystem) -> Result<bool> {
    let mut all: Vec<&OpenCover> = covers.iter().collect();
    all.push(target);
    let (universe, sets) = member_rows(&all, sys)?;
    let (target_sets, cover_sets) = sets.split_last().unwrap();
    let joined = join_rows(cover_sets, universe.possible.len(), sys.budget().max_items)?;
    Ok(joined
        .iter()
        .all(|(_, rows)| target_sets.iter().any(|t| rows.is_subset(t))))
}

/// `⋁ covers` with items materialized as cylinders on the joint domain.
pub fn join_covers(covers: &[OpenCover], sys: &ShiftSystem) -> Result<OpenCover> {
    let refs: Vec<&OpenCover> = covers.iter().collect();
    let (universe, sets) = member_rows(&refs, sys)?;
    let joined = join_rows(&sets, universe.possible.len(), sys.budget().max_items)?;
    let alphabet = covers
        .first()
        .ok_or_else(|| Error::Invalid("empty cover list".into()))?
        .alphabet();
    let mut items = Vec::with_capacity(joined.len());
    for (choice, _) in &joined {
        let parts: Vec<CylinderSet> = choice
            .iter()
            .zip(covers)
            .map(|(&i, c)| c.items[i].clone())
            .collect();
        items.push(CylinderSet::intersect_all(&parts)?.normalize());
    }
    if items.is_empty() {
        items.push(CylinderSet::empty(alphabet));
    }
    OpenCover::new(items)
}

/// Covers built from a pairwise disjoint family, with their join.
#[derive(Debug, Clone)]
pub struct TupleCovers {
    /// `𝒰_j = {A_{j,1} ∪ V_j, .., A_{j,k_j} ∪ V_j}` with `V_j = X \ ⋃_i A_{j,i}`.
    pub per_tuple: Vec<OpenCover>,
    pub joined: OpenCover,
}

pub fn cover_from_tuples(family: &Family, sys: &ShiftSystem) -> Result<TupleCovers> {
    if family.is_empty() {
        return Err(Error::Precondition("empty family".into()));
    }
    let mut per_tuple = Vec::with_capacity(family.len());
    for (j, t) in family.tuples().iter().enumerate() {
        let (disjoint, _) = t.pairwise_disjoint(sys)?;
        if !disjoint {
            return Err(Error::Precondition(format!(
                "tuple {j} has intersecting entries"
            )));
        }
        let union = t.entries()[1..]
            .iter()
            .try_fold(t.entries()[0].clone(), |acc, e| acc.union(e))?;
        let v = union.complement()?.normalize();
        let items = t
            .entries()
            .iter()
            .map(|a| a.union(&v).map(|c| c.normalize()))
            .collect::<Result<Vec<_>>>()?;
        per_tuple.push(OpenCover::new(items)?);
    }
    let joined = join_covers(&per_tuple, sys)?;
    Ok(TupleCovers { per_tuple, joined })
}

/// `𝐀_j = (X \ U_{j,1}, X \ U_{j,2})` for each two-element cover `{U_{j,1}, U_{j,2}}`.
pub fn tuples_from_two_covers(covers: &[OpenCover]) -> Result<Family> {
    covers
        .iter()
        .map(|c| {
            if c.len() != 2 {
                return Err(Error::Precondition(format!(
                    "expected a two-element cover, got {} items",
                    c.len()
                )));
            }
            SetTuple::new(vec![
                c.items[0].complement()?.normalize(),
                c.items[1].complement()?.normalize(),
            ])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::ring::GroupRingElement;
    use crate::subshift::Alphabet;

    fn z_full() -> ShiftSystem {
        ShiftSystem::full(GroupSpec::free_abelian(1).unwrap(), Alphabet::Plain(2)).unwrap()
    }

    #[test]
    fn validation() {
        let sys = z_full();
        let e = sys.group().identity();
        assert!(
            validate_cover(&OpenCover::new(vec![sys.whole()]).unwrap(), &sys)
                .unwrap()
                .covers
        );
        assert!(
            validate_cover(&OpenCover::value_partition(2, &e).unwrap(), &sys)
                .unwrap()
                .covers
        );
        let half = OpenCover::new(vec![CylinderSet::pinned(2, &[(e, 0)]).unwrap()]).unwrap();
        let check = validate_cover(&half, &sys).unwrap();
        assert!(!check.covers);
        assert_eq!(check.uncovered, Some(vec![1]));
    }

    #[test]
    fn pullback_on_z() {
        let sys = z_full();
        let g = sys.group().clone();
        let cover = OpenCover::value_partition(2, &g.identity()).unwrap();
        let jc = refine_pullback(&cover, &g.ball(1), &sys).unwrap();
        assert!(jc.is_partition());
        assert_eq!(jc.item_count(), 8);
        assert_eq!(
            minimal_subcover_count(&jc, &sys).unwrap(),
            SubcoverCount { low: 8, high: 8 }
        );
        let single = refine_pullback(&cover, &FiniteSubset::singleton(g.identity()), &sys).unwrap();
        assert_eq!(single.item_count(), 2);
    }

    #[test]
    fn pullback_on_coset_system() {
        let g = GroupSpec::free(2).unwrap();
        let f = GroupRingElement::parse(&g, "a - e").unwrap();
        let sys = ShiftSystem::linear(g.clone(), 2, f).unwrap();
        let cover = OpenCover::value_partition(2, &g.identity()).unwrap();
        let region = FiniteSubset::new([g.identity(), g.parse("a").unwrap()]);
        let jc = refine_pullback(&cover, &region, &sys).unwrap();
        assert_eq!(jc.item_count(), 2);
    }

    #[test]
    fn overlapping_cover_uses_set_cover() {
        let sys = z_full();
        let g = sys.group().clone();
        let e = g.identity();
        let one = g.parse("(1)").unwrap();
        // {x_0 = 0}, {x_0 = 1}, whole space
        let cover = OpenCover::new(vec![
            CylinderSet::pinned(2, &[(e.clone(), 0)]).unwrap(),
            CylinderSet::pinned(2, &[(e, 1)]).unwrap(),
            sys.whole(),
        ])
        .unwrap();
        let region = FiniteSubset::new([g.identity(), one]);
        let jc = refine_pullback(&cover, &region, &sys).unwrap();
        assert!(!jc.is_partition());
        assert_eq!(minimal_subcover_count(&jc, &sys).unwrap().high, 1);
    }

    #[test]
    fn entropy_of_full_shift() {
        let sys = z_full();
        let g = sys.group().clone();
        let cover = OpenCover::value_partition(2, &g.identity()).unwrap();
        let regions: Vec<Region> = (0..=3)
            .map(|r| Region::new(format!("ball-{r}"), g.ball(r)))
            .collect();
        let report = naive_entropy_upper(&cover, &sys, &regions).unwrap();
        let ln2 = LogRatio::new(2u32, 1).unwrap();
        assert_eq!(
            report.min_ratio.unwrap().cmp(&ln2),
            std::cmp::Ordering::Equal
        );
        assert!(report.rows.iter().all(|r| r.n.unwrap().high == 1 << r.size));
    }

    #[test]
    fn density_lower_bound() {
        assert!(entropy_lower_from_density(Ratio::from_integer(0), 2)
            .unwrap()
            .is_zero());
        let q = entropy_lower_from_density(Ratio::new(1, 4), 3).unwrap();
        assert!((q.to_f64() - 3f64.ln() / 4.0).abs() < 1e-12);
        assert!(entropy_lower_from_density(Ratio::new(3, 2), 2).is_err());
    }

    #[test]
    fn two_covers_refine_partition() {
        let g = GroupSpec::free_abelian(1).unwrap();
        let sys = ShiftSystem::full(g.clone(), Alphabet::Plain(3)).unwrap();
        let cover = OpenCover::value_partition(3, &g.identity()).unwrap();
        let covers = two_cover_reduction(&cover, &sys).unwrap();
        assert_eq!(covers.len(), 3);
        assert!(join_refines(&covers, &cover, &sys).unwrap());
        let pair = OpenCover::value_partition(2, &g.identity()).unwrap();
        let sys2 = ShiftSystem::full(g, Alphabet::Plain(2)).unwrap();
        assert_eq!(two_cover_reduction(&pair, &sys2).unwrap(), vec![pair]);
    }

    #[test]
    fn tuple_cover_round_trip() {
        let sys = z_full();
        let e = sys.group().identity();
        let family = Family::new(vec![SetTuple::coordinate(2, &e).unwrap()]);
        let built = cover_from_tuples(&family, &sys).unwrap();
        let partition = OpenCover::value_partition(2, &e).unwrap();
        for (a, b) in built.per_tuple[0].items().iter().zip(partition.items()) {
            assert!(a.same_set(b).unwrap());
        }
        let back = tuples_from_two_covers(&built.per_tuple).unwrap();
        let t = &back.tuples()[0];
        assert!(t
            .entry(0)
            .same_set(&CylinderSet::pinned(2, &[(e.clone(), 1)]).unwrap())
            .unwrap());
        assert!(t.pairwise_disjoint(&sys).unwrap().0);
    }
}
