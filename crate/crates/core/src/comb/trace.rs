//! Trace sets `S ⊆ {0,..,k}^Z`, the cover number `N_S` and full shattering.

use fixedbitset::FixedBitSet;
use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::SetTuple;
use crate::group::FiniteSubset;
use crate::setcover::{min_set_cover, Mask};
use crate::subshift::ShiftSystem;

/// Largest number of cells `(k+1)^n` a trace set may have.
pub const MAX_CELLS: u64 = 1 << 26;

/// A set of maps `Z → {0,..,k}` with `|Z| = n`, stored as a bitset over cells. Cell
/// index of `φ` is `Σ_z φ(z) (k+1)^z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSet {
    k: u8,
    n: usize,
    labels: Vec<String>,
    cells: FixedBitSet,
}

fn cell_count(k: u8, n: usize) -> Result<usize> {
    if k == 0 {
        return Err(Error::Invalid("k must be at least 1".into()));
    }
    let total = (k as u64 + 1)
        .checked_pow(n as u32)
        .filter(|&c| c <= MAX_CELLS);
    total.map(|c| c as usize).ok_or_else(|| {
        Error::budget(
            "trace cells",
            (k as u128 + 1).saturating_pow(n as u32),
            MAX_CELLS as u128,
        )
    })
}

impl TraceSet {
    pub fn new(k: u8, n: usize) -> Result<Self> {
        let cells = cell_count(k, n)?;
        let labels = (1..=n).map(|z| z.to_string()).collect();
        Ok(TraceSet {
            k,
            n,
            labels,
            cells: FixedBitSet::with_capacity(cells),
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::Invalid(format!(
                "{} labels for {} coordinates",
                labels.len(),
                self.n
            )));
        }
        self.labels = labels;
        Ok(self)
    }

    /// `[k]^Z`: every map avoiding 0.
    pub fn full_cube(k: u8, n: usize) -> Result<Self> {
        let mut s = Self::new(k, n)?;
        for m in (0..n).map(|_| 1..=k).multi_cartesian_product() {
            s.insert(&m)?;
        }
        Ok(s)
    }

    pub fn from_maps<'a>(
        k: u8,
        n: usize,
        maps: impl IntoIterator<Item = &'a [u8]>,
    ) -> Result<Self> {
        let mut s = Self::new(k, n)?;
        for m in maps {
            s.insert(m)?;
        }
        Ok(s)
    }

    /// Trace set from a bitmask over cells, for `(k+1)^n ≤ 128`.
    pub fn from_mask(k: u8, n: usize, mask: u128) -> Result<Self> {
        let mut s = Self::new(k, n)?;
        if s.cells.len() > 128 {
            return Err(Error::Invalid("mask form needs at most 128 cells".into()));
        }
        mask.for_each(|i| s.cells.insert(i));
        Ok(s)
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.cells.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_clear()
    }

    pub fn cell_of(&self, map: &[u8]) -> Result<usize> {
        if map.len() != self.n {
            return Err(Error::Invalid(format!(
                "map of length {} on {} coordinates",
                map.len(),
                self.n
            )));
        }
        let base = self.k as usize + 1;
        map.iter().rev().try_fold(0usize, |acc, &v| {
            if v > self.k {
                Err(Error::Invalid(format!("value {v} above k = {}", self.k)))
            } else {
                Ok(acc * base + v as usize)
            }
        })
    }

    pub fn decode(&self, cell: usize) -> Vec<u8> {
        let base = self.k as usize + 1;
        let mut x = cell;
        (0..self.n)
            .map(|_| {
                let v = (x % base) as u8;
                x /= base;
                v
            })
            .collect()
    }

    pub fn insert(&mut self, map: &[u8]) -> Result<()> {
        let c = self.cell_of(map)?;
        self.cells.insert(c);
        Ok(())
    }

    pub fn contains(&self, map: &[u8]) -> bool {
        self.cell_of(map).is_ok_and(|c| self.cells.contains(c))
    }

    /// Elements in cell order.
    pub fn maps(&self) -> impl Iterator<Item = Vec<u8>> + '_ {
        self.cells.ones().map(|c| self.decode(c))
    }

    pub fn is_subset(&self, other: &TraceSet) -> bool {
        self.k == other.k && self.n == other.n && self.cells.is_subset(&other.cells)
    }
}

/// `∏_z ({0,..,k} \ {i_z})` with `i_z ∈ [k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WItem {
    pub excluded: Vec<u8>,
}

impl WItem {
    pub fn covers(&self, map: &[u8]) -> bool {
        map.iter().zip(&self.excluded).all(|(v, i)| v != i)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NsCover {
    pub count: usize,
    pub items: Vec<WItem>,
}

/// Exclusion values worth trying per coordinate: a value of `[k]` that no element of
/// `S` takes at `z` excludes nothing there and dominates every other choice, so the
/// smallest such value is used alone.
fn candidate_exclusions(maps: &[Vec<u8>], k: u8, n: usize) -> Vec<Vec<u8>> {
    (0..n)
        .map(|z| {
            let mut seen = vec![false; k as usize + 1];
            for m in maps {
                seen[m[z] as usize] = true;
            }
            match (1..=k).find(|&v| !seen[v as usize]) {
                Some(v) => vec![v],
                None => (1..=k).collect(),
            }
        })
        .collect()
}

/// Exact `N_S`: the least number of `𝒲` items whose union contains `S`.
pub fn ns_cover_number(s: &TraceSet, item_limit: usize, node_budget: u64) -> Result<NsCover> {
    if s.is_empty() {
        return Err(Error::Precondition("N_S needs a nonempty trace set".into()));
    }
    let maps: Vec<Vec<u8>> = s.maps().collect();
    let choices = candidate_exclusions(&maps, s.k, s.n);
    let total = choices
        .iter()
        .try_fold(1u128, |acc, c| acc.checked_mul(c.len() as u128))
        .unwrap_or(u128::MAX);
    if total > item_limit as u128 {
        return Err(Error::budget("W items", total, item_limit as u128));
    }
    let mut items: Vec<(FixedBitSet, WItem)> = Vec::new();
    for excluded in choices
        .iter()
        .map(|c| c.iter().copied())
        .multi_cartesian_product()
    {
        let item = WItem { excluded };
        let mut mask = FixedBitSet::with_capacity(maps.len());
        for (i, m) in maps.iter().enumerate() {
            if item.covers(m) {
                mask.insert(i);
            }
        }
        if !mask.is_clear() {
            items.push((mask, item));
        }
    }
    items.sort_by(|a, b| a.0.ones().cmp(b.0.ones()).then_with(|| a.1.cmp(&b.1)));
    items.dedup_by(|a, b| a.0 == b.0);
    let masks: Vec<FixedBitSet> = items.iter().map(|(m, _)| m.clone()).collect();
    let mut universe = FixedBitSet::with_capacity(maps.len());
    universe.insert_range(..);
    let sol = min_set_cover(&universe, &masks, node_budget)?
        .ok_or_else(|| Error::Invalid("W items failed to cover the trace set".into()))?;
    let items = sol.chosen.iter().map(|&i| items[i].1.clone()).collect();
    Ok(NsCover {
        count: sol.size,
        items,
    })
}

/// Precomputed item masks for trace sets with at most 128 cells, for sweeping many
/// trace sets of one shape.
#[derive(Debug, Clone)]
pub struct WCoverTable {
    k: u8,
    n: usize,
    masks: Vec<u128>,
}

impl WCoverTable {
    pub fn new(k: u8, n: usize) -> Result<Self> {
        let cells = cell_count(k, n)?;
        if cells > 128 {
            return Err(Error::Invalid(format!(
                "{cells} cells exceed the 128-cell table"
            )));
        }
        let probe = TraceSet::new(k, n)?;
        let masks = (0..n)
            .map(|_| 1..=k)
            .multi_cartesian_product()
            .map(|excluded| {
                let item = WItem { excluded };
                (0..cells)
                    .filter(|&c| item.covers(&probe.decode(c)))
                    .fold(0u128, |m, c| m | 1 << c)
            })
            .collect();
        Ok(WCoverTable { k, n, masks })
    }

    pub fn k(&self) -> u8 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `N_S` for the trace set with the given cell mask (nonzero).
    pub fn ns_of_mask(&self, s: u128, buf: &mut Vec<u128>) -> Result<usize> {
        if s == 0 {
            return Err(Error::Precondition("N_S needs a nonempty trace set".into()));
        }
        if self.n == 0 {
            return Ok(1);
        }
        buf.clear();
        buf.extend(self.masks.iter().map(|m| m & s).filter(|&m| m != 0));
        buf.sort_unstable();
        buf.dedup();
        let sol = min_set_cover(&s, buf, u64::MAX)?.expect("W items cover every cell");
        Ok(sol.size)
    }
}

/// Result of [`full_shatter_max`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Shatter {
    /// Coordinates of `J`, zero-based and increasing.
    pub set: Vec<usize>,
    pub size: usize,
}

/// Whether the restrictions of `S` to `J` contain `[k]^J`.
pub fn shatters(maps: &[Vec<u8>], k: u8, j: &[usize]) -> bool {
    let need = (k as usize).pow(j.len() as u32);
    if maps.len() < need {
        return false;
    }
    let mut seen = FixedBitSet::with_capacity(need);
    for m in maps {
        let mut idx = 0usize;
        let mut ok = true;
        for &z in j {
            let v = m[z];
            if v == 0 {
                ok = false;
                break;
            }
            idx = idx * k as usize + (v - 1) as usize;
        }
        if ok {
            seen.insert(idx);
        }
    }
    seen.count_ones(..) == need
}

/// Largest `J ⊆ Z` with `S|_J ⊇ [k]^J`, searched by decreasing size; sizes with
/// `k^|J| > |S|` are skipped.
pub fn full_shatter_max(s: &TraceSet) -> Shatter {
    let maps: Vec<Vec<u8>> = s.maps().filter(|m| m.iter().any(|&v| v != 0)).collect();
    let count = maps.len() as u128;
    let k = s.k as u128;
    let mut top = 0;
    while top < s.n && k.saturating_pow(top as u32 + 1) <= count {
        top += 1;
    }
    for size in (1..=top).rev() {
        for j in (0..s.n).combinations(size) {
            if shatters(&maps, s.k, &j) {
                return Shatter { size, set: j };
            }
        }
    }
    Shatter {
        set: Vec::new(),
        size: 0,
    }
}

/// `φ(x)(s) = i` when `x ∈ s^-1 A_i` (1-based) and `0` when `x` lies in no entry; the
/// trace `φ(X)` over the region, with the region's canonical order as coordinates.
/// The flag is false when some pattern of the system was not certified.
pub fn membership_trace(
    tuple: &SetTuple,
    region: &FiniteSubset,
    sys: &ShiftSystem,
) -> Result<(TraceSet, bool)> {
    let k = u8::try_from(tuple.k()).map_err(|_| Error::Invalid("too many entries".into()))?;
    let shifted: Vec<Vec<crate::subshift::CylinderSet>> = region
        .iter()
        .map(|s| tuple.entries().iter().map(|a| a.shift(s)).collect())
        .collect();
    let domain = shifted
        .iter()
        .flatten()
        .fold(FiniteSubset::empty(), |acc, c| acc.union(c.domain()));
    let universe = sys.universe(&domain)?;
    let labels = region.iter().map(|g| sys.group().format(g)).collect();
    let mut trace = TraceSet::new(k, region.len())?.with_labels(labels)?;
    let mut map = vec![0u8; region.len()];
    for row in universe.possible.rows() {
        for (slot, entries) in map.iter_mut().zip(&shifted) {
            *slot = 0;
            for (i, a) in entries.iter().enumerate() {
                if a.accepts(&domain, row) {
                    if *slot != 0 {
                        return Err(Error::Precondition("tuple entries intersect".into()));
                    }
                    *slot = i as u8 + 1;
                }
            }
        }
        trace.insert(&map)?;
    }
    Ok((trace, universe.is_exact()))
}
