//! Cylinder sets: a finite coordinate domain plus an explicit set of allowed patterns.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::group::{FiniteSubset, GroupElement};

/// Hard cap on the number of patterns a single cylinder may hold.
pub const MAX_PATTERNS: usize = 1 << 22;

/// Sorted, duplicate-free rows of a fixed width, stored flat.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternSet {
    width: usize,
    count: usize,
    data: Arc<[u8]>,
}

impl PatternSet {
    pub fn empty(width: usize) -> Self {
        PatternSet {
            width,
            count: 0,
            data: Arc::from(Vec::new()),
        }
    }

    /// Builds from arbitrary rows; sorts and deduplicates.
    pub fn from_rows(width: usize, mut rows: Vec<Vec<u8>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.len() == width));
        rows.sort_unstable();
        rows.dedup();
        let count = rows.len();
        let data: Vec<u8> = rows.concat();
        PatternSet {
            width,
            count,
            data: data.into(),
        }
    }

    /// Builds from a flat buffer of rows that are already sorted and unique.
    fn from_sorted_flat(width: usize, count: usize, data: Vec<u8>) -> Self {
        PatternSet {
            width,
            count,
            data: data.into(),
        }
    }

    fn from_flat_unsorted(width: usize, data: Vec<u8>) -> Self {
        if width == 0 {
            let count = usize::from(!data.is_empty() || false);
            return PatternSet {
                width,
                count,
                data: Arc::from(Vec::new()),
            };
        }
        let mut rows: Vec<&[u8]> = data.chunks_exact(width).collect();
        rows.sort_unstable();
        rows.dedup();
        let count = rows.len();
        let flat: Vec<u8> = rows.concat();
        PatternSet {
            width,
            count,
            data: flat.into(),
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u8]> + '_ {
        (0..self.count).map(move |i| self.row(i))
    }

    pub fn contains(&self, row: &[u8]) -> bool {
        if self.width == 0 {
            return self.count > 0;
        }
        let (mut lo, mut hi) = (0, self.count);
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.row(mid).cmp(row) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

/// A clopen subset of `A^Γ` given by a finite domain and allowed patterns on it.
///
/// Row values are listed in the canonical order of the domain. A cylinder with
/// empty domain and one (empty) row is the whole space; no rows means the empty set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CylinderSet {
    alphabet: u8,
    domain: FiniteSubset,
    patterns: PatternSet,
}

fn check_budget(what: &str, n: u128) -> Result<()> {
    if n > MAX_PATTERNS as u128 {
        Err(Error::budget(what, n, MAX_PATTERNS as u128))
    } else {
        Ok(())
    }
}

/// Number of words of length `len` over an alphabet of size `m`, saturating.
pub(crate) fn word_count(m: u8, len: usize) -> u128 {
    let mut n: u128 = 1;
    for _ in 0..len {
        n = n.saturating_mul(m as u128);
        if n > u64::MAX as u128 {
            return n;
        }
    }
    n
}

impl CylinderSet {
    pub fn whole(alphabet: u8) -> Self {
        CylinderSet {
            alphabet,
            domain: FiniteSubset::empty(),
            patterns: PatternSet {
                width: 0,
                count: 1,
                data: Arc::from(Vec::new()),
            },
        }
    }

    pub fn empty(alphabet: u8) -> Self {
        CylinderSet {
            alphabet,
            domain: FiniteSubset::empty(),
            patterns: PatternSet::empty(0),
        }
    }

    /// Rows must be aligned with the canonical order of `domain`.
    pub fn new(alphabet: u8, domain: FiniteSubset, rows: Vec<Vec<u8>>) -> Result<Self> {
        let width = domain.len();
        for r in &rows {
            if r.len() != width {
                return Err(Error::Invalid(format!(
                    "pattern of length {} on a domain of size {width}",
                    r.len()
                )));
            }
            if let Some(v) = r.iter().find(|&&v| v >= alphabet) {
                return Err(Error::Invalid(format!(
                    "letter {v} outside alphabet of size {alphabet}"
                )));
            }
        }
        check_budget("cylinder patterns", rows.len() as u128)?;
        if width == 0 {
            let count = usize::from(!rows.is_empty());
            return Ok(CylinderSet {
                alphabet,
                domain,
                patterns: PatternSet {
                    width: 0,
                    count,
                    data: Arc::from(Vec::new()),
                },
            });
        }
        Ok(CylinderSet {
            alphabet,
            domain,
            patterns: PatternSet::from_rows(width, rows),
        })
    }

    /// Cylinder pinning each listed coordinate to a single value.
    pub fn pinned(alphabet: u8, assignment: &[(GroupElement, u8)]) -> Result<Self> {
        let domain = FiniteSubset::new(assignment.iter().map(|(g, _)| g.clone()));
        if domain.len() != assignment.len() {
            return Err(Error::Invalid("coordinate pinned twice".into()));
        }
        let mut row = vec![0u8; domain.len()];
        for (g, v) in assignment {
            row[domain.index_of(g).unwrap()] = *v;
        }
        Self::new(alphabet, domain, vec![row])
    }

    /// `{x : x_t ∈ values}`
    pub fn value_set(alphabet: u8, t: GroupElement, values: &[u8]) -> Result<Self> {
        Self::new(
            alphabet,
            FiniteSubset::singleton(t),
            values.iter().map(|&v| vec![v]).collect(),
        )
    }

    /// All patterns on `domain` accepted by `pred`.
    pub fn from_predicate(
        alphabet: u8,
        domain: FiniteSubset,
        mut pred: impl FnMut(&[u8]) -> bool,
    ) -> Result<Self> {
        let total = word_count(alphabet, domain.len());
        check_budget("cylinder enumeration", total)?;
        let width = domain.len();
        let mut data = Vec::new();
        let mut count = 0;
        for_each_word(alphabet, width, |row| {
            if pred(row) {
                data.extend_from_slice(row);
                count += 1;
            }
        });
        if width == 0 {
            return Ok(CylinderSet {
                alphabet,
                domain,
                patterns: PatternSet {
                    width: 0,
                    count,
                    data: Arc::from(Vec::new()),
                },
            });
        }
        Ok(CylinderSet {
            alphabet,
            domain,
            patterns: PatternSet::from_sorted_flat(width, count, data),
        })
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn domain(&self) -> &FiniteSubset {
        &self.domain
    }

    pub fn patterns(&self) -> &PatternSet {
        &self.patterns
    }

    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    /// No allowed pattern at all: the empty set regardless of the ambient system.
    pub fn is_trivially_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    /// Every pattern on the domain is allowed: the whole space.
    pub fn is_trivially_whole(&self) -> bool {
        word_count(self.alphabet, self.domain.len()) == self.patterns.len() as u128
    }

    /// Membership of a configuration given by a coordinate lookup.
    pub fn contains_point(&self, x: impl Fn(&GroupElement) -> u8) -> bool {
        let row: Vec<u8> = self.domain.iter().map(&x).collect();
        self.patterns.contains(&row)
    }

    /// Whether a pattern on `domain` (a superset of this cylinder's domain) restricts
    /// into the allowed set.
    pub fn accepts(&self, domain: &FiniteSubset, row: &[u8]) -> bool {
        let proj: Vec<u8> = self
            .domain
            .iter()
            .map(|g| row[domain.index_of(g).expect("domain not covered")])
            .collect();
        self.patterns.contains(&proj)
    }

    /// Values taken at coordinate `t` by the allowed patterns (all letters if `t`
    /// is outside the domain).
    pub fn values_at(&self, t: &GroupElement) -> Vec<u8> {
        match self.domain.index_of(t) {
            None => (0..self.alphabet).collect(),
            Some(i) => {
                let mut seen = vec![false; self.alphabet as usize];
                for r in self.patterns.rows() {
                    seen[r[i] as usize] = true;
                }
                (0..self.alphabet).filter(|&v| seen[v as usize]).collect()
            }
        }
    }

    /// `s^-1 C = {x : s x ∈ C}`. Since `(s x)_t = x_{s^-1 t}`, the new domain is
    /// `s^-1 · domain(C)` and the value at `s^-1 d` is the old value at `d`.
    pub fn shift(&self, s: &GroupElement) -> CylinderSet {
        if s.is_identity() || self.domain.is_empty() {
            return self.clone();
        }
        let sinv = s.inverse();
        let moved: Vec<GroupElement> = self.domain.iter().map(|d| sinv.mul(d)).collect();
        let new_domain = FiniteSubset::new(moved.iter().cloned());
        let perm: Vec<usize> = moved
            .iter()
            .map(|g| new_domain.index_of(g).unwrap())
            .collect();
        let width = self.domain.len();
        if perm.iter().enumerate().all(|(i, &p)| i == p) {
            return CylinderSet {
                alphabet: self.alphabet,
                domain: new_domain,
                patterns: self.patterns.clone(),
            };
        }
        let mut data = vec![0u8; width * self.patterns.len()];
        for (ri, r) in self.patterns.rows().enumerate() {
            let out = &mut data[ri * width..(ri + 1) * width];
            for (i, &p) in perm.iter().enumerate() {
                out[p] = r[i];
            }
        }
        CylinderSet {
            alphabet: self.alphabet,
            domain: new_domain,
            patterns: PatternSet::from_flat_unsorted(width, data),
        }
    }

    /// `s C = {s x : x ∈ C}`.
    pub fn translate(&self, s: &GroupElement) -> CylinderSet {
        self.shift(&s.inverse())
    }

    fn check_alphabet(&self, other: &CylinderSet) -> Result<()> {
        if self.alphabet != other.alphabet {
            return Err(Error::Invalid(format!(
                "cylinders over alphabets of size {} and {}",
                self.alphabet, other.alphabet
            )));
        }
        Ok(())
    }

    /// Natural join: patterns on the union domain whose restrictions are allowed by both.
    pub fn intersect(&self, other: &CylinderSet) -> Result<CylinderSet> {
        self.check_alphabet(other)?;
        if self.is_trivially_empty() || other.is_trivially_empty() {
            return Ok(CylinderSet::empty(self.alphabet));
        }
        if self.domain.is_empty() {
            return Ok(other.clone());
        }
        if other.domain.is_empty() {
            return Ok(self.clone());
        }
        let union = self.domain.union(&other.domain);
        let width = union.len();
        let pos_a: Vec<usize> = self
            .domain
            .iter()
            .map(|g| union.index_of(g).unwrap())
            .collect();
        let pos_b: Vec<usize> = other
            .domain
            .iter()
            .map(|g| union.index_of(g).unwrap())
            .collect();
        let shared: Vec<(usize, usize)> = self
            .domain
            .iter()
            .enumerate()
            .filter_map(|(ia, g)| other.domain.index_of(g).map(|ib| (ia, ib)))
            .collect();

        let mut index: HashMap<Vec<u8>, Vec<usize>> = HashMap::new();
        for (ri, r) in other.patterns.rows().enumerate() {
            let key: Vec<u8> = shared.iter().map(|&(_, ib)| r[ib]).collect();
            index.entry(key).or_default().push(ri);
        }
        let mut data = Vec::new();
        let mut buf = vec![0u8; width];
        let mut key = Vec::with_capacity(shared.len());
        let mut count: usize = 0;
        for ra in self.patterns.rows() {
            key.clear();
            key.extend(shared.iter().map(|&(ia, _)| ra[ia]));
            let Some(matches) = index.get(&key) else {
                continue;
            };
            for (i, &p) in pos_a.iter().enumerate() {
                buf[p] = ra[i];
            }
            for &rb in matches {
                let rb = other.patterns.row(rb);
                for (i, &p) in pos_b.iter().enumerate() {
                    buf[p] = rb[i];
                }
                data.extend_from_slice(&buf);
                count += 1;
                if count > MAX_PATTERNS {
                    return Err(Error::budget(
                        "cylinder intersection",
                        count as u128,
                        MAX_PATTERNS as u128,
                    ));
                }
            }
        }
        Ok(CylinderSet {
            alphabet: self.alphabet,
            domain: union,
            patterns: PatternSet::from_flat_unsorted(width, data),
        })
    }

    /// Intersection of a nonempty list, joining smallest pattern sets first.
    pub fn intersect_all(sets: &[CylinderSet]) -> Result<CylinderSet> {
        let mut order: Vec<&CylinderSet> = sets.iter().collect();
        let Some(first) = order.first() else {
            return Err(Error::Invalid("intersection of an empty list".into()));
        };
        let alphabet = first.alphabet;
        order.sort_by_key(|c| c.pattern_count());
        let mut acc = CylinderSet::whole(alphabet);
        for c in order {
            acc = acc.intersect(c)?;
            if acc.is_trivially_empty() {
                return Ok(CylinderSet::empty(alphabet));
            }
        }
        Ok(acc)
    }

    /// Same domain, complementary pattern set.
    pub fn complement(&self) -> Result<CylinderSet> {
        let width = self.domain.len();
        let total = word_count(self.alphabet, width);
        check_budget("cylinder complement", total - self.patterns.len() as u128)?;
        let mut data = Vec::new();
        let mut count = 0;
        let mut next = 0;
        for_each_word(self.alphabet, width, |row| {
            if next < self.patterns.len() && self.patterns.row(next) == row {
                next += 1;
            } else {
                data.extend_from_slice(row);
                count += 1;
            }
        });
        if width == 0 {
            return Ok(CylinderSet {
                alphabet: self.alphabet,
                domain: self.domain.clone(),
                patterns: PatternSet {
                    width: 0,
                    count,
                    data: Arc::from(Vec::new()),
                },
            });
        }
        Ok(CylinderSet {
            alphabet: self.alphabet,
            domain: self.domain.clone(),
            patterns: PatternSet::from_sorted_flat(width, count, data),
        })
    }

    /// Pads the pattern set with every letter on the new coordinates.
    pub fn extend_to(&self, domain: &FiniteSubset) -> Result<CylinderSet> {
        if !self.domain.is_subset(domain) {
            return Err(Error::Invalid(
                "extension domain must contain the cylinder domain".into(),
            ));
        }
        if domain.len() == self.domain.len() {
            return Ok(CylinderSet {
                domain: domain.clone(),
                ..self.clone()
            });
        }
        let extra = domain.difference(&self.domain);
        let pad = CylinderSet::from_predicate(self.alphabet, extra, |_| true)?;
        let total = (pad.pattern_count() as u128) * self.pattern_count() as u128;
        check_budget("cylinder extension", total)?;
        self.intersect(&pad)
    }

    pub fn union(&self, other: &CylinderSet) -> Result<CylinderSet> {
        self.check_alphabet(other)?;
        let domain = self.domain.union(&other.domain);
        let a = self.extend_to(&domain)?;
        let b = other.extend_to(&domain)?;
        let width = domain.len();
        if width == 0 {
            let count = a.patterns.len().max(b.patterns.len());
            return Ok(CylinderSet {
                alphabet: self.alphabet,
                domain,
                patterns: PatternSet {
                    width: 0,
                    count,
                    data: Arc::from(Vec::new()),
                },
            });
        }
        let mut data = Vec::new();
        for r in a.patterns.rows().chain(b.patterns.rows()) {
            data.extend_from_slice(r);
        }
        Ok(CylinderSet {
            alphabet: self.alphabet,
            domain,
            patterns: PatternSet::from_flat_unsorted(width, data),
        })
    }

    /// Equality of the represented subsets of the full shift.
    pub fn same_set(&self, other: &CylinderSet) -> Result<bool> {
        self.check_alphabet(other)?;
        let domain = self.domain.union(&other.domain);
        let a = self.extend_to(&domain)?;
        let b = other.extend_to(&domain)?;
        Ok(a.patterns == b.patterns)
    }

    /// Pattern-level inclusion in the full shift.
    pub fn is_subset_of(&self, other: &CylinderSet) -> Result<bool> {
        self.check_alphabet(other)?;
        let domain = self.domain.union(&other.domain);
        let a = self.extend_to(&domain)?;
        let included = a.patterns.rows().all(|r| other.accepts(&domain, r));
        Ok(included)
    }

    /// Restricts to `x_t = v`.
    pub fn pin(&self, t: &GroupElement, v: u8) -> Result<CylinderSet> {
        self.intersect(&CylinderSet::pinned(self.alphabet, &[(t.clone(), v)])?)
    }

    /// Drops coordinates on which the pattern set is a full product factor.
    pub fn normalize(&self) -> CylinderSet {
        let mut cur = self.clone();
        let mut i = 0;
        while i < cur.domain.len() {
            let g = cur.domain.as_slice()[i].clone();
            let rest = FiniteSubset::new(cur.domain.iter().filter(|h| **h != g).cloned());
            let projected: Vec<Vec<u8>> = cur
                .patterns
                .rows()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|(j, _)| *j != i)
                        .map(|(_, v)| *v)
                        .collect()
                })
                .collect();
            let proj = PatternSet::from_rows(rest.len(), projected);
            let free = (proj.len() as u128) * (cur.alphabet as u128) == cur.patterns.len() as u128;
            if free && !cur.patterns.is_empty() {
                let count = proj.len();
                let patterns = if rest.is_empty() {
                    PatternSet {
                        width: 0,
                        count: count.min(1),
                        data: Arc::from(Vec::new()),
                    }
                } else {
                    proj
                };
                cur = CylinderSet {
                    alphabet: cur.alphabet,
                    domain: rest,
                    patterns,
                };
            } else {
                i += 1;
            }
        }
        if cur.patterns.is_empty() {
            return CylinderSet::empty(cur.alphabet);
        }
        cur
    }
}

/// Calls `f` on every word of length `len` in lexicographic order.
pub(crate) fn for_each_word(m: u8, len: usize, mut f: impl FnMut(&[u8])) {
    let mut row = vec![0u8; len];
    if m == 0 {
        if len == 0 {
            f(&row);
        }
        return;
    }
    loop {
        f(&row);
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            row[i] += 1;
            if row[i] < m {
                break;
            }
            row[i] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;

    fn f2() -> GroupSpec {
        GroupSpec::free(2).unwrap()
    }

    fn at(s: &str, v: u8) -> CylinderSet {
        CylinderSet::pinned(2, &[(f2().parse(s).unwrap(), v)]).unwrap()
    }

    #[test]
    fn intersect_two_coordinates() {
        let c = at("e", 0).intersect(&at("a", 1)).unwrap();
        assert_eq!(c.domain().len(), 2);
        assert_eq!(c.pattern_count(), 1);
        let empty = at("e", 0).intersect(&at("e", 1)).unwrap();
        assert!(empty.is_trivially_empty());
    }

    #[test]
    fn complement_laws() {
        let c = at("e", 0).intersect(&at("a", 1)).unwrap();
        let cc = c.complement().unwrap();
        assert_eq!(cc.pattern_count(), 3);
        assert!(c.intersect(&cc).unwrap().is_trivially_empty());
        assert!(cc.complement().unwrap().same_set(&c).unwrap());
        assert!(CylinderSet::whole(2)
            .complement()
            .unwrap()
            .is_trivially_empty());
    }

    #[test]
    fn shift_is_an_action() {
        let g = f2();
        let c = at("a", 1).intersect(&at("b^-1", 0)).unwrap();
        let s = g.parse("a*b").unwrap();
        assert_eq!(c.shift(&s.inverse()).shift(&s), c);
        assert_eq!(c.shift(&g.identity()), c);
        // s^-1 {x_a = 1} has domain s^-1 a
        let shifted = at("a", 1).shift(&s);
        assert_eq!(
            shifted.domain().as_slice(),
            &[s.inverse().mul(&g.parse("a").unwrap())]
        );
    }

    #[test]
    fn union_and_extension() {
        let u = at("e", 0).union(&at("a", 1)).unwrap();
        assert_eq!(u.pattern_count(), 3);
        let padded = at("e", 0).extend_to(u.domain()).unwrap();
        assert_eq!(padded.pattern_count(), 2);
        assert!(padded.same_set(&at("e", 0)).unwrap());
        assert!(at("e", 0).is_subset_of(&u).unwrap());
        assert!(!u.is_subset_of(&at("e", 0)).unwrap());
    }

    #[test]
    fn normalize_drops_free_coordinates() {
        let padded = at("e", 0).extend_to(&f2().ball(1)).unwrap();
        assert_eq!(padded.pattern_count(), 16);
        assert_eq!(padded.normalize(), at("e", 0));
        assert!(CylinderSet::whole(2).normalize().is_trivially_whole());
    }

    #[test]
    fn rejects_bad_letters() {
        assert!(
            CylinderSet::new(2, FiniteSubset::singleton(f2().identity()), vec![vec![2]]).is_err()
        );
    }
}
