//! Brute-force oracles shared by the integration tests. They enumerate configurations
//! on the coordinates involved and never call the library's realizability engines.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use indlab_core::{CylinderSet, GroupElement, SetTuple};

/// How coordinates are tied together in a system.
#[derive(Debug, Clone, Copy)]
pub enum Oracle {
    /// Full shift over `m` letters: every coordinate is free.
    Full(u8),
    /// `x_{ta} = x_t` over `Z/n` on the free group: one free value per left coset of `<a>`.
    ACosets(u8),
}

impl Oracle {
    pub fn letters(self) -> u8 {
        match self {
            Oracle::Full(m) | Oracle::ACosets(m) => m,
        }
    }

    /// Representative of the block a coordinate belongs to.
    pub fn key(self, g: &GroupElement) -> GroupElement {
        match self {
            Oracle::Full(_) => g.clone(),
            Oracle::ACosets(_) => {
                let letters = g.letters().expect("word");
                let mut end = letters.len();
                while end > 0 && letters[end - 1].generator() == 0 {
                    end -= 1;
                }
                GroupElement::from_letters(letters[..end].iter().copied())
            }
        }
    }

    /// Calls `f` with a coordinate lookup for every configuration of the blocks met
    /// by `coords`.
    pub fn for_each_config(
        self,
        coords: &BTreeSet<GroupElement>,
        mut f: impl FnMut(&dyn Fn(&GroupElement) -> u8),
    ) {
        let keys: Vec<GroupElement> = coords
            .iter()
            .map(|g| self.key(g))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let index: BTreeMap<GroupElement, usize> = keys
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, k)| (k, i))
            .collect();
        let m = self.letters() as usize;
        let total = m.checked_pow(keys.len() as u32).expect("oracle too large");
        assert!(total <= 1 << 22, "oracle enumeration too large: {total}");
        let mut vals = vec![0u8; keys.len()];
        for mut x in 0..total {
            for v in vals.iter_mut() {
                *v = (x % m) as u8;
                x /= m;
            }
            let lookup = |g: &GroupElement| vals[index[&self.key(g)]];
            f(&lookup);
        }
    }

    /// Whether some configuration lies in every cylinder.
    pub fn nonempty(self, cyls: &[CylinderSet]) -> bool {
        let coords: BTreeSet<GroupElement> = cyls
            .iter()
            .flat_map(|c| c.domain().iter().cloned())
            .collect();
        let mut found = false;
        self.for_each_config(&coords, |x| {
            if !found && cyls.iter().all(|c| c.contains_point(x)) {
                found = true;
            }
        });
        found
    }

    /// Every membership profile `(index of the entry containing j x)_{j ∈ region}`
    /// (1-based, 0 for none) over configurations `x`; entries must be pairwise disjoint.
    pub fn profiles(self, tuple: &SetTuple, region: &[GroupElement]) -> HashSet<Vec<u8>> {
        let mut coords = BTreeSet::new();
        for j in region {
            let jinv = j.inverse();
            for a in tuple.entries() {
                coords.extend(a.domain().iter().map(|d| jinv.mul(d)));
            }
        }
        let mut out = HashSet::new();
        self.for_each_config(&coords, |x| {
            let profile: Vec<u8> = region
                .iter()
                .map(|j| {
                    let jinv = j.inverse();
                    let moved = |d: &GroupElement| x(&jinv.mul(d));
                    let hits: Vec<usize> = (0..tuple.k())
                        .filter(|&i| tuple.entry(i).contains_point(moved))
                        .collect();
                    assert!(hits.len() <= 1, "entries must be disjoint for profiles");
                    hits.first().map_or(0, |&i| i as u8 + 1)
                })
                .collect();
            out.insert(profile);
        });
        out
    }
}

/// Whether the positions `j` (into the region) form an independence set, given the
/// realized profiles.
pub fn independent_from_profiles(profiles: &HashSet<Vec<u8>>, k: usize, j: &[usize]) -> bool {
    let need = k.pow(j.len() as u32);
    let mut seen = vec![false; need];
    for p in profiles {
        if j.iter().all(|&z| p[z] != 0) {
            let idx = j.iter().fold(0, |acc, &z| acc * k + (p[z] - 1) as usize);
            seen[idx] = true;
        }
    }
    seen.iter().all(|&b| b)
}

/// Largest independence set size by enumerating every subset of the region.
pub fn max_independent_brute(profiles: &HashSet<Vec<u8>>, k: usize, n: usize) -> usize {
    (0u32..1 << n)
        .filter(|mask| {
            let j: Vec<usize> = (0..n).filter(|z| mask >> z & 1 == 1).collect();
            independent_from_profiles(profiles, k, &j)
        })
        .map(|mask| mask.count_ones() as usize)
        .max()
        .unwrap_or(0)
}
