//! Exact minimum set cover by branch and bound.
//!
//! Branching picks the uncovered element with the fewest covering items and tries
//! those items largest-first (ties by index), so results are reproducible. The bound
//! is `ceil(uncovered / largest remaining coverage)`; the incumbent starts from the
//! greedy cover.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// A set of element indices.
pub trait Mask: Clone {
    fn count(&self) -> usize;
    fn is_clear(&self) -> bool;
    fn overlap(&self, other: &Self) -> usize;
    fn intersects(&self, other: &Self) -> bool;
    fn minus(&self, other: &Self) -> Self;
    fn has(&self, i: usize) -> bool;
    fn is_within(&self, other: &Self) -> bool;
    fn for_each(&self, f: impl FnMut(usize));
}

macro_rules! int_mask {
    ($t:ty) => {
        impl Mask for $t {
            fn count(&self) -> usize {
                self.count_ones() as usize
            }
            fn is_clear(&self) -> bool {
                *self == 0
            }
            fn overlap(&self, other: &Self) -> usize {
                (self & other).count_ones() as usize
            }
            fn intersects(&self, other: &Self) -> bool {
                self & other != 0
            }
            fn minus(&self, other: &Self) -> Self {
                self & !other
            }
            fn has(&self, i: usize) -> bool {
                (self >> i) & 1 == 1
            }
            fn is_within(&self, other: &Self) -> bool {
                self & !other == 0
            }
            fn for_each(&self, mut f: impl FnMut(usize)) {
                let mut m = *self;
                while m != 0 {
                    f(m.trailing_zeros() as usize);
                    m &= m - 1;
                }
            }
        }
    };
}

int_mask!(u32);
int_mask!(u64);
int_mask!(u128);

impl Mask for FixedBitSet {
    fn count(&self) -> usize {
        self.count_ones(..)
    }
    fn is_clear(&self) -> bool {
        self.is_clear()
    }
    fn overlap(&self, other: &Self) -> usize {
        self.intersection_count(other)
    }
    fn intersects(&self, other: &Self) -> bool {
        !self.is_disjoint(other)
    }
    fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.difference_with(other);
        out
    }
    fn has(&self, i: usize) -> bool {
        self.contains(i)
    }
    fn is_within(&self, other: &Self) -> bool {
        self.is_subset(other)
    }
    fn for_each(&self, mut f: impl FnMut(usize)) {
        for i in self.ones() {
            f(i);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverSolution {
    pub size: usize,
    /// Indices of the chosen items, ascending.
    pub chosen: Vec<usize>,
    pub nodes: u64,
}

struct Search<'a, M: Mask> {
    items: &'a [M],
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    node_budget: u64,
}

impl<M: Mask> Search<'_, M> {
    fn run(&mut self, uncovered: &M) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.node_budget {
            return Err(Error::budget(
                "set cover search nodes",
                self.nodes as u128,
                self.node_budget as u128,
            ));
        }
        if uncovered.is_clear() {
            if self.current.len() < self.best.len() {
                self.best = self.current.clone();
            }
            return Ok(());
        }
        if self.current.len() + 1 >= self.best.len() {
            // Need at least one more item, which cannot beat the incumbent.
            return Ok(());
        }
        let max_gain = self
            .items
            .iter()
            .map(|it| it.overlap(uncovered))
            .max()
            .unwrap_or(0);
        if max_gain == 0 {
            return Ok(());
        }
        let lower = uncovered.count().div_ceil(max_gain);
        if self.current.len() + lower >= self.best.len() {
            return Ok(());
        }
        // Element with the fewest covering items.
        let mut pivot = None;
        let mut pivot_count = usize::MAX;
        uncovered.for_each(|e| {
            if pivot_count <= 1 {
                return;
            }
            let c = self.items.iter().filter(|it| it.has(e)).count();
            if c < pivot_count {
                pivot_count = c;
                pivot = Some(e);
            }
        });
        let pivot = pivot.expect("nonempty uncovered set");
        let mut branches: Vec<(usize, usize)> = self
            .items
            .iter()
            .enumerate()
            .filter(|(_, it)| it.has(pivot))
            .map(|(i, it)| (it.overlap(uncovered), i))
            .collect();
        branches.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        for (_, i) in branches {
            self.current.push(i);
            let rest = uncovered.minus(&self.items[i]);
            self.run(&rest)?;
            self.current.pop();
        }
        Ok(())
    }
}

/// Greedy cover: repeatedly take the item covering most uncovered elements.
pub fn greedy_cover<M: Mask>(universe: &M, items: &[M]) -> Option<Vec<usize>> {
    let mut uncovered = universe.clone();
    let mut chosen = Vec::new();
    while !uncovered.is_clear() {
        let (i, gain) = items
            .iter()
            .enumerate()
            .map(|(i, it)| (i, it.overlap(&uncovered)))
            .fold((0, 0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if gain == 0 {
            return None;
        }
        chosen.push(i);
        uncovered = uncovered.minus(&items[i]);
    }
    Some(chosen)
}

/// Minimum number of `items` whose union contains `universe`, or `None` when the
/// items cannot cover it.
pub fn min_set_cover<M: Mask>(
    universe: &M,
    items: &[M],
    node_budget: u64,
) -> Result<Option<CoverSolution>> {
    let Some(greedy) = greedy_cover(universe, items) else {
        return Ok(None);
    };
    let mut search = Search {
        items,
        best: greedy,
        current: Vec::new(),
        nodes: 0,
        node_budget,
    };
    if search.best.len() > 1 {
        search.run(universe)?;
    }
    let mut chosen = search.best;
    chosen.sort_unstable();
    Ok(Some(CoverSolution {
        size: chosen.len(),
        chosen,
        nodes: search.nodes,
    }))
}
