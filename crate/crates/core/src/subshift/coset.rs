//! Exact realizability for linear shifts whose defining element lives in a cyclic
//! subgroup `<g>`. The constraints then decouple along the cosets `t<g>`, and on each
//! coset they form a linear recurrence `Σ_j c_j y_{q+j} ≡ 0 (mod n)` for all `q`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

const MAX_STATES: usize = 1 << 20;

/// De Bruijn style automaton whose states are windows of `w` consecutive values.
#[derive(Debug, Clone)]
pub(crate) struct CosetAutomaton {
    n: u8,
    /// Coefficients `c_0 .. c_w` reduced mod `n`, `c_0` and `c_w` nonzero.
    coeffs: Vec<i64>,
    width: usize,
    /// States lying on a bi-infinite path.
    essential: Vec<bool>,
    any_essential: bool,
}

impl CosetAutomaton {
    /// `coeffs` maps positions in `<g>` to nonzero residues.
    pub(crate) fn new(n: u8, coeffs: &BTreeMap<i64, i64>) -> Result<Self> {
        let (&lo, _) = coeffs
            .first_key_value()
            .ok_or_else(|| Error::Invalid("empty recurrence".into()))?;
        let (&hi, _) = coeffs.last_key_value().unwrap();
        let width = (hi - lo) as usize;
        let dense: Vec<i64> = (lo..=hi)
            .map(|p| coeffs.get(&p).copied().unwrap_or(0))
            .collect();
        let states = (n as usize)
            .checked_pow(width as u32)
            .filter(|&s| s <= MAX_STATES);
        let Some(states) = states else {
            return Err(Error::budget(
                "recurrence states",
                (n as u128).saturating_pow(width as u32),
                MAX_STATES as u128,
            ));
        };
        let mut a = CosetAutomaton {
            n,
            coeffs: dense,
            width,
            essential: vec![true; states],
            any_essential: true,
        };
        if width > 0 {
            a.trim();
        }
        Ok(a)
    }

    fn state_count(&self) -> usize {
        self.essential.len()
    }

    /// Value at offset `j` of a window.
    fn digit(&self, s: usize, j: usize) -> u8 {
        ((s / (self.n as usize).pow(j as u32)) % self.n as usize) as u8
    }

    /// Successor of window `s` when `v` is appended, if the recurrence allows it.
    fn step(&self, s: usize, v: u8) -> Option<usize> {
        let n = self.n as i64;
        let mut sum = self.coeffs[self.width] * v as i64;
        for j in 0..self.width {
            sum += self.coeffs[j] * self.digit(s, j) as i64;
        }
        if sum.rem_euclid(n) != 0 {
            return None;
        }
        let top = (self.n as usize).pow(self.width as u32 - 1);
        Some(s / self.n as usize + v as usize * top)
    }

    /// Removes states without a predecessor or successor until stable.
    fn trim(&mut self) {
        let count = self.state_count();
        loop {
            let mut has_in = vec![false; count];
            let mut has_out = vec![false; count];
            for s in (0..count).filter(|&s| self.essential[s]) {
                for v in 0..self.n {
                    if let Some(t) = self.step(s, v) {
                        if self.essential[t] {
                            has_out[s] = true;
                            has_in[t] = true;
                        }
                    }
                }
            }
            let mut changed = false;
            for s in 0..count {
                if self.essential[s] && !(has_in[s] && has_out[s]) {
                    self.essential[s] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.any_essential = self.essential.iter().any(|&e| e);
    }

    pub(crate) fn is_nonempty(&self) -> bool {
        self.any_essential
    }

    /// Whether values pinned at the given positions (sorted, distinct) extend to a
    /// bi-infinite solution of the recurrence.
    pub(crate) fn extends(&self, pins: &[(i64, u8)]) -> bool {
        if !self.any_essential {
            return false;
        }
        if pins.is_empty() {
            return true;
        }
        if self.width == 0 {
            let c = self.coeffs[0];
            return pins
                .iter()
                .all(|&(_, v)| (c * v as i64).rem_euclid(self.n as i64) == 0);
        }
        let pinned = |p: i64| {
            pins.binary_search_by_key(&p, |&(q, _)| q)
                .ok()
                .map(|i| pins[i].1)
        };
        let w = self.width as i64;
        let first = pins[0].0;
        let last = pins[pins.len() - 1].0;
        let count = self.state_count();
        let mut cur: Vec<usize> = (0..count)
            .filter(|&s| self.essential[s])
            .filter(|&s| {
                (0..self.width)
                    .all(|j| pinned(first + j as i64).is_none_or(|v| v == self.digit(s, j)))
            })
            .collect();
        let mut q = first;
        let mut mark = vec![false; count];
        while q + w - 1 < last && !cur.is_empty() {
            let forced = pinned(q + w);
            let mut next = Vec::new();
            for &s in &cur {
                for v in 0..self.n {
                    if forced.is_some_and(|f| f != v) {
                        continue;
                    }
                    if let Some(t) = self.step(s, v) {
                        if self.essential[t] && !mark[t] {
                            mark[t] = true;
                            next.push(t);
                        }
                    }
                }
            }
            for &t in &next {
                mark[t] = false;
            }
            cur = next;
            q += 1;
        }
        !cur.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn automaton(n: u8, c: &[(i64, i64)]) -> CosetAutomaton {
        CosetAutomaton::new(n, &c.iter().copied().collect()).unwrap()
    }

    #[test]
    fn constant_along_coset() {
        // y_{q+1} - y_q = 0
        let a = automaton(3, &[(0, 2), (1, 1)]);
        assert!(a.extends(&[(0, 1), (5, 1)]));
        assert!(!a.extends(&[(0, 1), (5, 2)]));
        assert!(a.extends(&[(-4, 2)]));
    }

    #[test]
    fn fibonacci_mod_two() {
        // y_{q+2} = y_{q+1} + y_q (mod 2), period 3: 0,1,1,0,1,1,...
        let a = automaton(2, &[(0, 1), (1, 1), (2, 1)]);
        assert!(a.extends(&[(0, 0), (1, 1), (2, 1), (3, 0)]));
        assert!(!a.extends(&[(0, 0), (1, 1), (2, 0)]));
        assert!(a.extends(&[(0, 1), (3, 1)]));
        assert!(!a.extends(&[(0, 1), (3, 0)]));
    }

    #[test]
    fn non_invertible_leading_coefficient() {
        // 2 y_{q+1} = 0 mod 4 and y_q free otherwise: values must be even
        let a = automaton(4, &[(1, 2)]);
        assert!(a.extends(&[(0, 2)]));
        assert!(!a.extends(&[(3, 1)]));
        // 2 y_q + 2 y_{q+1} = 0 mod 4: consecutive values have equal parity
        let b = automaton(4, &[(0, 2), (1, 2)]);
        assert!(b.extends(&[(0, 1), (1, 3)]));
        assert!(!b.extends(&[(0, 1), (2, 2)]));
    }
}
