//! Ordered tuples of cylinder sets and finite families of them.

use crate::error::{Error, Result};
use crate::group::GroupElement;
use crate::subshift::{CylinderSet, ShiftSystem};

/// `(A_1, .., A_k)`, `k ≥ 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetTuple {
    entries: Vec<CylinderSet>,
}

impl SetTuple {
    pub fn new(entries: Vec<CylinderSet>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return Err(Error::Invalid("a tuple needs at least one entry".into()));
        };
        if entries.iter().any(|e| e.alphabet() != first.alphabet()) {
            return Err(Error::Invalid(
                "tuple entries over different alphabets".into(),
            ));
        }
        Ok(SetTuple { entries })
    }

    /// `({x_t = 0}, .., {x_t = m-1})`, the value tuple at coordinate `t`.
    pub fn coordinate(alphabet: u8, t: &GroupElement) -> Result<Self> {
        let entries = (0..alphabet)
            .map(|v| CylinderSet::pinned(alphabet, &[(t.clone(), v)]))
            .collect::<Result<Vec<_>>>()?;
        Self::new(entries)
    }

    /// `({x_t = x}, {x_t = y})` for two distinct letters.
    pub fn value_pair(alphabet: u8, t: &GroupElement, x: u8, y: u8) -> Result<Self> {
        if x == y {
            return Err(Error::Invalid("value pair needs distinct letters".into()));
        }
        Self::new(vec![
            CylinderSet::pinned(alphabet, &[(t.clone(), x)])?,
            CylinderSet::pinned(alphabet, &[(t.clone(), y)])?,
        ])
    }

    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[CylinderSet] {
        &self.entries
    }

    pub fn entry(&self, i: usize) -> &CylinderSet {
        &self.entries[i]
    }

    pub fn alphabet(&self) -> u8 {
        self.entries[0].alphabet()
    }

    pub fn into_entries(self) -> Vec<CylinderSet> {
        self.entries
    }

    /// `s𝐀 = (sA_1, .., sA_k)`.
    pub fn translate(&self, s: &GroupElement) -> SetTuple {
        SetTuple {
            entries: self.entries.iter().map(|e| e.translate(s)).collect(),
        }
    }

    /// Whether every pairwise intersection of entries misses `X`. The second
    /// component is false if some verdict was not certain.
    pub fn pairwise_disjoint(&self, sys: &ShiftSystem) -> Result<(bool, bool)> {
        let mut exact = true;
        for i in 0..self.k() {
            for j in i + 1..self.k() {
                let v = sys.realizable(&self.entries[i].intersect(&self.entries[j])?)?;
                exact &= v.is_certain();
                if v.is_realizable() && v.is_certain() {
                    return Ok((false, true));
                }
                if v.is_realizable() {
                    return Ok((false, false));
                }
            }
        }
        Ok((true, exact))
    }

    /// Whether every entry meets `X`.
    pub fn entries_nonempty(&self, sys: &ShiftSystem) -> Result<bool> {
        for e in &self.entries {
            if !sys.realizable(e)?.is_realizable() {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// A finite list of tuples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Family {
    tuples: Vec<SetTuple>,
}

impl Family {
    pub fn new(tuples: Vec<SetTuple>) -> Self {
        Family { tuples }
    }

    pub fn tuples(&self) -> &[SetTuple] {
        &self.tuples
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn push(&mut self, t: SetTuple) {
        self.tuples.push(t);
    }

    pub fn into_tuples(self) -> Vec<SetTuple> {
        self.tuples
    }

    pub fn pairwise_disjoint(&self, sys: &ShiftSystem) -> Result<bool> {
        for t in &self.tuples {
            if !t.pairwise_disjoint(sys)?.0 {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl FromIterator<SetTuple> for Family {
    fn from_iter<I: IntoIterator<Item = SetTuple>>(iter: I) -> Self {
        Family {
            tuples: iter.into_iter().collect(),
        }
    }
}
