//! Shift systems and their realizability oracles.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::coset::CosetAutomaton;
use super::cylinder::{CylinderSet, PatternSet};
use super::local;
use crate::error::{Error, Result};
use crate::group::{FiniteSubset, GroupElement, GroupSpec};
use crate::ring::GroupRingElement;

/// Finite alphabet: a plain set `{0, .., m-1}` or the cyclic group `Z/n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "size", rename_all = "kebab-case")]
pub enum Alphabet {
    Plain(u8),
    Modular(u8),
}

impl Alphabet {
    pub fn size(self) -> u8 {
        match self {
            Alphabet::Plain(m) | Alphabet::Modular(m) => m,
        }
    }
}

/// A forbidden pattern: an occurrence at `t` means `x_{t w} = v` for every cell `(w, v)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ForbiddenPattern {
    cells: Vec<(GroupElement, u8)>,
}

impl ForbiddenPattern {
    pub fn new(mut cells: Vec<(GroupElement, u8)>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::Invalid("forbidden pattern without cells".into()));
        }
        cells.sort();
        if cells.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Invalid(
                "forbidden pattern lists a cell twice".into(),
            ));
        }
        Ok(ForbiddenPattern { cells })
    }

    pub fn cells(&self) -> &[(GroupElement, u8)] {
        &self.cells
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Variant {
    Full,
    /// `{x : Σ_u f_u x_{tu} ≡ 0 (mod n) for all t}`, `n` the alphabet size.
    Linear(GroupRingElement),
    PatternSft(Vec<ForbiddenPattern>),
}

/// Hard caps shared by the enumeration-heavy algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    pub max_patterns: usize,
    pub max_items: usize,
    pub max_search_nodes: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_patterns: 1 << 20,
            max_items: 1 << 20,
            max_search_nodes: 50_000_000,
        }
    }
}

/// Outcome of a realizability query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// `witness` is an allowed pattern of the queried cylinder. `exact` is false when
    /// it was only checked for consistency on a bounded neighbourhood.
    Realizable {
        witness: Vec<u8>,
        exact: bool,
    },
    Empty,
    Unknown {
        radius: usize,
        reason: String,
    },
}

impl Verdict {
    pub fn is_realizable(&self) -> bool {
        matches!(self, Verdict::Realizable { .. })
    }

    pub fn is_certain(&self) -> bool {
        matches!(
            self,
            Verdict::Realizable { exact: true, .. } | Verdict::Empty
        )
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Verdict::Empty)
    }
}

/// Which decision procedure answers queries for a system.
#[derive(Debug, Clone)]
enum Engine {
    Full,
    Coset {
        generator: usize,
        automaton: CosetAutomaton,
    },
    LinearLocal,
    SftLocal,
}

/// A shift space over a group with a finite alphabet.
#[derive(Debug, Clone)]
pub struct ShiftSystem {
    group: GroupSpec,
    alphabet: Alphabet,
    variant: Variant,
    r_max: usize,
    budget: Budget,
    engine: Engine,
}

/// Patterns on a domain split by how firmly they are known to occur in the system.
#[derive(Debug, Clone)]
pub struct Universe {
    pub domain: FiniteSubset,
    /// Certified realizable rows.
    pub confirmed: PatternSet,
    /// Rows not refuted; equals `confirmed` for exact systems.
    pub possible: PatternSet,
}

impl Universe {
    pub fn is_exact(&self) -> bool {
        self.confirmed.len() == self.possible.len()
    }
}

impl ShiftSystem {
    pub fn full(group: GroupSpec, alphabet: Alphabet) -> Result<Self> {
        Self::new(group, alphabet, Variant::Full, 1)
    }

    pub fn linear(group: GroupSpec, modulus: u8, f: GroupRingElement) -> Result<Self> {
        Self::new(group, Alphabet::Modular(modulus), Variant::Linear(f), 1)
    }

    pub fn new(
        group: GroupSpec,
        alphabet: Alphabet,
        variant: Variant,
        r_max: usize,
    ) -> Result<Self> {
        if alphabet.size() == 0 {
            return Err(Error::Invalid("alphabet must be nonempty".into()));
        }
        let engine = match &variant {
            Variant::Full => Engine::Full,
            Variant::Linear(f) => {
                if !matches!(alphabet, Alphabet::Modular(_)) {
                    return Err(Error::Invalid(
                        "linear shifts need a modular alphabet".into(),
                    ));
                }
                f.check(&group)?;
                linear_engine(&group, alphabet.size(), f)?
            }
            Variant::PatternSft(forbidden) => {
                for p in forbidden {
                    for (g, v) in p.cells() {
                        group.check(g)?;
                        if *v >= alphabet.size() {
                            return Err(Error::Invalid(format!(
                                "forbidden letter {v} outside alphabet"
                            )));
                        }
                    }
                }
                if forbidden.is_empty() {
                    Engine::Full
                } else {
                    Engine::SftLocal
                }
            }
        };
        Ok(ShiftSystem {
            group,
            alphabet,
            variant,
            r_max,
            budget: Budget::default(),
            engine,
        })
    }

    pub fn with_budget(mut self, budget: Budget) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_r_max(mut self, r_max: usize) -> Self {
        self.r_max = r_max;
        self
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn alphabet_size(&self) -> u8 {
        self.alphabet.size()
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn r_max(&self) -> usize {
        self.r_max
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    /// Whether every verdict is certain.
    pub fn is_exact(&self) -> bool {
        matches!(self.engine, Engine::Full | Engine::Coset { .. })
    }

    /// Whether the system is the full shift (every pattern occurs).
    pub fn is_full(&self) -> bool {
        matches!(self.engine, Engine::Full)
    }

    /// A short name of the decision procedure, for reports.
    pub fn engine_name(&self) -> &'static str {
        match self.engine {
            Engine::Full => "full-shift",
            Engine::Coset { .. } => "coset-recurrence",
            Engine::LinearLocal => "local-linear",
            Engine::SftLocal => "local-sft",
        }
    }

    /// Coordinates with different blocks constrain each other only through the
    /// pattern itself: a pattern occurs iff its restriction to every block does. `None`
    /// means one global block.
    pub fn interaction_block(&self, g: &GroupElement) -> Option<GroupElement> {
        match &self.engine {
            Engine::Full => Some(g.clone()),
            Engine::Coset { generator, .. } => Some(self.group.cyclic_coset(g, *generator).0),
            Engine::LinearLocal | Engine::SftLocal => None,
        }
    }

    /// The whole space as a cylinder.
    pub fn whole(&self) -> CylinderSet {
        CylinderSet::whole(self.alphabet_size())
    }

    fn check_cylinder(&self, c: &CylinderSet) -> Result<()> {
        if c.alphabet() != self.alphabet_size() {
            return Err(Error::Invalid(format!(
                "cylinder over {} letters used in a system over {}",
                c.alphabet(),
                self.alphabet_size()
            )));
        }
        Ok(())
    }

    /// Decides whether `C ∩ X` is nonempty.
    pub fn realizable(&self, c: &CylinderSet) -> Result<Verdict> {
        self.check_cylinder(c)?;
        let mut unknown: Option<Verdict> = None;
        for row in c.patterns().rows() {
            match self.row_verdict(c.domain(), row)? {
                v @ Verdict::Realizable { exact: true, .. } => return Ok(v),
                v @ Verdict::Realizable { .. } => return Ok(v),
                Verdict::Empty => {}
                v @ Verdict::Unknown { .. } => {
                    unknown.get_or_insert(v);
                }
            }
        }
        Ok(unknown.unwrap_or(Verdict::Empty))
    }

    /// Verdict for the single configuration constraint "pattern `row` on `domain`".
    pub fn row_verdict(&self, domain: &FiniteSubset, row: &[u8]) -> Result<Verdict> {
        match &self.engine {
            Engine::Full => Ok(Verdict::Realizable {
                witness: row.to_vec(),
                exact: true,
            }),
            Engine::Coset {
                generator,
                automaton,
            } => {
                if !automaton.is_nonempty() {
                    return Ok(Verdict::Empty);
                }
                let mut cosets: BTreeMap<GroupElement, Vec<(i64, u8)>> = BTreeMap::new();
                for (g, &v) in domain.iter().zip(row) {
                    let (rep, pos) = self.group.cyclic_coset(g, *generator);
                    cosets.entry(rep).or_default().push((pos, v));
                }
                for pins in cosets.values_mut() {
                    pins.sort_unstable();
                    if !automaton.extends(pins) {
                        return Ok(Verdict::Empty);
                    }
                }
                Ok(Verdict::Realizable {
                    witness: row.to_vec(),
                    exact: true,
                })
            }
            Engine::LinearLocal => {
                let Variant::Linear(f) = &self.variant else {
                    unreachable!()
                };
                local::linear_verdict(
                    f,
                    self.alphabet_size(),
                    self.r_max,
                    domain,
                    row,
                    &self.budget,
                )
            }
            Engine::SftLocal => {
                let Variant::PatternSft(forbidden) = &self.variant else {
                    unreachable!()
                };
                local::sft_verdict(
                    forbidden,
                    self.alphabet_size(),
                    self.r_max,
                    domain,
                    row,
                    &self.budget,
                )
            }
        }
    }

    /// Every pattern on `domain` that occurs in `X`, found by depth-first extension with
    /// pruning of refuted prefixes.
    pub fn universe(&self, domain: &FiniteSubset) -> Result<Universe> {
        let m = self.alphabet_size();
        let width = domain.len();
        if self.is_full() {
            let c = CylinderSet::from_predicate(m, domain.clone(), |_| true)?;
            let rows = c.patterns().clone();
            if rows.len() > self.budget.max_patterns {
                return Err(Error::budget(
                    "universe patterns",
                    rows.len() as u128,
                    self.budget.max_patterns as u128,
                ));
            }
            return Ok(Universe {
                domain: domain.clone(),
                confirmed: rows.clone(),
                possible: rows,
            });
        }
        let elems = domain.as_slice();
        let mut confirmed = Vec::new();
        let mut possible = Vec::new();
        let mut prefix: Vec<u8> = Vec::with_capacity(width);
        // Prefix domains are the first i coordinates in canonical order.
        let prefix_domains: Vec<FiniteSubset> = (0..=width)
            .map(|i| FiniteSubset::new(elems[..i].iter().cloned()))
            .collect();
        let mut stack: Vec<(usize, u8)> = vec![(0, 0)];
        // Iterative DFS: (depth, next letter to try).
        while let Some((depth, letter)) = stack.pop() {
            prefix.truncate(depth);
            if depth == width {
                match self.row_verdict(domain, &prefix)? {
                    Verdict::Realizable { exact: true, .. } => {
                        confirmed.push(prefix.clone());
                        possible.push(prefix.clone());
                    }
                    Verdict::Empty => {}
                    _ => possible.push(prefix.clone()),
                }
                if possible.len() > self.budget.max_patterns {
                    return Err(Error::budget(
                        "universe patterns",
                        possible.len() as u128,
                        self.budget.max_patterns as u128,
                    ));
                }
                continue;
            }
            if letter >= m {
                continue;
            }
            stack.push((depth, letter + 1));
            prefix.push(letter);
            let verdict = self.row_verdict(&prefix_domains[depth + 1], &prefix)?;
            if !verdict.is_empty() {
                stack.push((depth + 1, 0));
            }
        }
        // DFS pushes higher letters first in the stack order, so sort.
        Ok(Universe {
            domain: domain.clone(),
            confirmed: PatternSet::from_rows(width, confirmed),
            possible: PatternSet::from_rows(width, possible),
        })
    }

    /// `C ∩ X` restricted to the cylinder's own domain: drops refuted rows.
    pub fn prune(&self, c: &CylinderSet) -> Result<(CylinderSet, bool)> {
        self.check_cylinder(c)?;
        if self.is_full() {
            return Ok((c.clone(), true));
        }
        let mut rows = Vec::new();
        let mut exact = true;
        for row in c.patterns().rows() {
            match self.row_verdict(c.domain(), row)? {
                Verdict::Empty => {}
                Verdict::Realizable { exact: true, .. } => rows.push(row.to_vec()),
                _ => {
                    exact = false;
                    rows.push(row.to_vec());
                }
            }
        }
        Ok((
            CylinderSet::new(c.alphabet(), c.domain().clone(), rows)?,
            exact,
        ))
    }
}

fn linear_engine(group: &GroupSpec, n: u8, f: &GroupRingElement) -> Result<Engine> {
    if f.is_zero() {
        return Ok(Engine::Full);
    }
    let reduced: Vec<(&GroupElement, i64)> = f
        .terms()
        .filter(|(_, c)| c.rem_euclid(n as i64) != 0)
        .collect();
    if reduced.is_empty() {
        return Ok(Engine::Full);
    }
    for generator in 0..group.rank() {
        let mut coeffs: BTreeMap<i64, i64> = BTreeMap::new();
        let mut cyclic = true;
        for (g, c) in &reduced {
            let (rep, pos) = group.cyclic_coset(g, generator);
            if !rep.is_identity() {
                cyclic = false;
                break;
            }
            coeffs.insert(pos, c.rem_euclid(n as i64));
        }
        if cyclic {
            let automaton = CosetAutomaton::new(n, &coeffs)?;
            return Ok(Engine::Coset {
                generator,
                automaton,
            });
        }
    }
    Ok(Engine::LinearLocal)
}
