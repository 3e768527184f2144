//! Canonical element algebra for free abelian groups `Z^d` and free groups `F_k`.
//!
//! Elements are kept in canonical form at all times: reduced words for the free
//! case, integer vectors for the abelian case. The total order on elements is
//! (word length, lexicographic), with generator letters ordered
//! `a < a^-1 < b < b^-1 < ...`. Balls, separated sets and every greedy choice in
//! the crate scan elements in this order.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;
use std::sync::Arc;

use smallvec::SmallVec;

use crate::error::{Error, Result};

/// A generator or its inverse, encoded as `2 * generator + inverse_bit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter(u8);

impl Letter {
    pub fn new(generator: usize, inverse: bool) -> Self {
        Letter((generator as u8) * 2 + inverse as u8)
    }

    pub fn generator(self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 & 1 == 1
    }

    pub fn inverse(self) -> Letter {
        Letter(self.0 ^ 1)
    }
}

pub type Word = SmallVec<[Letter; 16]>;
pub type Vector = SmallVec<[i32; 4]>;

/// A group element in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GroupElement {
    Word(Word),
    Vector(Vector),
}

impl GroupElement {
    pub fn from_letters(letters: impl IntoIterator<Item = Letter>) -> Self {
        let mut w = Word::new();
        for l in letters {
            push_reduced(&mut w, l);
        }
        GroupElement::Word(w)
    }

    pub fn from_vector(v: impl IntoIterator<Item = i32>) -> Self {
        GroupElement::Vector(v.into_iter().collect())
    }

    /// Word length with respect to the standard symmetric generating set.
    pub fn length(&self) -> usize {
        match self {
            GroupElement::Word(w) => w.len(),
            GroupElement::Vector(v) => v.iter().map(|x| x.unsigned_abs() as usize).sum(),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElement::Word(w) => w.is_empty(),
            GroupElement::Vector(v) => v.iter().all(|&x| x == 0),
        }
    }

    pub fn inverse(&self) -> GroupElement {
        match self {
            GroupElement::Word(w) => {
                GroupElement::Word(w.iter().rev().map(|l| l.inverse()).collect())
            }
            GroupElement::Vector(v) => GroupElement::Vector(v.iter().map(|x| -x).collect()),
        }
    }

    /// Product `self * other`. Panics when the operands come from different kinds of
    /// group; use [`GroupSpec::multiply`] for checked multiplication.
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        match (self, other) {
            (GroupElement::Word(x), GroupElement::Word(y)) => {
                let mut w = x.clone();
                for &l in y {
                    push_reduced(&mut w, l);
                }
                GroupElement::Word(w)
            }
            (GroupElement::Vector(x), GroupElement::Vector(y)) => {
                assert_eq!(x.len(), y.len(), "vector dimension mismatch");
                GroupElement::Vector(x.iter().zip(y).map(|(a, b)| a + b).collect())
            }
            _ => panic!("multiplying elements of different group kinds"),
        }
    }

    pub fn letters(&self) -> Option<&[Letter]> {
        match self {
            GroupElement::Word(w) => Some(w),
            GroupElement::Vector(_) => None,
        }
    }

    pub fn components(&self) -> Option<&[i32]> {
        match self {
            GroupElement::Vector(v) => Some(v),
            GroupElement::Word(_) => None,
        }
    }

    /// `self^n` for any integer `n`.
    pub fn pow(&self, n: i64) -> GroupElement {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut acc = match self {
            GroupElement::Word(_) => GroupElement::Word(Word::new()),
            GroupElement::Vector(v) => GroupElement::Vector(SmallVec::from_elem(0, v.len())),
        };
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        acc
    }
}

fn push_reduced(w: &mut Word, l: Letter) {
    if w.last() == Some(&l.inverse()) {
        w.pop();
    } else {
        w.push(l);
    }
}

impl Ord for GroupElement {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (GroupElement::Word(x), GroupElement::Word(y)) => x
                .len()
                .cmp(&y.len())
                .then_with(|| x.as_slice().cmp(y.as_slice())),
            (GroupElement::Vector(x), GroupElement::Vector(y)) => self
                .length()
                .cmp(&other.length())
                .then_with(|| x.as_slice().cmp(y.as_slice())),
            (GroupElement::Word(_), GroupElement::Vector(_)) => Ordering::Less,
            (GroupElement::Vector(_), GroupElement::Word(_)) => Ordering::Greater,
        }
    }
}

impl PartialOrd for GroupElement {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Word(w) => f.write_str(&format_word(w, &default_label)),
            GroupElement::Vector(v) => f.write_str(&format_vector(v)),
        }
    }
}

fn default_label(g: usize) -> String {
    const NAMES: &[&str] = &["a", "b", "c", "d", "f", "g", "h", "i", "j", "k", "l", "m"];
    NAMES
        .get(g)
        .map(|s| s.to_string())
        .unwrap_or_else(|| format!("g{g}"))
}

fn format_word(w: &[Letter], label: &dyn Fn(usize) -> String) -> String {
    if w.is_empty() {
        return "e".to_string();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    while i < w.len() {
        let l = w[i];
        let mut j = i;
        while j < w.len() && w[j] == l {
            j += 1;
        }
        let run = (j - i) as i64;
        let exp = if l.is_inverse() { -run } else { run };
        let name = label(l.generator());
        parts.push(if exp == 1 {
            name
        } else {
            format!("{name}^{exp}")
        });
        i = j;
    }
    parts.join("*")
}

fn format_vector(v: &[i32]) -> String {
    let inner: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("({})", inner.join(","))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupKind {
    /// `Z^d`
    FreeAbelian(usize),
    /// `F_k`
    Free(usize),
}

/// A finitely generated group with a solvable word problem: `Z^d` or `F_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    kind: GroupKind,
    labels: Vec<String>,
}

impl GroupSpec {
    pub fn free(rank: usize) -> Result<Self> {
        let labels = (0..rank).map(default_label).collect();
        Self::with_labels(GroupKind::Free(rank), labels)
    }

    pub fn free_abelian(dim: usize) -> Result<Self> {
        let labels = (0..dim).map(|i| format!("x{i}")).collect();
        Self::with_labels(GroupKind::FreeAbelian(dim), labels)
    }

    pub fn with_labels(kind: GroupKind, labels: Vec<String>) -> Result<Self> {
        let rank = match kind {
            GroupKind::Free(k) | GroupKind::FreeAbelian(k) => k,
        };
        if rank == 0 {
            return Err(Error::InvalidGroup("rank must be at least 1".into()));
        }
        if rank > 64 {
            return Err(Error::InvalidGroup("rank above 64 is not supported".into()));
        }
        if labels.len() != rank {
            return Err(Error::InvalidGroup(format!(
                "expected {rank} generator labels, got {}",
                labels.len()
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            let valid = !l.is_empty()
                && l.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
                && l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid || l == "e" {
                return Err(Error::InvalidGroup(format!(
                    "invalid generator label {l:?}"
                )));
            }
            if !seen.insert(l.clone()) {
                return Err(Error::InvalidGroup(format!(
                    "duplicate generator label {l:?}"
                )));
            }
        }
        Ok(GroupSpec { kind, labels })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn rank(&self) -> usize {
        match self.kind {
            GroupKind::Free(k) | GroupKind::FreeAbelian(k) => k,
        }
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn is_free(&self) -> bool {
        matches!(self.kind, GroupKind::Free(_))
    }

    pub fn identity(&self) -> GroupElement {
        match self.kind {
            GroupKind::Free(_) => GroupElement::Word(Word::new()),
            GroupKind::FreeAbelian(d) => GroupElement::Vector(SmallVec::from_elem(0, d)),
        }
    }

    /// The `i`-th generator (not its inverse).
    pub fn generator(&self, i: usize) -> GroupElement {
        assert!(i < self.rank());
        match self.kind {
            GroupKind::Free(_) => GroupElement::Word(smallvec::smallvec![Letter::new(i, false)]),
            GroupKind::FreeAbelian(d) => {
                let mut v: Vector = SmallVec::from_elem(0, d);
                v[i] = 1;
                GroupElement::Vector(v)
            }
        }
    }

    /// The symmetric generating set in canonical order.
    pub fn symmetric_generators(&self) -> Vec<GroupElement> {
        let mut gens: Vec<GroupElement> = (0..self.rank())
            .flat_map(|i| {
                let g = self.generator(i);
                let gi = g.inverse();
                [g, gi]
            })
            .collect();
        gens.sort();
        gens
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        match (self.kind, g) {
            (GroupKind::Free(k), GroupElement::Word(w)) => {
                w.iter().all(|l| l.generator() < k) && w.windows(2).all(|p| p[0] != p[1].inverse())
            }
            (GroupKind::FreeAbelian(d), GroupElement::Vector(v)) => v.len() == d,
            _ => false,
        }
    }

    pub fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!(
                "{g} is not an element of {self}"
            )))
        }
    }

    pub fn multiply(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        self.check(h)?;
        Ok(g.mul(h))
    }

    pub fn invert(&self, g: &GroupElement) -> Result<GroupElement> {
        self.check(g)?;
        Ok(g.inverse())
    }

    /// All elements of word length exactly `r`, in canonical order.
    pub fn sphere(&self, r: usize) -> Vec<GroupElement> {
        let mut out: Vec<GroupElement> = match self.kind {
            GroupKind::Free(k) => {
                let mut layer = vec![Word::new()];
                for _ in 0..r {
                    let mut next = Vec::with_capacity(layer.len() * (2 * k).max(1));
                    for w in &layer {
                        for code in 0..(2 * k) as u8 {
                            let l = Letter(code);
                            if w.last() == Some(&l.inverse()) {
                                continue;
                            }
                            let mut nw = w.clone();
                            nw.push(l);
                            next.push(nw);
                        }
                    }
                    layer = next;
                }
                layer.into_iter().map(GroupElement::Word).collect()
            }
            GroupKind::FreeAbelian(d) => {
                let mut acc = Vec::new();
                let mut cur = vec![0i32; d];
                l1_vectors(&mut cur, 0, r as i32, &mut acc);
                acc.into_iter()
                    .map(|v| GroupElement::Vector(v.into_iter().collect()))
                    .collect()
            }
        };
        out.sort();
        out
    }

    /// All elements of word length at most `r`, in canonical order.
    pub fn ball(&self, r: usize) -> FiniteSubset {
        let elems: Vec<GroupElement> = (0..=r).flat_map(|i| self.sphere(i)).collect();
        FiniteSubset::from_sorted_unchecked(elems)
    }

    /// Canonical representative of the right coset `t<g>` of the cyclic subgroup
    /// generated by the `generator`-th generator, together with the position of `t`
    /// in that coset: `t = rep * g^pos`.
    pub fn cyclic_coset(&self, t: &GroupElement, generator: usize) -> (GroupElement, i64) {
        match t {
            GroupElement::Word(w) => {
                let mut end = w.len();
                let mut pos = 0i64;
                while end > 0 && w[end - 1].generator() == generator {
                    pos += if w[end - 1].is_inverse() { -1 } else { 1 };
                    end -= 1;
                }
                (GroupElement::Word(w[..end].iter().copied().collect()), pos)
            }
            GroupElement::Vector(v) => {
                let mut rep = v.clone();
                let pos = rep[generator] as i64;
                rep[generator] = 0;
                (GroupElement::Vector(rep), pos)
            }
        }
    }

    pub fn format(&self, g: &GroupElement) -> String {
        match g {
            GroupElement::Word(w) => format_word(w, &|i| {
                self.labels
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| default_label(i))
            }),
            GroupElement::Vector(v) => format_vector(v),
        }
    }

    /// Parses `"a*b^-1*a^2"` / `"e"` (free) or `"(1,-2)"` (abelian).
    pub fn parse(&self, s: &str) -> Result<GroupElement> {
        let s = s.trim();
        let field = "group element";
        match self.kind {
            GroupKind::FreeAbelian(d) => {
                if s == "e" {
                    return Ok(self.identity());
                }
                let inner = s
                    .strip_prefix('(')
                    .and_then(|x| x.strip_suffix(')'))
                    .ok_or_else(|| {
                        Error::parse(field, format!("expected (x1,...,x{d}), got {s:?}"))
                    })?;
                let comps: Vec<i32> = inner
                    .split(',')
                    .map(|c| c.trim().parse::<i32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| Error::parse(field, format!("{s:?}: {e}")))?;
                if comps.len() != d {
                    return Err(Error::parse(
                        field,
                        format!("{s:?} has {} components, expected {d}", comps.len()),
                    ));
                }
                Ok(GroupElement::Vector(comps.into_iter().collect()))
            }
            GroupKind::Free(_) => {
                if s == "e" || s.is_empty() {
                    return Ok(self.identity());
                }
                let mut letters = Vec::new();
                for tok in s.split('*') {
                    let tok = tok.trim();
                    let (name, exp) = match tok.split_once('^') {
                        Some((n, e)) => {
                            let e: i64 = e.trim().parse().map_err(|_| {
                                Error::parse(field, format!("bad exponent in {tok:?}"))
                            })?;
                            (n.trim(), e)
                        }
                        None => (tok, 1),
                    };
                    if name == "e" {
                        continue;
                    }
                    let gen = self.labels.iter().position(|l| l == name).ok_or_else(|| {
                        Error::parse(field, format!("unknown generator {name:?} in {s:?}"))
                    })?;
                    let l = Letter::new(gen, exp < 0);
                    for _ in 0..exp.unsigned_abs() {
                        letters.push(l);
                    }
                }
                Ok(GroupElement::from_letters(letters))
            }
        }
    }
}

fn l1_vectors(cur: &mut Vec<i32>, idx: usize, remaining: i32, out: &mut Vec<Vec<i32>>) {
    if idx == cur.len() {
        if remaining == 0 {
            out.push(cur.clone());
        }
        return;
    }
    if idx + 1 == cur.len() {
        if remaining == 0 {
            cur[idx] = 0;
            out.push(cur.clone());
        } else {
            for v in [-remaining, remaining] {
                cur[idx] = v;
                out.push(cur.clone());
            }
        }
        cur[idx] = 0;
        return;
    }
    for used in 0..=remaining {
        let signs: &[i32] = if used == 0 { &[0] } else { &[-1, 1] };
        for &sgn in signs {
            cur[idx] = sgn * used;
            l1_vectors(cur, idx + 1, remaining - used, out);
        }
    }
    cur[idx] = 0;
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GroupKind::Free(k) => write!(f, "F_{k}"),
            GroupKind::FreeAbelian(d) => write!(f, "Z^{d}"),
        }
    }
}

/// A duplicate-free set of group elements kept in canonical order.
///
/// Cloning is cheap: the elements live behind an `Arc`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteSubset(Arc<[GroupElement]>);

impl FiniteSubset {
    pub fn new(elems: impl IntoIterator<Item = GroupElement>) -> Self {
        let mut v: Vec<GroupElement> = elems.into_iter().collect();
        v.sort();
        v.dedup();
        FiniteSubset(v.into())
    }

    pub fn empty() -> Self {
        FiniteSubset(Arc::from(Vec::new()))
    }

    pub fn singleton(g: GroupElement) -> Self {
        FiniteSubset(Arc::from(vec![g]))
    }

    pub(crate) fn from_sorted_unchecked(v: Vec<GroupElement>) -> Self {
        debug_assert!(v.windows(2).all(|p| p[0] < p[1]));
        FiniteSubset(v.into())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, GroupElement> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[GroupElement] {
        &self.0
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.0.binary_search(g).is_ok()
    }

    pub fn index_of(&self, g: &GroupElement) -> Option<usize> {
        self.0.binary_search(g).ok()
    }

    pub fn ptr_eq(&self, other: &FiniteSubset) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn max_length(&self) -> usize {
        self.0.iter().map(|g| g.length()).max().unwrap_or(0)
    }

    pub fn union(&self, other: &FiniteSubset) -> FiniteSubset {
        if self.ptr_eq(other) || other.is_empty() {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(a[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        if out.len() == a.len() {
            return self.clone();
        }
        FiniteSubset(out.into())
    }

    pub fn intersection(&self, other: &FiniteSubset) -> FiniteSubset {
        FiniteSubset::from_sorted_unchecked(
            self.0
                .iter()
                .filter(|g| other.contains(g))
                .cloned()
                .collect(),
        )
    }

    pub fn difference(&self, other: &FiniteSubset) -> FiniteSubset {
        FiniteSubset::from_sorted_unchecked(
            self.0
                .iter()
                .filter(|g| !other.contains(g))
                .cloned()
                .collect(),
        )
    }

    pub fn is_subset(&self, other: &FiniteSubset) -> bool {
        self.0.iter().all(|g| other.contains(g))
    }

    pub fn is_disjoint(&self, other: &FiniteSubset) -> bool {
        self.0.iter().all(|g| !other.contains(g))
    }

    /// `{ g * t : g in self }`
    pub fn right_translate(&self, t: &GroupElement) -> FiniteSubset {
        FiniteSubset::new(self.0.iter().map(|g| g.mul(t)))
    }

    /// `{ s * g : g in self }`
    pub fn left_translate(&self, s: &GroupElement) -> FiniteSubset {
        FiniteSubset::new(self.0.iter().map(|g| s.mul(g)))
    }

    pub fn inverse(&self) -> FiniteSubset {
        FiniteSubset::new(self.0.iter().map(|g| g.inverse()))
    }

    /// The product set `self * other`.
    pub fn product(&self, other: &FiniteSubset) -> FiniteSubset {
        FiniteSubset::new(
            self.0
                .iter()
                .flat_map(|g| other.0.iter().map(move |h| g.mul(h))),
        )
    }
}

impl<'a> IntoIterator for &'a FiniteSubset {
    type Item = &'a GroupElement;
    type IntoIter = std::slice::Iter<'a, GroupElement>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl FromIterator<GroupElement> for FiniteSubset {
    fn from_iter<I: IntoIterator<Item = GroupElement>>(iter: I) -> Self {
        FiniteSubset::new(iter)
    }
}

/// True iff the right translates `K t`, `t in E`, are pairwise disjoint.
pub fn is_separated(e: &FiniteSubset, k: &FiniteSubset) -> bool {
    let mut seen = HashSet::new();
    for t in e {
        for g in k {
            if !seen.insert(g.mul(t)) {
                return false;
            }
        }
    }
    true
}

/// Greedy maximal `E`-separated subset of `F`, scanning `F` in canonical order.
///
/// Every skipped `f` has `E f` meeting `E f'` for a chosen `f'`, so
/// `E^-1 E F' ⊇ F` and hence `|F'| >= |F| / |E|^2`.
pub fn maximal_separated_subset(f: &FiniteSubset, e: &FiniteSubset) -> FiniteSubset {
    let mut covered: HashSet<GroupElement> = HashSet::new();
    let mut chosen = Vec::new();
    for t in f {
        let translate: Vec<GroupElement> = e.iter().map(|g| g.mul(t)).collect();
        if translate.iter().all(|g| !covered.contains(g)) {
            covered.extend(translate);
            chosen.push(t.clone());
        }
    }
    FiniteSubset::from_sorted_unchecked(chosen)
}

/// Greedy `K`-separated subset of `Γ \ K` of the requested size, scanning spheres of
/// increasing radius in canonical order. Returns `None` if nothing is found within
/// `max_radius`.
pub fn find_separated_set(
    spec: &GroupSpec,
    k: &FiniteSubset,
    size: usize,
    max_radius: usize,
) -> Option<FiniteSubset> {
    let mut covered: HashSet<GroupElement> = HashSet::new();
    let mut chosen = Vec::new();
    if size == 0 {
        return Some(FiniteSubset::empty());
    }
    for r in 0..=max_radius {
        for t in spec.sphere(r) {
            if k.contains(&t) {
                continue;
            }
            let translate: Vec<GroupElement> = k.iter().map(|g| g.mul(&t)).collect();
            if translate.iter().all(|g| !covered.contains(g)) {
                covered.extend(translate);
                chosen.push(t);
                if chosen.len() == size {
                    return Some(FiniteSubset::new(chosen));
                }
            }
        }
    }
    None
}
