//! The integral group ring `ZΓ`: finitely supported integer functions on the group.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupSpec};

/// `Σ f_s s` with finite support; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct GroupRingElement {
    coeffs: BTreeMap<GroupElement, i64>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (GroupElement, i64)>) -> Self {
        let mut out = Self::zero();
        for (g, c) in terms {
            out.add_term(g, c);
        }
        out
    }

    pub fn monomial(g: GroupElement, c: i64) -> Self {
        Self::from_terms([(g, c)])
    }

    fn add_term(&mut self, g: GroupElement, c: i64) {
        let v = self.coeffs.get(&g).copied().unwrap_or(0) + c;
        if v == 0 {
            self.coeffs.remove(&g);
        } else {
            self.coeffs.insert(g, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, g: &GroupElement) -> i64 {
        self.coeffs.get(g).copied().unwrap_or(0)
    }

    /// Support in canonical order.
    pub fn support(&self) -> impl Iterator<Item = &GroupElement> {
        self.coeffs.keys()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GroupElement, i64)> {
        self.coeffs.iter().map(|(g, c)| (g, *c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, c) in other.terms() {
            out.add_term(g.clone(), c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        Self::from_terms(self.terms().map(|(g, c)| (g.clone(), -c)))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Convolution `(Σ f_s s)(Σ g_t t) = Σ_t (Σ_s f_s g_{s^-1 t}) t`.
    pub fn multiply(&self, other: &Self) -> Self {
        let mut acc: BTreeMap<GroupElement, i64> = BTreeMap::new();
        for (s, fs) in self.terms() {
            for (u, gu) in other.terms() {
                *acc.entry(s.mul(u)).or_insert(0) += fs * gu;
            }
        }
        acc.retain(|_, c| *c != 0);
        GroupRingElement { coeffs: acc }
    }

    /// `(Σ f_s s)^* = Σ f_{s^-1} s`.
    pub fn involution(&self) -> Self {
        Self::from_terms(self.terms().map(|(g, c)| (g.inverse(), c)))
    }

    pub fn check(&self, spec: &GroupSpec) -> Result<()> {
        self.support().try_for_each(|g| spec.check(g))
    }

    pub fn format(&self, spec: &GroupSpec) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (g, c)) in self.terms().enumerate() {
            let name = spec.format(g);
            let mag = c.unsigned_abs();
            if i == 0 {
                if c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if c < 0 { " - " } else { " + " });
            }
            if mag != 1 {
                out.push_str(&format!("{mag}*"));
            }
            out.push_str(&name);
        }
        out
    }

    /// Parses coefficient lists such as `"2*e - a - a^-1"` or `"a - 1"`.
    /// A bare integer term is a multiple of the identity.
    pub fn parse(spec: &GroupSpec, s: &str) -> Result<Self> {
        let field = "group ring element";
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::parse(field, "empty expression"));
        }
        let mut terms: Vec<(i64, String)> = Vec::new();
        let mut sign = 1i64;
        let mut cur = String::new();
        let mut depth = 0usize;
        let mut prev: Option<char> = None;
        let flush = |cur: &mut String, sign: i64, terms: &mut Vec<(i64, String)>| -> Result<()> {
            let t = cur.trim().to_string();
            cur.clear();
            if t.is_empty() {
                return Err(Error::parse(field, format!("dangling sign in {s:?}")));
            }
            terms.push((sign, t));
            Ok(())
        };
        for ch in s.chars() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch);
                }
                ')' => {
                    depth = depth.saturating_sub(1);
                    cur.push(ch);
                }
                '+' | '-' if depth == 0 && prev.map(|p| p != '^').unwrap_or(true) => {
                    if cur.trim().is_empty() && terms.is_empty() {
                        if ch == '-' {
                            sign = -sign;
                        }
                    } else {
                        flush(&mut cur, sign, &mut terms)?;
                        sign = if ch == '-' { -1 } else { 1 };
                    }
                }
                _ => cur.push(ch),
            }
            if !ch.is_whitespace() {
                prev = Some(ch);
            }
        }
        flush(&mut cur, sign, &mut terms)?;

        let mut out = GroupRingElement::zero();
        for (sign, t) in terms {
            let (coef, elem) = match t.split_once('*') {
                Some((c, rest))
                    if c.trim().chars().all(|x| x.is_ascii_digit()) && !c.trim().is_empty() =>
                {
                    let c: i64 = c
                        .trim()
                        .parse()
                        .map_err(|_| Error::parse(field, format!("bad coefficient in {t:?}")))?;
                    (c, rest.trim().to_string())
                }
                _ => {
                    if t.chars().all(|x| x.is_ascii_digit()) {
                        let c: i64 = t
                            .parse()
                            .map_err(|_| Error::parse(field, format!("bad coefficient {t:?}")))?;
                        (c, "e".to_string())
                    } else {
                        (1, t.clone())
                    }
                }
            };
            let g = spec.parse(&elem)?;
            out.add_term(g, sign * coef);
        }
        Ok(out)
    }
}

impl fmt::Display for GroupRingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (g, c)) in self.terms().enumerate() {
            if i > 0 {
                f.write_str(if c < 0 { " - " } else { " + " })?;
            } else if c < 0 {
                f.write_str("-")?;
            }
            if c.unsigned_abs() != 1 {
                write!(f, "{}*", c.unsigned_abs())?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}
