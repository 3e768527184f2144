//! Bounded-radius consistency checks for systems without an exact decision procedure.
//!
//! A row is refuted when the constraints living on a finite neighbourhood of its
//! domain admit no solution extending it; otherwise it is reported as locally
//! realizable. Refutations are sound, acceptances are not.

use std::collections::{HashMap, HashSet};

use super::system::{Budget, ForbiddenPattern, Verdict};
use crate::error::Result;
use crate::group::{FiniteSubset, GroupElement};
use crate::ring::GroupRingElement;

const MAX_LOCAL_VARIABLES: usize = 4096;

fn is_prime(n: u8) -> bool {
    n >= 2
        && (2..n)
            .take_while(|d| d * d <= n)
            .all(|d| !n.is_multiple_of(d))
}

fn unknown(radius: usize, reason: impl Into<String>) -> Verdict {
    Verdict::Unknown {
        radius,
        reason: reason.into(),
    }
}

/// Constraint centres `t` whose window `t·W` reaches the domain, grown `layers` times.
fn neighbourhood(
    domain: &FiniteSubset,
    window: &[GroupElement],
    layers: usize,
) -> (Vec<GroupElement>, Vec<GroupElement>) {
    let inv: Vec<GroupElement> = window.iter().map(GroupElement::inverse).collect();
    let mut vars: HashSet<GroupElement> = domain.iter().cloned().collect();
    let mut centres: HashSet<GroupElement> = HashSet::new();
    for _ in 0..=layers {
        let new_centres: Vec<GroupElement> = vars
            .iter()
            .flat_map(|v| inv.iter().map(move |u| v.mul(u)))
            .collect();
        centres.extend(new_centres);
        let new_vars: Vec<GroupElement> = centres
            .iter()
            .flat_map(|t| window.iter().map(move |w| t.mul(w)))
            .collect();
        vars.extend(new_vars);
    }
    let mut centres: Vec<GroupElement> = centres.into_iter().collect();
    centres.sort();
    let mut vars: Vec<GroupElement> = vars.into_iter().collect();
    vars.sort();
    (centres, vars)
}

fn inv_mod(a: i64, p: i64) -> i64 {
    // p is prime: a^(p-2)
    let mut r = 1;
    let mut b = a.rem_euclid(p);
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Consistency of `Σ coeff·var ≡ rhs (mod p)` by Gaussian elimination.
fn consistent_mod_prime(mut rows: Vec<(Vec<i64>, i64)>, vars: usize, p: i64) -> bool {
    let mut pivot_row = 0;
    for col in 0..vars {
        let Some(found) = (pivot_row..rows.len()).find(|&r| rows[r].0[col] != 0) else {
            continue;
        };
        rows.swap(pivot_row, found);
        let inv = inv_mod(rows[pivot_row].0[col], p);
        let (coeffs, rhs) = &mut rows[pivot_row];
        for c in coeffs.iter_mut() {
            *c = *c * inv % p;
        }
        *rhs = *rhs * inv % p;
        let (pc, pr) = rows[pivot_row].clone();
        for (r, (coeffs, rhs)) in rows.iter_mut().enumerate() {
            if r == pivot_row {
                continue;
            }
            let factor = coeffs[col];
            if factor == 0 {
                continue;
            }
            for (c, &q) in coeffs.iter_mut().zip(&pc) {
                *c = (*c - factor * q).rem_euclid(p);
            }
            *rhs = (*rhs - factor * pr).rem_euclid(p);
        }
        pivot_row += 1;
    }
    rows[pivot_row..].iter().all(|(_, rhs)| *rhs == 0)
}

pub(crate) fn linear_verdict(
    f: &GroupRingElement,
    n: u8,
    layers: usize,
    domain: &FiniteSubset,
    row: &[u8],
    _budget: &Budget,
) -> Result<Verdict> {
    if !is_prime(n) {
        return Ok(unknown(
            layers,
            format!("modulus {n} is not prime and f is not supported in a cyclic subgroup"),
        ));
    }
    let p = n as i64;
    let terms: Vec<(GroupElement, i64)> = f
        .terms()
        .map(|(g, c)| (g.clone(), c.rem_euclid(p)))
        .filter(|(_, c)| *c != 0)
        .collect();
    let window: Vec<GroupElement> = terms.iter().map(|(g, _)| g.clone()).collect();
    let (centres, vars) = neighbourhood(domain, &window, layers);
    let pinned: HashMap<&GroupElement, u8> = domain.iter().zip(row.iter().copied()).collect();
    let free: Vec<&GroupElement> = vars.iter().filter(|v| !pinned.contains_key(v)).collect();
    if free.len() > MAX_LOCAL_VARIABLES {
        return Ok(unknown(
            layers,
            format!(
                "{} free variables exceed the local solver limit",
                free.len()
            ),
        ));
    }
    let index: HashMap<&GroupElement, usize> =
        free.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut rows = Vec::with_capacity(centres.len());
    for t in &centres {
        let mut coeffs = vec![0i64; free.len()];
        let mut rhs = 0i64;
        for (u, c) in &terms {
            let x = t.mul(u);
            match pinned.get(&x) {
                Some(&v) => rhs -= c * v as i64,
                None => {
                    let i = index[&x];
                    coeffs[i] = (coeffs[i] + c) % p;
                }
            }
        }
        rows.push((coeffs, rhs.rem_euclid(p)));
    }
    if consistent_mod_prime(rows, free.len(), p) {
        Ok(Verdict::Realizable {
            witness: row.to_vec(),
            exact: false,
        })
    } else {
        Ok(Verdict::Empty)
    }
}

pub(crate) fn sft_verdict(
    forbidden: &[ForbiddenPattern],
    alphabet: u8,
    layers: usize,
    domain: &FiniteSubset,
    row: &[u8],
    budget: &Budget,
) -> Result<Verdict> {
    let window: Vec<GroupElement> = {
        let mut w: Vec<GroupElement> = forbidden
            .iter()
            .flat_map(|p| p.cells().iter().map(|(g, _)| g.clone()))
            .collect();
        w.sort();
        w.dedup();
        w
    };
    let (centres, vars) = neighbourhood(domain, &window, layers);
    if vars.len() > MAX_LOCAL_VARIABLES {
        return Ok(unknown(
            layers,
            format!("{} variables exceed the local solver limit", vars.len()),
        ));
    }
    // Pinned coordinates first, then the rest in canonical order.
    let pinned: HashMap<&GroupElement, u8> = domain.iter().zip(row.iter().copied()).collect();
    let mut order: Vec<&GroupElement> = domain.iter().collect();
    order.extend(vars.iter().filter(|v| !pinned.contains_key(v)));
    let pos: HashMap<&GroupElement, usize> =
        order.iter().enumerate().map(|(i, v)| (*v, i)).collect();

    // Each occurrence becomes a list of (variable position, forbidden value); it is
    // checked once its last variable is assigned.
    let mut checks: Vec<Vec<Vec<(usize, u8)>>> = vec![Vec::new(); order.len()];
    for t in &centres {
        for p in forbidden {
            let cells: Vec<(usize, u8)> = p
                .cells()
                .iter()
                .map(|(w, v)| (pos[&t.mul(w)], *v))
                .collect();
            let last = cells.iter().map(|c| c.0).max().unwrap();
            checks[last].push(cells);
        }
    }
    let mut assign: Vec<u8> = vec![0; order.len()];
    let violated = |assign: &[u8], i: usize| {
        checks[i]
            .iter()
            .any(|cells| cells.iter().all(|&(j, v)| assign[j] == v))
    };

    let fixed = domain.len();
    for i in 0..fixed {
        assign[i] = row[i];
        if violated(&assign, i) {
            return Ok(Verdict::Empty);
        }
    }
    // Iterative backtracking over the free variables.
    let total = order.len();
    let mut nodes: u64 = 0;
    let mut depth = fixed;
    let mut next_letter = vec![0u8; total + 1];
    loop {
        if depth == total {
            return Ok(Verdict::Realizable {
                witness: row.to_vec(),
                exact: false,
            });
        }
        if next_letter[depth] >= alphabet {
            next_letter[depth] = 0;
            if depth == fixed {
                return Ok(Verdict::Empty);
            }
            depth -= 1;
            continue;
        }
        nodes += 1;
        if nodes > budget.max_search_nodes {
            return Ok(unknown(layers, "local search node budget exhausted"));
        }
        assign[depth] = next_letter[depth];
        next_letter[depth] += 1;
        if !violated(&assign, depth) {
            depth += 1;
        }
    }
}
