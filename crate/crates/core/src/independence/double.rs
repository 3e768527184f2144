//! The doubling construction: from a family with independence density `q` to power
//! tuples over a separated pair, with every counting step checked in integers.

use num_rational::Ratio;
use serde::Serialize;

use super::search::{is_independence_set, max_independence_subset, Tri};
use super::split::power_tuple;
use crate::error::{Error, Result};
use crate::family::Family;
use crate::group::{
    find_separated_set, is_separated, maximal_separated_subset, FiniteSubset, GroupElement,
};
use crate::subshift::ShiftSystem;

/// Radius up to which separated sets are searched for.
pub const SEPARATION_RADIUS: usize = 8;

/// One integer inequality verified on a concrete run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Inequality {
    pub name: &'static str,
    pub lhs: u128,
    pub rhs: u128,
    pub holds: bool,
}

impl Inequality {
    fn at_least(name: &'static str, lhs: u128, rhs: u128) -> Self {
        Inequality {
            name,
            lhs,
            rhs,
            holds: lhs >= rhs,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DoubleWitness {
    /// The separated set with `q|E| ≥ 2`.
    pub e: FiniteSubset,
    /// Maximal subset of `F` whose translates `E f` are pairwise disjoint.
    pub f_prime: FiniteSubset,
    pub ef_prime: FiniteSubset,
    /// Index of the tuple carrying the independence set `j`.
    pub tuple: usize,
    pub j: FiniteSubset,
    /// `J_t = t^-1 (J ∩ t F')`, in the order of `e`.
    pub j_t: Vec<FiniteSubset>,
    pub pair: (GroupElement, GroupElement),
    /// `|J_s ∩ J_t| / |F'|` for the chosen pair.
    pub eta: Ratio<u64>,
    /// `J_s ∩ J_t`, an independence set for the power tuples over the pair.
    pub i: FiniteSubset,
    pub checks: Vec<Inequality>,
    pub independence: Tri,
}

impl DoubleWitness {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds) && self.independence != Tri::No
    }
}

/// Smallest `|E|` with `q|E| ≥ 2`.
pub fn separated_size(q: Ratio<u64>) -> Result<usize> {
    if *q.numer() == 0 || q > Ratio::from_integer(1) {
        return Err(Error::Precondition(format!(
            "density {q} must lie in (0, 1]"
        )));
    }
    Ok((2 * q.denom()).div_ceil(*q.numer()) as usize)
}

/// One doubling step. The output family holds `𝐀^{{s,t}}` for every tuple of the
/// input, with `{s, t}` the pair of `E` maximizing `|J_s ∩ J_t|` (first pair in
/// canonical order on ties).
pub fn double_family(
    family: &Family,
    k: &FiniteSubset,
    f: &FiniteSubset,
    q: Ratio<u64>,
    sys: &ShiftSystem,
) -> Result<(Family, DoubleWitness)> {
    if family.is_empty() || f.is_empty() {
        return Err(Error::Precondition(
            "doubling needs a nonempty family and region".into(),
        ));
    }
    let size = separated_size(q)?;
    let e = find_separated_set(sys.group(), k, size, SEPARATION_RADIUS).ok_or_else(|| {
        Error::Precondition(format!(
            "no K-separated set of size {size} outside K within radius {SEPARATION_RADIUS}"
        ))
    })?;
    let f_prime = maximal_separated_subset(f, &e);
    let ef_prime = e.product(&f_prime);
    debug_assert_eq!(ef_prime.len(), e.len() * f_prime.len());

    let mut best: Option<(usize, FiniteSubset)> = None;
    for (idx, t) in family.tuples().iter().enumerate() {
        let m = max_independence_subset(&ef_prime, t, sys)?;
        if best.as_ref().is_none_or(|(_, b)| m.size > b.len()) {
            best = Some((idx, m.set));
        }
    }
    let (tuple, j) = best.unwrap();
    let (num, den) = (*q.numer() as u128, *q.denom() as u128);
    if (j.len() as u128) * den < num * ef_prime.len() as u128 {
        return Err(Error::Precondition(format!(
            "density inequality |J| >= q|EF'| fails: |J| = {}, q = {q}, |EF'| = {}",
            j.len(),
            ef_prime.len()
        )));
    }

    let j_t: Vec<FiniteSubset> = e
        .iter()
        .map(|t| FiniteSubset::new(f_prime.iter().filter(|x| j.contains(&t.mul(x))).cloned()))
        .collect();
    let mut pick = (0, 1);
    let mut pick_size = 0;
    for a in 0..e.len() {
        for b in a + 1..e.len() {
            let n = j_t[a].intersection(&j_t[b]).len();
            if n > pick_size || (a, b) == (0, 1) {
                pick = (a, b);
                pick_size = n;
            }
        }
    }
    let (s, t) = (e.as_slice()[pick.0].clone(), e.as_slice()[pick.1].clone());
    let i = j_t[pick.0].intersection(&j_t[pick.1]);
    let eta = Ratio::new(i.len() as u64, f_prime.len() as u64);

    let (nf, ne, nfp, ni) = (
        f.len() as u128,
        e.len() as u128,
        f_prime.len() as u128,
        i.len() as u128,
    );
    let sum_jt: u128 = j_t.iter().map(|x| x.len() as u128).sum();
    let si = i.left_translate(&s);
    let ti = i.left_translate(&t);
    let covered = si.union(&ti);
    let mut checks = vec![
        Inequality::at_least("q|E| >= 2", num * ne, 2 * den),
        Inequality::at_least("|F'||E|^2 >= |F|", nfp * ne * ne, nf),
        Inequality::at_least("sum |J_t| >= 2|F'|", sum_jt, 2 * nfp),
        Inequality::at_least("|J_s n J_t||E|^2 >= |F'|", ni * ne * ne, nfp),
        Inequality::at_least("|J_s n J_t||E|^4 >= |F|", ni * ne.pow(4), nf),
    ];
    checks.push(Inequality {
        name: "sI and tI disjoint",
        lhs: si.intersection(&ti).len() as u128,
        rhs: 0,
        holds: si.is_disjoint(&ti),
    });
    checks.push(Inequality {
        name: "sI u tI inside J",
        lhs: covered.difference(&j).len() as u128,
        rhs: 0,
        holds: covered.is_subset(&j),
    });

    let pair = FiniteSubset::new([s.clone(), t.clone()]);
    let limit = sys.budget().max_items;
    let out: Family = family
        .tuples()
        .iter()
        .map(|a| power_tuple(a, &pair, limit))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();
    let independence = if i.is_empty() {
        Tri::Yes
    } else {
        is_independence_set(&i, &out.tuples()[tuple], sys)?.status
    };
    let witness = DoubleWitness {
        e,
        f_prime,
        ef_prime,
        tuple,
        j,
        j_t,
        pair: (s, t),
        eta,
        i,
        checks,
        independence,
    };
    if !witness.all_hold() {
        let failed: Vec<&str> = witness
            .checks
            .iter()
            .filter(|c| !c.holds)
            .map(|c| c.name)
            .collect();
        return Err(Error::Invalid(format!(
            "doubling witness failed checks: {failed:?}"
        )));
    }
    Ok((out, witness))
}

/// Result of [`double_iterate`].
#[derive(Debug, Clone)]
pub struct DoubleChain {
    pub family: Family,
    pub stages: Vec<DoubleWitness>,
    /// `E' = P_1 P_2 .. P_n` with `P_i` the pair chosen at stage `i`: every output
    /// tuple is `𝐀^{E'}` up to entry order.
    pub composed: FiniteSubset,
    /// Exclusion set used at each stage.
    pub exclusions: Vec<FiniteSubset>,
    pub composed_separated: bool,
    pub composed_avoids_k: bool,
}

/// Exclusion set for the next pair given the product `P` of earlier pairs: separating
/// the next pair by `P^-1 K^-1 K P ∪ P^-1 P` and avoiding `P^-1 K` keeps `P·Q` a
/// `K`-separated set of size `|P||Q|` outside `K`.
fn next_exclusion(k: &FiniteSubset, p: &FiniteSubset, identity: GroupElement) -> FiniteSubset {
    let pinv = p.inverse();
    let kk = k.inverse().product(k);
    FiniteSubset::singleton(identity)
        .union(&pinv.product(&kk).product(p))
        .union(&pinv.product(k))
        .union(&pinv.product(p))
}

/// `n` doubling steps with the same region and density parameter at every stage.
pub fn double_iterate(
    family: &Family,
    k: &FiniteSubset,
    f: &FiniteSubset,
    q: Ratio<u64>,
    n: usize,
    sys: &ShiftSystem,
) -> Result<DoubleChain> {
    let identity = FiniteSubset::singleton(sys.group().identity());
    let mut current = family.clone();
    let mut composed = identity.clone();
    let mut stages = Vec::with_capacity(n);
    let mut exclusions = Vec::with_capacity(n);
    for stage in 0..n {
        let ks = if stage == 0 {
            k.clone()
        } else {
            next_exclusion(k, &composed, sys.group().identity())
        };
        let (next, w) = double_family(&current, &ks, f, q, sys).map_err(|err| {
            Error::Precondition(format!("doubling stage {} failed: {err}", stage + 1))
        })?;
        let pair = FiniteSubset::new([w.pair.0.clone(), w.pair.1.clone()]);
        composed = composed.product(&pair);
        exclusions.push(ks);
        stages.push(w);
        current = next;
    }
    let composed_separated = is_separated(&composed, k);
    let composed_avoids_k = n == 0 || composed.is_disjoint(k);
    Ok(DoubleChain {
        family: current,
        stages,
        composed,
        exclusions,
        composed_separated,
        composed_avoids_k,
    })
}
