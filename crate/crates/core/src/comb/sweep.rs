//! Empirical sweeps: shattering under a cover-number hypothesis, and the shattering
//! threshold checked by brute force.

use itertools::Itertools;
use num_bigint::BigUint;
use num_rational::Ratio;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::trace::{full_shatter_max, ns_cover_number, shatters, TraceSet, WCoverTable};
use crate::error::{Error, Result};

/// Exhaustive enumeration is used while the number of candidate cells is at most this.
pub const EXHAUSTIVE_CELLS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Every `S ⊆ {0,..,k}^n`.
    Exhaustive,
    /// Every `S ⊆ [k]^n`.
    ExhaustiveNonzero,
    /// Seeded random `S ⊆ {0,..,k}^n`.
    Sampled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Comb1Row {
    pub k: u8,
    #[serde(serialize_with = "crate::report::ratio")]
    pub b: Ratio<u64>,
    pub n: usize,
    pub mode: SweepMode,
    pub seed: u64,
    pub examined: u64,
    /// Trace sets with `N_S ≥ k^{bn}`.
    pub meeting: u64,
    /// Count of meeting trace sets by full-shatter size `0..=n`.
    pub histogram: Vec<u64>,
    #[serde(serialize_with = "crate::report::opt_ratio")]
    pub min_ratio: Option<Ratio<u64>>,
    pub vacuous: bool,
    /// Every meeting trace set shatters a nonempty set.
    pub positive: bool,
}

/// `N^q ≥ k^{p n}` for `b = p/q`.
fn meets(ns: usize, k: u8, b: Ratio<u64>, n: usize) -> bool {
    let lhs = BigUint::from(ns).pow(*b.denom() as u32);
    let rhs = BigUint::from(k).pow((*b.numer() * n as u64) as u32);
    lhs >= rhs
}

struct Tally {
    examined: u64,
    meeting: u64,
    histogram: Vec<u64>,
    min_ratio: Option<Ratio<u64>>,
}

impl Tally {
    fn new(n: usize) -> Self {
        Tally {
            examined: 0,
            meeting: 0,
            histogram: vec![0; n + 1],
            min_ratio: None,
        }
    }

    fn record(&mut self, s: &TraceSet, ns: usize, k: u8, b: Ratio<u64>) {
        self.examined += 1;
        if !meets(ns, k, b, s.n()) {
            return;
        }
        self.meeting += 1;
        let size = full_shatter_max(s).size;
        self.histogram[size] += 1;
        let r = Ratio::new(size as u64, s.n().max(1) as u64);
        self.min_ratio = Some(self.min_ratio.map_or(r, |m| m.min(r)));
    }
}

/// For each `n`, the least `|J|/n` over trace sets with `N_S ≥ k^{bn}`, where `J` is a
/// largest fully shattered set. Small shapes are enumerated; larger ones are sampled
/// with `trials` seeded draws.
pub fn comb1_sweep(
    k: u8,
    b: Ratio<u64>,
    sizes: &[usize],
    seed: u64,
    trials: u64,
) -> Result<Vec<Comb1Row>> {
    if *b.numer() == 0 {
        return Err(Error::Precondition("b must be positive".into()));
    }
    if k < 2 {
        return Err(Error::Precondition("k must be at least 2".into()));
    }
    let mut rows = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let all_cells = (k as usize + 1).checked_pow(n as u32).unwrap_or(usize::MAX);
        let nonzero_cells = (k as usize).checked_pow(n as u32).unwrap_or(usize::MAX);
        let mut tally = Tally::new(n);
        let mode = if all_cells <= EXHAUSTIVE_CELLS {
            let table = WCoverTable::new(k, n)?;
            let mut buf = Vec::new();
            for mask in 1u128..(1 << all_cells) {
                let ns = table.ns_of_mask(mask, &mut buf)?;
                tally.record(&TraceSet::from_mask(k, n, mask)?, ns, k, b);
            }
            SweepMode::Exhaustive
        } else if nonzero_cells <= EXHAUSTIVE_CELLS {
            let cube: Vec<Vec<u8>> = TraceSet::full_cube(k, n)?.maps().collect();
            for mask in 1u32..(1 << nonzero_cells) {
                let chosen = (0..nonzero_cells)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| cube[i].as_slice());
                let s = TraceSet::from_maps(k, n, chosen)?;
                let ns = ns_cover_number(&s, 1 << 20, u64::MAX)?.count;
                tally.record(&s, ns, k, b);
            }
            SweepMode::ExhaustiveNonzero
        } else {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let probe = TraceSet::new(k, n)?;
            for t in 0..trials {
                // densities cycle through 10%..90% so sparse and dense sets both appear
                let density = (t % 9 + 1) as f64 / 10.0;
                let mut s = TraceSet::new(k, n)?;
                for c in 0..all_cells {
                    if rng.gen_bool(density) {
                        s.insert(&probe.decode(c))?;
                    }
                }
                if s.is_empty() {
                    continue;
                }
                let ns = ns_cover_number(&s, 1 << 20, 50_000_000)?.count;
                tally.record(&s, ns, k, b);
            }
            SweepMode::Sampled
        };
        let vacuous = tally.meeting == 0;
        rows.push(Comb1Row {
            k,
            b,
            n,
            mode,
            seed,
            examined: tally.examined,
            meeting: tally.meeting,
            positive: !vacuous && tally.histogram[0] == 0,
            histogram: tally.histogram,
            min_ratio: tally.min_ratio,
            vacuous,
        });
    }
    Ok(rows)
}

/// Which closed form is used as the shattering threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ThresholdForm {
    /// `Σ_{i<t} C(n,i) (k-1)^{n-i}`.
    #[default]
    KarpovskyMilman,
    /// `Σ_{i<t} C(n,i) (k-1)^i`; coincides with the default for `k = 2` only.
    Binomial,
}

impl ThresholdForm {
    pub fn threshold(self, k: u8, n: usize, t: usize) -> u128 {
        let k1 = k as u128 - 1;
        (0..t.min(n + 1))
            .map(|i| {
                let e = match self {
                    ThresholdForm::KarpovskyMilman => n - i,
                    ThresholdForm::Binomial => i,
                };
                binomial(n, i) * k1.pow(e as u32)
            })
            .sum()
    }

    /// A trace set of exactly threshold size in which no `t`-set is shattered: maps
    /// with fewer than `t` coordinates equal to 1 (default form) or different from 1.
    pub fn extremal_set(self, k: u8, n: usize, t: usize) -> Result<TraceSet> {
        let mut s = TraceSet::new(k, n)?;
        for m in (0..n).map(|_| 1..=k).multi_cartesian_product() {
            let ones = m.iter().filter(|&&v| v == 1).count();
            let hits = match self {
                ThresholdForm::KarpovskyMilman => ones,
                ThresholdForm::Binomial => n - ones,
            };
            if hits < t {
                s.insert(&m)?;
            }
        }
        Ok(s)
    }
}

fn binomial(n: usize, i: usize) -> u128 {
    (0..i).fold(1u128, |acc, j| acc * (n - j) as u128 / (j as u128 + 1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum KmMode {
    Exhaustive,
    Random { seed: u64, trials: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KmReport {
    pub k: u8,
    pub n: usize,
    pub t: usize,
    pub form: ThresholdForm,
    pub mode: KmMode,
    pub threshold: u128,
    pub checked: u64,
    /// Trace sets above the threshold with no shattered `t`-set.
    pub counterexamples: u64,
    /// Up to ten counterexamples, as lists of maps.
    pub examples: Vec<Vec<Vec<u8>>>,
    /// Largest size seen among trace sets shattering no `t`-set.
    pub max_unshattered: usize,
    pub extremal_size: usize,
    pub extremal_unshattered: bool,
}

impl KmReport {
    pub fn holds(&self) -> bool {
        self.counterexamples == 0
    }
}

fn shatters_some(maps: &[Vec<u8>], k: u8, n: usize, t: usize) -> bool {
    t == 0 || (0..n).combinations(t).any(|j| shatters(maps, k, &j))
}

/// Checks `|S| > threshold ⇒` some `t`-set is fully shattered, over `S ⊆ [k]^n`.
pub fn km_bound_check(
    k: u8,
    n: usize,
    t: usize,
    form: ThresholdForm,
    mode: KmMode,
) -> Result<KmReport> {
    if k < 2 || t > n {
        return Err(Error::Precondition("need k ≥ 2 and t ≤ n".into()));
    }
    let cube: Vec<Vec<u8>> = TraceSet::full_cube(k, n)?.maps().collect();
    let threshold = form.threshold(k, n, t);
    let extremal = form.extremal_set(k, n, t)?;
    let extremal_maps: Vec<Vec<u8>> = extremal.maps().collect();
    let mut report = KmReport {
        k,
        n,
        t,
        form,
        mode,
        threshold,
        checked: 0,
        counterexamples: 0,
        examples: Vec::new(),
        max_unshattered: 0,
        extremal_size: extremal_maps.len(),
        extremal_unshattered: !shatters_some(&extremal_maps, k, n, t),
    };
    let mut visit = |maps: Vec<Vec<u8>>| {
        report.checked += 1;
        if shatters_some(&maps, k, n, t) {
            return;
        }
        report.max_unshattered = report.max_unshattered.max(maps.len());
        if maps.len() as u128 > threshold {
            report.counterexamples += 1;
            if report.examples.len() < 10 {
                report.examples.push(maps);
            }
        }
    };
    match mode {
        KmMode::Exhaustive => {
            if cube.len() > 20 {
                return Err(Error::budget(
                    "trace subsets",
                    1u128 << cube.len().min(127),
                    1 << 20,
                ));
            }
            for mask in 0u32..(1 << cube.len()) {
                visit(
                    (0..cube.len())
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| cube[i].clone())
                        .collect(),
                );
            }
        }
        KmMode::Random { seed, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let lo = (threshold as usize + 1).min(cube.len());
            for _ in 0..trials {
                let size = rng.gen_range(lo..=cube.len());
                let mut idx = sample(&mut rng, cube.len(), size).into_vec();
                idx.sort_unstable();
                visit(idx.into_iter().map(|i| cube[i].clone()).collect());
            }
        }
    }
    Ok(report)
}
