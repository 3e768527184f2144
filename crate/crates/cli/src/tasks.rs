//! Task runners. Each fills a [`TaskRecord`]; core errors end the task, not the run.

use std::time::Instant;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use indlab_core::comb::{
    comb1_sweep, full_shatter_max, km_bound_check, ns_cover_number, KmMode, ThresholdForm, TraceSet,
};
use indlab_core::cover::{
    cover_from_tuples, entropy_lower_from_density, naive_entropy_upper, OpenCover, Region,
};
use indlab_core::independence::{
    chaos_tower_step, density_upper_estimate, double_iterate, ChaosStage,
};
use indlab_core::report::format_ratio;
use indlab_core::scenarios::{
    family_vs_single_demo, verify_no_orbit_ie, xa1_entropy_evidence, xa1_system,
};
use indlab_core::{Error, FiniteSubset, GroupElement, GroupSpec, ShiftSystem};

use crate::config::{parse_q, CoverChoice, LabConfig, RunConfig, ScenarioConfig, TaskConfig};
use crate::report::{q, Bound, Table, TaskRecord};

type CoreResult<T> = indlab_core::Result<T>;

pub fn task_name(task: &TaskConfig) -> String {
    match task {
        TaskConfig::Entropy { .. } => "entropy".into(),
        TaskConfig::Density { .. } => "density".into(),
        TaskConfig::LemmaLab(lab) => format!(
            "lemma-lab:{}",
            match lab {
                LabConfig::Km { .. } => "km",
                LabConfig::Comb1 { .. } => "comb1",
                LabConfig::Ns { .. } => "ns",
                LabConfig::Double { .. } => "double",
                LabConfig::Chaos { .. } => "chaos",
            }
        ),
        TaskConfig::Scenario(s) => format!(
            "scenario:{}",
            match s {
                ScenarioConfig::NoOrbitIe { .. } => "no-orbit-ie",
                ScenarioConfig::FamilyVsSingle { .. } => "family-vs-single",
                ScenarioConfig::Xa1Entropy { .. } => "xa1-entropy",
            }
        ),
    }
}

/// Runs one task of a validated configuration.
pub fn run_task(cfg: &RunConfig, index: usize, seed: u64) -> TaskRecord {
    let task = &cfg.tasks[index];
    let mut rec = TaskRecord::new(index, &task_name(task), seed);
    let start = Instant::now();
    let outcome = match task {
        TaskConfig::Entropy {
            cover,
            expect_min_ratio,
        } => entropy(cfg, *cover, expect_min_ratio.as_ref(), &mut rec),
        TaskConfig::Density { expect_infimum } => density(cfg, expect_infimum.as_deref(), &mut rec),
        TaskConfig::LemmaLab(lab) => lemma_lab(cfg, lab, seed, &mut rec),
        TaskConfig::Scenario(s) => scenario(s, &mut rec),
    };
    if let Err(e) = outcome {
        rec.fail_with(&e);
    }
    rec.elapsed = start.elapsed();
    rec
}

fn config_error(e: crate::CliError) -> Error {
    Error::Invalid(e.to_string())
}

fn setup(cfg: &RunConfig) -> CoreResult<(ShiftSystem, Vec<Region>)> {
    let sys = cfg.build_system().map_err(config_error)?;
    let regions = cfg.build_regions(&sys).map_err(config_error)?;
    if regions.is_empty() {
        return Err(Error::Precondition(
            "the task needs at least one region".into(),
        ));
    }
    for r in &regions {
        if r.set.len() > cfg.budgets.max_region {
            return Err(Error::Budget {
                what: format!("region {}", r.id),
                needed: r.set.len() as u128,
                limit: cfg.budgets.max_region as u128,
            });
        }
    }
    Ok((sys, regions))
}

fn entropy(
    cfg: &RunConfig,
    choice: CoverChoice,
    expect: Option<&(u64, String)>,
    rec: &mut TaskRecord,
) -> CoreResult<()> {
    let (sys, regions) = setup(cfg)?;
    let cover = match choice {
        CoverChoice::ValuePartition => {
            OpenCover::value_partition(sys.alphabet_size(), &sys.group().identity())?
        }
        CoverChoice::Family => {
            cover_from_tuples(&cfg.build_family(&sys).map_err(config_error)?, &sys)?.joined
        }
    };
    let rep = naive_entropy_upper(&cover, &sys, &regions)?;
    let mut table = Table::new(
        "entropy",
        &[
            "region",
            "size:exact",
            "n_low:lower",
            "n_high:upper",
            "ratio:upper",
            "ratio_f64:upper",
            "error",
        ],
    );
    for row in &rep.rows {
        let (lo, hi) = row.n.map_or((String::new(), String::new()), |n| {
            (n.low.to_string(), n.high.to_string())
        });
        let (expr, float) = row
            .ratio
            .as_ref()
            .map_or((String::new(), String::new()), |r| {
                (r.to_string(), format!("{:.9}", r.to_f64()))
            });
        table.push(vec![
            row.region_id.clone(),
            row.size.to_string(),
            lo,
            hi,
            expr,
            float,
            row.error.clone().unwrap_or_default(),
        ]);
    }
    rec.tables.push(table);
    rec.row_timings = rep.timings.clone();
    rec.set("cover_items", q(cover.len(), Bound::Exact));
    rec.set(
        "min_ratio",
        rep.min_ratio.as_ref().map(|r| q(r, Bound::Upper)),
    );
    rec.set("min_region", &rep.min_region);
    rec.check(
        "every region evaluated",
        rep.rows.iter().all(|r| r.error.is_none()),
    );
    if let Some((base, multiple)) = expect {
        let want = parse_q("expect_min_ratio", multiple).map_err(config_error)?;
        let got = rep
            .min_ratio
            .as_ref()
            .and_then(|r| r.as_log_multiple(*base));
        rec.check(
            format!("min ratio = {multiple} ln({base})"),
            got == Some(want),
        );
    }
    Ok(())
}

fn density(cfg: &RunConfig, expect: Option<&str>, rec: &mut TaskRecord) -> CoreResult<()> {
    let (sys, regions) = setup(cfg)?;
    let family = cfg.build_family(&sys).map_err(config_error)?;
    let rep = density_upper_estimate(&family, &regions, &sys)?;
    let mut table = Table::new(
        "density",
        &[
            "region",
            "size:exact",
            "tuple",
            "max_size:exact",
            "ratio:exact",
            "set",
            "error",
        ],
    );
    for row in &rep.rows {
        match &row.result {
            Some(r) => {
                let bound_ok = r.best.complete && r.best.exact;
                let set: Vec<String> = r.best.set.iter().map(|g| sys.group().format(g)).collect();
                table.push(vec![
                    row.region_id.clone(),
                    row.size.to_string(),
                    r.tuple.to_string(),
                    r.best.size.to_string(),
                    format_ratio(&r.ratio),
                    set.join(" "),
                    if bound_ok {
                        String::new()
                    } else {
                        "search incomplete or inexact: value is a lower bound".into()
                    },
                ]);
                rec.check(format!("{} search exact", row.region_id), bound_ok);
            }
            None => table.push(vec![
                row.region_id.clone(),
                row.size.to_string(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                row.error.clone().unwrap_or_default(),
            ]),
        }
    }
    rec.tables.push(table);
    rec.row_timings = rep.timings.clone();
    rec.set(
        "infimum",
        rep.infimum.map(|r| q(format_ratio(&r), Bound::Upper)),
    );
    if let Some(inf) = rep.infimum {
        let k_min = family.tuples().iter().map(|t| t.k()).min().unwrap_or(0) as u64;
        if k_min >= 2 {
            let lower = entropy_lower_from_density(inf, k_min)?;
            rec.set("entropy_lower", q(&lower, Bound::Evidence));
        }
    }
    rec.check(
        "every region evaluated",
        rep.rows.iter().all(|r| r.error.is_none()),
    );
    if let Some(want) = expect {
        let want = parse_q("expect_infimum", want).map_err(config_error)?;
        rec.check(
            format!("infimum = {}", format_ratio(&want)),
            rep.infimum == Some(want),
        );
    }
    Ok(())
}

fn lemma_lab(cfg: &RunConfig, lab: &LabConfig, seed: u64, rec: &mut TaskRecord) -> CoreResult<()> {
    match lab {
        LabConfig::Km {
            k,
            n,
            t,
            binomial,
            trials,
        } => {
            let form = if *binomial {
                ThresholdForm::Binomial
            } else {
                ThresholdForm::KarpovskyMilman
            };
            let mode = trials.map_or(KmMode::Exhaustive, |trials| KmMode::Random { seed, trials });
            let r = km_bound_check(*k, *n, *t, form, mode)?;
            let mut table = Table::new(
                "km",
                &[
                    "k",
                    "n",
                    "t",
                    "form",
                    "threshold:exact",
                    "checked",
                    "counterexamples:exact",
                    "max_unshattered:exact",
                    "extremal_size:exact",
                ],
            );
            let form_name = if *binomial {
                "binomial"
            } else {
                "karpovsky-milman"
            };
            table.push(vec![
                k.to_string(),
                n.to_string(),
                t.to_string(),
                form_name.into(),
                r.threshold.to_string(),
                r.checked.to_string(),
                r.counterexamples.to_string(),
                r.max_unshattered.to_string(),
                r.extremal_size.to_string(),
            ]);
            rec.tables.push(table);
            rec.set("examples", &r.examples);
            rec.check(
                "no trace set above the threshold avoids shattering",
                r.holds(),
            );
            rec.check("extremal set shatters no t-set", r.extremal_unshattered);
        }
        LabConfig::Comb1 {
            k,
            b,
            sizes,
            trials,
        } => {
            let b = parse_q("lemma-lab.b", b).map_err(config_error)?;
            let rows = comb1_sweep(*k, b, sizes, seed, *trials)?;
            let mut table = Table::new(
                "comb1",
                &[
                    "k",
                    "b",
                    "n",
                    "mode",
                    "seed",
                    "examined",
                    "meeting",
                    "min_ratio:evidence",
                    "histogram",
                    "positive",
                ],
            );
            for r in &rows {
                let hist: Vec<String> = r.histogram.iter().map(u64::to_string).collect();
                table.push(vec![
                    r.k.to_string(),
                    format_ratio(&r.b),
                    r.n.to_string(),
                    format!("{:?}", r.mode).to_lowercase(),
                    r.seed.to_string(),
                    r.examined.to_string(),
                    r.meeting.to_string(),
                    r.min_ratio.map(|x| format_ratio(&x)).unwrap_or_default(),
                    hist.join(" "),
                    r.positive.to_string(),
                ]);
                rec.check(
                    format!("n = {}: shattering ratio positive", r.n),
                    r.positive || r.vacuous,
                );
            }
            rec.tables.push(table);
        }
        LabConfig::Ns { k, n, trials } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cells = TraceSet::new(*k, *n)?;
            let total = (*k as usize + 1).pow(*n as u32);
            let mut table = Table::new(
                "ns",
                &[
                    "trial",
                    "k",
                    "n",
                    "size:exact",
                    "ns:exact",
                    "shatter:exact",
                    "ratio:exact",
                ],
            );
            for trial in 0..*trials {
                let mut s = TraceSet::new(*k, *n)?;
                let p: f64 = rng.gen_range(0.1..0.9);
                for c in 0..total {
                    if rng.gen_bool(p) {
                        s.insert(&cells.decode(c))?;
                    }
                }
                if s.is_empty() {
                    s.insert(&cells.decode(rng.gen_range(0..total)))?;
                }
                let ns = ns_cover_number(&s, cfg.budgets.max_items, cfg.budgets.max_search_nodes)?;
                let sh = full_shatter_max(&s);
                let ratio = if *n == 0 {
                    Ratio::from_integer(0)
                } else {
                    Ratio::new(sh.size as u64, *n as u64)
                };
                table.push(vec![
                    trial.to_string(),
                    k.to_string(),
                    n.to_string(),
                    s.len().to_string(),
                    ns.count.to_string(),
                    sh.size.to_string(),
                    format_ratio(&ratio),
                ]);
            }
            rec.tables.push(table);
        }
        LabConfig::Double {
            k_radius,
            f_radius,
            q: qs,
            iterations,
        } => {
            let sys = cfg.build_system().map_err(config_error)?;
            let family = cfg.build_family(&sys).map_err(config_error)?;
            let g = sys.group();
            let dq = parse_q("lemma-lab.q", qs).map_err(config_error)?;
            let chain = double_iterate(
                &family,
                &g.ball(*k_radius),
                &g.ball(*f_radius),
                dq,
                *iterations,
                &sys,
            )?;
            let mut table = Table::new(
                "double",
                &[
                    "stage",
                    "e_size:exact",
                    "f_prime:exact",
                    "j:exact",
                    "pair",
                    "eta:exact",
                    "i_size:exact",
                    "failed_checks",
                ],
            );
            for (i, w) in chain.stages.iter().enumerate() {
                let failed: Vec<&str> = w
                    .checks
                    .iter()
                    .filter(|c| !c.holds)
                    .map(|c| c.name)
                    .collect();
                table.push(vec![
                    (i + 1).to_string(),
                    w.e.len().to_string(),
                    w.f_prime.len().to_string(),
                    w.j.len().to_string(),
                    format!("{} {}", g.format(&w.pair.0), g.format(&w.pair.1)),
                    format_ratio(&w.eta),
                    w.i.len().to_string(),
                    failed.join("; "),
                ]);
                for c in &w.checks {
                    rec.check(format!("stage {}: {}", i + 1, c.name), c.holds);
                }
            }
            rec.tables.push(table);
            rec.set("composed_size", q(chain.composed.len(), Bound::Exact));
            rec.set(
                "output_tuple_length",
                q(
                    chain.family.tuples().first().map_or(0, |t| t.k()),
                    Bound::Exact,
                ),
            );
            rec.check("composed set is K-separated", chain.composed_separated);
            rec.check("composed set avoids K", chain.composed_avoids_k);
        }
        LabConfig::Chaos {
            k1_radius,
            k2_radius,
        } => {
            let sys = cfg.build_system().map_err(config_error)?;
            let family = cfg.build_family(&sys).map_err(config_error)?;
            let g = sys.group();
            let stage = ChaosStage::initial(family, g.ball(*k1_radius), &sys)?;
            let (next, r) = chaos_tower_step(&stage, &g.ball(*k2_radius), &sys)?;
            let mut table = Table::new("gammas", &["gamma", "inclusions", "outside_excluded"]);
            for gc in &r.gammas {
                let gamma: Vec<String> = gc.gamma.iter().map(|x| (x + 1).to_string()).collect();
                table.push(vec![
                    gamma.join(" "),
                    gc.inclusions.to_string(),
                    gc.outside_excluded.to_string(),
                ]);
            }
            rec.tables.push(table);
            rec.set("ell", q(r.ell, Bound::Exact));
            rec.set("n", q(r.n, Bound::Exact));
            rec.set("exclusion_size", q(r.exclusion_size, Bound::Exact));
            rec.set("tuples_before_split", q(r.before_split, Bound::Exact));
            rec.set("tuples_after_split", q(r.after_split, Bound::Exact));
            rec.set("next_stage", q(next.m, Bound::Exact));
            rec.set("exact", r.exact);
            rec.check("inclusions for every gamma", r.property2);
            rec.check("entry diameters after the split", r.property3);
            rec.check("translates avoid the exclusion set", r.property4);
            rec.check("pairwise disjoint entries", r.property5);
            rec.check("entries refine their parents", r.inherited);
        }
    }
    Ok(())
}

fn bases(names: &[String]) -> CoreResult<Vec<GroupElement>> {
    let g = GroupSpec::free(2)?;
    names.iter().map(|s| g.parse(s)).collect()
}

fn scenario(s: &ScenarioConfig, rec: &mut TaskRecord) -> CoreResult<()> {
    match s {
        ScenarioConfig::NoOrbitIe {
            moduli,
            bases: names,
            k_max,
        } => {
            let mut table = Table::new(
                "no_orbit_ie",
                &["n", "base", "k", "max_size:exact", "holds"],
            );
            for &n in moduli {
                for s in bases(names)? {
                    for row in verify_no_orbit_ie(n, &s, *k_max)? {
                        let size = if row.exact {
                            row.max_size.to_string()
                        } else {
                            format!("{} (inexact)", row.max_size)
                        };
                        table.push(vec![
                            n.to_string(),
                            row.base.clone(),
                            row.k.to_string(),
                            size,
                            row.holds.to_string(),
                        ]);
                        rec.check(
                            format!("n={n} s={} K={}: largest set is 1", row.base, row.k),
                            row.holds,
                        );
                    }
                }
            }
            rec.tables.push(table);
        }
        ScenarioConfig::FamilyVsSingle {
            n,
            bases: names,
            ks,
        } => {
            let rows = family_vs_single_demo(*n, &bases(names)?, ks)?;
            let mut table = Table::new(
                "family_vs_single",
                &[
                    "base",
                    "k",
                    "region_size",
                    "single:exact",
                    "family:exact",
                    "per_tuple",
                ],
            );
            for r in &rows {
                let per: Vec<String> = r.per_tuple.iter().map(usize::to_string).collect();
                table.push(vec![
                    r.base.clone(),
                    r.k.to_string(),
                    r.region_size.to_string(),
                    format_ratio(&r.single),
                    format_ratio(&r.family),
                    per.join(" "),
                ]);
                rec.check(
                    format!("base {} K={}: single 1/K, family as expected", r.base, r.k),
                    r.holds,
                );
            }
            rec.tables.push(table);
        }
        ScenarioConfig::Xa1Entropy {
            n,
            bases: names,
            radii,
        } => {
            let rows = xa1_entropy_evidence(*n, &bases(names)?, radii)?;
            let mut table = Table::new(
                "xa1_entropy",
                &[
                    "radius",
                    "size",
                    "value_upper:upper",
                    "tuple_upper:upper",
                    "density:upper",
                    "lower:evidence",
                    "full_shift:upper",
                    "errors",
                ],
            );
            let show = |x: &Option<indlab_core::LogRatio>| {
                x.as_ref().map(|r| r.to_string()).unwrap_or_default()
            };
            for r in &rows {
                table.push(vec![
                    r.radius.to_string(),
                    r.size.to_string(),
                    show(&r.value_upper),
                    show(&r.tuple_upper),
                    format_ratio(&r.density),
                    r.lower.to_string(),
                    show(&r.full_shift),
                    r.errors.join("; "),
                ]);
                rec.check(
                    format!(
                        "radius {}: lower bound below the tuple-cover upper bound",
                        r.radius
                    ),
                    r.sandwich,
                );
                rec.check(
                    format!("radius {}: positive independence ratio", r.radius),
                    *r.density.numer() > 0,
                );
            }
            rec.tables.push(table);
            let sys = xa1_system(*n)?;
            rec.set("system", sys.engine_name());
            rec.set(
                "regions",
                radii
                    .iter()
                    .map(|r| FiniteSubset::len(&sys.group().ball(*r)))
                    .collect::<Vec<_>>(),
            );
        }
    }
    Ok(())
}
