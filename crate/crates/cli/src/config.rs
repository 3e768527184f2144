//! Run configuration as read from JSON, and its translation into core objects.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use indlab_core::cover::Region;
use indlab_core::report::parse_ratio;
use indlab_core::subshift::{Budget, ForbiddenPattern, Variant};
use indlab_core::{
    Alphabet, CylinderSet, Family, FiniteSubset, GroupElement, GroupRingElement, GroupSpec,
    SetTuple, ShiftSystem,
};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub system: SystemConfig,
    /// Tuples of the family; the coordinate tuple at the identity when empty.
    #[serde(default)]
    pub family: Vec<TupleConfig>,
    #[serde(default)]
    pub regions: Vec<RegionSpec>,
    #[serde(default)]
    pub tasks: Vec<TaskConfig>,
    #[serde(default)]
    pub budgets: BudgetConfig,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupConfig {
    Free(usize),
    FreeAbelian(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VariantConfig {
    Full,
    /// Kernel of convolution with the given group ring element over `Z/alphabet`.
    Linear(String),
    /// Forbidden patterns as lists of `[element, letter]` cells.
    Sft(Vec<Vec<(String, u8)>>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    pub group: GroupConfig,
    pub alphabet: u8,
    pub variant: VariantConfig,
    /// Radius of the local consistency check for non-exact systems.
    pub r_max: usize,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            group: GroupConfig::Free(2),
            alphabet: 2,
            variant: VariantConfig::Full,
            r_max: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum TupleConfig {
    /// `({x_at = 0}, .., {x_at = m-1})`.
    Coordinate {
        at: String,
    },
    ValuePair {
        at: String,
        values: (u8, u8),
    },
    Entries(Vec<EntryConfig>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryConfig {
    pub domain: Vec<String>,
    pub patterns: Vec<Vec<u8>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegionSpec {
    Balls(Vec<usize>),
    /// `[0, n_1) x .. x [0, n_d)` in `Z^d`.
    Boxes(Vec<Vec<u32>>),
    Explicit {
        id: String,
        elements: Vec<String>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetConfig {
    #[serde(default = "d_patterns")]
    pub max_patterns: usize,
    #[serde(default = "d_items")]
    pub max_items: usize,
    #[serde(default = "d_nodes")]
    pub max_search_nodes: u64,
    #[serde(default = "d_region")]
    pub max_region: usize,
    #[serde(default = "d_timeout")]
    pub timeout_secs: u64,
}

fn d_patterns() -> usize {
    Budget::default().max_patterns
}
fn d_items() -> usize {
    Budget::default().max_items
}
fn d_nodes() -> u64 {
    Budget::default().max_search_nodes
}
fn d_region() -> usize {
    200
}
fn d_timeout() -> u64 {
    600
}

impl Default for BudgetConfig {
    fn default() -> Self {
        BudgetConfig {
            max_patterns: d_patterns(),
            max_items: d_items(),
            max_search_nodes: d_nodes(),
            max_region: d_region(),
            timeout_secs: d_timeout(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoverChoice {
    ValuePartition,
    /// The cover built from the family's tuples.
    Family,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "task", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TaskConfig {
    Entropy {
        cover: CoverChoice,
        /// Asserted value of the minimum ratio as a multiple of `ln(base)`, e.g. `[2, "1"]`.
        #[serde(default)]
        expect_min_ratio: Option<(u64, String)>,
    },
    Density {
        #[serde(default)]
        expect_infimum: Option<String>,
    },
    LemmaLab(LabConfig),
    Scenario(ScenarioConfig),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "lab", rename_all = "kebab-case", deny_unknown_fields)]
pub enum LabConfig {
    Km {
        k: u8,
        n: usize,
        t: usize,
        #[serde(default)]
        binomial: bool,
        /// Random trace sets instead of all of them.
        #[serde(default)]
        trials: Option<u64>,
    },
    Comb1 {
        k: u8,
        b: String,
        sizes: Vec<usize>,
        #[serde(default = "d_trials")]
        trials: u64,
    },
    /// `N_S` and shattering size on random trace sets.
    Ns {
        k: u8,
        n: usize,
        #[serde(default = "d_trials")]
        trials: u64,
    },
    /// Doubling steps on the configured family and system.
    Double {
        k_radius: usize,
        f_radius: usize,
        q: String,
        #[serde(default = "one")]
        iterations: usize,
    },
    /// One step of the chaos tower on the configured family.
    Chaos { k1_radius: usize, k2_radius: usize },
}

fn d_trials() -> u64 {
    200
}
fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ScenarioConfig {
    NoOrbitIe {
        #[serde(default = "d_moduli")]
        moduli: Vec<u8>,
        #[serde(default = "d_bases")]
        bases: Vec<String>,
        #[serde(default = "d_kmax")]
        k_max: usize,
    },
    FamilyVsSingle {
        #[serde(default = "d_two")]
        n: u8,
        #[serde(default = "d_bases")]
        bases: Vec<String>,
        #[serde(default = "d_ks")]
        ks: Vec<usize>,
    },
    Xa1Entropy {
        #[serde(default = "d_two")]
        n: u8,
        #[serde(default = "d_bases")]
        bases: Vec<String>,
        #[serde(default = "d_radii")]
        radii: Vec<usize>,
    },
}

fn d_moduli() -> Vec<u8> {
    vec![2, 3]
}
fn d_bases() -> Vec<String> {
    vec!["e".into(), "b".into()]
}
fn d_kmax() -> usize {
    8
}
fn d_two() -> u8 {
    2
}
fn d_ks() -> Vec<usize> {
    vec![1, 2, 3, 4, 5]
}
fn d_radii() -> Vec<usize> {
    vec![0, 1, 2]
}

impl ScenarioConfig {
    pub fn names() -> &'static [(&'static str, &'static str)] {
        &[
            (
                "no-orbit-ie",
                "value pairs along a-cosets of X_{a-1}: the largest independence set is 1",
            ),
            (
                "family-vs-single",
                "single tuples reach ratio 1/K on {s a^k} while the family keeps ratio 1",
            ),
            (
                "xa1-entropy",
                "entropy upper estimates and independence lower bounds on X_{a-1} over balls",
            ),
        ]
    }

    pub fn default_for(name: &str) -> Option<Self> {
        let cfg = match name {
            "no-orbit-ie" => ScenarioConfig::NoOrbitIe {
                moduli: d_moduli(),
                bases: d_bases(),
                k_max: d_kmax(),
            },
            "family-vs-single" => ScenarioConfig::FamilyVsSingle {
                n: 2,
                bases: d_bases(),
                ks: d_ks(),
            },
            "xa1-entropy" => ScenarioConfig::Xa1Entropy {
                n: 2,
                bases: d_bases(),
                radii: d_radii(),
            },
            _ => return None,
        };
        Some(cfg)
    }
}

/// Parses a configuration, reporting the failing line and column.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("line {} column {}: {e}", e.line(), e.column())))
}

fn cfg_err(field: &str, e: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {e}"))
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let b = &self.budgets;
        if b.max_patterns == 0
            || b.max_items == 0
            || b.max_search_nodes == 0
            || b.max_region == 0
            || b.timeout_secs == 0
        {
            return Err(CliError::Config(
                "budgets: every budget must be positive".into(),
            ));
        }
        let sys = self.build_system()?;
        self.build_family(&sys)?;
        self.build_regions(&sys)?;
        Ok(())
    }

    pub fn group(&self) -> Result<GroupSpec, CliError> {
        match self.system.group {
            GroupConfig::Free(r) => GroupSpec::free(r),
            GroupConfig::FreeAbelian(d) => GroupSpec::free_abelian(d),
        }
        .map_err(|e| cfg_err("system.group", e))
    }

    pub fn budget(&self) -> Budget {
        Budget {
            max_patterns: self.budgets.max_patterns,
            max_items: self.budgets.max_items,
            max_search_nodes: self.budgets.max_search_nodes,
        }
    }

    pub fn build_system(&self) -> Result<ShiftSystem, CliError> {
        let group = self.group()?;
        let m = self.system.alphabet;
        let (alphabet, variant) = match &self.system.variant {
            VariantConfig::Full => (Alphabet::Plain(m), Variant::Full),
            VariantConfig::Linear(f) => {
                let f = GroupRingElement::parse(&group, f)
                    .map_err(|e| cfg_err("system.variant.linear", e))?;
                (Alphabet::Modular(m), Variant::Linear(f))
            }
            VariantConfig::Sft(patterns) => {
                let forbidden = patterns
                    .iter()
                    .map(|cells| {
                        let cells = cells
                            .iter()
                            .map(|(w, v)| Ok((group.parse(w)?, *v)))
                            .collect::<indlab_core::Result<Vec<_>>>()?;
                        ForbiddenPattern::new(cells)
                    })
                    .collect::<indlab_core::Result<Vec<_>>>()
                    .map_err(|e| cfg_err("system.variant.sft", e))?;
                (Alphabet::Plain(m), Variant::PatternSft(forbidden))
            }
        };
        ShiftSystem::new(group, alphabet, variant, self.system.r_max)
            .map(|s| s.with_budget(self.budget()))
            .map_err(|e| cfg_err("system", e))
    }

    pub fn build_family(&self, sys: &ShiftSystem) -> Result<Family, CliError> {
        let g = sys.group();
        let m = sys.alphabet_size();
        if self.family.is_empty() {
            return SetTuple::coordinate(m, &g.identity())
                .map(|t| Family::new(vec![t]))
                .map_err(|e| cfg_err("family", e));
        }
        let tuples = self
            .family
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let field = format!("family[{i}]");
                let built = match t {
                    TupleConfig::Coordinate { at } => {
                        g.parse(at).and_then(|s| SetTuple::coordinate(m, &s))
                    }
                    TupleConfig::ValuePair { at, values } => g
                        .parse(at)
                        .and_then(|s| SetTuple::value_pair(m, &s, values.0, values.1)),
                    TupleConfig::Entries(entries) => entries
                        .iter()
                        .map(|e| {
                            let domain = e
                                .domain
                                .iter()
                                .map(|w| g.parse(w))
                                .collect::<indlab_core::Result<Vec<_>>>()?;
                            if domain.len() != FiniteSubset::new(domain.iter().cloned()).len() {
                                return Err(indlab_core::Error::Invalid(
                                    "repeated domain element".into(),
                                ));
                            }
                            // rows are given in the listed domain order; store them in canonical order
                            let canon = FiniteSubset::new(domain.iter().cloned());
                            let perm: Vec<usize> = canon
                                .iter()
                                .map(|c| domain.iter().position(|d| d == c).unwrap())
                                .collect();
                            let rows = e
                                .patterns
                                .iter()
                                .map(|r| {
                                    if r.len() != domain.len() {
                                        return Err(indlab_core::Error::Invalid(format!(
                                            "pattern of length {} on a domain of {}",
                                            r.len(),
                                            domain.len()
                                        )));
                                    }
                                    Ok(perm.iter().map(|&p| r[p]).collect())
                                })
                                .collect::<indlab_core::Result<Vec<Vec<u8>>>>()?;
                            CylinderSet::new(m, canon, rows)
                        })
                        .collect::<indlab_core::Result<Vec<_>>>()
                        .and_then(SetTuple::new),
                };
                built.map_err(|e| cfg_err(&field, e))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Family::new(tuples))
    }

    pub fn build_regions(&self, sys: &ShiftSystem) -> Result<Vec<Region>, CliError> {
        let g = sys.group();
        let mut out = Vec::new();
        for (i, spec) in self.regions.iter().enumerate() {
            let field = format!("regions[{i}]");
            match spec {
                RegionSpec::Balls(radii) => {
                    out.extend(
                        radii
                            .iter()
                            .map(|&r| Region::new(format!("ball({r})"), g.ball(r))),
                    );
                }
                RegionSpec::Boxes(boxes) => {
                    if g.is_free() {
                        return Err(cfg_err(&field, "boxes need a free abelian group"));
                    }
                    for sides in boxes {
                        if sides.len() != g.rank() {
                            return Err(cfg_err(
                                &field,
                                format!("box {sides:?} has the wrong dimension"),
                            ));
                        }
                        let mut pts: Vec<Vec<i32>> = vec![Vec::new()];
                        for &n in sides {
                            pts = pts
                                .into_iter()
                                .flat_map(|p| {
                                    (0..n as i32).map(move |x| {
                                        let mut q = p.clone();
                                        q.push(x);
                                        q
                                    })
                                })
                                .collect();
                        }
                        let id = format!(
                            "box({})",
                            sides
                                .iter()
                                .map(u32::to_string)
                                .collect::<Vec<_>>()
                                .join("x")
                        );
                        out.push(Region::new(
                            id,
                            FiniteSubset::new(pts.into_iter().map(GroupElement::from_vector)),
                        ));
                    }
                }
                RegionSpec::Explicit { id, elements } => {
                    let set = elements
                        .iter()
                        .map(|w| g.parse(w))
                        .collect::<indlab_core::Result<Vec<_>>>();
                    out.push(Region::new(
                        id.clone(),
                        FiniteSubset::new(set.map_err(|e| cfg_err(&field, e))?),
                    ));
                }
            }
        }
        if out.iter().any(|r| r.set.is_empty()) {
            return Err(CliError::Config("regions: empty region".into()));
        }
        Ok(out)
    }
}

pub fn parse_q(field: &str, s: &str) -> Result<Ratio<u64>, CliError> {
    parse_ratio(s).ok_or_else(|| cfg_err(field, format!("{s:?} is not a ratio p/q")))
}
