//! Diameters of cylinders for the metric `ρ(x, y) = 2^{-min{|t| : x_t ≠ y_t}}`.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

use super::cylinder::CylinderSet;
use super::system::ShiftSystem;
use crate::error::Result;
use crate::group::GroupElement;

/// `0` or `2^{-m}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dyadic {
    Zero,
    /// `2^{-m}`
    Pow(u32),
}

impl Dyadic {
    pub fn to_f64(self) -> f64 {
        match self {
            Dyadic::Zero => 0.0,
            Dyadic::Pow(m) => 0.5f64.powi(m as i32),
        }
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Dyadic::Zero, Dyadic::Zero) => Ordering::Equal,
            (Dyadic::Zero, _) => Ordering::Less,
            (_, Dyadic::Zero) => Ordering::Greater,
            (Dyadic::Pow(a), Dyadic::Pow(b)) => b.cmp(a),
        }
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dyadic::Zero => f.write_str("0"),
            Dyadic::Pow(0) => f.write_str("1"),
            Dyadic::Pow(m) => write!(f, "2^-{m}"),
        }
    }
}

/// A diameter value; `exact` is false when it is only an upper bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Diameter {
    pub value: Dyadic,
    pub exact: bool,
}

/// Values that points of `C ∩ X` take at `t`, and whether the list is certain.
pub fn values_in_system(
    c: &CylinderSet,
    t: &GroupElement,
    sys: &ShiftSystem,
) -> Result<(Vec<u8>, bool)> {
    let mut out = Vec::new();
    let mut exact = true;
    for v in 0..c.alphabet() {
        let verdict = sys.realizable(&c.pin(t, v)?)?;
        if !verdict.is_empty() {
            out.push(v);
        }
        exact &= verdict.is_certain();
    }
    Ok((out, exact))
}

fn sphere_size(sys: &ShiftSystem, len: usize) -> usize {
    let g = sys.group();
    if g.is_free() {
        if len == 0 {
            1
        } else {
            let k = 2 * g.rank();
            k * (k - 1).pow(len as u32 - 1)
        }
    } else {
        g.sphere(len).len()
    }
}

/// Diameter of `C ∩ X`. An empty intersection has diameter zero.
pub fn cylinder_diameter(c: &CylinderSet, sys: &ShiftSystem) -> Result<Diameter> {
    if sys.alphabet_size() <= 1 {
        return Ok(Diameter {
            value: Dyadic::Zero,
            exact: true,
        });
    }
    if sys.is_full() {
        if c.is_trivially_empty() {
            return Ok(Diameter {
                value: Dyadic::Zero,
                exact: true,
            });
        }
        let mut best: Option<usize> = None;
        for (i, t) in c.domain().iter().enumerate() {
            let first = c.patterns().row(0)[i];
            if c.patterns().rows().any(|r| r[i] != first) {
                best = Some(best.map_or(t.length(), |b| b.min(t.length())));
            }
        }
        // The shortest coordinate outside the domain is free.
        let mut per_length = vec![0usize; c.domain().max_length() + 2];
        for t in c.domain() {
            per_length[t.length()] += 1;
        }
        let free = (0..per_length.len())
            .find(|&l| per_length[l] < sphere_size(sys, l))
            .unwrap();
        let m = best.map_or(free, |b| b.min(free));
        return Ok(Diameter {
            value: Dyadic::Pow(m as u32),
            exact: true,
        });
    }

    let (pruned, mut exact) = sys.prune(c)?;
    if pruned.is_trivially_empty() {
        return Ok(Diameter {
            value: Dyadic::Zero,
            exact,
        });
    }
    let limit = c.domain().max_length() + 2 + sys.r_max();
    for len in 0..=limit {
        for t in sys.group().sphere(len) {
            let distinct = if pruned.domain().contains(&t) {
                pruned.values_at(&t).len()
            } else {
                let (vals, sure) = values_in_system(&pruned, &t, sys)?;
                exact &= sure;
                vals.len()
            };
            if distinct >= 2 {
                return Ok(Diameter {
                    value: Dyadic::Pow(len as u32),
                    exact,
                });
            }
        }
    }
    Ok(Diameter {
        value: Dyadic::Pow(limit as u32 + 1),
        exact: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupSpec;
    use crate::ring::GroupRingElement;
    use crate::subshift::Alphabet;

    #[test]
    fn full_shift_over_z() {
        let g = GroupSpec::free_abelian(1).unwrap();
        let sys = ShiftSystem::full(g.clone(), Alphabet::Plain(2)).unwrap();
        let c = CylinderSet::pinned(2, &[(g.identity(), 0)]).unwrap();
        assert_eq!(cylinder_diameter(&c, &sys).unwrap().value, Dyadic::Pow(1));
        let ball = g.ball(2);
        let c = CylinderSet::new(2, ball.clone(), vec![vec![0; ball.len()]]).unwrap();
        assert_eq!(cylinder_diameter(&c, &sys).unwrap().value, Dyadic::Pow(3));
        assert_eq!(
            cylinder_diameter(&sys.whole(), &sys).unwrap().value,
            Dyadic::Pow(0)
        );
    }

    #[test]
    fn one_letter_alphabet() {
        let g = GroupSpec::free(2).unwrap();
        let sys = ShiftSystem::full(g, Alphabet::Plain(1)).unwrap();
        assert_eq!(
            cylinder_diameter(&sys.whole(), &sys).unwrap().value,
            Dyadic::Zero
        );
    }

    #[test]
    fn coset_forcing_shrinks_diameter() {
        let g = GroupSpec::free(2).unwrap();
        let f = GroupRingElement::parse(&g, "a - e").unwrap();
        let sys = ShiftSystem::linear(g.clone(), 2, f).unwrap();
        // pinning e fixes a and a^-1 too, but b is free
        let c = CylinderSet::pinned(2, &[(g.identity(), 0)]).unwrap();
        let d = cylinder_diameter(&c, &sys).unwrap();
        assert_eq!(
            d,
            Diameter {
                value: Dyadic::Pow(1),
                exact: true
            }
        );
        let c = CylinderSet::pinned(
            2,
            &[
                (g.identity(), 0),
                (g.parse("b").unwrap(), 1),
                (g.parse("b^-1").unwrap(), 1),
            ],
        )
        .unwrap();
        assert_eq!(cylinder_diameter(&c, &sys).unwrap().value, Dyadic::Pow(2));
    }

    #[test]
    fn dyadic_order() {
        assert!(Dyadic::Zero < Dyadic::Pow(5));
        assert!(Dyadic::Pow(5) < Dyadic::Pow(1));
        assert_eq!(Dyadic::Pow(3).to_f64(), 0.125);
    }
}
