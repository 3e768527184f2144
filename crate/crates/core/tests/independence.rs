mod common;

use common::{independent_from_profiles, max_independent_brute, Oracle};
use indlab_core::independence::{
    comb2_extract, family_ratio, growth_table, is_independence_set, max_independence_subset,
    simple_split, split_until_diam, verify_witness, Tri,
};
use indlab_core::scenarios::xa1_system;
use indlab_core::{
    Alphabet, CylinderSet, Family, FiniteSubset, GroupElement, GroupSpec, SetTuple, ShiftSystem,
};
use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Pairwise disjoint entries on a common domain: each pattern goes to one entry or none.
fn random_disjoint_tuple(rng: &mut ChaCha8Rng, m: u8, k: usize, domain: &FiniteSubset) -> SetTuple {
    let mut rows = vec![Vec::new(); k];
    let width = domain.len() as u32;
    for mut x in 0..(m as usize).pow(width) {
        let mut row = Vec::with_capacity(width as usize);
        for _ in 0..width {
            row.push((x % m as usize) as u8);
            x /= m as usize;
        }
        let slot = rng.gen_range(0..=k);
        if slot < k {
            rows[slot].push(row);
        }
    }
    SetTuple::new(
        rows.into_iter()
            .map(|r| CylinderSet::new(m, domain.clone(), r).unwrap())
            .collect(),
    )
    .unwrap()
}

fn random_subset(rng: &mut ChaCha8Rng, pool: &[GroupElement], max: usize) -> FiniteSubset {
    let n = rng.gen_range(1..=max.min(pool.len()));
    FiniteSubset::new(pool.choose_multiple(rng, n).cloned())
}

fn z(i: i32) -> GroupElement {
    GroupElement::from_vector([i])
}

#[test]
fn max_subset_matches_exhaustive_on_integers() {
    let sys = ShiftSystem::full(GroupSpec::free_abelian(1).unwrap(), Alphabet::Plain(2)).unwrap();
    let pool: Vec<GroupElement> = (-6..=6).map(z).collect();
    let domains = [
        FiniteSubset::new([z(0)]),
        FiniteSubset::new([z(0), z(1)]),
        FiniteSubset::new([z(0), z(2)]),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let k = rng.gen_range(2..=3);
        let dom = domains.choose(&mut rng).unwrap();
        let tuple = random_disjoint_tuple(&mut rng, 2, k, dom);
        let f = random_subset(&mut rng, &pool, 10);
        let profiles = Oracle::Full(2).profiles(&tuple, f.as_slice());
        let want = max_independent_brute(&profiles, k, f.len());
        let got = max_independence_subset(&f, &tuple, &sys).unwrap();
        assert!(got.complete && got.exact);
        assert_eq!(got.size, want, "tuple {tuple:?} on {f:?}");
        let pos: Vec<usize> = got.set.iter().map(|g| f.index_of(g).unwrap()).collect();
        assert!(independent_from_profiles(&profiles, k, &pos));
    }
}

#[test]
fn max_subset_matches_exhaustive_on_coset_system() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for (n, max_f, cases) in [(2u8, 7usize, 40), (3, 5, 20)] {
        let sys = xa1_system(n).unwrap();
        let g = sys.group().clone();
        let pool: Vec<GroupElement> = g.ball(2).iter().cloned().collect();
        let domains = [
            FiniteSubset::new([g.identity()]),
            FiniteSubset::new([g.identity(), g.parse("b").unwrap()]),
        ];
        for _ in 0..cases {
            let k = rng.gen_range(2..=3);
            let dom = domains.choose(&mut rng).unwrap();
            let tuple = random_disjoint_tuple(&mut rng, n, k, dom);
            let f = random_subset(&mut rng, &pool, max_f);
            let profiles = Oracle::ACosets(n).profiles(&tuple, f.as_slice());
            let want = max_independent_brute(&profiles, k, f.len());
            let got = max_independence_subset(&f, &tuple, &sys).unwrap();
            assert!(got.complete && got.exact);
            assert_eq!(got.size, want, "n={n} tuple {tuple:?} on {f:?}");
        }
    }
}

#[test]
fn heredity_and_translation_invariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let systems = [
        (
            ShiftSystem::full(GroupSpec::free(2).unwrap(), Alphabet::Plain(2)).unwrap(),
            Oracle::Full(2),
        ),
        (xa1_system(2).unwrap(), Oracle::ACosets(2)),
    ];
    for case in 0..1000 {
        let (sys, oracle) = &systems[case % 2];
        let g = sys.group().clone();
        let pool: Vec<GroupElement> = g.ball(2).iter().cloned().collect();
        let dom = if rng.gen_bool(0.5) {
            FiniteSubset::new([g.identity()])
        } else {
            FiniteSubset::new([g.identity(), g.parse("b").unwrap()])
        };
        let k = rng.gen_range(2..=3);
        let tuple = random_disjoint_tuple(&mut rng, 2, k, &dom);
        let j = random_subset(&mut rng, &pool, 5);
        let base = is_independence_set(&j, &tuple, sys).unwrap();
        assert_ne!(base.status, Tri::Unknown);
        let yes = base.status == Tri::Yes;
        let profiles = oracle.profiles(&tuple, j.as_slice());
        let all: Vec<usize> = (0..j.len()).collect();
        assert_eq!(yes, independent_from_profiles(&profiles, k, &all));
        if let Some(w) = &base.witness {
            assert!(verify_witness(w, &tuple, sys).unwrap());
        }

        let s = pool.choose(&mut rng).unwrap();
        // ⋂_{r ∈ Js} r^-1 A = s^-1 ⋂_{j ∈ J} j^-1 A
        let right = is_independence_set(&j.right_translate(s), &tuple, sys)
            .unwrap()
            .status;
        // (s j)^-1 (s A) = j^-1 A
        let left = is_independence_set(&j.left_translate(s), &tuple.translate(s), sys)
            .unwrap()
            .status;
        assert_eq!((right, left), (base.status, base.status), "case {case}");

        if yes && j.len() > 1 {
            let drop = rng.gen_range(0..j.len());
            let sub = FiniteSubset::new(
                j.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != drop)
                    .map(|(_, x)| x.clone()),
            );
            assert_eq!(
                is_independence_set(&sub, &tuple, sys).unwrap().status,
                Tri::Yes
            );
        }
    }
}

#[test]
fn growth_columns_match_coset_counts() {
    let sys = xa1_system(2).unwrap();
    let g = sys.group().clone();
    let pair = Family::new(vec![SetTuple::value_pair(2, &g.identity(), 0, 1).unwrap()]);
    let rows = growth_table(&pair, &[0, 1, 2, 3], &sys).unwrap();
    for row in rows {
        // J is independent iff the points j^-1 lie in distinct <a>-cosets
        let cosets: std::collections::BTreeSet<GroupElement> = g
            .ball(row.radius)
            .iter()
            .map(|j| Oracle::ACosets(2).key(&j.inverse()))
            .collect();
        assert_eq!(row.max_size, cosets.len(), "radius {}", row.radius);
        assert!(row.complete);
    }

    let full = ShiftSystem::full(g.clone(), Alphabet::Plain(2)).unwrap();
    let coord = Family::new(vec![SetTuple::coordinate(2, &g.identity()).unwrap()]);
    for row in growth_table(&coord, &[0, 1, 2], &full).unwrap() {
        assert_eq!(row.max_size, row.ball_size);
    }
}

#[test]
fn splitting_keeps_density() {
    let sys = ShiftSystem::full(GroupSpec::free_abelian(1).unwrap(), Alphabet::Plain(3)).unwrap();
    let f = FiniteSubset::new((0..6).map(z));
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for _ in 0..40 {
        let dom = FiniteSubset::new([z(0)]);
        let tuple = random_disjoint_tuple(&mut rng, 3, 2, &dom);
        let fam = Family::new(vec![tuple.clone()]);
        let before = max_independence_subset(&f, &tuple, &sys).unwrap();
        let entry = rng.gen_range(0..2);
        let rows: Vec<Vec<u8>> = tuple
            .entry(entry)
            .patterns()
            .rows()
            .map(|r| r.to_vec())
            .collect();
        if rows.is_empty() || before.size == 0 {
            continue;
        }
        let cut = rng.gen_range(0..=rows.len());
        let part = |r: &[Vec<u8>]| CylinderSet::new(3, dom.clone(), r.to_vec()).unwrap();
        let parts = (part(&rows[..cut]), part(&rows[cut..]));
        let split = simple_split(&fam, 0, entry, parts, &sys).unwrap();
        let after = family_ratio(&f, &split, &sys).unwrap();
        let extracted = comb2_extract(
            &tuple,
            (&split.tuples()[0], &split.tuples()[1]),
            &before.set,
            &sys,
        )
        .unwrap();
        // the extracted set lives inside f, so the ratio on f is at least |I| / |f|
        assert!(after.ratio >= Ratio::new(extracted.size as u64, f.len() as u64));
        assert!(after.ratio > Ratio::from_integer(0));
    }

    let f2 = ShiftSystem::full(GroupSpec::free(2).unwrap(), Alphabet::Plain(2)).unwrap();
    let g = f2.group().clone();
    let fam = Family::new(vec![SetTuple::coordinate(2, &g.identity()).unwrap()]);
    let split = split_until_diam(&fam, 2, &f2).unwrap();
    let ratio = family_ratio(&g.ball(1), &split.family, &f2).unwrap().ratio;
    assert!(ratio > Ratio::from_integer(0));
}
