use indlab_core::comb::{
    comb1_sweep, full_shatter_max, km_bound_check, ns_cover_number, shatters, KmMode,
    ThresholdForm, TraceSet, WCoverTable,
};
use itertools::Itertools;
use num_rational::Ratio;
use proptest::prelude::*;

/// Cells of `{0..k}^n`, listed in increasing base-`(k+1)` order with coordinate 0 least
/// significant.
fn cells(k: u8, n: usize) -> Vec<Vec<u8>> {
    (0..(k as usize + 1).pow(n as u32))
        .map(|mut c| {
            (0..n)
                .map(|_| {
                    let v = (c % (k as usize + 1)) as u8;
                    c /= k as usize + 1;
                    v
                })
                .collect()
        })
        .collect()
}

/// Minimal number of items (maps avoiding a fixed `i ∈ [k]^n` everywhere) covering
/// `s`, by trying all item subsets of growing size.
fn ns_oracle(k: u8, n: usize, s: &[Vec<u8>]) -> usize {
    let items: Vec<Vec<u8>> = (0..n).map(|_| 1..=k).multi_cartesian_product().collect();
    let covered = |i: &Vec<u8>, m: &Vec<u8>| m.iter().zip(i).all(|(a, b)| a != b);
    for size in 1..=items.len() {
        for pick in items.iter().combinations(size) {
            if s.iter().all(|m| pick.iter().any(|i| covered(i, m))) {
                return size;
            }
        }
    }
    unreachable!("the items cover every map");
}

/// Largest shattered coordinate set, by trying every subset.
fn shatter_oracle(k: u8, n: usize, s: &[Vec<u8>]) -> usize {
    (0..n)
        .powerset()
        .filter(|j| {
            let need: Vec<Vec<u8>> = j.iter().map(|_| 1..=k).multi_cartesian_product().collect();
            need.iter()
                .all(|w| s.iter().any(|m| j.iter().zip(w).all(|(&z, &v)| m[z] == v)))
        })
        .map(|j| j.len())
        .max()
        .unwrap_or(0)
}

#[test]
fn ns_matches_oracle_exhaustively_for_small_shapes() {
    for (k, n) in [(2u8, 1usize), (2, 2), (3, 1)] {
        let all = cells(k, n);
        let table = WCoverTable::new(k, n).unwrap();
        let mut buf = Vec::new();
        for mask in 1u128..1 << all.len() {
            let s: Vec<Vec<u8>> = (0..all.len())
                .filter(|c| mask >> c & 1 == 1)
                .map(|c| all[c].clone())
                .collect();
            let want = ns_oracle(k, n, &s);
            assert_eq!(
                table.ns_of_mask(mask, &mut buf).unwrap(),
                want,
                "k={k} n={n} {s:?}"
            );
            let ts = TraceSet::from_maps(k, n, s.iter().map(Vec::as_slice)).unwrap();
            assert_eq!(ts.len(), s.len());
            assert_eq!(ns_cover_number(&ts, 1 << 16, u64::MAX).unwrap().count, want);
        }
    }
}

#[test]
fn km_thresholds_on_binary_cubes() {
    for n in 2..=3 {
        for t in 1..=n {
            let r = km_bound_check(2, n, t, ThresholdForm::KarpovskyMilman, KmMode::Exhaustive)
                .unwrap();
            assert!(r.holds() && r.extremal_unshattered, "{r:?}");
            assert_eq!(r.extremal_size as u128, r.threshold);
        }
    }
}

#[test]
fn comb1_rows_positive() {
    for row in comb1_sweep(2, Ratio::new(3, 2), &[1, 2, 3, 6], 7, 200).unwrap() {
        assert!(row.positive || row.vacuous, "{row:?}");
    }
}

fn trace_strategy() -> impl Strategy<Value = (u8, usize, Vec<Vec<u8>>)> {
    (2u8..=3, 1usize..=4).prop_flat_map(|(k, n)| {
        let map = proptest::collection::vec(0..=k, n);
        (Just(k), Just(n), proptest::collection::vec(map, 1..40))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn shatter_matches_oracle((k, n, maps) in trace_strategy()) {
        let ts = TraceSet::from_maps(k, n, maps.iter().map(Vec::as_slice)).unwrap();
        let got = full_shatter_max(&ts);
        prop_assert_eq!(got.size, shatter_oracle(k, n, &maps));
        let distinct: Vec<Vec<u8>> = ts.maps().collect();
        prop_assert!(shatters(&distinct, k, &got.set));
    }

    #[test]
    fn shatter_monotone_and_permutation_invariant((k, n, maps) in trace_strategy(), cut in 1usize..40, rot in 0usize..4) {
        let ts = TraceSet::from_maps(k, n, maps.iter().map(Vec::as_slice)).unwrap();
        let sub = TraceSet::from_maps(k, n, maps[..cut.min(maps.len())].iter().map(Vec::as_slice)).unwrap();
        prop_assert!(full_shatter_max(&sub).size <= full_shatter_max(&ts).size);
        let rotated: Vec<Vec<u8>> = maps.iter().map(|m| {
            let mut m = m.clone();
            m.rotate_left(rot % n);
            m
        }).collect();
        let rt = TraceSet::from_maps(k, n, rotated.iter().map(Vec::as_slice)).unwrap();
        prop_assert_eq!(full_shatter_max(&rt).size, full_shatter_max(&ts).size);
        if n <= 3 {
            let ns = ns_cover_number(&ts, 1 << 16, u64::MAX).unwrap().count;
            prop_assert_eq!(ns_cover_number(&rt, 1 << 16, u64::MAX).unwrap().count, ns);
            prop_assert!(ns_cover_number(&sub, 1 << 16, u64::MAX).unwrap().count <= ns);
            prop_assert_eq!(ns, ns_oracle(k, n, &ts.maps().collect::<Vec<_>>()));
        }
    }
}
