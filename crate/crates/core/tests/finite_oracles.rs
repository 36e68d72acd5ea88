use proptest::prelude::*;

use spectral_pairs::exact::to_f64;
use spectral_pairs::finite::{
    certify_finite_pair, decompose_complementing, enumerate_spectra, find_complement, spectrum_from_chain,
};
use spectral_pairs::{delta_hat, IntegerSet};

/// Spectra containing 0 found by a float clique search over `j/q ∈ [0, 1)`.
fn float_spectra(a: &IntegerSet, bound: u64) -> Vec<Vec<f64>> {
    let mut vals: Vec<f64> = vec![0.0];
    for q in 2..=bound as i64 {
        for j in 1..q {
            if num_integer::gcd(j, q) == 1 {
                vals.push(j as f64 / q as f64);
            }
        }
    }
    let zero = |x: f64| delta_hat(a, x).norm() < 1e-8;
    let mut cand: Vec<f64> = vals.into_iter().filter(|&v| v == 0.0 || zero(v)).collect();
    cand.sort_by(f64::total_cmp);
    let mut out = Vec::new();
    let mut clique = vec![0.0];
    fn grow(c: &mut Vec<f64>, cand: &[f64], k: usize, zero: &dyn Fn(f64) -> bool, out: &mut Vec<Vec<f64>>) {
        if c.len() == k {
            out.push(c.clone());
            return;
        }
        for &v in cand {
            if v > *c.last().unwrap() && c.iter().all(|&u| zero(v - u)) {
                c.push(v);
                grow(c, cand, k, zero, out);
                c.pop();
            }
        }
    }
    grow(&mut clique, &cand, a.len(), &zero, &mut out);
    out
}

fn digit_set(max: i64, size: usize) -> impl Strategy<Value = IntegerSet> {
    prop::collection::btree_set(1..=max, 0..size).prop_map(|s| std::iter::once(0).chain(s).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn enumeration_matches_float_cliques(a in digit_set(12, 6)) {
        let found = enumerate_spectra(&a, None).unwrap();
        let mut ours: Vec<Vec<f64>> = found
            .spectra
            .iter()
            .map(|(s, _)| s.points().iter().map(to_f64).collect())
            .collect();
        ours.sort_by(|x, y| x.partial_cmp(y).unwrap());
        let mut theirs = float_spectra(&a, found.denominator_bound);
        theirs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        prop_assert_eq!(ours.len(), theirs.len(), "{}", a);
        for (x, y) in ours.iter().zip(&theirs) {
            for (p, q) in x.iter().zip(y) {
                prop_assert!((p - q).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn chains_give_certified_spectra(a in digit_set(20, 5)) {
        if let Some(chain) = decompose_complementing(&a).unwrap() {
            prop_assert_eq!(chain.replay(), a.clone());
            let (spec, _) = spectrum_from_chain(&chain).unwrap();
            prop_assert!(certify_finite_pair(&a, &spec).is_ok());
        }
    }

    #[test]
    fn complements_tile(a in digit_set(9, 4), k in 1i64..5) {
        let n = a.len() as i64 * k;
        if let Some(cert) = find_complement(&a, n).unwrap() {
            let mut hits = vec![0; n as usize];
            for x in a.iter() {
                for y in cert.complement.iter() {
                    hits[(x + y).rem_euclid(n) as usize] += 1;
                }
            }
            prop_assert!(hits.iter().all(|&h| h == 1));
        }
    }
}

#[test]
fn decomposable_sets_tile_and_are_spectral() {
    for a in [vec![0, 1, 8, 9], vec![0, 2], vec![0, 1, 2, 6, 7, 8], vec![0, 3, 6, 9]] {
        let a = IntegerSet::from(a.as_slice());
        let chain = decompose_complementing(&a).unwrap().unwrap();
        let (spec, cert) = spectrum_from_chain(&chain).unwrap();
        assert_eq!(spec.len(), a.len());
        assert!(cert.max_offdiag_gram < 1e-12);
        assert!(!enumerate_spectra(&a, None).unwrap().spectra.is_empty());
    }
}
