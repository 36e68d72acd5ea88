//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criterion 6 asks for five spectra that are pairwise distinct inside the
//! enumeration radius 64. Members 2..5 differ first at 86, 342, 1366 and
//! 5462, so inside radius 64 they coincide and the criterion cannot hold.
//! It is run as stated and listed in `KNOWN_RED`; the process fails only on
//! unexpected results.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_traits::Zero;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectral_pairs::exact::{int, rat, to_f64};
use spectral_pairs::finite::{
    certify_finite_pair, decompose_complementing, enumerate_spectra, find_complement, spectrum_from_chain,
    RationalSpectrum,
};
use spectral_pairs::ifs::{
    affine_transform_pair, cycle_spectrum, factor_convolution, infinite_spectra_family, AffineIfs, AffineMap,
    MeasureDescriptor, SpectrumDescriptor,
};
use spectral_pairs::interval::QuasiLattice;
use spectral_pairs::multidim::{
    check_translation_tiling, lattice_tiling_search, product_parseval_scan, product_spectrum, rearranged_cube,
    BoxUnionRegion, PeriodicSet,
};
use spectral_pairs::validation::{
    deficiency_witness, greedy_orthogonal_family, parseval_scan, sample_grid, ParsevalReport, DEFAULT_SEED,
};
use spectral_pairs::{delta_hat, IntegerSet, Rational};

const KNOWN_RED: &[u32] = &[6];

type Outcome = Result<(bool, String), String>;

struct Scans(Vec<f64>);

impl Scans {
    fn record(&mut self, r: &ParsevalReport) {
        self.0.push(r.max_sum);
    }
}

fn set(v: &[i64]) -> IntegerSet {
    IntegerSet::from(v)
}

fn e<T: std::fmt::Debug>(x: T) -> String {
    format!("{x:?}")
}

fn criterion_1(scans: &mut Scans) -> Outcome {
    let start = Instant::now();
    let mu = AffineIfs::new(4, set(&[0, 1, 8, 9])).map_err(e)?;
    let f = factor_convolution(&mu, 2, 2).map_err(e)?.ok_or("no factorization")?;
    let lebesgue = f.base.digits() == &set(&[0, 1, 2, 3]) && f.base.scale() == 4;
    let atoms_ok = f.atoms == set(&[0, 2]);
    let spectrum = QuasiLattice::new(vec![int(0), rat(1, 4)], int(1)).map_err(e)?;
    let xs = sample_grid(1, 25, DEFAULT_SEED, Some(&spectrum));
    let r = parseval_scan(&mu, &spectrum, &xs, 500.0, 0.01).map_err(e)?;
    scans.record(&r);
    let t = start.elapsed();
    Ok((
        lebesgue && atoms_ok && r.min_sum >= 0.99 && t < Duration::from_secs(10),
        format!("F={} base=(4,{}) min_sum={:.6} time={t:.2?}", f.atoms, f.base.digits(), r.min_sum),
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let a = set(&[0, 1, 8, 9]);
    let chain = decompose_complementing(&a).map_err(e)?.ok_or("no chain")?;
    let (spec, _) = spectrum_from_chain(&chain).map_err(e)?;
    let expected: Vec<Rational> = [0, 1, 8, 9].iter().map(|&k| rat(k, 16)).collect();
    let exact = certify_finite_pair(&a, &spec).is_ok();
    // Independent check: every off-diagonal Gram entry is a vanishing sum of
    // roots of unity, verified through the exact rational phases.
    let mut gram_ok = true;
    for l in spec.points() {
        for m in spec.points() {
            if l != m {
                gram_ok &= spectral_pairs::vanishing_sum(&a, &(l - m));
            }
        }
    }
    let t = start.elapsed();
    Ok((
        spec.points() == expected.as_slice() && exact && gram_ok && t < Duration::from_secs(1),
        format!("spectrum={spec} time={t:.2?}"),
    ))
}

/// Float clique search over `j/q`, `q ≤ bound`, with `|δ̂_A| < 1e-8` edges.
fn float_clique_oracle(a: &IntegerSet, bound: u64) -> Vec<Vec<f64>> {
    let mut nodes: Vec<(i64, i64)> = Vec::new();
    for q in 1..=bound as i64 {
        for j in 0..q {
            if num_integer::gcd(j, q) == 1 || (j == 0 && q == 1) {
                nodes.push((j, q));
            }
        }
    }
    let val: Vec<f64> = nodes.iter().map(|&(j, q)| j as f64 / q as f64).collect();
    let adjacent = |x: f64, y: f64| delta_hat(a, x - y).norm() < 1e-8;
    let zero = val.iter().position(|&v| v == 0.0).unwrap();
    let mut out = Vec::new();
    fn grow(
        clique: &mut Vec<usize>,
        k: usize,
        val: &[f64],
        adjacent: &dyn Fn(f64, f64) -> bool,
        out: &mut Vec<Vec<f64>>,
    ) {
        if clique.len() == k {
            let mut v: Vec<f64> = clique.iter().map(|&i| val[i]).collect();
            v.sort_by(f64::total_cmp);
            out.push(v);
            return;
        }
        for i in 0..val.len() {
            if val[i] > val[*clique.last().unwrap()] && clique.iter().all(|&c| adjacent(val[c], val[i])) {
                clique.push(i);
                grow(clique, k, val, adjacent, out);
                clique.pop();
            }
        }
    }
    grow(&mut vec![zero], a.len(), &val, &adjacent, &mut out);
    out.sort_by(|x, y| x.partial_cmp(y).unwrap());
    out
}

fn criterion_3() -> Outcome {
    let a = set(&[0, 2, 4]);
    let found = enumerate_spectra(&a, None).map_err(e)?;
    let spectra: Vec<&RationalSpectrum> = found.spectra.iter().map(|(s, _)| s).collect();
    let has = |v: &[Rational]| spectra.iter().any(|s| s.points() == v);
    let expected = has(&[int(0), rat(1, 3), rat(2, 3)]) && has(&[int(0), rat(1, 6), rat(1, 3)]);
    let mut ours: Vec<Vec<f64>> = spectra.iter().map(|s| s.points().iter().map(to_f64).collect()).collect();
    ours.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let oracle = float_clique_oracle(&a, found.denominator_bound);
    let agree = ours.len() == oracle.len()
        && ours.iter().zip(&oracle).all(|(x, y)| x.iter().zip(y).all(|(p, q)| (p - q).abs() < 1e-8));
    let with_zero = spectra.iter().all(|s| s.points().first() == Some(&int(0)));
    Ok((
        spectra.len() == 4 && expected && agree && with_zero,
        format!("{} spectra, oracle {} cliques", spectra.len(), oracle.len()),
    ))
}

fn criterion_4() -> Outcome {
    let mu = AffineIfs::new(4, set(&[0, 1, 4, 5])).map_err(e)?;
    let fam = greedy_orthogonal_family(&mu, 256.0, 64).map_err(e)?;
    let exact_pairs = fam
        .frequencies
        .iter()
        .all(|a| fam.frequencies.iter().all(|b| a == b || mu.is_exact_zero(&(a - b))));
    let w = deficiency_witness(&mu, Some((&set(&[0, 1]), &set(&[0, 4]))), 0.3, 256.0, 0.01).map_err(e)?;
    let control = AffineIfs::new(4, set(&[0, 2])).map_err(e)?;
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let mut shrinks = true;
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let x = rng.random::<f64>();
        let g1 = deficiency_witness(&control, None, x, 64.0, 0.01).map_err(e)?.gap;
        let g2 = deficiency_witness(&control, None, x, 256.0, 0.01).map_err(e)?.gap;
        shrinks &= g2 < g1;
        worst = worst.max(g2);
    }
    Ok((
        fam.frequencies.len() >= 20 && fam.numeric.is_empty() && exact_pairs && w.valid() && shrinks,
        format!(
            "family={} gap(x=0.3,R=256)={:.4} control max gap at R=256 {:.2e}",
            fam.frequencies.len(),
            w.gap,
            worst
        ),
    ))
}

fn criterion_5(scans: &mut Scans) -> Outcome {
    let mu = AffineIfs::new(4, set(&[0, 2])).map_err(e)?;
    let spec = cycle_spectrum(&mu, &set(&[0, 1])).map_err(e)?;
    let first = spec.first_elements(8);
    let want: Vec<Rational> = [0, 1, 4, 5, 16, 17, 20, 21].iter().map(|&k| int(k)).collect();
    let pts = spec.elements_within(256.0);
    let mut worst: f64 = 0.0;
    for a in &pts {
        for b in &pts {
            if a != b {
                worst = worst.max(mu.invariant_ft(to_f64(&(a - b)), 1e-14).map_err(e)?.norm());
            }
        }
    }
    let xs = sample_grid(1, 25, DEFAULT_SEED, Some(&spec));
    let r = parseval_scan(&mu, &spec, &xs, 4096.0, 0.01).map_err(e)?;
    scans.record(&r);
    Ok((
        first == want && worst < 1e-10 && r.min_sum >= 0.99,
        format!("first={} max|μ̂(λ-λ')|={worst:.1e} min_sum={:.5}", RationalSpectrum::new(first.clone()), r.min_sum),
    ))
}

fn criterion_6(scans: &mut Scans) -> Outcome {
    let mu = AffineIfs::new(4, set(&[0, 1])).map_err(e)?;
    let fam = infinite_spectra_family(&mu, &set(&[0, 2]), 5).map_err(e)?;
    let coinciding = fam.coinciding_pairs(64.0);
    let mut distinct_at = None;
    for k in 3..=8 {
        if fam.coinciding_pairs(4f64.powi(k)).is_empty() {
            distinct_at = Some(k);
            break;
        }
    }
    let xs = sample_grid(1, 25, DEFAULT_SEED, None);
    let mut min_sum = f64::INFINITY;
    for s in &fam.spectra {
        let r = parseval_scan(&mu, s, &xs, 4f64.powi(10), 0.02).map_err(e)?;
        scans.record(&r);
        min_sum = min_sum.min(r.min_sum);
    }
    Ok((
        fam.spectra.len() == 5 && coinciding.is_empty() && min_sum >= 0.98,
        format!(
            "coinciding within 64: {coinciding:?}; pairwise distinct from radius 4^{} on; min_sum(4^10)={min_sum:.4}",
            distinct_at.map_or("?".into(), |k| k.to_string())
        ),
    ))
}

fn criterion_7(scans: &mut Scans) -> Outcome {
    let start = Instant::now();
    let s = BoxUnionRegion::staircase();
    let fbox = [int(3), int(2), int(4)];
    let t = PeriodicSet::diagonal(&fbox, vec![vec![int(0); 3], vec![int(0), int(0), int(1)]]);
    let tiling = check_translation_tiling(&s, &t, &fbox).map_err(e)?;
    let search = lattice_tiling_search(&s, &int(4)).map_err(e)?;
    let q = |f: Vec<Rational>, p: Rational| QuasiLattice::new(f, p).map(SpectrumDescriptor::QuasiLattice);
    let spec = product_spectrum(vec![
        q(vec![int(0)], rat(1, 3)).map_err(e)?,
        q(vec![int(0)], rat(1, 2)).map_err(e)?,
        q(vec![int(0), rat(1, 4)], int(1)).map_err(e)?,
    ])
    .map_err(e)?;
    let xs = sample_grid(3, 25, DEFAULT_SEED, None);
    let r = product_parseval_scan(&s, &spec, &xs, 50.0, 0.05).map_err(e)?;
    scans.record(&r);
    let elapsed = start.elapsed();
    Ok((
        tiling.tiles && search.lattices.is_empty() && r.min_sum >= 0.95 && elapsed < Duration::from_secs(300),
        format!(
            "tiling={} lattices={}/{} candidates min_sum={:.4} time={elapsed:.2?}",
            tiling.tiles,
            search.lattices.len(),
            search.candidates,
            r.min_sum
        ),
    ))
}

/// Brute force: does some `B ∋ 0` with `#A·#B = n` give `A ⊕ B = Z_n`?
fn complement_exists(a: &IntegerSet, n: i64) -> bool {
    let k = n as usize / a.len();
    if k * a.len() != n as usize {
        return false;
    }
    let mut b = vec![0i64];
    fn go(a: &IntegerSet, n: i64, k: usize, b: &mut Vec<i64>, next: i64) -> bool {
        if b.len() == k {
            return covers_once(a, b, n);
        }
        for c in next..n {
            b.push(c);
            if go(a, n, k, b, c + 1) {
                return true;
            }
            b.pop();
        }
        false
    }
    go(a, n, k, &mut b, 1)
}

fn covers_once(a: &IntegerSet, b: &[i64], n: i64) -> bool {
    let mut hit = vec![0u32; n as usize];
    for x in a.iter() {
        for y in b {
            hit[(x + y).rem_euclid(n) as usize] += 1;
        }
    }
    hit.iter().all(|&h| h == 1)
}

fn criterion_8(scans: &Scans) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED ^ 8);
    let bessel = scans.0.iter().all(|&m| m <= 1.0 + 1e-9);

    let tol = 1e-12;
    let mut worst_scaling: f64 = 0.0;
    for _ in 0..1000 {
        let scale = rng.random_range(2..=6i64);
        let size = rng.random_range(1..=4usize);
        let digits: IntegerSet = (0..size).map(|_| rng.random_range(-6..=6i64)).collect();
        let x = rng.random_range(-50.0..50.0);
        let ifs = AffineIfs::new(scale, digits).map_err(e)?;
        worst_scaling = worst_scaling.max(ifs.scaling_residual(x, tol).map_err(e)?);
    }

    let mut group_law = true;
    for _ in 0..50 {
        let r = |rng: &mut ChaCha8Rng| rat(rng.random_range(1..=5i64) * [-1, 1][rng.random_range(0..2usize)], rng.random_range(1..=4i64));
        let f = AffineMap::scalar(r(&mut rng), r(&mut rng));
        let g = AffineMap::scalar(r(&mut rng), r(&mut rng));
        let m = MeasureDescriptor::Ifs {
            scale: 4,
            digits: vec![int(0), int(2)],
        };
        let s = SpectrumDescriptor::QuasiLattice(QuasiLattice::new(vec![int(0), rat(1, 4)], int(1)).map_err(e)?);
        let gf = g.compose(&f).map_err(e)?;
        let direct = affine_transform_pair(&m, &s, &gf).map_err(e)?;
        let (m1, s1) = affine_transform_pair(&m, &s, &f).map_err(e)?;
        let stepwise = affine_transform_pair(&m1, &s1, &g).map_err(e)?;
        group_law &= direct == stepwise;
        let id = affine_transform_pair(&m, &s, &AffineMap::scalar(int(1), Rational::zero())).map_err(e)?;
        group_law &= id == (m.clone(), s.clone());
    }

    let mut complements = true;
    let mut checked = 0;
    for _ in 0..60 {
        let size = rng.random_range(1..=3usize);
        let a: IntegerSet = std::iter::once(0).chain((1..size).map(|_| rng.random_range(1..10i64))).collect();
        for n in (a.len() as i64..=16).step_by(a.len()) {
            let found = find_complement(&a, n).map_err(e)?;
            match &found {
                Some(cert) => complements &= covers_once(&a, cert.complement.elements(), n) && cert.modulus == n,
                None => complements &= !complement_exists(&a, n),
            }
            checked += 1;
        }
    }

    let folds = [1, 2, 5]
        .iter()
        .map(|&p| rearranged_cube(p).map(|r| r.fold.congruent && !r.upper_fold.congruent))
        .collect::<Result<Vec<bool>, _>>()
        .map_err(e)?;
    let folds_ok = folds.iter().all(|&b| b);

    Ok((
        bessel && worst_scaling <= 10.0 * tol && group_law && complements && folds_ok,
        format!(
            "bessel over {} scans={bessel} scaling max={worst_scaling:.1e} group_law={group_law} complements({checked})={complements} folds={folds:?}",
            scans.0.len()
        ),
    ))
}

fn main() -> ExitCode {
    let mut scans = Scans(Vec::new());
    let mut unexpected = 0;
    let mut report = |n: u32, outcome: Outcome, elapsed: Duration| {
        let (pass, detail) = match outcome {
            Ok(x) => x,
            Err(msg) => (false, format!("error: {msg}")),
        };
        let known = KNOWN_RED.contains(&n);
        let tag = if pass { "PASS" } else { "FAIL" };
        let note = match (pass, known) {
            (false, true) => " [known red]",
            (true, true) => " [known red now passes]",
            _ => "",
        };
        println!("{tag} criterion {n}{note}: {detail} ({elapsed:.2?})");
        if !pass && !known {
            unexpected += 1;
        }
    };
    macro_rules! run {
        ($n:expr, $f:expr) => {{
            let t = Instant::now();
            let out = $f;
            report($n, out, t.elapsed());
        }};
    }
    run!(1, criterion_1(&mut scans));
    run!(2, criterion_2());
    run!(3, criterion_3());
    run!(4, criterion_4());
    run!(5, criterion_5(&mut scans));
    run!(6, criterion_6(&mut scans));
    run!(7, criterion_7(&mut scans));
    run!(8, criterion_8(&scans));
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{unexpected} unexpected result(s)");
        ExitCode::FAILURE
    }
}
