//! Numerical and exact evidence: Parseval partial sums, greedy orthogonal
//! families of exponentials and deficiency witnesses for non-spectrality.

use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{abs_f64, int, to_f64, IntegerSet, Rational};
use crate::finite::RationalSpectrum;
use crate::ifs::{AffineIfs, GeneratedSpectrum, MatrixIfs, TwistedProductSpectrum, DEFAULT_TOL};
use crate::interval::{IntervalUnion, QuasiLattice};

/// Partial sums above `1 + BESSEL_SLACK` violate Bessel's inequality.
pub const BESSEL_SLACK: f64 = 1e-9;
pub const DEFAULT_SAMPLES: usize = 25;
pub const DEFAULT_SEED: u64 = 0x5eed;
pub const DEFAULT_GAP_THRESHOLD: f64 = 0.01;
/// `|μ̂| below this counts as a numeric zero in greedy families.
pub const NUMERIC_ZERO: f64 = 1e-10;

/// A probability measure known through its Fourier transform.
pub trait FourierMeasure: Sync {
    fn dimension(&self) -> usize;

    fn fourier(&self, x: &[f64]) -> Result<Complex64>;

    /// Exact decision of `μ̂(x) = 0`, when available.
    fn is_exact_zero(&self, _x: &[Rational]) -> Option<bool> {
        None
    }

    /// Step `g` with all rational zeros of a one-dimensional `μ̂` in `gZ`.
    fn zero_grid(&self) -> Option<Rational> {
        None
    }
}

/// A discrete frequency set that can be listed inside a box.
pub trait SpectrumSource: Sync {
    fn dimension(&self) -> usize;

    /// Points with every coordinate of absolute value below `radius`.
    fn points_within(&self, radius: f64) -> Vec<Vec<f64>>;
}

fn check_dim(expected: usize, x: &[f64]) -> Result<()> {
    if x.len() == expected {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected,
            found: x.len(),
        })
    }
}

impl FourierMeasure for AffineIfs {
    fn dimension(&self) -> usize {
        1
    }

    fn fourier(&self, x: &[f64]) -> Result<Complex64> {
        check_dim(1, x)?;
        self.invariant_ft(x[0], DEFAULT_TOL)
    }

    fn is_exact_zero(&self, x: &[Rational]) -> Option<bool> {
        (x.len() == 1).then(|| AffineIfs::is_exact_zero(self, &x[0]))
    }

    fn zero_grid(&self) -> Option<Rational> {
        AffineIfs::zero_grid(self)
    }
}

impl FourierMeasure for IntervalUnion {
    fn dimension(&self) -> usize {
        1
    }

    fn fourier(&self, x: &[f64]) -> Result<Complex64> {
        check_dim(1, x)?;
        Ok(self.ft(x[0]))
    }

    fn is_exact_zero(&self, x: &[Rational]) -> Option<bool> {
        (x.len() == 1).then(|| IntervalUnion::is_exact_zero(self, &x[0]))
    }

    fn zero_grid(&self) -> Option<Rational> {
        Some(IntervalUnion::zero_grid(self))
    }
}

impl FourierMeasure for MatrixIfs {
    fn dimension(&self) -> usize {
        MatrixIfs::dimension(self)
    }

    fn fourier(&self, x: &[f64]) -> Result<Complex64> {
        self.invariant_ft(x, DEFAULT_TOL)
    }
}

/// Uniform probability on the atoms of an integer set.
impl FourierMeasure for IntegerSet {
    fn dimension(&self) -> usize {
        1
    }

    fn fourier(&self, x: &[f64]) -> Result<Complex64> {
        check_dim(1, x)?;
        if self.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(crate::exact::delta_hat(self, x[0]))
    }

    fn is_exact_zero(&self, x: &[Rational]) -> Option<bool> {
        (x.len() == 1).then(|| crate::exact::vanishing_sum(self, &x[0]))
    }
}

fn within_1d(points: impl IntoIterator<Item = Rational>, radius: f64) -> Vec<Vec<f64>> {
    points
        .into_iter()
        .map(|p| to_f64(&p))
        .filter(|p| p.abs() < radius)
        .map(|p| vec![p])
        .collect()
}

impl SpectrumSource for RationalSpectrum {
    fn dimension(&self) -> usize {
        1
    }

    fn points_within(&self, radius: f64) -> Vec<Vec<f64>> {
        within_1d(self.points().iter().copied(), radius)
    }
}

impl SpectrumSource for QuasiLattice {
    fn dimension(&self) -> usize {
        1
    }

    fn points_within(&self, radius: f64) -> Vec<Vec<f64>> {
        within_1d(QuasiLattice::points_within(self, radius), radius)
    }
}

impl SpectrumSource for GeneratedSpectrum {
    fn dimension(&self) -> usize {
        1
    }

    fn points_within(&self, radius: f64) -> Vec<Vec<f64>> {
        within_1d(self.elements_within(radius), radius)
    }
}

impl SpectrumSource for TwistedProductSpectrum {
    fn dimension(&self) -> usize {
        1
    }

    fn points_within(&self, radius: f64) -> Vec<Vec<f64>> {
        within_1d(self.elements_within(radius), radius)
    }
}

/// `count` points of a Kronecker sequence in `[0, 1)^dim` with a seeded
/// random offset, skipping points within `1e-6` of `-λ` for `λ` in `avoid`.
pub fn sample_grid(dim: usize, count: usize, seed: u64, avoid: Option<&dyn SpectrumSource>) -> Vec<Vec<f64>> {
    const PRIMES: [f64; 12] = [2.0, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0, 23.0, 29.0, 31.0, 37.0];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha: Vec<f64> = (0..dim).map(|i| PRIMES[i % PRIMES.len()].sqrt().fract() + i as f64 / 1e3).collect();
    let offset: Vec<f64> = (0..dim).map(|_| rng.random::<f64>()).collect();
    let nodes = avoid.map(|s| s.points_within(2.0)).unwrap_or_default();
    let near_node = |x: &[f64]| {
        nodes
            .iter()
            .any(|l| l.iter().zip(x).all(|(l, x)| (x + l).abs() < 1e-6))
    };
    let mut out = Vec::with_capacity(count);
    let mut k = 1u64;
    while out.len() < count {
        let x: Vec<f64> = (0..dim)
            .map(|i| (offset[i] + k as f64 * alpha[i]).fract())
            .collect();
        if !near_node(&x) {
            out.push(x);
        }
        k += 1;
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParsevalReport {
    pub sample_points: Vec<Vec<f64>>,
    pub radius: f64,
    pub spectrum_size: usize,
    pub partial_sums: Vec<f64>,
    pub min_sum: f64,
    pub max_sum: f64,
    pub tol: f64,
    pub passed: bool,
}

impl ParsevalReport {
    pub fn from_sums(sample_points: Vec<Vec<f64>>, radius: f64, spectrum_size: usize, partial_sums: Vec<f64>, tol: f64) -> Self {
        let min_sum = partial_sums.iter().copied().fold(f64::INFINITY, f64::min);
        let max_sum = partial_sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        ParsevalReport {
            sample_points,
            radius,
            spectrum_size,
            partial_sums,
            min_sum,
            max_sum,
            tol,
            passed: min_sum >= 1.0 - tol,
        }
    }

    pub fn bessel_ok(&self) -> bool {
        self.max_sum <= 1.0 + BESSEL_SLACK
    }
}

/// `Σ_{λ} |μ̂(x + λ)|²` over spectrum points inside the box of `radius`,
/// for each sample `x`.
pub fn parseval_scan(
    ft: &dyn FourierMeasure,
    spectrum: &dyn SpectrumSource,
    xs: &[Vec<f64>],
    radius: f64,
    tol: f64,
) -> Result<ParsevalReport> {
    if !(radius > 0.0) {
        return Err(Error::pre("radius must be positive"));
    }
    crate::ifs::check_tol(tol)?;
    let d = ft.dimension();
    if spectrum.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: spectrum.dimension(),
        });
    }
    let points = spectrum.points_within(radius);
    let sums = xs
        .par_iter()
        .map(|x| {
            check_dim(d, x)?;
            let mut shifted = vec![0.0; d];
            points.iter().try_fold(0.0, |acc, l| {
                for i in 0..d {
                    shifted[i] = x[i] + l[i];
                }
                Ok(acc + ft.fourier(&shifted)?.norm_sqr())
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ParsevalReport::from_sums(xs.to_vec(), radius, points.len(), sums, tol))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalFamily {
    pub frequencies: Vec<Rational>,
    /// Members admitted through a numeric zero rather than an exact one.
    pub numeric: Vec<Rational>,
}

/// Greedy family over `candidates` (in the given order) starting from 0,
/// keeping a candidate when its differences with all members are zeros of
/// `μ̂`.
pub fn greedy_from_candidates(
    ft: &dyn FourierMeasure,
    candidates: &[Rational],
    cap: usize,
) -> Result<OrthogonalFamily> {
    if cap == 0 {
        return Err(Error::pre("cap must be at least 1"));
    }
    if ft.dimension() != 1 {
        return Err(Error::Unsupported("greedy families are one-dimensional".into()));
    }
    let mut family = vec![Rational::zero()];
    let mut numeric = Vec::new();
    for c in candidates {
        if family.len() >= cap {
            break;
        }
        if family.contains(c) {
            continue;
        }
        let mut exact = true;
        let mut ok = true;
        for f in &family {
            let d = c - f;
            match ft.is_exact_zero(std::slice::from_ref(&d)) {
                Some(true) => {}
                Some(false) => ok = false,
                None => {
                    exact = false;
                    ok = ft.fourier(&[to_f64(&d)])?.norm() < NUMERIC_ZERO;
                }
            }
            if !ok {
                break;
            }
        }
        if ok {
            family.push(*c);
            if !exact {
                numeric.push(*c);
            }
        }
    }
    Ok(OrthogonalFamily {
        frequencies: family,
        numeric,
    })
}

/// Greedy orthogonal family on the zero grid `gZ` of `μ̂`, scanning
/// `|λ| ≤ radius` in order of `(|λ|, λ)`.
pub fn greedy_orthogonal_family(ft: &dyn FourierMeasure, radius: f64, cap: usize) -> Result<OrthogonalFamily> {
    let candidates = match ft.zero_grid() {
        Some(g) => {
            let kmax = (radius / abs_f64(&g)).floor() as i64;
            let mut c: Vec<Rational> = (1..=kmax).flat_map(|k| [g * (-k), g * k]).collect();
            c.sort_by(|a, b| a.abs().cmp(&b.abs()).then(a.cmp(b)));
            c
        }
        None => Vec::new(),
    };
    greedy_from_candidates(ft, &candidates, cap)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeficiencyWitness {
    pub x: f64,
    pub radius: f64,
    pub best_sum: f64,
    pub gap: f64,
    pub threshold: f64,
    pub family_used: Vec<Rational>,
    /// Candidate families are subsets of `grid · Z`.
    pub grid: Rational,
    pub prime: i64,
    /// `v` with `μ̂(grid · p^v · u) = 0` for all units `u`.
    pub zero_valuations: Vec<u32>,
    pub candidates: usize,
}

impl DeficiencyWitness {
    pub fn valid(&self) -> bool {
        self.gap >= self.threshold
    }
}

fn prime_power_base(n: i64) -> Option<i64> {
    let p = (2..=n).find(|p| n % p == 0)?;
    let mut m = n;
    while m % p == 0 {
        m /= p;
    }
    (m == 1).then_some(p)
}

fn valuation(mut n: i64, p: i64) -> u32 {
    let mut v = 0;
    while n != 0 && n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

/// Checks `zeros(ν̂₁) ⊆ zeros(ν̂₂)` for `B = B₁ ⊕ B₂` on the rational zero
/// grids of both factors up to `bound`.
pub fn check_factor_zeros(ifs: &AffineIfs, b1: &IntegerSet, b2: &IntegerSet, bound: f64) -> Result<()> {
    let sum = b1
        .direct_sum(b2)
        .ok_or_else(|| Error::pre(format!("{b1} ⊕ {b2} is not direct")))?;
    if &sum != ifs.digits() {
        return Err(Error::pre(format!("{b1} ⊕ {b2} ≠ {}", ifs.digits())));
    }
    let nu1 = AffineIfs::new(ifs.scale(), b1.clone())?;
    let nu2 = AffineIfs::new(ifs.scale(), b2.clone())?;
    if let Some(g) = nu1.zero_grid() {
        let kmax = (bound / abs_f64(&g)).ceil() as i64;
        if let Some(k) = (1..=kmax).find(|&k| nu1.is_exact_zero(&(g * k)) && !nu2.is_exact_zero(&(g * k))) {
            return Err(Error::pre(format!("{} is a zero of the first factor only", g * k)));
        }
    }
    Ok(())
}

/// Largest `Σ_{λ∈Λ} |μ̂(x + λ)|²` over families `Λ ⊂ gZ ∩ (-radius, radius)`
/// with all differences in the zero set of `μ̂`, for scale `A = p^e` and a
/// zero set on `gZ` determined by the `p`-adic valuation.
pub fn deficiency_witness(
    ifs: &AffineIfs,
    factors: Option<(&IntegerSet, &IntegerSet)>,
    x: f64,
    radius: f64,
    threshold: f64,
) -> Result<DeficiencyWitness> {
    if !(radius > 0.0) {
        return Err(Error::pre("radius must be positive"));
    }
    if let Some((b1, b2)) = factors {
        check_factor_zeros(ifs, b1, b2, 2.0 * radius)?;
    }
    let p = prime_power_base(ifs.scale())
        .ok_or_else(|| Error::Unsupported(format!("scale {} is not a prime power", ifs.scale())))?;
    let g = ifs
        .zero_grid()
        .ok_or_else(|| Error::Unsupported("μ̂ has no rational zeros".into()))?;
    let gf = abs_f64(&g);
    let kmax = (radius / gf).ceil() as i64;
    let ks: Vec<i64> = (-kmax..=kmax).filter(|&k| (k as f64 * gf).abs() < radius).collect();
    let span = 2 * kmax + 1;
    let vmax = valuation_bound(span, p);
    let zero_at: Vec<bool> = (0..=vmax)
        .map(|v| ifs.is_exact_zero(&(g * p.pow(v))))
        .collect();
    if let Some(d) = (1..span).find(|&d| ifs.is_exact_zero(&(g * d)) != zero_at[valuation(d, p) as usize]) {
        return Err(Error::Unsupported(format!(
            "zero set is not determined by the {p}-adic valuation (at {})",
            g * d
        )));
    }
    let weights: Vec<(i64, f64)> = ks
        .par_iter()
        .map(|&k| Ok((k, ifs.invariant_ft(x + k as f64 * to_f64(&g), DEFAULT_TOL)?.norm_sqr())))
        .collect::<Result<_>>()?;
    let (best_sum, mut family) = best_family(&weights, 0, p, &zero_at);
    family.sort();
    Ok(DeficiencyWitness {
        x,
        radius,
        best_sum,
        gap: 1.0 - best_sum,
        threshold,
        family_used: family.into_iter().map(|k| g * k).collect(),
        grid: g,
        prime: p,
        zero_valuations: (0..=vmax as u32).filter(|&v| zero_at[v as usize]).collect(),
        candidates: ks.len(),
    })
}

fn valuation_bound(span: i64, p: i64) -> u32 {
    let mut v = 0;
    let mut q = 1i64;
    while q <= span {
        q *= p;
        v += 1;
    }
    v
}

/// Points of one class modulo `p^level`; two points first separate at the
/// level equal to the valuation of their difference.
fn best_family(points: &[(i64, f64)], level: u32, p: i64, zero_at: &[bool]) -> (f64, Vec<i64>) {
    match points {
        [] => return (0.0, Vec::new()),
        [(k, w)] => return (*w, vec![*k]),
        _ => {}
    }
    let m = p.pow(level + 1);
    let mut children: Vec<Vec<(i64, f64)>> = vec![Vec::new(); p as usize];
    for &(k, w) in points {
        children[(k.rem_euclid(m) / p.pow(level)) as usize].push((k, w));
    }
    let results: Vec<(f64, Vec<i64>)> = children
        .iter()
        .map(|c| best_family(c, level + 1, p, zero_at))
        .collect();
    let single = results
        .iter()
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .cloned()
        .unwrap_or_default();
    if zero_at.get(level as usize).copied().unwrap_or(false) {
        let total: f64 = results.iter().map(|r| r.0).sum();
        if total > single.0 {
            return (total, results.into_iter().flat_map(|r| r.1).collect());
        }
    }
    single
}

/// Integer frequencies `Z` as a quasi-lattice.
pub fn integer_lattice() -> QuasiLattice {
    QuasiLattice::new(vec![int(0)], int(1)).expect("nonempty finite part")
}
