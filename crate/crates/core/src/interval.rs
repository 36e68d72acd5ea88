//! Unions of unit intervals `A + [0, 1]`: Fourier transform, spectra,
//! tilings of the line and representation as IFS attractors.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{abs_f64, delta_hat, frac, int, mask_poly, rat, IntegerSet, Rational};
use crate::finite::{enumerate_spectra, find_complement, TileCertificate};
use crate::ifs::AffineIfs;

/// `A + [0, 1]` for a finite integer set `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalUnion {
    offsets: IntegerSet,
}

impl IntervalUnion {
    pub fn new(offsets: IntegerSet) -> Result<Self> {
        if offsets.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(IntervalUnion { offsets })
    }

    pub fn offsets(&self) -> &IntegerSet {
        &self.offsets
    }

    pub fn length(&self) -> usize {
        self.offsets.len()
    }

    pub fn ft(&self, t: f64) -> Complex64 {
        interval_union_ft(&self.offsets, t)
    }

    /// Exact zero test: `μ̂_A(x) = 0` iff `x` is a nonzero integer or the
    /// mask sum vanishes at `x`.
    pub fn is_exact_zero(&self, x: &Rational) -> bool {
        (x.is_integer() && !x.is_zero()) || crate::exact::vanishing_sum(&self.offsets, x)
    }

    /// Rational zeros lie on `(1/Q) Z`, `Q` the lcm of the cyclotomic
    /// factors of `p_A`.
    pub fn zero_grid(&self) -> Rational {
        let q = mask_poly(&self.offsets)
            .map(|p| p.all_cyclotomic_factors())
            .unwrap_or_default()
            .into_iter()
            .fold(1i64, |l, q| l.lcm(&(q as i64)));
        rat(1, q)
    }

    pub fn components(&self) -> Vec<(f64, f64)> {
        crate::ifs::merge_intervals(
            self.offsets
                .iter()
                .map(|a| (a as f64, a as f64 + 1.0))
                .collect(),
        )
    }
}

/// `(e^{2πit} - 1)/(2πit)`, with a Taylor series near 0.
pub fn unit_interval_ft(t: f64) -> Complex64 {
    let z = Complex64::new(0.0, 2.0 * PI * t);
    if t.abs() < 1e-6 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 1..6 {
            term = term * z / (k as f64 + 1.0);
            sum += term;
        }
        sum
    } else {
        (z.exp() - 1.0) / z
    }
}

/// Normalized Fourier transform of Lebesgue measure on `A + [0, 1]`.
pub fn interval_union_ft(a: &IntegerSet, t: f64) -> Complex64 {
    unit_interval_ft(t) * delta_hat(a, t)
}

/// `F + pZ`, stored with the minimal period and `F ⊂ [0, p)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuasiLattice {
    finite: Vec<Rational>,
    period: Rational,
}

impl QuasiLattice {
    pub fn new(finite: Vec<Rational>, period: Rational) -> Result<Self> {
        if finite.is_empty() {
            return Err(Error::EmptySet);
        }
        if period.is_zero() {
            return Err(Error::pre("period must be nonzero"));
        }
        let period = period.abs();
        let mut reps: Vec<Rational> = finite.iter().map(|x| frac(&(x / period)) * period).collect();
        reps.sort();
        reps.dedup();
        if reps.len() != finite.len() {
            return Err(Error::pre("finite part has points congruent modulo the period"));
        }
        let n = reps.len() as i64;
        let k = (1..=n)
            .rev()
            .filter(|k| n % k == 0)
            .find(|&k| {
                let step = period / k;
                let shifted = normalize(reps.iter().map(|x| x + step), &period);
                shifted == reps
            })
            .unwrap_or(1);
        let period = period / k;
        let finite = normalize(reps.into_iter(), &period);
        Ok(QuasiLattice { finite, period })
    }

    /// `Z + Λ_A`.
    pub fn integer_translates(finite: &[Rational]) -> Result<Self> {
        Self::new(finite.to_vec(), int(1))
    }

    pub fn finite_part(&self) -> &[Rational] {
        &self.finite
    }

    pub fn period(&self) -> Rational {
        self.period
    }

    pub fn contains(&self, x: &Rational) -> bool {
        let r = frac(&(x / self.period)) * self.period;
        self.finite.binary_search(&r).is_ok()
    }

    /// Elements with `|λ| < radius`, ascending.
    pub fn points_within(&self, radius: f64) -> Vec<Rational> {
        let p = abs_f64(&self.period);
        let kmax = (radius / p).ceil() as i64 + 1;
        let mut out: Vec<Rational> = (-kmax..=kmax)
            .flat_map(|k| self.finite.iter().map(move |f| f + self.period * k))
            .filter(|x| abs_f64(x) < radius)
            .collect();
        out.sort();
        out
    }

    pub fn scaled(&self, s: &Rational) -> Result<Self> {
        Self::new(self.finite.iter().map(|x| x * s).collect(), self.period * s)
    }
}

fn normalize(xs: impl Iterator<Item = Rational>, period: &Rational) -> Vec<Rational> {
    let mut v: Vec<Rational> = xs.map(|x| frac(&(x / period)) * period).collect();
    v.sort();
    v.dedup();
    v
}

/// All spectra `Z + Λ_A` of `A + [0, 1]` with `Λ_A` an exact spectrum of `A`.
pub fn spectra_of_interval_union(a: &IntegerSet, denominator_bound: Option<u64>) -> Result<Vec<QuasiLattice>> {
    let found = enumerate_spectra(a, denominator_bound)?;
    found
        .spectra
        .iter()
        .map(|(s, _)| QuasiLattice::integer_translates(s.points()))
        .collect()
}

pub fn default_n_max(a: &IntegerSet) -> i64 {
    (a.max().unwrap_or(0) + 1) * a.len() as i64
}

fn require_zero(a: &IntegerSet) -> Result<()> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if !a.contains(0) {
        return Err(Error::pre(format!("0 must belong to {a}")));
    }
    Ok(())
}

/// Smallest `n ≤ n_max` with a complement `A ⊕ B = Z_n`; the tile set is
/// `B ⊕ nZ`.
pub fn tiles_real_line(a: &IntegerSet, n_max: Option<i64>) -> Result<Option<TileCertificate>> {
    require_zero(a)?;
    let n_max = n_max.unwrap_or_else(|| default_n_max(a));
    let step = a.len() as i64;
    let mut n = step;
    while n <= n_max {
        if let Some(cert) = find_complement(a, n)? {
            return Ok(Some(cert));
        }
        n += step;
    }
    Ok(None)
}

/// `A + [0, 1]` as the attractor of `x ↦ (x + c + na)/n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalIfs {
    pub n: i64,
    pub complement: IntegerSet,
    pub ifs: AffineIfs,
}

/// Smallest `n ≥ 2`, then lexicographically smallest `C`, with
/// `A ⊕ C = {0, ..., n-1}` exactly.
pub fn as_affine_ifs(a: &IntegerSet, n_max: Option<i64>) -> Result<Option<IntervalIfs>> {
    require_zero(a)?;
    let n_max = n_max.unwrap_or_else(|| default_n_max(a).max(2));
    let step = a.len() as i64;
    let mut n = step;
    while n <= n_max {
        if n >= 2 {
            if let Some(c) = interval_complement(a, n) {
                let digits: IntegerSet = c
                    .iter()
                    .flat_map(|ci| a.iter().map(move |ai| ci + n * ai))
                    .collect();
                let ifs = AffineIfs::new(n, digits)?;
                return Ok(Some(IntervalIfs {
                    n,
                    complement: c,
                    ifs,
                }));
            }
        }
        n += step;
    }
    Ok(None)
}

fn interval_complement(a: &IntegerSet, n: i64) -> Option<IntegerSet> {
    let lo = -a.min()?;
    let hi = n - 1 - a.max()?;
    if lo > hi {
        return None;
    }
    let target = n as usize / a.len();
    let mut covered = vec![false; n as usize];
    let mut chosen = Vec::new();
    fn search(
        a: &IntegerSet,
        c: i64,
        hi: i64,
        target: usize,
        covered: &mut [bool],
        chosen: &mut Vec<i64>,
    ) -> bool {
        if chosen.len() == target {
            return covered.iter().all(|&x| x);
        }
        let first_free = covered.iter().position(|&x| !x).unwrap() as i64;
        // The smallest uncovered point must be `c' + min A` for the next pick.
        let next = first_free - a.min().unwrap();
        if next < c || next > hi {
            return false;
        }
        if a.iter().any(|x| covered[(x + next) as usize]) {
            return false;
        }
        for x in a.iter() {
            covered[(x + next) as usize] = true;
        }
        chosen.push(next);
        if search(a, next + 1, hi, target, covered, chosen) {
            return true;
        }
        chosen.pop();
        for x in a.iter() {
            covered[(x + next) as usize] = false;
        }
        false
    }
    search(a, lo, hi, target, &mut covered, &mut chosen).then(|| IntegerSet::new(chosen))
}
