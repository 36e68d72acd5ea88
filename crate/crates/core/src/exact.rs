//! Rational helpers, integer sets, mask polynomials and exact tests for
//! vanishing sums of roots of unity.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(numer, denom)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Parses `"p/q"`, `"p"` or a decimal-free integer string.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::pre(format!("cannot parse rational {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Rational::new(p, q))
        }
        None => s.parse::<i64>().map(int).map_err(|_| bad()),
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or_else(|| *r.numer() as f64 / *r.denom() as f64)
}

/// Representative of `r` modulo 1 in `[0, 1)`.
pub fn frac(r: &Rational) -> Rational {
    r - r.floor()
}

/// Largest `g` with `a/g` and `b/g` both integers; zero only when both are zero.
pub fn rational_gcd(a: &Rational, b: &Rational) -> Rational {
    let num = (a.numer() * b.denom()).gcd(&(b.numer() * a.denom()));
    Rational::new(num, a.denom() * b.denom())
}

pub fn mobius(mut n: u64) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

pub fn euler_phi(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Finite set of integers, stored sorted and without repetition.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntegerSet(Vec<i64>);

impl IntegerSet {
    pub fn new(elements: impl IntoIterator<Item = i64>) -> Self {
        let mut v: Vec<i64> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        IntegerSet(v)
    }

    /// Like [`IntegerSet::new`] but rejects repeated elements.
    pub fn from_distinct(elements: &[i64]) -> Result<Self> {
        let set = Self::new(elements.iter().copied());
        if set.len() != elements.len() {
            return Err(Error::pre("elements must be distinct"));
        }
        Ok(set)
    }

    /// `{0, 1, ..., n-1}`.
    pub fn interval(n: i64) -> Self {
        IntegerSet((0..n.max(0)).collect())
    }

    pub fn elements(&self) -> &[i64] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn min(&self) -> Option<i64> {
        self.0.first().copied()
    }

    pub fn max(&self) -> Option<i64> {
        self.0.last().copied()
    }

    pub fn max_abs(&self) -> i64 {
        self.0.iter().map(|a| a.abs()).max().unwrap_or(0)
    }

    pub fn contains(&self, x: i64) -> bool {
        self.0.binary_search(&x).is_ok()
    }

    pub fn scaled(&self, k: i64) -> Self {
        Self::new(self.iter().map(|a| a * k))
    }

    pub fn shifted(&self, s: i64) -> Self {
        IntegerSet(self.iter().map(|a| a + s).collect())
    }

    /// `self ⊕ other`, or `None` when two sums coincide.
    pub fn direct_sum(&self, other: &IntegerSet) -> Option<IntegerSet> {
        let mut sums = Vec::with_capacity(self.len() * other.len());
        for a in self.iter() {
            for b in other.iter() {
                sums.push(a + b);
            }
        }
        let n = sums.len();
        let set = Self::new(sums);
        (set.len() == n).then_some(set)
    }

    /// Gcd of all elements (nonnegative; zero for `{0}`).
    pub fn gcd(&self) -> i64 {
        self.iter().fold(0, |g, a| g.gcd(&a))
    }

    /// Gcd of the differences to the minimum.
    pub fn difference_gcd(&self) -> i64 {
        let m = self.min().unwrap_or(0);
        self.iter().fold(0, |g, a| g.gcd(&(a - m)))
    }

    /// Returns `c` when the set is exactly `{0, ..., c-1}`.
    pub fn interval_length(&self) -> Option<i64> {
        let c = self.len() as i64;
        (c > 0 && self.0.iter().enumerate().all(|(i, &a)| a == i as i64)).then_some(c)
    }

    /// Residues modulo `n` in `[0, n)`, in element order.
    pub fn residues(&self, n: i64) -> Vec<i64> {
        self.iter().map(|a| a.rem_euclid(n)).collect()
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        self.iter().map(int).collect()
    }
}

impl FromIterator<i64> for IntegerSet {
    fn from_iter<T: IntoIterator<Item = i64>>(iter: T) -> Self {
        Self::new(iter)
    }
}

impl From<&[i64]> for IntegerSet {
    fn from(v: &[i64]) -> Self {
        Self::new(v.iter().copied())
    }
}

impl<const N: usize> From<[i64; N]> for IntegerSet {
    fn from(v: [i64; N]) -> Self {
        Self::new(v)
    }
}

impl fmt::Display for IntegerSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, a) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, "}}")
    }
}

/// `p_A(z) = Σ_{a∈A} z^a`, stored as dense coefficients of `z^(a - offset)`
/// with `offset = min A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MaskPolynomial {
    offset: i64,
    coeffs: Vec<u64>,
}

pub fn mask_poly(a: &IntegerSet) -> Result<MaskPolynomial> {
    let offset = a.min().ok_or(Error::EmptySet)?;
    let span = (a.max().unwrap() - offset) as usize;
    let mut coeffs = vec![0u64; span + 1];
    for x in a.iter() {
        coeffs[(x - offset) as usize] += 1;
    }
    Ok(MaskPolynomial { offset, coeffs })
}

impl MaskPolynomial {
    /// Coefficient of `z^k`.
    pub fn coefficient(&self, k: i64) -> u64 {
        let i = k - self.offset;
        if i < 0 {
            return 0;
        }
        self.coeffs.get(i as usize).copied().unwrap_or(0)
    }

    /// Exponents with nonzero coefficient, ascending.
    pub fn exponents(&self) -> Vec<i64> {
        (0..self.coeffs.len())
            .filter(|&i| self.coeffs[i] != 0)
            .map(|i| i as i64 + self.offset)
            .collect()
    }

    pub fn term_count(&self) -> usize {
        self.coeffs.iter().filter(|&&c| c != 0).count()
    }

    pub fn coefficient_sum(&self) -> u64 {
        self.coeffs.iter().sum()
    }

    /// Degree of the shifted polynomial `z^(-min A) p_A(z)`.
    pub fn span(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::zero();
        for &c in self.coeffs.iter().rev() {
            acc = acc * z + c as f64;
        }
        acc * z.powi(self.offset as i32)
    }

    /// Value at `e^{2πit}`, summing unit phases directly.
    pub fn eval_unit(&self, t: f64) -> Complex64 {
        self.exponents()
            .into_iter()
            .map(|k| unit_phase(k as f64 * t) * self.coefficient(k) as f64)
            .sum()
    }

    /// True iff `Φ_q` divides `p_A`, that is `p_A` vanishes at the primitive
    /// `q`-th roots of unity.
    pub fn divisible_by_cyclotomic(&self, q: u64) -> bool {
        let shifted: Vec<i128> = self.coeffs.iter().map(|&c| c as i128).collect();
        cyclotomic_divides(&shifted, q)
    }

    /// All `q ≤ bound` with `Φ_q | p_A`. Only `φ(q) ≤ span` can divide.
    pub fn cyclotomic_factors(&self, bound: u64) -> Vec<u64> {
        let span = self.span() as u64;
        (1..=bound)
            .filter(|&q| euler_phi(q) <= span && self.divisible_by_cyclotomic(q))
            .collect()
    }

    /// Every `q` with `Φ_q | p_A`; uses `φ(q) ≥ sqrt(q/2)`.
    pub fn all_cyclotomic_factors(&self) -> Vec<u64> {
        let span = self.span() as u64;
        self.cyclotomic_factors(2 * span * span + 2)
    }
}

pub(crate) fn unit_phase(t: f64) -> Complex64 {
    let r = t.rem_euclid(1.0);
    Complex64::from_polar(1.0, 2.0 * PI * r)
}

/// Coefficients of the `q`-th cyclotomic polynomial, lowest degree first.
pub fn cyclotomic(q: u64) -> Vec<i128> {
    assert!(q >= 1, "cyclotomic index must be positive");
    let mut num: Vec<i128> = vec![1];
    let mut dens: Vec<u64> = Vec::new();
    for d in divisors(q) {
        match mobius(q / d) {
            1 => num = mul_binomial(&num, d as usize),
            -1 => dens.push(d),
            _ => {}
        }
    }
    for d in dens {
        num = div_binomial(&num, d as usize);
    }
    while num.len() > 1 && *num.last().unwrap() == 0 {
        num.pop();
    }
    num
}

/// `p · (z^d - 1)`.
fn mul_binomial(p: &[i128], d: usize) -> Vec<i128> {
    let mut out = vec![0i128; p.len() + d];
    for (i, &c) in p.iter().enumerate() {
        out[i + d] += c;
        out[i] -= c;
    }
    out
}

/// Exact quotient `p / (z^d - 1)`; the division must be exact.
fn div_binomial(p: &[i128], d: usize) -> Vec<i128> {
    let n = p.len();
    let mut rem = p.to_vec();
    let mut q = vec![0i128; n.saturating_sub(d)];
    for i in (d..n).rev() {
        let c = rem[i];
        if c != 0 {
            q[i - d] = c;
            rem[i] = 0;
            rem[i - d] += c;
        }
    }
    debug_assert!(rem.iter().all(|&c| c == 0), "inexact cyclotomic division");
    q
}

/// Whether `Φ_q` divides the polynomial with coefficients `p` (lowest first).
fn cyclotomic_divides(p: &[i128], q: u64) -> bool {
    let qn = q as usize;
    let mut reduced = vec![0i128; qn];
    for (i, &c) in p.iter().enumerate() {
        reduced[i % qn] += c;
    }
    if reduced.iter().all(|&c| c == 0) {
        return true;
    }
    let phi = cyclotomic(q);
    let deg = phi.len() - 1;
    for i in (deg..qn).rev() {
        let c = reduced[i];
        if c != 0 {
            for (j, &f) in phi.iter().enumerate() {
                reduced[i - deg + j] -= c * f;
            }
        }
    }
    reduced.iter().all(|&c| c == 0)
}

/// Exact test of `Σ_j e^{2πi t_j} = 0` for rational phases `t_j`.
pub fn phases_vanish(phases: &[Rational]) -> bool {
    if phases.is_empty() {
        return true;
    }
    let reduced: Vec<Rational> = phases.iter().map(frac).collect();
    let q = reduced.iter().fold(1i64, |l, r| l.lcm(r.denom()));
    if q == 1 {
        return false;
    }
    let mut coeffs = vec![0i128; q as usize];
    for r in &reduced {
        let k = r.numer() * (q / r.denom());
        coeffs[k as usize] += 1;
    }
    cyclotomic_divides(&coeffs, q as u64)
}

/// Exact truth of `Σ_{a∈A} e^{2πi a r} = 0`.
pub fn vanishing_sum(a: &IntegerSet, r: &Rational) -> bool {
    let phases: Vec<Rational> = a.iter().map(|x| r * x).collect();
    phases_vanish(&phases)
}

/// `δ̂_A(x) = (1/#A) Σ_a e^{2πiax}`.
pub fn delta_hat(a: &IntegerSet, x: f64) -> Complex64 {
    let n = a.len().max(1) as f64;
    a.iter().map(|k| unit_phase(k as f64 * x)).sum::<Complex64>() / n
}

/// `δ̂_A` at a rational point, with phases reduced exactly before rounding.
pub fn delta_hat_rational(a: &IntegerSet, x: &Rational) -> Complex64 {
    let n = a.len().max(1) as f64;
    a.iter()
        .map(|k| unit_phase(to_f64(&frac(&(x * k)))))
        .sum::<Complex64>()
        / n
}

/// `δ̂` of a finite set of rational nodes.
pub fn delta_hat_nodes(nodes: &[Rational], x: f64) -> Complex64 {
    let n = nodes.len().max(1) as f64;
    nodes
        .iter()
        .map(|b| unit_phase(to_f64(b) * x))
        .sum::<Complex64>()
        / n
}

/// `δ̂` of a finite point set in `R^d`.
pub fn delta_hat_points(points: &[Vec<Rational>], x: &[f64]) -> Result<Complex64> {
    let n = points.len().max(1) as f64;
    let mut acc = Complex64::zero();
    for p in points {
        if p.len() != x.len() {
            return Err(Error::DimensionMismatch {
                expected: p.len(),
                found: x.len(),
            });
        }
        let t: f64 = p.iter().zip(x).map(|(c, xi)| to_f64(c) * xi).sum();
        acc += unit_phase(t);
    }
    Ok(acc / n)
}

/// Minimal period `q` such that every element of `xs` lies in `(1/q)Z`.
pub fn common_denominator(xs: &[Rational]) -> i64 {
    xs.iter().fold(1i64, |l, r| l.lcm(r.denom()))
}

pub(crate) fn abs_f64(r: &Rational) -> f64 {
    to_f64(&r.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclotomic_small_cases() {
        assert_eq!(cyclotomic(1), vec![-1, 1]);
        assert_eq!(cyclotomic(2), vec![1, 1]);
        assert_eq!(cyclotomic(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic(12), vec![1, 0, -1, 0, 1]);
        // Φ_105 is the first with a coefficient of absolute value 2.
        let phi = cyclotomic(105);
        assert_eq!(phi.len() - 1, 48);
        assert!(phi.iter().any(|&c| c == -2));
    }

    #[test]
    fn cyclotomic_degrees_match_phi() {
        for q in 1..200u64 {
            assert_eq!(cyclotomic(q).len() as u64 - 1, euler_phi(q), "q={q}");
        }
    }

    #[test]
    fn mask_poly_examples() {
        assert_eq!(mask_poly(&IntegerSet::new([0])).unwrap().exponents(), vec![0]);
        let p = mask_poly(&IntegerSet::new([0, 2, 4])).unwrap();
        assert_eq!(p.exponents(), vec![0, 2, 4]);
        assert_eq!(p.term_count(), 3);
        let p = mask_poly(&IntegerSet::new([0, 1, 8, 9])).unwrap();
        assert_eq!(p.exponents(), vec![0, 1, 8, 9]);
        assert_eq!(p.coefficient_sum(), 4);
        assert_eq!(mask_poly(&IntegerSet::default()), Err(Error::EmptySet));
    }

    #[test]
    fn delta_hat_examples() {
        assert!(delta_hat(&IntegerSet::new([0, 2]), 0.25).norm() < 1e-15);
        assert!((delta_hat(&IntegerSet::new([3, 7, 11]), 0.0) - 1.0).norm() < 1e-15);
        assert!(delta_hat(&IntegerSet::new([0, 1, 4, 5]), 0.5).norm() < 1e-15);
    }

    #[test]
    fn vanishing_sum_examples() {
        let a = IntegerSet::new([0, 2, 4]);
        assert!(vanishing_sum(&a, &rat(1, 6)));
        assert!(!vanishing_sum(&a, &rat(1, 2)));
        for r in [rat(0, 1), rat(1, 2), rat(3, 7), rat(-5, 12)] {
            assert!(!vanishing_sum(&IntegerSet::new([0]), &r));
        }
        assert!(vanishing_sum(&IntegerSet::new([0, 2]), &rat(1, 4)));
        assert!(vanishing_sum(&IntegerSet::new([-3, 5]), &rat(1, 16)));
    }

    #[test]
    fn cyclotomic_factor_lists() {
        let p = mask_poly(&IntegerSet::new([0, 2, 4])).unwrap();
        assert_eq!(p.all_cyclotomic_factors(), vec![3, 6]);
        let p = mask_poly(&IntegerSet::new([0, 1, 8, 9])).unwrap();
        assert_eq!(p.all_cyclotomic_factors(), vec![2, 16]);
    }

    #[test]
    fn rational_helpers() {
        assert_eq!(parse_rational("3/12").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-7").unwrap(), int(-7));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("0.5").is_err());
        assert_eq!(frac(&rat(-1, 4)), rat(3, 4));
        assert_eq!(rational_gcd(&rat(1, 2), &rat(1, 3)), rat(1, 6));
        assert_eq!(rational_gcd(&rat(3, 4), &int(3)), rat(3, 4));
    }

    #[test]
    fn direct_sums() {
        let a = IntegerSet::new([0, 1]);
        assert_eq!(
            a.direct_sum(&IntegerSet::new([0, 2])),
            Some(IntegerSet::interval(4))
        );
        assert_eq!(a.direct_sum(&a), None);
    }

    fn small_set() -> impl Strategy<Value = IntegerSet> {
        prop::collection::btree_set(-20i64..40, 1..7).prop_map(IntegerSet::new)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn exact_test_agrees_with_floats(a in small_set(), p in -120i64..120, q in 1i64..=60) {
            let r = rat(p, q);
            let exact = vanishing_sum(&a, &r);
            let numeric = delta_hat_rational(&a, &r).norm() < 1e-9;
            prop_assert_eq!(exact, numeric);
        }

        #[test]
        fn delta_hat_bounded_and_periodic(a in small_set(), x in -10.0f64..10.0) {
            let v = delta_hat(&a, x);
            prop_assert!(v.norm() <= 1.0 + 1e-12);
            prop_assert!((delta_hat(&a, x + 1.0) - v).norm() < 1e-9);
        }

        #[test]
        fn delta_hat_is_one_on_integers(a in small_set(), n in -50i64..50) {
            prop_assert!((delta_hat(&a, n as f64).norm() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn mask_matches_delta_hat(a in small_set(), x in -3.0f64..3.0) {
            let p = mask_poly(&a).unwrap();
            let lhs = p.eval_unit(x);
            let rhs = delta_hat(&a, x) * a.len() as f64;
            prop_assert!((lhs - rhs).norm() < 1e-12);
            let z = Complex64::from_polar(1.0, 2.0 * PI * x);
            prop_assert!((p.eval(z) - rhs).norm() < 1e-9);
        }
    }
}
