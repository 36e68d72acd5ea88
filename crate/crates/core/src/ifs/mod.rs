//! Affine iterated function systems `τ_b(x) = A^{-1}(x + b)` and their
//! invariant measures.

mod factor;
mod spectrum;
mod transform;

pub use factor::{
    compose_spectra, factor_convolution, twisted_product_spectrum, ComposePart, ComposedSpectrum,
    ConvolutionFactorization, FactorComponent, TwistedProductSpectrum,
};
pub use spectrum::{
    certify_from_self_similarity, cycle_spectrum, find_cycles, infinite_spectra_family,
    new_spectrum_from_old, GeneratedSpectrum, SpectrumFamily, DEFAULT_CYCLE_LEN,
};
pub use transform::{affine_transform_pair, AffineMap, MeasureDescriptor, RationalMatrix, SpectrumDescriptor};

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::One;

use crate::error::{Error, Result};
use crate::exact::{
    delta_hat, mask_poly, rat, unit_phase, vanishing_sum, IntegerSet, Rational,
};

pub const DEFAULT_TOL: f64 = 1e-12;

/// One-dimensional affine IFS with integer scale `A ≥ 2` and digits `B`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineIfs {
    scale: i64,
    digits: IntegerSet,
}

impl AffineIfs {
    pub fn new(scale: i64, digits: IntegerSet) -> Result<Self> {
        if scale < 2 {
            return Err(Error::pre(format!("scale {scale} must be at least 2")));
        }
        if digits.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(AffineIfs { scale, digits })
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn digits(&self) -> &IntegerSet {
        &self.digits
    }

    /// Smallest `N` such that the factors beyond `N` change the product by
    /// less than `tol`, from `|δ̂_B(y) - 1| ≤ 2π max|b| |y|`.
    pub fn truncation_depth(&self, x: f64, tol: f64) -> Result<usize> {
        check_tol(tol)?;
        let m = self.digits.max_abs() as f64;
        if m == 0.0 || x == 0.0 {
            return Ok(0);
        }
        let a = self.scale as f64;
        let mut s = 2.0 * PI * m * x.abs() / (a - 1.0);
        let mut n = 0;
        while !(s < 1.0 && s.exp_m1() < tol) {
            n += 1;
            s /= a;
        }
        Ok(n)
    }

    /// `μ̂_B(x) = Π_{n≥1} δ̂_B(x / A^n)`, truncated with error below `tol`.
    pub fn invariant_ft(&self, x: f64, tol: f64) -> Result<Complex64> {
        let depth = self.truncation_depth(x, tol)?;
        let a = self.scale as f64;
        let mut y = x;
        let mut acc = Complex64::new(1.0, 0.0);
        for _ in 0..depth {
            y /= a;
            acc *= delta_hat(&self.digits, y);
        }
        Ok(acc)
    }

    /// Exact zero test for `μ̂_B` at a rational point.
    pub fn is_exact_zero(&self, x: &Rational) -> bool {
        let m = self.digits.max_abs();
        if m == 0 {
            return false;
        }
        let mut y = *x;
        loop {
            y /= self.scale;
            if vanishing_sum(&self.digits, &y) {
                return true;
            }
            if 2.0 * PI * m as f64 * crate::exact::abs_f64(&y) < 1.0 {
                return false;
            }
        }
    }

    /// All rational zeros of `μ̂_B` lie on `(A/Q) Z` with `Q` the lcm of the
    /// cyclotomic factors of `p_B`; `None` when `p_B` has none.
    pub fn zero_grid(&self) -> Option<Rational> {
        let poly = mask_poly(&self.digits).ok()?;
        let q = poly
            .all_cyclotomic_factors()
            .into_iter()
            .fold(1i64, |l, q| l.lcm(&(q as i64)));
        (q > 1).then(|| rat(self.scale, q))
    }

    /// `|μ̂(Ax) - δ̂_B(x) μ̂(x)|`.
    pub fn scaling_residual(&self, x: f64, tol: f64) -> Result<f64> {
        let lhs = self.invariant_ft(self.scale as f64 * x, tol)?;
        let rhs = delta_hat(&self.digits, x) * self.invariant_ft(x, tol)?;
        Ok((lhs - rhs).norm())
    }

    /// Convex hull `[min B/(A-1), max B/(A-1)]` of the attractor.
    pub fn hull(&self) -> (Rational, Rational) {
        let d = self.scale - 1;
        (
            rat(self.digits.min().unwrap(), d),
            rat(self.digits.max().unwrap(), d),
        )
    }

    /// Union of intervals after `iterations` Hutchinson steps from the hull,
    /// merged wherever pieces touch or overlap.
    pub fn hutchinson_cover(&self, iterations: usize) -> Vec<(f64, f64)> {
        let (lo, hi) = self.hull();
        let mut pieces = vec![(crate::exact::to_f64(&lo), crate::exact::to_f64(&hi))];
        let a = self.scale as f64;
        for _ in 0..iterations {
            let next: Vec<(f64, f64)> = self
                .digits
                .iter()
                .flat_map(|b| pieces.iter().map(move |&(l, h)| ((l + b as f64) / a, (h + b as f64) / a)))
                .collect();
            pieces = merge_intervals(next);
        }
        pieces
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidTolerance(tol))
    }
}

/// Sorts and merges intervals that overlap or touch within `1e-12`.
pub fn merge_intervals(mut v: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    v.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(v.len());
    for (l, h) in v {
        match out.last_mut() {
            Some(last) if l <= last.1 + 1e-12 => last.1 = last.1.max(h),
            _ => out.push((l, h)),
        }
    }
    out
}

/// Hausdorff distance between two finite unions of closed intervals.
pub fn hausdorff_interval_unions(x: &[(f64, f64)], y: &[(f64, f64)]) -> f64 {
    directed_hausdorff(x, y).max(directed_hausdorff(y, x))
}

fn directed_hausdorff(x: &[(f64, f64)], y: &[(f64, f64)]) -> f64 {
    let dist = |p: f64| {
        y.iter()
            .map(|&(l, h)| if p < l { l - p } else if p > h { p - h } else { 0.0 })
            .fold(f64::INFINITY, f64::min)
    };
    let ys = merge_intervals(y.to_vec());
    let mut candidates: Vec<f64> = x.iter().flat_map(|&(l, h)| [l, h]).collect();
    for w in ys.windows(2) {
        let mid = (w[0].1 + w[1].0) / 2.0;
        if x.iter().any(|&(l, h)| l <= mid && mid <= h) {
            candidates.push(mid);
        }
    }
    candidates.into_iter().map(dist).fold(0.0, f64::max)
}

/// Integer matrix IFS on `R^d` with an expansive scale.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixIfs {
    scale: Vec<Vec<i64>>,
    digits: Vec<Vec<i64>>,
    inv_transpose: DMatrix<f64>,
}

impl MatrixIfs {
    pub fn new(scale: Vec<Vec<i64>>, digits: Vec<Vec<i64>>) -> Result<Self> {
        let d = scale.len();
        if d == 0 || scale.iter().any(|row| row.len() != d) {
            return Err(Error::pre("scale must be a nonempty square matrix"));
        }
        if digits.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(bad) = digits.iter().find(|b| b.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: bad.len(),
            });
        }
        let m = DMatrix::from_fn(d, d, |i, j| scale[i][j] as f64);
        let eig = m.clone().complex_eigenvalues();
        if eig.iter().any(|z| z.norm() <= 1.0 + 1e-12) {
            return Err(Error::pre("scale is not expansive"));
        }
        let inv_transpose = m.transpose().try_inverse().ok_or(Error::Singular)?;
        let mut digits = digits;
        digits.sort();
        digits.dedup();
        Ok(MatrixIfs {
            scale,
            digits,
            inv_transpose,
        })
    }

    pub fn dimension(&self) -> usize {
        self.scale.len()
    }

    pub fn scale(&self) -> &[Vec<i64>] {
        &self.scale
    }

    pub fn digits(&self) -> &[Vec<i64>] {
        &self.digits
    }

    fn delta_hat(&self, y: &[f64]) -> Complex64 {
        let n = self.digits.len() as f64;
        self.digits
            .iter()
            .map(|b| unit_phase(b.iter().zip(y).map(|(&bi, yi)| bi as f64 * yi).sum()))
            .sum::<Complex64>()
            / n
    }

    /// `Π_{n≥1} δ̂_B((A^T)^{-n} x)`. The tail is bounded through a power `k`
    /// with `‖(A^T)^{-k}‖ ≤ 1/2`.
    pub fn invariant_ft(&self, x: &[f64], tol: f64) -> Result<Complex64> {
        check_tol(tol)?;
        let d = self.dimension();
        if x.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: x.len(),
            });
        }
        let m = self
            .digits
            .iter()
            .map(|b| b.iter().map(|&v| (v as f64).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let mut k = 1;
        let mut power = self.inv_transpose.clone();
        while power.norm() > 0.5 {
            power = &power * &self.inv_transpose;
            k += 1;
            if k > 4096 {
                return Err(Error::Internal("contraction power not found".into()));
            }
        }
        let mut y = nalgebra::DVector::from_column_slice(x);
        let mut window: std::collections::VecDeque<f64> = std::collections::VecDeque::new();
        let mut acc = Complex64::new(1.0, 0.0);
        let mut steps = 0usize;
        loop {
            y = &self.inv_transpose * y;
            window.push_back(y.norm());
            if window.len() > k {
                window.pop_front();
            }
            if window.len() == k {
                let s = 2.0 * 2.0 * PI * m * window.iter().sum::<f64>();
                if s < 1.0 && s.exp_m1() < tol {
                    // The current factor is covered by the bound.
                    break;
                }
            }
            acc *= self.delta_hat(y.as_slice());
            steps += 1;
            if steps > 100_000 {
                return Err(Error::Internal("truncation did not converge".into()));
            }
        }
        Ok(acc)
    }
}

pub(crate) fn is_integral(r: &Rational) -> bool {
    r.denom().is_one()
}

pub(crate) fn pow_i64(base: i64, exp: u32) -> Result<i64> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::pre(format!("{base}^{exp} overflows")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use proptest::prelude::*;

    fn ifs(a: i64, b: &[i64]) -> AffineIfs {
        AffineIfs::new(a, IntegerSet::from(b)).unwrap()
    }

    #[test]
    fn ft_at_zero_and_known_zero() {
        let mu = ifs(4, &[0, 2]);
        assert_eq!(mu.invariant_ft(0.0, 1e-12).unwrap(), Complex64::new(1.0, 0.0));
        assert!(mu.invariant_ft(1.0, 1e-12).unwrap().norm() < 1e-14);
        assert!(mu.is_exact_zero(&int(1)));
        assert!(!mu.is_exact_zero(&int(0)));
        assert!(!mu.is_exact_zero(&rat(1, 3)));
        assert!(matches!(mu.invariant_ft(1.0, 0.0), Err(Error::InvalidTolerance(_))));
    }

    #[test]
    fn product_of_factor_measures() {
        let mu = ifs(4, &[0, 1, 4, 5]);
        let nu1 = ifs(4, &[0, 1]);
        let nu2 = ifs(4, &[0, 4]);
        for i in 0..100 {
            let x = -20.0 + 0.4037 * i as f64;
            let lhs = mu.invariant_ft(x, 1e-12).unwrap();
            let rhs = nu1.invariant_ft(x, 1e-12).unwrap() * nu2.invariant_ft(x, 1e-12).unwrap();
            assert!((lhs - rhs).norm() < 1e-11, "x={x}");
        }
    }

    #[test]
    fn zero_grids() {
        assert_eq!(ifs(4, &[0, 2]).zero_grid(), Some(int(1)));
        assert_eq!(ifs(4, &[0, 1, 4, 5]).zero_grid(), Some(rat(1, 2)));
        assert_eq!(ifs(3, &[0, 2]).zero_grid(), Some(rat(3, 4)));
        assert_eq!(ifs(3, &[0, 1, 3]).zero_grid(), None);
    }

    #[test]
    fn lebesgue_cover() {
        let cover = ifs(4, &[0, 1, 8, 9]).hutchinson_cover(20);
        let target = [(0.0, 1.0), (2.0, 3.0)];
        assert!(hausdorff_interval_unions(&cover, &target) < 2f64.powi(-10));
    }

    #[test]
    fn matrix_ifs_diagonal_matches_product() {
        let m = MatrixIfs::new(
            vec![vec![4, 0], vec![0, 2]],
            vec![vec![0, 0], vec![2, 0], vec![0, 1], vec![2, 1]],
        )
        .unwrap();
        let a = ifs(4, &[0, 2]);
        let b = ifs(2, &[0, 1]);
        for &(x, y) in &[(0.3, -1.2), (2.5, 0.7), (-7.1, 3.3)] {
            let joint = m.invariant_ft(&[x, y], 1e-12).unwrap();
            let prod = a.invariant_ft(x, 1e-12).unwrap() * b.invariant_ft(y, 1e-12).unwrap();
            assert!((joint - prod).norm() < 1e-10);
        }
        assert!(MatrixIfs::new(vec![vec![1, 0], vec![0, 2]], vec![vec![0, 0]]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn scaling_identity(x in -10.0f64..10.0, which in 0usize..4) {
            let systems = [ifs(4, &[0, 2]), ifs(4, &[0, 1, 8, 9]), ifs(3, &[0, 2]), ifs(5, &[-2, 0, 3])];
            let tol = 1e-10;
            prop_assert!(systems[which].scaling_residual(x, tol).unwrap() < 10.0 * tol);
        }

        #[test]
        fn exact_zero_agrees_with_numeric(p in -64i64..64, q in 1i64..17) {
            let mu = ifs(4, &[0, 1, 4, 5]);
            let x = rat(p, q);
            let v = mu.invariant_ft(crate::exact::to_f64(&x), 1e-13).unwrap().norm();
            prop_assert_eq!(mu.is_exact_zero(&x), v < 1e-9);
        }
    }
}
