//! The affine group acting on (measure, spectrum) pairs: pushing a measure
//! forward by `x ↦ Vx + s` maps a spectrum `Λ` to `(V^T)^{-1} Λ`.

use num_traits::{One, Zero};

use super::GeneratedSpectrum;
use crate::error::{Error, Result};
use crate::exact::{int, Rational};
use crate::interval::QuasiLattice;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: Vec<Vec<Rational>>,
}

impl RationalMatrix {
    pub fn new(rows: Vec<Vec<Rational>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::pre("matrix must be square and nonempty"));
        }
        Ok(RationalMatrix { rows })
    }

    pub fn identity(n: usize) -> Self {
        RationalMatrix {
            rows: (0..n)
                .map(|i| (0..n).map(|j| if i == j { int(1) } else { int(0) }).collect())
                .collect(),
        }
    }

    pub fn scalar(v: Rational) -> Self {
        RationalMatrix { rows: vec![vec![v]] }
    }

    pub fn diagonal(d: &[Rational]) -> Self {
        let n = d.len();
        RationalMatrix {
            rows: (0..n)
                .map(|i| (0..n).map(|j| if i == j { d[i] } else { int(0) }).collect())
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        RationalMatrix {
            rows: (0..n).map(|i| (0..n).map(|j| self.rows[j][i]).collect()).collect(),
        }
    }

    pub fn mul(&self, other: &RationalMatrix) -> Result<Self> {
        let n = self.dim();
        if other.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: other.dim(),
            });
        }
        Ok(RationalMatrix {
            rows: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|k| self.rows[i][k] * other.rows[k][j]).sum())
                        .collect()
                })
                .collect(),
        })
    }

    pub fn apply(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: x.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Gauss-Jordan inverse over the rationals.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.dim();
        let mut m: Vec<Vec<Rational>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..n).map(|j| if i == j { int(1) } else { int(0) }));
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !m[r][col].is_zero()).ok_or(Error::Singular)?;
            m.swap(col, pivot);
            let pv = m[col][col];
            for x in m[col].iter_mut() {
                *x /= pv;
            }
            for r in 0..n {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col];
                    for c in 0..2 * n {
                        let t = m[col][c] * f;
                        m[r][c] -= t;
                    }
                }
            }
        }
        Ok(RationalMatrix {
            rows: m.into_iter().map(|r| r[n..].to_vec()).collect(),
        })
    }
}

/// `x ↦ Vx + s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AffineMap {
    pub linear: RationalMatrix,
    pub shift: Vec<Rational>,
}

impl AffineMap {
    pub fn new(linear: RationalMatrix, shift: Vec<Rational>) -> Result<Self> {
        if shift.len() != linear.dim() {
            return Err(Error::DimensionMismatch {
                expected: linear.dim(),
                found: shift.len(),
            });
        }
        Ok(AffineMap { linear, shift })
    }

    pub fn scalar(v: Rational, s: Rational) -> Self {
        AffineMap {
            linear: RationalMatrix::scalar(v),
            shift: vec![s],
        }
    }

    pub fn dim(&self) -> usize {
        self.linear.dim()
    }

    pub fn apply(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        let mut y = self.linear.apply(x)?;
        for (a, b) in y.iter_mut().zip(&self.shift) {
            *a += b;
        }
        Ok(y)
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> Result<AffineMap> {
        let linear = self.linear.mul(&inner.linear)?;
        let shift = self.apply(&inner.shift)?;
        AffineMap::new(linear, shift)
    }

    /// `(V^T)^{-1}`, the induced action on frequencies.
    pub fn dual(&self) -> Result<RationalMatrix> {
        self.linear.transpose().inverse()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MeasureDescriptor {
    /// Invariant measure of `x ↦ (x + b)/A` on the line, `b` rational.
    Ifs { scale: i64, digits: Vec<Rational> },
    /// Uniform measure on finitely many points of `R^d`.
    Atoms { points: Vec<Vec<Rational>> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SpectrumDescriptor {
    Finite(Vec<Vec<Rational>>),
    QuasiLattice(QuasiLattice),
    Generated(GeneratedSpectrum),
}

fn sorted(mut v: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    v.sort();
    v.dedup();
    v
}

/// Pushes the measure forward by `map` and transforms the spectrum by
/// `(V^T)^{-1}`.
pub fn affine_transform_pair(
    measure: &MeasureDescriptor,
    spectrum: &SpectrumDescriptor,
    map: &AffineMap,
) -> Result<(MeasureDescriptor, SpectrumDescriptor)> {
    let dual = map.dual()?;
    let d = map.dim();
    let need_1d = || -> Result<Rational> {
        if d != 1 {
            return Err(Error::DimensionMismatch { expected: 1, found: d });
        }
        Ok(map.linear.rows()[0][0])
    };
    let new_measure = match measure {
        MeasureDescriptor::Ifs { scale, digits } => {
            let v = need_1d()?;
            let s = map.shift[0];
            let mut new_digits: Vec<Rational> = digits
                .iter()
                .map(|b| v * b + s * (*scale - 1))
                .collect();
            new_digits.sort();
            MeasureDescriptor::Ifs {
                scale: *scale,
                digits: new_digits,
            }
        }
        MeasureDescriptor::Atoms { points } => MeasureDescriptor::Atoms {
            points: sorted(points.iter().map(|p| map.apply(p)).collect::<Result<_>>()?),
        },
    };
    let new_spectrum = match spectrum {
        SpectrumDescriptor::Finite(pts) => SpectrumDescriptor::Finite(sorted(
            pts.iter().map(|p| dual.apply(p)).collect::<Result<_>>()?,
        )),
        SpectrumDescriptor::QuasiLattice(q) => {
            let v = need_1d()?;
            SpectrumDescriptor::QuasiLattice(q.scaled(&(Rational::one() / v))?)
        }
        SpectrumDescriptor::Generated(g) => {
            let v = need_1d()?;
            let dil = g.dilation() / v;
            SpectrumDescriptor::Generated(g.clone().with_dilation(dil)?)
        }
    };
    Ok((new_measure, new_spectrum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, IntegerSet};
    use crate::ifs::{cycle_spectrum, AffineIfs};
    use proptest::prelude::*;

    #[test]
    fn inverse_and_singular() {
        let m = RationalMatrix::new(vec![vec![int(2), int(1)], vec![int(1), int(1)]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv).unwrap(), RationalMatrix::identity(2));
        let s = RationalMatrix::new(vec![vec![int(1), int(2)], vec![int(2), int(4)]]).unwrap();
        assert_eq!(s.inverse(), Err(Error::Singular));
    }

    #[test]
    fn digit_scaling_scales_spectrum() {
        let mu1 = AffineIfs::new(4, IntegerSet::new([0, 1])).unwrap();
        let lam1 = cycle_spectrum(&mu1, &IntegerSet::new([0, 2])).unwrap();
        let m = MeasureDescriptor::Ifs {
            scale: 4,
            digits: vec![int(0), int(1)],
        };
        let (m2, s2) = affine_transform_pair(
            &m,
            &SpectrumDescriptor::Generated(lam1.clone()),
            &AffineMap::scalar(int(2), int(0)),
        )
        .unwrap();
        assert_eq!(
            m2,
            MeasureDescriptor::Ifs {
                scale: 4,
                digits: vec![int(0), int(2)]
            }
        );
        let SpectrumDescriptor::Generated(g) = s2 else {
            panic!("expected generated spectrum")
        };
        let lam = g.elements_within(20.0);
        let doubled: Vec<Rational> = lam.iter().map(|x| x * 2).collect();
        assert_eq!(doubled, lam1.elements_within(40.0));
    }

    #[test]
    fn translation_keeps_spectrum() {
        let q = QuasiLattice::new(vec![int(0), rat(1, 4)], int(1)).unwrap();
        let m = MeasureDescriptor::Ifs {
            scale: 4,
            digits: vec![int(0), int(1), int(8), int(9)],
        };
        let (m2, s2) = affine_transform_pair(
            &m,
            &SpectrumDescriptor::QuasiLattice(q.clone()),
            &AffineMap::scalar(int(1), rat(5, 2)),
        )
        .unwrap();
        assert_eq!(s2, SpectrumDescriptor::QuasiLattice(q));
        let MeasureDescriptor::Ifs { digits, .. } = m2 else {
            panic!("expected IFS")
        };
        assert_eq!(digits[0], rat(15, 2));
    }

    fn small_rat() -> impl Strategy<Value = Rational> {
        (-6i64..7, 1i64..4).prop_map(|(p, q)| rat(p, q))
    }

    fn nonzero_rat() -> impl Strategy<Value = Rational> {
        small_rat().prop_filter("nonzero", |r| !r.is_zero())
    }

    fn map2() -> impl Strategy<Value = AffineMap> {
        (prop::collection::vec(small_rat(), 4), prop::collection::vec(small_rat(), 2))
            .prop_filter_map("invertible", |(v, s)| {
                let m = RationalMatrix::new(vec![vec![v[0], v[1]], vec![v[2], v[3]]]).ok()?;
                m.inverse().ok()?;
                AffineMap::new(m, s).ok()
            })
    }

    proptest! {
        #[test]
        fn group_law_on_atoms(f in map2(), g in map2(), pts in prop::collection::vec(prop::collection::vec(small_rat(), 2), 1..5)) {
            let measure = MeasureDescriptor::Atoms { points: pts.clone() };
            let spec = SpectrumDescriptor::Finite(pts);
            let (m1, s1) = affine_transform_pair(&measure, &spec, &f).unwrap();
            let (m12, s12) = affine_transform_pair(&m1, &s1, &g).unwrap();
            let gf = g.compose(&f).unwrap();
            let (m_direct, s_direct) = affine_transform_pair(&measure, &spec, &gf).unwrap();
            prop_assert_eq!(m12, m_direct);
            prop_assert_eq!(s12, s_direct);
        }

        #[test]
        fn group_law_on_ifs(v1 in nonzero_rat(), s1 in small_rat(), v2 in nonzero_rat(), s2 in small_rat()) {
            let measure = MeasureDescriptor::Ifs { scale: 4, digits: vec![int(0), int(2)] };
            let lam = cycle_spectrum(&AffineIfs::new(4, IntegerSet::new([0, 2])).unwrap(), &IntegerSet::new([0, 1])).unwrap();
            let spec = SpectrumDescriptor::Generated(lam);
            let f = AffineMap::scalar(v1, s1);
            let g = AffineMap::scalar(v2, s2);
            let (m1, sp1) = affine_transform_pair(&measure, &spec, &f).unwrap();
            let (m12, sp12) = affine_transform_pair(&m1, &sp1, &g).unwrap();
            let (md, spd) = affine_transform_pair(&measure, &spec, &g.compose(&f).unwrap()).unwrap();
            prop_assert_eq!(m12, md);
            prop_assert_eq!(sp12, spd);
        }
    }
}
