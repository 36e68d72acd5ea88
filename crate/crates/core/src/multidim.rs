//! Spectral sets in `R^d` built from grid cells: product and slice spectra,
//! translation tilings, bounded lattice searches and folding modulo `Z^2`.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{frac, int, rat, rational_gcd, to_f64, unit_phase, IntegerSet, Rational};
use crate::ifs::SpectrumDescriptor;
use crate::interval::{spectra_of_interval_union, unit_interval_ft, QuasiLattice};
use crate::validation::{FourierMeasure, ParsevalReport, SpectrumSource};

/// Upper bound on fine grid cells in exact tiling checks.
pub const MAX_GRID_CELLS: usize = 50_000_000;

/// Union of grid cells `cell_size ∘ (c + [0, 1]^d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BoxUnionRegion {
    cell_size: Vec<Rational>,
    cells: Vec<Vec<i64>>,
}

impl BoxUnionRegion {
    pub fn new(cell_size: Vec<Rational>, cells: Vec<Vec<i64>>) -> Result<Self> {
        let d = cell_size.len();
        if d == 0 {
            return Err(Error::pre("dimension must be positive"));
        }
        if cell_size.iter().any(|s| !s.is_positive()) {
            return Err(Error::pre("cell sizes must be positive"));
        }
        if cells.is_empty() {
            return Err(Error::EmptySet);
        }
        if let Some(c) = cells.iter().find(|c| c.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: c.len(),
            });
        }
        let mut cells = cells;
        cells.sort();
        let n = cells.len();
        cells.dedup();
        if cells.len() != n {
            return Err(Error::pre("cells must be distinct"));
        }
        Ok(BoxUnionRegion { cell_size, cells })
    }

    /// Union of unit cubes `[0, 1]^d + o`, each split into cells.
    pub fn from_unit_cubes(cell_size: Vec<Rational>, offsets: &[Vec<Rational>]) -> Result<Self> {
        let d = cell_size.len();
        let per_axis: Vec<i64> = cell_size
            .iter()
            .map(|s| {
                let k = s.recip();
                if k.is_integer() && k.is_positive() {
                    Ok(k.to_integer())
                } else {
                    Err(Error::Incommensurate(format!("1/{s} is not a positive integer")))
                }
            })
            .collect::<Result<_>>()?;
        let mut cells = Vec::new();
        for o in offsets {
            if o.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: o.len(),
                });
            }
            let base: Vec<i64> = o
                .iter()
                .zip(&cell_size)
                .map(|(x, s)| {
                    let q = x / s;
                    if q.is_integer() {
                        Ok(q.to_integer())
                    } else {
                        Err(Error::Incommensurate(format!("offset {x} is off the grid {s}")))
                    }
                })
                .collect::<Result<_>>()?;
            let mut idx = vec![0i64; d];
            loop {
                cells.push(base.iter().zip(&idx).map(|(b, i)| b + i).collect());
                let mut axis = 0;
                while axis < d {
                    idx[axis] += 1;
                    if idx[axis] < per_axis[axis] {
                        break;
                    }
                    idx[axis] = 0;
                    axis += 1;
                }
                if axis == d {
                    break;
                }
            }
        }
        Self::new(cell_size, cells)
    }

    pub fn unit_cube(d: usize) -> Self {
        Self::new(vec![int(1); d], vec![vec![0; d]]).expect("one cell")
    }

    pub fn dimension(&self) -> usize {
        self.cell_size.len()
    }

    pub fn cell_size(&self) -> &[Rational] {
        &self.cell_size
    }

    pub fn cells(&self) -> &[Vec<i64>] {
        &self.cells
    }

    pub fn volume(&self) -> Rational {
        self.cell_size.iter().fold(int(self.cells.len() as i64), |v, s| v * s)
    }

    /// Twelve unit cubes climbing in steps of `1/3` around a `3 × 2`
    /// footprint.
    pub fn staircase() -> Self {
        const XY: [(i64, i64); 6] = [(0, 0), (1, 0), (2, 0), (2, 1), (1, 1), (0, 1)];
        let offsets: Vec<Vec<Rational>> = (0..12)
            .map(|i| {
                let (x, y) = XY[i % 6];
                vec![int(x), int(y), rat(i as i64, 3)]
            })
            .collect();
        Self::from_unit_cubes(vec![int(1), int(1), rat(1, 3)], &offsets).expect("grid-aligned cubes")
    }

    /// Region cut at `axis = coordinate`, as a region in the remaining axes.
    pub fn slice(&self, axis: usize, coordinate: i64) -> Option<BoxUnionRegion> {
        let cells: Vec<Vec<i64>> = self
            .cells
            .iter()
            .filter(|c| c[axis] == coordinate)
            .map(|c| drop_axis(c, axis))
            .collect();
        if cells.is_empty() || self.dimension() == 1 {
            return None;
        }
        Self::new(drop_axis(&self.cell_size, axis), cells).ok()
    }

    /// Cell coordinates occupied along `axis`.
    pub fn projection(&self, axis: usize) -> IntegerSet {
        self.cells.iter().map(|c| c[axis]).collect()
    }
}

fn drop_axis<T: Clone>(v: &[T], axis: usize) -> Vec<T> {
    v.iter()
        .enumerate()
        .filter(|&(i, _)| i != axis)
        .map(|(_, x)| x.clone())
        .collect()
}

/// Normalized Fourier transform of Lebesgue measure on the region.
pub fn region_ft(region: &BoxUnionRegion, xi: &[f64]) -> Result<Complex64> {
    let d = region.dimension();
    if xi.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: xi.len(),
        });
    }
    let t: Vec<f64> = xi
        .iter()
        .zip(&region.cell_size)
        .map(|(x, s)| x * to_f64(s))
        .collect();
    let interval: Complex64 = t.iter().map(|&ti| unit_interval_ft(ti)).product();
    let mask: Complex64 = region
        .cells
        .iter()
        .map(|c| unit_phase(c.iter().zip(&t).map(|(&ci, ti)| ci as f64 * ti).sum()))
        .sum();
    Ok(interval * mask / region.cells.len() as f64)
}

impl FourierMeasure for BoxUnionRegion {
    fn dimension(&self) -> usize {
        BoxUnionRegion::dimension(self)
    }

    fn fourier(&self, x: &[f64]) -> Result<Complex64> {
        region_ft(self, x)
    }
}

/// `Λ₁ × Λ₂ × …` with one-dimensional factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductSpectrum {
    factors: Vec<SpectrumDescriptor>,
}

fn descriptor_points(f: &SpectrumDescriptor, radius: f64) -> Vec<Rational> {
    match f {
        SpectrumDescriptor::Finite(pts) => pts
            .iter()
            .map(|p| p[0])
            .filter(|p| to_f64(p).abs() < radius)
            .collect(),
        SpectrumDescriptor::QuasiLattice(q) => q.points_within(radius),
        SpectrumDescriptor::Generated(g) => g.elements_within(radius),
    }
}

pub fn product_spectrum(factors: Vec<SpectrumDescriptor>) -> Result<ProductSpectrum> {
    if factors.is_empty() {
        return Err(Error::EmptySet);
    }
    for f in &factors {
        if let SpectrumDescriptor::Finite(pts) = f {
            if pts.is_empty() {
                return Err(Error::EmptySet);
            }
            if let Some(p) = pts.iter().find(|p| p.len() != 1) {
                return Err(Error::DimensionMismatch {
                    expected: 1,
                    found: p.len(),
                });
            }
        }
    }
    Ok(ProductSpectrum { factors })
}

impl ProductSpectrum {
    pub fn factors(&self) -> &[SpectrumDescriptor] {
        &self.factors
    }

    pub fn dimension(&self) -> usize {
        self.factors.len()
    }

    /// Per-axis points with absolute value below `radius`.
    pub fn axis_points(&self, radius: f64) -> Vec<Vec<Rational>> {
        self.factors.iter().map(|f| descriptor_points(f, radius)).collect()
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        x.len() == self.factors.len()
            && self.factors.iter().zip(x).all(|(f, xi)| match f {
                SpectrumDescriptor::Finite(pts) => pts.iter().any(|p| &p[0] == xi),
                SpectrumDescriptor::QuasiLattice(q) => q.contains(xi),
                SpectrumDescriptor::Generated(g) => g
                    .elements_within(to_f64(xi).abs() + 1.0)
                    .contains(xi),
            })
    }
}

impl SpectrumSource for ProductSpectrum {
    fn dimension(&self) -> usize {
        self.factors.len()
    }

    fn points_within(&self, radius: f64) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .axis_points(radius)
            .iter()
            .map(|a| a.iter().map(to_f64).collect())
            .collect();
        let mut out = vec![Vec::new()];
        for axis in &axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

/// Preferred spectrum of `A + [0, 1]`: the lexicographically smallest
/// canonical finite part.
fn interval_union_spectrum(a: &IntegerSet) -> Result<QuasiLattice> {
    let min = a.min().ok_or(Error::EmptySet)?;
    let normalized = a.shifted(-min);
    spectra_of_interval_union(&normalized, None)?
        .into_iter()
        .min_by(|x, y| x.finite_part().cmp(y.finite_part()).then(y.period().cmp(&x.period())))
        .ok_or_else(|| Error::Unsupported(format!("{normalized} + [0, 1] has no spectrum in the search space")))
}

/// Product spectrum obtained by slicing along `order`: the projection on
/// the first axis must be spectral and every slice must carry the same
/// spectrum and the same measure.
pub fn slice_spectrum(region: &BoxUnionRegion, order: &[usize]) -> Result<ProductSpectrum> {
    let d = region.dimension();
    let mut seen: Vec<usize> = order.to_vec();
    seen.sort();
    if seen != (0..d).collect::<Vec<_>>() {
        return Err(Error::pre(format!("{order:?} is not an ordering of the {d} axes")));
    }
    let axes = slice_axes(region, order)?;
    let mut factors = vec![None; d];
    for (axis, q) in order.iter().zip(axes) {
        factors[*axis] = Some(SpectrumDescriptor::QuasiLattice(q));
    }
    product_spectrum(factors.into_iter().map(|f| f.expect("every axis visited")).collect())
}

fn slice_axes(region: &BoxUnionRegion, order: &[usize]) -> Result<Vec<QuasiLattice>> {
    let axis = order[0];
    let proj = region.projection(axis);
    let s = region.cell_size[axis];
    let first = interval_union_spectrum(&proj)?.scaled(&s.recip())?;
    if order.len() == 1 {
        return Ok(vec![first]);
    }
    let rest: Vec<usize> = order[1..]
        .iter()
        .map(|&a| if a > axis { a - 1 } else { a })
        .collect();
    let mut common: Option<(usize, Vec<QuasiLattice>)> = None;
    for c in proj.iter() {
        let slice = region.slice(axis, c).expect("projection point has cells");
        let spectra = slice_axes(&slice, &rest)?;
        let size = slice.cells().len();
        match &common {
            None => common = Some((size, spectra)),
            Some((n, s)) if *n == size && *s == spectra => {}
            Some(_) => {
                return Err(Error::NonConstantSlices(format!(
                    "slice at cell {c} of axis {axis} differs in measure or spectrum"
                )))
            }
        }
    }
    let (_, tail) = common.expect("nonempty projection");
    Ok(std::iter::once(first).chain(tail).collect())
}

/// Exact Parseval sums for a cell region against a product spectrum.
/// Frequencies are grouped by `λ_i s_i mod 1`, on which the cell mask
/// depends, so the sum factors axis by axis inside each group.
pub fn product_parseval_scan(
    region: &BoxUnionRegion,
    spectrum: &ProductSpectrum,
    xs: &[Vec<f64>],
    radius: f64,
    tol: f64,
) -> Result<ParsevalReport> {
    let d = region.dimension();
    if spectrum.dimension() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: spectrum.dimension(),
        });
    }
    if !(radius > 0.0) {
        return Err(Error::pre("radius must be positive"));
    }
    crate::ifs::check_tol(tol)?;
    let axis_points = spectrum.axis_points(radius);
    let groups: Vec<Vec<(Rational, Vec<f64>)>> = axis_points
        .iter()
        .zip(&region.cell_size)
        .map(|(pts, s)| {
            let mut g: BTreeMap<Rational, Vec<f64>> = BTreeMap::new();
            for p in pts {
                g.entry(frac(&(p * s))).or_default().push(to_f64(p));
            }
            g.into_iter().collect()
        })
        .collect();
    let size: usize = axis_points.iter().map(Vec::len).product();
    let sums = xs
        .par_iter()
        .map(|x| {
            if x.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: x.len(),
                });
            }
            let axis_sums: Vec<Vec<f64>> = groups
                .iter()
                .zip(&region.cell_size)
                .zip(x)
                .map(|((g, s), xi)| {
                    let s = to_f64(s);
                    g.iter()
                        .map(|(_, ls)| ls.iter().map(|l| unit_interval_ft(s * (xi + l)).norm_sqr()).sum())
                        .collect()
                })
                .collect();
            let mut total = 0.0;
            let mut idx = vec![0usize; d];
            loop {
                let weight: f64 = (0..d).map(|i| axis_sums[i][idx[i]]).product();
                if weight > 0.0 {
                    let mask: Complex64 = region
                        .cells
                        .iter()
                        .map(|c| {
                            let phase: f64 = (0..d)
                                .map(|i| {
                                    let key = to_f64(&groups[i][idx[i]].0);
                                    c[i] as f64 * (x[i] * to_f64(&region.cell_size[i]) + key)
                                })
                                .sum();
                            unit_phase(phase)
                        })
                        .sum();
                    total += weight * (mask / region.cells.len() as f64).norm_sqr();
                }
                let mut axis = 0;
                while axis < d {
                    idx[axis] += 1;
                    if idx[axis] < groups[axis].len() {
                        break;
                    }
                    idx[axis] = 0;
                    axis += 1;
                }
                if axis == d {
                    break;
                }
            }
            Ok(total)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ParsevalReport::from_sums(xs.to_vec(), radius, size, sums, tol))
}

/// `L + F`: a full-rank lattice with rows as generators plus finitely many
/// offsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicSet {
    pub basis: Vec<Vec<Rational>>,
    pub offsets: Vec<Vec<Rational>>,
}

impl PeriodicSet {
    pub fn lattice(basis: Vec<Vec<Rational>>) -> Self {
        let d = basis.len();
        PeriodicSet {
            basis,
            offsets: vec![vec![Rational::zero(); d]],
        }
    }

    pub fn diagonal(periods: &[Rational], offsets: Vec<Vec<Rational>>) -> Self {
        let d = periods.len();
        let basis = (0..d)
            .map(|i| (0..d).map(|j| if i == j { periods[i] } else { Rational::zero() }).collect())
            .collect();
        PeriodicSet { basis, offsets }
    }
}

/// Lower triangular Hermite normal form of a full-rank integer basis:
/// row `k` is supported on columns `0..=k`, the diagonal is positive and
/// `0 ≤ h[k][j] < h[j][j]` for `j < k`.
pub fn hermite_normal_form(basis: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let d = basis.len();
    if basis.iter().any(|r| r.len() != d) {
        return Err(Error::pre("basis must be square"));
    }
    let mut m: Vec<Vec<i128>> = basis.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    for col in (0..d).rev() {
        // Clear column `col` in rows 0..col using row `col` as pivot.
        for row in 0..col {
            while m[row][col] != 0 {
                if m[col][col] == 0 || m[row][col].abs() < m[col][col].abs() {
                    m.swap(row, col);
                    continue;
                }
                let q = Integer::div_floor(&m[row][col], &m[col][col]);
                for j in 0..d {
                    m[row][j] -= q * m[col][j];
                }
            }
        }
        if m[col][col] == 0 {
            return Err(Error::Singular);
        }
        if m[col][col] < 0 {
            m[col].iter_mut().for_each(|x| *x = -*x);
        }
    }
    for k in 0..d {
        for j in (0..k).rev() {
            let q = Integer::div_floor(&m[k][j], &m[j][j]);
            for t in 0..=j {
                m[k][t] -= q * m[j][t];
            }
        }
    }
    m.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| i64::try_from(x).map_err(|_| Error::Internal("basis entry overflow".into())))
                .collect()
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TilingCheck {
    pub tiles: bool,
    /// Fine grid step on each axis.
    pub grid: Vec<Rational>,
    pub min_count: u32,
    pub max_count: u32,
    pub box_volume: Rational,
    pub covered_volume: Rational,
}

fn grid_step(values: impl IntoIterator<Item = Rational>) -> Rational {
    values.into_iter().fold(Rational::zero(), |g, v| rational_gcd(&g, &v))
}

fn on_grid(x: &Rational, step: &Rational) -> Result<i64> {
    let q = x / step;
    if q.is_integer() {
        Ok(q.to_integer())
    } else {
        Err(Error::Incommensurate(format!("{x} is off the grid {step}")))
    }
}

/// Exact cell count of `region + translations` folded into the fundamental
/// box `[0, b_1) × … × [0, b_d)` of the lattice part.
pub fn check_translation_tiling(
    region: &BoxUnionRegion,
    translations: &PeriodicSet,
    fundamental_box: &[Rational],
) -> Result<TilingCheck> {
    let d = region.dimension();
    if translations.basis.len() != d || fundamental_box.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: translations.basis.len(),
        });
    }
    if translations.offsets.is_empty() {
        return Err(Error::EmptySet);
    }
    if let Some(r) = translations
        .basis
        .iter()
        .chain(&translations.offsets)
        .find(|r| r.len() != d)
    {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: r.len(),
        });
    }
    let grid: Vec<Rational> = (0..d)
        .map(|i| {
            grid_step(
                std::iter::once(region.cell_size[i])
                    .chain(translations.basis.iter().map(|r| r[i]))
                    .chain(translations.offsets.iter().map(|r| r[i])),
            )
        })
        .collect();
    let int_basis: Vec<Vec<i64>> = translations
        .basis
        .iter()
        .map(|r| r.iter().zip(&grid).map(|(x, g)| on_grid(x, g)).collect())
        .collect::<Result<_>>()?;
    let hnf = hermite_normal_form(&int_basis)?;
    let dims: Vec<i64> = (0..d).map(|i| hnf[i][i]).collect();
    for i in 0..d {
        if grid[i] * dims[i] != fundamental_box[i] {
            return Err(Error::pre(format!(
                "fundamental box side {} on axis {i} differs from the lattice period {}",
                fundamental_box[i],
                grid[i] * dims[i]
            )));
        }
    }
    let total: usize = dims.iter().map(|&x| x as usize).product();
    let per_cell: Vec<i64> = (0..d).map(|i| on_grid(&region.cell_size[i], &grid[i])).collect::<Result<_>>()?;
    let sub: usize = per_cell.iter().map(|&x| x as usize).product();
    if total > MAX_GRID_CELLS || sub.saturating_mul(region.cells.len()) > MAX_GRID_CELLS {
        return Err(Error::Incommensurate(format!("fine grid {grid:?} is too large")));
    }
    let offsets: Vec<Vec<i64>> = translations
        .offsets
        .iter()
        .map(|r| r.iter().zip(&grid).map(|(x, g)| on_grid(x, g)).collect())
        .collect::<Result<_>>()?;
    let mut counts = vec![0u32; total];
    let mut point = vec![0i64; d];
    for cell in &region.cells {
        let mut idx = vec![0i64; d];
        loop {
            for t in &offsets {
                for i in 0..d {
                    point[i] = cell[i] * per_cell[i] + idx[i] + t[i];
                }
                for k in (0..d).rev() {
                    let q = Integer::div_floor(&point[k], &dims[k]);
                    for j in 0..=k {
                        point[j] -= q * hnf[k][j];
                    }
                }
                let flat = (0..d).rev().fold(0usize, |acc, i| acc * dims[i] as usize + point[i] as usize);
                counts[flat] += 1;
            }
            let mut axis = 0;
            while axis < d {
                idx[axis] += 1;
                if idx[axis] < per_cell[axis] {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
            if axis == d {
                break;
            }
        }
    }
    let min_count = counts.iter().copied().min().unwrap_or(0);
    let max_count = counts.iter().copied().max().unwrap_or(0);
    let box_volume = fundamental_box.iter().fold(Rational::one(), |v, b| v * b);
    Ok(TilingCheck {
        tiles: min_count == 1 && max_count == 1,
        grid,
        min_count,
        max_count,
        box_volume,
        covered_volume: region.volume() * int(offsets.len() as i64),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSearch {
    /// Tiling lattices, each as HNF rows.
    pub lattices: Vec<Vec<Vec<Rational>>>,
    pub candidates: usize,
    pub bound: Rational,
    pub grid: Vec<Rational>,
    pub covolume: Rational,
}

/// All lattices of covolume `vol(region)` with HNF rows on the cell grid
/// and entries at most `basis_bound` that tile by translation. A bounded
/// search: an empty result refutes only this search space.
pub fn lattice_tiling_search(region: &BoxUnionRegion, basis_bound: &Rational) -> Result<LatticeSearch> {
    let d = region.dimension();
    let grid = region.cell_size.clone();
    let covolume = region.volume();
    let fine_vol = covolume / grid.iter().fold(Rational::one(), |v, g| v * g);
    if !fine_vol.is_integer() {
        return Err(Error::Internal("cell volume is not an integer number of cells".into()));
    }
    let n = fine_vol.to_integer();
    let max_diag: Vec<i64> = grid.iter().map(|g| (basis_bound / g).floor().to_integer()).collect();
    let mut diagonals = Vec::new();
    diag_products(n, &max_diag, &mut Vec::new(), &mut diagonals);
    let mut candidates = Vec::new();
    for diag in &diagonals {
        let free: Vec<(usize, usize)> = (0..d).flat_map(|k| (0..k).map(move |j| (k, j))).collect();
        let mut choice = vec![0i64; free.len()];
        loop {
            let mut m: Vec<Vec<i64>> = (0..d).map(|k| (0..d).map(|j| if j == k { diag[k] } else { 0 }).collect()).collect();
            for (&(k, j), &v) in free.iter().zip(&choice) {
                m[k][j] = v;
            }
            candidates.push(m);
            let mut t = 0;
            while t < free.len() {
                choice[t] += 1;
                if choice[t] < diag[free[t].1] {
                    break;
                }
                choice[t] = 0;
                t += 1;
            }
            if t == free.len() {
                break;
            }
        }
    }
    let to_rational = |m: &Vec<Vec<i64>>| -> Vec<Vec<Rational>> {
        m.iter()
            .map(|r| r.iter().zip(&grid).map(|(&x, g)| g * x).collect())
            .collect()
    };
    let results: Vec<Option<Vec<Vec<Rational>>>> = candidates
        .par_iter()
        .map(|m| {
            let basis = to_rational(m);
            let fbox: Vec<Rational> = (0..d).map(|i| basis[i][i]).collect();
            let check = check_translation_tiling(region, &PeriodicSet::lattice(basis.clone()), &fbox)?;
            Ok(check.tiles.then_some(basis))
        })
        .collect::<Result<_>>()?;
    Ok(LatticeSearch {
        lattices: results.into_iter().flatten().collect(),
        candidates: candidates.len(),
        bound: *basis_bound,
        grid,
        covolume,
    })
}

fn diag_products(n: i64, max: &[i64], prefix: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
    let k = prefix.len();
    if k + 1 == max.len() {
        if n >= 1 && n <= max[k] {
            let mut v = prefix.clone();
            v.push(n);
            out.push(v);
        }
        return;
    }
    for f in 1..=max[k].min(n) {
        if n % f == 0 {
            prefix.push(f);
            diag_products(n / f, max, prefix, out);
            prefix.pop();
        }
    }
}

pub type Point2 = [Rational; 2];

/// Closed triangle with rational vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Triangle(pub [Point2; 3]);

impl Triangle {
    pub fn translated(&self, v: &Point2) -> Triangle {
        Triangle(self.0.clone().map(|p| [p[0] + v[0], p[1] + v[1]]))
    }

    pub fn area(&self) -> Rational {
        polygon_area(&self.0)
    }
}

fn polygon_area(poly: &[Point2]) -> Rational {
    let n = poly.len();
    let twice: Rational = (0..n)
        .map(|i| {
            let (p, q) = (&poly[i], &poly[(i + 1) % n]);
            p[0] * q[1] - q[0] * p[1]
        })
        .sum();
    (twice / 2).abs()
}

/// Clips a convex polygon to `axis·sign ≤ bound·sign`.
fn clip(poly: Vec<Point2>, axis: usize, bound: Rational, keep_below: bool) -> Vec<Point2> {
    let inside = |p: &Point2| if keep_below { p[axis] <= bound } else { p[axis] >= bound };
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    for i in 0..n {
        let (p, q) = (&poly[i], &poly[(i + 1) % n]);
        let (pi, qi) = (inside(p), inside(q));
        if pi {
            out.push(p.clone());
        }
        if pi != qi {
            let t = (bound - p[axis]) / (q[axis] - p[axis]);
            out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoldReport {
    pub resolution: i64,
    /// Folded mass of each cell of `[0, 1)^2` as a multiple of the cell area.
    pub min_mass: Rational,
    pub max_mass: Rational,
    pub congruent: bool,
}

/// Folds the triangles into `[0, 1)^2` modulo `Z^2` on a grid of step
/// `1/resolution` and compares each cell mass with the cell area exactly.
pub fn fold_modulo_z2(triangles: &[Triangle], resolution: i64) -> Result<FoldReport> {
    if resolution < 1 {
        return Err(Error::pre("resolution must be positive"));
    }
    let n = resolution;
    let h = rat(1, n);
    let mut mass = vec![Rational::zero(); (n * n) as usize];
    for t in triangles {
        let cell = |v: Rational| v / h;
        let x0 = t.0.iter().map(|p| cell(p[0])).min().unwrap().floor().to_integer();
        let x1 = t.0.iter().map(|p| cell(p[0])).max().unwrap().ceil().to_integer();
        let y0 = t.0.iter().map(|p| cell(p[1])).min().unwrap().floor().to_integer();
        let y1 = t.0.iter().map(|p| cell(p[1])).max().unwrap().ceil().to_integer();
        for i in x0..x1 {
            let strip = clip(clip(t.0.to_vec(), 0, h * i, false), 0, h * (i + 1), true);
            if strip.len() < 3 {
                continue;
            }
            for j in y0..y1 {
                let piece = clip(clip(strip.clone(), 1, h * j, false), 1, h * (j + 1), true);
                if piece.len() < 3 {
                    continue;
                }
                let a = polygon_area(&piece);
                if !a.is_zero() {
                    let idx = (i.rem_euclid(n) * n + j.rem_euclid(n)) as usize;
                    mass[idx] += a * n * n;
                }
            }
        }
    }
    let min_mass = mass.iter().min().copied().unwrap_or_default();
    let max_mass = mass.iter().max().copied().unwrap_or_default();
    Ok(FoldReport {
        resolution,
        min_mass,
        max_mass,
        congruent: min_mass == Rational::one() && max_mass == Rational::one(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RearrangedCube {
    pub p: i64,
    /// The triangle over the diagonal and the shifted one under it.
    pub upper: Triangle,
    pub lower: Triangle,
    pub fold: FoldReport,
    pub upper_fold: FoldReport,
    pub lower_fold: FoldReport,
}

pub const FOLD_RESOLUTION: i64 = 64;

/// The unit square cut along its diagonal with the lower half moved by
/// `(p, 0)`; congruence modulo `Z^2` to the square gives the spectrum `Z^2`.
pub fn rearranged_cube(p: i64) -> Result<RearrangedCube> {
    if p == 0 {
        return Err(Error::pre("p must be nonzero"));
    }
    let pt = |x: i64, y: i64| [int(x), int(y)];
    let upper = Triangle([pt(0, 0), pt(1, 1), pt(0, 1)]);
    let lower = Triangle([pt(0, 0), pt(1, 0), pt(1, 1)]).translated(&pt(p, 0));
    Ok(RearrangedCube {
        p,
        fold: fold_modulo_z2(&[upper.clone(), lower.clone()], FOLD_RESOLUTION)?,
        upper_fold: fold_modulo_z2(std::slice::from_ref(&upper), FOLD_RESOLUTION)?,
        lower_fold: fold_modulo_z2(std::slice::from_ref(&lower), FOLD_RESOLUTION)?,
        upper,
        lower,
    })
}

/// Sorted distinct translation vectors of a periodic set inside a box.
pub fn translations_within(set: &PeriodicSet, radius: &Rational) -> Vec<Vec<Rational>> {
    let d = set.basis.len();
    let r = to_f64(radius);
    let kmax = set
        .basis
        .iter()
        .flatten()
        .filter(|x| !x.is_zero())
        .map(|x| (r / to_f64(x).abs()).ceil() as i64 + 1)
        .max()
        .unwrap_or(1);
    let mut out = BTreeSet::new();
    let mut coef = vec![-kmax; d];
    loop {
        for o in &set.offsets {
            let v: Vec<Rational> = (0..d)
                .map(|j| o[j] + (0..d).map(|k| set.basis[k][j] * coef[k]).sum::<Rational>())
                .collect();
            if v.iter().all(|x| x.abs() <= *radius) {
                out.insert(v);
            }
        }
        let mut t = 0;
        while t < d {
            coef[t] += 1;
            if coef[t] <= kmax {
                break;
            }
            coef[t] = -kmax;
            t += 1;
        }
        if t == d {
            break;
        }
    }
    out.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validation::{parseval_scan, sample_grid};

    fn ql(f: &[Rational], p: Rational) -> SpectrumDescriptor {
        SpectrumDescriptor::QuasiLattice(QuasiLattice::new(f.to_vec(), p).unwrap())
    }

    fn staircase_spectrum() -> ProductSpectrum {
        product_spectrum(vec![
            ql(&[int(0)], rat(1, 3)),
            ql(&[int(0)], rat(1, 2)),
            ql(&[int(0), rat(1, 4)], int(1)),
        ])
        .unwrap()
    }

    #[test]
    fn staircase_shape() {
        let s = BoxUnionRegion::staircase();
        assert_eq!(s.cells().len(), 36);
        assert_eq!(s.volume(), int(12));
        assert_eq!(s.cell_size(), &[int(1), int(1), rat(1, 3)]);
        assert!(s.cells().contains(&vec![2, 1, 3]) && s.cells().contains(&vec![0, 1, 13]));
    }

    #[test]
    fn region_ft_values() {
        let cube = BoxUnionRegion::unit_cube(3);
        assert!(region_ft(&cube, &[1.0, 0.0, 0.0]).unwrap().norm() < 1e-15);
        let s = BoxUnionRegion::staircase();
        assert!((region_ft(&s, &[0.0; 3]).unwrap() - 1.0).norm() < 1e-15);
        let pts = staircase_spectrum().points_within(1.6);
        for a in &pts {
            for b in &pts {
                if a != b {
                    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                    assert!(region_ft(&s, &d).unwrap().norm() < 1e-10, "{d:?}");
                }
            }
        }
    }

    #[test]
    fn product_region_factors() {
        let r = BoxUnionRegion::new(vec![int(1), rat(1, 2)], vec![vec![0, 0], vec![0, 4], vec![2, 0], vec![2, 4]]).unwrap();
        for xi in [[0.3, -1.7], [2.25, 0.4], [-0.9, 3.3]] {
            let joint = region_ft(&r, &xi).unwrap();
            let f1 = crate::interval::interval_union_ft(&IntegerSet::from([0, 2]), xi[0]);
            let f2 = crate::interval::interval_union_ft(&IntegerSet::from([0, 4]), xi[1] / 2.0);
            assert!((joint - f1 * f2).norm() < 1e-12);
        }
    }

    #[test]
    fn slice_spectra() {
        let sq = BoxUnionRegion::unit_cube(2);
        let z = ql(&[int(0)], int(1));
        assert_eq!(slice_spectrum(&sq, &[0, 1]).unwrap(), product_spectrum(vec![z.clone(), z]).unwrap());
        let s = BoxUnionRegion::staircase();
        assert_eq!(slice_spectrum(&s, &[1, 0, 2]).unwrap(), staircase_spectrum());
        let sy = s.slice(1, 0).unwrap();
        let expect = product_spectrum(vec![ql(&[int(0)], rat(1, 3)), ql(&[int(0), rat(1, 4)], int(1))]).unwrap();
        assert_eq!(slice_spectrum(&sy, &[0, 1]).unwrap(), expect);
        let l = BoxUnionRegion::new(vec![int(1), int(1)], vec![vec![0, 0], vec![1, 0], vec![0, 1]]).unwrap();
        assert!(matches!(slice_spectrum(&l, &[0, 1]), Err(Error::NonConstantSlices(_))));
    }

    #[test]
    fn fast_parseval_matches_direct_sum() {
        let s = BoxUnionRegion::staircase();
        let spec = staircase_spectrum();
        let xs = sample_grid(3, 4, 11, None);
        let fast = product_parseval_scan(&s, &spec, &xs, 4.0, 0.5).unwrap();
        let slow = parseval_scan(&s, &spec, &xs, 4.0, 0.5).unwrap();
        for (a, b) in fast.partial_sums.iter().zip(&slow.partial_sums) {
            assert!((a - b).abs() < 1e-12, "{a} {b}");
        }
        assert_eq!(fast.spectrum_size, slow.spectrum_size);
    }

    #[test]
    fn unit_square_parseval() {
        let sq = BoxUnionRegion::unit_cube(2);
        let z = ql(&[int(0)], int(1));
        let spec = product_spectrum(vec![z.clone(), z]).unwrap();
        let r = product_parseval_scan(&sq, &spec, &sample_grid(2, 5, 1, None), 100.0, 0.02).unwrap();
        assert!(r.passed && r.bessel_ok());
    }

    #[test]
    fn hnf_examples() {
        assert_eq!(hermite_normal_form(&[vec![2, 0], vec![1, 1]]).unwrap(), vec![vec![2, 0], vec![1, 1]]);
        assert_eq!(hermite_normal_form(&[vec![1, 1], vec![0, -2]]).unwrap(), vec![vec![2, 0], vec![1, 1]]);
        assert_eq!(hermite_normal_form(&[vec![0, 3], vec![2, 0]]).unwrap(), vec![vec![2, 0], vec![0, 3]]);
        assert_eq!(hermite_normal_form(&[vec![1, 1], vec![2, 2]]), Err(Error::Singular));
        let h = hermite_normal_form(&[vec![3, 1, 0], vec![1, 4, 2], vec![0, 1, 5]]).unwrap();
        assert!((0..3).all(|i| (i + 1..3).all(|j| h[i][j] == 0)));
        assert!((0..3).all(|k| (0..k).all(|j| (0..h[j][j]).contains(&h[k][j]))));
        assert_eq!((0..3).map(|i| h[i][i]).product::<i64>(), 49);
    }

    #[test]
    fn staircase_tilings() {
        let s = BoxUnionRegion::staircase();
        let fbox = [int(3), int(2), int(4)];
        let good = PeriodicSet::diagonal(&fbox, vec![vec![int(0); 3], vec![int(0), int(0), int(1)]]);
        let c = check_translation_tiling(&s, &good, &fbox).unwrap();
        assert!(c.tiles);
        assert_eq!(c.covered_volume, c.box_volume);
        let half = PeriodicSet::diagonal(&fbox, vec![vec![int(0); 3]]);
        let c = check_translation_tiling(&s, &half, &fbox).unwrap();
        assert!(!c.tiles && c.min_count == 0);
        let cube = BoxUnionRegion::unit_cube(3);
        assert!(check_translation_tiling(&cube, &PeriodicSet::diagonal(&[int(1); 3], vec![vec![int(0); 3]]), &[int(1); 3]).unwrap().tiles);
    }

    #[test]
    fn lattice_searches() {
        let cube = BoxUnionRegion::unit_cube(3);
        let r = lattice_tiling_search(&cube, &int(2)).unwrap();
        let id: Vec<Vec<Rational>> = (0..3).map(|i| (0..3).map(|j| int((i == j) as i64)).collect()).collect();
        assert!(r.lattices.contains(&id));
        let gap = BoxUnionRegion::new(vec![int(1)], vec![vec![0], vec![2]]).unwrap();
        assert!(lattice_tiling_search(&gap, &int(4)).unwrap().lattices.is_empty());
        let domino = BoxUnionRegion::new(vec![int(1), int(1)], vec![vec![0, 0], vec![1, 0]]).unwrap();
        let r = lattice_tiling_search(&domino, &int(2)).unwrap();
        assert_eq!(r.candidates, 3);
        assert_eq!(r.lattices.len(), 2);
    }

    #[test]
    fn staircase_has_no_small_lattice_tiling() {
        let r = lattice_tiling_search(&BoxUnionRegion::staircase(), &int(4)).unwrap();
        assert!(r.lattices.is_empty() && r.candidates > 0);
    }

    #[test]
    fn folding() {
        for p in [1, -3, 5] {
            let r = rearranged_cube(p).unwrap();
            assert!(r.fold.congruent && !r.upper_fold.congruent && !r.lower_fold.congruent);
            assert_eq!(r.upper_fold.max_mass, int(1));
            assert_eq!(r.upper_fold.min_mass, int(0));
        }
        assert!(rearranged_cube(0).is_err());
        let half = Triangle([[rat(0, 1), rat(0, 1)], [rat(1, 1), rat(0, 1)], [rat(0, 1), rat(1, 1)]]);
        assert_eq!(half.area(), rat(1, 2));
    }

    #[test]
    fn periodic_translations() {
        let s = PeriodicSet::diagonal(&[int(4)], vec![vec![int(0)], vec![int(1)]]);
        let t: Vec<Rational> = translations_within(&s, &int(5)).into_iter().map(|v| v[0]).collect();
        assert_eq!(t, vec![int(-4), int(-3), int(0), int(1), int(4), int(5)]);
    }
}
