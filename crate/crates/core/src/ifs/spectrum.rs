use std::collections::{HashMap, HashSet};

use num_traits::{One, Zero};

use super::{is_integral, pow_i64, AffineIfs};
use crate::error::{Error, Result};
use crate::exact::{abs_f64, int, rat, IntegerSet, Rational};
use crate::finite::{certify_finite_pair, spectrum_over, HadamardCertificate};

pub const DEFAULT_CYCLE_LEN: usize = 8;

/// Cycles of the dual maps `x ↦ (x + l)/A`, `l ∈ L`, on which `|δ̂_B| = 1`.
///
/// Each cycle is listed in orbit order starting from its smallest point.
pub fn find_cycles(
    scale: i64,
    b: &IntegerSet,
    l: &IntegerSet,
    max_len: usize,
) -> Result<Vec<Vec<Rational>>> {
    if scale < 2 {
        return Err(Error::pre(format!("scale {scale} must be at least 2")));
    }
    if b.is_empty() || l.is_empty() {
        return Err(Error::EmptySet);
    }
    if max_len == 0 {
        return Ok(Vec::new());
    }
    let g = b.difference_gcd();
    let cycles = if g == 0 {
        cycles_by_words(scale, l, max_len)?
    } else {
        cycles_on_grid(scale, g, l, max_len)
    };
    Ok(cycles)
}

/// `|δ̂_B(x)| = 1` iff `x ∈ (1/g)Z` with `g` the gcd of differences of `B`;
/// cycle points also lie in the hull of the dual attractor.
fn cycles_on_grid(scale: i64, g: i64, l: &IntegerSet, max_len: usize) -> Vec<Vec<Rational>> {
    let lo = rat(l.min().unwrap(), scale - 1);
    let hi = rat(l.max().unwrap(), scale - 1);
    let k_lo = (lo * g).ceil().to_integer();
    let k_hi = (hi * g).floor().to_integer();
    let points: Vec<Rational> = (k_lo..=k_hi).map(|k| rat(k, g)).collect();
    let index: HashMap<Rational, usize> = points.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let edges: Vec<Vec<usize>> = points
        .iter()
        .map(|x| {
            l.iter()
                .filter_map(|d| index.get(&((x + d) / scale)).copied())
                .collect()
        })
        .collect();

    let mut seen: HashSet<Vec<Rational>> = HashSet::new();
    let mut cycles = Vec::new();
    for start in 0..points.len() {
        let mut path = vec![start];
        simple_cycles_from(start, &edges, max_len, &mut path, &mut |cyc| {
            let orbit: Vec<Rational> = cyc.iter().map(|&i| points[i]).collect();
            let mut key = orbit.clone();
            key.sort();
            if seen.insert(key) {
                cycles.push(orbit);
            }
        });
    }
    cycles.sort();
    cycles
}

fn simple_cycles_from(
    start: usize,
    edges: &[Vec<usize>],
    max_len: usize,
    path: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    let last = *path.last().unwrap();
    for &next in &edges[last] {
        if next == start {
            emit(path);
        } else if next > start && path.len() < max_len && !path.contains(&next) {
            path.push(next);
            simple_cycles_from(start, edges, max_len, path, emit);
            path.pop();
        }
    }
}

/// Every point has `|δ̂_B| = 1` when `B` is a single digit, so cycles are the
/// periodic orbits of all words of length at most `max_len`.
fn cycles_by_words(scale: i64, l: &IntegerSet, max_len: usize) -> Result<Vec<Vec<Rational>>> {
    let digits: Vec<i64> = l.iter().collect();
    let total: f64 = (1..=max_len).map(|p| (digits.len() as f64).powi(p as i32)).sum();
    if total > 2e6 {
        return Err(Error::pre("too many words for cycle enumeration; lower max_len"));
    }
    let mut seen: HashSet<Vec<Rational>> = HashSet::new();
    let mut cycles = Vec::new();
    for p in 1..=max_len {
        let ap = pow_i64(scale, p as u32)?;
        let mut word = vec![0usize; p];
        loop {
            let num: i64 = (0..p)
                .map(|j| digits[word[j]] * scale.pow(j as u32))
                .sum();
            let x0 = rat(num, ap - 1);
            let mut orbit = vec![x0];
            let mut x = x0;
            for j in 0..p {
                x = (x + digits[word[j]]) / scale;
                if x == x0 {
                    break;
                }
                if j + 1 < p {
                    orbit.push(x);
                }
            }
            let rot = orbit
                .iter()
                .enumerate()
                .min_by_key(|(_, v)| **v)
                .map(|(i, _)| i)
                .unwrap();
            orbit.rotate_left(rot);
            let mut key = orbit.clone();
            key.sort();
            if seen.insert(key) {
                cycles.push(orbit);
            }
            if !next_word(&mut word, digits.len()) {
                break;
            }
        }
    }
    cycles.sort();
    Ok(cycles)
}

fn next_word(word: &mut [usize], base: usize) -> bool {
    for w in word.iter_mut() {
        *w += 1;
        if *w < base {
            return true;
        }
        *w = 0;
    }
    false
}

/// The set `dilation · { Σ_{k<n} A^k d_k - A^n c }` over `n ≥ prefix length`,
/// digits `d_k` from `prefix[k]` (then from `tail`), and `c` a cycle point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratedSpectrum {
    scale: i64,
    prefix: Vec<IntegerSet>,
    tail: IntegerSet,
    cycles: Vec<Vec<Rational>>,
    dilation: Rational,
}

impl GeneratedSpectrum {
    pub fn new(
        scale: i64,
        prefix: Vec<IntegerSet>,
        tail: IntegerSet,
        cycles: Vec<Vec<Rational>>,
        dilation: Rational,
    ) -> Result<Self> {
        if scale < 2 {
            return Err(Error::pre(format!("scale {scale} must be at least 2")));
        }
        if tail.is_empty() || prefix.iter().any(|p| p.is_empty()) {
            return Err(Error::EmptySet);
        }
        if cycles.is_empty() || cycles.iter().any(|c| c.is_empty()) {
            return Err(Error::pre("at least one nonempty cycle is required"));
        }
        if dilation.is_zero() {
            return Err(Error::pre("dilation must be nonzero"));
        }
        Ok(GeneratedSpectrum {
            scale,
            prefix,
            tail,
            cycles,
            dilation,
        })
    }

    pub fn scale(&self) -> i64 {
        self.scale
    }

    pub fn prefix(&self) -> &[IntegerSet] {
        &self.prefix
    }

    pub fn tail(&self) -> &IntegerSet {
        &self.tail
    }

    pub fn cycles(&self) -> &[Vec<Rational>] {
        &self.cycles
    }

    pub fn dilation(&self) -> Rational {
        self.dilation
    }

    pub fn with_dilation(mut self, dilation: Rational) -> Result<Self> {
        if dilation.is_zero() {
            return Err(Error::pre("dilation must be nonzero"));
        }
        self.dilation = dilation;
        Ok(self)
    }

    /// True when every element is an integer.
    pub fn is_integral(&self) -> bool {
        self.dilation.is_one() && self.cycles.iter().flatten().all(is_integral)
    }

    fn start_points(&self) -> Vec<Rational> {
        let mut s: Vec<Rational> = self.cycles.iter().flatten().map(|c| -c).collect();
        s.sort();
        s.dedup();
        s
    }

    /// Tail elements with `|λ| < radius` (undilated), with minimal depth.
    fn tail_within(&self, radius: f64) -> HashMap<Rational, usize> {
        let a = self.scale;
        let m = self.tail.max_abs() as f64;
        let explore = radius.max(m / (a - 1) as f64);
        let mut depth: HashMap<Rational, usize> = HashMap::new();
        let mut frontier: Vec<Rational> = Vec::new();
        for s in self.start_points() {
            if abs_f64(&s) < explore {
                depth.insert(s, 0);
                frontier.push(s);
            }
        }
        let mut level = 0;
        while !frontier.is_empty() {
            level += 1;
            let mut next = Vec::new();
            for x in &frontier {
                for l in self.tail.iter() {
                    let y = x * a + l;
                    if abs_f64(&y) < explore && !depth.contains_key(&y) {
                        depth.insert(y, level);
                        next.push(y);
                    }
                }
            }
            frontier = next;
        }
        depth.retain(|x, _| abs_f64(x) < radius);
        depth
    }

    /// Elements `λ` with `|λ| < radius`, each with its minimal depth.
    fn within_with_depth(&self, radius: f64) -> Vec<(Rational, usize)> {
        let scale_abs = abs_f64(&self.dilation);
        let r0 = radius / scale_abs;
        let a = self.scale as f64;
        let mut radii = vec![r0];
        for level in &self.prefix {
            let r = *radii.last().unwrap();
            radii.push((r + level.max_abs() as f64) / a);
        }
        let p = self.prefix.len();
        let mut current: HashMap<Rational, usize> = self
            .tail_within(radii[p])
            .into_iter()
            .map(|(x, d)| (x, d + p))
            .collect();
        for k in (0..p).rev() {
            let mut next: HashMap<Rational, usize> = HashMap::new();
            for (x, d) in &current {
                for l in self.prefix[k].iter() {
                    let y = x * self.scale + l;
                    if abs_f64(&y) < radii[k] {
                        let e = next.entry(y).or_insert(*d);
                        *e = (*e).min(*d);
                    }
                }
            }
            current = next;
        }
        let mut out: Vec<(Rational, usize)> = current
            .into_iter()
            .map(|(x, d)| (x * self.dilation, d))
            .filter(|(x, _)| abs_f64(x) < radius)
            .collect();
        out.sort();
        out
    }

    /// All elements with `|λ| < radius`, ascending.
    pub fn elements_within(&self, radius: f64) -> Vec<Rational> {
        self.within_with_depth(radius).into_iter().map(|(x, _)| x).collect()
    }

    /// The first `count` elements ordered by expansion length, then value.
    pub fn first_elements(&self, count: usize) -> Vec<Rational> {
        let p = self.prefix.len();
        let mut tail_levels: Vec<Vec<Rational>> = vec![self.start_points()];
        let mut seen: HashSet<Rational> = tail_levels[0].iter().copied().collect();
        let mut all: Vec<(usize, Rational)> = Vec::new();
        let mut added: HashSet<Rational> = HashSet::new();
        for depth in 0..=64usize {
            if depth >= p {
                let t = depth - p;
                while tail_levels.len() <= t {
                    let next: Vec<Rational> = tail_levels
                        .last()
                        .unwrap()
                        .iter()
                        .flat_map(|x| self.tail.iter().map(move |l| x * self.scale + l))
                        .filter(|y| seen.insert(*y))
                        .collect::<HashSet<_>>()
                        .into_iter()
                        .collect();
                    tail_levels.push(next);
                }
                let mut level: Vec<Rational> = tail_levels[t].clone();
                for k in (0..p).rev() {
                    level = level
                        .iter()
                        .flat_map(|x| self.prefix[k].iter().map(move |l| x * self.scale + l))
                        .collect();
                }
                let mut level: Vec<Rational> = level
                    .into_iter()
                    .map(|x| x * self.dilation)
                    .filter(|x| added.insert(*x))
                    .collect();
                level.sort();
                all.extend(level.into_iter().map(|x| (depth, x)));
                if all.len() >= count || (depth > p && tail_levels[t].is_empty()) {
                    break;
                }
            }
        }
        all.truncate(count);
        all.into_iter().map(|(_, x)| x).collect()
    }

    /// Equality of the two sets on the open ball of the given radius.
    pub fn agrees_within(&self, other: &GeneratedSpectrum, radius: f64) -> bool {
        self.elements_within(radius) == other.elements_within(radius)
    }
}

/// The spectrum of `μ_B` generated from `L` and the `δ̂_B`-cycles.
pub fn cycle_spectrum(ifs: &AffineIfs, l: &IntegerSet) -> Result<GeneratedSpectrum> {
    let b = ifs.digits();
    if !l.contains(0) {
        return Err(Error::hypothesis("0 ∈ L", format!("L = {l}")));
    }
    if !b.contains(0) {
        return Err(Error::hypothesis("0 ∈ B", format!("B = {b}")));
    }
    certify_finite_pair(b, &spectrum_over(l, ifs.scale()))?;
    let cycles = find_cycles(ifs.scale(), b, l, DEFAULT_CYCLE_LEN)?;
    GeneratedSpectrum::new(ifs.scale(), Vec::new(), l.clone(), cycles, int(1))
}

fn require_integral(spec: &GeneratedSpectrum, scale: i64) -> Result<()> {
    if spec.scale() != scale {
        return Err(Error::pre(format!(
            "spectrum has scale {} but the IFS has scale {scale}",
            spec.scale()
        )));
    }
    if !spec.is_integral() {
        return Err(Error::hypothesis(
            "b",
            "translation invariance of δ̂_B is only verified for integer spectra",
        ));
    }
    Ok(())
}

/// `AΛ ⊕ L` for an integer spectrum `Λ` and a digit spectrum `L/A` of `B`.
pub fn new_spectrum_from_old(
    ifs: &AffineIfs,
    lambda: &GeneratedSpectrum,
    l: &IntegerSet,
) -> Result<GeneratedSpectrum> {
    require_integral(lambda, ifs.scale())?;
    certify_finite_pair(ifs.digits(), &spectrum_over(l, ifs.scale()))?;
    let a = ifs.scale();
    let check_radius = (a * a * a) as f64;
    let inner = lambda.elements_within((check_radius + l.max_abs() as f64) / a as f64);
    let mut seen = HashSet::new();
    for x in &inner {
        for d in l.iter() {
            let y = x * a + d;
            if !seen.insert(y) {
                return Err(Error::DirectSumCollision(format!("{y} has two expansions")));
            }
        }
    }
    let mut prefix = vec![l.clone()];
    prefix.extend(lambda.prefix().iter().cloned());
    GeneratedSpectrum::new(
        a,
        prefix,
        lambda.tail().clone(),
        lambda.cycles().to_vec(),
        int(1),
    )
}

/// Converse direction: if `AΛ ⊕ L = Λ` on the ball of the given radius,
/// certify `L/A` as a spectrum of `B`.
pub fn certify_from_self_similarity(
    ifs: &AffineIfs,
    lambda: &GeneratedSpectrum,
    l: &IntegerSet,
    radius: f64,
) -> Result<HadamardCertificate> {
    require_integral(lambda, ifs.scale())?;
    let a = ifs.scale();
    let inner = lambda.elements_within((radius + l.max_abs() as f64) / a as f64);
    let mut image = Vec::new();
    let mut seen = HashSet::new();
    for x in &inner {
        for d in l.iter() {
            let y = x * a + d;
            if !seen.insert(y) {
                return Err(Error::DirectSumCollision(format!("{y} has two expansions")));
            }
            if abs_f64(&y) < radius {
                image.push(y);
            }
        }
    }
    image.sort();
    if image != lambda.elements_within(radius) {
        return Err(Error::hypothesis(
            "AΛ ⊕ L = Λ",
            format!("the identity fails within radius {radius}"),
        ));
    }
    certify_finite_pair(ifs.digits(), &spectrum_over(l, a))
}

/// Output of [`infinite_spectra_family`].
#[derive(Clone, Debug)]
pub struct SpectrumFamily {
    pub gcd: i64,
    pub reduced_digits: IntegerSet,
    pub reduced_l: IntegerSet,
    pub base: GeneratedSpectrum,
    pub missing_digit: i64,
    pub replaced_digit: i64,
    pub n_values: Vec<i64>,
    pub digit_sets: Vec<IntegerSet>,
    pub spectra: Vec<GeneratedSpectrum>,
}

/// Spectra `(1/D)(AΛ ⊕ L_i)`, `i = 1..count`, for `μ_B` with `#B < A`.
pub fn infinite_spectra_family(
    ifs: &AffineIfs,
    l: &IntegerSet,
    count: usize,
) -> Result<SpectrumFamily> {
    let a = ifs.scale();
    let b = ifs.digits();
    if b.len() as i64 >= a {
        return Err(Error::hypothesis(
            "#B < A",
            format!("hypothesis #B < A fails: #B = {}, A = {a}", b.len()),
        ));
    }
    if !b.contains(0) || !l.contains(0) {
        return Err(Error::hypothesis("0 ∈ B, 0 ∈ L", format!("B = {b}, L = {l}")));
    }
    certify_finite_pair(b, &spectrum_over(l, a))?;
    let d = b.gcd();
    if d == 0 {
        return Err(Error::pre("B = {0} admits no nonzero digit in L"));
    }
    let b_red = IntegerSet::new(b.iter().map(|x| x / d));
    let l_red = IntegerSet::new(l.iter().map(|x| (d * x).rem_euclid(a)));
    let reduced = AffineIfs::new(a, b_red.clone())?;
    let base = cycle_spectrum(&reduced, &l_red)?;
    let missing = (0..a)
        .find(|x| !l_red.contains(*x))
        .ok_or_else(|| Error::Internal("L covers every residue".into()))?;
    let replaced = l_red
        .iter()
        .find(|&x| x != 0)
        .ok_or_else(|| Error::pre("L has no nonzero element"))?;

    let mut n_values = Vec::with_capacity(count);
    let mut digit_sets = Vec::with_capacity(count);
    let mut spectra = Vec::with_capacity(count);
    let mut power = 1i64;
    let mut n = missing;
    for _ in 1..=count {
        power = power
            .checked_mul(a)
            .ok_or_else(|| Error::pre("family index overflows"))?;
        n = power
            .checked_mul(missing)
            .and_then(|t| t.checked_add(n))
            .ok_or_else(|| Error::pre("family index overflows"))?;
        let new_digit = n
            .checked_mul(a)
            .and_then(|t| t.checked_add(replaced))
            .ok_or_else(|| Error::pre("family digit overflows"))?;
        let li: IntegerSet = l_red
            .iter()
            .filter(|&x| x != replaced)
            .chain(std::iter::once(new_digit))
            .collect();
        let spec = new_spectrum_from_old(&reduced, &base, &li)?.with_dilation(rat(1, d))?;
        n_values.push(n);
        digit_sets.push(li);
        spectra.push(spec);
    }
    Ok(SpectrumFamily {
        gcd: d,
        reduced_digits: b_red,
        reduced_l: l_red,
        base,
        missing_digit: missing,
        replaced_digit: replaced,
        n_values,
        digit_sets,
        spectra,
    })
}

impl SpectrumFamily {
    /// Pairs `(i, j)`, one-based, whose spectra coincide on the ball.
    pub fn coinciding_pairs(&self, radius: f64) -> Vec<(usize, usize)> {
        let sets: Vec<Vec<Rational>> =
            self.spectra.iter().map(|s| s.elements_within(radius)).collect();
        let mut out = Vec::new();
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if sets[i] == sets[j] {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[i64]) -> IntegerSet {
        IntegerSet::from(v)
    }

    fn ints(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn cycles_examples() {
        assert_eq!(find_cycles(4, &set(&[0, 1]), &set(&[0, 2]), 8).unwrap(), vec![ints(&[0])]);
        assert_eq!(
            find_cycles(4, &set(&[0, 3]), &set(&[0, 3]), 8).unwrap(),
            vec![ints(&[0]), ints(&[1])]
        );
        assert_eq!(
            find_cycles(2, &set(&[0, 1]), &set(&[0, 1]), 8).unwrap(),
            vec![ints(&[0]), ints(&[1])]
        );
        // Rational cycle points occur when gcd(B) > 1.
        let c = find_cycles(3, &set(&[0, 2]), &set(&[0, 1]), 8).unwrap();
        assert!(c.contains(&vec![int(0)]));
        assert!(c.contains(&vec![rat(1, 2)]));
    }

    #[test]
    fn cycles_for_single_digit() {
        let c = find_cycles(2, &set(&[0]), &set(&[0, 1]), 2).unwrap();
        assert_eq!(c, vec![ints(&[0]), vec![rat(1, 3), rat(2, 3)], ints(&[1])]);
    }

    #[test]
    fn cycle_spectrum_examples() {
        let s = cycle_spectrum(&AffineIfs::new(4, set(&[0, 2])).unwrap(), &set(&[0, 1])).unwrap();
        assert_eq!(s.first_elements(8), ints(&[0, 1, 4, 5, 16, 17, 20, 21]));
        assert_eq!(s.elements_within(64.0), ints(&[0, 1, 4, 5, 16, 17, 20, 21]));

        let z = cycle_spectrum(&AffineIfs::new(2, set(&[0, 1])).unwrap(), &set(&[0, 1])).unwrap();
        assert_eq!(z.elements_within(5.5), ints(&[-5, -4, -3, -2, -1, 0, 1, 2, 3, 4, 5]));

        let s = cycle_spectrum(&AffineIfs::new(4, set(&[0, 1])).unwrap(), &set(&[0, 2])).unwrap();
        assert_eq!(s.elements_within(40.0), ints(&[0, 2, 8, 10, 32, 34]));

        assert!(cycle_spectrum(&AffineIfs::new(4, set(&[0, 2])).unwrap(), &set(&[0, 2])).is_err());
    }

    #[test]
    fn new_from_old() {
        let ifs = AffineIfs::new(4, set(&[0, 2])).unwrap();
        let base = cycle_spectrum(&ifs, &set(&[0, 1])).unwrap();
        let same = new_spectrum_from_old(&ifs, &base, &set(&[0, 1])).unwrap();
        assert!(same.agrees_within(&base, 4096.0));
        let q3 = new_spectrum_from_old(&ifs, &base, &set(&[0, 3])).unwrap();
        assert_eq!(q3.elements_within(30.0), ints(&[0, 3, 4, 7, 16, 19, 20, 23]));
        let cert = certify_from_self_similarity(&ifs, &base, &set(&[0, 1]), 1024.0).unwrap();
        assert_eq!(cert.frequencies.points(), &[int(0), rat(1, 4)]);
        assert!(certify_from_self_similarity(&ifs, &base, &set(&[0, 3]), 1024.0).is_err());
        let halved = base.clone().with_dilation(rat(1, 2)).unwrap();
        assert!(matches!(
            new_spectrum_from_old(&ifs, &halved, &set(&[0, 1])),
            Err(Error::Hypothesis { .. })
        ));
    }

    #[test]
    fn family_construction() {
        let fam = infinite_spectra_family(&AffineIfs::new(4, set(&[0, 1])).unwrap(), &set(&[0, 2]), 3)
            .unwrap();
        assert_eq!(fam.n_values, vec![5, 21, 85]);
        assert_eq!(fam.digit_sets[0], set(&[0, 22]));
        assert!(fam.coinciding_pairs(4f64.powi(6)).is_empty());

        let fam = infinite_spectra_family(&AffineIfs::new(4, set(&[0, 2])).unwrap(), &set(&[0, 1]), 2)
            .unwrap();
        assert_eq!(fam.gcd, 2);
        assert_eq!(fam.reduced_l, set(&[0, 2]));
        assert_eq!(fam.spectra[0].elements_within(12.0), vec![int(0), int(4), int(11)]);

        assert!(matches!(
            infinite_spectra_family(&AffineIfs::new(2, set(&[0, 1])).unwrap(), &set(&[0, 1]), 1),
            Err(Error::Hypothesis { .. })
        ));
    }
}
