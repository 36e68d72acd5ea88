//! Spectra of finite integer sets: Hadamard certificates, exhaustive
//! enumeration, complementing-set decompositions and exact-cover tilings.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{
    frac, int, mask_poly, phases_vanish, rat, to_f64, unit_phase, vanishing_sum, IntegerSet,
    Rational,
};

/// Finite set of exact frequencies, sorted and distinct.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct RationalSpectrum(Vec<Rational>);

impl RationalSpectrum {
    pub fn new(points: impl IntoIterator<Item = Rational>) -> Self {
        let mut v: Vec<Rational> = points.into_iter().collect();
        v.sort();
        v.dedup();
        RationalSpectrum(v)
    }

    pub fn from_integers(l: &IntegerSet) -> Self {
        Self::new(l.iter().map(int))
    }

    pub fn points(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, s: &Rational) -> Self {
        Self::new(self.0.iter().map(|x| x * s))
    }

    /// Points reduced into `[0, 1)`.
    pub fn reduced_mod_one(&self) -> Self {
        Self::new(self.0.iter().map(frac))
    }

    /// `self ⊕ other`, or `None` on a repeated sum.
    pub fn direct_sum(&self, other: &RationalSpectrum) -> Option<RationalSpectrum> {
        let n = self.len() * other.len();
        let out = Self::new(
            self.0
                .iter()
                .flat_map(|a| other.0.iter().map(move |b| a + b)),
        );
        (out.len() == n).then_some(out)
    }
}

impl fmt::Display for RationalSpectrum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "}}")
    }
}

/// Exact proof that `(1/√n)(e^{2πi x_j λ_k})` is unitary.
#[derive(Clone, Debug, PartialEq)]
pub struct HadamardCertificate {
    pub nodes: Vec<Rational>,
    pub frequencies: RationalSpectrum,
    /// Largest `|Gram_{kl}|` off the diagonal, normalized; a float diagnostic.
    pub max_offdiag_gram: f64,
}

/// Certifies that `freqs` is a spectrum of the finite node set `nodes`.
pub fn certify_rational_pair(
    nodes: &[Rational],
    freqs: &RationalSpectrum,
) -> Result<HadamardCertificate> {
    if nodes.len() != freqs.len() {
        return Err(Error::CardinalityMismatch {
            nodes: nodes.len(),
            frequencies: freqs.len(),
        });
    }
    if nodes.is_empty() {
        return Err(Error::EmptySet);
    }
    let pts = freqs.points();
    let mut max_gram = 0.0f64;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let diff = pts[i] - pts[j];
            let phases: Vec<Rational> = nodes.iter().map(|x| x * diff).collect();
            if !phases_vanish(&phases) {
                return Err(Error::NotOrthogonal {
                    first: pts[i],
                    second: pts[j],
                });
            }
            let g: num_complex::Complex64 =
                phases.iter().map(|t| unit_phase(to_f64(t))).sum();
            max_gram = max_gram.max(g.norm() / nodes.len() as f64);
        }
    }
    Ok(HadamardCertificate {
        nodes: nodes.to_vec(),
        frequencies: freqs.clone(),
        max_offdiag_gram: max_gram,
    })
}

pub fn certify_finite_pair(a: &IntegerSet, l: &RationalSpectrum) -> Result<HadamardCertificate> {
    certify_rational_pair(&a.to_rationals(), l)
}

fn require_nonneg_with_zero(a: &IntegerSet) -> Result<()> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if a.min().unwrap() < 0 {
        return Err(Error::pre(format!("{a} has negative elements")));
    }
    if !a.contains(0) {
        return Err(Error::pre(format!("0 must belong to {a}")));
    }
    Ok(())
}

/// Outcome of [`enumerate_spectra`].
#[derive(Clone, Debug)]
pub struct SpectrumEnumeration {
    pub spectra: Vec<(RationalSpectrum, HadamardCertificate)>,
    /// Rational roots of `p_A` on the unit circle, as points of `(0, 1)`.
    pub roots: Vec<Rational>,
    pub denominator_bound: u64,
    /// Unit-circle roots `e^{2πit}` located numerically that match no
    /// rational root within the bound; reported as `t ∈ [0, 1)`.
    pub unresolved_roots: Vec<f64>,
}

pub fn default_denominator_bound(a: &IntegerSet) -> u64 {
    2 * (a.max().unwrap_or(0).max(0) as u64 + 1) * a.len() as u64
}

/// All spectra of `A` containing 0 built from exact rational roots of `p_A`.
pub fn enumerate_spectra(a: &IntegerSet, denominator_bound: Option<u64>) -> Result<SpectrumEnumeration> {
    require_nonneg_with_zero(a)?;
    let bound = denominator_bound.unwrap_or_else(|| default_denominator_bound(a));
    let poly = mask_poly(a)?;
    let mut roots = Vec::new();
    for q in poly.cyclotomic_factors(bound) {
        for p in 1..q as i64 {
            if num_integer::gcd(p, q as i64) == 1 {
                roots.push(rat(p, q as i64));
            }
        }
    }
    roots.sort();

    let n = a.len();
    let adj: Vec<Vec<bool>> = roots
        .iter()
        .map(|x| roots.iter().map(|y| x != y && vanishing_sum(a, &(x - y))).collect())
        .collect();
    let mut cliques = Vec::new();
    let mut current = Vec::new();
    extend_cliques(&adj, n - 1, 0, &mut current, &mut cliques);

    let mut spectra = Vec::with_capacity(cliques.len());
    for clique in cliques {
        let spec = RationalSpectrum::new(
            std::iter::once(Rational::zero()).chain(clique.iter().map(|&i| roots[i])),
        );
        let cert = certify_finite_pair(a, &spec)
            .map_err(|e| Error::Internal(format!("clique failed certification: {e}")))?;
        spectra.push((spec, cert));
    }
    let unresolved_roots = unresolved_unit_roots(a, &roots);
    Ok(SpectrumEnumeration {
        spectra,
        roots,
        denominator_bound: bound,
        unresolved_roots,
    })
}

fn extend_cliques(
    adj: &[Vec<bool>],
    size: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if current.len() == size {
        out.push(current.clone());
        return;
    }
    let remaining = size - current.len();
    for v in start..adj.len() {
        if adj.len() - v < remaining {
            break;
        }
        if current.iter().all(|&u| adj[u][v]) {
            current.push(v);
            extend_cliques(adj, size, v + 1, current, out);
            current.pop();
        }
    }
}

/// Numerically located zeros of `p_A` on the unit circle, as `t ∈ [0,1)`.
pub fn numeric_unit_roots(a: &IntegerSet) -> Vec<f64> {
    let poly = match mask_poly(a) {
        Ok(p) => p,
        Err(_) => return Vec::new(),
    };
    let f = |t: f64| poly.eval_unit(t).norm();
    let samples = 256 * (poly.span() + 1);
    let h = 1.0 / samples as f64;
    let vals: Vec<f64> = (0..samples).map(|i| f(i as f64 * h)).collect();
    let mut found: Vec<f64> = Vec::new();
    for i in 0..samples {
        let prev = vals[(i + samples - 1) % samples];
        let next = vals[(i + 1) % samples];
        if vals[i] <= prev && vals[i] <= next {
            let t = golden_min(&f, (i as f64 - 1.0) * h, (i as f64 + 1.0) * h);
            if f(t) < 1e-9 {
                let t = t.rem_euclid(1.0);
                if !found.iter().any(|&s| circle_dist(s, t) < 1e-7) {
                    found.push(t);
                }
            }
        }
    }
    found.sort_by(f64::total_cmp);
    found
}

fn unresolved_unit_roots(a: &IntegerSet, rational_roots: &[Rational]) -> Vec<f64> {
    numeric_unit_roots(a)
        .into_iter()
        .filter(|&t| {
            circle_dist(t, 0.0) >= 1e-5
                && !rational_roots
                    .iter()
                    .any(|r| circle_dist(t, to_f64(r)) < 1e-5)
        })
        .collect()
}

pub(crate) fn circle_dist(s: f64, t: f64) -> f64 {
    let d = (s - t).rem_euclid(1.0);
    d.min(1.0 - d)
}

fn golden_min(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo < 1e-15 {
            break;
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    (lo + hi) / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    /// `C ↦ dC + {0, ..., d-1}`.
    I(i64),
    /// `C ↦ dC`.
    II(i64),
}

/// Base interval `{0..c-1}` followed by steps in the order they are applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OperationChain {
    pub base_length: i64,
    pub steps: Vec<Step>,
}

impl OperationChain {
    pub fn replay(&self) -> IntegerSet {
        let mut set = IntegerSet::interval(self.base_length);
        for step in &self.steps {
            set = match *step {
                Step::I(d) => IntegerSet::new(
                    set.iter().flat_map(|c| (0..d).map(move |j| d * c + j)),
                ),
                Step::II(d) => set.scaled(d),
            };
        }
        set
    }

    pub fn validate(&self) -> Result<()> {
        if self.base_length < 1 {
            return Err(Error::pre("base length must be positive"));
        }
        for step in &self.steps {
            let (Step::I(d) | Step::II(d)) = *step;
            if d < 2 {
                return Err(Error::pre(format!("step factor {d} must be at least 2")));
            }
        }
        Ok(())
    }
}

/// Largest `d ≥ 2` with `A = dC + {0..d-1}`, together with `C`.
fn block_peel(a: &IntegerSet) -> Option<(i64, IntegerSet)> {
    let n = a.len() as i64;
    (2..=n).rev().filter(|d| n % d == 0).find_map(|d| {
        let c: IntegerSet = a.iter().filter(|x| x % d == 0).map(|x| x / d).collect();
        let ok = c.len() as i64 * d == n && c.iter().all(|x| (0..d).all(|j| a.contains(d * x + j)));
        ok.then_some((d, c))
    })
}

/// Peels `A` into an interval and a chain of block and dilation steps.
pub fn decompose_complementing(a: &IntegerSet) -> Result<Option<OperationChain>> {
    require_nonneg_with_zero(a)?;
    let mut current = a.clone();
    let mut peeled = Vec::new();
    loop {
        if let Some(c) = current.interval_length() {
            peeled.reverse();
            return Ok(Some(OperationChain {
                base_length: c,
                steps: peeled,
            }));
        }
        if let Some((d, c)) = block_peel(&current) {
            peeled.push(Step::I(d));
            current = c;
            continue;
        }
        let g = current.gcd();
        if g >= 2 {
            peeled.push(Step::II(g));
            current = IntegerSet::new(current.iter().map(|x| x / g));
            continue;
        }
        return Ok(None);
    }
}

/// Spectrum of `replay(chain)` by the twisted tensor rule.
pub fn spectrum_from_chain(chain: &OperationChain) -> Result<(RationalSpectrum, HadamardCertificate)> {
    chain.validate()?;
    let c = chain.base_length;
    let mut spec = RationalSpectrum::new((0..c).map(|j| rat(j, c)));
    for step in &chain.steps {
        spec = match *step {
            Step::II(d) => spec.scaled(&rat(1, d)),
            Step::I(d) => RationalSpectrum::new(
                spec.points()
                    .iter()
                    .flat_map(|l| (0..d).map(move |j| (l + j) / d)),
            ),
        };
    }
    let cert = certify_finite_pair(&chain.replay(), &spec)
        .map_err(|e| Error::Internal(format!("chain spectrum failed certification: {e}")))?;
    Ok((spec, cert))
}

/// `(B, n)` with `A ⊕ B = Z_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TileCertificate {
    pub complement: IntegerSet,
    pub modulus: i64,
}

impl TileCertificate {
    /// Exhaustive check that every residue mod `n` is hit exactly once.
    pub fn verify(&self, a: &IntegerSet) -> bool {
        let n = self.modulus;
        if n < 1 {
            return false;
        }
        let mut counts = vec![0u32; n as usize];
        for x in a.iter() {
            for b in self.complement.iter() {
                counts[(x + b).rem_euclid(n) as usize] += 1;
            }
        }
        counts.iter().all(|&c| c == 1)
    }
}

/// Lexicographically smallest `B ⊂ {0..n-1}` with `A ⊕ B = Z_n`.
pub fn find_complement(a: &IntegerSet, n: i64) -> Result<Option<TileCertificate>> {
    if a.is_empty() {
        return Err(Error::EmptySet);
    }
    if n < 1 || n % a.len() as i64 != 0 {
        return Ok(None);
    }
    let residues = IntegerSet::new(a.residues(n));
    if residues.len() != a.len() {
        return Ok(None);
    }
    let target = n as usize / a.len();
    let mut covered = vec![false; n as usize];
    let mut chosen = Vec::with_capacity(target);
    let res: Vec<usize> = residues.iter().map(|r| r as usize).collect();
    if cover_search(&res, n as usize, target, 0, &mut covered, &mut chosen) {
        Ok(Some(TileCertificate {
            complement: IntegerSet::new(chosen.iter().map(|&b| b as i64)),
            modulus: n,
        }))
    } else {
        Ok(None)
    }
}

fn cover_search(
    res: &[usize],
    n: usize,
    target: usize,
    start: usize,
    covered: &mut [bool],
    chosen: &mut Vec<usize>,
) -> bool {
    if chosen.len() == target {
        return true;
    }
    let need = target - chosen.len();
    if n - start < need {
        return false;
    }
    let first_free = match covered.iter().position(|&c| !c) {
        Some(i) => i,
        None => return false,
    };
    // Some later translate must cover `first_free`.
    let reachable = res.iter().any(|&r| {
        let b = (first_free + n - r) % n;
        b >= start && res.iter().all(|&s| !covered[(s + b) % n])
    });
    if !reachable {
        return false;
    }
    for b in start..n {
        if res.iter().all(|&r| !covered[(r + b) % n]) {
            for &r in res {
                covered[(r + b) % n] = true;
            }
            chosen.push(b);
            if cover_search(res, n, target, b + 1, covered, chosen) {
                return true;
            }
            chosen.pop();
            for &r in res {
                covered[(r + b) % n] = false;
            }
        }
    }
    false
}

/// True iff every `a + b` is distinct and `{a + b} = C`.
pub fn check_direct_sum(a: &IntegerSet, b: &IntegerSet, c: &IntegerSet) -> bool {
    a.direct_sum(b).as_ref() == Some(c)
}

/// `(1/denom) L`.
pub fn spectrum_over(l: &IntegerSet, denom: i64) -> RationalSpectrum {
    RationalSpectrum::new(l.iter().map(|x| rat(x, denom)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(pts: &[(i64, i64)]) -> RationalSpectrum {
        RationalSpectrum::new(pts.iter().map(|&(p, q)| rat(p, q)))
    }

    #[test]
    fn certificates() {
        let a = IntegerSet::new([0, 2]);
        let cert = certify_finite_pair(&a, &spec(&[(0, 1), (1, 4)])).unwrap();
        assert!(cert.max_offdiag_gram < 1e-12);
        for n in 1..8 {
            let l = RationalSpectrum::new((0..n).map(|j| rat(j, n)));
            certify_finite_pair(&IntegerSet::interval(n), &l).unwrap();
        }
        let b = IntegerSet::new([0, 1, 8, 9]);
        certify_finite_pair(&b, &spec(&[(0, 1), (1, 16), (8, 16), (9, 16)])).unwrap();
    }

    #[test]
    fn certificate_errors() {
        let a = IntegerSet::new([0, 2]);
        assert!(matches!(
            certify_finite_pair(&a, &spec(&[(0, 1)])),
            Err(Error::CardinalityMismatch { .. })
        ));
        assert_eq!(
            certify_finite_pair(&a, &spec(&[(0, 1), (1, 2)])),
            Err(Error::NotOrthogonal {
                first: rat(0, 1),
                second: rat(1, 2)
            })
        );
    }

    #[test]
    fn enumerate_small_sets() {
        let out = enumerate_spectra(&IntegerSet::new([0, 2, 4]), None).unwrap();
        let got: Vec<RationalSpectrum> = out.spectra.into_iter().map(|(s, _)| s).collect();
        assert_eq!(
            got,
            vec![
                spec(&[(0, 1), (1, 6), (1, 3)]),
                spec(&[(0, 1), (1, 6), (5, 6)]),
                spec(&[(0, 1), (1, 3), (2, 3)]),
                spec(&[(0, 1), (2, 3), (5, 6)]),
            ]
        );
        assert!(out.unresolved_roots.is_empty());
        let single = enumerate_spectra(&IntegerSet::new([0]), None).unwrap();
        assert_eq!(single.spectra.len(), 1);
        assert_eq!(single.spectra[0].0, spec(&[(0, 1)]));
        // 1 + z + z^3 has no roots of unity among its zeros.
        let none = enumerate_spectra(&IntegerSet::new([0, 1, 3]), None).unwrap();
        assert!(none.spectra.is_empty());
    }

    #[test]
    fn decomposition_examples() {
        let chain = decompose_complementing(&IntegerSet::new([0, 1, 8, 9]))
            .unwrap()
            .unwrap();
        assert_eq!(chain.base_length, 2);
        assert_eq!(chain.steps, vec![Step::II(4), Step::I(2)]);
        assert_eq!(chain.replay(), IntegerSet::new([0, 1, 8, 9]));

        let chain = decompose_complementing(&IntegerSet::interval(5)).unwrap().unwrap();
        assert_eq!((chain.base_length, chain.steps.len()), (5, 0));

        let chain = decompose_complementing(&IntegerSet::new([0, 1, 4, 5]))
            .unwrap()
            .unwrap();
        assert_eq!((chain.base_length, chain.steps.clone()), (2, vec![Step::II(2), Step::I(2)]));

        assert_eq!(decompose_complementing(&IntegerSet::new([0, 1, 3])).unwrap(), None);
    }

    #[test]
    fn chain_spectra() {
        let chain = decompose_complementing(&IntegerSet::new([0, 1, 8, 9]))
            .unwrap()
            .unwrap();
        let (s, _) = spectrum_from_chain(&chain).unwrap();
        assert_eq!(s, spec(&[(0, 1), (1, 16), (1, 2), (9, 16)]));
        let (s, _) = spectrum_from_chain(&OperationChain {
            base_length: 3,
            steps: vec![],
        })
        .unwrap();
        assert_eq!(s, spec(&[(0, 1), (1, 3), (2, 3)]));
        let chain = decompose_complementing(&IntegerSet::new([0, 1, 4, 5]))
            .unwrap()
            .unwrap();
        let (s, _) = spectrum_from_chain(&chain).unwrap();
        assert_eq!(s, spec(&[(0, 1), (1, 8), (1, 2), (5, 8)]));
    }

    #[test]
    fn complements() {
        let t = find_complement(&IntegerSet::new([0, 2]), 4).unwrap().unwrap();
        assert_eq!(t.complement, IntegerSet::new([0, 1]));
        let t = find_complement(&IntegerSet::interval(6), 6).unwrap().unwrap();
        assert_eq!(t.complement, IntegerSet::new([0]));
        let a = IntegerSet::new([0, 1, 8, 9]);
        let t = find_complement(&a, 16).unwrap().unwrap();
        assert_eq!(t.complement, IntegerSet::new([0, 2, 4, 6]));
        assert!(t.verify(&a));
        assert_eq!(find_complement(&a, 6).unwrap(), None);
        assert_eq!(find_complement(&IntegerSet::new([0, 1, 3]), 6).unwrap(), None);
    }

    #[test]
    fn direct_sum_checks() {
        let ab = |x: &[i64]| IntegerSet::from(x);
        assert!(check_direct_sum(&ab(&[0, 1]), &ab(&[0, 2]), &ab(&[0, 1, 2, 3])));
        assert!(!check_direct_sum(&ab(&[0, 1]), &ab(&[0, 1]), &ab(&[0, 1, 2])));
        assert!(check_direct_sum(&ab(&[0, 1]), &ab(&[0, 8]), &ab(&[0, 1, 8, 9])));
    }

    fn chain_strategy() -> impl Strategy<Value = OperationChain> {
        let step = prop_oneof![(2i64..4).prop_map(Step::I), (2i64..5).prop_map(Step::II)];
        (1i64..5, prop::collection::vec(step, 0..4))
            .prop_map(|(base_length, steps)| OperationChain { base_length, steps })
    }

    proptest! {
        #[test]
        fn chain_cardinalities_and_certificates(chain in chain_strategy()) {
            let set = chain.replay();
            let expected = chain.steps.iter().fold(chain.base_length, |acc, s| match s {
                Step::I(d) => acc * d,
                Step::II(_) => acc,
            });
            prop_assert_eq!(set.len() as i64, expected);
            let (spec, _) = spectrum_from_chain(&chain).unwrap();
            prop_assert_eq!(spec.len(), set.len());
            prop_assert_eq!(spec.reduced_mod_one().len(), spec.len());
        }

        #[test]
        fn decomposition_round_trips(chain in chain_strategy()) {
            let set = chain.replay();
            let found = decompose_complementing(&set).unwrap().expect("replayed chains decompose");
            prop_assert_eq!(found.replay(), set.clone());
            let (spec, _) = spectrum_from_chain(&found).unwrap();
            prop_assert!(certify_finite_pair(&set, &spec).is_ok());
        }

        #[test]
        fn complements_verify(elems in prop::collection::btree_set(1i64..10, 0..3), k in 1i64..5) {
            let a = IntegerSet::new(std::iter::once(0).chain(elems));
            let n = a.len() as i64 * k;
            if let Some(t) = find_complement(&a, n).unwrap() {
                prop_assert!(t.verify(&a));
            }
        }
    }
}
