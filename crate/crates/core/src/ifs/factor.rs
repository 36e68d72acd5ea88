use num_complex::Complex64;
use num_traits::{One, Zero};

use super::{pow_i64, AffineIfs, GeneratedSpectrum};
use crate::error::{Error, Result};
use crate::exact::{abs_f64, delta_hat, int, IntegerSet, Rational};
use crate::finite::{certify_finite_pair, certify_rational_pair, spectrum_over, HadamardCertificate, RationalSpectrum};
use crate::ifs::cycle_spectrum;

/// One factor `a^{n_k p + k} C_k` of a radix decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorComponent {
    pub k: usize,
    pub n: i64,
    pub digits: IntegerSet,
}

/// `μ_{A,B} = μ_base * δ_F` with `A = a^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvolutionFactorization {
    pub a: i64,
    pub p: usize,
    pub components: Vec<FactorComponent>,
    pub base: AffineIfs,
    /// `(a, C)` when every `C_k` equals `C`.
    pub reduced_base: Option<AffineIfs>,
    pub atoms: IntegerSet,
}

impl ConvolutionFactorization {
    /// `|μ̂_B(x) - μ̂_base(x) δ̂_F(x)|` for the measure that was factored.
    pub fn residual(&self, composite: &AffineIfs, x: f64, tol: f64) -> Result<f64> {
        let lhs = composite.invariant_ft(x, tol)?;
        let rhs: Complex64 = self.base.invariant_ft(x, tol)? * delta_hat(&self.atoms, x);
        Ok((lhs - rhs).norm())
    }
}

/// Splits `B` into `⊕_j a^{m_j} C_j` with each `C_j` containing 0, holding
/// at least two residues mod `a`, and having no two elements congruent mod `a`.
fn radix_positions(b: &IntegerSet, a: i64) -> Option<Vec<(u32, IntegerSet)>> {
    let mut rest = b.clone();
    let mut out = Vec::new();
    while rest.len() > 1 {
        let m = rest
            .iter()
            .filter(|&x| x != 0)
            .map(|x| valuation(x, a))
            .min()?;
        let am = a.checked_pow(m)?;
        let modulus = am.checked_mul(a)?;
        let zero_class: IntegerSet = rest.iter().filter(|x| x.rem_euclid(modulus) == 0).collect();
        let z_min = zero_class.min()?;
        let mut digits = vec![0i64];
        let mut residues: Vec<i64> = rest.residues(modulus);
        residues.sort_unstable();
        residues.dedup();
        for r in residues.into_iter().filter(|&r| r != 0) {
            let class: IntegerSet = rest.iter().filter(|x| x.rem_euclid(modulus) == r).collect();
            let shift = class.min()? - z_min;
            if class != zero_class.shifted(shift) {
                return None;
            }
            digits.push(shift / am);
        }
        out.push((m, IntegerSet::new(digits)));
        rest = zero_class;
    }
    Some(out)
}

fn valuation(mut x: i64, a: i64) -> u32 {
    let mut v = 0;
    while x % a == 0 {
        x /= a;
        v += 1;
    }
    v
}

fn checked_direct_sum(sets: impl IntoIterator<Item = IntegerSet>) -> Option<IntegerSet> {
    sets.into_iter()
        .try_fold(IntegerSet::new([0]), |acc, s| acc.direct_sum(&s))
}

/// Radix analysis of `B` in base `a`, grouping digit positions by residue
/// modulo `p`. Returns `None` when two positions share a residue.
pub fn factor_convolution(ifs: &AffineIfs, a: i64, p: usize) -> Result<Option<ConvolutionFactorization>> {
    if a < 2 {
        return Err(Error::pre(format!("radix {a} must be at least 2")));
    }
    if p < 2 {
        return Err(Error::pre(format!("power {p} must be at least 2")));
    }
    if a.checked_pow(p as u32) != Some(ifs.scale()) {
        return Err(Error::NotPerfectPower {
            scale: ifs.scale(),
            base: a,
            power: p as u32,
        });
    }
    if !ifs.digits().contains(0) {
        return Err(Error::hypothesis("0 ∈ B", format!("B = {}", ifs.digits())));
    }
    let positions = match radix_positions(ifs.digits(), a) {
        Some(v) => v,
        None => return Ok(None),
    };
    let mut slots: Vec<Option<FactorComponent>> = vec![None; p];
    for (m, digits) in positions {
        let k = m as usize % p;
        if slots[k].is_some() {
            return Ok(None);
        }
        slots[k] = Some(FactorComponent {
            k,
            n: (m as usize / p) as i64,
            digits,
        });
    }
    let components: Vec<FactorComponent> = slots
        .into_iter()
        .enumerate()
        .map(|(k, s)| {
            s.unwrap_or(FactorComponent {
                k,
                n: 0,
                digits: IntegerSet::new([0]),
            })
        })
        .collect();
    build_factorization(ifs.digits(), a, p, components).map(Some)
}

fn build_factorization(
    b: &IntegerSet,
    a: i64,
    p: usize,
    components: Vec<FactorComponent>,
) -> Result<ConvolutionFactorization> {
    let pow = |e: i64| pow_i64(a, e as u32);
    let mut assembled = Vec::new();
    let mut merged = Vec::new();
    let mut atom_parts = Vec::new();
    for c in &components {
        let k = c.k as i64;
        assembled.push(c.digits.scaled(pow(c.n * p as i64 + k)?));
        merged.push(c.digits.scaled(pow(k)?));
        for l in 0..c.n {
            atom_parts.push(c.digits.scaled(pow(l * p as i64 + k)?));
        }
    }
    let rebuilt = checked_direct_sum(assembled)
        .ok_or_else(|| Error::DirectSumCollision("digit decomposition".into()))?;
    if &rebuilt != b {
        return Err(Error::Internal(format!("radix decomposition rebuilds {rebuilt}, not {b}")));
    }
    let merged = checked_direct_sum(merged)
        .ok_or_else(|| Error::DirectSumCollision("merged base digits".into()))?;
    let atoms = checked_direct_sum(atom_parts)
        .ok_or_else(|| Error::DirectSumCollision("atom set F".into()))?;
    let base = AffineIfs::new(pow(p as i64)?, merged)?;
    let first = &components[0].digits;
    let reduced_base = if components.iter().all(|c| &c.digits == first) {
        Some(AffineIfs::new(a, first.clone())?)
    } else {
        None
    };
    Ok(ConvolutionFactorization {
        a,
        p,
        components,
        base,
        reduced_base,
        atoms,
    })
}

/// One summand `b_k C_k` with `C_k` having spectrum `(1/a_k) L_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComposePart {
    pub b: Rational,
    pub c: IntegerSet,
    pub a: Rational,
    pub l: IntegerSet,
}

/// `D = ⊕ b_k C_k` with its spectrum `⊕ (1/(a_k b_k)) L_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComposedSpectrum {
    pub nodes: Vec<Rational>,
    pub spectrum: RationalSpectrum,
    pub certificate: HadamardCertificate,
}

pub fn compose_spectra(parts: &[ComposePart]) -> Result<ComposedSpectrum> {
    if parts.is_empty() {
        return Err(Error::EmptySet);
    }
    for (i, part) in parts.iter().enumerate() {
        if part.b.is_zero() || part.a.is_zero() {
            return Err(Error::pre(format!("part {}: b and a must be nonzero", i + 1)));
        }
        let freqs = RationalSpectrum::new(part.l.iter().map(|x| int(x) / part.a));
        certify_finite_pair(&part.c, &freqs).map_err(|e| {
            Error::hypothesis("b", format!("part {}: {e}", i + 1))
        })?;
    }
    for k in 0..parts.len().saturating_sub(1) {
        for j in 0..=k {
            let q = parts[k + 1].b / (parts[j].a * parts[j].b);
            if !q.denom().is_one() {
                return Err(Error::Divisibility { k: k + 1, j: j + 1 });
            }
        }
    }
    let mut nodes = RationalSpectrum::new([int(0)]);
    let mut spectrum = RationalSpectrum::new([int(0)]);
    for (i, part) in parts.iter().enumerate() {
        let scaled = RationalSpectrum::new(part.c.iter().map(|x| part.b * x));
        nodes = nodes
            .direct_sum(&scaled)
            .ok_or_else(|| Error::DirectSumCollision(format!("node set at part {}", i + 1)))?;
        let freq = RationalSpectrum::new(part.l.iter().map(|x| int(x) / (part.a * part.b)));
        spectrum = spectrum
            .direct_sum(&freq)
            .ok_or_else(|| Error::DirectSumCollision(format!("spectrum at part {}", i + 1)))?;
    }
    let certificate = certify_rational_pair(nodes.points(), &spectrum)
        .map_err(|e| Error::Internal(format!("composed spectrum failed certification: {e}")))?;
    Ok(ComposedSpectrum {
        nodes: nodes.points().to_vec(),
        spectrum,
        certificate,
    })
}

/// Spectrum of `μ_B` for `B = ⊕ a^{n_k p + k} C_k`, as `Λ_base ⊕ Λ_F`.
#[derive(Clone, Debug)]
pub struct TwistedProductSpectrum {
    pub digits: IntegerSet,
    pub factorization: ConvolutionFactorization,
    pub base_l: IntegerSet,
    pub base_spectrum: GeneratedSpectrum,
    pub atom_spectrum: RationalSpectrum,
    pub atom_certificate: HadamardCertificate,
}

impl TwistedProductSpectrum {
    pub fn ifs(&self) -> Result<AffineIfs> {
        AffineIfs::new(self.factorization.base.scale(), self.digits.clone())
    }

    /// Elements of `Λ_base ⊕ Λ_F` with `|λ| < radius`, ascending.
    pub fn elements_within(&self, radius: f64) -> Vec<Rational> {
        let pts = self.atom_spectrum.points();
        let reach = pts.iter().map(abs_f64).fold(0.0, f64::max);
        let mut out: Vec<Rational> = self
            .base_spectrum
            .elements_within(radius + reach)
            .into_iter()
            .flat_map(|x| pts.iter().map(move |f| x + f))
            .filter(|y| abs_f64(y) < radius)
            .collect();
        out.sort();
        out.dedup();
        out
    }
}

pub fn twisted_product_spectrum(
    a: i64,
    p: usize,
    n: &[i64],
    c: &[IntegerSet],
    l: &[IntegerSet],
) -> Result<TwistedProductSpectrum> {
    if a < 2 || p < 1 {
        return Err(Error::hypothesis("a", format!("need a ≥ 2 and p ≥ 1, got a={a}, p={p}")));
    }
    if n.len() != p || c.len() != p || l.len() != p {
        return Err(Error::hypothesis(
            "b",
            format!("expected {p} entries in n, C and L, got {}, {}, {}", n.len(), c.len(), l.len()),
        ));
    }
    for k in 0..p {
        if n[k] < 0 {
            return Err(Error::hypothesis("b", format!("n_{k} = {} is negative", n[k])));
        }
        if !c[k].contains(0) {
            return Err(Error::hypothesis("b", format!("0 ∉ C_{k} = {}", c[k])));
        }
        if IntegerSet::new(c[k].residues(a)).len() != c[k].len() {
            return Err(Error::hypothesis("b", format!("C_{k} has elements congruent mod {a}")));
        }
        if !l[k].contains(0) {
            return Err(Error::hypothesis("c", format!("0 ∉ L_{k} = {}", l[k])));
        }
        certify_finite_pair(&c[k], &spectrum_over(&l[k], a))
            .map_err(|e| Error::hypothesis("c", format!("C_{k} with L_{k}/{a}: {e}")))?;
    }
    if c[0].gcd() != 1 {
        return Err(Error::hypothesis("d", format!("gcd(C_0) = {}", c[0].gcd())));
    }
    let components: Vec<FactorComponent> = (0..p)
        .map(|k| FactorComponent {
            k,
            n: n[k],
            digits: c[k].clone(),
        })
        .collect();
    let mut assembled = Vec::new();
    for comp in &components {
        assembled.push(comp.digits.scaled(pow_i64(a, (comp.n * p as i64 + comp.k as i64) as u32)?));
    }
    let digits = checked_direct_sum(assembled)
        .ok_or_else(|| Error::hypothesis("b", "the sum defining B is not direct"))?;
    let factorization = build_factorization(&digits, a, p, components)?;

    let mut base_l = IntegerSet::new([0]);
    for (k, lk) in l.iter().enumerate() {
        base_l = base_l
            .direct_sum(&lk.scaled(pow_i64(a, (p - 1 - k) as u32)?))
            .ok_or_else(|| Error::DirectSumCollision("merged digit spectrum".into()))?;
    }
    let base_spectrum = cycle_spectrum(&factorization.base, &base_l)?;

    let mut parts: Vec<(i64, ComposePart)> = Vec::new();
    for (k, comp) in factorization.components.iter().enumerate() {
        for j in 0..comp.n {
            let e = j * p as i64 + k as i64;
            parts.push((
                e,
                ComposePart {
                    b: int(pow_i64(a, e as u32)?),
                    c: comp.digits.clone(),
                    a: int(a),
                    l: l[k].clone(),
                },
            ));
        }
    }
    parts.sort_by_key(|(e, _)| *e);
    let (atom_spectrum, atom_certificate) = if parts.is_empty() {
        let s = RationalSpectrum::new([int(0)]);
        let cert = certify_rational_pair(&[int(0)], &s)?;
        (s, cert)
    } else {
        let parts: Vec<ComposePart> = parts.into_iter().map(|(_, p)| p).collect();
        let composed = compose_spectra(&parts)?;
        (composed.spectrum, composed.certificate)
    };
    Ok(TwistedProductSpectrum {
        digits,
        factorization,
        base_l,
        base_spectrum,
        atom_spectrum,
        atom_certificate,
    })
}
