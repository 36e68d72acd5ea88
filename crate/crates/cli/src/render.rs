//! JSON encodings of library values. Floats carry 12 significant digits.

use serde_json::{json, Value};

use spectral_pairs::finite::{HadamardCertificate, OperationChain, RationalSpectrum, Step, TileCertificate};
use spectral_pairs::ifs::{ConvolutionFactorization, GeneratedSpectrum, MeasureDescriptor, SpectrumDescriptor};
use spectral_pairs::interval::QuasiLattice;
use spectral_pairs::validation::{DeficiencyWitness, OrthogonalFamily, ParsevalReport};
use spectral_pairs::{IntegerSet, Rational};

pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    json!(rounded)
}

pub fn floats(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| float(x)).collect())
}

pub fn q(r: &Rational) -> Value {
    Value::String(r.to_string())
}

pub fn qs(rs: &[Rational]) -> Value {
    Value::Array(rs.iter().map(q).collect())
}

pub fn q_points(ps: &[Vec<Rational>]) -> Value {
    Value::Array(ps.iter().map(|p| qs(p)).collect())
}

pub fn set(s: &IntegerSet) -> Value {
    json!(s.elements())
}

pub fn certificate(c: &HadamardCertificate) -> Value {
    json!({
        "nodes": qs(&c.nodes),
        "frequencies": qs(c.frequencies.points()),
        "max_offdiag_gram": float(c.max_offdiag_gram),
    })
}

pub fn spectrum(s: &RationalSpectrum) -> Value {
    qs(s.points())
}

pub fn chain(c: &OperationChain) -> Value {
    let steps: Vec<Value> = c
        .steps
        .iter()
        .map(|s| match s {
            Step::I(d) => json!(["I", d]),
            Step::II(d) => json!(["II", d]),
        })
        .collect();
    json!({ "base_length": c.base_length, "steps": steps })
}

pub fn tile(c: &TileCertificate) -> Value {
    json!({ "complement": set(&c.complement), "modulus": c.modulus })
}

pub fn quasi_lattice(l: &QuasiLattice) -> Value {
    json!({ "kind": "quasi-lattice", "finite": qs(l.finite_part()), "period": q(&l.period()) })
}

pub fn generated(g: &GeneratedSpectrum) -> Value {
    json!({
        "kind": "generated",
        "scale": g.scale(),
        "prefix": g.prefix().iter().map(set).collect::<Vec<_>>(),
        "tail": set(g.tail()),
        "cycles": g.cycles().iter().map(|c| qs(c)).collect::<Vec<_>>(),
        "dilation": q(&g.dilation()),
    })
}

pub fn measure_descriptor(m: &MeasureDescriptor) -> Value {
    match m {
        MeasureDescriptor::Ifs { scale, digits } => json!({ "kind": "ifs", "A": scale, "B": qs(digits) }),
        MeasureDescriptor::Atoms { points } => json!({ "kind": "atoms", "points": q_points(points) }),
    }
}

pub fn spectrum_descriptor(s: &SpectrumDescriptor) -> Value {
    match s {
        SpectrumDescriptor::Finite(points) => json!({ "kind": "finite", "points": q_points(points) }),
        SpectrumDescriptor::QuasiLattice(l) => quasi_lattice(l),
        SpectrumDescriptor::Generated(g) => generated(g),
    }
}

pub fn factorization(f: &ConvolutionFactorization) -> Value {
    json!({
        "a": f.a,
        "p": f.p,
        "components": f
            .components
            .iter()
            .map(|c| json!({ "k": c.k, "n": c.n, "C": set(&c.digits) }))
            .collect::<Vec<_>>(),
        "base": { "A": f.base.scale(), "B": set(f.base.digits()) },
        "reduced_base": f.reduced_base.as_ref().map(|r| json!({ "A": r.scale(), "B": set(r.digits()) })),
        "F": set(&f.atoms),
    })
}

pub fn report(r: &ParsevalReport) -> Value {
    json!({
        "radius": float(r.radius),
        "spectrum_size": r.spectrum_size,
        "tol": float(r.tol),
        "min_sum": float(r.min_sum),
        "max_sum": float(r.max_sum),
        "passed": r.passed,
        "bessel_ok": r.bessel_ok(),
        "sample_points": r.sample_points.iter().map(|p| floats(p)).collect::<Vec<_>>(),
        "partial_sums": floats(&r.partial_sums),
    })
}

pub fn family(f: &OrthogonalFamily) -> Value {
    json!({ "frequencies": qs(&f.frequencies), "size": f.frequencies.len(), "numeric": qs(&f.numeric) })
}

pub fn witness(w: &DeficiencyWitness) -> Value {
    json!({
        "x": float(w.x),
        "radius": float(w.radius),
        "best_sum": float(w.best_sum),
        "gap": float(w.gap),
        "threshold": float(w.threshold),
        "valid": w.valid(),
        "family_used": qs(&w.family_used),
        "grid": q(&w.grid),
        "prime": w.prime,
        "zero_valuations": w.zero_valuations,
        "candidates": w.candidates,
    })
}

/// One CSV row per sample: index, coordinates, partial sum.
pub fn report_csv(r: &ParsevalReport) -> String {
    let d = r.sample_points.first().map_or(0, Vec::len);
    let mut out = String::from("sample");
    for i in 0..d {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",partial_sum\n");
    for (i, (x, s)) in r.sample_points.iter().zip(&r.partial_sums).enumerate() {
        out.push_str(&i.to_string());
        for c in x {
            out.push_str(&format!(",{c:.12e}"));
        }
        out.push_str(&format!(",{s:.12e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(float(std::f64::consts::PI), json!(3.14159265359));
        assert_eq!(float(1.0 / 3.0e-20), json!(3.33333333333e19));
        assert_eq!(float(f64::NAN), Value::Null);
        assert_eq!(q(&spectral_pairs::exact::rat(-6, 8)), json!("-3/4"));
    }
}
