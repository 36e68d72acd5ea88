use num_complex::Complex64;
use serde_json::{json, Value};

use spectral_pairs::exact::{int, to_f64};
use spectral_pairs::finite::{
    certify_finite_pair, decompose_complementing, enumerate_spectra, find_complement, spectrum_from_chain, spectrum_over,
    OperationChain, RationalSpectrum, Step,
};
use spectral_pairs::ifs::{
    affine_transform_pair, compose_spectra, cycle_spectrum, factor_convolution, infinite_spectra_family,
    new_spectrum_from_old, twisted_product_spectrum, AffineIfs, AffineMap, ComposePart, MatrixIfs, MeasureDescriptor,
    RationalMatrix, SpectrumDescriptor, DEFAULT_TOL,
};
use spectral_pairs::interval::{as_affine_ifs, spectra_of_interval_union, tiles_real_line, IntervalUnion, QuasiLattice};
use spectral_pairs::multidim::{
    check_translation_tiling, lattice_tiling_search, product_parseval_scan, rearranged_cube, slice_spectrum,
    BoxUnionRegion, FoldReport, PeriodicSet, ProductSpectrum, Triangle,
};
use spectral_pairs::validation::{
    deficiency_witness, greedy_from_candidates, greedy_orthogonal_family, parseval_scan, sample_grid, FourierMeasure,
    SpectrumSource, DEFAULT_GAP_THRESHOLD, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use spectral_pairs::{Error, IntegerSet, Rational, Result};

use crate::render;
use crate::request::{
    rationals, ChainSpec, DigitSpec, MeasureSpec, RegionSpec, Request, ScaleSpec, SpectrumSpec, StepKind,
    TransformMeasure,
};
use crate::{golden, CommandResult, Defaults, Status};

const GENERATED_RADIUS: f64 = 64.0;
const PARSEVAL_RADIUS: f64 = 500.0;
const PARSEVAL_TOL: f64 = 0.01;
const FAMILY_RADIUS: f64 = 256.0;
const FAMILY_CAP: usize = 64;
const PRODUCT_RADIUS: f64 = 50.0;
const PRODUCT_TOL: f64 = 0.05;
const RESIDUAL_SAMPLES: usize = 16;

pub fn provenance(request: &Request) -> &'static str {
    match request {
        Request::CertifyFinite { .. } => "hadamard-orthogonality",
        Request::EnumerateSpectra { .. } => "cyclotomic-clique-search",
        Request::Decompose { .. } => "complementing-operations",
        Request::SpectrumFromChain { .. } => "chain-spectrum",
        Request::FindComplement { .. } => "exact-cover-mod-n",
        Request::IntervalSpectra { .. } => "interval-union-spectra",
        Request::TilesLine { .. } => "tiling-by-exact-cover",
        Request::AsIfs { .. } => "interval-union-as-ifs",
        Request::InvariantFt { .. } => "infinite-product",
        Request::Factor { .. } => "radix-factorization",
        Request::CycleSpectrum { .. } => "cycle-generated-spectrum",
        Request::TwistedProduct { .. } => "twisted-product-spectrum",
        Request::Compose { .. } => "composed-digit-spectrum",
        Request::Transform { .. } => "affine-group-action",
        Request::NewSpectrum { .. } => "spectrum-from-old",
        Request::InfiniteFamily { .. } => "infinite-spectrum-family",
        Request::Parseval { .. } => "parseval-partial-sums",
        Request::OrthogonalFamily { .. } => "greedy-orthogonal-family",
        Request::Deficiency { .. } => "p-adic-family-bound",
        Request::ProductSpectrum { .. } => "slice-product-spectrum",
        Request::CheckTiling { .. } => "cell-count-tiling",
        Request::LatticeSearch { .. } => "bounded-lattice-search",
        Request::RearrangedCube { .. } => "fold-modulo-lattice",
        Request::Golden => "worked-examples",
    }
}

fn set(v: &[i64]) -> Result<IntegerSet> {
    IntegerSet::from_distinct(v)
}

fn ifs(scale: i64, digits: &[i64]) -> Result<AffineIfs> {
    AffineIfs::new(scale, set(digits)?)
}

fn pre(msg: &str) -> Error {
    Error::Precondition(msg.into())
}

fn pick<T: Copy>(request: Option<T>, flag: Option<T>, fallback: T) -> T {
    request.or(flag).unwrap_or(fallback)
}

pub fn dispatch(request: &Request, defaults: &Defaults) -> Result<CommandResult> {
    let cmd = request.name();
    let prov = provenance(request);
    let ok = |payload: Value| CommandResult::new(cmd, prov, Status::Ok, payload);
    let none = |payload: Value| CommandResult::new(cmd, prov, Status::None, payload);
    let radius = |r: Option<f64>, fallback: f64| pick(r, defaults.radius, fallback);

    match request {
        Request::CertifyFinite { a, l } => {
            let cert = certify_finite_pair(&set(a)?, &RationalSpectrum::new(rationals(l)))?;
            Ok(ok(json!({ "certificate": render::certificate(&cert) })))
        }
        Request::EnumerateSpectra { a, denominator_bound } => {
            let e = enumerate_spectra(&set(a)?, *denominator_bound)?;
            let payload = json!({
                "spectra": e.spectra.iter().map(|(s, _)| render::spectrum(s)).collect::<Vec<_>>(),
                "certificates": e.spectra.iter().map(|(_, c)| render::certificate(c)).collect::<Vec<_>>(),
                "roots": render::qs(&e.roots),
                "denominator_bound": e.denominator_bound,
                "unresolved_roots": render::floats(&e.unresolved_roots),
            });
            Ok(if e.spectra.is_empty() { none(payload) } else { ok(payload) })
        }
        Request::Decompose { a } => Ok(match decompose_complementing(&set(a)?)? {
            Some(chain) => ok(json!({ "chain": render::chain(&chain), "replay": render::set(&chain.replay()) })),
            None => none(Value::Null),
        }),
        Request::SpectrumFromChain { chain, a } => {
            let chain = match (chain, a) {
                (Some(c), None) => chain_from_spec(c)?,
                (None, Some(a)) => match decompose_complementing(&set(a)?)? {
                    Some(c) => c,
                    None => return Ok(none(json!({ "reason": "no complementing decomposition" }))),
                },
                _ => return Err(pre("give exactly one of \"chain\" and \"A\"")),
            };
            let (spec, cert) = spectrum_from_chain(&chain)?;
            Ok(ok(json!({
                "chain": render::chain(&chain),
                "set": render::set(&chain.replay()),
                "spectrum": render::spectrum(&spec),
                "certificate": render::certificate(&cert),
            })))
        }
        Request::FindComplement { a, n } => Ok(match find_complement(&set(a)?, *n)? {
            Some(c) => ok(json!({ "certificate": render::tile(&c) })),
            None => none(json!({ "modulus": n })),
        }),
        Request::IntervalSpectra { a, denominator_bound } => {
            let spectra = spectra_of_interval_union(&set(a)?, *denominator_bound)?;
            let payload = json!({ "spectra": spectra.iter().map(render::quasi_lattice).collect::<Vec<_>>() });
            Ok(if spectra.is_empty() { none(payload) } else { ok(payload) })
        }
        Request::TilesLine { a, n_max } => {
            let n_max = n_max.or(defaults.n_max);
            Ok(match tiles_real_line(&set(a)?, n_max)? {
                Some(c) => ok(json!({ "certificate": render::tile(&c) })),
                None => none(json!({ "n_max": n_max })),
            })
        }
        Request::AsIfs { a, n_max } => {
            let n_max = n_max.or(defaults.n_max);
            Ok(match as_affine_ifs(&set(a)?, n_max)? {
                Some(r) => ok(json!({
                    "n": r.n,
                    "C": render::set(&r.complement),
                    "A": r.ifs.scale(),
                    "B": render::set(r.ifs.digits()),
                })),
                None => none(json!({ "n_max": n_max })),
            })
        }
        Request::InvariantFt { scale, digits, x, tol } => {
            let tol = pick(*tol, defaults.tol, DEFAULT_TOL);
            let measure: Box<dyn Fn(&[f64]) -> Result<Complex64>> = match (scale, digits) {
                (ScaleSpec::Integer(s), DigitSpec::Integers(b)) => {
                    let m = ifs(*s, b)?;
                    Box::new(move |x: &[f64]| {
                        if x.len() != 1 {
                            return Err(Error::DimensionMismatch { expected: 1, found: x.len() });
                        }
                        m.invariant_ft(x[0], tol)
                    })
                }
                (ScaleSpec::Matrix(s), DigitSpec::Vectors(b)) => {
                    let m = MatrixIfs::new(s.clone(), b.clone())?;
                    Box::new(move |x: &[f64]| m.invariant_ft(x, tol))
                }
                _ => return Err(pre("A and B must both be scalar or both be matrix data")),
            };
            let values = x
                .iter()
                .map(|p| {
                    let p = p.coords();
                    let v = measure(&p)?;
                    Ok(json!({ "x": render::floats(&p), "re": render::float(v.re), "im": render::float(v.im), "abs": render::float(v.norm()) }))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ok(json!({ "tol": render::float(tol), "values": values })))
        }
        Request::Factor { scale, digits, a, p } => {
            let m = ifs(*scale, digits)?;
            Ok(match factor_convolution(&m, *a, *p)? {
                Some(f) => {
                    let xs = sample_grid(1, RESIDUAL_SAMPLES, pick(None, defaults.seed, DEFAULT_SEED), None);
                    let residual = xs
                        .iter()
                        .map(|x| f.residual(&m, 8.0 * x[0], DEFAULT_TOL))
                        .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))?;
                    ok(json!({ "factorization": render::factorization(&f), "max_residual": render::float(residual) }))
                }
                None => none(Value::Null),
            })
        }
        Request::CycleSpectrum { scale, digits, l, radius: r } => {
            let m = ifs(*scale, digits)?;
            let l = set(l)?;
            let spec = cycle_spectrum(&m, &l)?;
            let cert = certify_finite_pair(m.digits(), &spectrum_over(&l, *scale))?;
            let r = radius(*r, GENERATED_RADIUS);
            let elements = spec.elements_within(r);
            Ok(ok(json!({
                "spectrum": render::generated(&spec),
                "radius": render::float(r),
                "elements": render::qs(&elements),
                "digit_certificate": render::certificate(&cert),
            })))
        }
        Request::TwistedProduct { a, p, n, c, l, radius: r } => {
            let c = c.iter().map(|v| set(v)).collect::<Result<Vec<_>>>()?;
            let l = l.iter().map(|v| set(v)).collect::<Result<Vec<_>>>()?;
            let t = twisted_product_spectrum(*a, *p, n, &c, &l)?;
            let r = radius(*r, GENERATED_RADIUS);
            Ok(ok(json!({
                "B": render::set(&t.digits),
                "factorization": render::factorization(&t.factorization),
                "base_L": render::set(&t.base_l),
                "base_spectrum": render::generated(&t.base_spectrum),
                "atom_spectrum": render::spectrum(&t.atom_spectrum),
                "atom_certificate": render::certificate(&t.atom_certificate),
                "radius": render::float(r),
                "elements": render::qs(&t.elements_within(r)),
            })))
        }
        Request::Compose { parts } => {
            let parts = parts
                .iter()
                .map(|p| {
                    Ok(ComposePart {
                        b: p.b.0,
                        c: set(&p.c)?,
                        a: p.a.0,
                        l: set(&p.l)?,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let c = compose_spectra(&parts)?;
            Ok(ok(json!({
                "nodes": render::qs(&c.nodes),
                "spectrum": render::spectrum(&c.spectrum),
                "certificate": render::certificate(&c.certificate),
            })))
        }
        Request::Transform { measure, spectrum, map, radius: r } => {
            let measure = match measure {
                TransformMeasure::Ifs { scale, digits } => MeasureDescriptor::Ifs {
                    scale: *scale,
                    digits: rationals(digits),
                },
                TransformMeasure::Atoms { points } => MeasureDescriptor::Atoms {
                    points: points.iter().map(|p| p.coords()).collect(),
                },
            };
            let spectrum = spectrum_descriptor(spectrum)?;
            let linear = RationalMatrix::new(map.linear.iter().map(|row| rationals(row)).collect())?;
            let map = AffineMap::new(linear, rationals(&map.shift))?;
            let (m2, s2) = affine_transform_pair(&measure, &spectrum, &map)?;
            let mut payload = json!({
                "measure": render::measure_descriptor(&m2),
                "spectrum": render::spectrum_descriptor(&s2),
            });
            if let SpectrumDescriptor::Generated(g) = &s2 {
                let r = radius(*r, GENERATED_RADIUS);
                payload["elements"] = render::qs(&g.elements_within(r));
            }
            if let (MeasureDescriptor::Atoms { points }, SpectrumDescriptor::Finite(freqs)) = (&m2, &s2) {
                if points.iter().chain(freqs).all(|p| p.len() == 1) {
                    let nodes: Vec<Rational> = points.iter().map(|p| p[0]).collect();
                    let freqs = RationalSpectrum::new(freqs.iter().map(|p| p[0]));
                    let cert = spectral_pairs::finite::certify_rational_pair(&nodes, &freqs)?;
                    payload["certificate"] = render::certificate(&cert);
                }
            }
            Ok(ok(payload))
        }
        Request::NewSpectrum { scale, digits, l, l_new, radius: r } => {
            let m = ifs(*scale, digits)?;
            let base = cycle_spectrum(&m, &set(l)?)?;
            let new = new_spectrum_from_old(&m, &base, &set(l_new)?)?;
            let r = radius(*r, GENERATED_RADIUS);
            Ok(ok(json!({
                "base": render::generated(&base),
                "spectrum": render::generated(&new),
                "radius": render::float(r),
                "elements": render::qs(&new.elements_within(r)),
            })))
        }
        Request::InfiniteFamily { scale, digits, l, count, radius: r } => {
            let m = ifs(*scale, digits)?;
            let f = infinite_spectra_family(&m, &set(l)?, *count)?;
            let r = radius(*r, GENERATED_RADIUS);
            let members: Vec<Value> = f
                .spectra
                .iter()
                .zip(&f.digit_sets)
                .zip(&f.n_values)
                .map(|((s, li), n)| {
                    json!({
                        "n": n,
                        "L": render::set(li),
                        "spectrum": render::generated(s),
                        "elements": render::qs(&s.elements_within(r)),
                    })
                })
                .collect();
            Ok(ok(json!({
                "gcd": f.gcd,
                "reduced_B": render::set(&f.reduced_digits),
                "reduced_L": render::set(&f.reduced_l),
                "base": render::generated(&f.base),
                "missing_digit": f.missing_digit,
                "replaced_digit": f.replaced_digit,
                "radius": render::float(r),
                "members": members,
                "coinciding_pairs": f.coinciding_pairs(r),
            })))
        }
        Request::Parseval { measure, spectrum, radius: r, tol, samples, seed } => {
            let ft = fourier_measure(measure)?;
            let source = spectrum_source(spectrum)?;
            let seed = pick(*seed, defaults.seed, DEFAULT_SEED);
            let xs = sample_grid(ft.dimension(), samples.unwrap_or(DEFAULT_SAMPLES), seed, Some(source.as_ref()));
            let rep = parseval_scan(ft.as_ref(), source.as_ref(), &xs, radius(*r, PARSEVAL_RADIUS), pick(*tol, defaults.tol, PARSEVAL_TOL))?;
            Ok(report_result(ok(json!({ "report": render::report(&rep) })), &rep))
        }
        Request::OrthogonalFamily { measure, radius: r, cap, pool } => {
            let ft = fourier_measure(measure)?;
            let r = radius(*r, FAMILY_RADIUS);
            let cap = cap.unwrap_or(FAMILY_CAP);
            let fam = match pool {
                Some(spec) => {
                    let mut candidates = exact_points(spec, r)?;
                    let mag = |x: &Rational| if *x < int(0) { -x } else { *x };
                    candidates.sort_by(|a, b| mag(a).cmp(&mag(b)).then(a.cmp(b)));
                    greedy_from_candidates(ft.as_ref(), &candidates, cap)?
                }
                None => greedy_orthogonal_family(ft.as_ref(), r, cap)?,
            };
            Ok(ok(json!({ "radius": render::float(r), "cap": cap, "family": render::family(&fam) })))
        }
        Request::Deficiency { scale, digits, x, radius: r, threshold, factors } => {
            let m = ifs(*scale, digits)?;
            let factors = match factors {
                Some((b1, b2)) => Some((set(b1)?, set(b2)?)),
                None => None,
            };
            let w = deficiency_witness(
                &m,
                factors.as_ref().map(|(b1, b2)| (b1, b2)),
                *x,
                radius(*r, FAMILY_RADIUS),
                threshold.unwrap_or(DEFAULT_GAP_THRESHOLD),
            )?;
            let payload = json!({ "witness": render::witness(&w) });
            Ok(if w.valid() { ok(payload) } else { none(payload) })
        }
        Request::ProductSpectrum { region, order, radius: r, tol, samples, seed } => {
            let region = build_region(region)?;
            let (order, spec) = match order {
                Some(o) => (o.clone(), slice_spectrum(&region, o)?),
                None => first_slice_order(&region)?,
            };
            let seed = pick(*seed, defaults.seed, DEFAULT_SEED);
            let xs = sample_grid(region.dimension(), samples.unwrap_or(DEFAULT_SAMPLES), seed, Some(&spec));
            let rep = product_parseval_scan(&region, &spec, &xs, radius(*r, PRODUCT_RADIUS), pick(*tol, defaults.tol, PRODUCT_TOL))?;
            let payload = json!({
                "order": order,
                "factors": spec.factors().iter().map(render::spectrum_descriptor).collect::<Vec<_>>(),
                "report": render::report(&rep),
            });
            Ok(report_result(ok(payload), &rep))
        }
        Request::CheckTiling { region, translations, fundamental_box } => {
            let region = build_region(region)?;
            let basis: Vec<Vec<Rational>> = translations.basis.iter().map(|r| rationals(r)).collect();
            let set = PeriodicSet {
                offsets: match &translations.offsets {
                    Some(o) => o.iter().map(|r| rationals(r)).collect(),
                    None => vec![vec![int(0); basis.len()]],
                },
                basis,
            };
            let t = check_translation_tiling(&region, &set, &rationals(fundamental_box))?;
            let payload = json!({
                "tiles": t.tiles,
                "grid": render::qs(&t.grid),
                "min_count": t.min_count,
                "max_count": t.max_count,
                "box_volume": render::q(&t.box_volume),
                "covered_volume": render::q(&t.covered_volume),
            });
            let res = ok(payload);
            Ok(if t.tiles {
                res
            } else {
                res.refuted(format!("cell counts range over [{}, {}], not exactly 1", t.min_count, t.max_count))
            })
        }
        Request::LatticeSearch { region, bound } => {
            let region = build_region(region)?;
            let s = lattice_tiling_search(&region, &bound.0)?;
            let payload = json!({
                "lattices": s.lattices.iter().map(|b| render::q_points(b)).collect::<Vec<_>>(),
                "candidates": s.candidates,
                "bound": render::q(&s.bound),
                "grid": render::qs(&s.grid),
                "covolume": render::q(&s.covolume),
            });
            Ok(if s.lattices.is_empty() { none(payload) } else { ok(payload) })
        }
        Request::RearrangedCube { p } => {
            let c = rearranged_cube(*p)?;
            let payload = json!({
                "p": c.p,
                "upper": triangle(&c.upper),
                "lower": triangle(&c.lower),
                "fold": fold(&c.fold),
                "upper_fold": fold(&c.upper_fold),
                "lower_fold": fold(&c.lower_fold),
            });
            let res = ok(payload);
            Ok(if c.fold.congruent {
                res
            } else {
                res.refuted("the pieces do not fold onto the unit square")
            })
        }
        Request::Golden => {
            let table = golden::run_all();
            let failed: Vec<&str> = table.iter().filter(|c| !c.passed).map(|c| c.tag.as_str()).collect();
            let payload = json!({
                "total": table.len(),
                "passed": table.len() - failed.len(),
                "cases": table.iter().map(|c| json!({ "tag": c.tag, "cmd": c.cmd, "passed": c.passed, "detail": c.detail })).collect::<Vec<_>>(),
            });
            let res = ok(payload);
            Ok(if failed.is_empty() {
                res
            } else {
                res.refuted(format!("failed: {}", failed.join(", ")))
            })
        }
    }
}

fn report_result(res: CommandResult, rep: &spectral_pairs::validation::ParsevalReport) -> CommandResult {
    let mut res = res.with_csv(render::report_csv(rep));
    if !rep.bessel_ok() {
        res = res.refuted(format!("Bessel bound exceeded: max sum {}", rep.max_sum));
    } else if !rep.passed {
        res = res.refuted(format!("partial sums fall below 1 - {}: min sum {}", rep.tol, rep.min_sum));
    }
    res
}

impl CommandResult {
    fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

fn chain_from_spec(c: &ChainSpec) -> Result<OperationChain> {
    let chain = OperationChain {
        base_length: c.base_length,
        steps: c
            .steps
            .iter()
            .map(|(k, d)| match k {
                StepKind::I => Step::I(*d),
                StepKind::II => Step::II(*d),
            })
            .collect(),
    };
    chain.validate()?;
    Ok(chain)
}

fn fourier_measure(m: &MeasureSpec) -> Result<Box<dyn FourierMeasure>> {
    Ok(match m {
        MeasureSpec::Ifs { scale, digits } => Box::new(ifs(*scale, digits)?),
        MeasureSpec::IntervalUnion { offsets } => Box::new(IntervalUnion::new(set(offsets)?)?),
        MeasureSpec::Atoms { points } => {
            let s = set(points)?;
            if s.is_empty() {
                return Err(Error::EmptySet);
            }
            Box::new(s)
        }
    })
}

fn one_dimensional(points: &[crate::request::QPoint]) -> Result<Vec<Rational>> {
    points
        .iter()
        .map(|p| {
            let c = p.coords();
            if c.len() == 1 {
                Ok(c[0])
            } else {
                Err(Error::DimensionMismatch { expected: 1, found: c.len() })
            }
        })
        .collect()
}

fn spectrum_source(s: &SpectrumSpec) -> Result<Box<dyn SpectrumSource>> {
    Ok(match s {
        SpectrumSpec::Finite { points } => Box::new(RationalSpectrum::new(one_dimensional(points)?)),
        SpectrumSpec::QuasiLattice { finite, period } => Box::new(QuasiLattice::new(rationals(finite), period.0)?),
        SpectrumSpec::Cycle { scale, digits, l } => Box::new(cycle_spectrum(&ifs(*scale, digits)?, &set(l)?)?),
    })
}

fn spectrum_descriptor(s: &SpectrumSpec) -> Result<SpectrumDescriptor> {
    Ok(match s {
        SpectrumSpec::Finite { points } => SpectrumDescriptor::Finite(points.iter().map(|p| p.coords()).collect()),
        SpectrumSpec::QuasiLattice { finite, period } => {
            SpectrumDescriptor::QuasiLattice(QuasiLattice::new(rationals(finite), period.0)?)
        }
        SpectrumSpec::Cycle { scale, digits, l } => {
            SpectrumDescriptor::Generated(cycle_spectrum(&ifs(*scale, digits)?, &set(l)?)?)
        }
    })
}

/// Exact points of a one-dimensional spectrum with `|λ| < radius`.
fn exact_points(s: &SpectrumSpec, radius: f64) -> Result<Vec<Rational>> {
    Ok(match s {
        SpectrumSpec::Finite { points } => one_dimensional(points)?
            .into_iter()
            .filter(|x| to_f64(x).abs() < radius)
            .collect(),
        SpectrumSpec::QuasiLattice { finite, period } => {
            QuasiLattice::new(rationals(finite), period.0)?.points_within(radius)
        }
        SpectrumSpec::Cycle { scale, digits, l } => {
            cycle_spectrum(&ifs(*scale, digits)?, &set(l)?)?.elements_within(radius)
        }
    })
}

fn build_region(r: &RegionSpec) -> Result<BoxUnionRegion> {
    match r {
        RegionSpec::Staircase => Ok(BoxUnionRegion::staircase()),
        RegionSpec::UnitCube { dim } => {
            if *dim == 0 {
                return Err(pre("dimension must be positive"));
            }
            Ok(BoxUnionRegion::unit_cube(*dim))
        }
        RegionSpec::Cells { cell_size, cells } => BoxUnionRegion::new(rationals(cell_size), cells.clone()),
        RegionSpec::IntervalUnion { offsets } => {
            BoxUnionRegion::new(vec![int(1)], set(offsets)?.iter().map(|a| vec![a]).collect())
        }
    }
}

/// Slice spectrum for the first axis order, in lexicographic order, whose
/// slices are constant.
fn first_slice_order(region: &BoxUnionRegion) -> Result<(Vec<usize>, ProductSpectrum)> {
    let mut order: Vec<usize> = (0..region.dimension()).collect();
    loop {
        match slice_spectrum(region, &order) {
            Ok(s) => return Ok((order, s)),
            Err(e @ Error::NonConstantSlices(_)) if !next_permutation(&mut order) => return Err(e),
            Err(Error::NonConstantSlices(_)) => {}
            Err(e) => return Err(e),
        }
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).unwrap();
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn triangle(t: &Triangle) -> Value {
    Value::Array(t.0.iter().map(|p| render::qs(p)).collect())
}

fn fold(f: &FoldReport) -> Value {
    json!({
        "resolution": f.resolution,
        "min_mass": render::q(&f.min_mass),
        "max_mass": render::q(&f.max_mass),
        "congruent": f.congruent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutations_in_lexicographic_order() {
        let mut v = vec![0, 1, 2];
        let mut seen = vec![v.clone()];
        while next_permutation(&mut v) {
            seen.push(v.clone());
        }
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[1], vec![0, 2, 1]);
        assert_eq!(seen[5], vec![2, 1, 0]);
    }
}
