//! Wire format of requests. Rationals are JSON integers or `"p/q"` strings.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;

use spectral_pairs::exact::{int, parse_rational};
use spectral_pairs::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Q(pub Rational);

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Q;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an integer or a \"p/q\" string")
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Q, E> {
                Ok(Q(int(v)))
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Q, E> {
                i64::try_from(v).map(|v| Q(int(v))).map_err(|_| E::custom("integer out of range"))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Q, E> {
                parse_rational(v).map(Q).map_err(|e| E::custom(e.to_string()))
            }
        }
        d.deserialize_any(V)
    }
}

pub fn rationals(v: &[Q]) -> Vec<Rational> {
    v.iter().map(|q| q.0).collect()
}

/// A rational point given as a scalar or as a coordinate list.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum QPoint {
    Scalar(Q),
    Vector(Vec<Q>),
}

impl QPoint {
    pub fn coords(&self) -> Vec<Rational> {
        match self {
            QPoint::Scalar(q) => vec![q.0],
            QPoint::Vector(v) => rationals(v),
        }
    }
}

/// A real point given as a scalar or as a coordinate list.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum FPoint {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl FPoint {
    pub fn coords(&self) -> Vec<f64> {
        match self {
            FPoint::Scalar(x) => vec![*x],
            FPoint::Vector(v) => v.clone(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ScaleSpec {
    Integer(i64),
    Matrix(Vec<Vec<i64>>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum DigitSpec {
    Integers(Vec<i64>),
    Vectors(Vec<Vec<i64>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum StepKind {
    I,
    II,
}

/// `[["II", 4], ["I", 2]]` lists steps in the order they are applied.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub base_length: i64,
    pub steps: Vec<(StepKind, i64)>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MeasureSpec {
    Ifs {
        #[serde(rename = "A")]
        scale: i64,
        #[serde(rename = "B")]
        digits: Vec<i64>,
    },
    IntervalUnion {
        #[serde(rename = "A")]
        offsets: Vec<i64>,
    },
    Atoms {
        #[serde(rename = "A")]
        points: Vec<i64>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpectrumSpec {
    Finite {
        points: Vec<QPoint>,
    },
    QuasiLattice {
        finite: Vec<Q>,
        period: Q,
    },
    /// The spectrum generated from `L` and the cycles of `μ_{A,B}`.
    Cycle {
        #[serde(rename = "A")]
        scale: i64,
        #[serde(rename = "B")]
        digits: Vec<i64>,
        #[serde(rename = "L")]
        l: Vec<i64>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum TransformMeasure {
    Ifs {
        #[serde(rename = "A")]
        scale: i64,
        #[serde(rename = "B")]
        digits: Vec<Q>,
    },
    Atoms {
        points: Vec<QPoint>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub linear: Vec<Vec<Q>>,
    pub shift: Vec<Q>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RegionSpec {
    Staircase,
    UnitCube {
        dim: usize,
    },
    Cells {
        cell_size: Vec<Q>,
        cells: Vec<Vec<i64>>,
    },
    IntervalUnion {
        #[serde(rename = "A")]
        offsets: Vec<i64>,
    },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodicSpec {
    pub basis: Vec<Vec<Q>>,
    #[serde(default)]
    pub offsets: Option<Vec<Vec<Q>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartSpec {
    pub b: Q,
    #[serde(rename = "C")]
    pub c: Vec<i64>,
    pub a: Q,
    #[serde(rename = "L")]
    pub l: Vec<i64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "cmd", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Request {
    CertifyFinite {
        #[serde(rename = "A")]
        a: Vec<i64>,
        #[serde(rename = "L")]
        l: Vec<Q>,
    },
    EnumerateSpectra {
        #[serde(rename = "A")]
        a: Vec<i64>,
        denominator_bound: Option<u64>,
    },
    Decompose {
        #[serde(rename = "A")]
        a: Vec<i64>,
    },
    SpectrumFromChain {
        chain: Option<ChainSpec>,
        #[serde(rename = "A")]
        a: Option<Vec<i64>>,
    },
    FindComplement {
        #[serde(rename = "A")]
        a: Vec<i64>,
        n: i64,
    },
    IntervalSpectra {
        #[serde(rename = "A")]
        a: Vec<i64>,
        denominator_bound: Option<u64>,
    },
    TilesLine {
        #[serde(rename = "A")]
        a: Vec<i64>,
        n_max: Option<i64>,
    },
    AsIfs {
        #[serde(rename = "A")]
        a: Vec<i64>,
        n_max: Option<i64>,
    },
    InvariantFt {
        #[serde(rename = "A")]
        scale: ScaleSpec,
        #[serde(rename = "B")]
        digits: DigitSpec,
        x: Vec<FPoint>,
        tol: Option<f64>,
    },
    Factor {
        #[serde(rename = "A")]
        scale: i64,
        #[serde(rename = "B")]
        digits: Vec<i64>,
        a: i64,
        p: usize,
    },
    CycleSpectrum {
        #[serde(rename = "A")]
        scale: i64,
        #[serde(rename = "B")]
        digits: Vec<i64>,
        #[serde(rename = "L")]
        l: Vec<i64>,
        radius: Option<f64>,
    },
    TwistedProduct {
        a: i64,
        p: usize,
        n: Vec<i64>,
        #[serde(rename = "C")]
        c: Vec<Vec<i64>>,
        #[serde(rename = "L")]
        l: Vec<Vec<i64>>,
        radius: Option<f64>,
    },
    Compose {
        parts: Vec<PartSpec>,
    },
    Transform {
        measure: TransformMeasure,
        spectrum: SpectrumSpec,
        map: MapSpec,
        radius: Option<f64>,
    },
    NewSpectrum {
        #[serde(rename = "A")]
        scale: i64,
        #[serde(rename = "B")]
        digits: Vec<i64>,
        #[serde(rename = "L")]
        l: Vec<i64>,
        #[serde(rename = "L_new")]
        l_new: Vec<i64>,
        radius: Option<f64>,
    },
    InfiniteFamily {
        #[serde(rename = "A")]
        scale: i64,
        #[serde(rename = "B")]
        digits: Vec<i64>,
        #[serde(rename = "L")]
        l: Vec<i64>,
        count: usize,
        radius: Option<f64>,
    },
    Parseval {
        measure: MeasureSpec,
        spectrum: SpectrumSpec,
        radius: Option<f64>,
        tol: Option<f64>,
        samples: Option<usize>,
        seed: Option<u64>,
    },
    OrthogonalFamily {
        measure: MeasureSpec,
        radius: Option<f64>,
        cap: Option<usize>,
        /// Scan this spectrum's points instead of the zero grid.
        pool: Option<SpectrumSpec>,
    },
    Deficiency {
        #[serde(rename = "A")]
        scale: i64,
        #[serde(rename = "B")]
        digits: Vec<i64>,
        x: f64,
        radius: Option<f64>,
        threshold: Option<f64>,
        factors: Option<(Vec<i64>, Vec<i64>)>,
    },
    ProductSpectrum {
        region: RegionSpec,
        order: Option<Vec<usize>>,
        radius: Option<f64>,
        tol: Option<f64>,
        samples: Option<usize>,
        seed: Option<u64>,
    },
    CheckTiling {
        region: RegionSpec,
        translations: PeriodicSpec,
        #[serde(rename = "box")]
        fundamental_box: Vec<Q>,
    },
    LatticeSearch {
        region: RegionSpec,
        bound: Q,
    },
    RearrangedCube {
        p: i64,
    },
    Golden,
}

impl Request {
    pub fn name(&self) -> &'static str {
        match self {
            Request::CertifyFinite { .. } => "certify-finite",
            Request::EnumerateSpectra { .. } => "enumerate-spectra",
            Request::Decompose { .. } => "decompose",
            Request::SpectrumFromChain { .. } => "spectrum-from-chain",
            Request::FindComplement { .. } => "find-complement",
            Request::IntervalSpectra { .. } => "interval-spectra",
            Request::TilesLine { .. } => "tiles-line",
            Request::AsIfs { .. } => "as-ifs",
            Request::InvariantFt { .. } => "invariant-ft",
            Request::Factor { .. } => "factor",
            Request::CycleSpectrum { .. } => "cycle-spectrum",
            Request::TwistedProduct { .. } => "twisted-product",
            Request::Compose { .. } => "compose",
            Request::Transform { .. } => "transform",
            Request::NewSpectrum { .. } => "new-spectrum",
            Request::InfiniteFamily { .. } => "infinite-family",
            Request::Parseval { .. } => "parseval",
            Request::OrthogonalFamily { .. } => "orthogonal-family",
            Request::Deficiency { .. } => "deficiency",
            Request::ProductSpectrum { .. } => "product-spectrum",
            Request::CheckTiling { .. } => "check-tiling",
            Request::LatticeSearch { .. } => "lattice-search",
            Request::RearrangedCube { .. } => "rearranged-cube",
            Request::Golden => "golden",
        }
    }
}
