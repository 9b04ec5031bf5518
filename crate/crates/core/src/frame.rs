//! Generalized coherent-state families: orbit vectors `|m⟩ = π(σ(m))|0⟩`,
//! the frame operator `C = Σ w_m |m⟩⟨m|`, the Schur constant
//! `λ = ⟨0|C|0⟩`, and the reproducing kernel `k(m, m′) = ⟨m|m′⟩/λ`.
//!
//! Integrals over the orbit are weighted finite samples (a quadrature rule or
//! a counting measure). Unimodularity and square integrability are caller
//! assumptions; tightness `C = λI` is measured, not assumed, and only on a
//! leading probe block because the top Fock levels are truncated.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::RepMatrix;
use crate::deformed::{deformed_generator, DeformationFunction};
use crate::error::{Error, Result};
use crate::fock::{
    disk_quadrature, half_disk_quadrature, weighted_projector_sum, DisplacementGenerator,
    FockOperator, FockSpace, MatrixDoc, StateVector,
};
use crate::linalg::{self, CMatrix, CVector, ZERO};

pub const UNITARITY_TOLERANCE: f64 = 1e-8;
pub const FIDUCIAL_TOLERANCE: f64 = 1e-12;
/// `λ` at or below this is a degenerate family.
pub const LAMBDA_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(pub String);

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_string())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

/// How a sample acts on the Hilbert space.
#[derive(Debug, Clone)]
pub enum SampleRep {
    Dense(RepMatrix),
    /// `e^{iν} exp(z A† − z̄ A)`, sharing one diagonalized generator.
    Displacement {
        generator: Arc<DisplacementGenerator>,
        nu: f64,
        z: Complex64,
    },
}

impl SampleRep {
    pub fn displacement(generator: Arc<DisplacementGenerator>, z: Complex64) -> Self {
        SampleRep::Displacement {
            generator,
            nu: 0.0,
            z,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SampleRep::Dense(m) => m.dim(),
            SampleRep::Displacement { generator, .. } => generator.space().dim(),
        }
    }

    pub fn apply(&self, v: &CVector) -> CVector {
        match self {
            SampleRep::Dense(m) => m.entries() * v,
            SampleRep::Displacement { generator, nu, z } => {
                generator.apply(*z, v) * Complex64::from_polar(1.0, *nu)
            }
        }
    }

    pub fn matrix(&self) -> CMatrix {
        match self {
            SampleRep::Dense(m) => m.entries().clone(),
            SampleRep::Displacement { generator, nu, z } => {
                generator.operator(*z).into_matrix() * Complex64::from_polar(1.0, *nu)
            }
        }
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.matrix())
    }
}

#[derive(Debug, Clone)]
pub struct GroupSample {
    pub label: Label,
    pub rep: SampleRep,
    pub weight: f64,
}

impl GroupSample {
    /// Dense representations are checked for unitarity here; displacement
    /// samples are unitary by construction.
    pub fn new(label: impl Into<Label>, rep: SampleRep, weight: f64) -> Result<Self> {
        let label = label.into();
        if !(weight > 0.0) || !weight.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sample `{label}` has non-positive weight {weight}"
            )));
        }
        if let SampleRep::Dense(_) = rep {
            let deviation = rep.unitarity_defect();
            if !(deviation <= UNITARITY_TOLERANCE) {
                return Err(Error::NotUnitary {
                    label: label.0,
                    deviation,
                });
            }
        }
        Ok(Self { label, rep, weight })
    }
}

/// Fiducial vector plus weighted group samples.
#[derive(Debug, Clone)]
pub struct CoherentFamily {
    fiducial: StateVector,
    samples: Vec<GroupSample>,
    index: HashMap<Label, usize>,
}

impl CoherentFamily {
    pub fn new(fiducial: StateVector, samples: Vec<GroupSample>) -> Result<Self> {
        let norm = fiducial.norm();
        if (norm - 1.0).abs() > FIDUCIAL_TOLERANCE {
            return Err(Error::FiducialNotNormalized(norm));
        }
        let mut index = HashMap::with_capacity(samples.len());
        for (i, s) in samples.iter().enumerate() {
            if s.rep.dim() != fiducial.dim() {
                return Err(Error::DimensionMismatch {
                    expected: fiducial.dim(),
                    actual: s.rep.dim(),
                });
            }
            if index.insert(s.label.clone(), i).is_some() {
                return Err(Error::DuplicateLabel(s.label.0.clone()));
            }
        }
        Ok(Self {
            fiducial,
            samples,
            index,
        })
    }

    pub fn fiducial(&self) -> &StateVector {
        &self.fiducial
    }

    pub fn samples(&self) -> &[GroupSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.fiducial.dim()
    }

    pub fn space(&self) -> FockSpace {
        self.fiducial.space()
    }

    pub fn position(&self, label: &Label) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownLabel(label.0.clone()))
    }

    pub fn sample(&self, label: &Label) -> Result<&GroupSample> {
        Ok(&self.samples[self.position(label)?])
    }

    fn orbit_raw(&self, i: usize) -> CVector {
        self.samples[i].rep.apply(self.fiducial.amplitudes())
    }

    /// `|m⟩ = π(σ(m))|0⟩`.
    pub fn orbit_vector(&self, sample: &GroupSample) -> Result<StateVector> {
        if sample.rep.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: sample.rep.dim(),
            });
        }
        StateVector::new(self.space(), sample.rep.apply(self.fiducial.amplitudes()))
    }

    pub fn orbit_vector_of(&self, label: &Label) -> Result<StateVector> {
        self.orbit_vector(self.sample(label)?)
    }

    /// All orbit vectors, in sample order.
    pub fn orbit_vectors(&self) -> Vec<CVector> {
        (0..self.samples.len())
            .into_par_iter()
            .map(|i| self.orbit_raw(i))
            .collect()
    }

    /// `C = Σ w_m |m⟩⟨m|`, reduced over a fixed pairwise tree.
    pub fn frame_operator(&self) -> Result<FockOperator> {
        let matrix = weighted_projector_sum(self.dim(), self.samples.len(), &|i| {
            (self.orbit_raw(i), self.samples[i].weight)
        })
        .ok_or(Error::EmptyFamily)?;
        FockOperator::from_matrix(self.space(), matrix)
    }

    /// `λ = ⟨0|C|0⟩`.
    pub fn schur_lambda(&self, c: &FockOperator) -> Result<f64> {
        if c.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: c.dim(),
            });
        }
        let v = self.fiducial.amplitudes();
        Ok(v.dotc(&(c.matrix() * v)).re)
    }

    /// `Σ w_m |⟨0|m⟩|²`, computed without forming `C`.
    pub fn lambda_from_overlaps(&self) -> Result<f64> {
        let v = self.fiducial.amplitudes();
        linalg::tree_sum(
            self.samples.len(),
            crate::fock::REDUCTION_CHUNK,
            &|r: std::ops::Range<usize>| {
                r.map(|i| self.samples[i].weight * v.dotc(&self.orbit_raw(i)).norm_sqr())
                    .sum::<f64>()
            },
        )
        .ok_or(Error::EmptyFamily)
    }

    /// `C`, `λ` and `‖C/λ − I‖` on the leading `probe_dim` block.
    pub fn tightness(&self, probe_dim: usize) -> Result<FrameReport> {
        if probe_dim == 0 || probe_dim > self.dim() {
            return Err(Error::InvalidInput(format!(
                "probe dimension {probe_dim} outside 1..={}",
                self.dim()
            )));
        }
        let c = self.frame_operator()?;
        let lambda = self.schur_lambda(&c)?;
        if lambda <= LAMBDA_FLOOR {
            return Err(Error::DegenerateFamily(lambda));
        }
        let block = c.block(probe_dim) / Complex64::new(lambda, 0.0);
        let deviation = linalg::spectral_norm(&(block - CMatrix::identity(probe_dim, probe_dim)));
        Ok(FrameReport {
            frame: c,
            lambda,
            tightness_deviation: deviation,
            probe_dim,
            samples: self.samples.len(),
        })
    }

    /// `max_m min_φ ‖U_t|m⟩ − e^{iφ}|m_t⟩‖` over the entries of `relabel`.
    pub fn stability_check(
        &self,
        u_t: &FockOperator,
        relabel: &BTreeMap<Label, Label>,
    ) -> Result<f64> {
        if u_t.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: u_t.dim(),
            });
        }
        let pairs = relabel
            .iter()
            .map(|(m, mt)| Ok((self.position(m)?, self.position(mt)?)))
            .collect::<Result<Vec<_>>>()?;
        let residuals: Vec<f64> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let evolved = u_t.matrix() * self.orbit_raw(i);
                align_phase(&evolved, &self.orbit_raw(j)).residual
            })
            .collect();
        Ok(residuals.into_iter().fold(0.0, f64::max))
    }

    /// Compares `π(g′)|m⟩` with `|g′m⟩` up to a phase.
    pub fn cocycle_phase(
        &self,
        g_prime: &SampleRep,
        m: &Label,
        gm: &Label,
    ) -> Result<PhaseAlignment> {
        let v = g_prime.apply(&self.orbit_raw(self.position(m)?));
        Ok(align_phase(&v, &self.orbit_raw(self.position(gm)?)))
    }
}

/// Result of aligning `v ≈ phase · target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAlignment {
    /// `⟨target|v⟩ / ‖target‖²`; unit modulus when the two are proportional.
    pub phase: Complex64,
    /// `‖v − e^{i arg(phase)} target‖`.
    pub residual: f64,
}

/// Aligns by the phase of the maximal-overlap inner product.
pub fn align_phase(v: &CVector, target: &CVector) -> PhaseAlignment {
    let overlap = target.dotc(v);
    let norm2 = target.norm_squared();
    let unit = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    PhaseAlignment {
        phase: if norm2 > 0.0 { overlap / norm2 } else { ZERO },
        residual: (v - target * unit).norm(),
    }
}

/// Frame operator with its Schur constant and tightness on a probe block.
#[derive(Debug, Clone, Serialize)]
pub struct FrameReport {
    #[serde(skip)]
    pub frame: FockOperator,
    pub lambda: f64,
    pub tightness_deviation: f64,
    pub probe_dim: usize,
    pub samples: usize,
}

/// `k(m, m′) = ⟨m|m′⟩/λ` over a family, with all orbit vectors cached.
#[derive(Debug, Clone)]
pub struct ReproducingKernel<'a> {
    family: &'a CoherentFamily,
    orbits: Vec<CVector>,
    lambda: f64,
}

impl<'a> ReproducingKernel<'a> {
    pub fn new(family: &'a CoherentFamily, lambda: f64) -> Result<Self> {
        if lambda <= LAMBDA_FLOOR {
            return Err(Error::DegenerateFamily(lambda));
        }
        Ok(Self {
            family,
            orbits: family.orbit_vectors(),
            lambda,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn family(&self) -> &CoherentFamily {
        self.family
    }

    pub fn orbit(&self, i: usize) -> &CVector {
        &self.orbits[i]
    }

    pub fn kernel_at(&self, i: usize, j: usize) -> Complex64 {
        self.orbits[i].dotc(&self.orbits[j]) / self.lambda
    }

    pub fn kernel(&self, m: &Label, m2: &Label) -> Result<Complex64> {
        Ok(self.kernel_at(self.family.position(m)?, self.family.position(m2)?))
    }

    /// `(1/λ) Σ_{m″} w_{m″} k(m, m″) k(m″, m′)`, which reproduces `k(m, m′)`
    /// for a tight family.
    pub fn reproduction(&self, m: &Label, m2: &Label) -> Result<Complex64> {
        let i = self.family.position(m)?;
        let j = self.family.position(m2)?;
        let samples = self.family.samples();
        let sum = linalg::tree_sum(
            samples.len(),
            crate::fock::REDUCTION_CHUNK,
            &|r: std::ops::Range<usize>| {
                let mut acc = ZERO;
                for k in r {
                    acc += self.kernel_at(i, k) * self.kernel_at(k, j) * samples[k].weight;
                }
                acc
            },
        )
        .ok_or(Error::EmptyFamily)?;
        Ok(sum / self.lambda)
    }

    /// Gram matrix `[k(mᵢ, mⱼ)]`.
    pub fn gram(&self, labels: &[Label]) -> Result<CMatrix> {
        let idx = labels
            .iter()
            .map(|l| self.family.position(l))
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_fn(idx.len(), idx.len(), |a, b| {
            self.kernel_at(idx[a], idx[b])
        }))
    }

    /// `Σ_{m,m′} conj f(m) k(m, m′) g(m′) w_m w_{m′}`, factored as
    /// `⟨u|v⟩/λ` with `u = Σ w f |m⟩` and `v = Σ w g |m⟩`.
    pub fn inner_product_indexed(&self, f: &[Complex64], g: &[Complex64]) -> Result<Complex64> {
        let n = self.orbits.len();
        if f.len() != n || g.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: f.len().min(g.len()),
            });
        }
        let combine = |values: &[Complex64]| {
            linalg::tree_sum(n, crate::fock::REDUCTION_CHUNK, &|r: std::ops::Range<
                usize,
            >| {
                let mut acc = CVector::zeros(self.family.dim());
                for k in r {
                    acc += &self.orbits[k] * (values[k] * self.family.samples()[k].weight);
                }
                acc
            })
            .ok_or(Error::EmptyFamily)
        };
        let u = combine(f)?;
        let v = combine(g)?;
        Ok(u.dotc(&v) / self.lambda)
    }

    pub fn inner_product(
        &self,
        f: &BTreeMap<Label, Complex64>,
        g: &BTreeMap<Label, Complex64>,
    ) -> Result<Complex64> {
        let lookup = |values: &BTreeMap<Label, Complex64>| {
            self.family
                .samples()
                .iter()
                .map(|s| {
                    values
                        .get(&s.label)
                        .copied()
                        .ok_or_else(|| Error::UnknownLabel(s.label.0.clone()))
                })
                .collect::<Result<Vec<_>>>()
        };
        self.inner_product_indexed(&lookup(f)?, &lookup(g)?)
    }

    /// Coefficients `⟨m|ψ⟩` in sample order.
    pub fn coefficients(&self, psi: &StateVector) -> Vec<Complex64> {
        self.orbits
            .iter()
            .map(|m| m.dotc(psi.amplitudes()))
            .collect()
    }

    /// `(1/λ) Σ w_m ⟨m|ψ⟩ |m⟩`.
    pub fn reconstruct(&self, psi: &StateVector) -> Result<StateVector> {
        let samples = self.family.samples();
        let v = linalg::tree_sum(
            samples.len(),
            crate::fock::REDUCTION_CHUNK,
            &|r: std::ops::Range<usize>| {
                let mut acc = CVector::zeros(self.family.dim());
                for k in r {
                    let m = &self.orbits[k];
                    acc += m * (m.dotc(psi.amplitudes()) * samples[k].weight);
                }
                acc
            },
        )
        .ok_or(Error::EmptyFamily)?;
        StateVector::new(psi.space(), v / Complex64::new(self.lambda, 0.0))
    }
}

pub fn orbit_vector(family: &CoherentFamily, sample: &GroupSample) -> Result<StateVector> {
    family.orbit_vector(sample)
}

pub fn frame_operator(family: &CoherentFamily) -> Result<FockOperator> {
    family.frame_operator()
}

pub fn schur_lambda(family: &CoherentFamily, c: &FockOperator) -> Result<f64> {
    family.schur_lambda(c)
}

pub fn tightness(family: &CoherentFamily, probe_dim: usize) -> Result<FrameReport> {
    family.tightness(probe_dim)
}

pub fn stability_check(
    family: &CoherentFamily,
    u_t: &FockOperator,
    relabel: &BTreeMap<Label, Label>,
) -> Result<f64> {
    family.stability_check(u_t, relabel)
}

/// `k(m, m′) = ⟨m|m′⟩/λ` for a single pair.
pub fn reproducing_kernel(
    family: &CoherentFamily,
    lambda: f64,
    m: &Label,
    m2: &Label,
) -> Result<Complex64> {
    if lambda <= LAMBDA_FLOOR {
        return Err(Error::DegenerateFamily(lambda));
    }
    let a = family.orbit_vector_of(m)?;
    let b = family.orbit_vector_of(m2)?;
    Ok(a.inner(&b) / lambda)
}

pub fn kernel_inner_product(
    family: &CoherentFamily,
    lambda: f64,
    f: &BTreeMap<Label, Complex64>,
    g: &BTreeMap<Label, Complex64>,
) -> Result<Complex64> {
    ReproducingKernel::new(family, lambda)?.inner_product(f, g)
}

/// Counting-measure weights on the cosets `G/G₀`: `fiber_count / |G₀|`.
pub fn induced_measure(
    group_order: usize,
    isotropy_order: usize,
    fiber_counts: &[usize],
) -> Result<Vec<f64>> {
    if isotropy_order == 0 {
        return Err(Error::ZeroIsotropy);
    }
    if let Some(&count) = fiber_counts.iter().find(|&&c| c % isotropy_order != 0) {
        return Err(Error::FiberNotDivisible {
            count,
            isotropy: isotropy_order,
        });
    }
    let total: usize = fiber_counts.iter().sum();
    if total != group_order {
        return Err(Error::InvalidInput(format!(
            "fibers cover {total} group elements, group has {group_order}"
        )));
    }
    Ok(fiber_counts
        .iter()
        .map(|&c| c as f64 / isotropy_order as f64)
        .collect())
}

/// Weyl family over a polar disk grid with `(1/π) d²z` quadrature weights.
/// Labels are `r{i}:t{j}`.
pub fn weyl_disk_family(
    space: FockSpace,
    radius: f64,
    n_r: usize,
    n_theta: usize,
) -> Result<CoherentFamily> {
    let generator = Arc::new(DisplacementGenerator::harmonic(space)?);
    grid_family(
        space,
        generator,
        disk_quadrature(radius, n_r, n_theta)?,
        n_theta,
    )
}

/// The same grid restricted to the upper half-disk, which is not tight.
pub fn weyl_half_disk_family(
    space: FockSpace,
    radius: f64,
    n_r: usize,
    n_theta: usize,
) -> Result<CoherentFamily> {
    let generator = Arc::new(DisplacementGenerator::harmonic(space)?);
    grid_family(
        space,
        generator,
        half_disk_quadrature(radius, n_r, n_theta)?,
        n_theta,
    )
}

/// Displaced vacua `D_f(z)|0⟩` over the disk grid.
pub fn deformed_disk_family(
    space: FockSpace,
    f: &DeformationFunction,
    radius: f64,
    n_r: usize,
    n_theta: usize,
) -> Result<CoherentFamily> {
    let generator = Arc::new(deformed_generator(space, f)?);
    grid_family(
        space,
        generator,
        disk_quadrature(radius, n_r, n_theta)?,
        n_theta,
    )
}

fn grid_family(
    space: FockSpace,
    generator: Arc<DisplacementGenerator>,
    points: Vec<(Complex64, f64)>,
    n_theta: usize,
) -> Result<CoherentFamily> {
    let samples = points
        .into_iter()
        .enumerate()
        .map(|(k, (z, w))| {
            let label = format!("r{}:t{}", k / n_theta, k % n_theta);
            GroupSample::new(label, SampleRep::displacement(Arc::clone(&generator), z), w)
        })
        .collect::<Result<Vec<_>>>()?;
    CoherentFamily::new(space.vacuum(), samples)
}

/// Weyl family on explicit points `(label, z, weight)` with vacuum fiducial.
pub fn weyl_point_family(
    space: FockSpace,
    points: Vec<(Label, Complex64, f64)>,
) -> Result<CoherentFamily> {
    let generator = Arc::new(DisplacementGenerator::harmonic(space)?);
    let samples = points
        .into_iter()
        .map(|(label, z, w)| {
            GroupSample::new(label, SampleRep::displacement(Arc::clone(&generator), z), w)
        })
        .collect::<Result<Vec<_>>>()?;
    CoherentFamily::new(space.vacuum(), samples)
}

/// Family specification file.
///
/// ```json
/// {"fiducial": [[1, 0], [0, 0]],
///  "samples": [{"label": "a", "weight": 1.0, "rep": "weyl:z=0.5-1i"},
///              {"label": "b", "weight": 1.0, "rep": {"dim": 2, "entries": [[0,0],[1,0],[1,0],[0,0]]}}]}
/// ```
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyDoc {
    pub fiducial: Vec<(f64, f64)>,
    pub samples: Vec<SampleDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleDoc {
    pub label: String,
    pub weight: f64,
    pub rep: RepDoc,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RepDoc {
    /// `"weyl:z=a+bi"`.
    Builtin(String),
    Matrix(MatrixDoc),
}

impl FamilyDoc {
    pub fn into_family(self) -> Result<CoherentFamily> {
        let amps: Vec<_> = self
            .fiducial
            .iter()
            .map(|&(re, im)| Complex64::new(re, im))
            .collect();
        let fiducial = StateVector::from_amplitudes(amps)?;
        let space = fiducial.space();
        let mut generator: Option<Arc<DisplacementGenerator>> = None;
        let mut samples = Vec::with_capacity(self.samples.len());
        for s in self.samples {
            let rep = match s.rep {
                RepDoc::Matrix(m) => SampleRep::Dense(RepMatrix::new(m.to_matrix()?)?),
                RepDoc::Builtin(text) => {
                    let z = parse_weyl_builtin(&text)?;
                    let g = match &generator {
                        Some(g) => Arc::clone(g),
                        None => {
                            let g = Arc::new(DisplacementGenerator::harmonic(space)?);
                            generator = Some(Arc::clone(&g));
                            g
                        }
                    };
                    SampleRep::displacement(g, z)
                }
            };
            samples.push(GroupSample::new(s.label, rep, s.weight)?);
        }
        CoherentFamily::new(fiducial, samples)
    }
}

/// Parses `weyl:z=<complex>`.
pub fn parse_weyl_builtin(text: &str) -> Result<Complex64> {
    let body = text
        .strip_prefix("weyl:z=")
        .ok_or_else(|| Error::Format(format!("unknown builtin representation `{text}`")))?;
    parse_complex(body)
}

/// Parses `a`, `bi`, `a+bi` or `a-bi` (also `i`, `-i`, `a+i`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let bad = || Error::Format(format!("cannot parse complex number `{text}`"));
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| bad());
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        if (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
            split = Some(k);
            break;
        }
    }
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, imag(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{coherent_state, harmonic_hamiltonian};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Permutation matrix sending `|k⟩ ↦ |perm[k]⟩`.
    fn permutation(dim: usize, perm: &[usize]) -> SampleRep {
        let mut m = CMatrix::zeros(dim, dim);
        for (k, &p) in perm.iter().enumerate() {
            m[(p, k)] = c(1.0, 0.0);
        }
        SampleRep::Dense(RepMatrix::new(m).unwrap())
    }

    fn swap_to(dim: usize, n: usize) -> SampleRep {
        let mut perm: Vec<usize> = (0..dim).collect();
        perm.swap(0, n);
        permutation(dim, &perm)
    }

    #[test]
    fn identity_sample_gives_projector() {
        let s = FockSpace::new(4).unwrap();
        let fam = CoherentFamily::new(
            s.vacuum(),
            vec![GroupSample::new("e", SampleRep::Dense(RepMatrix::identity(4)), 1.0).unwrap()],
        )
        .unwrap();
        assert_eq!(fam.orbit_vector(&fam.samples()[0]).unwrap(), s.vacuum());
        let c_op = fam.frame_operator().unwrap();
        let mut p = CMatrix::zeros(4, 4);
        p[(0, 0)] = c(1.0, 0.0);
        assert_eq!(*c_op.matrix(), p);
        assert_eq!(fam.schur_lambda(&c_op).unwrap(), 1.0);
    }

    #[test]
    fn duplicated_measure_doubles_lambda() {
        let s = FockSpace::new(3).unwrap();
        let samples = ["a", "b"]
            .iter()
            .map(|l| GroupSample::new(*l, SampleRep::Dense(RepMatrix::identity(3)), 1.0).unwrap())
            .collect();
        let fam = CoherentFamily::new(s.vacuum(), samples).unwrap();
        let c_op = fam.frame_operator().unwrap();
        assert_eq!(fam.schur_lambda(&c_op).unwrap(), 2.0);
    }

    #[test]
    fn permutation_family_is_exactly_tight() {
        let dim = 6;
        let s = FockSpace::new(dim).unwrap();
        let samples = (0..dim)
            .map(|n| GroupSample::new(format!("p{n}"), swap_to(dim, n), 1.0).unwrap())
            .collect();
        let fam = CoherentFamily::new(s.vacuum(), samples).unwrap();
        let report = fam.tightness(dim).unwrap();
        assert_eq!(*report.frame.matrix(), CMatrix::identity(dim, dim));
        assert_eq!(report.lambda, 1.0);
        assert_eq!(report.tightness_deviation, 0.0);
    }

    #[test]
    fn two_basis_samples_give_rank_two_projector() {
        let s = FockSpace::new(4).unwrap();
        let samples = vec![
            GroupSample::new("0", swap_to(4, 0), 1.0).unwrap(),
            GroupSample::new("1", swap_to(4, 1), 1.0).unwrap(),
        ];
        let fam = CoherentFamily::new(s.vacuum(), samples).unwrap();
        let c_op = fam.frame_operator().unwrap();
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(1.0, 0.0),
            c(1.0, 0.0),
            ZERO,
            ZERO,
        ]));
        assert_eq!(*c_op.matrix(), expected);
    }

    #[test]
    fn weyl_sample_orbit_is_coherent_state() {
        let s = FockSpace::new(30).unwrap();
        let z = c(0.7, -0.2);
        let fam = weyl_point_family(s, vec![(Label::from("z"), z, 1.0)]).unwrap();
        let v = fam.orbit_vector_of(&"z".into()).unwrap();
        assert!(v.distance(&coherent_state(s, z).unwrap()) < 1e-13);
    }

    #[test]
    fn validation_errors() {
        let s = FockSpace::new(3).unwrap();
        let not_unitary = RepMatrix::new(CMatrix::identity(3, 3) * c(2.0, 0.0)).unwrap();
        assert!(matches!(
            GroupSample::new("x", SampleRep::Dense(not_unitary), 1.0),
            Err(Error::NotUnitary { .. })
        ));
        assert!(GroupSample::new("x", SampleRep::Dense(RepMatrix::identity(3)), 0.0).is_err());
        let fid = s.vacuum().scale(c(2.0, 0.0));
        assert!(matches!(
            CoherentFamily::new(fid, vec![]),
            Err(Error::FiducialNotNormalized(_))
        ));
        let dup = vec![
            GroupSample::new("a", SampleRep::Dense(RepMatrix::identity(3)), 1.0).unwrap(),
            GroupSample::new("a", SampleRep::Dense(RepMatrix::identity(3)), 1.0).unwrap(),
        ];
        assert!(matches!(
            CoherentFamily::new(s.vacuum(), dup),
            Err(Error::DuplicateLabel(_))
        ));
        let wrong_dim =
            vec![GroupSample::new("a", SampleRep::Dense(RepMatrix::identity(2)), 1.0).unwrap()];
        assert!(CoherentFamily::new(s.vacuum(), wrong_dim).is_err());
        let empty = CoherentFamily::new(s.vacuum(), vec![]).unwrap();
        assert!(matches!(empty.frame_operator(), Err(Error::EmptyFamily)));
    }

    #[test]
    fn degenerate_family_is_an_error() {
        // every sample maps |0⟩ outside the probe... λ = ⟨0|C|0⟩ = 0
        let s = FockSpace::new(3).unwrap();
        let samples = vec![GroupSample::new("a", swap_to(3, 2), 1.0).unwrap()];
        let fam = CoherentFamily::new(s.vacuum(), samples).unwrap();
        assert!(matches!(fam.tightness(2), Err(Error::DegenerateFamily(_))));
        assert!(fam.tightness(4).is_err());
    }

    #[test]
    fn induced_measure_examples() {
        assert_eq!(induced_measure(8, 2, &[2, 2, 2, 2]).unwrap(), vec![1.0; 4]);
        assert_eq!(induced_measure(5, 5, &[5]).unwrap(), vec![1.0]);
        assert_eq!(induced_measure(6, 1, &[1; 6]).unwrap(), vec![1.0; 6]);
        assert!(matches!(
            induced_measure(6, 0, &[6]),
            Err(Error::ZeroIsotropy)
        ));
        assert!(matches!(
            induced_measure(6, 2, &[3, 3]),
            Err(Error::FiberNotDivisible {
                count: 3,
                isotropy: 2
            })
        ));
    }

    #[test]
    fn stability_identity_and_missing_labels() {
        let s = FockSpace::new(20).unwrap();
        let fam = weyl_point_family(
            s,
            vec![
                ("a".into(), c(0.5, 0.1), 1.0),
                ("b".into(), c(-0.3, 0.4), 1.0),
            ],
        )
        .unwrap();
        let relabel: BTreeMap<Label, Label> =
            [("a".into(), "a".into()), ("b".into(), "b".into())].into();
        assert_eq!(fam.stability_check(&s.identity(), &relabel).unwrap(), 0.0);
        let bad: BTreeMap<Label, Label> = [("a".into(), "zz".into())].into();
        assert!(matches!(
            fam.stability_check(&s.identity(), &bad),
            Err(Error::UnknownLabel(_))
        ));
    }

    #[test]
    fn harmonic_evolution_rotates_labels() {
        let s = FockSpace::new(40).unwrap();
        let t = 0.4;
        let rot = Complex64::from_polar(1.0, -t);
        let z = c(0.8, 0.3);
        let fam =
            weyl_point_family(s, vec![("z".into(), z, 1.0), ("zt".into(), z * rot, 1.0)]).unwrap();
        let u = harmonic_hamiltonian(s).unwrap().evolution(t);
        let relabel: BTreeMap<Label, Label> = [("z".into(), "zt".into())].into();
        assert!(fam.stability_check(&u, &relabel).unwrap() < 1e-9);
    }

    #[test]
    fn cocycle_phase_has_unit_modulus() {
        let s = FockSpace::new(50).unwrap();
        let g = Arc::new(DisplacementGenerator::harmonic(s).unwrap());
        let (z, w) = (c(0.4, -0.3), c(-0.2, 0.6));
        let fam =
            weyl_point_family(s, vec![("m".into(), z, 1.0), ("gm".into(), z + w, 1.0)]).unwrap();
        let align = fam
            .cocycle_phase(&SampleRep::displacement(g, w), &"m".into(), &"gm".into())
            .unwrap();
        assert!((align.phase.norm() - 1.0).abs() < 1e-8);
        assert!(align.residual < 1e-8);
    }

    #[test]
    fn kernel_inner_product_matches_double_sum() {
        let s = FockSpace::new(12).unwrap();
        let pts: Vec<_> = (0..7)
            .map(|k| {
                (
                    Label(format!("p{k}")),
                    Complex64::from_polar(0.3 + 0.1 * k as f64, k as f64),
                    0.2 + 0.05 * k as f64,
                )
            })
            .collect();
        let fam = weyl_point_family(s, pts).unwrap();
        let kern = ReproducingKernel::new(&fam, 0.7).unwrap();
        let f: Vec<_> = (0..7)
            .map(|k| c(k as f64 * 0.1, 1.0 - k as f64 * 0.2))
            .collect();
        let g: Vec<_> = (0..7)
            .map(|k| c((k as f64).cos(), (k as f64).sin()))
            .collect();
        let mut naive = ZERO;
        for i in 0..7 {
            for j in 0..7 {
                let wi = fam.samples()[i].weight;
                let wj = fam.samples()[j].weight;
                naive += f[i].conj() * kern.kernel_at(i, j) * g[j] * wi * wj;
            }
        }
        let fast = kern.inner_product_indexed(&f, &g).unwrap();
        assert!((fast - naive).norm() < 1e-13);
        let zero = vec![ZERO; 7];
        assert_eq!(kern.inner_product_indexed(&f, &zero).unwrap(), ZERO);
        let direct = reproducing_kernel(&fam, 0.7, &"p1".into(), &"p4".into()).unwrap();
        assert!((direct - kern.kernel_at(1, 4)).norm() < 1e-15);
        let k11 = kern.kernel_at(1, 1);
        assert!((k11.re - 1.0 / 0.7).abs() < 1e-12);
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("1.5-0.5i").unwrap(), c(1.5, -0.5));
        assert_eq!(parse_complex("-2").unwrap(), c(-2.0, 0.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("3+i").unwrap(), c(3.0, 1.0));
        assert_eq!(parse_complex("1e-3+2e+1i").unwrap(), c(1e-3, 20.0));
        assert_eq!(parse_weyl_builtin("weyl:z=0.25i").unwrap(), c(0.0, 0.25));
        assert!(parse_complex("abc").is_err());
        assert!(parse_weyl_builtin("su2:z=1").is_err());
    }

    #[test]
    fn family_document() {
        let text = r#"{"fiducial": [[1,0],[0,0],[0,0]],
            "samples": [{"label": "a", "weight": 0.5, "rep": "weyl:z=0.1+0.2i"},
                        {"label": "b", "weight": 1.0, "rep": {"dim": 3, "entries": [[0,0],[1,0],[0,0],[1,0],[0,0],[0,0],[0,0],[0,0],[1,0]]}}]}"#;
        let doc: FamilyDoc = serde_json::from_str(text).unwrap();
        let fam = doc.into_family().unwrap();
        assert_eq!(fam.len(), 2);
        let b = fam.orbit_vector_of(&"b".into()).unwrap();
        assert_eq!(b.amplitude(1), c(1.0, 0.0));
    }
}
