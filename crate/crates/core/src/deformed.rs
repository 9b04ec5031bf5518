//! f-deformed oscillators on the truncated Fock space.
//!
//! `A_f = a f(n̂)`, so `⟨n−1|A_f|n⟩ = f(n)√n`. Only `f(1), …, f(N−1)` are
//! ever read: the `n = 0` term always carries a factor `n`.

use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{DisplacementGenerator, FockOperator, FockSpace, StateVector};
use crate::linalg::{CVector, ZERO};

/// Outside `[LOG_SPACE_LOW, LOG_SPACE_HIGH]` the deformed factorial is
/// accumulated in log space.
pub const LOG_SPACE_LOW: f64 = 1e-3;
pub const LOG_SPACE_HIGH: f64 = 1e3;

/// A positive sequence `f(1), f(2), …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DeformationFunction {
    values: Vec<f64>,
}

impl DeformationFunction {
    /// `values[k]` is `f(k + 1)`.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        for (k, &v) in values.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NonPositiveDeformation {
                    level: k + 1,
                    value: v,
                });
            }
        }
        Ok(Self { values })
    }

    pub fn from_fn<F: Fn(usize) -> f64>(len: usize, f: F) -> Result<Self> {
        Self::new((1..=len).map(f).collect())
    }

    /// `f ≡ 1`, the undeformed oscillator.
    pub fn one(len: usize) -> Self {
        Self {
            values: vec![1.0; len],
        }
    }

    pub fn sqrt(len: usize) -> Self {
        Self {
            values: (1..=len).map(|n| (n as f64).sqrt()).collect(),
        }
    }

    pub fn inv_sqrt(len: usize) -> Self {
        Self {
            values: (1..=len).map(|n| 1.0 / (n as f64).sqrt()).collect(),
        }
    }

    /// One of `"one"`, `"sqrt"`, `"inv_sqrt"`, with `len` values.
    pub fn builtin(name: &str, len: usize) -> Result<Self> {
        match name {
            "one" => Ok(Self::one(len)),
            "sqrt" => Ok(Self::sqrt(len)),
            "inv_sqrt" => Ok(Self::inv_sqrt(len)),
            other => Err(Error::InvalidInput(format!(
                "unknown deformation `{other}` (expected one, sqrt or inv_sqrt)"
            ))),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `f(n)` for `n ≥ 1`.
    pub fn value(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::MissingDeformationValue(0));
        }
        self.values
            .get(n - 1)
            .copied()
            .ok_or(Error::MissingDeformationValue(n))
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn require(&self, space: FockSpace) -> Result<()> {
        space_ladder(space)?;
        if self.values.len() + 1 < space.dim() {
            return Err(Error::MissingDeformationValue(self.values.len() + 1));
        }
        Ok(())
    }

    /// Superdiagonal of `A_f`: `f(n)√n` for `n = 1..N−1`.
    fn ladder_weights(&self, space: FockSpace) -> Result<Vec<f64>> {
        self.require(space)?;
        Ok((1..space.dim())
            .map(|n| self.values[n - 1] * (n as f64).sqrt())
            .collect())
    }

    fn needs_log_space(&self, up_to: usize) -> bool {
        self.values[..up_to]
            .iter()
            .any(|&v| !(LOG_SPACE_LOW..=LOG_SPACE_HIGH).contains(&v))
    }
}

impl TryFrom<Vec<f64>> for DeformationFunction {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

impl From<DeformationFunction> for Vec<f64> {
    fn from(f: DeformationFunction) -> Self {
        f.values
    }
}

/// How a deformation is named on input: a builtin or explicit `f(1..N−1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DeformationSpec {
    Builtin(String),
    Values(Vec<f64>),
}

impl DeformationSpec {
    /// Resolves against a Fock space of dimension `dim`.
    pub fn resolve(&self, dim: usize) -> Result<DeformationFunction> {
        let len = dim.saturating_sub(1);
        match self {
            DeformationSpec::Builtin(name) => DeformationFunction::builtin(name, len),
            DeformationSpec::Values(v) => DeformationFunction::new(v.clone()),
        }
    }
}

impl std::str::FromStr for DeformationSpec {
    type Err = Error;

    /// Accepts a builtin name or a JSON array.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.starts_with('[') {
            Ok(DeformationSpec::Values(serde_json::from_str(s)?))
        } else {
            Ok(DeformationSpec::Builtin(s.to_string()))
        }
    }
}

fn space_ladder(space: FockSpace) -> Result<()> {
    if space.dim() < 2 {
        Err(Error::DimensionTooSmall {
            dim: space.dim(),
            required: 2,
        })
    } else {
        Ok(())
    }
}

/// The normalization constant `N_{f,z}` of `|z, f⟩` on the truncated space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FNormalization {
    pub z: Complex64,
    pub value: f64,
}

/// `A_f = a f(n̂)`.
pub fn deformed_annihilation(space: FockSpace, f: &DeformationFunction) -> Result<FockOperator> {
    let weights = f.ladder_weights(space)?;
    let n = space.dim();
    let mut m = crate::linalg::CMatrix::zeros(n, n);
    for (k, w) in weights.into_iter().enumerate() {
        m[(k, k + 1)] = Complex64::new(w, 0.0);
    }
    FockOperator::from_matrix(space, m)
}

/// `A_f† = f(n̂) a†`.
pub fn deformed_creation(space: FockSpace, f: &DeformationFunction) -> Result<FockOperator> {
    Ok(deformed_annihilation(space, f)?.adjoint())
}

/// `F = A_f A_f† − A_f† A_f`, by matrix arithmetic.
pub fn commutator_f(space: FockSpace, f: &DeformationFunction) -> Result<FockOperator> {
    let a = deformed_annihilation(space, f)?;
    Ok(a.commutator(&a.adjoint()))
}

/// `H_f = (ω/2)(A_f A_f† + A_f† A_f)`.
pub fn deformed_hamiltonian(
    space: FockSpace,
    f: &DeformationFunction,
    omega: f64,
) -> Result<FockOperator> {
    let a = deformed_annihilation(space, f)?;
    let ad = a.adjoint();
    Ok((&(&a * &ad) + &(&ad * &a)).scale(Complex64::new(0.5 * omega, 0.0)))
}

/// `E_n − E_{n−1}` for `n = 1..N−1`, read off the diagonal of `H_f`.
pub fn level_gaps(space: FockSpace, f: &DeformationFunction, omega: f64) -> Result<Vec<f64>> {
    let h = deformed_hamiltonian(space, f, omega)?;
    let e: Vec<f64> = h.diagonal_values().iter().map(|z| z.re).collect();
    Ok(e.windows(2).map(|w| w[1] - w[0]).collect())
}

/// `A_f(t) = U†(t) A_f U(t)` with `U(t) = exp(−i t H_f)`.
///
/// `H_f` is diagonal, so `U(t)` is exponentiated entrywise.
pub fn heisenberg_evolved_af(
    space: FockSpace,
    f: &DeformationFunction,
    omega: f64,
    t: f64,
) -> Result<FockOperator> {
    let h = deformed_hamiltonian(space, f, omega)?;
    let phases: Vec<Complex64> = h
        .diagonal_values()
        .iter()
        .map(|e| Complex64::from_polar(1.0, -e.re * t))
        .collect();
    let u = FockOperator::diagonal(space, &phases)?;
    let a = deformed_annihilation(space, f)?;
    Ok(&(&u.adjoint() * &a) * &u)
}

/// Unnormalized amplitudes `zⁿ/(√n! [f(n)]!)` scaled by a common factor,
/// and the log of that factor.
fn f_coherent_amplitudes(
    space: FockSpace,
    f: &DeformationFunction,
    z: Complex64,
) -> Result<(CVector, f64)> {
    f.require(space)?;
    let dim = space.dim();
    let mut amps = CVector::zeros(dim);
    if f.needs_log_space(dim - 1) {
        if z == ZERO {
            amps[0] = Complex64::new(1.0, 0.0);
            return Ok((amps, 0.0));
        }
        let ln_z = z.norm().ln();
        let mut logs = Vec::with_capacity(dim);
        let mut acc = 0.0;
        logs.push(0.0);
        for n in 1..dim {
            acc += ln_z - 0.5 * (n as f64).ln() - f.values[n - 1].ln();
            logs.push(acc);
        }
        let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        for (n, l) in logs.into_iter().enumerate() {
            amps[n] = Complex64::from_polar((l - top).exp(), n as f64 * z.arg());
        }
        return Ok((amps, -top));
    }
    let mut power = Complex64::new(1.0, 0.0); // zⁿ/√n!
    let mut factorial = 1.0; // [f(n)]!
    amps[0] = power;
    for n in 1..dim {
        power *= z / (n as f64).sqrt();
        factorial *= f.values[n - 1];
        if !factorial.is_finite() || factorial == 0.0 {
            return Err(Error::FactorialRange { level: n });
        }
        amps[n] = power / factorial;
    }
    Ok((amps, 0.0))
}

/// `N_{f,z}`, so that `N_{f,z} Σ zⁿ/(√n! [f(n)]!) |n⟩` has unit norm.
pub fn f_normalization(
    space: FockSpace,
    f: &DeformationFunction,
    z: Complex64,
) -> Result<FNormalization> {
    let (amps, log_scale) = f_coherent_amplitudes(space, f, z)?;
    let norm = amps.norm();
    let value = (log_scale - norm.ln()).exp();
    if !(value > 0.0) || !value.is_finite() {
        return Err(Error::NotNormalizable);
    }
    Ok(FNormalization { z, value })
}

/// The normalized `A_f` eigenstate `|z, f⟩`, truncated at `N`.
pub fn f_coherent_state(
    space: FockSpace,
    f: &DeformationFunction,
    z: Complex64,
) -> Result<StateVector> {
    let (amps, _) = f_coherent_amplitudes(space, f, z)?;
    StateVector::new(space, amps)?.normalized()
}

pub fn deformed_generator(
    space: FockSpace,
    f: &DeformationFunction,
) -> Result<DisplacementGenerator> {
    DisplacementGenerator::from_weights(space, &f.ladder_weights(space)?)
}

/// `D_f(z) = exp(z A_f† − z̄ A_f)`; reduces to `D(z)` at `f ≡ 1`.
pub fn deformed_displacement(
    space: FockSpace,
    f: &DeformationFunction,
    z: Complex64,
) -> Result<FockOperator> {
    Ok(deformed_generator(space, f)?.operator(z))
}

/// `|z_f⟩ = D_f(z)|0⟩`.
pub fn displaced_vacuum(
    space: FockSpace,
    f: &DeformationFunction,
    z: Complex64,
) -> Result<StateVector> {
    let g = deformed_generator(space, f)?;
    StateVector::new(space, g.apply(z, space.vacuum().amplitudes()))
}

/// `min_φ ‖X − e^{iφ} Y‖` in spectral norm, with `φ` fitted from `tr(Y† X)`
/// and then refined on a grid around it.
pub fn min_phase_distance(x: &FockOperator, y: &FockOperator) -> f64 {
    let overlap = (y.matrix().adjoint() * x.matrix()).trace();
    let base = if overlap.norm() > 0.0 {
        overlap.arg()
    } else {
        0.0
    };
    let dist = |phi: f64| {
        crate::linalg::spectral_norm(&(x.matrix() - y.matrix() * Complex64::from_polar(1.0, phi)))
    };
    let mut best = dist(base);
    let steps = 64;
    for k in 0..steps {
        let phi = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
        best = best.min(dist(phi));
    }
    best
}
