//! Truncated Fock space `span{|0⟩, …, |N−1⟩}`: ladder operators,
//! Hamiltonians, displacement operators, coherent states and the
//! Weyl–Heisenberg group.
//!
//! The top level `|N−1⟩` is lossy: `[a, a†]` equals the identity only on the
//! leading `(N−1)×(N−1)` block, with `−(N−1)` in the corner. Accuracy claims
//! are made on a probed leading block.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, RepMatrix};
use crate::error::{Error, Result};
use crate::groupoid::{pair_groupoid, pair_morphism};
use crate::linalg::{self, CMatrix, CVector, ONE, ZERO};
use crate::quadrature::{periodic_trapezoid, GaussLegendre};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockSpace {
    dim: usize,
}

impl FockSpace {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionTooSmall { dim, required: 1 });
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub(crate) fn require_ladder(&self) -> Result<()> {
        if self.dim < 2 {
            Err(Error::DimensionTooSmall {
                dim: self.dim,
                required: 2,
            })
        } else {
            Ok(())
        }
    }

    /// `|n⟩`.
    pub fn number_state(&self, n: usize) -> Result<StateVector> {
        if n >= self.dim {
            return Err(Error::InvalidInput(format!(
                "level {n} outside Fock space of dimension {}",
                self.dim
            )));
        }
        let mut v = CVector::zeros(self.dim);
        v[n] = ONE;
        Ok(StateVector {
            space: *self,
            amplitudes: v,
        })
    }

    pub fn vacuum(&self) -> StateVector {
        self.number_state(0).expect("dimension is at least one")
    }

    pub fn identity(&self) -> FockOperator {
        FockOperator {
            space: *self,
            matrix: CMatrix::identity(self.dim, self.dim),
        }
    }

    pub fn zero_operator(&self) -> FockOperator {
        FockOperator {
            space: *self,
            matrix: CMatrix::zeros(self.dim, self.dim),
        }
    }
}

/// A dense operator on a truncated Fock space.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    space: FockSpace,
    matrix: CMatrix,
}

impl FockOperator {
    pub fn from_matrix(space: FockSpace, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != space.dim || matrix.ncols() != space.dim {
            return Err(Error::DimensionMismatch {
                expected: space.dim,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(Self { space, matrix })
    }

    /// Reads a representation matrix as an operator on `span{|0⟩, …}`.
    pub fn from_rep(rep: RepMatrix) -> Self {
        let space = FockSpace { dim: rep.dim() };
        Self {
            space,
            matrix: rep.into_entries(),
        }
    }

    pub fn diagonal(space: FockSpace, diag: &[Complex64]) -> Result<Self> {
        Self::from_matrix(
            space,
            CMatrix::from_diagonal(&CVector::from_column_slice(diag)),
        )
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn diagonal_values(&self) -> Vec<Complex64> {
        self.matrix.diagonal().iter().copied().collect()
    }

    pub fn adjoint(&self) -> Self {
        Self {
            space: self.space,
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            space: self.space,
            matrix: &self.matrix * s,
        }
    }

    /// `[self, other]`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self {
            space: self.space,
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
        }
    }

    pub fn apply(&self, v: &StateVector) -> Result<StateVector> {
        check_dim(self.dim(), v.dim())?;
        Ok(StateVector {
            space: self.space,
            amplitudes: &self.matrix * &v.amplitudes,
        })
    }

    pub fn norm(&self) -> f64 {
        linalg::spectral_norm(&self.matrix)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        linalg::hermiticity_defect(&self.matrix) <= tol
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.matrix)
    }

    /// `exp(−i t H)` for Hermitian `self`.
    pub fn evolution(&self, t: f64) -> Self {
        Self {
            space: self.space,
            matrix: linalg::hermitian_evolution(&self.matrix, t),
        }
    }

    /// Leading `k × k` block as a plain matrix.
    pub fn block(&self, k: usize) -> CMatrix {
        linalg::leading_block(&self.matrix, k.min(self.dim()))
    }
}

impl Mul for &FockOperator {
    type Output = FockOperator;

    fn mul(self, rhs: &FockOperator) -> FockOperator {
        FockOperator {
            space: self.space,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

impl Add for &FockOperator {
    type Output = FockOperator;

    fn add(self, rhs: &FockOperator) -> FockOperator {
        FockOperator {
            space: self.space,
            matrix: &self.matrix + &rhs.matrix,
        }
    }
}

impl Sub for &FockOperator {
    type Output = FockOperator;

    fn sub(self, rhs: &FockOperator) -> FockOperator {
        FockOperator {
            space: self.space,
            matrix: &self.matrix - &rhs.matrix,
        }
    }
}

/// A vector in a truncated Fock space. Not necessarily normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: FockSpace,
    amplitudes: CVector,
}

impl StateVector {
    pub fn new(space: FockSpace, amplitudes: CVector) -> Result<Self> {
        check_dim(space.dim, amplitudes.len())?;
        if amplitudes
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::InvalidInput(
                "state has non-finite amplitudes".into(),
            ));
        }
        Ok(Self { space, amplitudes })
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let space = FockSpace::new(amplitudes.len())?;
        Self::new(space, CVector::from_vec(amplitudes))
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes[n]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (&self.amplitudes - &other.amplitudes).norm()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            space: self.space,
            amplitudes: &self.amplitudes * s,
        }
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::NotNormalizable);
        }
        Ok(self.scale(Complex64::new(1.0 / n, 0.0)))
    }
}

fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}

fn lowering_from_weights(space: FockSpace, weights: &[f64]) -> FockOperator {
    let n = space.dim;
    let mut m = CMatrix::zeros(n, n);
    for (k, &w) in weights.iter().enumerate().take(n.saturating_sub(1)) {
        m[(k, k + 1)] = Complex64::new(w, 0.0);
    }
    FockOperator { space, matrix: m }
}

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub dim: usize,
    pub entries: Vec<(f64, f64)>,
}

impl MatrixDoc {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let mut entries = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                entries.push((m[(i, j)].re, m[(i, j)].im));
            }
        }
        Self {
            dim: m.nrows(),
            entries,
        }
    }

    pub fn to_matrix(&self) -> Result<CMatrix> {
        if self.entries.len() != self.dim * self.dim {
            return Err(Error::Format(format!(
                "matrix of dimension {} needs {} entries, got {}",
                self.dim,
                self.dim * self.dim,
                self.entries.len()
            )));
        }
        Ok(CMatrix::from_row_iterator(
            self.dim,
            self.dim,
            self.entries.iter().map(|&(re, im)| Complex64::new(re, im)),
        ))
    }
}

/// Row-major state amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub dim: usize,
    pub amplitudes: Vec<(f64, f64)>,
}

impl FockOperator {
    pub fn to_doc(&self) -> MatrixDoc {
        MatrixDoc::from_matrix(&self.matrix)
    }

    pub fn from_doc(doc: &MatrixDoc) -> Result<Self> {
        let matrix = doc.to_matrix()?;
        Self::from_matrix(FockSpace::new(doc.dim)?, matrix)
    }
}

impl StateVector {
    pub fn to_doc(&self) -> StateDoc {
        StateDoc {
            dim: self.dim(),
            amplitudes: self.amplitudes.iter().map(|z| (z.re, z.im)).collect(),
        }
    }

    pub fn from_doc(doc: &StateDoc) -> Result<Self> {
        check_dim(doc.dim, doc.amplitudes.len())?;
        Self::from_amplitudes(
            doc.amplitudes
                .iter()
                .map(|&(re, im)| Complex64::new(re, im))
                .collect(),
        )
    }
}

/// `a` with `⟨n−1|a|n⟩ = √n`.
pub fn annihilation(space: FockSpace) -> Result<FockOperator> {
    space.require_ladder()?;
    Ok(lowering_from_weights(space, &harmonic_weights(space.dim)))
}

/// `a†`.
pub fn creation(space: FockSpace) -> Result<FockOperator> {
    Ok(annihilation(space)?.adjoint())
}

/// `a†a = diag(0, 1, …, N−1)`, built directly.
pub fn number_operator(space: FockSpace) -> FockOperator {
    let diag: Vec<_> = (0..space.dim)
        .map(|n| Complex64::new(n as f64, 0.0))
        .collect();
    FockOperator::diagonal(space, &diag).expect("matching dimension")
}

fn harmonic_weights(dim: usize) -> Vec<f64> {
    (1..dim).map(|n| (n as f64).sqrt()).collect()
}

/// `q = (a + a†)/√2`.
pub fn position(space: FockSpace) -> Result<FockOperator> {
    let a = annihilation(space)?;
    Ok((&a + &a.adjoint()).scale(Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0)))
}

/// `p = i(a − a†)/√2`.
pub fn momentum(space: FockSpace) -> Result<FockOperator> {
    let a = annihilation(space)?;
    Ok((&a - &a.adjoint()).scale(Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2)))
}

/// `H = ω a†a + f a† + f̄ a + β`.
///
/// With `ω = 1` this is the general coherent-state-preserving Hamiltonian;
/// `f = 0, β = ½` gives the harmonic oscillator `H₀`.
pub fn hamiltonian(space: FockSpace, omega: f64, f: Complex64, beta: f64) -> Result<FockOperator> {
    let a = annihilation(space)?;
    let ad = a.adjoint();
    let mut m = number_operator(space).matrix * Complex64::new(omega, 0.0);
    m += ad.matrix * f + a.matrix * f.conj();
    for k in 0..space.dim {
        m[(k, k)] += Complex64::new(beta, 0.0);
    }
    Ok(FockOperator { space, matrix: m })
}

/// `H₀ = a†a + ½`.
pub fn harmonic_hamiltonian(space: FockSpace) -> Result<FockOperator> {
    hamiltonian(space, 1.0, ZERO, 0.5)
}

/// The truncation of `a = Σₙ √(n+1) αₙ⁻¹` as an element of the pair-groupoid
/// algebra on `n` objects, with `αₙ: n → n+1`.
///
/// Its fundamental representation is [`annihilation`].
pub fn annihilation_element(n: usize) -> Result<AlgebraElement> {
    let g = Arc::new(pair_groupoid(n)?);
    AlgebraElement::from_coeffs(
        g,
        (0..n.saturating_sub(1)).map(|k| {
            (
                pair_morphism(n, k, k + 1),
                Complex64::new(((k + 1) as f64).sqrt(), 0.0),
            )
        }),
    )
}

/// Exponentials `exp(z A† − z̄ A)` for a lowering operator `A` with real
/// superdiagonal weights `⟨k|A|k+1⟩ = s_k`.
///
/// With `z = r e^{iθ}` and `Q = diag((i e^{iθ})^n)`, the generator is
/// `Q · (−i r J) · Q†` where `J` is the real symmetric tridiagonal matrix with
/// off-diagonal `s_k`. Diagonalizing `J = W Λ Wᵀ` once gives
/// `exp(z A† − z̄ A) = Q W e^{−irΛ} Wᵀ Q†` for every `z`, unitary to rounding.
#[derive(Debug, Clone)]
pub struct DisplacementGenerator {
    space: FockSpace,
    eigenvectors: DMatrix<f64>,
    eigenvalues: DVector<f64>,
}

impl DisplacementGenerator {
    pub fn from_weights(space: FockSpace, weights: &[f64]) -> Result<Self> {
        space.require_ladder()?;
        let n = space.dim;
        if weights.len() < n - 1 {
            return Err(Error::InvalidInput(format!(
                "need {} ladder weights, got {}",
                n - 1,
                weights.len()
            )));
        }
        let mut j = DMatrix::<f64>::zeros(n, n);
        for k in 0..n - 1 {
            j[(k, k + 1)] = weights[k];
            j[(k + 1, k)] = weights[k];
        }
        let eig = SymmetricEigen::new(j);
        Ok(Self {
            space,
            eigenvectors: eig.eigenvectors,
            eigenvalues: eig.eigenvalues,
        })
    }

    /// Generator for the standard displacement `D(z) = exp(z a† − z̄ a)`.
    pub fn harmonic(space: FockSpace) -> Result<Self> {
        Self::from_weights(space, &harmonic_weights(space.dim))
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    fn rotation(&self, z: Complex64) -> CVector {
        let q = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, z.arg());
        let mut out = CVector::zeros(self.space.dim);
        let mut p = ONE;
        for k in 0..self.space.dim {
            out[k] = p;
            p *= q;
        }
        out
    }

    fn spectral_phases(&self, r: f64) -> CVector {
        self.eigenvalues.map(|l| Complex64::from_polar(1.0, -r * l))
    }

    /// Full operator `exp(z A† − z̄ A)`.
    pub fn operator(&self, z: Complex64) -> FockOperator {
        if z == ZERO {
            return self.space.identity();
        }
        let q = self.rotation(z);
        let phases = self.spectral_phases(z.norm());
        let w = self.eigenvectors.map(|x| Complex64::new(x, 0.0));
        let mut left = w.clone();
        for (i, mut row) in left.row_iter_mut().enumerate() {
            row *= q[i];
        }
        let right = left.clone();
        for (j, mut col) in left.column_iter_mut().enumerate() {
            col *= phases[j];
        }
        let matrix = &left * right.adjoint();
        FockOperator {
            space: self.space,
            matrix,
        }
    }

    /// `exp(z A† − z̄ A) v` in `O(N²)`.
    pub fn apply(&self, z: Complex64, v: &CVector) -> CVector {
        if z == ZERO {
            return v.clone();
        }
        let q = self.rotation(z);
        let phases = self.spectral_phases(z.norm());
        // Q† v
        let rotated = v.zip_map(&q, |x, p| x * p.conj());
        // Wᵀ Q† v, with W real
        let mut mid = CVector::zeros(self.space.dim);
        for (j, col) in self.eigenvectors.column_iter().enumerate() {
            let mut acc = ZERO;
            for (k, &w) in col.iter().enumerate() {
                acc += rotated[k] * w;
            }
            mid[j] = acc * phases[j];
        }
        let mut out = CVector::zeros(self.space.dim);
        for (j, col) in self.eigenvectors.column_iter().enumerate() {
            let c = mid[j];
            for (k, &w) in col.iter().enumerate() {
                out[k] += c * w;
            }
        }
        out.zip_map(&q, |x, p| x * p)
    }
}

/// `D(z) = exp(z a† − z̄ a)`.
pub fn displacement(space: FockSpace, z: Complex64) -> Result<FockOperator> {
    Ok(DisplacementGenerator::harmonic(space)?.operator(z))
}

/// `|z⟩ = D(z)|0⟩`.
pub fn coherent_state(space: FockSpace, z: Complex64) -> Result<StateVector> {
    let generator = DisplacementGenerator::harmonic(space)?;
    StateVector::new(space, generator.apply(z, space.vacuum().amplitudes()))
}

/// Element `e^{iν} D(z)` of the Weyl–Heisenberg group.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylElement {
    pub nu: f64,
    pub z: Complex64,
}

impl WeylElement {
    pub fn new(nu: f64, z: Complex64) -> Self {
        Self { nu, z }
    }

    pub fn identity() -> Self {
        Self { nu: 0.0, z: ZERO }
    }

    /// `(ν, x, y)∘(ν′, x′, y′) = (ν + ν′ + ½(x y′ − y x′), x + x′, y + y′)`.
    pub fn compose(&self, other: &Self) -> Self {
        let (x, y) = (self.z.re, self.z.im);
        let (xp, yp) = (other.z.re, other.z.im);
        Self {
            nu: self.nu + other.nu + 0.5 * (x * yp - y * xp),
            z: self.z + other.z,
        }
    }

    pub fn inverse(&self) -> Self {
        Self {
            nu: -self.nu,
            z: -self.z,
        }
    }

    /// `e^{iν} D(z)`.
    pub fn operator(&self, generator: &DisplacementGenerator) -> FockOperator {
        generator
            .operator(self.z)
            .scale(Complex64::from_polar(1.0, self.nu))
    }
}

pub fn weyl_compose(g1: &WeylElement, g2: &WeylElement) -> WeylElement {
    g1.compose(g2)
}

/// The scalar in `D(z) D(w) = bch_phase(z, w) · D(z + w)`: `exp(i Im(z w̄))`.
///
/// Fixed by the matrix oracle in the tests
/// (`bch_phase_matches_matrix_products`).
pub fn bch_phase(z: Complex64, w: Complex64) -> Complex64 {
    Complex64::from_polar(1.0, (z * w.conj()).im)
}

/// Polar quadrature of `(1/π) ∫_{|z|≤R} |z⟩⟨z| d²z`.
///
/// Gauss–Legendre in `t = r²` (so `d²z = ½ dt dθ`) and the uniform
/// trapezoid in `θ`; each node carries weight `w_t / n_theta`.
pub fn resolution_of_identity(
    space: FockSpace,
    radius: f64,
    n_r: usize,
    n_theta: usize,
) -> Result<FockOperator> {
    let points = disk_quadrature(radius, n_r, n_theta)?;
    let generator = DisplacementGenerator::harmonic(space)?;
    let vacuum = space.vacuum();
    let matrix = weighted_projector_sum(space.dim, points.len(), &|i| {
        let (z, w) = points[i];
        (generator.apply(z, vacuum.amplitudes()), w)
    })
    .expect("quadrature has nodes");
    Ok(FockOperator { space, matrix })
}

/// Nodes and weights of the polar rule on the disk `|z| ≤ R`, normalized by
/// `1/π`. Ordered radius-major.
pub fn disk_quadrature(radius: f64, n_r: usize, n_theta: usize) -> Result<Vec<(Complex64, f64)>> {
    polar_rule(radius, n_r, n_theta, false)
}

/// Same rule restricted to the upper half-disk `0 ≤ θ < π`.
pub fn half_disk_quadrature(
    radius: f64,
    n_r: usize,
    n_theta: usize,
) -> Result<Vec<(Complex64, f64)>> {
    polar_rule(radius, n_r, n_theta, true)
}

fn polar_rule(
    radius: f64,
    n_r: usize,
    n_theta: usize,
    half: bool,
) -> Result<Vec<(Complex64, f64)>> {
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidInput(format!(
            "radius must be positive, got {radius}"
        )));
    }
    if n_r < 4 || n_theta < 4 {
        return Err(Error::InvalidInput(format!(
            "need at least 4 radial and angular nodes, got {n_r} and {n_theta}"
        )));
    }
    let radial = GaussLegendre::new(n_r, 0.0, radius * radius);
    let angles = periodic_trapezoid(n_theta);
    let shrink = if half { 0.5 } else { 1.0 };
    let mut points = Vec::with_capacity(n_r * n_theta);
    for (&t, &wt) in radial.nodes.iter().zip(&radial.weights) {
        let r = t.sqrt();
        for &(theta, wtheta) in &angles {
            // (1/π) · ½ dt · dθ
            let w = wt * 0.5 * wtheta * shrink / std::f64::consts::PI;
            points.push((Complex64::from_polar(r, theta * shrink), w));
        }
    }
    Ok(points)
}

/// Leaf size of the deterministic reduction tree.
pub(crate) const REDUCTION_CHUNK: usize = 64;

/// `Σᵢ wᵢ |vᵢ⟩⟨vᵢ|` with a fixed reduction tree.
pub(crate) fn weighted_projector_sum<F>(dim: usize, len: usize, sample: &F) -> Option<CMatrix>
where
    F: Fn(usize) -> (CVector, f64) + Sync,
{
    linalg::tree_sum(len, REDUCTION_CHUNK, &|range: std::ops::Range<usize>| {
        let mut block = CMatrix::zeros(dim, range.len());
        let mut weights = Vec::with_capacity(range.len());
        for (col, i) in range.enumerate() {
            let (v, w) = sample(i);
            block.set_column(col, &v);
            weights.push(w);
        }
        let mut scaled = block.clone();
        for (col, w) in weights.iter().enumerate() {
            scaled.column_mut(col).scale_mut(*w);
        }
        scaled * block.adjoint()
    })
}

/// JSON report of a resolution-of-identity run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResolutionReport {
    #[serde(rename = "R")]
    pub radius: f64,
    pub n_r: usize,
    pub n_theta: usize,
    pub dim: usize,
    pub probe_dim: usize,
    /// `max |C_nm − δ_nm|` over the probe block.
    pub max_abs_deviation: f64,
    /// Real parts of the probe-block diagonal.
    pub diag: Vec<f64>,
}

impl ResolutionReport {
    pub fn new(
        c: &FockOperator,
        radius: f64,
        n_r: usize,
        n_theta: usize,
        probe_dim: usize,
    ) -> Self {
        let k = probe_dim.min(c.dim());
        let block = c.block(k);
        let dev = block - CMatrix::identity(k, k);
        Self {
            radius,
            n_r,
            n_theta,
            dim: c.dim(),
            probe_dim: k,
            max_abs_deviation: linalg::max_abs(&dev),
            diag: (0..k).map(|n| c.entry(n, n).re).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Truncated series `e^{−|z|²/2} Σ zⁿ/√n! |n⟩`.
    fn series(z: Complex64, dim: usize) -> CVector {
        let mut v = CVector::zeros(dim);
        let mut term = Complex64::from_polar((-0.5 * z.norm_sqr()).exp(), 0.0);
        for n in 0..dim {
            if n > 0 {
                term *= z / (n as f64).sqrt();
            }
            v[n] = term;
        }
        v
    }

    /// Scaling-and-squaring Taylor exponential, independent of the
    /// eigendecomposition route.
    fn taylor_expm(x: &CMatrix) -> CMatrix {
        let n = x.nrows();
        let norm = x.iter().map(|z| z.norm()).sum::<f64>();
        let squarings = (norm.max(1.0).log2().ceil() as i32 + 4).max(0) as u32;
        let scaled = x / c(2f64.powi(squarings as i32), 0.0);
        let mut term = CMatrix::identity(n, n);
        let mut sum = CMatrix::identity(n, n);
        for k in 1..40 {
            term = &term * &scaled / c(k as f64, 0.0);
            sum += &term;
        }
        for _ in 0..squarings {
            sum = &sum * &sum;
        }
        sum
    }

    #[test]
    fn ladder_entries() {
        let s = FockSpace::new(3).unwrap();
        let a = annihilation(s).unwrap();
        let v = a.apply(&s.number_state(2).unwrap()).unwrap();
        assert!((v.amplitude(1) - c(2f64.sqrt(), 0.0)).norm() < 1e-15);
        assert!(a.apply(&s.vacuum()).unwrap().norm() == 0.0);
        let n = &a.adjoint() * &a;
        for k in 0..3 {
            assert!((n.entry(k, k) - c(k as f64, 0.0)).norm() < 1e-15);
        }
        assert!(annihilation(FockSpace::new(1).unwrap()).is_err());
        assert!(FockSpace::new(0).is_err());
    }

    #[test]
    fn truncated_commutator_corner() {
        // hand computation at N = 3: [a, a†] = diag(1, 1, −2)
        let s = FockSpace::new(3).unwrap();
        let a = annihilation(s).unwrap();
        let comm = a.commutator(&a.adjoint());
        let expected = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(1.0, 0.0),
            c(1.0, 0.0),
            c(-2.0, 0.0),
        ]));
        assert!(crate::linalg::max_abs(&(comm.matrix() - expected)) < 1e-14);
    }

    #[test]
    fn quadratures() {
        let s = FockSpace::new(12).unwrap();
        let q = position(s).unwrap();
        let p = momentum(s).unwrap();
        assert!(q.is_hermitian(1e-15) && p.is_hermitian(1e-15));
        let qp = q.commutator(&p);
        let h0 = (&(&p * &p) + &(&q * &q)).scale(c(0.5, 0.0));
        let h = harmonic_hamiltonian(s).unwrap();
        for i in 0..11 {
            for j in 0..11 {
                // p = i(a − a†)/√2 gives [q, p] = −i[a, a†]
                let expect = if i == j { c(0.0, -1.0) } else { c(0.0, 0.0) };
                assert!(
                    (qp.entry(i, j) - expect).norm() < 1e-13,
                    "[q,p] at ({i},{j}) = {}",
                    qp.entry(i, j)
                );
                assert!(
                    (h0.entry(i, j) - h.entry(i, j)).norm() < 1e-13,
                    "H at ({i},{j}): {} vs {}",
                    h0.entry(i, j),
                    h.entry(i, j)
                );
            }
        }
    }

    #[test]
    fn hamiltonian_limits() {
        let s = FockSpace::new(6).unwrap();
        let h0 = hamiltonian(s, 1.0, ZERO, 0.5).unwrap();
        for n in 0..6 {
            assert_eq!(h0.entry(n, n), c(n as f64 + 0.5, 0.0));
        }
        assert_eq!(hamiltonian(s, 0.0, ZERO, 0.0).unwrap(), s.zero_operator());
        assert!(hamiltonian(s, 2.0, c(0.3, -0.7), 1.5)
            .unwrap()
            .is_hermitian(0.0));
    }

    #[test]
    fn heisenberg_derivative_is_second_order() {
        // d/dt e^{iHt} a e^{−iHt} at 0 is i[H, a] = −i(ωa + f[a, a†])
        let s = FockSpace::new(20).unwrap();
        let f = c(0.4, -0.25);
        let h = hamiltonian(s, 1.0, f, 0.3).unwrap();
        let a = annihilation(s).unwrap();
        let comm = a.commutator(&a.adjoint());
        let k = 19;
        let err = |t: f64| {
            let u = h.evolution(t);
            let evolved = &(&u.adjoint() * &a) * &u;
            let linear = &a - &(&a + &comm.scale(f)).scale(c(0.0, t));
            linalg::spectral_norm(&(evolved.block(k) - linear.block(k)))
        };
        let (e1, e2) = (err(1e-3), err(5e-4));
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
        assert!(e1 < 1e-4);
    }

    #[test]
    fn displacement_matches_taylor_oracle() {
        let s = FockSpace::new(30).unwrap();
        let a = annihilation(s).unwrap();
        for z in [c(0.3, 0.2), c(-1.1, 0.7), c(0.0, -1.5)] {
            let x = a.adjoint().matrix() * z - a.matrix() * z.conj();
            let oracle = taylor_expm(&x);
            let d = displacement(s, z).unwrap();
            assert!(
                crate::linalg::max_abs(&(d.matrix() - oracle)) < 1e-11,
                "z = {z}"
            );
        }
    }

    #[test]
    fn generator_apply_agrees_with_operator() {
        let s = FockSpace::new(25).unwrap();
        let g = DisplacementGenerator::harmonic(s).unwrap();
        let v = CVector::from_fn(25, |i, _| c((i as f64).sin(), (i as f64 * 0.3).cos()));
        let z = c(0.7, -1.3);
        let direct = g.operator(z).matrix() * &v;
        assert!((g.apply(z, &v) - direct).norm() < 1e-12);
    }

    #[test]
    fn displacement_inverse_and_unitarity() {
        let s = FockSpace::new(40).unwrap();
        assert!(
            crate::linalg::max_abs(
                &(displacement(s, ZERO).unwrap().matrix() - CMatrix::identity(40, 40))
            ) < 1e-14
        );
        for z in [c(2.0, 0.0), c(-1.2, 1.6), c(0.5, 0.5)] {
            let d = displacement(s, z).unwrap();
            let dm = displacement(s, -z).unwrap();
            assert!(crate::linalg::max_abs(&(d.adjoint().matrix() - dm.matrix())) < 1e-12);
            assert!(
                linalg::spectral_norm(&((&d * &dm).matrix() - CMatrix::identity(40, 40))) < 1e-10
            );
            assert!(d.unitarity_defect() < 1e-9);
        }
    }

    #[test]
    fn bch_phase_matches_matrix_products() {
        let s = FockSpace::new(60).unwrap();
        let g = DisplacementGenerator::harmonic(s).unwrap();
        for (z, w) in [
            (c(1.0, 0.0), c(0.0, 1.0)),
            (c(0.3, -0.8), c(-0.5, 0.4)),
            (c(0.9, 0.9), c(0.2, -1.1)),
        ] {
            let prod = &g.operator(z) * &g.operator(w);
            let target = g.operator(z + w);
            // phase from the vacuum matrix element, probe block check after
            let phase = prod.entry(0, 0) / target.entry(0, 0);
            assert!((phase.norm() - 1.0).abs() < 1e-10);
            assert!((phase - bch_phase(z, w)).norm() < 1e-10, "{z} {w}: {phase}");
            let diff = prod.block(20) - target.block(20) * phase;
            assert!(linalg::max_abs(&diff) < 1e-9);
        }
    }

    #[test]
    fn coherent_state_properties() {
        let s = FockSpace::new(40).unwrap();
        assert_eq!(coherent_state(s, ZERO).unwrap(), s.vacuum());
        let a = annihilation(s).unwrap();
        for z in [c(1.0, 0.0), c(0.0, -1.0), c(1.2, 1.6)] {
            let state = coherent_state(s, z).unwrap();
            let az = a.apply(&state).unwrap();
            let residual = (az.amplitudes() - state.amplitudes() * z).norm();
            if z.norm() <= 1.0 {
                assert!(residual < 1e-8, "{z}: {residual}");
            }
            let overlap = state.amplitude(0).norm_sqr();
            assert!((overlap - (-z.norm_sqr()).exp()).abs() < 1e-10);
            assert!((state.amplitudes() - series(z, 40)).norm() < 1e-9);
        }
    }

    #[test]
    fn weyl_group_law() {
        let id = WeylElement::identity();
        let g = WeylElement::new(0.7, c(0.1, -0.4));
        assert_eq!(id.compose(&g), g);
        let h = WeylElement::new(0.0, c(1.0, 0.0)).compose(&WeylElement::new(0.0, c(0.0, 1.0)));
        assert_eq!(h.nu, 0.5);
        assert_eq!(h.z, c(1.0, 1.0));
        let back = g.compose(&g.inverse());
        assert!(back.nu.abs() < 1e-15 && back.z.norm() < 1e-15);
    }

    #[test]
    fn pair_algebra_realizes_ladder() {
        let n = 7;
        let s = FockSpace::new(n).unwrap();
        let a_el = annihilation_element(n).unwrap();
        let from_algebra = FockOperator::from_rep(a_el.fundamental_rep());
        assert_eq!(from_algebra, annihilation(s).unwrap());
        let ad_el = a_el.involution();
        let comm_el = a_el
            .convolve(&ad_el)
            .unwrap()
            .add(&ad_el.convolve(&a_el).unwrap().scale(c(-1.0, 0.0)))
            .unwrap();
        let comm = FockOperator::from_rep(comm_el.fundamental_rep());
        let a = annihilation(s).unwrap();
        assert!(
            crate::linalg::max_abs(&(comm.matrix() - a.commutator(&a.adjoint()).matrix())) < 1e-13
        );
    }

    #[test]
    fn resolution_diagonal_tracks_incomplete_gamma() {
        // P(n+1, R²) = 1 − e^{−R²} Σ_{k≤n} R^{2k}/k!
        let s = FockSpace::new(30).unwrap();
        let r = 2.5;
        let c_op = resolution_of_identity(s, r, 40, 32).unwrap();
        let x: f64 = r * r;
        let mut partial = 0.0;
        let mut term = 1.0;
        for n in 0..6 {
            if n > 0 {
                term *= x / n as f64;
            }
            partial += term;
            let p = 1.0 - (-x).exp() * partial;
            assert!((c_op.entry(n, n).re - p).abs() < 1e-10, "level {n}");
        }
        assert!(linalg::max_abs_off_diagonal(&c_op.block(6)) < 1e-12);
        assert!(c_op.is_hermitian(1e-12));
    }

    #[test]
    fn quadrature_rejects_bad_parameters() {
        let s = FockSpace::new(10).unwrap();
        assert!(resolution_of_identity(s, 0.0, 10, 10).is_err());
        assert!(resolution_of_identity(s, 1.0, 3, 10).is_err());
        assert!(resolution_of_identity(s, 1.0, 10, 2).is_err());
    }

    #[test]
    fn operator_and_state_docs_round_trip_exactly() {
        let s = FockSpace::new(6).unwrap();
        let d = displacement(s, c(0.4, -0.7)).unwrap();
        let text = serde_json::to_string(&d.to_doc()).unwrap();
        let back = FockOperator::from_doc(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.matrix(), d.matrix());

        let v = coherent_state(s, c(-1.1, 0.3)).unwrap();
        let text = serde_json::to_string(&v.to_doc()).unwrap();
        let back = StateVector::from_doc(&serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back.amplitudes(), v.amplitudes());
    }

    #[test]
    fn malformed_docs_are_rejected() {
        let bad = MatrixDoc {
            dim: 2,
            entries: vec![(1.0, 0.0); 3],
        };
        assert!(FockOperator::from_doc(&bad).is_err());
        let bad = StateDoc {
            dim: 3,
            amplitudes: vec![(1.0, 0.0); 2],
        };
        assert!(StateVector::from_doc(&bad).is_err());
    }
}
