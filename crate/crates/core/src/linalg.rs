//! Dense complex linear algebra helpers shared by the numeric modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Operator (spectral) norm: the largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().max()
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn max_abs_off_diagonal(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j {
                worst = worst.max(m[(i, j)].norm());
            }
        }
    }
    worst
}

/// Largest entry of `m - m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `‖m† m − I‖` in spectral norm.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    spectral_norm(&(m.adjoint() * m - CMatrix::identity(n, n)))
}

/// `exp(−i t H)` for Hermitian `H`, via unitary diagonalization.
///
/// The anti-Hermitian part of `h` is discarded.
pub fn hermitian_evolution(h: &CMatrix, t: f64) -> CMatrix {
    let sym = (h + h.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(sym);
    let phases = eig
        .eigenvalues
        .map(|lambda| Complex64::from_polar(1.0, -lambda * t));
    let v = &eig.eigenvectors;
    let mut scaled = v.clone();
    for (j, mut col) in scaled.column_iter_mut().enumerate() {
        col *= phases[j];
    }
    scaled * v.adjoint()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let sym = (h + h.adjoint()).scale(0.5);
    let mut values: Vec<f64> = SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    values
}

/// Leading `k × k` block.
pub fn leading_block(m: &CMatrix, k: usize) -> CMatrix {
    m.view((0, 0), (k, k)).into_owned()
}

/// Deterministic parallel sum of `leaf(range)` over `0..len`.
///
/// The index range is cut into fixed `chunk`-sized leaves, and leaves are
/// combined by a balanced binary tree whose shape depends only on `len` and
/// `chunk`. The result is therefore bit-identical for any thread count.
pub fn tree_sum<T, F>(len: usize, chunk: usize, leaf: &F) -> Option<T>
where
    T: Send + std::ops::AddAssign,
    F: Fn(std::ops::Range<usize>) -> T + Sync,
{
    let chunk = chunk.max(1);
    let leaves = len.div_ceil(chunk);
    if leaves == 0 {
        return None;
    }
    Some(tree_sum_leaves(0, leaves, len, chunk, leaf))
}

fn tree_sum_leaves<T, F>(lo: usize, hi: usize, len: usize, chunk: usize, leaf: &F) -> T
where
    T: Send + std::ops::AddAssign,
    F: Fn(std::ops::Range<usize>) -> T + Sync,
{
    if hi - lo == 1 {
        let start = lo * chunk;
        return leaf(start..(start + chunk).min(len));
    }
    let mid = lo + (hi - lo) / 2;
    let (mut left, right) = rayon::join(
        || tree_sum_leaves(lo, mid, len, chunk, leaf),
        || tree_sum_leaves(mid, hi, len, chunk, leaf),
    );
    left += right;
    left
}
