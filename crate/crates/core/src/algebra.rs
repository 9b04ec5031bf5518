//! The convolution *-algebra `ℂ[G]` of a finite groupoid and its
//! fundamental and left regular representations.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupoid::{FiniteGroupoid, MorphismId};
use crate::linalg::{spectral_norm, CMatrix, ZERO};

/// Coefficients below this magnitude are treated as zero when comparing.
pub const EQUALITY_TOLERANCE: f64 = 1e-12;

/// A dense square representation matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct RepMatrix {
    entries: CMatrix,
}

impl RepMatrix {
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() != entries.ncols() || entries.nrows() == 0 {
            return Err(Error::InvalidInput(format!(
                "representation matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self { entries })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            entries: CMatrix::identity(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }
}

/// A finitely supported function `a = Σ a_α α` on the morphisms of a groupoid.
///
/// Exact zeros are pruned, so the support is canonical.
#[derive(Debug, Clone)]
pub struct AlgebraElement {
    groupoid: Arc<FiniteGroupoid>,
    coeffs: BTreeMap<MorphismId, Complex64>,
}

impl AlgebraElement {
    pub fn zero(groupoid: Arc<FiniteGroupoid>) -> Self {
        Self {
            groupoid,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_coeffs<I>(groupoid: Arc<FiniteGroupoid>, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MorphismId, Complex64)>,
    {
        let mut element = Self::zero(groupoid);
        for (m, c) in coeffs {
            element.groupoid.morphism(m)?;
            *element.coeffs.entry(m).or_insert(ZERO) += c;
        }
        element.prune();
        Ok(element)
    }

    /// `δ_α`.
    pub fn delta(groupoid: Arc<FiniteGroupoid>, m: MorphismId) -> Result<Self> {
        Self::from_coeffs(groupoid, [(m, Complex64::new(1.0, 0.0))])
    }

    /// The unit `𝟏 = Σₓ 1ₓ`.
    pub fn unit(groupoid: Arc<FiniteGroupoid>) -> Self {
        let coeffs = groupoid
            .units()
            .iter()
            .map(|&u| (u, Complex64::new(1.0, 0.0)))
            .collect();
        Self { groupoid, coeffs }
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| *c != ZERO);
    }

    pub fn groupoid(&self) -> &Arc<FiniteGroupoid> {
        &self.groupoid
    }

    pub fn coeff(&self, m: MorphismId) -> Complex64 {
        self.coeffs.get(&m).copied().unwrap_or(ZERO)
    }

    pub fn support(&self) -> impl Iterator<Item = (MorphismId, Complex64)> + '_ {
        self.coeffs.iter().map(|(&m, &c)| (m, c))
    }

    pub fn support_len(&self) -> usize {
        self.coeffs.len()
    }

    fn same_groupoid(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.groupoid, &other.groupoid) || *self.groupoid == *other.groupoid {
            Ok(())
        } else {
            Err(Error::GroupoidMismatch)
        }
    }

    /// `(f⋆g)(γ) = Σ_{β∘α=γ} f(β) g(α)`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.same_groupoid(other)?;
        let g = &self.groupoid;
        let mut out: BTreeMap<MorphismId, Complex64> = BTreeMap::new();
        for (&beta, &fb) in &self.coeffs {
            let source = g.source(beta);
            for (&alpha, &ga) in &other.coeffs {
                if g.target(alpha) != source {
                    continue;
                }
                if let Some(gamma) = g.lookup(beta, alpha) {
                    *out.entry(gamma).or_insert(ZERO) += fb * ga;
                }
            }
        }
        let mut element = Self {
            groupoid: Arc::clone(g),
            coeffs: out,
        };
        element.prune();
        Ok(element)
    }

    /// `f*(α) = conj f(α⁻¹)`.
    pub fn involution(&self) -> Self {
        let g = &self.groupoid;
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&m, &c)| (g.inverse(m).expect("support ids are valid"), c.conj()))
            .collect();
        Self {
            groupoid: Arc::clone(g),
            coeffs,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_groupoid(other)?;
        let mut coeffs = self.coeffs.clone();
        for (&m, &c) in &other.coeffs {
            *coeffs.entry(m).or_insert(ZERO) += c;
        }
        let mut element = Self {
            groupoid: Arc::clone(&self.groupoid),
            coeffs,
        };
        element.prune();
        Ok(element)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut element = Self {
            groupoid: Arc::clone(&self.groupoid),
            coeffs: self.coeffs.iter().map(|(&m, &c)| (m, c * s)).collect(),
        };
        element.prune();
        element
    }

    /// Support-normalized equality with absolute tolerance [`EQUALITY_TOLERANCE`].
    pub fn approx_eq(&self, other: &Self) -> bool {
        self.max_difference(other)
            .is_some_and(|d| d <= EQUALITY_TOLERANCE)
    }

    /// Largest coefficient difference, or `None` across different groupoids.
    pub fn max_difference(&self, other: &Self) -> Option<f64> {
        self.same_groupoid(other).ok()?;
        let keys = self.coeffs.keys().chain(other.coeffs.keys());
        Some(
            keys.map(|&m| (self.coeff(m) - other.coeff(m)).norm())
                .fold(0.0, f64::max),
        )
    }

    /// `π₀(a)`: `α ↦ |t(α)⟩⟨s(α)|`, extended linearly.
    pub fn fundamental_rep(&self) -> RepMatrix {
        let g = &self.groupoid;
        let n = g.object_count();
        let mut m = CMatrix::zeros(n, n);
        for (&id, &c) in &self.coeffs {
            m[(g.target(id).0, g.source(id).0)] += c;
        }
        RepMatrix { entries: m }
    }

    /// `λ(a)` on `ℂ^{|G|}`: `(λ(α)ψ)(β) = ψ(α⁻¹∘β)` when `t(α) = t(β)`, else 0.
    pub fn left_regular_rep(&self) -> RepMatrix {
        let g = &self.groupoid;
        let n = g.morphism_count();
        let mut m = CMatrix::zeros(n, n);
        for (&alpha, &c) in &self.coeffs {
            let inv = g.inverse(alpha).expect("support ids are valid");
            let t = g.target(alpha);
            for beta in g.morphisms().iter().filter(|b| b.target == t) {
                if let Some(col) = g.lookup(inv, beta.id) {
                    m[(beta.id.0, col.0)] += c;
                }
            }
        }
        RepMatrix { entries: m }
    }

    /// `‖a‖ = ‖π₀(a)‖`, the largest singular value.
    pub fn cstar_norm(&self) -> f64 {
        spectral_norm(self.fundamental_rep().entries())
    }
}

pub fn convolve(f: &AlgebraElement, g: &AlgebraElement) -> Result<AlgebraElement> {
    f.convolve(g)
}

pub fn involution(f: &AlgebraElement) -> AlgebraElement {
    f.involution()
}

pub fn unit_element(g: Arc<FiniteGroupoid>) -> AlgebraElement {
    AlgebraElement::unit(g)
}

pub fn fundamental_rep(a: &AlgebraElement) -> RepMatrix {
    a.fundamental_rep()
}

pub fn left_regular_rep(a: &AlgebraElement) -> RepMatrix {
    a.left_regular_rep()
}

pub fn cstar_norm(a: &AlgebraElement) -> f64 {
    a.cstar_norm()
}

/// JSON layout: `{"groupoid": {...}, "coeffs": [[morphism_id, re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraElementDoc {
    pub groupoid: FiniteGroupoid,
    pub coeffs: Vec<(usize, f64, f64)>,
}

impl From<&AlgebraElement> for AlgebraElementDoc {
    fn from(a: &AlgebraElement) -> Self {
        Self {
            groupoid: (*a.groupoid).clone(),
            coeffs: a.support().map(|(m, c)| (m.0, c.re, c.im)).collect(),
        }
    }
}

impl AlgebraElementDoc {
    pub fn into_element(self) -> Result<AlgebraElement> {
        AlgebraElement::from_coeffs(
            Arc::new(self.groupoid),
            self.coeffs
                .into_iter()
                .map(|(m, re, im)| (MorphismId(m), Complex64::new(re, im))),
        )
    }

    /// Attaches the element to an already shared groupoid.
    pub fn into_element_on(self, groupoid: &Arc<FiniteGroupoid>) -> Result<AlgebraElement> {
        if self.groupoid != **groupoid {
            return Err(Error::GroupoidMismatch);
        }
        AlgebraElement::from_coeffs(
            Arc::clone(groupoid),
            self.coeffs
                .into_iter()
                .map(|(m, re, im)| (MorphismId(m), Complex64::new(re, im))),
        )
    }
}
