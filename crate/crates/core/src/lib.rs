//! Numerical toolkit for finite groupoids, their convolution *-algebras,
//! truncated Fock-space oscillators (harmonic and f-deformed) and
//! generalized coherent-state frames with reproducing kernels.

pub mod algebra;
pub mod deformed;
pub mod error;
pub mod fock;
pub mod frame;
pub mod groupoid;
pub mod linalg;
pub mod quadrature;

pub use algebra::{AlgebraElement, AlgebraElementDoc, RepMatrix};
pub use deformed::{DeformationFunction, DeformationSpec, FNormalization};
pub use error::{Error, Result};
pub use fock::{
    DisplacementGenerator, FockOperator, FockSpace, MatrixDoc, ResolutionReport, StateDoc,
    StateVector, WeylElement,
};
pub use frame::{
    CoherentFamily, FamilyDoc, FrameReport, GroupSample, Label, ReproducingKernel, SampleRep,
};
pub use groupoid::{AxiomReport, Composition, FiniteGroupoid, Morphism, MorphismId, ObjectId};
pub use num_complex::Complex64;
