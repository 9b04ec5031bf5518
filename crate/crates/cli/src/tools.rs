//! One-shot tools that transform inputs into outputs without tolerance
//! checks: algebra arithmetic on element files and operator/state export.

use std::fs;

use clap::{Args, Subcommand, ValueEnum};
use gcs_core::deformed::{
    deformed_annihilation, deformed_displacement, deformed_hamiltonian, f_coherent_state,
};
use gcs_core::fock::{
    annihilation, coherent_state, creation, displacement, hamiltonian, momentum, number_operator,
    position,
};
use gcs_core::frame::parse_complex;
use gcs_core::{
    AlgebraElement, AlgebraElementDoc, DeformationSpec, FockOperator, FockSpace, StateVector,
};
use serde_json::json;

use crate::{CliError, Format};

#[derive(Debug, Args)]
pub struct AlgebraToolArgs {
    #[command(subcommand)]
    pub op: AlgebraOp,
}

#[derive(Debug, Subcommand)]
pub enum AlgebraOp {
    /// Convolution product of two elements over the same groupoid.
    Convolve {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// C* norm of an element.
    Norm {
        #[arg(long)]
        a: String,
    },
    /// Matrix of an element in a representation.
    Rep {
        #[arg(long)]
        a: String,
        #[arg(long, value_enum, default_value = "fundamental")]
        kind: RepKind,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RepKind {
    /// Action on functions of the objects.
    Fundamental,
    /// Left convolution on the algebra itself.
    Regular,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorKind {
    Annihilation,
    Creation,
    Number,
    Position,
    Momentum,
    Hamiltonian,
    Displacement,
    FAnnihilation,
    FHamiltonian,
    FDisplacement,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StateKind {
    Number,
    Coherent,
    FCoherent,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(
        long,
        value_enum,
        conflicts_with = "state",
        required_unless_present = "state"
    )]
    pub operator: Option<OperatorKind>,
    #[arg(long, value_enum)]
    pub state: Option<StateKind>,
    #[arg(long, default_value_t = 20)]
    pub dim: usize,
    /// Displacement or coherent label.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub z: String,
    /// Linear drive of the Hamiltonian.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub drive: String,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub beta: f64,
    /// `one`, `sqrt`, `inv_sqrt` or a JSON array of f(1), f(2), ...
    #[arg(long, default_value = "sqrt")]
    pub f: String,
    /// Level of a number state.
    #[arg(long, default_value_t = 0)]
    pub n: usize,
}

fn read_element(path: &str) -> Result<AlgebraElement, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read element {path}: {e}")))?;
    let doc: AlgebraElementDoc = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("invalid element {path}: {e}")))?;
    Ok(doc.into_element()?)
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| CliError::Validation(format!("csv: {e}"));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(&row).map_err(io)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Validation(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| CliError::Validation(format!("csv: {e}")))
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_text(value: &impl serde::Serialize) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn matrix_output(op: &FockOperator, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json_text(&op.to_doc()),
        Format::Csv => {
            let m = op.matrix();
            let mut rows = Vec::with_capacity(m.len());
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    let z = m[(i, j)];
                    rows.push(vec![i.to_string(), j.to_string(), float(z.re), float(z.im)]);
                }
            }
            csv_text(&["row", "col", "re", "im"], rows)
        }
    }
}

fn state_output(v: &StateVector, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => json_text(&v.to_doc()),
        Format::Csv => {
            let rows = v
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(n, z)| vec![n.to_string(), float(z.re), float(z.im)])
                .collect();
            csv_text(&["n", "re", "im"], rows)
        }
    }
}

pub fn run_algebra(args: &AlgebraToolArgs, format: Format) -> Result<String, CliError> {
    match &args.op {
        AlgebraOp::Convolve { a, b } => {
            let f = read_element(a)?;
            let g = read_element(b)?;
            let h = f.convolve(&g)?;
            match format {
                Format::Json => json_text(&AlgebraElementDoc::from(&h)),
                Format::Csv => {
                    let rows = h
                        .support()
                        .map(|(m, c)| vec![m.0.to_string(), float(c.re), float(c.im)])
                        .collect();
                    csv_text(&["morphism", "re", "im"], rows)
                }
            }
        }
        AlgebraOp::Norm { a } => {
            let norm = read_element(a)?.cstar_norm();
            match format {
                Format::Json => json_text(&json!({ "norm": norm })),
                Format::Csv => csv_text(&["norm"], vec![vec![float(norm)]]),
            }
        }
        AlgebraOp::Rep { a, kind } => {
            let f = read_element(a)?;
            let rep = match kind {
                RepKind::Fundamental => f.fundamental_rep(),
                RepKind::Regular => f.left_regular_rep(),
            };
            matrix_output(&FockOperator::from_rep(rep), format)
        }
    }
}

pub fn run_export(args: &ExportArgs, format: Format) -> Result<String, CliError> {
    let space = FockSpace::new(args.dim)?;
    let z = parse_complex(&args.z)?;
    let f = || -> Result<_, CliError> {
        let deformation: DeformationSpec = args.f.parse()?;
        Ok(deformation.resolve(args.dim)?)
    };
    if let Some(kind) = args.operator {
        let op = match kind {
            OperatorKind::Annihilation => annihilation(space)?,
            OperatorKind::Creation => creation(space)?,
            OperatorKind::Number => number_operator(space),
            OperatorKind::Position => position(space)?,
            OperatorKind::Momentum => momentum(space)?,
            OperatorKind::Hamiltonian => {
                hamiltonian(space, args.omega, parse_complex(&args.drive)?, args.beta)?
            }
            OperatorKind::Displacement => displacement(space, z)?,
            OperatorKind::FAnnihilation => deformed_annihilation(space, &f()?)?,
            OperatorKind::FHamiltonian => deformed_hamiltonian(space, &f()?, args.omega)?,
            OperatorKind::FDisplacement => deformed_displacement(space, &f()?, z)?,
        };
        return matrix_output(&op, format);
    }
    let state = match args.state {
        Some(StateKind::Number) => space.number_state(args.n)?,
        Some(StateKind::Coherent) => coherent_state(space, z)?,
        Some(StateKind::FCoherent) => f_coherent_state(space, &f()?, z)?,
        None => {
            return Err(CliError::Validation(
                "export needs --operator or --state".into(),
            ))
        }
    };
    state_output(&state, format)
}
