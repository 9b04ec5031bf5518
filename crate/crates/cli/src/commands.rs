//! Experiment bodies. Each command validates its params, computes, and
//! returns a [`Report`] with a plot table and any tolerance violations.

use std::collections::BTreeMap;
use std::sync::Arc;

use gcs_core::algebra::AlgebraElement;
use gcs_core::deformed::{
    commutator_f, deformed_annihilation, deformed_displacement, deformed_hamiltonian,
    f_coherent_state, f_normalization, min_phase_distance, DeformationSpec,
};
use gcs_core::fock::{
    annihilation, bch_phase, coherent_state, displacement, hamiltonian, resolution_of_identity,
    DisplacementGenerator, WeylElement,
};
use gcs_core::frame::{
    deformed_disk_family, parse_complex, weyl_disk_family, weyl_half_disk_family,
    weyl_point_family, CoherentFamily, FamilyDoc, Label, ReproducingKernel,
};
use gcs_core::groupoid::{action_groupoid, pair_groupoid, units_only, FiniteGroup};
use gcs_core::linalg::{hermitian_eigenvalues, max_abs, spectral_norm, CMatrix, CVector};
use gcs_core::{
    Complex64, FiniteGroupoid, FockOperator, FockSpace, MorphismId, ResolutionReport, StateVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::{CliError, CommandName};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub quantity: String,
    pub value: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub params: Value,
    pub status: &'static str,
    pub result: Value,
    pub table: Vec<Value>,
    pub violations: Vec<Violation>,
    #[serde(skip)]
    pub default_columns: Vec<String>,
}

struct Builder {
    violations: Vec<Violation>,
}

impl Builder {
    fn new() -> Self {
        Self {
            violations: Vec::new(),
        }
    }

    /// Records a violation when `value > tolerance` (or is NaN).
    fn check(&mut self, quantity: &str, value: f64, tolerance: f64) {
        if !(value <= tolerance) {
            self.violations.push(Violation {
                quantity: quantity.to_string(),
                value,
                tolerance,
            });
        }
    }

    fn finish<P: Serialize>(
        self,
        command: CommandName,
        params: &P,
        result: Value,
        table: Vec<Value>,
        columns: &[&str],
    ) -> Result<Report, CliError> {
        Ok(Report {
            command: command.as_str(),
            params: serde_json::to_value(params)?,
            status: if self.violations.is_empty() {
                "ok"
            } else {
                "tolerance-failure"
            },
            result,
            table,
            violations: self.violations,
            default_columns: columns.iter().map(|c| c.to_string()).collect(),
        })
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct Common {
    tol: Option<f64>,
    seed: u64,
}

fn parse<T: DeserializeOwned>(params: Map<String, Value>) -> Result<T, CliError> {
    serde_json::from_value(Value::Object(params))
        .map_err(|e| CliError::Validation(format!("invalid params: {e}")))
}

pub fn run(command: CommandName, params: &Map<String, Value>) -> Result<Report, CliError> {
    let mut rest = params.clone();
    let mut common = Map::new();
    for key in ["tol", "seed"] {
        if let Some(v) = rest.remove(key) {
            common.insert(key.into(), v);
        }
    }
    let common: Common = parse(common)?;
    if let Some(t) = common.tol {
        if !(t >= 0.0) {
            return Err(CliError::Validation(format!(
                "tolerance must be non-negative, got {t}"
            )));
        }
    }
    match command {
        CommandName::GroupoidVerify => groupoid_verify(parse(rest)?, &common),
        CommandName::AlgebraCheck => algebra_check(parse(rest)?, &common),
        CommandName::OscillatorReport => oscillator_report(parse(rest)?, &common),
        CommandName::Resolution => resolution(parse(rest)?, &common),
        CommandName::FOscillatorReport => f_oscillator_report(parse(rest)?, &common),
        CommandName::FrameCheck => frame_check(parse(rest)?, &common),
        CommandName::Stability => stability(parse(rest)?, &common),
    }
}

#[derive(Debug, Serialize)]
struct Resolved<'a, P> {
    #[serde(flatten)]
    params: &'a P,
    tol: Option<f64>,
    seed: u64,
}

fn resolved<'a, P>(params: &'a P, common: &Common) -> Resolved<'a, P> {
    Resolved {
        params,
        tol: common.tol,
        seed: common.seed,
    }
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn complex_param(text: &str) -> Result<Complex64, CliError> {
    Ok(parse_complex(text)?)
}

fn space(dim: usize) -> Result<FockSpace, CliError> {
    Ok(FockSpace::new(dim)?)
}

// groupoid-verify

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroupoidParams {
    pub pairs: Option<usize>,
    pub units: Option<usize>,
    pub cyclic: Option<usize>,
    pub points: Option<usize>,
    pub random: usize,
    pub file: Option<String>,
}

fn translation_groupoid(order: usize, points: usize) -> Result<FiniteGroupoid, CliError> {
    if points == 0 || order % points != 0 {
        return Err(CliError::Validation(format!(
            "translation by Z_{order} on {points} points needs points dividing the order"
        )));
    }
    let g = FiniteGroup::cyclic(order)?;
    Ok(action_groupoid(&g, points, |h, x| (x + h) % points)?)
}

fn random_piece(rng: &mut ChaCha8Rng) -> Result<FiniteGroupoid, CliError> {
    Ok(match rng.gen_range(0..3) {
        0 => pair_groupoid(rng.gen_range(1..=5))?,
        1 => units_only(rng.gen_range(1..=4))?,
        _ => {
            let p = rng.gen_range(1..=4);
            translation_groupoid(p * rng.gen_range(1..=3), p)?
        }
    })
}

fn groupoid_verify(p: GroupoidParams, common: &Common) -> Result<Report, CliError> {
    let mut pieces = Vec::new();
    if let Some(n) = p.pairs {
        pieces.push(pair_groupoid(n)?);
    }
    if let Some(n) = p.units {
        pieces.push(units_only(n)?);
    }
    match (p.cyclic, p.points) {
        (Some(order), Some(points)) => pieces.push(translation_groupoid(order, points)?),
        (None, None) => {}
        _ => {
            return Err(CliError::Validation(
                "`cyclic` and `points` go together".into(),
            ))
        }
    }
    if let Some(path) = &p.file {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read groupoid file {path}: {e}")))?;
        pieces.push(serde_json::from_str(&text)?);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    for _ in 0..p.random {
        pieces.push(random_piece(&mut rng)?);
    }
    let mut it = pieces.into_iter();
    let first = it.next().ok_or_else(|| {
        CliError::Validation(
            "no groupoid given (use pairs, units, cyclic/points, file or random)".into(),
        )
    })?;
    let g = it.fold(first, |acc, piece| acc.disjoint_union(&piece));

    let report = g.verify_axioms();
    let mut b = Builder::new();
    let mut table = Vec::new();
    for check in &report.checks {
        let name = serde_json::to_value(check.axiom)?;
        let name = name.as_str().unwrap_or_default().to_string();
        b.check(&format!("axiom:{name}"), check.failures as f64, 0.0);
        table.push(json!({
            "axiom": name,
            "passed": check.passed,
            "checked": check.checked,
            "failures": check.failures,
        }));
    }
    let orbits: Vec<usize> = g.orbits().iter().map(Vec::len).collect();
    let isotropy = g
        .objects()
        .map(|x| g.isotropy_group(x).map(|h| h.len()))
        .collect::<Result<Vec<_>, _>>();
    let result = json!({
        "objects": g.object_count(),
        "morphisms": g.morphism_count(),
        "all_passed": report.all_passed(),
        "counterexamples": report.counterexample_count(),
        "checks": report.checks,
        "orbit_sizes": orbits,
        "isotropy_orders": isotropy.ok(),
    });
    b.finish(
        CommandName::GroupoidVerify,
        &resolved(&p, common),
        result,
        table,
        &["axiom", "checked", "failures"],
    )
}

// algebra-check

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgebraParams {
    pub pairs: usize,
    pub samples: usize,
}

impl Default for AlgebraParams {
    fn default() -> Self {
        Self {
            pairs: 6,
            samples: 100,
        }
    }
}

/// Random element with about half the morphisms in its support.
pub fn random_element(
    g: &Arc<FiniteGroupoid>,
    rng: &mut ChaCha8Rng,
) -> Result<AlgebraElement, CliError> {
    let mut coeffs = Vec::new();
    for i in 0..g.morphism_count() {
        if rng.gen_bool(0.5) {
            coeffs.push((
                MorphismId(i),
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            ));
        }
    }
    Ok(AlgebraElement::from_coeffs(Arc::clone(g), coeffs)?)
}

fn algebra_check(p: AlgebraParams, common: &Common) -> Result<Report, CliError> {
    if p.samples == 0 {
        return Err(CliError::Validation("samples must be positive".into()));
    }
    let g = Arc::new(pair_groupoid(p.pairs)?);
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let mut table = Vec::with_capacity(p.samples);
    let (mut pi0_max, mut lambda_max, mut cstar_max, mut inv_max) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for k in 0..p.samples {
        let f = random_element(&g, &mut rng)?;
        let h = random_element(&g, &mut rng)?;
        let fh = f.convolve(&h)?;
        let pi0 = spectral_norm(
            &(fh.fundamental_rep().into_entries()
                - f.fundamental_rep().into_entries() * h.fundamental_rep().into_entries()),
        );
        let lambda = spectral_norm(
            &(fh.left_regular_rep().into_entries()
                - f.left_regular_rep().into_entries() * h.left_regular_rep().into_entries()),
        );
        let norm = f.cstar_norm();
        let cstar = (f.involution().convolve(&f)?.cstar_norm() - norm * norm).abs();
        let inv = spectral_norm(
            &(f.involution().fundamental_rep().into_entries()
                - f.fundamental_rep().into_entries().adjoint()),
        );
        pi0_max = pi0_max.max(pi0);
        lambda_max = lambda_max.max(lambda);
        cstar_max = cstar_max.max(cstar);
        inv_max = inv_max.max(inv);
        table.push(json!({
            "sample": k,
            "pi0_error": pi0,
            "lambda_error": lambda,
            "cstar_error": cstar,
            "involution_error": inv,
        }));
    }
    let hom_tol = common.tol.unwrap_or(1e-12);
    let mut b = Builder::new();
    b.check("pi0_homomorphism", pi0_max, hom_tol);
    b.check("lambda_homomorphism", lambda_max, hom_tol);
    b.check("involution", inv_max, hom_tol);
    b.check("cstar_identity", cstar_max, 1e-10);
    let result = json!({
        "morphisms": g.morphism_count(),
        "max_pi0_error": pi0_max,
        "max_lambda_error": lambda_max,
        "max_cstar_error": cstar_max,
        "max_involution_error": inv_max,
    });
    b.finish(
        CommandName::AlgebraCheck,
        &resolved(&p, common),
        result,
        table,
        &["sample", "pi0_error", "lambda_error", "cstar_error"],
    )
}

// oscillator-report

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OscillatorParams {
    pub dim: usize,
    pub radii: Vec<f64>,
    pub angle: f64,
    pub triples: usize,
}

impl Default for OscillatorParams {
    fn default() -> Self {
        Self {
            dim: 40,
            radii: vec![0.5, 1.0, 2.0],
            angle: 0.3,
            triples: 1000,
        }
    }
}

/// Truncated series `e^{−|z|²/2} Σ zⁿ/√n! |n⟩`.
pub fn coherent_series(dim: usize, z: Complex64) -> CVector {
    let mut v = CVector::zeros(dim);
    let mut term = Complex64::new((-0.5 * z.norm_sqr()).exp(), 0.0);
    for n in 0..dim {
        v[n] = term;
        term *= z / ((n + 1) as f64).sqrt();
    }
    v
}

/// `tr(Y†X)/tr(Y†Y)` on the leading block: the scalar with `X ≈ c Y`.
fn proportionality(x: &CMatrix, y: &CMatrix) -> (Complex64, f64) {
    let c = (y.adjoint() * x).trace() / (y.adjoint() * y).trace();
    (c, max_abs(&(x - y * c)))
}

const PROPORTIONALITY_BLOCK: usize = 20;

fn oscillator_report(p: OscillatorParams, common: &Common) -> Result<Report, CliError> {
    let s = space(p.dim)?;
    let n = p.dim;
    let a = annihilation(s)?;
    let comm = a.commutator(&a.adjoint());
    let identity_defect = max_abs(&(comm.block(n - 1) - CMatrix::identity(n - 1, n - 1)));
    let corner = comm.entry(n - 1, n - 1);
    let corner_error = (corner - Complex64::new(-((n - 1) as f64), 0.0)).norm();
    let off_diag = gcs_core::linalg::max_abs_off_diagonal(comm.matrix());

    let mut b = Builder::new();
    b.check(
        "commutator_identity_block",
        identity_defect.max(off_diag),
        1e-13,
    );
    b.check("commutator_corner", corner_error, 1e-13);

    let mut table = Vec::new();
    let mut coherent = Vec::new();
    let mut max_residual = 0.0f64;
    let mut max_series = 0.0f64;
    for &r in &p.radii {
        let z = Complex64::from_polar(r, p.angle);
        let state = coherent_state(s, z)?;
        let residual = (a.matrix() * state.amplitudes() - state.amplitudes() * z).norm();
        let series = (state.amplitudes() - coherent_series(n, z)).norm();
        max_residual = max_residual.max(residual);
        max_series = max_series.max(series);
        coherent.push(json!({"z": complex_json(z), "eigen_residual": residual, "series_deviation": series, "norm": state.norm()}));
        table.push(json!({"abs_z": r, "eigen_residual": residual, "series_deviation": series}));
    }
    b.check(
        "coherent_eigen_residual",
        max_residual,
        common.tol.unwrap_or(1e-8),
    );
    b.check("displacement_vs_series", max_series, 1e-9);

    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let random_weyl = |rng: &mut ChaCha8Rng| {
        WeylElement::new(
            rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI),
            Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)),
        )
    };
    let mut assoc = 0.0f64;
    for _ in 0..p.triples {
        let (g1, g2, g3) = (
            random_weyl(&mut rng),
            random_weyl(&mut rng),
            random_weyl(&mut rng),
        );
        let l = g1.compose(&g2).compose(&g3);
        let r = g1.compose(&g2.compose(&g3));
        assoc = assoc.max((l.nu - r.nu).abs()).max((l.z - r.z).norm());
    }
    b.check("weyl_associativity", assoc, 1e-12);

    let generator = DisplacementGenerator::harmonic(s)?;
    let k = PROPORTIONALITY_BLOCK.min(n);
    let mut modulus_defect = 0.0f64;
    let mut prop_residual = 0.0f64;
    for _ in 0..10 {
        let g1 = WeylElement::new(
            rng.gen_range(-3.0..3.0),
            Complex64::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)),
        );
        let g2 = WeylElement::new(
            rng.gen_range(-3.0..3.0),
            Complex64::new(rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)),
        );
        let x = (&g1.operator(&generator) * &g2.operator(&generator)).block(k);
        let y = g1.compose(&g2).operator(&generator).block(k);
        let (c, res) = proportionality(&x, &y);
        modulus_defect = modulus_defect.max((c.norm() - 1.0).abs());
        prop_residual = prop_residual.max(res);
    }
    b.check("weyl_proportionality_modulus", modulus_defect, 1e-8);

    let (z, w) = (Complex64::new(0.6, 0.3), Complex64::new(-0.2, 0.7));
    let x = (&displacement(s, z)? * &displacement(s, w)?).block(k);
    let y = displacement(s, z + w)?.block(k);
    let (measured, bch_residual) = proportionality(&x, &y);
    let frozen = bch_phase(z, w);
    let alternative = Complex64::new(((z * w.conj()).im / 2.0).exp(), 0.0);
    b.check("bch_phase", (measured - frozen).norm(), 1e-9);

    let result = json!({
        "commutator": {
            "identity_block_defect": identity_defect,
            "off_diagonal": off_diag,
            "corner": corner.re,
            "expected_corner": -((n - 1) as f64),
        },
        "coherent": coherent,
        "weyl": {
            "triples": p.triples,
            "associativity_max_error": assoc,
            "proportionality_block": k,
            "proportionality_modulus_defect": modulus_defect,
            "proportionality_residual": prop_residual,
        },
        "bch": {
            "convention": "D(z)D(w) = exp(i Im(z conj(w))) D(z+w)",
            "z": complex_json(z),
            "w": complex_json(w),
            "measured_phase": complex_json(measured),
            "frozen_phase": complex_json(frozen),
            "deviation": (measured - frozen).norm(),
            "residual": bch_residual,
            "alternative_form": "exp(Im(z conj(w))/2)",
            "alternative_deviation": (measured - alternative).norm(),
        },
    });
    b.finish(
        CommandName::OscillatorReport,
        &resolved(&p, common),
        result,
        table,
        &["abs_z", "eigen_residual", "series_deviation"],
    )
}

// resolution

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ResolutionParams {
    #[serde(rename = "R")]
    pub radius: f64,
    pub nr: usize,
    pub ntheta: usize,
    pub dim: usize,
    pub probe: usize,
}

impl Default for ResolutionParams {
    fn default() -> Self {
        Self {
            radius: 6.0,
            nr: 200,
            ntheta: 256,
            dim: 80,
            probe: 10,
        }
    }
}

fn resolution(p: ResolutionParams, common: &Common) -> Result<Report, CliError> {
    if p.probe == 0 || p.probe > p.dim {
        return Err(CliError::Validation(format!(
            "probe must be in 1..={}",
            p.dim
        )));
    }
    let c = resolution_of_identity(space(p.dim)?, p.radius, p.nr, p.ntheta)?;
    let report = ResolutionReport::new(&c, p.radius, p.nr, p.ntheta, p.probe);
    let mut b = Builder::new();
    if let Some(tol) = common.tol {
        b.check("max_abs_deviation", report.max_abs_deviation, tol);
    }
    let table = report
        .diag
        .iter()
        .enumerate()
        .map(|(n, d)| json!({"n": n, "diag_n": d, "abs_diag_n_minus_1": (d - 1.0).abs()}))
        .collect();
    b.finish(
        CommandName::Resolution,
        &resolved(&p, common),
        serde_json::to_value(&report)?,
        table,
        &["n", "diag_n", "abs_diag_n_minus_1"],
    )
}

// f-oscillator-report

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FOscillatorParams {
    pub dim: usize,
    pub f: DeformationSpec,
    pub omega: f64,
    pub z: String,
    pub w: String,
}

impl Default for FOscillatorParams {
    fn default() -> Self {
        Self {
            dim: 40,
            f: DeformationSpec::Builtin("sqrt".into()),
            omega: 1.0,
            z: "0.5+0.2i".into(),
            w: "1".into(),
        }
    }
}

fn f_oscillator_report(p: FOscillatorParams, common: &Common) -> Result<Report, CliError> {
    let s = space(p.dim)?;
    let n = p.dim;
    let f = p.f.resolve(n)?;
    let z = complex_param(&p.z)?;
    let w = complex_param(&p.w)?;

    let h = deformed_hamiltonian(s, &f, p.omega)?;
    let energies: Vec<f64> = h.diagonal_values().iter().map(|e| e.re).collect();
    let fsq = |k: usize| {
        if k == 0 {
            0.0
        } else {
            f.values()[k - 1].powi(2)
        }
    };
    let mut closed = 0.0f64;
    for (k, e) in energies.iter().enumerate().take(n - 1) {
        let expect = 0.5 * p.omega * (fsq(k + 1) * (k + 1) as f64 + fsq(k) * k as f64);
        closed = closed.max((e - expect).abs() / expect.abs().max(1.0));
    }
    let comm: Vec<f64> = commutator_f(s, &f)?
        .diagonal_values()
        .iter()
        .map(|c| c.re)
        .collect();

    let af = deformed_annihilation(s, &f)?;
    let state = f_coherent_state(s, &f, z)?;
    let residual = (af.matrix() * state.amplitudes() - state.amplitudes() * z).norm();
    let norm = f_normalization(s, &f, z)?;

    let prod = &deformed_displacement(s, &f, z)? * &deformed_displacement(s, &f, w)?;
    let sum = deformed_displacement(s, &f, z + w)?;
    let projective = min_phase_distance(&prod, &sum);

    let mut b = Builder::new();
    b.check(
        "f_coherent_eigen_residual",
        residual,
        common.tol.unwrap_or(1e-8),
    );
    b.check("hamiltonian_closed_form_relative", closed, 1e-13);
    let table = energies
        .iter()
        .zip(&comm)
        .enumerate()
        .map(|(k, (e, c))| json!({"n": k, "E_n": e, "F_n": c}))
        .collect();
    let result = json!({
        "energies": energies,
        "closed_form_max_relative_deviation": closed,
        "commutator_diagonal": comm,
        "f_coherent": {
            "z": complex_json(z),
            "normalization": norm.value,
            "eigen_residual": residual,
        },
        "displacement_product": {
            "z": complex_json(z),
            "w": complex_json(w),
            "min_phase_distance": projective,
        },
    });
    b.finish(
        CommandName::FOscillatorReport,
        &resolved(&p, common),
        result,
        table,
        &["n", "E_n"],
    )
}

// frame-check

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrameParams {
    pub family: String,
    pub file: Option<String>,
    #[serde(rename = "R")]
    pub radius: f64,
    pub nr: usize,
    pub ntheta: usize,
    pub dim: usize,
    pub probe: usize,
    pub f: DeformationSpec,
    pub vectors: usize,
}

impl Default for FrameParams {
    fn default() -> Self {
        Self {
            family: "disk".into(),
            file: None,
            radius: 6.0,
            nr: 200,
            ntheta: 256,
            dim: 80,
            probe: 10,
            f: DeformationSpec::Builtin("sqrt".into()),
            vectors: 20,
        }
    }
}

const KERNEL_PAIRS: usize = 5;
const GRAM_LABELS: usize = 16;
/// Norm outside the probe block below which a sample counts as interior.
const INTERIOR_LEAK: f64 = 1e-3;

fn build_family(p: &FrameParams) -> Result<CoherentFamily, CliError> {
    Ok(match p.family.as_str() {
        "disk" => weyl_disk_family(space(p.dim)?, p.radius, p.nr, p.ntheta)?,
        "half-disk" => weyl_half_disk_family(space(p.dim)?, p.radius, p.nr, p.ntheta)?,
        "deformed" => deformed_disk_family(
            space(p.dim)?,
            &p.f.resolve(p.dim)?,
            p.radius,
            p.nr,
            p.ntheta,
        )?,
        "file" => {
            let path = p
                .file
                .as_ref()
                .ok_or_else(|| CliError::Validation("family `file` needs a `file` param".into()))?;
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Validation(format!("cannot read family file {path}: {e}"))
            })?;
            let doc: FamilyDoc = serde_json::from_str(&text)?;
            doc.into_family()?
        }
        other => {
            return Err(CliError::Validation(format!(
                "unknown family `{other}` (expected disk, half-disk, deformed or file)"
            )))
        }
    })
}

fn frame_check(p: FrameParams, common: &Common) -> Result<Report, CliError> {
    let family = build_family(&p)?;
    if family.is_empty() {
        return Err(CliError::Validation("family has no samples".into()));
    }
    let probe = p.probe.min(family.dim());
    let report = family.tightness(probe)?;
    let lambda_direct = family.lambda_from_overlaps()?;
    let consistency = (lambda_direct - report.lambda).abs();
    let min_eig = hermitian_eigenvalues(report.frame.matrix())
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    let kernel = ReproducingKernel::new(&family, report.lambda)?;
    let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
    let mut recon = 0.0f64;
    for _ in 0..p.vectors {
        let mut amps = vec![Complex64::new(0.0, 0.0); family.dim()];
        for a in amps.iter_mut().take(probe) {
            *a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let psi = StateVector::from_amplitudes(amps)?.normalized()?;
        recon = recon.max(kernel.reconstruct(&psi)?.distance(&psi));
    }
    let labels: Vec<Label> = family.samples().iter().map(|s| s.label.clone()).collect();
    // reproduction is only expected where the orbit vectors live on the probe block
    let interior: Vec<usize> = (0..labels.len())
        .filter(|&i| kernel.orbit(i).rows(probe, family.dim() - probe).norm() <= INTERIOR_LEAK)
        .collect();
    let mut reproduction = None;
    if !interior.is_empty() {
        let mut worst = 0.0f64;
        for _ in 0..KERNEL_PAIRS {
            let i = interior[rng.gen_range(0..interior.len())];
            let j = interior[rng.gen_range(0..interior.len())];
            let k = kernel.kernel(&labels[i], &labels[j])?;
            let r = kernel.reproduction(&labels[i], &labels[j])?;
            worst = worst.max((k - r).norm());
        }
        reproduction = Some(worst);
    }
    let subset: Vec<Label> = (0..GRAM_LABELS.min(labels.len()))
        .map(|_| labels[rng.gen_range(0..labels.len())].clone())
        .collect();
    let gram_min = hermitian_eigenvalues(&kernel.gram(&subset)?)
        .into_iter()
        .fold(f64::INFINITY, f64::min);

    let mut b = Builder::new();
    if let Some(tol) = common.tol {
        b.check("tightness_deviation", report.tightness_deviation, tol);
    }
    b.check("lambda_consistency", consistency, 1e-12);
    b.check("frame_negative_eigenvalue", -min_eig, 1e-10);
    b.check("gram_negative_eigenvalue", -gram_min, 1e-9);
    if p.vectors > 0 {
        b.check(
            "reconstruction_error",
            recon,
            report.tightness_deviation + 1e-10,
        );
    }
    let table = report
        .frame
        .diagonal_values()
        .iter()
        .take(probe)
        .enumerate()
        .map(|(n, c)| json!({"n": n, "C_nn": c.re, "C_nn_over_lambda": c.re / report.lambda}))
        .collect();
    let result = json!({
        "samples": report.samples,
        "dim": family.dim(),
        "probe_dim": report.probe_dim,
        "lambda": report.lambda,
        "lambda_direct": lambda_direct,
        "tightness_deviation": report.tightness_deviation,
        "frame_min_eigenvalue": min_eig,
        "reconstruction_vectors": p.vectors,
        "reconstruction_max_error": recon,
        "interior_samples": interior.len(),
        "kernel_reproduction_max_error": reproduction,
        "gram_min_eigenvalue": gram_min,
    });
    b.finish(
        CommandName::FrameCheck,
        &resolved(&p, common),
        result,
        table,
        &["n", "C_nn", "C_nn_over_lambda"],
    )
}

// stability

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilityParams {
    pub dim: usize,
    pub hamiltonian: String,
    pub f: DeformationSpec,
    pub omega: f64,
    pub times: Vec<f64>,
    pub points: Vec<String>,
}

impl Default for StabilityParams {
    fn default() -> Self {
        Self {
            dim: 60,
            hamiltonian: "harmonic".into(),
            f: DeformationSpec::Builtin("sqrt".into()),
            omega: 1.0,
            times: vec![0.1, 1.0],
            points: ["1+0.5i", "-1.2+1.4i", "0.2-1.9i", "1.5", "-0.7-0.8i"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        }
    }
}

fn stability(p: StabilityParams, common: &Common) -> Result<Report, CliError> {
    let s = space(p.dim)?;
    let h: FockOperator = match p.hamiltonian.as_str() {
        "harmonic" => hamiltonian(s, p.omega, Complex64::new(0.0, 0.0), 0.5 * p.omega)?,
        "deformed" => deformed_hamiltonian(s, &p.f.resolve(p.dim)?, p.omega)?,
        other => {
            return Err(CliError::Validation(format!(
                "unknown hamiltonian `{other}` (expected harmonic or deformed)"
            )))
        }
    };
    let zs = p
        .points
        .iter()
        .map(|t| complex_param(t))
        .collect::<Result<Vec<_>, _>>()?;
    if zs.is_empty() || p.times.is_empty() {
        return Err(CliError::Validation(
            "need at least one point and one time".into(),
        ));
    }
    let mut b = Builder::new();
    let mut table = Vec::new();
    let mut worst = 0.0f64;
    for &t in &p.times {
        let rot = Complex64::from_polar(1.0, -p.omega * t);
        let mut pts = Vec::with_capacity(2 * zs.len());
        let mut relabel = BTreeMap::new();
        for (i, &z) in zs.iter().enumerate() {
            let (from, to) = (Label(format!("p{i}")), Label(format!("p{i}@t")));
            pts.push((from.clone(), z, 1.0));
            pts.push((to.clone(), z * rot, 1.0));
            relabel.insert(from, to);
        }
        let family = weyl_point_family(s, pts)?;
        let residual = family.stability_check(&h.evolution(t), &relabel)?;
        worst = worst.max(residual);
        table.push(json!({"t": t, "max_residual": residual}));
    }
    if let Some(tol) = common.tol {
        b.check("max_residual", worst, tol);
    }
    let result = json!({"max_residual": worst, "hamiltonian": p.hamiltonian});
    b.finish(
        CommandName::Stability,
        &resolved(&p, common),
        result,
        table,
        &["t", "max_residual"],
    )
}
