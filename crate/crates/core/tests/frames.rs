use std::collections::BTreeMap;

use gcs_core::deformed::{deformed_hamiltonian, DeformationFunction};
use gcs_core::fock::harmonic_hamiltonian;
use gcs_core::frame::{
    weyl_disk_family, weyl_half_disk_family, weyl_point_family, Label, ReproducingKernel,
};
use gcs_core::linalg::{hermitian_eigenvalues, CVector};
use gcs_core::{Complex64, FockSpace, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Truncated coherent-state series `e^{−|z|²/2} Σ zⁿ/√n! |n⟩`.
fn series(dim: usize, z: Complex64) -> CVector {
    let mut v = CVector::zeros(dim);
    let mut term = Complex64::new((-z.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        v[n] = term;
        term *= z / ((n + 1) as f64).sqrt();
    }
    v
}

#[test]
fn disk_grid_is_tight_and_reconstructs() {
    let s = FockSpace::new(80).unwrap();
    let fam = weyl_disk_family(s, 6.0, 200, 256).unwrap();
    let report = fam.tightness(10).unwrap();
    assert!(
        (report.lambda - 1.0).abs() < 1e-4,
        "lambda {}",
        report.lambda
    );
    assert!(report.tightness_deviation < 1e-4);
    let direct = fam.lambda_from_overlaps().unwrap();
    assert!((direct - report.lambda).abs() < 1e-12);
    let eig = hermitian_eigenvalues(report.frame.matrix());
    assert!(eig.iter().cloned().fold(f64::INFINITY, f64::min) >= -1e-10);

    let kern = ReproducingKernel::new(&fam, report.lambda).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..3 {
        let mut amps = vec![Complex64::new(0.0, 0.0); 80];
        for a in amps.iter_mut().take(10) {
            *a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
        let psi = StateVector::from_amplitudes(amps)
            .unwrap()
            .normalized()
            .unwrap();
        let back = kern.reconstruct(&psi).unwrap();
        assert!(back.distance(&psi) <= report.tightness_deviation + 1e-10);
    }

    let (m, m2) = (Label::from("r60:t10"), Label::from("r90:t200"));
    let k = kern.kernel(&m, &m2).unwrap();
    let r = kern.reproduction(&m, &m2).unwrap();
    assert!((k - r).norm() < 1e-4);

    // ⟨0|0⟩ through the function-space inner product
    let f = kern.coefficients(&s.vacuum());
    let fc: Vec<_> = f.iter().map(|c| c.conj()).collect();
    let ip = kern.inner_product_indexed(&fc, &fc).unwrap();
    assert!(
        (ip - Complex64::new(report.lambda, 0.0)).norm() < 1e-4,
        "{ip}"
    );
}

#[test]
fn half_disk_is_not_tight() {
    let s = FockSpace::new(80).unwrap();
    let fam = weyl_half_disk_family(s, 6.0, 100, 128).unwrap();
    let report = fam.tightness(10).unwrap();
    assert!(report.tightness_deviation > 0.1);
}

#[test]
fn kernel_overlaps_are_gaussian() {
    let s = FockSpace::new(60).unwrap();
    let zs = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.2, -0.4),
        Complex64::new(-1.5, 1.1),
        Complex64::new(0.3, 1.9),
        Complex64::new(-0.8, -0.9),
    ];
    let lambda = 0.9;
    let pts = zs
        .iter()
        .enumerate()
        .map(|(i, &z)| (Label(format!("z{i}")), z, 1.0))
        .collect();
    let fam = weyl_point_family(s, pts).unwrap();
    let kern = ReproducingKernel::new(&fam, lambda).unwrap();
    for (i, z) in zs.iter().enumerate() {
        for (j, w) in zs.iter().enumerate() {
            let expect = (-(z - w).norm_sqr() / 2.0).exp() / lambda;
            assert!((kern.kernel_at(i, j).norm() - expect).abs() < 1e-6);
        }
    }
    let labels: Vec<Label> = (0..zs.len()).map(|i| Label(format!("z{i}"))).collect();
    let gram = kern.gram(&labels).unwrap();
    let min = hermitian_eigenvalues(&gram)
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    assert!(min >= -1e-9);
}

#[test]
fn harmonic_evolution_preserves_coherence_and_deformed_does_not() {
    let s = FockSpace::new(60).unwrap();
    let zs = [
        Complex64::new(1.0, 0.5),
        Complex64::new(-1.2, 1.4),
        Complex64::new(0.2, -1.9),
    ];
    for t in [0.1, 1.0] {
        let rot = Complex64::from_polar(1.0, -t);
        let mut pts = Vec::new();
        let mut relabel = BTreeMap::new();
        for (i, &z) in zs.iter().enumerate() {
            pts.push((Label(format!("z{i}")), z, 1.0));
            pts.push((Label(format!("z{i}:t")), z * rot, 1.0));
            relabel.insert(Label(format!("z{i}")), Label(format!("z{i}:t")));
        }
        let fam = weyl_point_family(s, pts).unwrap();
        let u = harmonic_hamiltonian(s).unwrap().evolution(t);
        assert!(fam.stability_check(&u, &relabel).unwrap() <= 1e-6);

        // series oracle for the evolved state, independent of the matrix path
        for &z in &zs {
            let evolved = u.matrix() * series(60, z);
            let target = series(60, z * rot) * Complex64::from_polar(1.0, -t / 2.0);
            assert!((evolved - target).norm() < 1e-6);
        }

        let hf = deformed_hamiltonian(s, &DeformationFunction::sqrt(59), 1.0).unwrap();
        let uf = hf.evolution(t);
        assert!(fam.stability_check(&uf, &relabel).unwrap() > 1e-2);
    }
}
