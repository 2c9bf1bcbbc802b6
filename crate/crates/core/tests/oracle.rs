//! Continuum calculations checked against the brute-force discretised model.

use gamow_core::decay::{fit_exponential, survival_amplitude, zeno_derivative, SurvivalSeries};
use gamow_core::friedrichs::{
    discretize, discretized_hamiltonian, find_pole, self_energy, spectral_density, FormFactor,
    FriedrichsModel, Sheet,
};
use gamow_core::numerics::{NumericsError, QuadratureSpec, RootSearchConfig};
use gamow_core::Complex;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn flat(lambda: f64) -> FriedrichsModel<f64> {
    FriedrichsModel::new(1.0, lambda, FormFactor::flat_cutoff(10.0).unwrap()).unwrap()
}

#[test]
fn secular_solver_matches_dense_eigensolver() {
    let model = FriedrichsModel::new(1.0, 0.3, FormFactor::rational(1.5).unwrap()).unwrap();
    let h = discretized_hamiltonian(&model, 150, 200.0).unwrap();
    let dense = h.to_dense();
    let n = h.dim();
    let m: DMatrix<f64> = DMatrix::from_fn(n, n, |i, j| dense[i][j]);
    let eig = m.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());

    let spectrum = discretize(&model, 150, 200.0).unwrap();
    assert_eq!(spectrum.eigenvalues.len(), n);
    for (k, (e, w)) in pairs.iter().enumerate() {
        assert!((spectrum.eigenvalues[k] - e).abs() < 1e-10, "eigenvalue {k}");
        assert!((spectrum.overlaps[k] - w).abs() < 1e-10, "overlap {k}");
    }
}

#[test]
fn overlap_sum_is_complete() {
    let spectrum = discretize(&flat(0.1), 4000, 12.0).unwrap();
    assert!((spectrum.overlap_sum() - 1.0).abs() < 1e-10);
}

#[test]
fn width_from_oracle_survival_curve() {
    let spec = QuadratureSpec::default();
    for lambda in [0.05, 0.1, 0.2] {
        let model = flat(lambda);
        let pole = find_pole(&model, &RootSearchConfig::default(), &spec).unwrap();
        let gamma = pole.gamma();
        let oracle = discretize(&model, 4000, 12.0).unwrap();
        let times: Vec<f64> = (0..=200).map(|i| i as f64 * 0.025 * 6.0 / gamma).collect();
        let amplitudes = times.iter().map(|&t| oracle.amplitude(t)).collect();
        let series = SurvivalSeries::from_amplitudes(times, amplitudes).unwrap();
        let fit = fit_exponential(&series, 1.0 / gamma, 5.0 / gamma, 0.0).unwrap();
        let rel = (fit.gamma - gamma).abs() / gamma;
        assert!(rel < 0.05, "lambda {lambda}: oracle {} vs pole {gamma}", fit.gamma);
    }
}

#[test]
fn amplitude_matches_oracle_sum() {
    let spec = QuadratureSpec::default();
    let model = flat(0.1);
    let gamma = find_pole(&model, &RootSearchConfig::default(), &spec).unwrap().gamma();
    let oracle = discretize(&model, 4000, 12.0).unwrap();
    let mut worst = 0.0f64;
    for i in 0..=50 {
        let t = i as f64 * 0.1 / gamma;
        let a = survival_amplitude(&model, t, &spec).unwrap();
        worst = worst.max((a - oracle.amplitude(t)).norm());
    }
    assert!(worst < 1e-3, "max |A - A_disc| = {worst}");
}

#[test]
fn oracle_survival_is_flat_at_origin() {
    let gamma = 0.0636;
    for n in [500, 1000, 2000, 4000] {
        let oracle = discretize(&flat(0.1), n, 12.0).unwrap();
        let r = zeno_derivative(
            |t| Ok::<_, NumericsError>(oracle.survival_probability(t)),
            0.01,
            gamma,
        )
        .unwrap();
        assert!(r.is_zeno && r.resolved, "n = {n}: {r:?}");
    }
}

#[test]
fn spectral_peak_sits_at_the_pole() {
    let spec = QuadratureSpec::default();
    let model = flat(0.1);
    let pole = find_pole(&model, &RootSearchConfig::default(), &spec).unwrap();
    let (mut best_w, mut best) = (0.0, 0.0);
    for i in 0..=4000 {
        let w = 0.8 + i as f64 * 1e-4;
        let rho = spectral_density(&model, w, &spec).unwrap();
        if rho > best {
            best = rho;
            best_w = w;
        }
    }
    assert!((best_w - pole.e_r()).abs() < pole.gamma());
}

#[test]
fn sheet_difference_at_random_points() {
    let spec = QuadratureSpec::default();
    let model = flat(0.2);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let z = Complex::new(rng.gen_range(0.05..9.95), -rng.gen_range(0.01..3.0));
        let one = self_energy(&model, z, Sheet::First, &spec).unwrap();
        let two = self_energy(&model, z, Sheet::Second, &spec).unwrap();
        let jump = Complex::new(0.0, 2.0 * std::f64::consts::PI * 0.04);
        assert!((two - one - jump).norm() < 1e-12 * one.norm().max(1.0));
    }
}
