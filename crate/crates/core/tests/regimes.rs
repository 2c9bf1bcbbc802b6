//! Decay regimes of the flat-cutoff model on a long time grid.

use gamow_core::decay::{
    classify_regimes, fit_pole_from_series, survival_probability, zeno_check, RegimeOptions,
};
use gamow_core::friedrichs::{find_pole, FormFactor, FriedrichsModel};
use gamow_core::numerics::{QuadratureSpec, RootSearchConfig};

#[test]
fn zeno_exponential_and_tail() {
    let model = FriedrichsModel::new(1.0, 0.1, FormFactor::flat_cutoff(10.0).unwrap()).unwrap();
    let spec = QuadratureSpec::default();
    let pole = find_pole(&model, &RootSearchConfig::default(), &spec).unwrap();
    let gamma = pole.gamma();

    let mut times: Vec<f64> = (0..40).map(|i| i as f64 * 0.05).collect();
    times.extend((0..).map(|i| 2.0 + i as f64 * 0.5).take_while(|&t| t <= 60.0 / gamma));
    let series = survival_probability(&model, &times, &spec).unwrap();
    let report = classify_regimes(&series, &pole, &RegimeOptions::default()).unwrap();

    let zeno = report.zeno_window.expect("Zeno window");
    assert!(report.zeno_curvature.unwrap() > 0.0);
    let exp = report.exponential_window;
    assert!(zeno.end < exp.start);
    assert!(exp.start <= 1.0 / gamma && exp.end >= 5.0 / gamma);
    assert!((report.gamma_fit - gamma).abs() / gamma < 0.05);
    assert!((report.seed_gamma_fit - gamma).abs() / gamma < 0.05);

    for (&t, &p) in series.times.iter().zip(&series.probabilities) {
        if t >= exp.start && t <= exp.end {
            let gamow = (-gamma * t).exp();
            assert!((p - gamow).abs() / gamow <= 0.05, "t = {t}");
        }
    }

    let tail = &report.tail;
    assert!(tail.resolved);
    let window = tail.window.unwrap();
    assert!(window.start > exp.end);
    let alpha = tail.exponent.unwrap();
    assert!((alpha - 2.0).abs() < 0.2, "tail exponent {alpha}");
    assert!(tail.ratio_increasing);
    assert!(tail.envelope_ratio.last().unwrap().1 > 1.0);

    let (e_fit, g_fit) = fit_pole_from_series(&series, 1.0 / gamma, 5.0 / gamma).unwrap();
    assert!((e_fit - pole.e_r()).abs() < 1e-3);
    assert!((g_fit - gamma).abs() / gamma < 0.05);
}

#[test]
fn zeno_for_rational_form_factor() {
    let model = FriedrichsModel::new(1.0, 0.1, FormFactor::rational(1.0).unwrap()).unwrap();
    let report = zeno_check(&model, &QuadratureSpec::default()).unwrap();
    assert!(report.is_zeno, "{report:?}");
}
