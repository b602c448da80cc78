use cinematic::experiments::{
    box_count_dimension, dyadic_range, exp_bipartite_tangency, exp_kaufman, exp_lens_scaling, exp_quasi_product,
    exp_wolff_circles, exp_wolff_concentric, fit_exponent, write_csv, ExperimentConfig, GammaChoice,
};
use cinematic::fractal::Carrier;
use cinematic::rng;
use rand::Rng;

fn cfg(lo: u32, hi: u32) -> ExperimentConfig {
    ExperimentConfig { deltas: dyadic_range(lo, hi), ..ExperimentConfig::default() }
}

#[test]
fn fit_recovers_an_exact_power() {
    let rows: Vec<(f64, f64)> = (1..=6).map(|k| (k as f64, 3.0 * (k * k) as f64)).collect();
    let (slope, intercept, residual) = fit_exponent(&rows).unwrap();
    assert!((slope - 2.0).abs() < 1e-12);
    assert!((intercept - 3f64.ln()).abs() < 1e-12);
    assert!(residual < 1e-12);
}

#[test]
fn fit_tolerates_small_noise() {
    let mut r = rng::seeded(4);
    let rows: Vec<(f64, f64)> =
        (0..10).map(|k| (2f64.powi(k), 2f64.powi(k).powf(1.5) * (1.0 + r.gen_range(-0.01..0.01)))).collect();
    let (slope, _, residual) = fit_exponent(&rows).unwrap();
    assert!((slope - 1.5).abs() < 0.05, "{slope}");
    assert!(residual < 0.03);
}

#[test]
fn fit_of_a_constant_is_flat() {
    let (slope, _, _) = fit_exponent(&[(1.0, 5.0), (2.0, 5.0), (4.0, 5.0)]).unwrap();
    assert!(slope.abs() < 1e-12);
}

#[test]
fn fit_rejects_short_or_nonpositive_input() {
    assert!(fit_exponent(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
    assert!(fit_exponent(&[(1.0, 1.0), (2.0, 0.0), (3.0, 1.0)]).is_err());
    assert!(fit_exponent(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
}

#[test]
fn box_counting_of_simple_sets() {
    let scales = dyadic_range(2, 8);
    let line: Vec<f64> = (0..4096).map(|i| i as f64 / 4095.0).collect();
    assert!((box_count_dimension(&line, &scales).unwrap() - 1.0).abs() < 0.02);
    assert_eq!(box_count_dimension(&[0.3; 10], &scales).unwrap(), 0.0);
    assert!(box_count_dimension(&[0.0, 1.0], &scales).unwrap().abs() < 1e-12);
}

#[test]
fn single_circle_wolff_ratio() {
    // one delta-neighbourhood of area 2 delta: (2 delta)^(2/3) / delta^(2/3)
    let res = exp_wolff_circles(&ExperimentConfig { n: Some(1), ..cfg(5, 7) }).unwrap();
    for row in &res.rows {
        assert!((row.ratio() / 2f64.powf(2.0 / 3.0) - 1.0).abs() < 0.02, "{}", row.ratio());
    }
    assert!(res.fitted_exponent.abs() < 0.02);
}

#[test]
fn quasi_product_at_full_dimension_matches_wolff() {
    let c = cfg(5, 7);
    let w = exp_wolff_circles(&c).unwrap();
    let q = exp_quasi_product(&c).unwrap();
    assert_eq!(w.rows.len(), q.rows.len());
    for (a, b) in w.rows.iter().zip(&q.rows) {
        assert!((a.measured.powf(1.5) / b.measured - 1.0).abs() < 1e-9);
        // the two normalizations differ by a power of 3/2
        assert!((a.ratio().powf(1.5) / b.ratio() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn wolff_scaling_is_flat() {
    let res = exp_wolff_circles(&cfg(5, 9)).unwrap();
    assert!(res.fitted_exponent.abs() <= 0.15, "{}", res.fitted_exponent);
}

#[test]
fn concentric_stack_breaks_the_bound() {
    let res = exp_wolff_concentric(&cfg(5, 9)).unwrap();
    assert!(res.fitted_exponent < -0.2 && res.fitted_exponent > -0.45, "{}", res.fitted_exponent);
}

#[test]
fn experiments_are_reproducible() {
    let c = ExperimentConfig { seed: 9, alpha: 0.5, zeta: 0.8, ..cfg(5, 7) };
    let run = || {
        let mut buf = Vec::new();
        write_csv(&exp_quasi_product(&c).unwrap(), &c, &mut buf).unwrap();
        buf
    };
    let (a, b) = (run(), run());
    assert_eq!(a, b);
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("# experiment=quasi\n# config="));
    assert!(text.contains("\n# seed=9\n"));
    assert!(text.contains("\ndelta,n,area_e,measured,bound,ratio\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 4);
}

#[test]
fn invalid_parameters_are_rejected() {
    assert!(exp_quasi_product(&ExperimentConfig { alpha: 0.9, zeta: 0.8, ..cfg(5, 6) }).is_err());
    assert!(exp_wolff_circles(&ExperimentConfig { deltas: vec![0.03], ..cfg(5, 6) }).is_err());
    assert!(exp_wolff_circles(&ExperimentConfig { s: 1.0, ..cfg(5, 6) }).is_err());
}

#[test]
fn kaufman_dimensions_stay_in_range() {
    let c = ExperimentConfig { zeta: 0.8, s: 0.5, ..cfg(8, 8) };
    let res = exp_kaufman(&c).unwrap();
    assert_eq!(res.rows.len(), 257);
    for row in &res.rows {
        assert!(row.measured >= 0.0 && row.measured <= 1.0, "{}", row.measured);
        assert!(row.measured <= c.zeta + 0.1, "{}", row.measured);
    }
    assert!(res.get("exceptional_fraction").unwrap() <= 0.05);
}

#[test]
fn kaufman_planar_control() {
    let c = ExperimentConfig { zeta: 0.8, s: 0.5, gamma: GammaChoice::Planar, carrier: Carrier::Segment, ..cfg(8, 8) };
    assert!(exp_kaufman(&c).is_err());
    let res = exp_kaufman(&ExperimentConfig { allow_degenerate: true, ..c }).unwrap();
    assert_eq!(res.get("exceptional_fraction").unwrap(), 1.0);
    assert_eq!(res.fitted_exponent, 1.0);
}

#[test]
fn lens_sweep_on_translates_is_empty() {
    let res = exp_lens_scaling(&ExperimentConfig { n: Some(64), ..cfg(10, 10) }, true).unwrap();
    assert_eq!(res.rows.len(), 3);
    assert!(res.rows.iter().all(|r| r.measured == 0.0));
    assert_eq!(res.fitted_exponent, 0.0);
    assert_eq!(res.get("max_lenses_per_pair"), Some(0.0));
}

#[test]
fn bipartite_counts_are_bounded() {
    let res = exp_bipartite_tangency(&ExperimentConfig { n: Some(32), ..cfg(14, 14) }, 1, 1).unwrap();
    assert_eq!(res.rows.len(), 2);
    for r in &res.rows {
        assert!(r.measured >= 0.0 && r.measured <= r.bound);
    }
    assert!(exp_bipartite_tangency(&cfg(14, 14), 0, 1).is_err());
}
