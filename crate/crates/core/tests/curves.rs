use cinematic::curve::{
    c2_distance, cinematic_defect, circle_family, tangency_param, C2Curve, CurveFamily, FamilyKind, Jet,
};
use cinematic::space_curve::{escaping_check, SpaceCurve};
use cinematic::{rng, Interval};

const GRID: usize = 1001;

fn j() -> Interval {
    Interval::unit_centered()
}

fn line(c: f64, s: f64) -> C2Curve {
    C2Curve::custom("line", j(), move |t| Jet::new(c + s * t, s, 0.0))
}

#[test]
fn c2_distance_of_vertical_shift_is_the_shift() {
    let f = C2Curve::circle(0.02, -0.01, 1.3, j()).unwrap();
    let d = c2_distance(&f, &f.shifted(0.125), GRID).unwrap();
    assert!((d - 0.125).abs() < 1e-15);
}

#[test]
fn c2_distance_of_lines() {
    // |(1 + t) - 0| + |1 - 0| peaks at t = 1/2
    let d = c2_distance(&line(0.0, 0.0), &line(1.0, 1.0), GRID).unwrap();
    assert!((d - 2.5).abs() < 1e-12);
}

#[test]
fn circle_jets_match_closed_form() {
    let c = C2Curve::circle(0.0, 0.0, 2.0, j()).unwrap();
    let apex = c.jet(0.0);
    assert!((apex.v - 2.0).abs() < 1e-15 && apex.d1.abs() < 1e-15);
    assert!((apex.d2 + 0.5).abs() < 1e-15);
    // f(t) = sqrt(4 - t^2): f'(0.3) = -0.3 / sqrt(3.91)
    let x = c.jet(0.3);
    assert!((x.d1 + 0.3 / 3.91f64.sqrt()).abs() < 1e-14);
    assert!((x.d2 + 4.0 / 3.91f64.powf(1.5)).abs() < 1e-14);
}

#[test]
fn tangency_of_parallel_lines_is_their_gap() {
    let d = tangency_param(&line(0.0, 0.3), &line(0.07, 0.3), GRID).unwrap();
    assert!((d - 0.07).abs() < 1e-15);
}

#[test]
fn tangency_vanishes_at_a_double_root() {
    let p = C2Curve::custom("parabola", j(), |t| Jet::new(t * t, 2.0 * t, 2.0));
    assert!(tangency_param(&p, &line(0.0, 0.0), GRID).unwrap() < 1e-15);
    // the double root at 0.4 lies outside J/2
    let q = C2Curve::custom("shifted parabola", j(), |t| Jet::new((t - 0.4).powi(2), 2.0 * (t - 0.4), 2.0));
    let d = tangency_param(&q, &line(0.0, 0.0), GRID).unwrap();
    let at_edge = 0.15f64.powi(2) + 2.0 * 0.15;
    assert!((d - at_edge).abs() < 1e-12, "{d}");
}

#[test]
fn tangency_parameter_breaks_the_triangle_inequality() {
    // g rises from 0 to 1 with horizontal tangents at -0.2 and 0.2, both in J/2
    let g = C2Curve::custom("step", j(), |t| {
        let u = (t + 0.2) / 0.4;
        Jet::new(3.0 * u * u - 2.0 * u.powi(3), (6.0 * u - 6.0 * u * u) / 0.4, (6.0 - 12.0 * u) / 0.16)
    });
    let (f, h) = (line(0.0, 0.0), line(1.0, 0.0));
    let fh = tangency_param(&f, &h, GRID).unwrap();
    let fg = tangency_param(&f, &g, GRID).unwrap();
    let gh = tangency_param(&g, &h, GRID).unwrap();
    assert!((fh - 1.0).abs() < 1e-15);
    assert!(fg + gh < 1e-12, "{fg} {gh}");
}

#[test]
fn defect_of_a_line_family() {
    // pairs: (0, t) gives 1 / 1.5, (0, 2) gives 1, (t, 2) gives 2.5 / 3.5
    let fam = CurveFamily::new(vec![line(0.0, 0.0), line(0.0, 1.0), line(2.0, 0.0)], FamilyKind::Custom).unwrap();
    let d = cinematic_defect(&fam, GRID).unwrap();
    assert!((d - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn defect_of_concentric_circles() {
    // h = r2 - r1 in value, derivative and curvature terms all scale with the gap
    let fam = circle_family(&[[0.0, 0.0], [0.0, 0.0]], &[1.5, 1.6], j()).unwrap();
    let d = cinematic_defect(&fam, GRID).unwrap();
    assert!(d > 0.5 && d < 1.0, "{d}");
}

#[test]
fn duplicate_curves_are_rejected() {
    let fam = CurveFamily::new(vec![line(0.1, 0.0), line(0.1, 0.0)], FamilyKind::Custom).unwrap();
    assert!(fam.analyze(GRID).is_err());
}

#[test]
fn projection_distance_is_comparable_to_euclidean() {
    let gamma = SpaceCurve::helix_circle(j());
    let mut r = rng::seeded(7);
    for _ in 0..200 {
        let a = rng::in_ball3(&mut r, 1.0);
        let b = rng::in_ball3(&mut r, 1.0);
        let e = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
        let d = c2_distance(&C2Curve::projection(&gamma, a), &C2Curve::projection(&gamma, b), 513).unwrap();
        // unit vectors gamma, gamma', gamma'' give d <= 3 |a - b|; the lower end was measured at 0.71
        assert!(d <= 3.0 * e * (1.0 + 1e-12) && d >= 0.5 * e, "ratio {}", d / e);
    }
}

#[test]
fn mismatched_domains_are_an_error() {
    let f = C2Curve::circle(0.0, 0.0, 1.5, j()).unwrap();
    let g = C2Curve::circle(0.0, 0.0, 1.5, Interval::new(-0.25, 0.25).unwrap()).unwrap();
    assert!(c2_distance(&f, &g, GRID).is_err());
}

#[test]
fn escaping_determinant() {
    let helix = escaping_check(&SpaceCurve::helix_circle(j()), 513);
    assert!((helix - 2f64.powf(-1.5)).abs() < 1e-12, "{helix}");
    assert_eq!(escaping_check(&SpaceCurve::planar(j()), 513), 0.0);
    // (1, t, t^3) has det proportional to t
    let cubic = SpaceCurve::from_polynomials("cubic", j(), [vec![1.0], vec![0.0, 1.0], vec![0.0, 0.0, 0.0, 1.0]]);
    assert!(escaping_check(&cubic, 513) < 1e-12);
    assert!(escaping_check(&cubic, 512) < 1e-2);
}
