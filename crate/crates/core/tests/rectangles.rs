use cinematic::curve::{C2Curve, CurveFamily, FamilyKind, Jet};
use cinematic::rectangles::{
    comparable, dilate, greedy_incomparable, harvest_tangency_rects, is_tangent, make_rect, multiplicity, CurvRect,
    HarvestConfig, TANGENCY_LAMBDA,
};
use cinematic::Interval;

fn j() -> Interval {
    Interval::unit_centered()
}

fn parabola(a: f64) -> C2Curve {
    C2Curve::custom("parabola", j(), move |t| Jet::new(a * t * t, 2.0 * a * t, 2.0 * a))
}

fn line(c: f64, s: f64) -> C2Curve {
    C2Curve::custom("line", j(), move |t| Jet::new(c + s * t, s, 0.0))
}

/// `k eps theta^2` for `k = 1..=4`: a pencil of curves tangent at the origin
/// whose pairwise C^2 distances `3.25 eps |k - l|` lie in `[1.01 t, 3.03 t]`.
fn pencil(t: f64) -> CurveFamily {
    let eps = 1.01 * t / 3.25;
    CurveFamily::new((1..=4).map(|k| parabola(k as f64 * eps)).collect(), FamilyKind::Custom).unwrap()
}

#[test]
fn pencil_collapses_to_one_rich_rectangle() {
    let (delta, t) = ((2f64).powi(-14), 0.1);
    let fam = pencil(t);
    let rects = harvest_tangency_rects(&fam, delta, t, &HarvestConfig::default()).unwrap();
    assert_eq!(rects.len(), 1);
    let r = rects[0].rect;
    assert!(r.interval.contains(0.0));
    let all: Vec<usize> = (0..fam.len()).collect();
    assert_eq!(multiplicity(&r, &fam.curves, &all, TANGENCY_LAMBDA), 4);
}

#[test]
fn far_pairs_are_not_harvested() {
    // separation 60 t, outside the [t, 6 t] window
    let (delta, t) = ((2f64).powi(-14), 0.01);
    let fam = CurveFamily::new(vec![parabola(0.0), parabola(0.2 / 3.25 * 3.0)], FamilyKind::Custom).unwrap();
    assert!(harvest_tangency_rects(&fam, delta, t, &HarvestConfig::default()).unwrap().is_empty());
}

#[test]
fn tangency_uses_the_lambda_neighbourhood() {
    let (delta, t) = (1.0 / 4096.0, 0.25);
    let curves = [line(0.0, 0.0), line(3.9 * delta, 0.0), line(4.1 * delta, 0.0)];
    let r = make_rect(&curves[0], 0, 0.0, delta, t).unwrap();
    assert!(is_tangent(&r, &curves[0], &curves[1], 5.0));
    assert!(!is_tangent(&r, &curves[0], &curves[2], 5.0));
}

#[test]
fn comparability_needs_a_common_enclosing_rectangle() {
    let (delta, t) = (1.0 / 4096.0, 0.25);
    let curves = vec![line(0.0, 0.0), line(2.0 * delta, 0.0), line(50.0 * delta, 0.0)];
    let len = CurvRect::length(delta, t);
    let r = make_rect(&curves[0], 0, 0.0, delta, t).unwrap();
    let near = make_rect(&curves[1], 1, 0.5 * len, delta, t).unwrap();
    let high = make_rect(&curves[2], 2, 0.0, delta, t).unwrap();
    let far = make_rect(&curves[1], 1, 3.0 * len, delta, t).unwrap();
    assert!(comparable(&r, &near, &curves, 5.0).unwrap());
    assert!(comparable(&near, &r, &curves, 5.0).unwrap());
    assert!(!comparable(&r, &high, &curves, 5.0).unwrap());
    assert!(comparable(&r, &high, &curves, 100.0).unwrap());
    // hull of length 3.5 len exceeds sqrt(5) len
    assert!(!comparable(&r, &far, &curves, 5.0).unwrap());
    let other_t = CurvRect { t: 0.5, ..r };
    assert!(comparable(&r, &other_t, &curves, 5.0).is_err());
}

#[test]
fn dilation_contains_the_original() {
    let (delta, t) = (1.0 / 4096.0, 0.25);
    let curves = vec![line(0.0, 0.1), line(delta, 0.1)];
    let r = make_rect(&curves[0], 0, 0.1, delta, t).unwrap();
    let d = dilate(&r, 3.0, &j()).unwrap();
    assert!(d.contains(&r, &curves));
    let s = make_rect(&curves[1], 1, 0.1, delta, t).unwrap();
    assert!(d.contains(&s, &curves));
    // gap delta plus thickness delta exceeds 1.5 delta
    assert!(!dilate(&r, 1.5, &j()).unwrap().contains(&s, &curves));
    assert!(dilate(&r, 0.5, &j()).is_err());
}

#[test]
fn dilation_is_clipped_to_the_domain() {
    let (delta, t) = (1.0 / 16.0, 0.25);
    let f = line(0.0, 0.0);
    let r = make_rect(&f, 0, 0.0, delta, t).unwrap();
    let d = dilate(&r, 4.0, &j()).unwrap();
    assert_eq!(d.interval, j());
}

#[test]
fn greedy_keeps_one_of_each_comparable_group() {
    let (delta, t) = (1.0 / 4096.0, 0.25);
    let len = CurvRect::length(delta, t);
    let curves = vec![line(0.0, 0.0)];
    let rects: Vec<CurvRect> =
        [0.0, 0.2 * len, 10.0 * len, 10.3 * len].iter().map(|&x| make_rect(&curves[0], 0, x, delta, t).unwrap()).collect();
    let keep = greedy_incomparable(&rects, &curves, 2.0, None).unwrap();
    assert_eq!(keep, vec![0, 2]);
    let weighted = greedy_incomparable(&rects, &curves, 2.0, Some(&[0.0, 1.0, 0.0, 1.0])).unwrap();
    assert_eq!(weighted, vec![1, 3]);
}
