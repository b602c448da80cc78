use std::sync::Arc;

use cinematic::curve::{circle_family, family_from_defining_function, projection_family, CircleDefining};
use cinematic::error::Error;
use cinematic::experiments::cantor_quasi_product;
use cinematic::fractal::cantor_delta_set;
use cinematic::incidence::{counting_field, RasterSpec};
use cinematic::io::{
    read_delta_set, read_family, read_quasi_product, read_space_curve, write_delta_set, write_family, write_lenses_csv,
    write_pgm, write_quasi_product, write_rects_csv,
};
use cinematic::lenses::Lens;
use cinematic::rectangles::CurvRect;
use cinematic::space_curve::SpaceCurve;
use cinematic::Interval;

fn same_values(a: &cinematic::curve::CurveFamily, b: &cinematic::curve::CurveFamily) {
    assert_eq!(a.len(), b.len());
    for (f, g) in a.curves.iter().zip(&b.curves) {
        for t in a.domain.grid(17) {
            let (x, y) = (f.jet(t), g.jet(t));
            assert!((x.v - y.v).abs() < 1e-14 && (x.d1 - y.d1).abs() < 1e-13 && (x.d2 - y.d2).abs() < 1e-12);
        }
    }
}

#[test]
fn projection_family_round_trip() {
    let gamma = SpaceCurve::helix_circle(Interval::unit_centered());
    let fam = projection_family(&gamma, &[[0.1, -0.2, 0.3], [0.0, 0.4, -0.1]]).unwrap();
    let mut fam2 = fam.clone();
    fam2.curves[1] = fam2.curves[1].shifted(0.01);
    let text = write_family(&fam2).unwrap();
    assert!(text.starts_with("family kind=projection:"));
    let back = read_family(&text, Some(&gamma)).unwrap();
    same_values(&fam2, &back);
    // built-in curves resolve by name; others must be supplied
    same_values(&fam2, &read_family(&text, None).unwrap());
    let renamed = text.replacen(&format!("projection:{}", gamma.name()), "projection:mine", 1);
    assert!(read_family(&renamed, None).is_err());
    same_values(&fam2, &read_family(&renamed, Some(&gamma)).unwrap());
}

#[test]
fn implicit_family_round_trip() {
    let (fam, _) = family_from_defining_function(
        Arc::new(CircleDefining),
        &[[0.01, -0.02], [0.0, 0.05]],
        &[0.02, -0.03],
        Interval::unit_centered(),
        1e-13,
    )
    .unwrap();
    let back = read_family(&write_family(&fam).unwrap(), None).unwrap();
    same_values(&fam, &back);
}

#[test]
fn circle_rows_fold_offsets() {
    let fam = circle_family(&[[0.0, 0.0]], &[1.5], Interval::unit_centered()).unwrap();
    let mut moved = fam.clone();
    moved.curves[0] = moved.curves[0].shifted(0.25);
    let back = read_family(&write_family(&moved).unwrap(), None).unwrap();
    assert!((back.curves[0].value(0.0) - 1.75).abs() < 1e-15);
}

#[test]
fn family_parse_errors_carry_line_numbers() {
    let text = "family kind=circle domain=-0.5,0.5\n0 0 1.5\n0 0 abc\n";
    match read_family(text, None) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn delta_set_round_trip() {
    let e = cantor_delta_set(1.0 / 1024.0, 0.6, 8).unwrap();
    assert_eq!(read_delta_set(&write_delta_set(&e)).unwrap(), e);
}

#[test]
fn quasi_product_round_trip() {
    let q = cantor_quasi_product(1.0 / 256.0, 0.5, 3).unwrap();
    let text = write_quasi_product(&q);
    assert_eq!(read_quasi_product(&text).unwrap(), q);
    // drop the last fiber block
    let cut = text.rfind("fiber").unwrap();
    assert!(read_quasi_product(&text[..cut]).is_err());
}

#[test]
fn space_curve_from_file() {
    let path = std::env::temp_dir().join(format!("cinematic-gamma-{}.txt", std::process::id()));
    // (1, t, 1 - t^2 / 2), normalized on load
    std::fs::write(&path, "# gamma\nx: 1\ny: 0 1\nz: 1 0 -0.5\n").unwrap();
    let g = read_space_curve(&path, Interval::unit_centered()).unwrap();
    std::fs::remove_file(&path).ok();
    let [p, _, _] = g.eval(0.0);
    assert!((p[0] - 0.5f64.sqrt()).abs() < 1e-14 && p[1].abs() < 1e-14 && (p[2] - 0.5f64.sqrt()).abs() < 1e-14);
    assert!(read_space_curve(std::path::Path::new("/nonexistent/gamma.txt"), Interval::unit_centered()).is_err());
}

#[test]
fn pgm_header_and_rows() {
    let delta = 1.0 / 16.0;
    let fam = circle_family(&[[0.0, 0.0]], &[1.5], Interval::unit_centered()).unwrap();
    let spec = RasterSpec::new(Interval::unit_centered(), Interval::new(1.0, 2.0).unwrap(), delta / 4.0).unwrap();
    let field = counting_field(&fam, delta, &spec).unwrap();
    let mut buf = Vec::new();
    write_pgm(&field, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(&lines[..3], &["P2", "64 64", "1"]);
    assert_eq!(lines.len(), 3 + 64);
    assert!(lines[3..].iter().all(|l| l.split(' ').count() == 64));
}

#[test]
fn csv_exports() {
    let mut buf = Vec::new();
    let r = CurvRect { anchor: 3, interval: Interval { lo: 0.0, hi: 0.125 }, delta: 0.25, t: 16.0 };
    write_rects_csv(&[r], &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "anchor,lo,hi,delta,t\n3,0,0.125,0.25,16\n");
    let mut buf = Vec::new();
    write_lenses_csv(&[Lens { pair: (1, 4), roots: (-0.25, 0.5) }], &mut buf).unwrap();
    assert_eq!(String::from_utf8(buf).unwrap(), "curve_a,curve_b,theta1,theta2\n1,4,-0.25,0.5\n");
}
