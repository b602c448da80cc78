//! Plain-text formats. Families and sets round-trip exactly (17 significant
//! digits); rasters, rectangles and lenses are export-only.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::curve::{defining_function_by_name, C2Curve, CurveFamily, FamilyKind, Shape};
use crate::error::{Error, Result};
use crate::fractal::{dyadic_exponent, DeltaSet, QuasiProduct};
use crate::incidence::Raster;
use crate::interval::Interval;
use crate::lenses::{Lens, PseudoCircle};
use crate::rectangles::CurvRect;
use crate::space_curve::SpaceCurve;

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn floats(line: usize, s: &str) -> Result<Vec<f64>> {
    s.split_whitespace().map(|w| w.parse::<f64>().map_err(|_| parse_err(line, format!("bad number `{w}`")))).collect()
}

/// Non-empty, non-comment lines with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// `key=value` pairs of a header line.
fn fields(s: &str) -> BTreeMap<&str, &str> {
    s.split_whitespace().filter_map(|w| w.split_once('=')).collect()
}

fn field<T: std::str::FromStr>(f: &BTreeMap<&str, &str>, key: &str, line: usize) -> Result<T> {
    f.get(key).ok_or_else(|| parse_err(line, format!("missing `{key}`")))?.parse().map_err(|_| parse_err(line, format!("bad `{key}`")))
}

/// Header `family kind=<circle|projection:NAME|implicit:NAME> domain=LO,HI`
/// followed by one row per curve: `a b r` for circles (offset folded into
/// `b`), `z1 z2 z3 offset` for projections, `y1 y2 r offset tol` for implicit
/// curves. Custom curves cannot be written.
pub fn write_family(fam: &CurveFamily) -> Result<String> {
    let kind = match &fam.kind {
        FamilyKind::Circle => "circle".to_string(),
        FamilyKind::Projection(g) => format!("projection:{g}"),
        FamilyKind::Implicit(p) => format!("implicit:{p}"),
        FamilyKind::Custom => return Err(Error::BadData("custom families have no text form".into())),
    };
    let mut s = format!("family kind={kind} domain={},{}\n", num(fam.domain.lo), num(fam.domain.hi));
    for c in &fam.curves {
        let o = c.offset();
        let row = match c.shape() {
            Shape::Circle { a, b, r } => format!("{} {} {}", num(*a), num(b + o), num(*r)),
            Shape::Projection { z, .. } => format!("{} {} {} {}", num(z[0]), num(z[1]), num(z[2]), num(o)),
            Shape::Implicit { y, r, tol, .. } => {
                format!("{} {} {} {} {}", num(y[0]), num(y[1]), num(*r), num(o), num(*tol))
            }
            Shape::Custom(_) => return Err(Error::BadData(format!("curve `{}` is custom", c.label()))),
        };
        s.push_str(&row);
        s.push('\n');
    }
    Ok(s)
}

/// Inverse of [`write_family`]. Projection families whose curve is neither
/// `helix-circle` nor `planar` need `gamma`.
pub fn read_family(text: &str, gamma: Option<&SpaceCurve>) -> Result<CurveFamily> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    if !header.starts_with("family") {
        return Err(parse_err(hl, "expected `family` header"));
    }
    let f = fields(header);
    let kind: String = field(&f, "kind", hl)?;
    let dom: String = field(&f, "domain", hl)?;
    let (lo, hi) = dom.split_once(',').ok_or_else(|| parse_err(hl, "domain needs LO,HI"))?;
    let lo: f64 = lo.parse().map_err(|_| parse_err(hl, "bad domain"))?;
    let hi: f64 = hi.parse().map_err(|_| parse_err(hl, "bad domain"))?;
    let domain = Interval::new(lo, hi).map_err(|_| parse_err(hl, "empty domain"))?;
    let mut curves = Vec::new();
    let fam_kind = if kind == "circle" {
        for (ln, l) in lines {
            let v = floats(ln, l)?;
            if v.len() != 3 {
                return Err(parse_err(ln, "circle rows are `a b r`"));
            }
            curves.push(C2Curve::circle(v[0], v[1], v[2], domain)?);
        }
        FamilyKind::Circle
    } else if let Some(name) = kind.strip_prefix("projection:") {
        let g = match (name, gamma) {
            (_, Some(g)) => g.with_domain(domain),
            ("helix-circle", None) => SpaceCurve::helix_circle(domain),
            ("planar", None) => SpaceCurve::planar(domain),
            _ => return Err(parse_err(hl, format!("space curve `{name}` must be supplied"))),
        };
        for (ln, l) in lines {
            let v = floats(ln, l)?;
            if v.len() != 4 {
                return Err(parse_err(ln, "projection rows are `z1 z2 z3 offset`"));
            }
            curves.push(C2Curve::projection(&g, [v[0], v[1], v[2]]).shifted(v[3]));
        }
        FamilyKind::Projection(g.name().to_string())
    } else if let Some(name) = kind.strip_prefix("implicit:") {
        let phi = defining_function_by_name(name).ok_or_else(|| parse_err(hl, format!("unknown defining function `{name}`")))?;
        for (ln, l) in lines {
            let v = floats(ln, l)?;
            if v.len() != 5 {
                return Err(parse_err(ln, "implicit rows are `y1 y2 r offset tol`"));
            }
            curves.push(C2Curve::implicit(phi.clone(), [v[0], v[1]], v[2], domain, v[4])?.shifted(v[3]));
        }
        FamilyKind::Implicit(name.to_string())
    } else {
        return Err(parse_err(hl, format!("unknown family kind `{kind}`")));
    };
    CurveFamily::new(curves, fam_kind)
}

fn write_ranges(s: &mut String, cells: &[u64]) {
    let mut i = 0;
    while i < cells.len() {
        let mut j = i;
        while j + 1 < cells.len() && cells[j + 1] == cells[j] + 1 {
            j += 1;
        }
        if i == j {
            let _ = writeln!(s, "{}", cells[i]);
        } else {
            let _ = writeln!(s, "{}-{}", cells[i], cells[j]);
        }
        i = j + 1;
    }
}

fn parse_range(ln: usize, l: &str, out: &mut Vec<u64>) -> Result<()> {
    let bad = || parse_err(ln, format!("bad cell range `{l}`"));
    match l.split_once('-') {
        Some((a, b)) => {
            let (a, b): (u64, u64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
            if b < a {
                return Err(bad());
            }
            out.extend(a..=b);
        }
        None => out.push(l.parse().map_err(|_| bad())?),
    }
    Ok(())
}

fn set_header(tag: &str, e: &DeltaSet) -> String {
    format!("{tag} delta=2^-{} alpha={} c={}\n", e.k, e.alpha, e.c)
}

fn parse_delta(ln: usize, f: &BTreeMap<&str, &str>) -> Result<f64> {
    let d = f.get("delta").ok_or_else(|| parse_err(ln, "missing `delta`"))?;
    let k: i32 = d.strip_prefix("2^-").and_then(|k| k.parse().ok()).ok_or_else(|| parse_err(ln, "delta must read 2^-k"))?;
    let delta = (2f64).powi(-k);
    dyadic_exponent(delta)?;
    Ok(delta)
}

/// `set delta=2^-k alpha=A c=C` then one cell or `lo-hi` run per line.
pub fn write_delta_set(e: &DeltaSet) -> String {
    let mut s = set_header("set", e);
    write_ranges(&mut s, &e.cells);
    s
}

pub fn read_delta_set(text: &str) -> Result<DeltaSet> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    if !header.starts_with("set") {
        return Err(parse_err(hl, "expected `set` header"));
    }
    let f = fields(header);
    let delta = parse_delta(hl, &f)?;
    let mut cells = Vec::new();
    for (ln, l) in lines {
        parse_range(ln, l, &mut cells)?;
    }
    DeltaSet::new(delta, cells, field(&f, "alpha", hl)?, field(&f, "c", hl)?)
}

/// A `base` block for `A`, then one `fiber a ...` block per base cell.
pub fn write_quasi_product(e: &QuasiProduct) -> String {
    let mut s = set_header("base", &e.a);
    write_ranges(&mut s, &e.a.cells);
    for (a, b) in &e.fibers {
        s.push_str(&set_header(&format!("fiber {a}"), b));
        write_ranges(&mut s, &b.cells);
    }
    s
}

pub fn read_quasi_product(text: &str) -> Result<QuasiProduct> {
    // (key, header fields, line, cells)
    let mut blocks: Vec<(Option<u64>, f64, f64, f64, Vec<u64>)> = Vec::new();
    for (ln, l) in content_lines(text) {
        if l.starts_with("base") || l.starts_with("fiber") {
            let f = fields(l);
            let key = if l.starts_with("fiber") {
                let id = l.split_whitespace().nth(1).and_then(|w| w.parse().ok());
                Some(id.ok_or_else(|| parse_err(ln, "fiber needs a base cell"))?)
            } else {
                None
            };
            blocks.push((key, parse_delta(ln, &f)?, field(&f, "alpha", ln)?, field(&f, "c", ln)?, Vec::new()));
        } else {
            let b = blocks.last_mut().ok_or_else(|| parse_err(ln, "cells before any header"))?;
            parse_range(ln, l, &mut b.4)?;
        }
    }
    let mut it = blocks.into_iter();
    let (key, delta, alpha, c, cells) = it.next().ok_or_else(|| parse_err(1, "empty input"))?;
    if key.is_some() {
        return Err(parse_err(1, "the base block comes first"));
    }
    let a = DeltaSet::new(delta, cells, alpha, c)?;
    let mut fibers = BTreeMap::new();
    for (key, d, al, c, cells) in it {
        let key = key.ok_or_else(|| parse_err(0, "second base block"))?;
        if d != delta {
            return Err(Error::FiberMismatch { base: delta, fiber: d });
        }
        if !a.contains_cell(key) {
            return Err(Error::BadData(format!("fiber over cell {key} outside the base")));
        }
        fibers.insert(key, DeltaSet::new(d, cells, al, c)?);
    }
    if fibers.len() != a.len() {
        return Err(Error::BadData(format!("{} fibers for {} base cells", fibers.len(), a.len())));
    }
    Ok(QuasiProduct { a, fibers })
}

/// Space curve from a file of three lines `x: c0 c1 ...`, `y: ...`, `z: ...`
/// holding polynomial coefficients in increasing degree; normalized on load.
pub fn read_space_curve(path: &Path, domain: Interval) -> Result<SpaceCurve> {
    let text = std::fs::read_to_string(path)?;
    let mut coeffs: [Option<Vec<f64>>; 3] = [None, None, None];
    for (ln, l) in content_lines(&text) {
        let (axis, rest) = l.split_once(':').ok_or_else(|| parse_err(ln, "expected `x:`, `y:` or `z:`"))?;
        let k = match axis.trim() {
            "x" => 0,
            "y" => 1,
            "z" => 2,
            a => return Err(parse_err(ln, format!("unknown axis `{a}`"))),
        };
        coeffs[k] = Some(floats(ln, rest)?);
    }
    let [Some(x), Some(y), Some(z)] = coeffs else {
        return Err(parse_err(0, "need x, y and z components"));
    };
    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("custom");
    Ok(SpaceCurve::from_polynomials(name, domain, [x, y, z]))
}

/// Plain PGM (`P2`), top row = largest `y`. Counts saturate at 65535.
pub fn write_pgm(r: &Raster, w: &mut impl Write) -> Result<()> {
    let maxval = r.max().clamp(1, 65535);
    writeln!(w, "P2\n{} {}\n{}", r.nx, r.ny, maxval)?;
    for j in (0..r.ny).rev() {
        let row: Vec<String> = (0..r.nx).map(|i| r.get(i, j).min(65535).to_string()).collect();
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn write_rects_csv(rects: &[CurvRect], w: &mut impl Write) -> Result<()> {
    writeln!(w, "anchor,lo,hi,delta,t")?;
    for r in rects {
        writeln!(w, "{},{},{},{},{}", r.anchor, r.interval.lo, r.interval.hi, r.delta, r.t)?;
    }
    Ok(())
}

pub fn write_lenses_csv(lenses: &[Lens], w: &mut impl Write) -> Result<()> {
    writeln!(w, "curve_a,curve_b,theta1,theta2")?;
    for l in lenses {
        writeln!(w, "{},{},{},{}", l.pair.0, l.pair.1, l.roots.0, l.roots.1)?;
    }
    Ok(())
}

/// Closed polylines of the pseudo-circles, blank-line separated, for plotting.
pub fn write_polylines(loops: &[PseudoCircle], samples: usize, w: &mut impl Write) -> Result<()> {
    for p in loops {
        writeln!(w, "# loop {}", p.source)?;
        for [x, y] in p.polyline(samples) {
            writeln!(w, "{x} {y}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::circle_family;

    #[test]
    fn circle_family_round_trip() {
        let fam = circle_family(&[[0.01, -0.02], [0.0, 0.05]], &[1.25, 1.0 / 3.0 + 1.0], Interval::unit_centered()).unwrap();
        let fam = CurveFamily { curves: vec![fam.curves[0].shifted(0.125), fam.curves[1].clone()], ..fam };
        let back = read_family(&write_family(&fam).unwrap(), None).unwrap();
        for t in [-0.5, 0.1, 0.5] {
            for (a, b) in fam.curves.iter().zip(&back.curves) {
                assert_eq!(a.value(t), b.value(t));
            }
        }
    }

    #[test]
    fn delta_set_ranges() {
        let e = DeltaSet::new(1.0 / 16.0, vec![0, 1, 2, 5, 9, 10], 0.5, 4.0).unwrap();
        let text = write_delta_set(&e);
        assert_eq!(text, "set delta=2^-4 alpha=0.5 c=4\n0-2\n5\n9-10\n");
        assert_eq!(read_delta_set(&text).unwrap(), e);
    }
}
