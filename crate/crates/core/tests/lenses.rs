use cinematic::curve::{C2Curve, CurveFamily, FamilyKind, Jet};
use cinematic::experiments::{count_lenses, disjoint_translates, random_circles};
use cinematic::lenses::{
    certify_proper, enumerate_lenses, extend_to_pseudocircles, loop_intersections, max_nonoverlapping, overlap, perturb,
    Lens, Strategy, ROOT_TOL,
};
use cinematic::{rng, Interval};
use rand::Rng;

fn j() -> Interval {
    Interval::unit_centered()
}

fn constant(c: f64) -> C2Curve {
    C2Curve::custom("const", j(), move |_| Jet::new(c, 0.0, 0.0))
}

fn pair(a: C2Curve, b: C2Curve) -> CurveFamily {
    CurveFamily::new(vec![a, b], FamilyKind::Custom).unwrap()
}

#[test]
fn crossing_pair_bounds_one_lens() {
    let fam = pair(C2Curve::circle(0.0, 0.0, 1.5, j()).unwrap(), constant(1.45));
    let loops = extend_to_pseudocircles(&fam, 1.0);
    let lenses = enumerate_lenses(&loops, ROOT_TOL).unwrap();
    assert_eq!(lenses.len(), 1);
    let x = (2.25f64 - 1.45 * 1.45).sqrt();
    assert!((lenses[0].roots.0 + x).abs() < 1e-12 && (lenses[0].roots.1 - x).abs() < 1e-12);
    assert_eq!(loop_intersections(&loops[0], &loops[1], ROOT_TOL).unwrap(), 2);
}

#[test]
fn loops_of_a_random_family_meet_at_most_twice() {
    let fam = perturb(&random_circles(24, 3).unwrap(), 1.0 / 1024.0, 5.0, 1).unwrap().family;
    let loops = extend_to_pseudocircles(&fam, 1.0);
    for a in 0..loops.len() {
        for b in a + 1..loops.len() {
            let k = loop_intersections(&loops[a], &loops[b], ROOT_TOL).unwrap();
            assert!(k == 0 || k == 2, "loops {a} and {b} meet {k} times");
        }
    }
}

#[test]
fn tangency_is_improper_until_perturbed() {
    let fam = pair(C2Curve::circle(0.0, 0.0, 1.5, j()).unwrap(), constant(1.5));
    let rep = certify_proper(&fam, ROOT_TOL);
    assert_eq!(rep.improper, vec![(0, 1)]);
    let delta = 1.0 / 1024.0;
    let p = perturb(&fam, delta, 5.0, 7).unwrap();
    assert!(certify_proper(&p.family, ROOT_TOL).is_clean());
    // the circle touches the constant from below and is pushed up through it
    assert_eq!(p.eta, vec![1, 0]);
    assert!(p.jitter.iter().all(|j| j.abs() <= 1e-6 * delta));
    let lenses = enumerate_lenses(&extend_to_pseudocircles(&p.family, 1.0), ROOT_TOL).unwrap();
    assert_eq!(lenses.len(), 1);
}

#[test]
fn translates_have_no_lenses() {
    let c = count_lenses(&disjoint_translates(32).unwrap(), 1.0 / 1024.0, 1).unwrap();
    assert_eq!((c.lenses, c.nonoverlapping, c.max_per_pair), (0, 0, 0));
}

#[test]
fn at_most_one_lens_per_pair() {
    let c = count_lenses(&random_circles(48, 5).unwrap(), 1.0 / 1024.0, 2).unwrap();
    assert!(c.lenses > 0);
    assert_eq!(c.max_per_pair, 1);
    assert!(c.nonoverlapping <= c.lenses);
}

fn random_lenses(seed: u64, n: usize) -> Vec<Lens> {
    let mut r = rng::seeded(seed);
    (0..n)
        .map(|_| {
            let a = r.gen_range(0..5usize);
            let b = (a + r.gen_range(1..5usize)) % 5;
            let lo = r.gen_range(-0.5..0.3);
            Lens { pair: (a.min(b), a.max(b)), roots: (lo, lo + r.gen_range(0.02..0.2)) }
        })
        .collect()
}

#[test]
fn greedy_is_within_half_of_optimal() {
    for seed in 0..50 {
        let ls = random_lenses(seed, 10);
        let g = max_nonoverlapping(&ls, Strategy::GreedyBySpan).unwrap();
        let e = max_nonoverlapping(&ls, Strategy::Exhaustive).unwrap();
        assert!(e.len() >= g.len() && 2 * g.len() >= e.len(), "seed {seed}: greedy {} optimal {}", g.len(), e.len());
        for picked in [&g, &e] {
            for (x, &i) in picked.iter().enumerate() {
                for &k in &picked[x + 1..] {
                    assert!(!overlap(&ls[i], &ls[k]));
                }
            }
        }
    }
}

#[test]
fn exhaustive_search_is_capped() {
    assert!(max_nonoverlapping(&random_lenses(1, 21), Strategy::Exhaustive).is_err());
}
