use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cinematic::experiments::{self, dyadic_range, ExperimentConfig, GammaChoice, SweepResult};
use cinematic::fractal::{validate_delta_set, Carrier};
use cinematic::incidence::{counting_field, RasterSpec};
use cinematic::lenses::{enumerate_lenses, extend_to_pseudocircles, perturb, ROOT_TOL};
use cinematic::rectangles::TANGENCY_LAMBDA;
use cinematic::{io as cio, rng, validation, Interval};

/// Scaling experiments for cinematic curve families.
#[derive(Parser, Debug)]
#[command(name = "cinematic", version = experiments::build_id())]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, env = "CINEMATIC_THREADS", global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug, Clone)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Finest scale, as `2^-k`, `k`, or a decimal power of two.
    #[arg(long, value_parser = parse_delta)]
    delta_min: Option<u32>,
    /// Coarsest scale, same syntax.
    #[arg(long, value_parser = parse_delta)]
    delta_max: Option<u32>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    zeta: f64,
    #[arg(long, default_value_t = 0.5)]
    s: f64,
    /// Family size (or largest size of a size sweep).
    #[arg(long)]
    n: Option<usize>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `helix-circle`, `planar`, or a file of polynomial coefficients.
    #[arg(long, default_value = "helix-circle", value_parser = parse_gamma)]
    gamma: GammaChoice,
    /// Also write the inputs and intermediate objects at the finest scale here.
    #[arg(long)]
    dump: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// L^{3/2} norm of circles with separated radii.
    Wolff {
        #[command(flatten)]
        common: Common,
        /// Use a concentric stack with delta^2-spaced radii instead.
        #[arg(long)]
        concentric: bool,
    },
    /// Quasi-product integral against delta^{2 - alpha/2 - zeta/2} #F.
    Quasi {
        #[command(flatten)]
        common: Common,
    },
    /// Non-overlapping lens counts for growing random families.
    Lens {
        #[command(flatten)]
        common: Common,
        /// Disjoint translates (no lenses at all).
        #[arg(long)]
        translates: bool,
    },
    /// Rich tangency rectangles between two separated families.
    Bipartite {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1)]
        mu: usize,
        #[arg(long, default_value_t = 1)]
        nu: usize,
    },
    /// Box-counting dimension of restricted projections.
    Kaufman {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = CarrierArg::Ball)]
        carrier: CarrierArg,
        /// Run even when gamma fails the escaping check.
        #[arg(long)]
        allow_degenerate: bool,
        /// Planar gamma with points on the z-axis: every direction is exceptional.
        #[arg(long)]
        control: bool,
    },
    /// Read a family, delta-set or quasi-product file and check its defining bounds.
    Check {
        file: PathBuf,
        /// Space curve for projection families with a custom curve.
        #[arg(long, value_parser = parse_gamma)]
        gamma: Option<GammaChoice>,
    },
    /// Run the acceptance suite.
    Validate {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Criteria to run (all when empty).
        ids: Vec<usize>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CarrierArg {
    Ball,
    Segment,
    Curve,
}

impl From<CarrierArg> for Carrier {
    fn from(c: CarrierArg) -> Carrier {
        match c {
            CarrierArg::Ball => Carrier::Ball,
            CarrierArg::Segment => Carrier::Segment,
            CarrierArg::Curve => Carrier::Curve,
        }
    }
}

fn parse_delta(s: &str) -> Result<u32, String> {
    let s = s.trim();
    if let Some(k) = s.strip_prefix("2^-") {
        return k.parse().map_err(|e| format!("bad exponent `{k}`: {e}"));
    }
    if let Ok(k) = s.parse::<u32>() {
        return Ok(k);
    }
    let v: f64 = s.parse().map_err(|e| format!("bad scale `{s}`: {e}"))?;
    cinematic::fractal::dyadic_exponent(v).map_err(|e| e.to_string())
}

fn parse_gamma(s: &str) -> Result<GammaChoice, String> {
    Ok(match s {
        "helix-circle" => GammaChoice::HelixCircle,
        "planar" => GammaChoice::Planar,
        path => GammaChoice::Custom(PathBuf::from(path)),
    })
}

impl Common {
    /// Config with the given default scale range (exponents, coarse to fine).
    fn config(&self, lo: u32, hi: u32) -> Result<ExperimentConfig, String> {
        let (coarse, fine) = match (self.delta_max, self.delta_min) {
            (Some(c), Some(f)) => (c, f),
            (Some(c), None) => (c, hi.max(c)),
            (None, Some(f)) => (lo.min(f), f),
            (None, None) => (lo, hi),
        };
        if coarse > fine {
            return Err(format!("--delta-max 2^-{coarse} is finer than --delta-min 2^-{fine}"));
        }
        Ok(ExperimentConfig {
            seed: self.seed,
            deltas: dyadic_range(coarse, fine),
            n: self.n,
            alpha: self.alpha,
            zeta: self.zeta,
            s: self.s,
            gamma: self.gamma.clone(),
            out: self.out.clone(),
            ..ExperimentConfig::default()
        })
    }
}

fn emit(res: &SweepResult, cfg: &ExperimentConfig) -> cinematic::Result<()> {
    match &cfg.out {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            experiments::write_csv(res, cfg, &mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = io::stdout().lock();
            experiments::write_csv(res, cfg, &mut w)?;
        }
    }
    Ok(())
}

fn create(dir: &Path, name: &str) -> cinematic::Result<BufWriter<File>> {
    std::fs::create_dir_all(dir)?;
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

/// Circle family, counting field and (for `quasi`) the product set at the finest scale.
fn dump_circles(dir: &Path, cfg: &ExperimentConfig, quasi: bool) -> cinematic::Result<()> {
    let delta = cfg.deltas.iter().copied().fold(1.0, f64::min);
    let zeta = if quasi { cfg.zeta } else { 1.0 };
    let (fam, _) = experiments::frostman_circles(delta, zeta, cfg.n, cfg.seed)?;
    create(dir, "family.txt")?.write_all(cio::write_family(&fam)?.as_bytes())?;
    let spec = RasterSpec::new(Interval::unit_centered(), Interval { lo: 1.0, hi: 2.0 }, delta / 4.0)?;
    let mut w = create(dir, "field.pgm")?;
    cio::write_pgm(&counting_field(&fam, delta, &spec)?, &mut w)?;
    w.flush()?;
    if quasi {
        let e = experiments::cantor_quasi_product(delta, cfg.alpha, cfg.seed)?;
        create(dir, "product.txt")?.write_all(cio::write_quasi_product(&e).as_bytes())?;
    }
    Ok(())
}

/// Loops and lenses of one random family of the largest size.
fn dump_lenses(dir: &Path, cfg: &ExperimentConfig, translates: bool) -> cinematic::Result<()> {
    let delta = cfg.deltas.iter().copied().fold(1.0, f64::min);
    let n = cfg.n.unwrap_or(512);
    let fam = if translates { experiments::disjoint_translates(n)? } else { experiments::random_circles(n, cfg.seed)? };
    let p = perturb(&fam, delta, TANGENCY_LAMBDA, rng::derive(cfg.seed, 1))?;
    let loops = extend_to_pseudocircles(&p.family, 1.0);
    let mut w = create(dir, "loops.txt")?;
    cio::write_polylines(&loops, 65, &mut w)?;
    w.flush()?;
    let mut w = create(dir, "lenses.csv")?;
    cio::write_lenses_csv(&enumerate_lenses(&loops, ROOT_TOL)?, &mut w)?;
    w.flush()?;
    Ok(())
}

/// Rich rectangles of one bipartite family of the largest size.
fn dump_bipartite(dir: &Path, cfg: &ExperimentConfig, mu: usize, nu: usize) -> cinematic::Result<()> {
    let delta = cfg.deltas.iter().copied().fold(1.0, f64::min);
    let n = cfg.n.unwrap_or(256);
    let (fam, w, b) = experiments::bipartite_circles(n, n, cfg.seed)?;
    create(dir, "family.txt")?.write_all(cio::write_family(&fam)?.as_bytes())?;
    let rects: Vec<_> = experiments::rich_rectangles(&fam, &w, &b, delta, experiments::BIPARTITE_T, mu, nu)?
        .into_iter()
        .map(|r| r.0)
        .collect();
    let mut out = create(dir, "rects.csv")?;
    cio::write_rects_csv(&rects, &mut out)?;
    out.flush()?;
    Ok(())
}

fn check(file: &Path, gamma: Option<GammaChoice>) -> cinematic::Result<bool> {
    let text = std::fs::read_to_string(file)?;
    let head = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
    if head.starts_with("family") {
        let g = match gamma {
            Some(g) => Some(g.build(Interval::unit_centered())?),
            None => None,
        };
        let fam = cio::read_family(&text, g.as_ref())?;
        let grid = cinematic::interval::default_grid_n(&fam.domain, 1.0 / 1024.0);
        let st = fam.analyze(grid)?;
        println!(
            "{} curves: cinematic defect {:.4} (K = {:.3}), diameter {:.4}, min separation {:.3e}",
            fam.len(),
            st.defect,
            st.cinematic_k,
            st.diameter,
            st.min_separation
        );
        Ok(st.defect > 0.0)
    } else if head.starts_with("set") {
        let e = cio::read_delta_set(&text)?;
        let v = validate_delta_set(&e);
        println!("{} cells at delta {}: worst ratio {:.4} on [{}, {}] (c = {})", e.len(), e.delta, v.ratio, v.worst.lo, v.worst.hi, e.c);
        Ok(v.passed)
    } else if head.starts_with("base") {
        let q = cio::read_quasi_product(&text)?;
        let base = validate_delta_set(&q.a);
        let fibers_ok = q.fibers.values().all(|b| validate_delta_set(b).passed);
        let beta = q.fibers.values().map(|b| b.alpha).fold(0.0, f64::max);
        println!(
            "{} cells, area {:.4e}: base ratio {:.4} (c = {}), fibers {}, worst rectangle ratio {:.4}",
            q.cell_count(),
            q.area(),
            base.ratio,
            q.a.c,
            if fibers_ok { "ok" } else { "violated" },
            q.worst_rectangle_ratio(beta)
        );
        Ok(base.passed && fibers_ok)
    } else {
        Err(cinematic::Error::Parse { line: 1, msg: format!("unrecognised header `{head}`") })
    }
}

fn verdict(ok: bool, what: String) -> bool {
    eprintln!("{} {what}", if ok { "ok:" } else { "threshold missed:" });
    ok
}

fn run(cmd: Cmd) -> Result<bool, String> {
    let err = |e: cinematic::Error| e.to_string();
    match cmd {
        Cmd::Validate { seed, ids } => {
            let ids = if ids.is_empty() { (1..=10).collect() } else { ids };
            let mut all = true;
            for id in ids {
                let r = validation::run(id, seed);
                println!("{r}");
                all &= r.passed;
            }
            Ok(all)
        }
        Cmd::Check { file, gamma } => check(&file, gamma).map_err(err),
        Cmd::Wolff { common, concentric } => {
            let cfg = common.config(5, 10)?;
            if let Some(d) = &common.dump {
                dump_circles(d, &cfg, false).map_err(err)?;
            }
            let res = if concentric { experiments::exp_wolff_concentric(&cfg) } else { experiments::exp_wolff_circles(&cfg) }
                .map_err(err)?;
            emit(&res, &cfg).map_err(err)?;
            let e = res.fitted_exponent;
            Ok(verdict(e.abs() <= 0.15, format!("delta-exponent {e:.4} (|.| <= 0.15)")))
        }
        Cmd::Quasi { common } => {
            let cfg = common.config(5, 10)?;
            if let Some(d) = &common.dump {
                dump_circles(d, &cfg, true).map_err(err)?;
            }
            let res = experiments::exp_quasi_product(&cfg).map_err(err)?;
            emit(&res, &cfg).map_err(err)?;
            let e = res.fitted_exponent;
            Ok(verdict(e.abs() <= 0.2, format!("delta-exponent {e:.4} (|.| <= 0.2)")))
        }
        Cmd::Lens { common, translates } => {
            let cfg = common.config(10, 10)?;
            if let Some(d) = &common.dump {
                dump_lenses(d, &cfg, translates).map_err(err)?;
            }
            let res = experiments::exp_lens_scaling(&cfg, translates).map_err(err)?;
            emit(&res, &cfg).map_err(err)?;
            let e = res.fitted_exponent;
            let per_pair = res.get("max_lenses_per_pair").unwrap_or(f64::INFINITY);
            Ok(verdict(e <= 1.65 && per_pair <= 1.0, format!("n-exponent {e:.4} (<= 1.65), lenses per pair {per_pair} (<= 1)")))
        }
        Cmd::Bipartite { common, mu, nu } => {
            let cfg = common.config(14, 14)?;
            if let Some(d) = &common.dump {
                dump_bipartite(d, &cfg, mu, nu).map_err(err)?;
            }
            let res = experiments::exp_bipartite_tangency(&cfg, mu, nu).map_err(err)?;
            emit(&res, &cfg).map_err(err)?;
            let c = res.get("fitted_constant").unwrap_or(0.0);
            Ok(verdict(true, format!("fitted constant {c:.3e}")))
        }
        Cmd::Kaufman { common, carrier, allow_degenerate, control } => {
            let mut cfg = common.config(10, 10)?;
            if common.dump.is_some() {
                eprintln!("warning: --dump has no effect for kaufman");
            }
            cfg.carrier = carrier.into();
            cfg.allow_degenerate = allow_degenerate;
            if control {
                cfg.gamma = GammaChoice::Planar;
                cfg.carrier = Carrier::Segment;
                cfg.allow_degenerate = true;
            }
            let res = experiments::exp_kaufman(&cfg).map_err(err)?;
            emit(&res, &cfg).map_err(err)?;
            let f = res.get("exceptional_fraction").unwrap_or(1.0);
            if control {
                Ok(verdict(f >= 0.95, format!("exceptional fraction {f:.4} (control, expect 1)")))
            } else {
                Ok(verdict(f <= 0.05, format!("exceptional fraction {f:.4} (<= 0.05)")))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: thread pool: {e}");
        }
    }
    match run(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
