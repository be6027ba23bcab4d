use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use twinbeam_core::criteria::{CriterionId, Family, Mode};
use twinbeam_core::moments::{Engine, DEFAULT_MAX_ORDER, DEFAULT_TAIL_TOL};
use twinbeam_core::quantifiers::ZERO_TOL;
use twinbeam_core::roots;
use twinbeam_core::state::covariance_n;
use twinbeam_core::{Complex64, KMatrix, Statistics};
use twinbeam_cli::config::ScanConfig;
use twinbeam_cli::error::{CliError, EXIT_OK, EXIT_USAGE};
use twinbeam_cli::params::{check_value, AxisName, NoiseMode, PointParams};
use twinbeam_cli::scan::{run_scan, Axis};
use twinbeam_cli::{output, selftest, Target};

#[derive(Parser)]
#[command(name = "twinbeam", version, about = "Non-classicality criteria and phase diagrams of noisy twin beams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Gaussian parameters and covariance matrices of a state.
    State(PointArgs),
    /// Evaluate one criterion or quantifier.
    Crit {
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        point: PointArgs,
        /// Largest derivative order the engine may use.
        #[arg(long, default_value_t = DEFAULT_MAX_ORDER)]
        max_order: usize,
    },
    /// Dump the joint photon-number distribution as CSV.
    Pnd {
        #[command(flatten)]
        point: PointArgs,
        /// Truncation in each mode; chosen adaptively from --tail-tol if absent.
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TAIL_TOL)]
        tail_tol: f64,
    },
    /// Scan a 1-3 dimensional parameter grid and extract boundaries.
    Scan(ScanArgs),
    /// Locate sign changes of one criterion along one axis by bisection.
    Boundary(BoundaryArgs),
    /// Run the built-in equivalence checks.
    Selftest,
}

#[derive(Args, Clone, Copy)]
struct PointArgs {
    /// Mean number of photon pairs.
    #[arg(long, default_value_t = 1.0)]
    bp: f64,
    /// Mean noise photons in the signal mode.
    #[arg(long, default_value_t = 0.0)]
    bs: f64,
    /// Mean noise photons in the idler mode.
    #[arg(long, default_value_t = 0.0)]
    bi: f64,
    /// Beam-splitter transmissivity (1 = no splitter).
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Beam-splitter phase.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
    /// Detection efficiency of both modes.
    #[arg(long, default_value_t = 1.0)]
    eta: f64,
}

impl PointArgs {
    fn params(&self) -> Result<PointParams, CliError> {
        let p = PointParams {
            bp: self.bp,
            bs: self.bs,
            bi: self.bi,
            t: self.t,
            phi: self.phi,
            eta: self.eta,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Args, Clone)]
struct TargetArgs {
    /// Criterion family: E_W, E_p, M_W, M_p, R_W or R_p.
    #[arg(long, conflicts_with = "target")]
    family: Option<String>,
    /// First index (k for the R families).
    #[arg(long, default_value_t = 0)]
    k1: usize,
    /// Second index (l for the R families).
    #[arg(long, default_value_t = 0)]
    k2: usize,
    /// Mode of the local R criteria.
    #[arg(long, default_value_t = 1)]
    mode: u8,
    /// A full target name instead: `E_p(0,2)`, `R_p1(2,2)`, `negativity`,
    /// `log_negativity`, `I_ncl1`, `I_ncl2`.
    #[arg(long)]
    target: Option<String>,
}

impl TargetArgs {
    fn resolve(&self) -> Result<Target, CliError> {
        match (&self.family, &self.target) {
            (_, Some(t)) => t.parse(),
            (Some(f), None) => {
                let family: Family = f.parse()?;
                let mode = Mode::from_index(self.mode)?;
                Ok(Target::Criterion(CriterionId::new(family, self.k1, self.k2, mode)?))
            }
            (None, None) => Err(CliError::usage("missing_target", "give --family or --target")),
        }
    }
}

#[derive(Args)]
struct ScanArgs {
    /// TOML scan description; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Axis as name:min:max:count[:linear|log]; repeat for 2-D and 3-D.
    #[arg(long = "axis")]
    axes: Vec<String>,
    /// Target to evaluate; repeatable.
    #[arg(long = "target")]
    targets: Vec<String>,
    #[arg(long)]
    bp: Option<f64>,
    #[arg(long)]
    bs: Option<f64>,
    #[arg(long)]
    bi: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// balanced (bi = bs), unbalanced (bi = 0) or independent.
    #[arg(long)]
    noise_mode: Option<String>,
    /// Bisection tolerance for boundary points, in axis units.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    max_order: Option<usize>,
    /// Grid CSV destination; `-` or absent means standard output.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Boundary JSON destination; `-` means standard output.
    #[arg(long)]
    json: Option<PathBuf>,
    /// SVG heatmap destination.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Target drawn in the heatmap (default: the first).
    #[arg(long)]
    svg_target: Option<String>,
}

#[derive(Args)]
struct BoundaryArgs {
    #[command(flatten)]
    target: TargetArgs,
    #[command(flatten)]
    point: PointArgs,
    /// Axis to search along.
    #[arg(long)]
    axis: String,
    /// Search interval; defaults depend on the axis.
    #[arg(long)]
    lo: Option<f64>,
    #[arg(long)]
    hi: Option<f64>,
    /// Grid points used to bracket sign changes before bisection.
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[arg(long, default_value_t = roots::DEFAULT_TOL)]
    tol: f64,
    #[arg(long, default_value_t = roots::DEFAULT_MAX_ITER)]
    max_iter: usize,
    #[arg(long, default_value = "independent")]
    noise_mode: String,
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => {
                    let rec = CliError::usage("invalid_arguments", e.kind().to_string());
                    eprintln!("{}", rec.to_json());
                    EXIT_USAGE
                }
            };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

fn run(cmd: Command) -> Result<i32, CliError> {
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let code = match cmd {
        Command::State(p) => {
            let v = state_json(&p.params()?)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
            EXIT_OK
        }
        Command::Crit { target, point, max_order } => {
            let v = crit(&target.resolve()?, &point.params()?, max_order)?;
            writeln!(out, "{v}")?;
            EXIT_OK
        }
        Command::Pnd { point, nmax, tail_tol } => {
            pnd(&point.params()?, nmax, tail_tol, &mut out)?;
            EXIT_OK
        }
        Command::Scan(args) => scan(args, &mut out)?,
        Command::Boundary(args) => {
            let v = boundary(&args)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"))?;
            EXIT_OK
        }
        Command::Selftest => {
            let checks = selftest::run();
            for c in &checks {
                let tag = if c.passed() { "PASS" } else { "FAIL" };
                writeln!(out, "{tag} {} (max error {:.3e}, tolerance {:.0e})", c.name, c.error, c.tol)?;
            }
            let failed = checks.iter().filter(|c| !c.passed()).count();
            writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len())?;
            if failed == 0 {
                EXIT_OK
            } else {
                out.flush()?;
                return Err(CliError::numerical("selftest", format!("{failed} check(s) failed")));
            }
        }
    };
    out.flush()?;
    Ok(code)
}

fn complex(c: Complex64) -> Value {
    json!([c.re, c.im])
}

fn state_json(p: &PointParams) -> Result<Value, CliError> {
    let s = p.state()?;
    let cov = covariance_n(&s);
    let n: Vec<Vec<Value>> = cov.entries().iter().map(|row| row.iter().map(|&c| complex(c)).collect()).collect();
    let k = KMatrix::from_state(&s);
    let (nu1, nu2) = s.symplectic_eigenvalues();
    let (pt1, pt2) = s.partial_transpose_eigenvalues();
    Ok(json!({
        "params": p,
        "b1": s.b1(),
        "b2": s.b2(),
        "c1": complex(s.c1()),
        "c2": complex(s.c2()),
        "d12": complex(s.d12()),
        "dbar12": complex(s.dbar12()),
        "normal_covariance": n,
        "symmetric_covariance": s.symmetric_covariance(),
        "symplectic_eigenvalues": [nu1, nu2],
        "partial_transpose_eigenvalues": [pt1, pt2],
        "physical": s.is_physical(),
        "k_matrix": {
            "k12": k.k12, "k13": k.k13, "k14": k.k14, "k22": k.k22,
            "k24": k.k24, "k33": k.k33, "k34": k.k34, "k44": k.k44,
        },
    }))
}

fn crit(target: &Target, p: &PointParams, max_order: usize) -> Result<Value, CliError> {
    let order = target.required_order();
    if order > max_order {
        return Err(twinbeam_core::Error::OrderExceeded { requested: order, max: max_order }.into());
    }
    let s = p.state()?;
    let (value, nonclassical, tol) = match target.criterion() {
        Some(id) => {
            let r = twinbeam_core::criteria::evaluate_with(&Statistics::new(&s, order)?, id)?;
            (r.value, r.nonclassical, r.tol)
        }
        None => {
            let v = target.evaluate(&s)?;
            (v.value, v.nonclassical, ZERO_TOL)
        }
    };
    Ok(json!({
        "target": target.to_string(),
        "value": value,
        "nonclassical": nonclassical,
        "tol": tol,
        "order": order,
    }))
}

fn pnd(p: &PointParams, nmax: Option<usize>, tail_tol: f64, out: &mut impl Write) -> Result<(), CliError> {
    let s = p.state()?;
    let engine = Engine::default();
    let d = match nmax {
        Some(n) => engine.distribution_truncated(&s, n)?,
        None => engine.distribution(&s, tail_tol)?,
    };
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| CliError::usage("io", e.to_string());
    w.write_record(["n1", "n2", "p"]).map_err(io)?;
    for n1 in 0..=d.n_max1() {
        for n2 in 0..=d.n_max2() {
            w.write_record([n1.to_string(), n2.to_string(), format!("{:?}", d.get(n1, n2))]).map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::usage("io", format!("{}: {e}", path.display())))
}

fn is_stdout(p: &Path) -> bool {
    p.as_os_str() == "-"
}

fn scan(args: ScanArgs, out: &mut impl Write) -> Result<i32, CliError> {
    let cfg = match &args.config {
        Some(path) => ScanConfig::load(path)?,
        None => ScanConfig::default(),
    };
    let mut spec = cfg.to_spec()?;
    if !args.axes.is_empty() {
        spec.axes = args.axes.iter().map(|a| a.parse::<Axis>()).collect::<Result<_, _>>()?;
    }
    if !args.targets.is_empty() {
        spec.targets = args.targets.iter().map(|t| t.parse::<Target>()).collect::<Result<_, _>>()?;
    }
    let f = &mut spec.fixed;
    for (slot, v) in [
        (&mut f.bp, args.bp),
        (&mut f.bs, args.bs),
        (&mut f.bi, args.bi),
        (&mut f.t, args.t),
        (&mut f.phi, args.phi),
        (&mut f.eta, args.eta),
    ] {
        if let Some(v) = v {
            *slot = v;
        }
    }
    if let Some(m) = &args.noise_mode {
        spec.noise_mode = m.parse()?;
    }
    if let Some(t) = args.tol {
        spec.boundary_tol = t;
    }
    if let Some(n) = args.max_iter {
        spec.max_iter = n;
    }
    if let Some(n) = args.max_order {
        spec.max_order = n;
    }
    spec.validate()?;

    let svg_path = args.svg.or(cfg.output.svg);
    let svg_target = args.svg_target.or(cfg.output.svg_target);
    let svg_index = match &svg_target {
        Some(name) => {
            let t: Target = name.parse()?;
            Some(spec.targets.iter().position(|x| *x == t).ok_or_else(|| {
                CliError::usage("invalid_output", format!("heatmap target {t} is not scanned"))
            })?)
        }
        None => svg_path.as_ref().map(|_| 0),
    };
    if svg_path.is_some() && spec.axes.len() > 2 {
        return Err(CliError::usage("invalid_output", "heatmaps need a 1-D or 2-D scan"));
    }

    let result = run_scan(&spec)?;

    match args.csv.or(cfg.output.csv) {
        Some(p) if !is_stdout(&p) => output::write_csv(&result, create(&p)?)?,
        _ => output::write_csv(&result, &mut *out)?,
    }
    if let Some(p) = args.json.or(cfg.output.json) {
        let v = output::boundaries_json(&result);
        if is_stdout(&p) {
            output::write_json(&v, &mut *out)?;
        } else {
            output::write_json(&v, create(&p)?)?;
        }
    }
    if let (Some(p), Some(k)) = (svg_path, svg_index) {
        let svg = output::render_svg(&result, k)?;
        let mut w = create(&p)?;
        w.write_all(svg.as_bytes())?;
        w.flush()?;
    }
    Ok(EXIT_OK)
}

fn boundary(args: &BoundaryArgs) -> Result<Value, CliError> {
    let target = args.target.resolve()?;
    let axis: AxisName = args.axis.parse()?;
    let noise: NoiseMode = args.noise_mode.parse()?;
    if axis == AxisName::Bi && noise != NoiseMode::Independent {
        return Err(CliError::usage("invalid_axis", "bi follows bs in this noise mode"));
    }
    let base = args.point.params()?;
    let (dlo, dhi) = axis.default_range();
    let (lo, hi) = (args.lo.unwrap_or(dlo), args.hi.unwrap_or(dhi));
    check_value(axis, lo)?;
    check_value(axis, hi)?;
    if lo >= hi {
        return Err(CliError::usage("invalid_parameter", format!("empty interval [{lo}, {hi}]")));
    }
    if args.samples < 2 || !(args.tol > 0.0) || args.max_iter == 0 {
        return Err(CliError::usage("invalid_parameter", "need samples >= 2, tol > 0 and max-iter > 0"));
    }
    let f = |x: f64| {
        let mut p = base;
        p.set(axis, x);
        noise.apply(&mut p);
        p.state().and_then(|s| target.evaluate(&s)).map_or(f64::NAN, |v| v.indicator)
    };
    let xs = roots::linspace(lo, hi, args.samples);
    let vals: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut crossings = Vec::new();
    for k in 1..xs.len() {
        let (a, b) = (vals[k - 1], vals[k]);
        if a.is_finite() && b.is_finite() && roots::is_negative(a) != roots::is_negative(b) {
            let r = roots::bisect(f, xs[k - 1], xs[k], args.tol, args.max_iter)?;
            crossings.push(json!({
                "x": r.x,
                "lo": r.lo,
                "hi": r.hi,
                "iterations": r.iterations,
                "residual": f(r.x),
            }));
        }
    }
    if crossings.is_empty() {
        let failed = vals.iter().filter(|v| !v.is_finite()).count();
        return Err(CliError::numerical(
            "no_sign_change",
            format!("{target} keeps its sign on {axis} in [{lo}, {hi}] ({failed} of {} samples failed)", xs.len()),
        ));
    }
    Ok(json!({
        "target": target.to_string(),
        "axis": axis.name(),
        "crossings": crossings,
    }))
}
