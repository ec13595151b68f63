//! `heis-geo`: command-line access to the Heisenberg-group geometry library.
//!
//! Subcommands: `geodesic`, `distance`, `bubble`, `hull-growth`,
//! `convexity-check`. Every invocation is deterministic given its flags
//! (including `--seed`), and numeric output uses a fixed 17-significant-digit
//! format, so identical invocations produce byte-identical output.
//!
//! Exit codes: 0 success, 1 usage or parse error, 2 domain error.

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use heis_geo::{
    bubble_symmetry_check, cc_distance_with_tol, connect_with_tol, fmt_f64, parse_point,
    scan_for_witness, HPoint, HeisError, HullSequence, ScalarField, TorusAngle, DEFAULT_MU_TOL,
};

#[derive(Parser)]
#[command(
    name = "heis-geo",
    about = "Sub-Riemannian geometry on the Heisenberg group H^n",
    version,
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Connect two points by a geodesic and sample it
    Geodesic {
        /// Start point: JSON, tuple literal like (1,0,0), or "origin"
        #[arg(long)]
        from: String,
        /// End point, same forms
        #[arg(long)]
        to: String,
        /// Number of samples along the geodesic
        #[arg(long, default_value_t = 65)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Carnot-Caratheodory distance between two points
    Distance {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Sample the geodesic bubble of height T, or audit its symmetries
    Bubble {
        /// Vertical height of the generating geodesic (nonzero)
        #[arg(long = "T", allow_hyphen_values = true)]
        t_height: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Rotation grid points per torus coordinate
        #[arg(long = "grid-theta", default_value_t = 8)]
        grid_theta: usize,
        /// Parameter grid points along the generating geodesic
        #[arg(long = "grid-s", default_value_t = 33)]
        grid_s: usize,
        /// Run the randomized symmetry audit instead of emitting samples
        #[arg(long = "check-symmetry", default_value_t = false)]
        check_symmetry: bool,
        /// Random samples for the symmetry audit
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Radius recursion of the iterated hull trajectory with growth report
    HullGrowth {
        #[arg(long, default_value_t = 50)]
        depth: usize,
        /// Report the first step whose radius exceeds this threshold
        #[arg(long, default_value_t = 1e6)]
        threshold: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
    /// Scan a built-in scalar function for a convexity violation
    ConvexityCheck {
        /// const, const:k, t-coord, cc-dist-origin, or example1-indicator
        #[arg(long)]
        function: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        n: usize,
    },
}

/// Solver tolerance, overridable through `HEIS_GEO_TOL`.
fn solver_tol() -> Result<f64, String> {
    match std::env::var("HEIS_GEO_TOL") {
        Ok(raw) => {
            let v: f64 = raw
                .parse()
                .map_err(|_| format!("HEIS_GEO_TOL is not a number: {raw:?}"))?;
            if !v.is_finite() || v <= 0.0 {
                return Err(format!("HEIS_GEO_TOL must be positive and finite, got {raw:?}"));
            }
            Ok(v)
        }
        Err(_) => Ok(DEFAULT_MU_TOL),
    }
}

fn parse_endpoints(from: &str, to: &str) -> Result<(HPoint, HPoint), HeisError> {
    // parse the self-describing operand first so that "origin" picks up the
    // right dimension from the other side
    if from.trim().eq_ignore_ascii_case("origin") {
        let q = parse_point(to, None)?;
        let p = parse_point(from, Some(q.dim()))?;
        Ok((p, q))
    } else {
        let p = parse_point(from, None)?;
        let q = parse_point(to, Some(p.dim()))?;
        Ok((p, q))
    }
}

fn cmd_geodesic(from: &str, to: &str, samples: usize, format: Format) -> Result<(), Failure> {
    let (p, q) = parse_endpoints(from, to).map_err(Failure::from)?;
    if samples < 2 {
        return Err(Failure::usage("--samples must be >= 2".into()));
    }
    let tol = solver_tol().map_err(Failure::usage)?;
    let arcs = connect_with_tol(&p, &q, tol).map_err(Failure::from)?;
    let polyline = arcs[0].sample(samples).map_err(Failure::from)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            let arcs_json = serde_json::to_string(&arcs).expect("arcs serialize");
            let line_json = serde_json::to_string(&polyline).expect("polyline serializes");
            writeln!(out, "{{\"arcs\":{arcs_json},\"polyline\":{line_json}}}")
                .map_err(Failure::io)?;
        }
        Format::Csv => {
            let meta = serde_json::to_string(&arcs[0]).expect("arcs serialize");
            writeln!(out, "# {meta}").map_err(Failure::io)?;
            polyline.write_csv(&mut out).map_err(Failure::io)?;
        }
    }
    Ok(())
}

fn cmd_distance(from: &str, to: &str) -> Result<(), Failure> {
    let (p, q) = parse_endpoints(from, to).map_err(Failure::from)?;
    let tol = solver_tol().map_err(Failure::usage)?;
    let d = cc_distance_with_tol(&p, &q, tol).map_err(Failure::from)?;
    println!("{}", fmt_f64(d));
    Ok(())
}

fn cmd_bubble(
    t_height: f64,
    n: usize,
    grid_theta: usize,
    grid_s: usize,
    check_symmetry: bool,
    samples: usize,
    seed: u64,
) -> Result<(), Failure> {
    if check_symmetry {
        let report = bubble_symmetry_check(t_height, n, samples, seed).map_err(Failure::from)?;
        println!("samples: {}", report.samples);
        println!("conjugation_err: {}", fmt_f64(report.max_err_conj));
        println!("flip_err: {}", fmt_f64(report.max_err_flip));
        println!("rotation_err: {}", fmt_f64(report.max_err_rotation));
        println!("reflection_err: {}", fmt_f64(report.max_err_reflection));
        println!("tolerance: {}", fmt_f64(report.tol));
        println!("symmetry: {}", if report.pass { "pass" } else { "fail" });
        return Ok(());
    }
    if n > 2 {
        return Err(Failure::domain(
            "bubble sampling grids are guarded to n <= 2; use --check-symmetry for higher n"
                .into(),
        ));
    }
    if grid_theta < 1 || grid_s < 2 {
        return Err(Failure::usage(
            "--grid-theta must be >= 1 and --grid-s >= 2".into(),
        ));
    }
    let tau = std::f64::consts::TAU;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let mut header = String::new();
    for j in 1..=n {
        header.push_str(&format!("theta{j},"));
    }
    header.push('s');
    for j in 1..=n {
        header.push_str(&format!(",x{j}"));
    }
    for j in 1..=n {
        header.push_str(&format!(",y{j}"));
    }
    header.push_str(",t");
    writeln!(out, "{header}").map_err(Failure::io)?;

    // row order: lexicographic over (theta_1, .., theta_n, s)
    let mut theta_idx = vec![0usize; n];
    loop {
        let theta = TorusAngle::new(
            theta_idx
                .iter()
                .map(|&i| tau * i as f64 / grid_theta as f64)
                .collect(),
        )
        .map_err(Failure::from)?;
        for k in 0..grid_s {
            let s = if k + 1 == grid_s {
                tau
            } else {
                tau * k as f64 / (grid_s - 1) as f64
            };
            let point = heis_geo::bubble_point(t_height, n, &theta, s).map_err(Failure::from)?;
            let mut row = String::new();
            for a in theta.angles() {
                row.push_str(&fmt_f64(*a));
                row.push(',');
            }
            row.push_str(&fmt_f64(s));
            for v in point.x() {
                row.push(',');
                row.push_str(&fmt_f64(*v));
            }
            for v in point.y() {
                row.push(',');
                row.push_str(&fmt_f64(*v));
            }
            row.push(',');
            row.push_str(&fmt_f64(point.t()));
            writeln!(out, "{row}").map_err(Failure::io)?;
        }
        // advance the odometer
        let mut pos = n;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            theta_idx[pos] += 1;
            if theta_idx[pos] < grid_theta {
                break;
            }
            theta_idx[pos] = 0;
        }
    }
}

fn cmd_hull_growth(depth: usize, threshold: f64, n: usize) -> Result<(), Failure> {
    let seq = HullSequence::build(depth, n).map_err(Failure::from)?;
    let cert = seq.growth_certificate(threshold).map_err(Failure::from)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    cert.write_csv(&mut out).map_err(Failure::io)?;
    Ok(())
}

fn cmd_convexity_check(function: &str, trials: usize, seed: u64, n: usize) -> Result<(), Failure> {
    let field = ScalarField::parse(function).map_err(Failure::from)?;
    let report = scan_for_witness(&field, n, trials, seed).map_err(Failure::from)?;
    println!(
        "{}",
        serde_json::to_string(&report).expect("report serializes")
    );
    Ok(())
}

/// Error classified by exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: String) -> Self {
        Failure { code: 1, message }
    }

    fn domain(message: String) -> Self {
        Failure { code: 2, message }
    }

    fn io(e: std::io::Error) -> Self {
        Failure {
            code: 2,
            message: format!("i/o error: {e}"),
        }
    }
}

impl From<HeisError> for Failure {
    fn from(e: HeisError) -> Self {
        let code = match e {
            HeisError::Parse(_) => 1,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Geodesic {
            from,
            to,
            samples,
            format,
        } => cmd_geodesic(&from, &to, samples, format),
        Command::Distance { from, to } => cmd_distance(&from, &to),
        Command::Bubble {
            t_height,
            n,
            grid_theta,
            grid_s,
            check_symmetry,
            samples,
            seed,
        } => cmd_bubble(t_height, n, grid_theta, grid_s, check_symmetry, samples, seed),
        Command::HullGrowth {
            depth,
            threshold,
            n,
        } => cmd_hull_growth(depth, threshold, n),
        Command::ConvexityCheck {
            function,
            trials,
            seed,
            n,
        } => cmd_convexity_check(&function, trials, seed, n),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders --help/--version through the same channel
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
