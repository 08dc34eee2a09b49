//! The `pzeros` command line.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::disc::CarlesonRow;
use crate::error::{Error, Result};
use crate::interp::GrowthRow;
use crate::io::{csv_string, f17, read_sequence, to_json17, write_json, write_sequence};
use crate::oscillation::{
    build_coefficient_with, random_probes, witness_table, BuildOptions, OscillationBundle, ScanOptions, RESIDUE_TOL,
};
use crate::product::{CanonicalProduct, ContourConfig};
use crate::scale::{genus_from_scale, GrowthScale, ScaleSpec, WeightPair, WEIGHT_LOG_POWER};
use crate::sequence::{
    blaschke_sum, condition_report, generate_radial_geometric, generate_rho_lattice, generate_sharpness,
    log_uniform_separation, rho_density_estimate, rho_separation, separation_constant, uniform_density_estimate,
    uniform_separation_constant, RhoDensityOptions, SharpnessParams, ZeroSequence,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONSTRUCTION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

pub const ODE_TOL: f64 = 1e-5;
pub const INTERPOLATION_TOL: f64 = 1e-6;
pub const CARLESON_DELTAS: [f64; 3] = [0.1, 0.05, 0.025];
pub const CARLESON_ANGLES: usize = 8;
pub const RHO_DENSITY_LADDER: [f64; 3] = [4.0, 8.0, 16.0];
const EXCLUSION_RULE: &str = "r_k = min(d_k / 4, (1 - |z_k|) / 8), d_k = distance to the nearest other node";

#[derive(Debug, Parser)]
#[command(name = "pzeros", version, about = "Coefficients a(z) for which f'' + a f = 0 vanishes on a prescribed sequence")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a zero sequence file.
    Gen(GenArgs),
    /// Counting, separation and density constants of a sequence.
    Analyze(AnalyzeArgs),
    /// Build the coefficient and write per-node diagnostics.
    Build(BuildArgs),
    /// Check a built coefficient: residues, interpolation, ODE residual, zero scan.
    Verify(VerifyArgs),
    /// Growth table of the coefficient (or of the interpolating series).
    Growth(GrowthArgs),
    /// Witness table of the sharpness sequence.
    Witness(WitnessArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[command(subcommand)]
    pub generator: Generator,
    /// Output sequence file (default sequence.json).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Generator {
    Sharpness {
        #[arg(long, default_value_t = 1.0)]
        eta1: f64,
        #[arg(long, default_value_t = 1.0)]
        eta2: f64,
        #[arg(long, default_value_t = 6)]
        nmax: usize,
    },
    Geometric {
        #[arg(long, default_value_t = 0.5)]
        ratio: f64,
        #[arg(long, default_value_t = 50)]
        count: usize,
    },
    RhoLattice {
        /// Exponent of h(r) = log^gamma(1/(1-r)).
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long, default_value_t = 1.8)]
        spacing: f64,
        #[arg(long, default_value_t = 0.99)]
        rmax: f64,
    },
}

#[derive(Debug, Clone, Args)]
pub struct SourceArgs {
    #[arg(long)]
    pub sequence: PathBuf,
    /// `power:RHO`, `log-power:P`, `log`, `weight:GAMMA` or a JSON object.
    #[arg(long, default_value = "log-power:1")]
    pub scale: String,
}

#[derive(Debug, Clone, Args)]
pub struct ConstructionArgs {
    #[arg(long, default_value_t = crate::interp::DEFAULT_MARGIN)]
    pub margin: f64,
    /// Initial number of contour points; doubled up to max(1024, this).
    #[arg(long, default_value_t = 16)]
    pub contour_points: usize,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Radii for the uniform density ladder.
    #[arg(long, default_value = "0.9,0.95,0.99")]
    pub ladder: String,
    /// Output directory for report.json and conditions.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub construction: ConstructionArgs,
    /// Output directory for bundle.json, nodes.csv and product.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub construction: ConstructionArgs,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Probe radius.
    #[arg(long, default_value_t = 0.9)]
    pub rmax: f64,
    /// Number of random ODE probes.
    #[arg(long, default_value_t = 50)]
    pub samples: usize,
    /// Report file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GrowthArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[command(flatten)]
    pub construction: ConstructionArgs,
    #[arg(long, default_value = "0.9,0.95,0.99")]
    pub ladder: String,
    /// Circle samples before refinement.
    #[arg(long, default_value_t = 1024)]
    pub samples: usize,
    /// Tabulate the interpolating series h instead of a.
    #[arg(long)]
    pub series: bool,
    /// CSV file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long, default_value_t = 1.0)]
    pub eta1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub eta2: f64,
    #[arg(long, default_value_t = 10)]
    pub nmax: usize,
    /// CSV file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failed command and the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub error: Error,
}

trait Stage<T> {
    fn input(self) -> std::result::Result<T, Failure>;
    fn construction(self) -> std::result::Result<T, Failure>;
}

impl<T> Stage<T> for Result<T> {
    fn input(self) -> std::result::Result<T, Failure> {
        self.map_err(|error| Failure { code: EXIT_INPUT, error })
    }
    fn construction(self) -> std::result::Result<T, Failure> {
        self.map_err(|error| Failure {
            code: EXIT_CONSTRUCTION,
            error,
        })
    }
}

type Outcome = std::result::Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("pzeros: {}", f.error);
            f.code
        }
    }
}

pub fn execute(cli: Cli) -> Outcome {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Build(a) => cmd_build(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Growth(a) => cmd_growth(a),
        Command::Witness(a) => cmd_witness(a),
    }
}

/// Parses a scale description.
pub fn parse_scale(spec: &str) -> Result<ScaleSpec> {
    let spec = spec.trim();
    if spec.starts_with('{') {
        return serde_json::from_str(spec).map_err(|e| Error::Input(format!("scale {spec:?}: {e}")));
    }
    if spec == "log" {
        return Ok(ScaleSpec::LogPower { p: 1.0 });
    }
    let (kind, value) = spec
        .split_once(':')
        .ok_or_else(|| Error::Input(format!("scale {spec:?} is not KIND:VALUE or JSON")))?;
    let x: f64 = value
        .trim()
        .parse()
        .map_err(|_| Error::Input(format!("scale parameter {value:?} is not a number")))?;
    match kind.trim() {
        "power" => Ok(ScaleSpec::Power { rho: x }),
        "log-power" => Ok(ScaleSpec::LogPower { p: x }),
        "weight" => Ok(ScaleSpec::Weight {
            h: WEIGHT_LOG_POWER.into(),
            gamma: x,
        }),
        other => Err(Error::Input(format!("unknown scale kind {other:?}"))),
    }
}

/// Parses a comma-separated list of numbers.
pub fn parse_ladder(text: &str) -> Result<Vec<f64>> {
    let v = text
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::Input(format!("ladder entry {s:?} is not a number")))
        })
        .collect::<Result<Vec<_>>>()?;
    if v.is_empty() {
        return Err(Error::Input("empty ladder".into()));
    }
    Ok(v)
}

fn opt(r: Result<f64>) -> Value {
    match r {
        Ok(x) => json!(x),
        Err(_) => Value::Null,
    }
}

fn c17(z: Complex64) -> Value {
    json!({"re": z.re, "im": z.im})
}

fn options_for(c: &ConstructionArgs) -> Result<BuildOptions> {
    if !(c.margin.is_finite() && c.margin >= 0.0) {
        return Err(Error::InvalidParameter(format!("margin must be nonnegative, got {}", c.margin)));
    }
    if c.contour_points < 4 {
        return Err(Error::InvalidParameter(format!(
            "contour points must be at least 4, got {}",
            c.contour_points
        )));
    }
    Ok(BuildOptions {
        margin: c.margin,
        contour: ContourConfig {
            start: c.contour_points,
            cap: c.contour_points.max(1024),
            ..ContourConfig::default()
        },
        ..BuildOptions::default()
    })
}

fn constants(options: &BuildOptions) -> Value {
    json!({
        "margin": options.margin,
        "contour": options.contour,
        "residue_tol": options.residue_tol,
        "exclusion_rule": EXCLUSION_RULE,
        "exponent_rule": "s_n = s + ceil((margin + c_hat psi_tilde(1/(1-|z_n|)) + 2 ln(n+1)) / ln 2)",
    })
}

fn header(command: &str, config: Value) -> serde_json::Map<String, Value> {
    let mut m = serde_json::Map::new();
    m.insert("command".into(), json!(command));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("config".into(), config);
    m
}

fn load(source: &SourceArgs) -> std::result::Result<(ZeroSequence, ScaleSpec, GrowthScale), Failure> {
    let z = read_sequence(&source.sequence).input()?;
    let spec = parse_scale(&source.scale).input()?;
    let scale = spec.build().input()?;
    Ok((z, spec, scale))
}

fn source_echo(source: &SourceArgs, z: &ZeroSequence, spec: &ScaleSpec) -> Value {
    json!({
        "sequence": source.sequence.display().to_string(),
        "label": z.label(),
        "count": z.len(),
        "scale": spec,
    })
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

fn emit_text(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json(out: Option<&Path>, value: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit_text(out, &text)
}

fn cmd_gen(args: GenArgs) -> Outcome {
    let z = match args.generator {
        Generator::Sharpness { eta1, eta2, nmax } => {
            generate_sharpness(SharpnessParams::new(eta1, eta2, nmax).input()?).input()?
        }
        Generator::Geometric { ratio, count } => generate_radial_geometric(ratio, count).input()?,
        Generator::RhoLattice { gamma, spacing, rmax } => {
            let w = WeightPair::log_power(gamma).input()?;
            generate_rho_lattice(&w, spacing, rmax).input()?
        }
    };
    if let Some(skipped) = z.meta().get("skipped_blocks").and_then(Value::as_array) {
        if !skipped.is_empty() {
            eprintln!("warning: empty sharpness blocks skipped: {}", Value::Array(skipped.clone()));
        }
    }
    if z.is_empty() {
        return Err(Failure {
            code: EXIT_INPUT,
            error: Error::InvalidParameter("every block is empty; no file written".into()),
        });
    }
    let out = args.out.unwrap_or_else(|| PathBuf::from("sequence.json"));
    write_sequence(&z, &out).input()?;
    let max_modulus = z.points().last().map_or(0.0, |p| p.modulus());
    let summary = to_json17(&json!({
        "file": out.display().to_string(),
        "label": z.label(),
        "count": z.len(),
        "max_modulus": max_modulus,
        "separation": opt(separation_constant(&z)),
        "uniform_separation": opt(uniform_separation_constant(&z)),
    }))
    .input()?;
    emit_json(None, &summary).input()?;
    Ok(EXIT_PASS)
}

fn cmd_analyze(args: AnalyzeArgs) -> Outcome {
    let (z, spec, scale) = load(&args.source)?;
    let ladder = parse_ladder(&args.ladder).input()?;
    let genus = genus_from_scale(&scale);
    let report = condition_report(&z, &scale).input()?;
    let density = uniform_density_estimate(&z, &ladder, None).input()?;
    let rho_part = match scale.weight() {
        Some(w) => {
            let rho = |r: f64| w.rho(r);
            let ladder = rho_density_estimate(&z, &rho, &RHO_DENSITY_LADDER, RhoDensityOptions::default()).input()?;
            json!({
                "rho_separation": opt(rho_separation(&z, &rho)),
                "rho_density": ladder.iter().map(|&(r, d)| json!({"R": r, "value": d})).collect::<Vec<_>>(),
            })
        }
        None => json!({"rho_separation": null, "rho_density": null, "note": "scale has no weight, so rho is undefined"}),
    };
    let lemma = CanonicalProduct::new(z.clone(), genus)
        .and_then(|p| p.lemma_index_constant(0.5))
        .construction()?;
    let mut m = header(
        "analyze",
        json!({"source": source_echo(&args.source, &z, &spec), "ladder": ladder, "rho_ladder": RHO_DENSITY_LADDER}),
    );
    m.insert(
        "constants".into(),
        json!({
            "polya_order": scale.polya_order(),
            "genus": genus,
            "c_n": report.c_n,
            "c_N": report.c_big_n,
            "condition_skipped": report.skipped,
            "separation": opt(separation_constant(&z)),
            "uniform_separation": opt(uniform_separation_constant(&z)),
            "log_uniform_separation": opt(log_uniform_separation(&z)),
            "uniform_density": density.iter().map(|&(r, d)| json!({"r": r, "value": d})).collect::<Vec<_>>(),
            "rho": rho_part,
            "blaschke_sum": blaschke_sum(&z, genus),
            "lemma_index_constant": lemma,
        }),
    );
    let value = to_json17(&Value::Object(m)).input()?;
    let rows: Vec<Vec<String>> = report
        .rows
        .iter()
        .map(|r| {
            let o = |x: Option<f64>| x.map_or(String::new(), f17);
            vec![
                r.index.to_string(),
                f17(r.one_minus_modulus),
                r.n.to_string(),
                f17(r.big_n),
                o(r.ratio_n),
                o(r.ratio_big_n),
            ]
        })
        .collect();
    let csv = csv_string(&["k", "one_minus_modulus", "n", "N", "ratio_n", "ratio_N"], &rows).input()?;
    match &args.out {
        Some(dir) => {
            ensure_dir(dir).input()?;
            write_json(&dir.join("report.json"), &value).input()?;
            fs::write(dir.join("conditions.csv"), csv).map_err(Error::from).input()?;
        }
        None => emit_json(None, &value).input()?,
    }
    Ok(EXIT_PASS)
}

fn build_bundle(
    source: &SourceArgs,
    construction: &ConstructionArgs,
) -> std::result::Result<(OscillationBundle, ScaleSpec, BuildOptions, Value), Failure> {
    let (z, spec, scale) = load(source)?;
    let options = options_for(construction).input()?;
    let echo = source_echo(source, &z, &spec);
    let bundle = build_coefficient_with(z, scale, &options).construction()?;
    Ok((bundle, spec, options, echo))
}

fn bundle_parameters(b: &OscillationBundle) -> Value {
    let p = b.product();
    json!({
        "genus": p.genus(),
        "polya_order": b.scale().polya_order(),
        "exponent_rule": b.series().rule(),
        "lemma_constant": b.series().lemma_constant(),
        "bound_constant": b.series().targets().bound_constant(),
        "chain_constant": b.chain_constant(),
        "exponents": b.series().exponents(),
        "exclusion_radii": p.exclusion_radii(),
        "max_interpolation_residual": b.max_interpolation_residual(),
        "max_residue_defect": b.max_residue_defect(),
    })
}

fn cmd_build(args: BuildArgs) -> Outcome {
    let (b, _, options, echo) = build_bundle(&args.source, &args.construction)?;
    let mut m = header("build", json!({"source": echo, "margin": args.construction.margin, "contour_points": args.construction.contour_points}));
    m.insert("constants".into(), constants(&options));
    m.insert("bundle".into(), bundle_parameters(&b));
    let value = to_json17(&Value::Object(m)).input()?;

    let nodes: Vec<Vec<String>> = b
        .diagnostics()
        .iter()
        .map(|d| {
            vec![
                d.index.to_string(),
                f17(d.z.re),
                f17(d.z.im),
                f17(d.b.re),
                f17(d.b.im),
                f17(d.interpolation_residual),
                f17(d.residue_defect),
                serde_json::to_value(d.source).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
            ]
        })
        .collect();
    let nodes_csv = csv_string(
        &["k", "re_z", "im_z", "re_b", "im_b", "residual", "residue_cancellation", "second_derivative_source"],
        &nodes,
    )
    .input()?;
    let p = b.product();
    let product_rows = (0..p.len())
        .map(|k| {
            let z = p.node(k).value();
            let log_dp = p.node_log_derivative(k)?;
            let log_b = p.deleted_log_eval(k, p.node(k))?;
            let lemma = p.lemma_index_check(k, 0.5)?;
            Ok(vec![
                k.to_string(),
                f17(z.re),
                f17(z.im),
                f17(log_dp.re.exp()),
                f17(log_dp.re),
                f17(log_b.re),
                f17(lemma.lhs),
                f17(lemma.rhs_sum),
            ])
        })
        .collect::<Result<Vec<_>>>()
        .construction()?;
    let product_csv = csv_string(
        &["k", "re_z", "im_z", "abs_dP", "log_abs_dP", "log_abs_B", "lemma_lhs", "lemma_rhs"],
        &product_rows,
    )
    .input()?;
    match &args.out {
        Some(dir) => {
            ensure_dir(dir).input()?;
            write_json(&dir.join("bundle.json"), &value).input()?;
            fs::write(dir.join("nodes.csv"), nodes_csv).map_err(Error::from).input()?;
            fs::write(dir.join("product.csv"), product_csv).map_err(Error::from).input()?;
        }
        None => emit_json(None, &value).input()?,
    }
    Ok(EXIT_PASS)
}

fn check(name: &str, value: f64, tolerance: f64) -> (bool, Value) {
    let pass = value.is_finite() && value <= tolerance;
    (pass, json!({"name": name, "value": value, "tolerance": tolerance, "pass": pass}))
}

fn carleson_json(rows: &[CarlesonRow]) -> Value {
    Value::Array(
        rows.iter()
            .map(|r| json!({"delta": r.delta, "ratio": r.ratio, "phi_at_max": r.phi_at_max}))
            .collect(),
    )
}

fn cmd_verify(args: VerifyArgs) -> Outcome {
    if !(args.rmax > 0.0 && args.rmax < 1.0) || args.samples == 0 {
        return Err(Failure {
            code: EXIT_INPUT,
            error: Error::InvalidParameter(format!(
                "need 0 < rmax < 1 and samples > 0, got rmax = {}, samples = {}",
                args.rmax, args.samples
            )),
        });
    }
    let (b, _, options, echo) = build_bundle(&args.source, &args.construction)?;
    let probes = random_probes(b.product(), args.samples, args.rmax, args.seed).construction()?;
    let ode = b.ode_residual(&probes).construction()?;
    let scan_opts = ScanOptions::default();
    let scan = b.zero_scan(&scan_opts).construction()?;
    let carleson = b.carleson_condition_check(&CARLESON_DELTAS, CARLESON_ANGLES).construction()?;

    let mut checks = Vec::new();
    let mut all = true;
    for (pass, v) in [
        check("residue_cancellation", b.max_residue_defect(), options.residue_tol.min(RESIDUE_TOL)),
        check("interpolation", b.max_interpolation_residual(), INTERPOLATION_TOL),
        check("ode_residual", ode.max, ODE_TOL),
    ] {
        all &= pass;
        checks.push(v);
    }
    let exact = scan.exact();
    all &= exact;
    checks.push(json!({
        "name": "zero_scan",
        "expected": scan.expected,
        "found": scan.found,
        "max_deviation": scan.max_deviation,
        "regions": scan.regions,
        "pass": exact,
    }));

    let mut m = header(
        "verify",
        json!({
            "source": echo,
            "margin": args.construction.margin,
            "contour_points": args.construction.contour_points,
            "seed": args.seed,
            "rmax": args.rmax,
            "samples": args.samples,
            "scan": scan_opts,
            "carleson_deltas": CARLESON_DELTAS,
            "carleson_angles": CARLESON_ANGLES,
        }),
    );
    m.insert("constants".into(), constants(&options));
    m.insert("bundle".into(), bundle_parameters(&b));
    m.insert("checks".into(), Value::Array(checks));
    m.insert("ode_per_probe".into(), json!(ode.per_probe));
    m.insert(
        "probes".into(),
        Value::Array(probes.iter().map(|p| c17(p.value())).collect()),
    );
    m.insert(
        "carleson".into(),
        json!({"rows": carleson_json(&carleson), "gated": false}),
    );
    m.insert("pass".into(), json!(all));
    let value = to_json17(&Value::Object(m)).input()?;
    emit_json(args.out.as_deref(), &value).input()?;
    Ok(if all { EXIT_PASS } else { EXIT_VERIFICATION })
}

fn growth_csv(rows: &[GrowthRow]) -> Result<String> {
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![f17(r.r), f17(r.log_m), f17(r.comparator), f17(r.ratio)])
        .collect();
    csv_string(&["r", "logM", "comparator", "ratio"], &rows)
}

fn cmd_growth(args: GrowthArgs) -> Outcome {
    let ladder = parse_ladder(&args.ladder).input()?;
    if ladder.iter().any(|&r| !(r > 0.0 && r < 1.0)) || args.samples < 8 {
        return Err(Failure {
            code: EXIT_INPUT,
            error: Error::InvalidParameter("ladder radii must lie in (0, 1) and samples must be at least 8".into()),
        });
    }
    let (b, _, _, _) = build_bundle(&args.source, &args.construction)?;
    let rows = if args.series {
        b.series().growth_table(&ladder, args.samples)
    } else {
        b.coefficient_growth_table(&ladder, args.samples)
    }
    .construction()?;
    emit_text(args.out.as_deref(), &growth_csv(&rows).input()?).input()?;
    Ok(EXIT_PASS)
}

fn cmd_witness(args: WitnessArgs) -> Outcome {
    let params = SharpnessParams::new(args.eta1, args.eta2, args.nmax).input()?;
    let rows = witness_table(params).input()?;
    let rows: Vec<Vec<String>> = rows
        .iter()
        .map(|w| vec![w.n.to_string(), f17(w.i1_abs), f17(w.i1_lower), f17(w.i2_upper), f17(w.dominance())])
        .collect();
    let csv = csv_string(&["n", "abs_I1", "I1_lower_bound", "I2_upper", "ratio"], &rows).input()?;
    emit_text(args.out.as_deref(), &csv).input()?;
    Ok(EXIT_PASS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> i32 {
        run(std::iter::once("pzeros").chain(args.iter().copied()))
    }

    #[test]
    fn scale_specs() {
        assert_eq!(parse_scale("log").unwrap(), ScaleSpec::LogPower { p: 1.0 });
        assert_eq!(parse_scale("power:0.5").unwrap(), ScaleSpec::Power { rho: 0.5 });
        assert_eq!(
            parse_scale("weight:2").unwrap(),
            ScaleSpec::Weight {
                h: WEIGHT_LOG_POWER.into(),
                gamma: 2.0
            }
        );
        assert_eq!(parse_scale(r#"{"kind": "log-power", "p": 2}"#).unwrap(), ScaleSpec::LogPower { p: 2.0 });
        assert!(parse_scale("cubic:1").is_err());
        assert!(parse_scale("power:x").is_err());
        assert_eq!(parse_ladder("0.9, 0.95,0.99").unwrap(), vec![0.9, 0.95, 0.99]);
        assert!(parse_ladder("0.9,,1").is_err());
    }

    #[test]
    fn gen_and_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let seq = dir.path().join("g.json");
        let s = seq.to_str().unwrap();
        assert_eq!(run_args(&["gen", "geometric", "--ratio", "0.5", "--count", "50", "--out", s]), 0);
        assert_eq!(read_sequence(&seq).unwrap().len(), 50);
        let sh = dir.path().join("s.json");
        assert_eq!(
            run_args(&["gen", "sharpness", "--eta1", "1", "--eta2", "1", "--nmax", "6", "--out", sh.to_str().unwrap()]),
            0
        );
        let params = SharpnessParams::new(1.0, 1.0, 6).unwrap();
        let total: usize = crate::sequence::sharpness_blocks(&params).unwrap().iter().map(|b| b.m).sum();
        assert_eq!(read_sequence(&sh).unwrap().len(), total);

        assert_eq!(run_args(&["gen", "geometric", "--ratio", "1.5", "--out", s]), EXIT_INPUT);
        assert_eq!(run_args(&["gen", "sharpness", "--eta1", "-1"]), EXIT_INPUT);
        assert_eq!(run_args(&["bogus"]), EXIT_INPUT);

        let dup = dir.path().join("dup.json");
        fs::write(&dup, r#"{"label":"d","points":[{"re":0.1,"im":0},{"re":0.1,"im":0}]}"#).unwrap();
        assert_eq!(run_args(&["analyze", "--sequence", dup.to_str().unwrap()]), EXIT_INPUT);
        assert_eq!(run_args(&["build", "--sequence", s, "--scale", "nope"]), EXIT_INPUT);
    }

    #[test]
    fn build_and_verify_small_sequence() {
        let dir = tempfile::tempdir().unwrap();
        let seq = dir.path().join("g.json");
        let s = seq.to_str().unwrap();
        assert_eq!(run_args(&["gen", "geometric", "--count", "12", "--out", s]), 0);
        let out = dir.path().join("built");
        assert_eq!(run_args(&["build", "--sequence", s, "--scale", "log", "--out", out.to_str().unwrap()]), 0);
        let nodes = fs::read_to_string(out.join("nodes.csv")).unwrap();
        assert_eq!(nodes.lines().count(), 13);
        assert!(nodes.starts_with("k,re_z,im_z,re_b,im_b,residual,residue_cancellation"));
        let bundle: Value = serde_json::from_str(&fs::read_to_string(out.join("bundle.json")).unwrap()).unwrap();
        assert_eq!(bundle["bundle"]["genus"], json!(1));
        assert_eq!(bundle["version"], json!(env!("CARGO_PKG_VERSION")));

        let report = dir.path().join("verify.json");
        let code = run_args(&[
            "verify", "--sequence", s, "--scale", "log", "--samples", "8", "--out", report.to_str().unwrap(),
        ]);
        let v: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
        assert_eq!(code, 0, "{v:#}");
        assert_eq!(v["pass"], json!(true));
        assert_eq!(v["checks"].as_array().unwrap().len(), 4);

        let adir = dir.path().join("analysis");
        assert_eq!(run_args(&["analyze", "--sequence", s, "--out", adir.to_str().unwrap()]), 0);
        let conditions = fs::read_to_string(adir.join("conditions.csv")).unwrap();
        assert_eq!(conditions.lines().count(), 13);
    }

    #[test]
    fn witness_csv() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("w.csv");
        assert_eq!(run_args(&["witness", "--nmax", "6", "--out", out.to_str().unwrap()]), 0);
        let text = fs::read_to_string(out).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("n,abs_I1,I1_lower_bound,I2_upper,ratio"));
        assert_eq!(lines.count(), 5);
    }
}
