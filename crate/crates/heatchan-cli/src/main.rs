//! `heatchan` — heat-channel capacity and rate-distortion from the command
//! line, with machine-readable JSON manifests and CSV output for plotting.
//!
//! Exit codes: 0 success, 2 domain/usage error, 3 accuracy error.

mod output;

use std::f64::consts::LN_2;

use clap::{Args, Parser, Subcommand, ValueEnum};

use heatchan_core::error::Error;
use heatchan_core::sim::{
    estimate_wvs_parts, simulate_effective_noise, simulate_kl_source,
    simulate_matched_filter_noise,
};
use heatchan_core::spectrum::exact_power_trace;
use heatchan_core::szego::{szego_sweep, TestFunctionSpec};
use heatchan_core::tf_plane::{
    capacity_integral, power_integral, rate_integral, solve_lambda, solve_nu, wvs,
    SurfaceKind, TfSurface,
};
use heatchan_core::waterfill::{
    capacity_waterfill, rd_reverse_waterfill, source_energy,
};
use heatchan_core::{FilterParams, SimConfig};

use output::{write_csv, RunManifest};

#[derive(Parser)]
#[command(
    name = "heatchan",
    version,
    about = "Heat-channel capacity and rate-distortion: exact waterfilling, \
             time-frequency integrals, Szegő sweeps, Monte Carlo checks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive the full filter parameter bundle from alpha and beta
    Params(ParamsCmd),
    /// Channel capacity: exact waterfilling and/or the TF-plane integral
    Capacity(CapacityCmd),
    /// Rate-distortion: exact reverse waterfilling and/or the TF-plane integral
    Rd(RdCmd),
    /// Szegő sum-vs-integral sweep over a list of DoF values
    Szego(SzegoCmd),
    /// Seeded Monte Carlo simulations of the channel and the source
    Simulate(SimulateCmd),
    /// Sample a time-frequency surface onto a CSV grid
    Grid(GridCmd),
}

/// Filter parameters: give --alpha and --beta, or --ab (with optional
/// --aspect = alpha/beta, default 1).
#[derive(Args, Clone, Copy)]
struct BundleArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    /// Time-frequency product alpha*beta
    #[arg(long, conflicts_with_all = ["alpha", "beta"])]
    ab: Option<f64>,
    /// Aspect ratio alpha/beta, used with --ab
    #[arg(long, default_value_t = 1.0)]
    aspect: f64,
}

impl BundleArgs {
    fn resolve(&self) -> Result<FilterParams, Error> {
        match (self.ab, self.alpha, self.beta) {
            (Some(ab), _, _) => FilterParams::from_dof(ab, self.aspect),
            (None, Some(alpha), Some(beta)) => FilterParams::derive(alpha, beta),
            _ => Err(Error::usage(
                "provide either --alpha and --beta, or --ab (optionally with --aspect)",
            )),
        }
    }

    fn record(&self, params: &FilterParams, manifest: &mut RunManifest) {
        manifest
            .input("alpha", params.alpha())
            .input("beta", params.beta())
            .input("aspect", self.aspect);
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Exact,
    Tf,
    Both,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitsArg {
    Nats,
    Bits,
}

impl UnitsArg {
    fn factor(self) -> f64 {
        match self {
            UnitsArg::Nats => 1.0,
            UnitsArg::Bits => LN_2,
        }
    }

    fn name(self) -> &'static str {
        match self {
            UnitsArg::Nats => "nats",
            UnitsArg::Bits => "bits",
        }
    }
}

#[derive(Args)]
struct ParamsCmd {
    #[command(flatten)]
    bundle: BundleArgs,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CapacityCmd {
    #[command(flatten)]
    bundle: BundleArgs,
    /// Average input energy budget
    #[arg(long = "S")]
    s_budget: f64,
    /// Noise PSD theta^2
    #[arg(long)]
    theta2: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = UnitsArg::Nats)]
    units: UnitsArg,
    /// Eigenvalue truncation tail, relative to the full trace
    #[arg(long, default_value_t = 1e-12)]
    tail_eps: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct RdCmd {
    #[command(flatten)]
    bundle: BundleArgs,
    /// Target mean squared-error distortion
    #[arg(long = "D")]
    distortion: f64,
    /// Source PSD sigma^2
    #[arg(long)]
    sigma2: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Exact)]
    method: MethodArg,
    #[arg(long, value_enum, default_value_t = UnitsArg::Nats)]
    units: UnitsArg,
    #[arg(long, default_value_t = 1e-12)]
    tail_eps: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TestFnArg {
    #[value(alias = "power_n")]
    PowerN,
    #[value(alias = "log_plus")]
    LogPlus,
    #[value(alias = "min_one")]
    MinOne,
    #[value(alias = "power_alloc")]
    PowerAlloc,
}

#[derive(Args)]
struct SzegoCmd {
    /// Test function kind
    #[arg(long = "g", value_enum)]
    kind: TestFnArg,
    /// Power for --g power-n
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Bounded coefficient a
    #[arg(long, default_value_t = 1.0)]
    a: f64,
    /// Argument scale b
    #[arg(long, default_value_t = 1.0)]
    b: f64,
    /// DoF values to sweep, comma separated
    #[arg(long = "ab-list", value_delimiter = ',', required = true)]
    ab_list: Vec<f64>,
    #[arg(long, default_value_t = 1.0)]
    aspect: f64,
    /// Write the sweep as CSV (schema szego.v1)
    #[arg(long)]
    csv: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SimKindArg {
    Noise,
    Source,
    Wvs,
}

#[derive(Args)]
struct SimulateCmd {
    #[arg(long, value_enum)]
    kind: SimKindArg,
    #[command(flatten)]
    bundle: BundleArgs,
    /// Noise PSD theta^2 (noise) or source PSD sigma^2 (source, wvs)
    #[arg(long, default_value_t = 1.0)]
    psd: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Highest Hermite mode (defaults: noise 5, source 8, wvs 40)
    #[arg(long)]
    max_mode: Option<usize>,
    #[arg(long)]
    csv: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SurfaceArg {
    #[value(name = "N")]
    N,
    #[value(name = "Phi")]
    Phi,
    #[value(name = "weyl")]
    Weyl,
}

#[derive(Args)]
struct GridCmd {
    #[arg(long, value_enum)]
    surface: SurfaceArg,
    #[command(flatten)]
    bundle: BundleArgs,
    /// theta^2 (surface N) or sigma^2 (surface Phi); ignored by weyl
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Half-width of the square sampling box, in raw t and omega units
    #[arg(long)]
    extent: f64,
    /// Sample spacing
    #[arg(long)]
    step: f64,
    /// Output CSV path (schema grid.v1)
    #[arg(long, required = true)]
    csv: String,
    #[arg(long)]
    json: bool,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Params(cmd) => cmd_params(cmd),
        Command::Capacity(cmd) => cmd_capacity(cmd),
        Command::Rd(cmd) => cmd_rd(cmd),
        Command::Szego(cmd) => cmd_szego(cmd),
        Command::Simulate(cmd) => cmd_simulate(cmd),
        Command::Grid(cmd) => cmd_grid(cmd),
    };
    if let Err(err) = outcome {
        eprintln!("{err}");
        let code = match err {
            Error::Accuracy(_) => 3,
            Error::Domain(_) | Error::Usage(_) => 2,
        };
        std::process::exit(code);
    }
}

fn emit(manifest: &RunManifest, json: bool) -> Result<(), Error> {
    if json {
        manifest
            .print_json()
            .map_err(|e| Error::usage(format!("cannot write stdout: {e}")))
    } else {
        manifest.print_text();
        Ok(())
    }
}

fn cmd_params(cmd: ParamsCmd) -> Result<(), Error> {
    let params = cmd.bundle.resolve()?;
    let mut manifest = RunManifest::new("params");
    cmd.bundle.record(&params, &mut manifest);
    manifest
        .output("alpha", params.alpha())
        .output("beta", params.beta())
        .output("gamma", params.gamma())
        .output("delta", params.delta())
        .output("rho", params.rho())
        .output("ab", params.dof());
    emit(&manifest, cmd.json)
}

fn cmd_capacity(cmd: CapacityCmd) -> Result<(), Error> {
    let params = cmd.bundle.resolve()?;
    let tail_abs = cmd.tail_eps * exact_power_trace(&params, 1);
    let scale = cmd.units.factor();
    let mut manifest = RunManifest::new("capacity");
    cmd.bundle.record(&params, &mut manifest);
    manifest
        .input("S", cmd.s_budget)
        .input("theta2", cmd.theta2)
        .input("units", cmd.units.name())
        .input("tail_eps", cmd.tail_eps);

    let mut c_exact = None;
    if cmd.method != MethodArg::Tf {
        let sol = capacity_waterfill(&params, cmd.s_budget, cmd.theta2, tail_abs)?;
        manifest
            .output("c_exact", sol.value / scale)
            .output("water_level", sol.level)
            .output("active_count", sol.active_count)
            .output("budget_check", sol.budget_check);
        c_exact = Some(sol.value / scale);
    }
    let mut c_tf = None;
    if cmd.method != MethodArg::Exact {
        let (nu, cap, power) = if cmd.s_budget == 0.0 {
            let floor = cmd.theta2 * params.delta().cosh() / (2.0 * std::f64::consts::PI);
            (floor, 0.0, 0.0)
        } else {
            let nu = solve_nu(&params, cmd.theta2, cmd.s_budget)?;
            (
                nu,
                capacity_integral(&params, cmd.theta2, nu).value,
                power_integral(&params, cmd.theta2, nu).value,
            )
        };
        manifest
            .output("nu", nu)
            .output("c_tf", cap / scale)
            .output("s_tf", power);
        c_tf = Some(cap / scale);
    }
    if let (Some(exact), Some(tf)) = (c_exact, c_tf) {
        manifest
            .output("gap", exact - tf)
            .output("normalized_gap", (exact - tf) / params.dof());
    }
    emit(&manifest, cmd.json)
}

fn cmd_rd(cmd: RdCmd) -> Result<(), Error> {
    let params = cmd.bundle.resolve()?;
    let tail_abs = cmd.tail_eps * exact_power_trace(&params, 1);
    let scale = cmd.units.factor();
    let mut manifest = RunManifest::new("rd");
    cmd.bundle.record(&params, &mut manifest);
    manifest
        .input("D", cmd.distortion)
        .input("sigma2", cmd.sigma2)
        .input("units", cmd.units.name())
        .input("tail_eps", cmd.tail_eps);
    manifest.output("source_energy", source_energy(&params, cmd.sigma2));

    let mut r_exact = None;
    if cmd.method != MethodArg::Tf {
        let sol = rd_reverse_waterfill(&params, cmd.distortion, cmd.sigma2, tail_abs)?;
        manifest
            .output("r_exact", sol.value / scale)
            .output("water_table", sol.level)
            .output("active_count", sol.active_count)
            .output("budget_check", sol.budget_check);
        r_exact = Some(sol.value / scale);
    }
    let mut r_tf = None;
    if cmd.method != MethodArg::Exact {
        let lambda = solve_lambda(&params, cmd.sigma2, cmd.distortion)?;
        let rate = rate_integral(&params, cmd.sigma2, lambda).value;
        manifest.output("lambda", lambda).output("r_tf", rate / scale);
        r_tf = Some(rate / scale);
    }
    if let (Some(exact), Some(tf)) = (r_exact, r_tf) {
        manifest
            .output("gap", exact - tf)
            .output("normalized_gap", (exact - tf) / params.dof());
    }
    emit(&manifest, cmd.json)
}

fn cmd_szego(cmd: SzegoCmd) -> Result<(), Error> {
    let spec = match cmd.kind {
        TestFnArg::PowerN => TestFunctionSpec::power(cmd.n, cmd.a, cmd.b)?,
        TestFnArg::LogPlus => TestFunctionSpec::log_plus(cmd.a, cmd.b)?,
        TestFnArg::MinOne => TestFunctionSpec::min_one(cmd.a, cmd.b)?,
        TestFnArg::PowerAlloc => TestFunctionSpec::power_alloc(cmd.a, cmd.b)?,
    };
    let reports = szego_sweep(&spec, &cmd.ab_list, cmd.aspect)?;

    let mut manifest = RunManifest::new("szego");
    manifest
        .input("g", format!("{:?}", spec.kind))
        .input("n", cmd.n)
        .input("a", cmd.a)
        .input("b", cmd.b)
        .input("aspect", cmd.aspect)
        .input(
            "ab_list",
            serde_json::Value::Array(cmd.ab_list.iter().map(|&v| v.into()).collect()),
        );
    manifest.output(
        "reports",
        serde_json::to_value(&reports).map_err(|e| Error::usage(e.to_string()))?,
    );

    if let Some(path) = &cmd.csv {
        let rows: Vec<Vec<f64>> = reports
            .iter()
            .map(|r| {
                vec![
                    r.ab,
                    r.sum_value,
                    r.integral_value,
                    r.gap,
                    r.normalized_gap,
                    r.sum_tail_bound,
                ]
            })
            .collect();
        write_csv(
            path,
            &["ab", "sum_value", "integral_value", "gap", "normalized_gap", "sum_tail_bound"],
            &rows,
        )
        .map_err(|e| Error::usage(format!("cannot write {path}: {e}")))?;
        manifest.output("csv", path.as_str()).output("csv_schema", "szego.v1");
    }
    emit(&manifest, cmd.json)
}

fn cmd_simulate(cmd: SimulateCmd) -> Result<(), Error> {
    let params = cmd.bundle.resolve()?;
    let mut manifest = RunManifest::new("simulate");
    cmd.bundle.record(&params, &mut manifest);
    let kind_name = match cmd.kind {
        SimKindArg::Noise => "noise",
        SimKindArg::Source => "source",
        SimKindArg::Wvs => "wvs",
    };
    manifest
        .input("kind", kind_name)
        .input("psd", cmd.psd)
        .input("seed", cmd.seed)
        .input("trials", cmd.trials);

    match cmd.kind {
        SimKindArg::Noise => {
            let max_mode = cmd.max_mode.unwrap_or(5);
            manifest.input("max_mode", max_mode);
            let cfg = SimConfig::new(params, cmd.psd, cmd.trials, cmd.seed, max_mode)?;
            let matched = simulate_matched_filter_noise(&cfg)?;
            let effective = simulate_effective_noise(&cfg)?;

            let mut max_z: f64 = 0.0;
            for j in 0..=max_mode {
                for k in (j + 1)..=max_mode {
                    if matched.stderr[j][k] > 0.0 {
                        max_z = max_z.max(matched.covariance[j][k].abs() / matched.stderr[j][k]);
                    }
                }
            }
            manifest.output("max_offdiag_abs_z", max_z);
            manifest.output("var_law_slope", fit_slope(&effective));
            manifest.output("var_law_slope_expected", 2.0 * params.delta());

            if let Some(path) = &cmd.csv {
                let mut rows = Vec::new();
                for j in 0..=max_mode {
                    for k in 0..=max_mode {
                        let expected = if j == k { cmd.psd } else { 0.0 };
                        rows.push(vec![
                            j as f64,
                            k as f64,
                            matched.covariance[j][k],
                            matched.stderr[j][k],
                            expected,
                        ]);
                    }
                }
                write_csv(path, &["mode_j", "mode_k", "covariance", "stderr", "expected"], &rows)
                    .map_err(|e| Error::usage(format!("cannot write {path}: {e}")))?;
                manifest.output("csv", path.as_str()).output("csv_schema", "simulate-noise.v1");
            }
        }
        SimKindArg::Source => {
            let max_mode = cmd.max_mode.unwrap_or(8);
            manifest.input("max_mode", max_mode);
            let cfg = SimConfig::new(params, cmd.psd, cmd.trials, cmd.seed, max_mode)?;
            let sim = simulate_kl_source(&cfg)?;
            let truncated: f64 = (0..=max_mode).map(|k| cmd.psd * params.eigenvalue(k)).sum();
            manifest
                .output("empirical_energy", sim.empirical_energy)
                .output("truncated_energy", truncated)
                .output("source_energy", source_energy(&params, cmd.psd));
            if let Some(path) = &cmd.csv {
                let rows: Vec<Vec<f64>> = sim
                    .realizations
                    .iter()
                    .enumerate()
                    .map(|(trial, x)| {
                        let sq: Vec<f64> = x.iter().map(|v| v * v).collect();
                        vec![trial as f64, cfg.grid.trapezoid(&sq)]
                    })
                    .collect();
                write_csv(path, &["trial", "energy"], &rows)
                    .map_err(|e| Error::usage(format!("cannot write {path}: {e}")))?;
                manifest.output("csv", path.as_str()).output("csv_schema", "simulate-source.v1");
            }
        }
        SimKindArg::Wvs => {
            let max_mode = cmd.max_mode.unwrap_or(40);
            manifest.input("max_mode", max_mode);
            let mut rows = Vec::new();
            let mut sup_err: f64 = 0.0;
            let mut sup_residual: f64 = 0.0;
            for i in 0..5 {
                let t = params.alpha() * (-1.0 + 0.5 * i as f64);
                for j in 0..5 {
                    let w = params.beta() * (-1.0 + 0.5 * j as f64);
                    let (est, residual) = estimate_wvs_parts(&params, cmd.psd, t, w, max_mode)?;
                    let closed = wvs(&params, cmd.psd, t, w);
                    sup_err = sup_err.max((est - closed).abs());
                    sup_residual = sup_residual.max(residual.abs());
                    rows.push(vec![t, w, est, closed, (est - closed).abs()]);
                }
            }
            manifest
                .output("sup_abs_error", sup_err)
                .output("sup_imag_residual", sup_residual);
            if let Some(path) = &cmd.csv {
                write_csv(path, &["t", "omega", "estimate", "closed_form", "abs_error"], &rows)
                    .map_err(|e| Error::usage(format!("cannot write {path}: {e}")))?;
                manifest.output("csv", path.as_str()).output("csv_schema", "simulate-wvs.v1");
            }
        }
    }
    emit(&manifest, cmd.json)
}

/// Least-squares slope of `ln Var(z_k)` against `k`.
fn fit_slope(moments: &heatchan_core::EmpiricalMoments) -> f64 {
    let logs: Vec<f64> = moments
        .covariance
        .iter()
        .enumerate()
        .map(|(k, row)| row[k].ln())
        .collect();
    let m = logs.len() as f64;
    let k_mean = (m - 1.0) / 2.0;
    let v_mean = logs.iter().sum::<f64>() / m;
    let num: f64 = logs
        .iter()
        .enumerate()
        .map(|(k, v)| (k as f64 - k_mean) * (v - v_mean))
        .sum();
    let den: f64 = (0..logs.len()).map(|k| (k as f64 - k_mean).powi(2)).sum();
    num / den
}

fn cmd_grid(cmd: GridCmd) -> Result<(), Error> {
    let sane = cmd.step > 0.0 && cmd.extent >= cmd.step && cmd.extent.is_finite();
    if !sane {
        return Err(Error::usage(format!(
            "need step > 0 and extent >= step, got extent {} step {}",
            cmd.extent, cmd.step
        )));
    }
    let params = cmd.bundle.resolve()?;
    let kind = match cmd.surface {
        SurfaceArg::N => SurfaceKind::NoiseProfile,
        SurfaceArg::Phi => SurfaceKind::Wvs,
        SurfaceArg::Weyl => SurfaceKind::WeylSymbol,
    };
    let surface = TfSurface::new(kind, params, cmd.scale)?;

    let n = (2.0 * cmd.extent / cmd.step).floor() as usize + 1;
    let start = -cmd.step * ((n - 1) as f64) / 2.0;
    let mut rows = Vec::with_capacity(n * n);
    let mut riemann = 0.0;
    for i in 0..n {
        let t = start + cmd.step * i as f64;
        for j in 0..n {
            let w = start + cmd.step * j as f64;
            let value = surface.eval(t, w);
            riemann += value;
            rows.push(vec![t, w, value]);
        }
    }
    riemann *= cmd.step * cmd.step;
    write_csv(&cmd.csv, &["t", "omega", "value"], &rows)
        .map_err(|e| Error::usage(format!("cannot write {}: {e}", cmd.csv)))?;

    let mut manifest = RunManifest::new("grid");
    cmd.bundle.record(&params, &mut manifest);
    manifest
        .input("surface", format!("{kind:?}"))
        .input("scale", cmd.scale)
        .input("extent", cmd.extent)
        .input("step", cmd.step);
    manifest
        .output("center_value", surface.eval(0.0, 0.0))
        .output("riemann_sum", riemann)
        .output("rows", n * n)
        .output("csv", cmd.csv.as_str())
        .output("csv_schema", "grid.v1");
    emit(&manifest, cmd.json)
}
