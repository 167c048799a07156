use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use frontlab::critical::{cbar, kstar, CriticalError, DEFAULT_TOL};
use frontlab::explicit::{list_cases, verify_table};
use frontlab::model::{p2_eigen, validate_params, ModelError, ModelParams};
use frontlab::pde::{
    shape_error, simulate, IcKind, PdeError, SimOptions, TailParams,
};
use frontlab::phaseplane::{reconstruct_profile, shoot, PhaseError, ShootOptions};
use frontlab::selfmap::{kstar_invariance, map_params, SelfMapError, TransformedCoeffs};
use frontlab::suite::Suite;

#[derive(Parser)]
#[command(name = "frontlab", version, about = "Traveling fronts of u_t = u_xx + k(u^n)_x + u^p - u^q")]
#[command(args_override_self = true)]
struct Cli {
    /// JSON object of flag values; explicit flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run the reference checks and print one line per criterion.
    #[arg(long, global = true)]
    paper_suite: bool,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Clone, Copy)]
struct Params {
    #[arg(long)]
    n: f64,
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
    #[arg(long)]
    k: f64,
}

impl Params {
    fn model(self) -> Result<ModelParams, CliError> {
        Ok(validate_params(self.n, self.p, self.q, self.k)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Ic {
    Heaviside,
    AntiHeaviside,
    TailGeneral,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and type of P2 at velocity c.
    Eigen {
        #[command(flatten)]
        params: Params,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
    },
    /// Shoot from P1 at velocity c and classify the outcome.
    Classify {
        #[command(flatten)]
        params: Params,
        #[arg(long, allow_hyphen_values = true)]
        c: f64,
        #[arg(long, default_value_t = 1e-6)]
        delta: f64,
        /// Write the trajectory as CSV `xi,X,Y`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Critical velocity.
    Cbar {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Threshold convection coefficient.
    Kstar {
        #[arg(long)]
        n: f64,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Wave profile as CSV `xi,f`; velocity defaults to the critical one.
    Profile {
        #[command(flatten)]
        params: Params,
        #[arg(long, allow_hyphen_values = true)]
        c: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Time-step the PDE and report the front.
    Simulate {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum, default_value = "heaviside")]
        ic: Ic,
        #[arg(long = "T", default_value_t = 40.0)]
        t_end: f64,
        #[arg(long = "L")]
        l: Option<f64>,
        #[arg(long, default_value_t = 0.05)]
        dx: f64,
        #[arg(long, default_value_t = 0.4)]
        safety: f64,
        #[arg(long, default_value_t = 0.1)]
        snapshot_every: f64,
        #[arg(long, default_value_t = 1.0)]
        c_minus: f64,
        #[arg(long, default_value_t = 1.0)]
        c_plus: f64,
        #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
        r_minus: f64,
        #[arg(long, default_value_t = 5.0, allow_hyphen_values = true)]
        r_plus: f64,
        /// Directory for `snapshots.csv`, `trace.csv` and `summary.json`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Residual table of the explicit catalogue.
    VerifyExplicit {
        /// Restrict to one case, e.g. CURVE0.
        #[arg(long)]
        case: Option<String>,
    },
    /// Image of a parameter set under the self-map.
    Selfmap {
        #[command(flatten)]
        params: Params,
        #[arg(long)]
        n2: f64,
        /// Also compare k* on both sides.
        #[arg(long)]
        check_kstar: bool,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
}

#[derive(Debug)]
enum CliError {
    Validation(String),
    Numerical(String),
    Io(String),
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        Self::Validation(e.to_string())
    }
}

impl From<PhaseError> for CliError {
    fn from(e: PhaseError) -> Self {
        match e {
            PhaseError::DeltaOutOfRange(_) => Self::Validation(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

impl From<CriticalError> for CliError {
    fn from(e: CriticalError) -> Self {
        match e {
            CriticalError::Model(_) | CriticalError::TolTooSmall(_) => Self::Validation(e.to_string()),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

impl From<PdeError> for CliError {
    fn from(e: PdeError) -> Self {
        match e {
            PdeError::InvalidGrid { .. } | PdeError::InvalidTailParams(_) | PdeError::CflViolated { .. } => {
                Self::Validation(e.to_string())
            }
            _ => Self::Numerical(e.to_string()),
        }
    }
}

impl From<SelfMapError> for CliError {
    fn from(e: SelfMapError) -> Self {
        match e {
            SelfMapError::TargetOutOfRange(_) | SelfMapError::Model(_) => Self::Validation(e.to_string()),
            SelfMapError::Critical(c) => c.into(),
            _ => Self::Numerical(e.to_string()),
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable output")
}

/// Print a line, ignoring a closed stdout.
fn emit(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            emit(text.trim_end());
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct Classification {
    c: f64,
    connection: frontlab::phaseplane::ConnectionClass,
    x0_crossing: Option<f64>,
    degenerate: bool,
    events: Vec<frontlab::phaseplane::Event>,
}

#[derive(Serialize)]
struct SelfMapOutput {
    source: ModelParams,
    target: ModelParams,
    coefficients: TransformedCoeffs,
    #[serde(skip_serializing_if = "Option::is_none")]
    kstar: Option<frontlab::selfmap::InvarianceReport>,
}

fn run(cmd: Command) -> Result<(), CliError> {
    match cmd {
        Command::Eigen { params, c } => {
            emit(&json(&p2_eigen(&params.model()?, c)));
        }
        Command::Classify { params, c, delta, out } => {
            let m = params.model()?;
            let t = shoot(&m, c, &ShootOptions { delta, ..Default::default() })?;
            if let Some(path) = &out {
                write_or_print(Some(path), &t.to_csv())?;
            }
            emit(&json(&Classification {
                c,
                connection: t.connection,
                x0_crossing: t.x0_crossing,
                degenerate: t.degenerate,
                events: t.events,
            }));
        }
        Command::Cbar { params, tol } => {
            emit(&json(&cbar(&params.model()?, tol)?));
        }
        Command::Kstar { n, p, q, tol } => {
            emit(&json(&kstar(n, p, q, tol)?));
        }
        Command::Profile { params, c, out } => {
            let m = params.model()?;
            let c = match c {
                Some(c) => c,
                None => cbar(&m, DEFAULT_TOL)?.value,
            };
            let t = shoot(&m, c, &ShootOptions::default())?;
            let prof = reconstruct_profile(&t, &m, c)?;
            write_or_print(out.as_deref(), &prof.to_csv())?;
        }
        Command::Simulate {
            params,
            ic,
            t_end,
            l,
            dx,
            safety,
            snapshot_every,
            c_minus,
            c_plus,
            r_minus,
            r_plus,
            out_dir,
        } => {
            let m = params.model()?;
            let kind = match ic {
                Ic::Heaviside => IcKind::Heaviside,
                Ic::AntiHeaviside => IcKind::AntiHeaviside,
                Ic::TailGeneral => {
                    let cb = cbar(&m, DEFAULT_TOL)?.value;
                    IcKind::TailGeneral(TailParams::new(&m, cb, c_minus, c_plus, r_minus, r_plus)?)
                }
            };
            let opts = SimOptions {
                l,
                dx,
                safety,
                snapshot_every,
                keep_snapshots: out_dir.is_some(),
                ..Default::default()
            };
            let sim = simulate(&m, &kind, t_end, &opts)?;
            // Compare with the critical wave when the front spreads.
            let shape = match kind {
                IcKind::AntiHeaviside => None,
                _ => {
                    let cb = cbar(&m, DEFAULT_TOL)?.value;
                    shoot(&m, cb, &ShootOptions::default())
                        .ok()
                        .and_then(|t| reconstruct_profile(&t, &m, cb).ok())
                        .and_then(|p| shape_error(&sim.final_field, &sim.grid, &p).ok())
                }
            };
            let summary = json(&sim.summary(shape));
            if let Some(dir) = out_dir {
                fs::create_dir_all(&dir).map_err(|e| CliError::Io(e.to_string()))?;
                write_or_print(Some(&dir.join("snapshots.csv")), &sim.snapshots_csv())?;
                write_or_print(Some(&dir.join("trace.csv")), &sim.trace.to_csv())?;
                write_or_print(Some(&dir.join("summary.json")), &format!("{summary}\n"))?;
            }
            emit(&summary);
        }
        Command::VerifyExplicit { case } => {
            let mut cases = list_cases();
            if let Some(name) = case {
                cases.retain(|c| c.id.name().eq_ignore_ascii_case(&name));
                if cases.is_empty() {
                    return Err(CliError::Validation(format!("unknown case {name}")));
                }
            }
            let table = verify_table(&cases).map_err(|e| CliError::Numerical(e.to_string()))?;
            emit(table.trim_end());
        }
        Command::Selfmap { params, n2, check_kstar, tol } => {
            let m = params.model()?;
            let pair = map_params(&m, n2)?;
            let kstar = if check_kstar {
                Some(kstar_invariance((m.n, m.p, m.q), n2, tol)?)
            } else {
                None
            };
            let out = SelfMapOutput {
                source: pair.source,
                target: pair.target,
                coefficients: TransformedCoeffs::of(m.n, m.p, m.q, m.k),
                kstar,
            };
            emit(&json(&out));
        }
    }
    Ok(())
}

/// Turn a JSON config object into flag tokens placed right after the
/// subcommand, so that later command-line flags override them.
fn merge_config(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = match args[pos].strip_prefix("--config=") {
        Some(p) => p.to_string(),
        None => args
            .get(pos + 1)
            .cloned()
            .ok_or_else(|| CliError::Validation("--config needs a path".into()))?,
    };
    let text = fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    let doc: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Validation(format!("{path}: {e}")))?;
    let Value::Object(map) = doc else {
        return Err(CliError::Validation(format!("{path}: expected a JSON object")));
    };
    let mut rest: Vec<String> = args.clone();
    rest.drain(pos..pos + if args[pos].contains('=') { 1 } else { 2 });

    let mut tokens = Vec::new();
    let mut command = None;
    for (key, value) in map {
        if key == "command" {
            command = value.as_str().map(str::to_string);
            continue;
        }
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Bool(true) => tokens.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::String(s) => tokens.extend([flag, s]),
            Value::Number(n) => tokens.push(format!("{flag}={n}")),
            other => return Err(CliError::Validation(format!("{path}: unsupported value for {key}: {other}"))),
        }
    }
    let names = [
        "eigen", "classify", "cbar", "kstar", "profile", "simulate", "verify-explicit", "selfmap",
    ];
    let sub = rest.iter().position(|a| names.contains(&a.as_str()));
    let at = match (sub, command) {
        (Some(i), _) => i + 1,
        (None, Some(cmd)) => {
            rest.insert(1, cmd);
            2
        }
        (None, None) => rest.len(),
    };
    rest.splice(at..at, tokens);
    Ok(rest)
}

fn fail(e: CliError) -> ExitCode {
    match e {
        CliError::Validation(m) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        CliError::Io(m) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        CliError::Numerical(m) => {
            eprintln!("numerical failure: {m}");
            ExitCode::from(3)
        }
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("FRONTLAB_THREADS").ok().and_then(|v| v.parse().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let args = match merge_config(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => return fail(e),
    };
    let cli = Cli::parse_from(args);
    if cli.paper_suite {
        let suite = Suite::new(cli.seed);
        let mut all = true;
        for id in frontlab::suite::CRITERIA {
            let r = suite.run(id);
            all &= r.passed;
            emit(&r.to_string());
        }
        return if all { ExitCode::SUCCESS } else { ExitCode::from(3) };
    }
    let Some(cmd) = cli.command else {
        eprintln!("error: no subcommand given (see --help)");
        return ExitCode::from(2);
    };
    match run(cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
