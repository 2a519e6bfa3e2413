//! Command-line entry points.
//!
//! Every subcommand prints one JSON object on stdout. Exit status is 0 when
//! the command ran and every asserted invariant held, 1 when an invariant
//! failed or a step could not be solved, and 2 for usage or configuration
//! errors.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::config::{parse_config, serialize_config, RunConfig};
use crate::constitutive::{Indicator, ModelParams};
use crate::diagnostics::{
    check_bounds, check_energy_step, energy, energy_step, energy_tolerance, modified_mass,
    tau_refinement_study, DiagnosticError, EnergyBreakdown,
};
use crate::snapshot::write_snapshot;
use crate::stepper::{
    advance, initialize, step_cahn_hilliard, step_damage_from, step_nutrient, StepState,
};

/// Environment variable naming the default output directory.
pub const OUTPUT_ENV: &str = "TUMOURSIM_OUTPUT_DIR";

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "tumour-damage",
    version,
    about = "Phase-field tumour growth with nutrient, viscoelastic mechanics and tissue damage"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Configuration file (`key = value` lines).
    config: PathBuf,
    /// Output directory; overrides the config and the environment.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the configured simulation; writes snapshots and an energy log.
    Run(Common),
    /// Run the invariant suite and print a report.
    Verify(Common),
    /// Compare runs on a halving ladder of time steps.
    SweepTau {
        #[command(flatten)]
        common: Common,
        /// Number of halvings; gives `levels` distances.
        #[arg(long, default_value_t = 3)]
        levels: usize,
    },
    /// Energy audit with every source switched off.
    Energy(Common),
}

struct Failure {
    code: i32,
    summary: Value,
}

impl Failure {
    fn usage(command: &str, error: impl ToString) -> Self {
        Failure {
            code: EXIT_USAGE,
            summary: json!({"command": command, "status": "usage_error", "error": error.to_string()}),
        }
    }

    fn io(command: &str, path: &Path, error: impl ToString) -> Self {
        Failure {
            code: EXIT_INVARIANT,
            summary: json!({
                "command": command,
                "status": "io_error",
                "path": path.display().to_string(),
                "error": error.to_string(),
            }),
        }
    }
}

/// Runs the CLI on `args` (program name first) and returns the exit code.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let result = match &cli.command {
        Command::Run(c) => cmd_run(c),
        Command::Verify(c) => cmd_verify(c),
        Command::SweepTau { common, levels } => cmd_sweep(common, *levels),
        Command::Energy(c) => cmd_energy(c),
    };
    match result {
        Ok(report) => {
            println!("{report}");
            EXIT_OK
        }
        Err(f) => {
            println!("{}", f.summary);
            f.code
        }
    }
}

fn load(command: &str, common: &Common) -> Result<(RunConfig, PathBuf), Failure> {
    let text = fs::read_to_string(&common.config).map_err(|e| {
        Failure::usage(command, format!("{}: {e}", common.config.display()))
    })?;
    let cfg = parse_config(&text).map_err(|e| Failure::usage(command, e))?;
    let out = common
        .output
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("output"));
    fs::create_dir_all(&out).map_err(|e| Failure::io(command, &out, e))?;
    fs::write(out.join("config.txt"), serialize_config(&cfg))
        .map_err(|e| Failure::io(command, &out, e))?;
    Ok((cfg, out))
}

fn initial_state(command: &str, cfg: &RunConfig, p: &ModelParams) -> Result<StepState, Failure> {
    initialize(&cfg.preset.build(cfg.grid(), p), p).map_err(|e| Failure::usage(command, e))
}

const ENERGY_HEADER: &str = "k,t,grad_phi,well,nutrient,kinetic,damage_grad,constraint,perturb,elastic,mu_reg,total,dissipation,verdict";

fn energy_row(k: usize, t: f64, e: &EnergyBreakdown, verdict: &str) -> String {
    let mut row = format!("{k},{t:.16e}");
    for v in e.addends() {
        row.push_str(&format!(",{v:.16e}"));
    }
    row.push_str(&format!(",{:.16e},{:.16e},{verdict}", e.total, e.dissipation));
    row
}

/// What a driven run found, beyond the per-step rows it wrote.
struct DriveSummary {
    last: StepState,
    steps: usize,
    violations: Vec<Value>,
    retries: usize,
    max_z_excursion: f64,
    /// `E_K + Σ D_k − E_0 − Σ tol_k`; non-positive when the telescoped
    /// inequality holds.
    telescoped_excess: f64,
    max_mass_drift: f64,
}

/// Advances `state` for `steps` steps, checking nutrient bounds every step
/// and the energy inequality when the sources are off. Writes `energy.csv`
/// and, for `stride > 0`, snapshots every `stride` steps plus the last.
fn drive(
    command: &str,
    mut state: StepState,
    p: &ModelParams,
    steps: usize,
    out: &Path,
    stride: Option<usize>,
) -> Result<DriveSummary, Failure> {
    let log_path = out.join("energy.csv");
    let io = |e: std::io::Error| Failure::io(command, &log_path, e);
    let mut log = BufWriter::new(File::create(&log_path).map_err(io)?);
    let audit = p.sources_are_off();
    let e0 = energy(&state, p);
    writeln!(log, "{ENERGY_HEADER}").map_err(io)?;
    writeln!(log, "{}", energy_row(0, state.t, &e0, "initial")).map_err(io)?;
    let snapshot = |s: &StepState| {
        let base = out.join(format!("step_{:06}", s.k));
        write_snapshot(s, p.tau, &base).map_err(|e| Failure::io(command, &base, e))
    };
    if stride.is_some() {
        snapshot(&state)?;
    }

    let mass0 = modified_mass(&state, p.tau);
    let mut summary = DriveSummary {
        last: state.clone(),
        steps,
        violations: Vec::new(),
        retries: 0,
        max_z_excursion: 0.0,
        telescoped_excess: 0.0,
        max_mass_drift: 0.0,
    };
    let mut cumulative = -e0.total;
    for k in 1..=steps {
        let (next, report) = advance(&state, p).map_err(|e| Failure {
            code: EXIT_INVARIANT,
            summary: json!({"command": command, "status": "fail", "step": k,
                            "failures": [{"invariant": "step_solvable", "step": k, "error": e.to_string()}]}),
        })?;
        summary.retries += report.retries;
        match check_bounds(&next, p) {
            Ok(b) => summary.max_z_excursion = summary.max_z_excursion.max(b.z_excursion),
            Err(e) => {
                return Err(Failure {
                    code: EXIT_INVARIANT,
                    summary: json!({"command": command, "status": "fail", "step": k,
                                    "failures": [{"invariant": "nutrient_bounds", "step": k, "error": e.to_string()}]}),
                })
            }
        }
        let e = energy_step(&state, &next, p);
        let verdict = if audit {
            match check_energy_step(&state, &next, p) {
                Ok(_) => "pass",
                Err(DiagnosticError::Violation { step, slack }) => {
                    summary.violations.push(
                        json!({"invariant": "energy_inequality", "step": step, "slack": slack}),
                    );
                    "fail"
                }
                Err(other) => unreachable!("sources checked above: {other}"),
            }
        } else {
            "n/a"
        };
        writeln!(log, "{}", energy_row(k, next.t, &e, verdict)).map_err(io)?;
        cumulative += e.dissipation - energy_tolerance(energy(&state, p).total);
        summary.telescoped_excess = cumulative + e.total;
        summary.max_mass_drift = summary
            .max_mass_drift
            .max((modified_mass(&next, p.tau) - mass0).abs());
        if let Some(stride) = stride {
            if (stride > 0 && k % stride == 0) || k == steps {
                snapshot(&next)?;
            }
        }
        state = next;
    }
    log.flush().map_err(io)?;
    summary.last = state;
    Ok(summary)
}

fn cmd_run(common: &Common) -> Result<Value, Failure> {
    let (cfg, out) = load("run", common)?;
    let p = cfg.effective_params();
    let state = initial_state("run", &cfg, &p)?;
    let s = drive("run", state, &p, cfg.steps(), &out, Some(cfg.snapshot_stride))?;
    let status = if s.violations.is_empty() { "pass" } else { "fail" };
    let report = json!({
        "command": "run",
        "status": status,
        "steps": s.steps,
        "t_final": s.last.t,
        "output": out.display().to_string(),
        "retries": s.retries,
        "max_z_excursion": s.max_z_excursion,
        "final_energy": energy(&s.last, &p).total,
        "failures": s.violations,
    });
    if s.violations.is_empty() {
        Ok(report)
    } else {
        Err(Failure {
            code: EXIT_INVARIANT,
            summary: report,
        })
    }
}

fn cmd_energy(common: &Common) -> Result<Value, Failure> {
    let (cfg, out) = load("energy", common)?;
    let p = cfg.effective_params().sources_off();
    let state = initial_state("energy", &cfg, &p)?;
    let s = drive("energy", state, &p, cfg.steps(), &out, None)?;
    let mut failures = s.violations.clone();
    if s.telescoped_excess > 0.0 {
        failures.push(json!({"invariant": "telescoped_energy", "excess": s.telescoped_excess}));
    }
    let report = json!({
        "command": "energy",
        "status": if failures.is_empty() { "pass" } else { "fail" },
        "steps": s.steps,
        "log": out.join("energy.csv").display().to_string(),
        "telescoped_excess": s.telescoped_excess,
        "failures": failures,
    });
    if failures.is_empty() {
        Ok(report)
    } else {
        Err(Failure {
            code: EXIT_INVARIANT,
            summary: report,
        })
    }
}

fn check(name: &str, ok: bool, detail: Value) -> Value {
    json!({"name": name, "status": if ok { "pass" } else { "fail" }, "detail": detail})
}

fn cmd_verify(common: &Common) -> Result<Value, Failure> {
    let (cfg, out) = load("verify", common)?;
    let p = cfg.effective_params();
    let s0 = initial_state("verify", &cfg, &p)?;
    let mut checks = Vec::new();

    let (a, b) = (advance(&s0, &p), advance(&s0, &p));
    checks.push(check(
        "determinism",
        matches!((&a, &b), (Ok(x), Ok(y)) if x.0 == y.0),
        json!("two advances from one state agree bit for bit"),
    ));
    if let Ok((s1, _)) = &a {
        let quotient = s1.u.combine(1.0 / p.tau, &s0.u, -1.0 / p.tau);
        checks.push(check(
            "velocity_quotient",
            quotient == s1.v && s1.u_prev == s0.u,
            json!("v = (u - u_prev)/tau"),
        ));
    }

    // Two starts of the first damage minimisation.
    let uniqueness = step_nutrient(&s0, &p)
        .and_then(|(sigma, _)| step_cahn_hilliard(&s0, &sigma, &p))
        .and_then(|(phi, _, _)| {
            let flipped: Vec<f64> = s0.z.values().iter().map(|z| 1.0 - z).collect();
            let (z1, _) = step_damage_from(&s0, &phi, &p, s0.z.values())?;
            let (z2, _) = step_damage_from(&s0, &phi, &p, &flipped)?;
            Ok(z1.max_abs_diff(&z2))
        });
    checks.push(match uniqueness {
        Ok(d) => check("damage_uniqueness", d <= 1e-8, json!({"max_difference": d})),
        Err(e) => check("damage_uniqueness", false, json!(e.to_string())),
    });

    let coupled_dir = out.join("coupled");
    let audit_dir = out.join("sources_off");
    for d in [&coupled_dir, &audit_dir] {
        fs::create_dir_all(d).map_err(|e| Failure::io("verify", d, e))?;
    }
    match drive("verify", s0.clone(), &p, cfg.steps(), &coupled_dir, None) {
        Ok(s) => {
            checks.push(check(
                "nutrient_bounds",
                true,
                json!({"steps": s.steps, "max_z_excursion": s.max_z_excursion}),
            ));
            if p.indicator == Indicator::Off {
                checks.push(check(
                    "modified_mass",
                    s.max_mass_drift <= 1e-10,
                    json!({"max_drift": s.max_mass_drift}),
                ));
            }
        }
        Err(f) => checks.push(check("nutrient_bounds", false, f.summary)),
    }

    let off = p.sources_off();
    let s_off = initial_state("verify", &cfg, &off)?;
    match drive("verify", s_off, &off, cfg.steps(), &audit_dir, None) {
        Ok(s) => {
            checks.push(check(
                "energy_inequality",
                s.violations.is_empty(),
                json!({"steps": s.steps, "violations": s.violations}),
            ));
            checks.push(check(
                "telescoped_energy",
                s.telescoped_excess <= 0.0,
                json!({"excess": s.telescoped_excess}),
            ));
            checks.push(check(
                "modified_mass",
                s.max_mass_drift <= 1e-10,
                json!({"max_drift": s.max_mass_drift, "run": "sources_off"}),
            ));
        }
        Err(f) => checks.push(check("energy_inequality", false, f.summary)),
    }

    let passed = checks.iter().all(|c| c["status"] == "pass");
    let report = json!({
        "command": "verify",
        "status": if passed { "pass" } else { "fail" },
        "invariants": checks,
    });
    let path = out.join("verify.json");
    fs::write(&path, format!("{report:#}\n")).map_err(|e| Failure::io("verify", &path, e))?;
    if passed {
        Ok(report)
    } else {
        Err(Failure {
            code: EXIT_INVARIANT,
            summary: report,
        })
    }
}

fn cmd_sweep(common: &Common, levels: usize) -> Result<Value, Failure> {
    if levels == 0 {
        return Err(Failure::usage("sweep-tau", "--levels must be at least 1"));
    }
    let (cfg, out) = load("sweep-tau", common)?;
    let p = cfg.effective_params();
    let data = cfg.preset.build(cfg.grid(), &p);
    let taus: Vec<f64> = (0..=levels).map(|i| p.tau * 0.5f64.powi(i as i32)).collect();
    let table = tau_refinement_study(&data, &p, &taus, cfg.t_final, cfg.study_field).map_err(|e| {
        Failure {
            code: match e {
                DiagnosticError::BadLadder(_) => EXIT_USAGE,
                _ => EXIT_INVARIANT,
            },
            summary: json!({"command": "sweep-tau", "status": "fail", "error": e.to_string()}),
        }
    })?;
    let path = out.join("sweep.csv");
    let mut csv = String::from("pair,tau_coarse,tau_fine,distance,ratio\n");
    for (i, d) in table.distances.iter().enumerate() {
        let ratio = table
            .ratios
            .get(i)
            .map(|r| format!("{r:.16e}"))
            .unwrap_or_default();
        csv.push_str(&format!(
            "{i},{:.16e},{:.16e},{d:.16e},{ratio}\n",
            taus[i],
            taus[i + 1]
        ));
    }
    fs::write(&path, csv).map_err(|e| Failure::io("sweep-tau", &path, e))?;
    Ok(json!({
        "command": "sweep-tau",
        "status": "pass",
        "field": cfg.study_field.name(),
        "taus": table.taus,
        "distances": table.distances,
        "ratios": table.ratios,
        "strictly_decreasing": table.distances.windows(2).all(|w| w[1] < w[0]),
        "csv": path.display().to_string(),
    }))
}
