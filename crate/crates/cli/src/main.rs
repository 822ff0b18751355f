//! `boa-dd`: construct, verify, and numerically validate bounded-strength
//! dynamical-decoupling schedules built from linear codes and balanced
//! Cayley-graph cycles.
//!
//! Exit codes: 0 success, 1 verification failure, 2 usage/parameter error,
//! 3 enumeration or dimension budget exceeded.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use boa_dd::boa::{build_boa, pad_rows, verify_boa, verify_oa, BoaArray};
use boa_dd::builtin::{
    example_code_16_9_2, example_code_5_2_4, example_code_7_3_2, example_cycle_z2_3,
};
use boa_dd::cayley::{eulerian_cycle, standard_generators};
use boa_dd::codes::{bch_ext_code, hamming_dual_code, LinearCode};
use boa_dd::pauli::{build_representation, RepMode, RepSpec};
use boa_dd::schedule::{schedule_from_boa, ControlSchedule};
use boa_dd::sim::{decoupling_residual, random_local_hamiltonian, AverageMode};
use boa_dd::Error;

const EXIT_VERIFY_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

/// Failure carrying its CLI exit code.
struct Fail {
    code: u8,
    message: String,
}

impl Fail {
    fn usage(message: impl Into<String>) -> Fail {
        Fail {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Fail {
    fn from(e: Error) -> Fail {
        let code = match e {
            Error::BudgetExceeded(_) | Error::SizeLimit(_) => EXIT_BUDGET,
            _ => EXIT_USAGE,
        };
        Fail {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult = Result<u8, Fail>;

/// Println that tolerates a closed stdout (e.g. piping into `head`): write
/// errors end the output stream instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => {{
        use std::io::Write;
        let _ = writeln!(std::io::stdout(), $($arg)*);
    }};
}

#[derive(Parser)]
#[command(
    name = "boa-dd",
    version,
    about = "Bounded-strength dynamical decoupling from balanced-cycle orthogonal arrays",
    after_help = "Exit codes: 0 success, 1 verification failure, 2 usage error, 3 budget exceeded.\n\
                  BOA_THREADS caps worker threads (default: machine cores)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct an array and its control schedule from a code family.
    Build(BuildArgs),
    /// Check an array file: orthogonal-array counts and balanced cycles.
    Verify(VerifyArgs),
    /// Derive a control schedule from an existing array file.
    Schedule(ScheduleArgs),
    /// Average a seeded random local Hamiltonian over a schedule and report
    /// the decoupling residual.
    Simulate(SimulateArgs),
    /// Print the cycle-length table N = q^k·2ke and constructive n-ranges.
    Table(TableArgs),
    /// Inspect linear codes.
    Codes(CodesArgs),
}

/// Shared by every subcommand: an optional JSON config file whose top-level
/// object supplies defaults for the long options (explicit flags win; boolean
/// flags are OR-ed with their config values).
#[derive(Args)]
struct ConfigOpt {
    /// JSON file of defaults, keyed by long option name.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

struct Config(serde_json::Map<String, Value>);

impl ConfigOpt {
    fn load(&self) -> Result<Config, Fail> {
        let Some(path) = &self.config else {
            return Ok(Config(serde_json::Map::new()));
        };
        let text = fs::read_to_string(path)
            .map_err(|e| Fail::usage(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str::<Value>(&text) {
            Ok(Value::Object(map)) => Ok(Config(map)),
            Ok(_) => Err(Fail::usage("config file must hold a JSON object")),
            Err(e) => Err(Fail::usage(format!("config file is not valid JSON: {e}"))),
        }
    }
}

impl Config {
    fn string(&self, key: &str, flag: Option<String>) -> Result<Option<String>, Fail> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.clone())),
            Some(other) => Err(Fail::usage(format!(
                "config key {key:?} must be a string, found {other}"
            ))),
        }
    }

    fn path(&self, key: &str, flag: Option<PathBuf>) -> Result<Option<PathBuf>, Fail> {
        Ok(self
            .string(key, flag.map(|p| p.display().to_string()))?
            .map(PathBuf::from))
    }

    fn u64(&self, key: &str, flag: Option<u64>) -> Result<Option<u64>, Fail> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v.as_u64().map(Some).ok_or_else(|| {
                Fail::usage(format!(
                    "config key {key:?} must be a nonnegative integer, found {v}"
                ))
            }),
        }
    }

    fn f64(&self, key: &str, flag: Option<f64>) -> Result<Option<f64>, Fail> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.0.get(key) {
            None => Ok(None),
            Some(v) => v.as_f64().map(Some).ok_or_else(|| {
                Fail::usage(format!("config key {key:?} must be a number, found {v}"))
            }),
        }
    }

    fn flag(&self, key: &str, flag: bool) -> Result<bool, Fail> {
        if flag {
            return Ok(true);
        }
        match self.0.get(key) {
            None => Ok(false),
            Some(Value::Bool(b)) => Ok(*b),
            Some(other) => Err(Fail::usage(format!(
                "config key {key:?} must be a boolean, found {other}"
            ))),
        }
    }
}

// ---------------------------------------------------------------------------
// build
// ---------------------------------------------------------------------------

#[derive(Args)]
struct BuildArgs {
    /// Code family: hamming, bch, example1, example2, example3, or user.
    #[arg(long)]
    family: Option<String>,
    /// Physical qudit dimension d (default: inferred from q).
    #[arg(long)]
    d: Option<u64>,
    /// Alphabet size q; must be d (x_only mode) or d² (weyl mode).
    #[arg(long)]
    q: Option<u64>,
    /// Number of qudits n (array rows); extra code rows are dropped.
    #[arg(long)]
    n: Option<u64>,
    /// Extension degree m for the bch family (code length q^m).
    #[arg(long)]
    m: Option<u64>,
    /// Designed distance D for the bch family.
    #[arg(long)]
    designed: Option<u64>,
    /// Locality ℓ the scheme must decouple (checked against the strength).
    #[arg(long)]
    locality: Option<u64>,
    /// Diagonal-Hamiltonian mode: shift-only representation with q = d.
    #[arg(long)]
    diagonal: bool,
    /// Generator matrix file for --family user (format of `codes describe`).
    #[arg(long, value_name = "FILE")]
    code_file: Option<PathBuf>,
    /// Slot duration Δ (default 1.0).
    #[arg(long)]
    delta: Option<f64>,
    /// Append the time-reversed mirror (palindromic schedule).
    #[arg(long)]
    symmetrize: bool,
    /// Output path for the array file (default boa.txt).
    #[arg(long, value_name = "FILE")]
    boa_out: Option<PathBuf>,
    /// Output path for the schedule JSON (default schedule.json).
    #[arg(long, value_name = "FILE")]
    schedule_out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigOpt,
}

/// Pick (d, mode) consistent with q: an explicit d must satisfy q = d or
/// q = d²; otherwise a perfect square q means the weyl mode on d = √q and a
/// non-square q means the shift-only mode on d = q.
fn resolve_rep(d: Option<u64>, q: u64, diagonal: bool) -> Result<RepSpec, Fail> {
    let spec = match d {
        Some(d) if d >= 2 && d == q => RepSpec {
            d: d as u32,
            mode: RepMode::XOnly,
        },
        Some(d) if d >= 2 && d * d == q => RepSpec {
            d: d as u32,
            mode: if diagonal { RepMode::XOnly } else { RepMode::Weyl },
        },
        Some(d) => {
            return Err(Fail::usage(format!(
                "q = {q} is neither d = {d} nor d² = {}",
                d * d
            )))
        }
        None => {
            let s = (q as f64).sqrt().round() as u64;
            if s >= 2 && s * s == q && !diagonal {
                RepSpec {
                    d: s as u32,
                    mode: RepMode::Weyl,
                }
            } else {
                RepSpec {
                    d: q as u32,
                    mode: RepMode::XOnly,
                }
            }
        }
    };
    if spec.mode == RepMode::XOnly && spec.d as u64 != q {
        return Err(Fail::usage(format!(
            "shift-only mode needs q = d, got q = {q}, d = {}",
            spec.d
        )));
    }
    Ok(spec)
}

/// Smallest admissible dual-Hamming length (q^r − 1)/(q − 1) ≥ n, r ≥ 2.
fn hamming_boundary(q: u64, n: u64) -> Option<u64> {
    let mut r = 2u32;
    loop {
        let len = (q.checked_pow(r)? - 1) / (q - 1);
        if len >= n {
            return Some(len);
        }
        r += 1;
    }
}

fn cmd_build(args: BuildArgs) -> CliResult {
    let cfg = args.config.load()?;
    let family = cfg
        .string("family", args.family)?
        .ok_or_else(|| Fail::usage("--family is required (see --help for the list)"))?;
    let d = cfg.u64("d", args.d)?;
    let q = cfg.u64("q", args.q)?;
    let n = cfg.u64("n", args.n)?;
    let m = cfg.u64("m", args.m)?;
    let designed = cfg.u64("designed", args.designed)?;
    let locality = cfg.u64("locality", args.locality)?;
    let diagonal = cfg.flag("diagonal", args.diagonal)?;
    let code_file = cfg.path("code-file", args.code_file)?;
    let delta = cfg.f64("delta", args.delta)?.unwrap_or(1.0);
    let symmetrize = cfg.flag("symmetrize", args.symmetrize)?;
    let boa_out = cfg
        .path("boa-out", args.boa_out)?
        .unwrap_or_else(|| PathBuf::from("boa.txt"));
    let schedule_out = cfg
        .path("schedule-out", args.schedule_out)?
        .unwrap_or_else(|| PathBuf::from("schedule.json"));

    // The fixed reference fixtures pin their own alphabet; reject
    // contradictory overrides instead of silently ignoring them.
    let check_pinned = |name: &str, pinned_q: u64| -> Result<(), Fail> {
        if let Some(qv) = q {
            if qv != pinned_q {
                return Err(Fail::usage(format!(
                    "family {name} is defined over GF({pinned_q}); --q {qv} contradicts it"
                )));
            }
        }
        Ok(())
    };

    let (code, cycle, diagonal) = match family.as_str() {
        "example1" => {
            check_pinned("example1", 2)?;
            (example_code_7_3_2(), example_cycle_z2_3(), true)
        }
        "example2" => {
            check_pinned("example2", 4)?;
            let code = example_code_5_2_4();
            let set = standard_generators(4, code.k())?;
            (code.clone(), eulerian_cycle(4, code.k(), &set)?, diagonal)
        }
        "example3" | "bch" => {
            let qv = q.unwrap_or(2);
            let (mv, dv) = if family == "example3" {
                check_pinned("example3", 2)?;
                (4, 6)
            } else {
                (
                    m.ok_or_else(|| Fail::usage("--m is required for --family bch"))?,
                    designed
                        .ok_or_else(|| Fail::usage("--designed is required for --family bch"))?,
                )
            };
            let ext = bch_ext_code(qv, mv as u32, dv as usize)?;
            let code = ext.code.dual_code()?;
            let set = standard_generators(qv, code.k())?;
            let cycle = eulerian_cycle(qv, code.k(), &set)?;
            (code, cycle, diagonal || qv == 2)
        }
        "hamming" => {
            let dv = d.unwrap_or(2);
            let qv = q.unwrap_or(if diagonal { dv } else { dv * dv });
            let nv = n.ok_or_else(|| Fail::usage("--n is required for --family hamming"))?;
            if nv < 2 {
                return Err(Fail::usage("--n must be at least 2"));
            }
            if let Some(l) = locality {
                if l > 2 {
                    return Err(Fail::usage(format!(
                        "the dual-Hamming family has strength exactly 2 and cannot decouple \
                         locality {l}; use --family bch with a larger designed distance, or \
                         embed the qudits into a larger system and pad"
                    )));
                }
            }
            let boundary = hamming_boundary(qv, nv)
                .ok_or_else(|| Fail::usage(format!("no Hamming length ≥ {nv} fits in u64")))?;
            let code = hamming_dual_code(qv, boundary as usize)?;
            let set = standard_generators(qv, code.k())?;
            (code.clone(), eulerian_cycle(qv, code.k(), &set)?, diagonal)
        }
        "user" => {
            let path = code_file
                .ok_or_else(|| Fail::usage("--code-file is required for --family user"))?;
            let text = fs::read_to_string(&path)
                .map_err(|e| Fail::usage(format!("cannot read {}: {e}", path.display())))?;
            let code = LinearCode::from_text(&text)?;
            let qv = code.q() as u64;
            if let Some(want) = q {
                if want != qv {
                    return Err(Fail::usage(format!(
                        "code file is over GF({qv}), --q says {want}"
                    )));
                }
            }
            let set = standard_generators(qv, code.k())?;
            (code.clone(), eulerian_cycle(qv, code.k(), &set)?, diagonal)
        }
        other => {
            return Err(Fail::usage(format!(
                "unknown family {other:?}; expected hamming, bch, example1, example2, \
                 example3, or user"
            )))
        }
    };

    let mut arr = build_boa(&code, &cycle)?;
    if let Some(nv) = n {
        if (nv as usize) < arr.n() {
            arr = pad_rows(&arr, nv as usize)?;
        } else if nv as usize > arr.n() {
            return Err(Fail::usage(format!(
                "requested n = {nv} exceeds the {} rows this construction provides; \
                 no constructive code is available — choose parameters reaching at \
                 least n (a scheme for more qudits restricts to fewer)",
                arr.n()
            )));
        }
    }
    if let Some(l) = locality {
        if (l as usize) > arr.strength() {
            return Err(Fail::usage(format!(
                "array strength {} cannot decouple locality {l}",
                arr.strength()
            )));
        }
    }

    let qv = code.q() as u64;
    let spec = resolve_rep(d, qv, diagonal)?;
    let mut sched = schedule_from_boa(&arr, spec, delta)?;
    if symmetrize {
        sched = sched.symmetrize()?;
    }

    fs::write(&boa_out, arr.to_text()).map_err(Error::from)?;
    fs::write(&schedule_out, sched.to_json()).map_err(Error::from)?;

    let gens = cycle.len() / (qv.pow(code.k() as u32) as usize);
    out!(
        "code: {} [{},{}]_{}",
        code.label(),
        code.n(),
        code.k(),
        code.q()
    );
    out!(
        "array: {} rows × {} columns over GF({}), strength {}, λ = {}",
        arr.n(),
        arr.cols(),
        arr.q(),
        arr.strength(),
        arr.lambda()
    );
    out!(
        "identity: N = q^k·|S| = {}^{}·{} = {}",
        qv,
        code.k(),
        gens,
        cycle.len()
    );
    out!(
        "schedule: {} slots, Δ = {}, rep (d = {}, {}){}",
        sched.slots(),
        sched.delta(),
        spec.d,
        spec.mode,
        if symmetrize { ", symmetrized" } else { "" }
    );
    out!("array → {}", boa_out.display());
    out!("schedule → {}", schedule_out.display());
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

#[derive(Args)]
struct VerifyArgs {
    /// Array file to check.
    #[arg(long, value_name = "FILE")]
    boa: Option<PathBuf>,
    /// Strength ℓ to verify at (default: the file's claimed strength).
    #[arg(long)]
    strength: Option<u64>,
    /// Run only the orthogonal-array tuple count, not the cycle balance.
    #[arg(long)]
    oa_only: bool,
    #[command(flatten)]
    config: ConfigOpt,
}

fn cmd_verify(args: VerifyArgs) -> CliResult {
    let cfg = args.config.load()?;
    let path = cfg
        .path("boa", args.boa)?
        .ok_or_else(|| Fail::usage("--boa FILE is required"))?;
    let oa_only = cfg.flag("oa-only", args.oa_only)?;
    let text = fs::read_to_string(&path)
        .map_err(|e| Fail::usage(format!("cannot read {}: {e}", path.display())))?;
    let arr = BoaArray::from_text(&text)?;
    let ell = cfg.u64("strength", args.strength)?.unwrap_or_else(|| {
        arr.strength().max(1) as u64
    }) as usize;

    out!(
        "array: {} rows × {} columns over GF({}), claimed strength {}",
        arr.n(),
        arr.cols(),
        arr.q(),
        arr.strength()
    );
    if oa_only {
        let (ok, lambda) = verify_oa(&arr, ell)?;
        match lambda {
            Some(l) => out!(
                "OA check at ℓ = {ell}: {} (λ = {l})",
                if ok { "pass" } else { "FAIL" }
            ),
            None => out!("OA check at ℓ = {ell}: FAIL (tuple counts differ)"),
        }
        return Ok(if ok { 0 } else { EXIT_VERIFY_FAIL });
    }

    let report = verify_boa(&arr, ell)?;
    match report.lambda {
        Some(l) => out!(
            "OA check at ℓ = {ell}: {} (λ = {l})",
            if report.oa_ok { "pass" } else { "FAIL" }
        ),
        None => out!("OA check at ℓ = {ell}: FAIL (tuple counts differ)"),
    }
    out!(
        "balanced cycles: {}/{} row subsets pass",
        report.per_subset.len() - report.failures.len(),
        report.per_subset.len()
    );
    for f in &report.failures {
        out!("  FAIL {f}");
    }
    out!(
        "verdict: {}",
        if report.boa_ok && report.oa_ok {
            "pass"
        } else {
            "FAIL"
        }
    );
    Ok(if report.boa_ok && report.oa_ok {
        0
    } else {
        EXIT_VERIFY_FAIL
    })
}

// ---------------------------------------------------------------------------
// schedule
// ---------------------------------------------------------------------------

#[derive(Args)]
struct ScheduleArgs {
    /// Array file to derive the schedule from.
    #[arg(long, value_name = "FILE")]
    boa: Option<PathBuf>,
    /// Representation mode: weyl or x_only (default: inferred from q).
    #[arg(long)]
    rep: Option<String>,
    /// Physical qudit dimension d (default: inferred from q).
    #[arg(long)]
    d: Option<u64>,
    /// Slot duration Δ (default 1.0).
    #[arg(long)]
    delta: Option<f64>,
    /// Append the time-reversed mirror (palindromic schedule).
    #[arg(long)]
    symmetrize: bool,
    /// Output format: json (full schedule) or csv (transition rows).
    #[arg(long)]
    format: Option<String>,
    /// Output path (default schedule.json / schedule.csv).
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigOpt,
}

fn cmd_schedule(args: ScheduleArgs) -> CliResult {
    let cfg = args.config.load()?;
    let path = cfg
        .path("boa", args.boa)?
        .ok_or_else(|| Fail::usage("--boa FILE is required"))?;
    let text = fs::read_to_string(&path)
        .map_err(|e| Fail::usage(format!("cannot read {}: {e}", path.display())))?;
    let arr = BoaArray::from_text(&text)?;
    let q = arr.q() as u64;

    let mode_flag = cfg.string("rep", args.rep)?;
    let d = cfg.u64("d", args.d)?;
    let spec = match mode_flag.as_deref() {
        None => resolve_rep(d, q, false)?,
        Some(m) => {
            let mode: RepMode = m.parse()?;
            let d = match (d, mode) {
                (Some(d), _) => d,
                (None, RepMode::XOnly) => q,
                (None, RepMode::Weyl) => {
                    let s = (q as f64).sqrt().round() as u64;
                    if s * s == q && s >= 2 {
                        s
                    } else {
                        return Err(Fail::usage(format!(
                            "q = {q} is not a square; pass --d explicitly for the weyl mode"
                        )));
                    }
                }
            };
            RepSpec {
                d: d as u32,
                mode,
            }
        }
    };

    let delta = cfg.f64("delta", args.delta)?.unwrap_or(1.0);
    let mut sched = schedule_from_boa(&arr, spec, delta)?;
    if cfg.flag("symmetrize", args.symmetrize)? {
        sched = sched.symmetrize()?;
    }

    let format = cfg
        .string("format", args.format)?
        .unwrap_or_else(|| "json".to_string());
    let (payload, default_name) = match format.as_str() {
        "json" => (sched.to_json(), "schedule.json"),
        "csv" => (sched.to_csv(), "schedule.csv"),
        other => {
            return Err(Fail::usage(format!(
                "unknown format {other:?}; expected json or csv"
            )))
        }
    };
    let out = cfg
        .path("out", args.out)?
        .unwrap_or_else(|| PathBuf::from(default_name));
    fs::write(&out, payload).map_err(Error::from)?;
    out!(
        "schedule: {} slots on {} qudits, Δ = {}, rep (d = {}, {}){}",
        sched.slots(),
        sched.n(),
        sched.delta(),
        spec.d,
        spec.mode,
        if sched.symmetrized() {
            ", symmetrized"
        } else {
            ""
        }
    );
    out!("schedule → {}", out.display());
    Ok(0)
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

#[derive(Args)]
struct SimulateArgs {
    /// Schedule JSON file.
    #[arg(long, value_name = "FILE")]
    schedule: Option<PathBuf>,
    /// Seed for the random Hamiltonian.
    #[arg(long)]
    seed: Option<u64>,
    /// Locality ℓ of the random Hamiltonian (default 2).
    #[arg(long)]
    locality: Option<u64>,
    /// Draw diagonal terms only.
    #[arg(long)]
    diagonal: bool,
    /// Averaging mode: full or per-term (default: per-term above 10 qudits).
    #[arg(long)]
    mode: Option<String>,
    /// Evaluate slot integrals by N-point Gauss–Legendre quadrature instead
    /// of the analytic eigenbasis formula.
    #[arg(long, value_name = "N")]
    quadrature: Option<u64>,
    /// Also write the JSON report to this file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigOpt,
}

fn cmd_simulate(args: SimulateArgs) -> CliResult {
    let cfg = args.config.load()?;
    let path = cfg
        .path("schedule", args.schedule)?
        .ok_or_else(|| Fail::usage("--schedule FILE is required"))?;
    let text = fs::read_to_string(&path)
        .map_err(|e| Fail::usage(format!("cannot read {}: {e}", path.display())))?;
    let sched = ControlSchedule::from_json(&text)?;
    let spec = sched.rep();
    let rep = build_representation(spec.d as u64, spec.mode)?;

    let seed = cfg.u64("seed", args.seed)?.unwrap_or(1);
    let ell = cfg.u64("locality", args.locality)?.unwrap_or(2) as usize;
    let diagonal = cfg.flag("diagonal", args.diagonal)?;
    let mode = match cfg.string("mode", args.mode)? {
        Some(m) => m.parse::<AverageMode>()?,
        None if sched.n() > 10 => AverageMode::PerTerm,
        None => AverageMode::Full,
    };
    let quadrature = cfg.u64("quadrature", args.quadrature)?.map(|v| v as usize);

    let h = random_local_hamiltonian(sched.n(), rep.d(), ell, seed, diagonal)?;
    let report = decoupling_residual(&h, &sched, &rep, mode, quadrature)?;
    let json = serde_json::to_string_pretty(&report).map_err(Error::from)?;
    out!("{json}");
    if let Some(out) = cfg.path("out", args.out)? {
        fs::write(&out, &json).map_err(Error::from)?;
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// table
// ---------------------------------------------------------------------------

#[derive(Args)]
struct TableArgs {
    /// Qudit dimension: 2 or 3.
    #[arg(long)]
    d: Option<u64>,
    #[command(flatten)]
    config: ConfigOpt,
}

fn cmd_table(args: TableArgs) -> CliResult {
    let cfg = args.config.load()?;
    let d = cfg
        .u64("d", args.d)?
        .ok_or_else(|| Fail::usage("--d is required (2 or 3)"))?;
    let (q, k_max) = match d {
        2 => (4u64, 8u32),
        3 => (9u64, 7u32),
        other => {
            return Err(Fail::usage(format!(
                "tables are tabulated for d = 2 and d = 3 only, got {other}"
            )))
        }
    };
    // d = 2 and d = 3 are prime, so the extension degree e of d over its
    // prime field is 1 and the generating set of F_{d²}^k has 2k elements.
    let e = 1u32;

    out!("cycle lengths N = q^k·2ke for d = {d} (q = d² = {q}, e = {e}):");
    let ks: Vec<u32> = (2..=k_max).collect();
    let ns: Vec<u64> = ks
        .iter()
        .map(|&k| q.pow(k) * 2 * (k as u64) * (e as u64))
        .collect();
    let k_line: Vec<String> = ks.iter().map(|k| format!("{k:>9}")).collect();
    let n_line: Vec<String> = ns.iter().map(|n| format!("{n:>9}")).collect();
    out!("  k {}", k_line.join(" "));
    out!("  N {}", n_line.join(" "));

    let mut lo = 2u64;
    let ranges: Vec<String> = ks
        .iter()
        .map(|&k| {
            let hi = (q.pow(k) - 1) / (q - 1);
            let s = format!("{lo}–{hi}");
            lo = hi + 1;
            s
        })
        .collect();
    out!(
        "  ℓ = 2 constructive n-ranges (dual-Hamming family): {}",
        ranges.join(", ")
    );
    out!("  ℓ ≥ 3 entries at these lengths: external database — not reproduced");
    Ok(0)
}

// ---------------------------------------------------------------------------
// codes
// ---------------------------------------------------------------------------

#[derive(Args)]
struct CodesArgs {
    #[command(subcommand)]
    action: CodesAction,
}

#[derive(Subcommand)]
enum CodesAction {
    /// Print a code's parameters, distance, dual distance, and the
    /// orthogonal-array strength its codeword array achieves.
    Describe(DescribeArgs),
}

#[derive(Args)]
struct DescribeArgs {
    /// Generator matrix file (first line "q n k", then n rows of k entries).
    #[arg(long, value_name = "FILE")]
    file: Option<PathBuf>,
    /// A built-in code: example1, example2, or example3.
    #[arg(long)]
    family: Option<String>,
    #[command(flatten)]
    config: ConfigOpt,
}

fn cmd_codes(args: CodesArgs) -> CliResult {
    let CodesAction::Describe(args) = args.action;
    let cfg = args.config.load()?;
    let family = cfg.string("family", args.family)?;
    let file = cfg.path("file", args.file)?;
    let code = match (family.as_deref(), file) {
        (Some("example1"), None) => example_code_7_3_2(),
        (Some("example2"), None) => example_code_5_2_4(),
        (Some("example3"), None) => example_code_16_9_2(),
        (Some(other), None) => {
            return Err(Fail::usage(format!(
                "unknown built-in code {other:?}; expected example1, example2, or example3"
            )))
        }
        (None, Some(path)) => {
            let text = fs::read_to_string(&path)
                .map_err(|e| Fail::usage(format!("cannot read {}: {e}", path.display())))?;
            LinearCode::from_text(&text)?
        }
        (Some(_), Some(_)) => {
            return Err(Fail::usage("pass either --file or --family, not both"))
        }
        (None, None) => return Err(Fail::usage("pass --file FILE or --family NAME")),
    };
    let report = code.report()?;
    out!(
        "{}",
        serde_json::to_string_pretty(&report).map_err(Error::from)?
    );
    Ok(0)
}

// ---------------------------------------------------------------------------
// entry point
// ---------------------------------------------------------------------------

#[cfg(feature = "parallel")]
fn configure_threads() {
    if let Ok(v) = std::env::var("BOA_THREADS") {
        if let Ok(n) = v.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
        }
    }
}

#[cfg(not(feature = "parallel"))]
fn configure_threads() {}

fn main() -> ExitCode {
    configure_threads();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Schedule(a) => cmd_schedule(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Table(a) => cmd_table(a),
        Command::Codes(a) => cmd_codes(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(fail) => {
            eprintln!("error: {}", fail.message);
            ExitCode::from(fail.code)
        }
    }
}
