//! Configuration, report serialization, and the command implementations
//! behind the `replicator-lab` binary.
//!
//! Output is deterministic: floats are serialized with 17 significant digits
//! (`{:.16e}`), which round-trips every finite f64, and parallel work is
//! assembled by index. `REPLICATOR_LAB_THREADS` caps worker parallelism
//! (0 or unset = automatic).

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::flow::{fmt_float, integrate};
use crate::game::{Param, PayoffMatrix, Tolerance};
use crate::global::{global_verdict, Verdict};
use crate::league::{run_with, LeagueState, RevisionProtocol};
use crate::local::{
    bifurcation_scan, classification_from_sign, interior_branch_root, linearize_at,
};
use crate::{Error, Result};

fn default_tolerance() -> f64 {
    1e-9
}

/// Game and tolerance shared by every command; per-command parameters
/// (initial conditions, horizons, grids, seeds) arrive as CLI flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub payoffs: PayoffMatrix,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

impl AnalysisConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        let config: AnalysisConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        self.payoffs.validate()?;
        if !self.tolerance.is_finite() || self.tolerance <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        Ok(())
    }

    pub fn tolerance(&self) -> Tolerance {
        Tolerance::new(self.tolerance).expect("validated at load time")
    }
}

/// JSON formatter writing floats with 17 significant digits. Everything else
/// follows the standard pretty layout.
struct Pretty17<'a> {
    inner: PrettyFormatter<'a>,
}

impl<'a> Formatter for Pretty17<'a> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W>(&mut self, writer: &mut W, value: f32) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{value:.16e}")
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_object_value(writer)
    }
}

/// Pretty JSON with 17-significant-digit floats, trailing newline included.
pub fn to_json_pretty_17<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let formatter = Pretty17 {
        inner: PrettyFormatter::new(),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut out, formatter);
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(String::from_utf8(out).expect("serde_json emits UTF-8"))
}

/// Cap rayon's worker count from `REPLICATOR_LAB_THREADS` (0 or unset =
/// automatic). Safe to call more than once.
pub fn configure_thread_pool_from_env() -> Result<()> {
    match std::env::var("REPLICATOR_LAB_THREADS") {
        Err(_) => Ok(()),
        Ok(raw) => {
            let n: usize = raw.trim().parse().map_err(|_| {
                Error::InvalidConfig(format!(
                    "REPLICATOR_LAB_THREADS must be an integer, got {raw:?}"
                ))
            })?;
            if n == 0 {
                return Ok(());
            }
            // A second initialization (e.g. in tests) keeps the first pool.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
            Ok(())
        }
    }
}

fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content)?;
            Ok(())
        }
        None => {
            io::stdout().write_all(content.as_bytes())?;
            Ok(())
        }
    }
}

/// `analyze`: full stability/Nash report as JSON, to `out` or stdout.
pub fn cmd_analyze(config_path: &Path, out: Option<&Path>) -> Result<()> {
    let config = AnalysisConfig::load(config_path)?;
    let report = global_verdict(&config.payoffs, &config.tolerance());
    write_output(out, &to_json_pretty_17(&report)?)
}

/// `integrate`: trajectory CSV plus a one-line terminal summary on stdout.
pub fn cmd_integrate(
    config_path: &Path,
    x0: f64,
    horizon: f64,
    tol: f64,
    out: &Path,
) -> Result<()> {
    let config = AnalysisConfig::load(config_path)?;
    let traj = integrate(&config.payoffs, x0, horizon, tol)?;
    let file = fs::File::create(out)?;
    traj.write_csv(BufWriter::new(file))?;
    println!(
        "terminal t={} x1={} reason={}",
        fmt_float(traj.last_time()),
        fmt_float(traj.last_state()),
        traj.terminal_reason
    );
    Ok(())
}

struct SweepRow {
    value: f64,
    branch: Option<(f64, String)>,
    verdict: Verdict,
    bifurcation: bool,
}

fn sweep_row(
    base: &PayoffMatrix,
    param: Param,
    value: f64,
    tol: &Tolerance,
    bifurcation: bool,
) -> SweepRow {
    let m = base.with_param(param, value);
    let branch = interior_branch_root(&m, tol).map(|root| {
        let class = classification_from_sign(tol.sign(linearize_at(&m, root)));
        (root, class.to_string())
    });
    SweepRow {
        value,
        branch,
        verdict: global_verdict(&m, tol).verdict,
        bifurcation,
    }
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::GloballyStableAt0 => "GloballyStableAt0",
        Verdict::GloballyStableAt1 => "GloballyStableAt1",
        Verdict::InteriorAttractor => "InteriorAttractor",
        Verdict::Bistable => "Bistable",
        Verdict::DegenerateLine => "DegenerateLine",
        Verdict::Undetermined => "Undetermined",
    }
}

/// `sweep`: one payoff entry runs over a uniform grid; each row records the
/// interior-branch location, its derivative-sign class and the global
/// verdict. Exact bifurcation crossings get their own rows flagged
/// `bifurcation=true`.
pub fn cmd_sweep(
    config_path: &Path,
    param: &str,
    lo: f64,
    hi: f64,
    steps: usize,
    out: &Path,
) -> Result<()> {
    let config = AnalysisConfig::load(config_path)?;
    let param = Param::from_str(param)?;
    if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
        return Err(Error::InvalidSweepRange(lo, hi));
    }
    if steps < 2 {
        return Err(Error::InvalidInput(format!(
            "sweep needs at least 2 steps, got {steps}"
        )));
    }
    let tol = config.tolerance();
    let base = config.payoffs;

    let loci = bifurcation_scan(&base, param, lo, hi, steps, &tol)?;
    let crossings: Vec<f64> = loci.iter().map(|l| l.crossing_parameter).collect();
    let mut values: Vec<(f64, bool)> = (0..steps)
        .map(|i| lo + (hi - lo) * i as f64 / (steps - 1) as f64)
        .filter(|v| !crossings.contains(v))
        .map(|v| (v, false))
        .collect();
    values.extend(crossings.iter().map(|c| (*c, true)));
    values.sort_by(|a, b| a.0.total_cmp(&b.0));

    let rows: Vec<SweepRow> = values
        .par_iter()
        .map(|(v, flagged)| sweep_row(&base, param, *v, &tol, *flagged))
        .collect();

    let file = fs::File::create(out)?;
    let mut w = BufWriter::new(file);
    writeln!(w, "value,p3_location,p3_classification,verdict,bifurcation")?;
    for row in rows {
        let (loc, class) = match &row.branch {
            Some((loc, class)) => (fmt_float(*loc), class.clone()),
            None => (String::new(), String::new()),
        };
        writeln!(
            w,
            "{},{},{},{},{}",
            fmt_float(row.value),
            loc,
            class,
            verdict_name(row.verdict),
            row.bifurcation
        )?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct TerminalRecord {
    seed: u64,
    t: f64,
    n1: u64,
    n2: u64,
    x1: f64,
}

#[derive(Debug, Serialize)]
struct BatchSummary {
    payoffs: PayoffMatrix,
    teams: u64,
    initial_n1: u64,
    horizon: f64,
    seed: u64,
    replicas: u64,
    protocol: RevisionProtocol,
    checkpoints: Vec<f64>,
    terminal: Vec<TerminalRecord>,
    mean_x1: Vec<f64>,
}

const SUMMARY_CHECKPOINTS: usize = 20;

/// `simulate`: one league run per seed `seed..seed+replicas-1`, each written
/// to `out_dir/run_<seed>.csv`, plus `out_dir/summary.json` with per-seed
/// terminal states and the mean share trajectory at 20 checkpoints.
pub fn cmd_simulate(
    config_path: &Path,
    teams: u64,
    n1: u64,
    horizon: f64,
    seed: u64,
    replicas: u64,
    out_dir: &Path,
) -> Result<()> {
    let config = AnalysisConfig::load(config_path)?;
    if teams == 0 {
        return Err(Error::InvalidInput("league needs at least one team".into()));
    }
    if n1 > teams {
        return Err(Error::InvalidInput(format!(
            "initial two-point count {n1} exceeds league size {teams}"
        )));
    }
    if replicas == 0 {
        return Err(Error::InvalidInput("need at least one replica".into()));
    }
    if !horizon.is_finite() || horizon <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    fs::create_dir_all(out_dir)?;

    let m = config.payoffs;
    let protocol = RevisionProtocol::replicator_aligned(&m);
    let s0 = LeagueState::new(n1, teams - n1);
    let checkpoints: Vec<f64> = (1..=SUMMARY_CHECKPOINTS)
        .map(|k| horizon * k as f64 / SUMMARY_CHECKPOINTS as f64)
        .collect();

    let per_replica: Vec<(TerminalRecord, Vec<f64>)> = (0..replicas)
        .into_par_iter()
        .map(|i| -> Result<(TerminalRecord, Vec<f64>)> {
            let run_seed = seed.wrapping_add(i);
            let path = out_dir.join(format!("run_{run_seed}.csv"));
            let mut w = BufWriter::new(fs::File::create(path)?);
            writeln!(w, "t,n1,n2,x1")?;
            let share = |s: &LeagueState| s.n1 as f64 / s.total() as f64;
            writeln!(
                w,
                "{},{},{},{}",
                fmt_float(0.0),
                s0.n1,
                s0.n2,
                fmt_float(share(&s0))
            )?;

            let mut next = 0usize;
            let mut last = s0;
            let mut samples = Vec::with_capacity(checkpoints.len());
            let mut io_error: Option<io::Error> = None;
            let (t_end, end_state) = run_with(&s0, &m, &protocol, horizon, run_seed, |t, s| {
                while next < checkpoints.len() && checkpoints[next] < t {
                    samples.push(share(&last));
                    next += 1;
                }
                last = *s;
                if io_error.is_none() {
                    if let Err(e) = writeln!(
                        w,
                        "{},{},{},{}",
                        fmt_float(t),
                        s.n1,
                        s.n2,
                        fmt_float(share(s))
                    ) {
                        io_error = Some(e);
                    }
                }
            })?;
            if let Some(e) = io_error {
                return Err(e.into());
            }
            while next < checkpoints.len() {
                samples.push(share(&last));
                next += 1;
            }
            w.flush()?;
            Ok((
                TerminalRecord {
                    seed: run_seed,
                    t: t_end,
                    n1: end_state.n1,
                    n2: end_state.n2,
                    x1: share(&end_state),
                },
                samples,
            ))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut mean_x1 = vec![0.0; checkpoints.len()];
    for (_, samples) in &per_replica {
        for (acc, v) in mean_x1.iter_mut().zip(samples) {
            *acc += v / replicas as f64;
        }
    }
    let summary = BatchSummary {
        payoffs: m,
        teams,
        initial_n1: n1,
        horizon,
        seed,
        replicas,
        protocol,
        checkpoints,
        terminal: per_replica.into_iter().map(|(t, _)| t).collect(),
        mean_x1,
    };
    fs::write(out_dir.join("summary.json"), to_json_pretty_17(&summary)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parses_with_default_tolerance() {
        let config: AnalysisConfig =
            serde_json::from_str(r#"{"payoffs":{"alpha":1,"beta":2,"gamma":1,"delta":1}}"#)
                .unwrap();
        assert_eq!(config.tolerance, 1e-9);
        assert_eq!(config.payoffs.beta, 2.0);
        config.validate().unwrap();
    }

    #[test]
    fn config_rejects_unknown_fields_and_bad_tolerance() {
        assert!(serde_json::from_str::<AnalysisConfig>(
            r#"{"payoffs":{"alpha":1,"beta":2,"gamma":1,"delta":1},"extra":1}"#
        )
        .is_err());
        let config: AnalysisConfig = serde_json::from_str(
            r#"{"payoffs":{"alpha":1,"beta":2,"gamma":1,"delta":1},"tolerance":-1.0}"#,
        )
        .unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn config_round_trip_is_idempotent() {
        let config: AnalysisConfig = serde_json::from_str(
            r#"{"payoffs":{"alpha":1.25,"beta":2.5,"gamma":0.1,"delta":-3.75},"tolerance":1e-9}"#,
        )
        .unwrap();
        let first = to_json_pretty_17(&config).unwrap();
        let reparsed: AnalysisConfig = serde_json::from_str(&first).unwrap();
        let second = to_json_pretty_17(&reparsed).unwrap();
        assert_eq!(first, second);
        assert_eq!(reparsed, config);
    }

    #[test]
    fn seventeen_digit_floats_round_trip_exactly() {
        for v in [
            0.1,
            2.0 / 3.0,
            -1.0 / 7.0,
            1.0e-300,
            123456789.12345679,
            f64::MIN_POSITIVE,
        ] {
            let text = fmt_float(v);
            assert_eq!(text.parse::<f64>().unwrap(), v, "{text}");
        }
        let json = to_json_pretty_17(&vec![2.0 / 3.0]).unwrap();
        let back: Vec<f64> = serde_json::from_str(&json).unwrap();
        assert_eq!(back[0], 2.0 / 3.0);
    }
}
