//! Scenario configuration, trajectory and sweep runners, CSV output.
//!
//! Scenario files are flat `key=value` lines using the same names as the CLI
//! flags (without the leading dashes). Blank lines and lines starting with
//! `#` are ignored.
//!
//! CSV floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every `f64` exactly.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::analytic::{self, ThetaMode, TwoLevelState};
use crate::collision::{CaseLabel, CollisionSystem};
use crate::correspondence::{self, AnalogyReport, DEFAULT_STATEVECTOR_CAP};
use crate::quantum::StateVector;
use crate::{Error, Regime, Result, SearchParams};

pub const TRAJECTORY_HEADER: &str =
    "n,a_n,b_n,p_marked,u_n,v_n,energy_fraction_ball2,case_label,regime";
pub const SWEEP_HEADER: &str = "n_total,n0,p_at_n0,regime";

/// Number of measurement draws reported by `compare`.
pub const COMPARE_DRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Iterations {
    #[default]
    Auto,
    Count(u64),
}

impl FromStr for Iterations {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(Iterations::Auto);
        }
        s.parse().map(Iterations::Count).map_err(|_| {
            Error::Config(format!(
                "iterations must be an integer or `auto`, got `{s}`"
            ))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            other => Err(Error::Config(format!("unsupported format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub n1: Option<u64>,
    pub n2: Option<u64>,
    pub log2_n: Option<u32>,
    pub marked_count: Option<u64>,
    pub v_init: f64,
    pub iterations: Iterations,
    pub theta_mode: ThetaMode,
    pub seed: u64,
    pub statevector_cap: u64,
    pub output: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            n1: None,
            n2: None,
            log2_n: None,
            marked_count: None,
            v_init: 1.0,
            iterations: Iterations::Auto,
            theta_mode: ThetaMode::Exact,
            seed: 0,
            statevector_cap: DEFAULT_STATEVECTOR_CAP,
            output: None,
            format: OutputFormat::Csv,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse `{value}`")))
}

impl ScenarioConfig {
    /// Sets one field by its flag name.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim().trim_start_matches("--") {
            "n1" => self.n1 = Some(parse_num(key, value)?),
            "n2" => self.n2 = Some(parse_num(key, value)?),
            "log2-n" => self.log2_n = Some(parse_num(key, value)?),
            "marked-count" => self.marked_count = Some(parse_num(key, value)?),
            "v-init" => self.v_init = parse_num(key, value)?,
            "iterations" => self.iterations = value.parse()?,
            "theta-mode" => self.theta_mode = value.parse()?,
            "seed" => self.seed = parse_num(key, value)?,
            "statevector-cap" => self.statevector_cap = parse_num(key, value)?,
            "output" => self.output = Some(PathBuf::from(value)),
            "format" => self.format = value.parse()?,
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn from_scenario_str(text: &str) -> Result<Self> {
        let mut config = Self::default();
        config.merge_scenario_str(text)?;
        Ok(config)
    }

    pub fn merge_scenario_str(&mut self, text: &str) -> Result<()> {
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected key=value, got `{line}`",
                    lineno + 1
                ))
            })?;
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Self::from_scenario_str(&text)
    }

    /// Resolves the sizing fields into a [`SearchParams`].
    ///
    /// Either `log2-n` (with `marked-count` or `n2`, default one marked
    /// state) or both `n1` and `n2`. Redundant fields must agree.
    pub fn params(&self) -> Result<SearchParams> {
        let marked = match (self.marked_count, self.n2) {
            (Some(m), Some(n2)) if m != n2 => {
                return Err(Error::InvalidSizing(format!(
                    "marked-count={m} conflicts with n2={n2}"
                )))
            }
            (m, n2) => m.or(n2),
        };
        let params = match (self.log2_n, self.n1, marked) {
            (Some(k), n1, marked) => {
                let params = SearchParams::from_log2(k, marked.unwrap_or(1))?;
                if let Some(n1) = n1.filter(|&n1| n1 != params.n1()) {
                    return Err(Error::InvalidSizing(format!(
                        "n1={n1} conflicts with log2-n={k} (expected n1={})",
                        params.n1()
                    )));
                }
                params
            }
            (None, Some(n1), Some(n2)) => SearchParams::new(n1, n2)?,
            _ => {
                return Err(Error::InvalidSizing(
                    "give either --log2-n or both --n1 and --n2".into(),
                ))
            }
        };
        if !(self.v_init > 0.0 && self.v_init.is_finite()) {
            return Err(Error::NonPositiveSpeed(self.v_init));
        }
        Ok(params)
    }

    pub fn resolve_iterations(&self, params: SearchParams) -> u64 {
        match self.iterations {
            Iterations::Count(n) => n,
            Iterations::Auto => analytic::optimal_iterations_with(params, self.theta_mode).count,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub n: u64,
    pub a_n: f64,
    pub b_n: f64,
    pub p_marked: f64,
    pub u_n: f64,
    pub v_n: f64,
    pub energy_fraction_ball2: f64,
    pub case_label: CaseLabel,
    pub regime: Regime,
}

/// Joint trajectory for `n = 0..=iterations`.
///
/// Amplitudes come from the two-level recursion (`theta-mode=exact`) or the
/// small-angle closed form (`theta-mode=paper`); velocities, energy share and
/// case label from the collision simulation.
pub fn run_search(config: &ScenarioConfig) -> Result<Vec<TrajectoryRow>> {
    let params = config.params()?;
    let iterations = config.resolve_iterations(params);
    let regime = params.regime();
    let t = analytic::build_matrix(params);

    let mut state = TwoLevelState::uniform(params);
    let mut sys = CollisionSystem::from_params(params, config.v_init, 1.0)?;
    let mut rows = Vec::with_capacity(iterations as usize + 1);
    for n in 0..=iterations {
        if n > 0 {
            state = t.apply(state);
            sys = sys.iterate().0;
        }
        let amps = match config.theta_mode {
            ThetaMode::Exact => state,
            ThetaMode::PaperApprox => analytic::closed_form_with(params, n, ThetaMode::PaperApprox),
        };
        let rec = sys.record();
        rows.push(TrajectoryRow {
            n,
            a_n: amps.a,
            b_n: amps.b,
            p_marked: amps.marked_probability(params),
            u_n: rec.u,
            v_n: rec.v,
            energy_fraction_ball2: sys.energy_fraction_ball2(),
            case_label: rec.case_label,
            regime,
        });
    }
    Ok(rows)
}

/// Collision engine only; amplitudes are read back through the velocity map.
pub fn run_collide(config: &ScenarioConfig) -> Result<Vec<TrajectoryRow>> {
    let params = config.params()?;
    let iterations = config.resolve_iterations(params);
    let sys = CollisionSystem::from_params(params, config.v_init, 1.0)?;
    let mut rows = Vec::with_capacity(iterations as usize + 1);
    let mut current = sys;
    for n in 0..=iterations {
        if n > 0 {
            current = current.iterate().0;
        }
        let rec = current.record();
        let amps = correspondence::velocities_to_amplitudes(rec.u, rec.v, params, config.v_init)?;
        rows.push(TrajectoryRow {
            n,
            a_n: amps.a,
            b_n: amps.b,
            p_marked: amps.marked_probability(params),
            u_n: rec.u,
            v_n: rec.v,
            energy_fraction_ball2: current.energy_fraction_ball2(),
            case_label: rec.case_label,
            regime: params.regime(),
        });
    }
    Ok(rows)
}

/// Output of `compare`: the joint trajectory plus the cross-engine report.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub rows: Vec<TrajectoryRow>,
    pub report: AnalogyReport,
    /// `(final marked probability, sampled marked frequency)` when the state
    /// vector was run.
    pub measurement: Option<(f64, f64)>,
}

pub fn run_compare(config: &ScenarioConfig) -> Result<Comparison> {
    let params = config.params()?;
    let rows = run_search(config)?;
    let iterations = config.resolve_iterations(params);
    let report = correspondence::verify_analogy_with_cap(
        params,
        config.v_init,
        iterations.max(1),
        config.statevector_cap,
    )?;

    let measurement = if report.statevector_skipped {
        None
    } else {
        let mut sv = StateVector::init_uniform_tail(params)?;
        sv.grover_iterate(iterations);
        let hits = sv
            .measure_sample(config.seed, COMPARE_DRAWS)
            .into_iter()
            .filter(|&i| sv.is_marked(i))
            .count();
        Some((sv.marked_probability(), hits as f64 / COMPARE_DRAWS as f64))
    };

    Ok(Comparison {
        rows,
        report,
        measurement,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub n_total: u64,
    pub n0: u64,
    pub p_at_n0: f64,
    pub regime: Regime,
}

/// How many states are marked at each sweep size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMarked {
    Count(u64),
    /// `N / divisor`.
    Fraction(u64),
}

/// One row per `N = 2^k`, `k` in `log2_min..=log2_max`, ascending in `N`.
///
/// `n0` uses the configured theta mode; `p_at_n0` is always the exact success
/// probability at that count.
pub fn run_sweep(
    log2_min: u32,
    log2_max: u32,
    marked: SweepMarked,
    config: &ScenarioConfig,
) -> Result<Vec<SweepRow>> {
    if log2_min > log2_max {
        return Err(Error::Config(format!(
            "sweep range is empty: {log2_min} > {log2_max}"
        )));
    }
    if let SweepMarked::Fraction(0) = marked {
        return Err(Error::Config("marked divisor must be positive".into()));
    }
    (log2_min..=log2_max)
        .into_par_iter()
        .map(|k| {
            let n2 = match marked {
                SweepMarked::Count(c) => c,
                SweepMarked::Fraction(d) => (1u64 << k.min(62)) / d,
            };
            let params = SearchParams::from_log2(k, n2)?;
            let n0 = analytic::optimal_iterations_with(params, config.theta_mode).count;
            Ok(SweepRow {
                n_total: params.n_total(),
                n0,
                p_at_n0: analytic::success_probability(params, n0),
                regime: params.regime(),
            })
        })
        .collect()
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory_csv<W: Write>(rows: &[TrajectoryRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{TRAJECTORY_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{}",
            r.n,
            format_float(r.a_n),
            format_float(r.b_n),
            format_float(r.p_marked),
            format_float(r.u_n),
            format_float(r.v_n),
            format_float(r.energy_fraction_ball2),
            r.case_label,
            r.regime
        )?;
    }
    Ok(())
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{}",
            r.n_total,
            r.n0,
            format_float(r.p_at_n0),
            r.regime
        )?;
    }
    Ok(())
}

/// `#`-prefixed summary lines appended after the `compare` trajectory.
pub fn comparison_comments(cmp: &Comparison) -> String {
    let r = &cmp.report;
    let mut s = String::new();
    let _ = writeln!(s, "# steps_checked={}", r.steps_checked);
    let _ = writeln!(s, "# statevector_skipped={}", r.statevector_skipped);
    let _ = writeln!(
        s,
        "# max_velocity_residual={}",
        format_float(r.max_velocity_residual)
    );
    let _ = writeln!(
        s,
        "# max_probability_energy_residual={}",
        format_float(r.max_probability_energy_residual)
    );
    let _ = writeln!(
        s,
        "# max_center_residual={}",
        format_float(r.max_center_residual)
    );
    let _ = writeln!(
        s,
        "# max_closed_form_residual={}",
        format_float(r.max_closed_form_residual)
    );
    if let Some((p, freq)) = cmp.measurement {
        let _ = writeln!(s, "# statevector_p_marked={}", format_float(p));
        let _ = writeln!(
            s,
            "# sampled_marked_frequency={} draws={COMPARE_DRAWS}",
            format_float(freq)
        );
    }
    s
}

pub fn write_comparison_csv<W: Write>(cmp: &Comparison, mut w: W) -> io::Result<()> {
    write_trajectory_csv(&cmp.rows, &mut w)?;
    w.write_all(comparison_comments(cmp).as_bytes())
}

/// Writes `rows` to `path`, attaching the path to any I/O error.
pub fn emit_csv(rows: &[TrajectoryRow], path: &Path) -> Result<()> {
    write_to_path(path, |w| write_trajectory_csv(rows, w))
}

pub fn write_to_path(
    path: &Path,
    f: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>,
) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_owned(),
        source,
    };
    let file = File::create(path).map_err(io_err)?;
    let mut w = BufWriter::new(file);
    f(&mut w).map_err(io_err)?;
    w.flush().map_err(io_err)
}

/// Parses trajectory CSV as written by [`write_trajectory_csv`]; `#` lines
/// are skipped.
pub fn read_trajectory_csv<R: io::Read>(r: R) -> Result<Vec<TrajectoryRow>> {
    let bad = |msg: String| Error::Config(format!("trajectory csv: {msg}"));
    let mut lines = BufReader::new(r).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(|e| bad(e.to_string()))?
        .ok_or_else(|| bad("empty input".into()))?;
    if header != TRAJECTORY_HEADER {
        return Err(bad(format!("unexpected header `{header}`")));
    }
    let mut rows = Vec::new();
    for line in lines {
        let line = line.map_err(|e| bad(e.to_string()))?;
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 9 {
            return Err(bad(format!("expected 9 fields, got {}", f.len())));
        }
        let num = |i: usize| -> Result<f64> {
            f[i].parse()
                .map_err(|_| bad(format!("bad float `{}`", f[i])))
        };
        rows.push(TrajectoryRow {
            n: f[0]
                .parse()
                .map_err(|_| bad(format!("bad index `{}`", f[0])))?,
            a_n: num(1)?,
            b_n: num(2)?,
            p_marked: num(3)?,
            u_n: num(4)?,
            v_n: num(5)?,
            energy_fraction_ball2: num(6)?,
            case_label: f[7].parse()?,
            regime: match f[8] {
                "efficient" => Regime::Efficient,
                "boundary" => Regime::Boundary,
                "inefficient" => Regime::Inefficient,
                "invalid" => Regime::Invalid,
                other => return Err(bad(format!("unknown regime `{other}`"))),
            },
        });
    }
    Ok(rows)
}
