//! Declarative figure-reproduction runs.
//!
//! A scenario is a flat TOML document: simulation parameters, an optional
//! homodyne conditioning plan (outcome lists per detector), and a list of
//! observables. Running one emits deterministic CSV tables (12 significant
//! digits, `#`-prefixed metadata comments) plus a `manifest.json` that
//! echoes the configuration, the cutoffs, the grids, and the results of the
//! convergence policy: every scalar is recomputed at `n_t_max + 2` with
//! densified grids, and the shift is recorded against the tolerance that
//! consumes the number.

use std::fmt;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::conditioning::{condition, HomodyneSetting, OutcomeGrid};
use crate::dynamics::{evolve, reduce_to_triplets, SimParams};
use crate::fock::{CorrelatedFockDensity, FockCutoffs, Mode, Quadrature};
use crate::observables::{
    cat_fidelity, conditional_squeezing, dominant_eigenvector, fidelity, macroscopicity,
    negativity, negativity_two_mode, optimal_cat_fidelity, purity, steering, wigner,
    wigner_two_mode, Axis, ModeCConditioning, SqueezeObservable, SteeringDirection,
};

pub const CONFIG_VERSION: u32 = 1;

// ---------------------------------------------------------------------------
// configuration schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub config_version: u32,
    pub name: String,
    /// Heavy scenarios (pump amplitudes at or beyond sqrt(50)) must be
    /// acknowledged explicitly on the command line.
    #[serde(default)]
    pub heavy: bool,
    pub params: ParamsSpec,
    #[serde(default)]
    pub conditioning: Vec<SettingSpec>,
    pub observables: Vec<ObservableSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsSpec {
    /// Real pump coherent amplitude; alternatively give its square.
    #[serde(default)]
    pub alpha_p: Option<f64>,
    #[serde(default)]
    pub alpha_p_sq: Option<f64>,
    pub n_t_max: usize,
    /// Pump cutoff; chosen from the tail tolerance when absent.
    #[serde(default)]
    pub n_p_max: Option<usize>,
    #[serde(default = "default_tail_tol")]
    pub tail_tol: f64,
    /// Dimensionless times `tau = alpha_p chi t`, strictly increasing.
    pub times: Vec<f64>,
}

fn default_tail_tol() -> f64 {
    1e-8
}

impl ParamsSpec {
    pub fn alpha(&self) -> Result<f64, String> {
        match (self.alpha_p, self.alpha_p_sq) {
            (Some(a), None) => Ok(a),
            (None, Some(sq)) if sq >= 0.0 => Ok(sq.sqrt()),
            (None, None) => Err("one of alpha_p / alpha_p_sq is required".into()),
            _ => Err("give exactly one of alpha_p / alpha_p_sq".into()),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SettingSpec {
    pub mode: Mode,
    pub quadrature: Quadrature,
    pub outcomes: Vec<f64>,
}

impl SettingSpec {
    fn column(&self) -> String {
        format!("{}_{}", self.quadrature.label(), self.mode.label())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ObservableSpec {
    /// Wigner grid of each conditional state, one CSV per (time, outcome).
    Wigner {
        #[serde(default)]
        points: Option<usize>,
        #[serde(default)]
        radius: Option<f64>,
    },
    /// Wigner negativity of each conditional state (two-mode states use the
    /// 4-D product kernel on coarse axes).
    Negativity {
        #[serde(default)]
        points: Option<usize>,
        #[serde(default)]
        radius: Option<f64>,
    },
    /// Phase-space macroscopicity of each single-mode conditional state.
    Macroscopicity {
        #[serde(default)]
        max_step: Option<f64>,
        #[serde(default)]
        radius: Option<f64>,
    },
    /// Purity of each conditional state.
    Purity,
    /// Purity of the unconditional triplet state at each time.
    UnconditionalPurity,
    /// Fidelity of each single-mode conditional state against the cat of
    /// fixed amplitude.
    CatFidelity { alpha: f64 },
    /// Maximized cat fidelity over real amplitudes; emits the optimum and
    /// its location.
    OptimalCatFidelity {
        alpha_lo: f64,
        alpha_hi: f64,
        #[serde(default = "default_alpha_tol")]
        tol: f64,
    },
    /// Fidelity-versus-amplitude curve, long format in its own CSV.
    CatFidelityScan {
        alpha_lo: f64,
        alpha_hi: f64,
        steps: usize,
    },
    /// Fidelity of each pair conditional state against the Bell target.
    BellFidelity,
    /// Fidelity of each pair conditional state against the qudit target.
    QuditFidelity,
    /// Weight and leading amplitudes of the dominant eigenvector.
    DominantEigenvector { components: usize },
    /// Steering quantity per time, from the unconditional triplet state.
    Steering {
        direction: SteeringDirection,
        #[serde(default)]
        grid_points: Option<usize>,
        #[serde(default)]
        c_conditioning: Option<ModeCConditioning>,
    },
    /// Conditional higher-order squeezing per time (carries its own
    /// outcomes).
    Squeezing {
        #[serde(flatten)]
        observable: SqueezeObservable,
    },
}

fn default_alpha_tol() -> f64 {
    1e-3
}

// ---------------------------------------------------------------------------
// stage-tagged error
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Parse,
    Evolve,
    Condition,
    Observe,
    Write,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Parse => "parse",
            Stage::Evolve => "evolve",
            Stage::Condition => "condition",
            Stage::Observe => "observe",
            Stage::Write => "write",
        };
        f.write_str(s)
    }
}

#[derive(Debug)]
pub struct ScenarioError {
    pub stage: Stage,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} stage failed: {}", self.stage, self.message)
    }
}

impl std::error::Error for ScenarioError {}

fn err(stage: Stage, message: impl fmt::Display) -> ScenarioError {
    ScenarioError {
        stage,
        message: message.to_string(),
    }
}

type RunResult<T> = Result<T, ScenarioError>;

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

const PRESETS: &[(&str, &str)] = &[
    ("fig2", include_str!("../presets/fig2.toml")),
    ("fig3a", include_str!("../presets/fig3a.toml")),
    ("fig3b", include_str!("../presets/fig3b.toml")),
    ("fig4", include_str!("../presets/fig4.toml")),
    ("fig5", include_str!("../presets/fig5.toml")),
    ("fig6", include_str!("../presets/fig6.toml")),
    ("fig6-ap50", include_str!("../presets/fig6-ap50.toml")),
    ("fig6-ap100", include_str!("../presets/fig6-ap100.toml")),
    ("fig6-ap200", include_str!("../presets/fig6-ap200.toml")),
    ("fig7", include_str!("../presets/fig7.toml")),
];

/// Shipped scenario presets as `(name, parsed scenario)` pairs.
pub fn builtin_scenarios() -> Vec<(&'static str, Scenario)> {
    PRESETS
        .iter()
        .map(|(name, text)| {
            let scenario: Scenario =
                toml::from_str(text).unwrap_or_else(|e| panic!("preset {name} is valid: {e}"));
            (*name, scenario)
        })
        .collect()
}

/// Look up one preset by name.
pub fn preset(name: &str) -> Option<Scenario> {
    PRESETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| toml::from_str(text).expect("presets parse"))
}

/// Raw TOML text of one preset, for `run`-compatible export.
pub fn preset_toml(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

// ---------------------------------------------------------------------------
// run orchestration
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub out_dir: PathBuf,
    pub files: Vec<String>,
    pub wall_time_s: f64,
    pub all_converged: bool,
}

/// Parse a scenario file and run it.
pub fn run_file(config_path: &Path, out_dir: &Path) -> RunResult<RunSummary> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| err(Stage::Parse, format!("{}: {e}", config_path.display())))?;
    let scenario: Scenario = toml::from_str(&text).map_err(|e| err(Stage::Parse, e))?;
    run_scenario(&scenario, out_dir)
}

/// Run a scenario into `out_dir` (created if missing).
pub fn run_scenario(scenario: &Scenario, out_dir: &Path) -> RunResult<RunSummary> {
    let start = Instant::now();
    validate(scenario)?;
    let base = compute(scenario, false)?;
    let refined = compute(scenario, true)?;
    let convergence = convergence_entries(&base, &refined);
    write_outputs(scenario, &base, &convergence, out_dir, start.elapsed().as_secs_f64())
}

/// Rough cost statement for heavy runs, printed before requiring the flag.
pub fn cost_estimate(scenario: &Scenario) -> String {
    let alpha = scenario.params.alpha().unwrap_or(0.0);
    let n_p = scenario
        .params
        .n_p_max
        .unwrap_or_else(|| (alpha * alpha + 8.0 * alpha + 10.0) as usize);
    format!(
        "~{} pump blocks x {} times, outcome grids of 161/321 nodes, plus one refined pass at n_t_max + 2",
        n_p + 1,
        scenario.params.times.len()
    )
}

fn validate(scenario: &Scenario) -> RunResult<()> {
    let e = |m: String| Err(err(Stage::Parse, m));
    if scenario.config_version != CONFIG_VERSION {
        return e(format!(
            "config_version {} unsupported (expected {CONFIG_VERSION})",
            scenario.config_version
        ));
    }
    scenario.params.alpha().map_err(|m| err(Stage::Parse, m))?;
    if scenario.conditioning.len() > 2 {
        return e("at most two homodyne detectors can be conditioned on".into());
    }
    for (i, s) in scenario.conditioning.iter().enumerate() {
        if s.outcomes.is_empty() {
            return e(format!("detector on mode {} has no outcomes", s.mode.label()));
        }
        if scenario.conditioning[..i].iter().any(|p| p.mode == s.mode) {
            return e(format!("mode {} conditioned twice", s.mode.label()));
        }
    }
    if scenario.observables.is_empty() {
        return e("scenario lists no observables".into());
    }
    let m_after = 3 - scenario.conditioning.len();
    for obs in &scenario.observables {
        let need = |ok: bool, what: &str, m: usize| {
            if ok {
                Ok(())
            } else {
                Err(err(
                    Stage::Parse,
                    format!("{what} needs {m} unmeasured mode(s); the plan leaves {m_after}"),
                ))
            }
        };
        match obs {
            ObservableSpec::Wigner { .. } | ObservableSpec::Negativity { .. } => {
                need(m_after <= 2, "wigner/negativity", 2)?
            }
            ObservableSpec::Macroscopicity { .. } => need(m_after == 1, "macroscopicity", 1)?,
            ObservableSpec::CatFidelity { .. }
            | ObservableSpec::OptimalCatFidelity { .. }
            | ObservableSpec::CatFidelityScan { .. } => need(m_after == 1, "cat fidelity", 1)?,
            ObservableSpec::BellFidelity | ObservableSpec::QuditFidelity => {
                need(m_after == 2, "pair fidelity", 2)?
            }
            ObservableSpec::DominantEigenvector { components } => {
                need(m_after <= 2, "dominant eigenvector", 2)?;
                if *components == 0 {
                    return e("dominant_eigenvector needs components >= 1".into());
                }
            }
            ObservableSpec::Purity => need(!scenario.conditioning.is_empty(), "purity", 2)?,
            ObservableSpec::UnconditionalPurity
            | ObservableSpec::Steering { .. }
            | ObservableSpec::Squeezing { .. } => {}
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// computation
// ---------------------------------------------------------------------------

struct ScalarRow {
    tau: f64,
    outcomes: Vec<(String, f64)>,
    values: Vec<(String, f64)>,
}

struct SteeringRow {
    direction: SteeringDirection,
    tau: f64,
    s: f64,
    var_x: f64,
    var_y: f64,
    commutator: f64,
}

struct ScanRow {
    tau: f64,
    outcomes: Vec<(String, f64)>,
    alpha: f64,
    fidelity: f64,
}

struct WignerFile {
    name: String,
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
    mass: f64,
}

struct Computed {
    cutoffs: FockCutoffs,
    scalar_rows: Vec<ScalarRow>,
    steering_rows: Vec<SteeringRow>,
    scan_rows: Vec<ScanRow>,
    wigner_files: Vec<WignerFile>,
    outcome_grid: (f64, f64, usize),
}

/// Format a float the way it appears in file names: shortest round-trip.
fn fname_num(v: f64) -> String {
    format!("{v}").replace('-', "m")
}

fn compute(scenario: &Scenario, refine: bool) -> RunResult<Computed> {
    let alpha = scenario.params.alpha().map_err(|m| err(Stage::Parse, m))?;
    let alpha_c = C64::new(alpha, 0.0);
    let n_t = scenario.params.n_t_max + if refine { 2 } else { 0 };
    let cutoffs = match scenario.params.n_p_max {
        Some(n_p) => FockCutoffs::new(n_t, n_p.max(n_t), alpha_c, scenario.params.tail_tol),
        None => FockCutoffs::auto(n_t, alpha_c, scenario.params.tail_tol),
    }
    .map_err(|e| err(Stage::Evolve, e))?;
    let params = SimParams::new(alpha_c, cutoffs, scenario.params.times.clone())
        .map_err(|e| err(Stage::Evolve, e))?;
    let states = evolve(&params).map_err(|e| err(Stage::Evolve, e))?;
    let triplets: Vec<CorrelatedFockDensity> = states.iter().map(reduce_to_triplets).collect();

    let grid_points = if refine { 321 } else { 161 };
    let grid_l = (2.0 * n_t as f64).sqrt() + 4.0;
    let outcome_grid = OutcomeGrid::gauss_legendre(-grid_l, grid_l, grid_points);

    // cartesian product of detector outcomes, first detector slowest
    let combos: Vec<Vec<f64>> = {
        let mut acc: Vec<Vec<f64>> = vec![vec![]];
        for s in &scenario.conditioning {
            acc = acc
                .iter()
                .flat_map(|prefix| {
                    s.outcomes.iter().map(move |&o| {
                        let mut v = prefix.clone();
                        v.push(o);
                        v
                    })
                })
                .collect();
        }
        acc
    };

    let mut computed = Computed {
        cutoffs,
        scalar_rows: Vec::new(),
        steering_rows: Vec::new(),
        scan_rows: Vec::new(),
        wigner_files: Vec::new(),
        outcome_grid: (outcome_grid.lo, outcome_grid.hi, outcome_grid.points),
    };

    for (tau, rho_abc) in scenario.params.times.iter().zip(&triplets) {
        // per-time observables that ignore the conditioning plan
        for obs in &scenario.observables {
            match obs {
                ObservableSpec::Steering {
                    direction,
                    grid_points: gp,
                    c_conditioning,
                } => {
                    let grid = match gp {
                        Some(p) => {
                            let p = if refine { 2 * p - 1 } else { *p };
                            OutcomeGrid::gauss_legendre(-grid_l, grid_l, p)
                        }
                        None => outcome_grid.clone(),
                    };
                    let report = steering(
                        rho_abc,
                        *direction,
                        &grid,
                        &grid,
                        c_conditioning.unwrap_or_default(),
                    )
                    .map_err(|e| err(Stage::Observe, e))?;
                    computed.steering_rows.push(SteeringRow {
                        direction: *direction,
                        tau: *tau,
                        s: report.s,
                        var_x: report.var_x_inferred,
                        var_y: report.var_y_inferred,
                        commutator: report.commutator_expectation,
                    });
                }
                _ => {}
            }
        }

        for combo in &combos {
            let settings: Vec<HomodyneSetting> = scenario
                .conditioning
                .iter()
                .zip(combo)
                .map(|(s, &o)| HomodyneSetting::new(s.mode, s.quadrature, o))
                .collect();
            let conditional = if settings.is_empty() {
                None
            } else {
                Some(
                    condition(rho_abc, &settings)
                        .map_err(|e| err(Stage::Condition, e))?
                        .0,
                )
            };
            let outcome_cols: Vec<(String, f64)> = scenario
                .conditioning
                .iter()
                .zip(combo)
                .map(|(s, &o)| (s.column(), o))
                .collect();
            let context: String = std::iter::once(format!("tau={tau}"))
                .chain(outcome_cols.iter().map(|(k, v)| format!("{k}={v}")))
                .collect::<Vec<_>>()
                .join(" ");

            let mut values: Vec<(String, f64)> = Vec::new();
            for obs in &scenario.observables {
                eval_observable(
                    obs,
                    rho_abc,
                    conditional.as_ref(),
                    *tau,
                    &outcome_cols,
                    &context,
                    refine,
                    scenario,
                    &mut values,
                    &mut computed,
                )?;
            }
            if !values.is_empty() {
                computed.scalar_rows.push(ScalarRow {
                    tau: *tau,
                    outcomes: outcome_cols,
                    values,
                });
            }
        }
    }
    Ok(computed)
}

/// Remaining (unmeasured) mode labels after the conditioning plan.
fn remaining_modes(scenario: &Scenario) -> Vec<Mode> {
    [Mode::A, Mode::B, Mode::C]
        .into_iter()
        .filter(|m| !scenario.conditioning.iter().any(|s| s.mode == *m))
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn eval_observable(
    obs: &ObservableSpec,
    rho_abc: &CorrelatedFockDensity,
    conditional: Option<&CorrelatedFockDensity>,
    tau: f64,
    outcome_cols: &[(String, f64)],
    context: &str,
    refine: bool,
    scenario: &Scenario,
    values: &mut Vec<(String, f64)>,
    computed: &mut Computed,
) -> RunResult<()> {
    let need_cond = || -> RunResult<CorrelatedFockDensity> {
        let c = conditional.ok_or_else(|| {
            err(Stage::Observe, "observable needs a conditioning plan")
        })?;
        // trim negligible population before phase-space work
        c.truncate(c.effective_dim(1e-13))
            .map_err(|e| err(Stage::Observe, e))
    };
    match obs {
        ObservableSpec::Wigner { points, radius } => {
            if refine {
                return Ok(()); // grids are emitted from the base pass only
            }
            let rho = need_cond()?;
            let axis = axis_for(&rho, *points, *radius, 0.095);
            let modes = remaining_modes(scenario);
            if rho.m() == 1 {
                let grid = wigner(&rho, axis, axis).map_err(|e| err(Stage::Observe, e))?;
                let label = modes[0].label();
                let mut rows = Vec::with_capacity(axis.points * axis.points);
                for i in 0..axis.points {
                    for j in 0..axis.points {
                        rows.push(vec![axis.value(i), axis.value(j), grid.values[(i, j)]]);
                    }
                }
                computed.wigner_files.push(WignerFile {
                    name: wigner_file_name(tau, outcome_cols),
                    header: vec![format!("x_{label}"), format!("p_{label}"), "w".into()],
                    rows,
                    mass: grid.mass(),
                });
            } else {
                let grid = wigner_two_mode(&rho, axis, axis, axis, axis)
                    .map_err(|e| err(Stage::Observe, e))?;
                let (l0, l1) = (modes[0].label(), modes[1].label());
                let n = axis.points;
                let mut rows = Vec::with_capacity(n * n * n * n);
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            for l in 0..n {
                                let idx = ((i * n + j) * n + k) * n + l;
                                rows.push(vec![
                                    axis.value(i),
                                    axis.value(j),
                                    axis.value(k),
                                    axis.value(l),
                                    grid.values[idx],
                                ]);
                            }
                        }
                    }
                }
                computed.wigner_files.push(WignerFile {
                    name: wigner_file_name(tau, outcome_cols),
                    header: vec![
                        format!("x_{l0}"),
                        format!("p_{l0}"),
                        format!("x_{l1}"),
                        format!("p_{l1}"),
                        "w".into(),
                    ],
                    rows,
                    mass: grid.mass(),
                });
            }
        }
        ObservableSpec::Negativity { points, radius } => {
            let rho = need_cond()?;
            let n = if rho.m() == 1 {
                let mut axis = axis_for(&rho, *points, *radius, 0.095);
                if refine {
                    axis = axis.refined();
                }
                let grid = wigner(&rho, axis, axis).map_err(|e| err(Stage::Observe, e))?;
                negativity(&grid)
            } else {
                let radius = radius.unwrap_or((2.0 * rho.dim() as f64).sqrt() + 3.0);
                let base_points = points.unwrap_or(41);
                let pts = if refine { base_points + 20 } else { base_points };
                let axis = Axis::symmetric(radius, pts);
                let grid = wigner_two_mode(&rho, axis, axis, axis, axis)
                    .map_err(|e| err(Stage::Observe, e))?;
                negativity_two_mode(&grid)
            };
            values.push(("negativity".into(), n));
        }
        ObservableSpec::Macroscopicity { max_step, radius } => {
            let rho = need_cond()?;
            let step = max_step.unwrap_or(0.03) / if refine { 2.0 } else { 1.0 };
            let r = radius.unwrap_or((2.0 * rho.dim() as f64).sqrt() + 3.0);
            let points = 2 * (r / step).ceil() as usize + 1;
            let axis = Axis::symmetric(r, points);
            let grid = wigner(&rho, axis, axis).map_err(|e| err(Stage::Observe, e))?;
            let m = macroscopicity(&grid).map_err(|e| err(Stage::Observe, e))?;
            values.push(("macroscopicity".into(), m));
        }
        ObservableSpec::Purity => {
            values.push(("purity".into(), purity(&need_cond()?)));
        }
        ObservableSpec::UnconditionalPurity => {
            values.push(("purity_unconditional".into(), purity(rho_abc)));
        }
        ObservableSpec::CatFidelity { alpha } => {
            let f = cat_fidelity(&need_cond()?, *alpha).map_err(|e| err(Stage::Observe, e))?;
            values.push(("cat_fidelity".into(), f));
        }
        ObservableSpec::OptimalCatFidelity {
            alpha_lo,
            alpha_hi,
            tol,
        } => {
            let (f, a) = optimal_cat_fidelity(&need_cond()?, *alpha_lo, *alpha_hi, *tol)
                .map_err(|e| err(Stage::Observe, e))?;
            values.push(("optimal_fidelity".into(), f));
            values.push(("alpha_star".into(), a));
        }
        ObservableSpec::CatFidelityScan {
            alpha_lo,
            alpha_hi,
            steps,
        } => {
            let rho = need_cond()?;
            for i in 0..*steps {
                let a = alpha_lo + (alpha_hi - alpha_lo) * i as f64 / (*steps - 1) as f64;
                let f = cat_fidelity(&rho, a).map_err(|e| err(Stage::Observe, e))?;
                computed.scan_rows.push(ScanRow {
                    tau,
                    outcomes: outcome_cols.to_vec(),
                    alpha: a,
                    fidelity: f,
                });
            }
        }
        ObservableSpec::BellFidelity => {
            let f = fidelity(&need_cond()?, &crate::fock::bell_target())
                .map_err(|e| err(Stage::Observe, e))?;
            values.push(("bell_fidelity".into(), f));
        }
        ObservableSpec::QuditFidelity => {
            let f = fidelity(&need_cond()?, &crate::fock::qudit_target())
                .map_err(|e| err(Stage::Observe, e))?;
            values.push(("qudit_fidelity".into(), f));
        }
        ObservableSpec::DominantEigenvector { components } => {
            let (w, v) = dominant_eigenvector(&need_cond()?);
            values.push(("eig_weight".into(), w));
            for k in 0..*components {
                let amp = v.get(k).map(|c| c.norm()).unwrap_or(0.0);
                values.push((format!("eig_amp{k}"), amp));
            }
        }
        ObservableSpec::Squeezing { observable } => {
            let v = conditional_squeezing(rho_abc, *observable)
                .map_err(|e| err(Stage::Observe, e))?;
            let name = match observable {
                SqueezeObservable::PairBc { .. } => "v_bc",
                SqueezeObservable::SquaredAmp { .. } => "v_a2",
            };
            values.push((name.into(), v));
        }
        ObservableSpec::Steering { .. } => {} // handled per time
    }
    let _ = context;
    Ok(())
}

fn axis_for(
    rho: &CorrelatedFockDensity,
    points: Option<usize>,
    radius: Option<f64>,
    step_target: f64,
) -> Axis {
    let r = radius.unwrap_or((2.0 * rho.dim() as f64).sqrt() + 3.0);
    let p = points.unwrap_or(2 * (r / step_target).ceil() as usize + 1);
    Axis::symmetric(r, p)
}

fn wigner_file_name(tau: f64, outcomes: &[(String, f64)]) -> String {
    let mut name = format!("wigner_tau{}", fname_num(tau));
    for (col, v) in outcomes {
        name.push('_');
        name.push_str(&col.replace('_', ""));
        name.push_str(&fname_num(*v));
    }
    name.push_str(".csv");
    name
}

// ---------------------------------------------------------------------------
// convergence
// ---------------------------------------------------------------------------

#[derive(Debug, Serialize)]
pub struct ConvergenceEntry {
    pub observable: String,
    pub context: String,
    pub value: f64,
    pub refined_value: f64,
    pub shift: f64,
    pub tolerance: f64,
    pub converged: bool,
}

/// Shift tolerance each observable is allowed to consume, matching the
/// accuracy its figure-level claims rely on.
fn shift_tolerance(name: &str, value: f64) -> f64 {
    match name {
        "purity" | "purity_unconditional" => 1e-3,
        "cat_fidelity" | "optimal_fidelity" | "bell_fidelity" | "qudit_fidelity" => 0.03,
        "alpha_star" => 0.2,
        "negativity" => (0.05 * value.abs()).max(0.02),
        "macroscopicity" => (0.01 * value.abs()).max(0.01),
        "s" => 0.01,
        "v_bc" | "v_a2" => 0.01,
        "cat_fidelity_scan" => 0.03,
        _ if name.starts_with("eig_") => 0.04,
        _ => 0.01,
    }
}

fn convergence_entries(base: &Computed, refined: &Computed) -> Vec<ConvergenceEntry> {
    let mut entries = Vec::new();
    let mut push = |observable: String, context: String, value: f64, refined_value: f64| {
        let shift = (value - refined_value).abs();
        let tolerance = shift_tolerance(&observable, value);
        entries.push(ConvergenceEntry {
            observable,
            context,
            value,
            refined_value,
            shift,
            tolerance,
            converged: shift <= tolerance,
        });
    };
    for (b, r) in base.scalar_rows.iter().zip(&refined.scalar_rows) {
        let context: String = std::iter::once(format!("tau={}", b.tau))
            .chain(b.outcomes.iter().map(|(k, v)| format!("{k}={v}")))
            .collect::<Vec<_>>()
            .join(" ");
        for ((name, v), (_, rv)) in b.values.iter().zip(&r.values) {
            push(name.clone(), context.clone(), *v, *rv);
        }
    }
    for (b, r) in base.steering_rows.iter().zip(&refined.steering_rows) {
        push(
            "s".into(),
            format!("tau={} direction={:?}", b.tau, b.direction),
            b.s,
            r.s,
        );
    }
    if !base.scan_rows.is_empty() {
        let max_shift = base
            .scan_rows
            .iter()
            .zip(&refined.scan_rows)
            .map(|(b, r)| (b.fidelity - r.fidelity).abs())
            .fold(0.0_f64, f64::max);
        push(
            "cat_fidelity_scan".into(),
            "pointwise max over scan".into(),
            0.0,
            max_shift,
        );
    }
    entries
}

// ---------------------------------------------------------------------------
// output
// ---------------------------------------------------------------------------

fn fmt_sig(v: f64) -> String {
    format!("{v:.11e}")
}

fn csv(header: &str, name: &str, comment_lines: &[String], rows: &[Vec<f64>]) -> String {
    let mut s = String::new();
    s.push_str(&format!("# {name}\n"));
    for line in comment_lines {
        s.push_str(&format!("# {line}\n"));
    }
    s.push_str(header);
    s.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| fmt_sig(*v)).collect();
        s.push_str(&cells.join(","));
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct Manifest<'a> {
    name: &'a str,
    config_version: u32,
    config_format: &'static str,
    tool: ToolInfo,
    scenario: &'a Scenario,
    cutoffs: FockCutoffs,
    outcome_grid: GridInfo,
    wigner_masses: Vec<WignerMass>,
    convergence: Vec<&'a ConvergenceEntry>,
    all_converged: bool,
    outputs: Vec<String>,
    wall_time_s: f64,
}

#[derive(Serialize)]
struct ToolInfo {
    name: &'static str,
    version: &'static str,
}

#[derive(Serialize)]
struct GridInfo {
    lo: f64,
    hi: f64,
    points: usize,
    rule: &'static str,
}

#[derive(Serialize)]
struct WignerMass {
    file: String,
    mass: f64,
}

fn write_outputs(
    scenario: &Scenario,
    base: &Computed,
    convergence: &[ConvergenceEntry],
    out_dir: &Path,
    wall_time_s: f64,
) -> RunResult<RunSummary> {
    std::fs::create_dir_all(out_dir).map_err(|e| err(Stage::Write, e))?;
    let mut files: Vec<String> = Vec::new();
    let w = |name: &str, content: String, files: &mut Vec<String>| -> RunResult<()> {
        std::fs::write(out_dir.join(name), content).map_err(|e| err(Stage::Write, e))?;
        files.push(name.to_string());
        Ok(())
    };

    // per-state scalars
    if !base.scalar_rows.is_empty() {
        let first = &base.scalar_rows[0];
        let mut header: Vec<String> = vec!["tau".into()];
        header.extend(first.outcomes.iter().map(|(k, _)| k.clone()));
        header.extend(first.values.iter().map(|(k, _)| k.clone()));
        let rows: Vec<Vec<f64>> = base
            .scalar_rows
            .iter()
            .map(|row| {
                let mut r = vec![row.tau];
                r.extend(row.outcomes.iter().map(|(_, v)| *v));
                r.extend(row.values.iter().map(|(_, v)| *v));
                r
            })
            .collect();
        w(
            "observables.csv",
            csv(
                &header.join(","),
                &format!("scenario {}", scenario.name),
                &[format!(
                    "cutoffs n_t_max={} n_p_max={}",
                    base.cutoffs.n_t_max, base.cutoffs.n_p_max
                )],
                &rows,
            ),
            &mut files,
        )?;
    }

    // steering curves, one file per direction
    for direction in [SteeringDirection::AToBc, SteeringDirection::BToA] {
        let rows: Vec<Vec<f64>> = base
            .steering_rows
            .iter()
            .filter(|r| r.direction == direction)
            .map(|r| vec![r.tau, r.s, r.var_x, r.var_y, r.commutator])
            .collect();
        if rows.is_empty() {
            continue;
        }
        let fname = match direction {
            SteeringDirection::AToBc => "steering_a_to_bc.csv",
            SteeringDirection::BToA => "steering_b_to_a.csv",
        };
        w(
            fname,
            csv(
                "tau,s,var_x_inferred,var_y_inferred,commutator",
                &format!("scenario {}", scenario.name),
                &[format!(
                    "outcome grid [{}, {}] with {} Gauss-Legendre nodes",
                    base.outcome_grid.0, base.outcome_grid.1, base.outcome_grid.2
                )],
                &rows,
            ),
            &mut files,
        )?;
    }

    // fidelity-versus-amplitude scan
    if !base.scan_rows.is_empty() {
        let mut header: Vec<String> = vec!["tau".into()];
        header.extend(base.scan_rows[0].outcomes.iter().map(|(k, _)| k.clone()));
        header.push("alpha".into());
        header.push("fidelity".into());
        let rows: Vec<Vec<f64>> = base
            .scan_rows
            .iter()
            .map(|r| {
                let mut row = vec![r.tau];
                row.extend(r.outcomes.iter().map(|(_, v)| *v));
                row.push(r.alpha);
                row.push(r.fidelity);
                row
            })
            .collect();
        w(
            "cat_fidelity_scan.csv",
            csv(
                &header.join(","),
                &format!("scenario {}", scenario.name),
                &[],
                &rows,
            ),
            &mut files,
        )?;
    }

    // wigner grids
    for grid in &base.wigner_files {
        w(
            &grid.name,
            csv(
                &grid.header.join(","),
                &format!("scenario {}", scenario.name),
                &[format!("grid mass {}", fmt_sig(grid.mass))],
                &grid.rows,
            ),
            &mut files,
        )?;
    }

    // schema sanity before declaring success: column counts and finiteness
    for name in &files {
        let content =
            std::fs::read_to_string(out_dir.join(name)).map_err(|e| err(Stage::Write, e))?;
        check_csv_schema(name, &content).map_err(|m| err(Stage::Write, m))?;
    }

    let all_converged = convergence.iter().all(|c| c.converged);
    let manifest = Manifest {
        name: &scenario.name,
        config_version: CONFIG_VERSION,
        config_format: "toml",
        tool: ToolInfo {
            name: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
        },
        scenario,
        cutoffs: base.cutoffs,
        outcome_grid: GridInfo {
            lo: base.outcome_grid.0,
            hi: base.outcome_grid.1,
            points: base.outcome_grid.2,
            rule: "gauss-legendre",
        },
        wigner_masses: base
            .wigner_files
            .iter()
            .map(|g| WignerMass {
                file: g.name.clone(),
                mass: g.mass,
            })
            .collect(),
        convergence: convergence.iter().collect(),
        all_converged,
        outputs: files.clone(),
        wall_time_s,
    };
    let manifest_json =
        serde_json::to_string_pretty(&manifest).map_err(|e| err(Stage::Write, e))?;
    std::fs::write(out_dir.join("manifest.json"), manifest_json)
        .map_err(|e| err(Stage::Write, e))?;
    files.push("manifest.json".into());

    Ok(RunSummary {
        name: scenario.name.clone(),
        out_dir: out_dir.to_path_buf(),
        files,
        wall_time_s,
        all_converged,
    })
}

/// Every emitted CSV must have a consistent column count and finite values.
fn check_csv_schema(name: &str, content: &str) -> Result<(), String> {
    let mut cols = None;
    for (i, line) in content.lines().enumerate() {
        if line.starts_with('#') {
            continue;
        }
        let n = line.split(',').count();
        match cols {
            None => cols = Some(n),
            Some(c) if c != n => {
                return Err(format!("{name}: line {} has {n} columns, expected {c}", i + 1))
            }
            _ => {}
        }
        for cell in line.split(',') {
            if cell.parse::<f64>().map(|v| !v.is_finite()).unwrap_or(false) {
                return Err(format!("{name}: non-finite value on line {}", i + 1));
            }
        }
    }
    Ok(())
}
