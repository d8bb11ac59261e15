//! Higher-order steering from homodyne-inferred variances, and conditional
//! higher-order squeezing.
//!
//! Steering from `a` to the pair `(b, c)` compares the ensemble-averaged
//! inferred variances of `X_bc` and `Y_bc` (conditioned on `x_a` and `y_a`
//! homodyne records) against the commutator bound:
//! `S = 2 sqrt(<Var(X_bc|x_a)>_e <Var(Y_bc|y_a)>_e) / <|[X_bc, Y_bc]|>_e`,
//! with steering present iff `S < 1`. The `b -> a` direction replaces the
//! pair quadratures by the squared amplitudes of mode `a` inside the
//! conditional state `rho_ab(x_c = 0)`.

use crate::conditioning::{condition, ensemble_average, HomodyneSetting, OutcomeGrid};
use crate::error::{Error, Result};
use crate::fock::{CorrelatedFockDensity, Mode, Quadrature};
use crate::observables::moments::{quadrature_stats, LadderOp};

/// Which steering quantity to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SteeringDirection {
    /// Mode `a` steers the pair `(b, c)`: inferred variances of `X_bc`, `Y_bc`.
    AToBc,
    /// Mode `b` steers mode `a` inside `rho_ab(x_c = 0)`: inferred variances
    /// of the squared amplitudes `X_{a^2}`, `Y_{a^2}`.
    BToA,
}

/// How mode `c` is pinned for the `b -> a` direction. The default follows
/// the fixed `x_c = 0` reading; the alternative conditions `c` in the `Y`
/// quadrature for the `Y`-variance branch instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeCConditioning {
    XAtZero,
    MatchedQuadrature,
}

impl Default for ModeCConditioning {
    fn default() -> Self {
        ModeCConditioning::XAtZero
    }
}

/// Result of one steering evaluation; `s` is recomputable from the stored
/// fields.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SteeringReport {
    pub direction: SteeringDirection,
    pub s: f64,
    pub var_x_inferred: f64,
    pub var_y_inferred: f64,
    pub commutator_expectation: f64,
    /// `(lo, hi, points)` of the outcome grids used per branch.
    pub x_grid: (f64, f64, usize),
    pub y_grid: (f64, f64, usize),
}

impl SteeringReport {
    /// `|S - 2 sqrt(vx vy)/comm|`, zero up to rounding by construction.
    pub fn consistency_residual(&self) -> f64 {
        (self.s
            - 2.0 * (self.var_x_inferred * self.var_y_inferred).sqrt()
                / self.commutator_expectation)
            .abs()
    }
}

fn branch(
    parent: &CorrelatedFockDensity,
    measured: Quadrature,
    grid: &OutcomeGrid,
    op: LadderOp,
    target: Quadrature,
) -> Result<(f64, f64)> {
    let var = ensemble_average(parent, measured, grid, |cond| {
        quadrature_stats(cond, target, op)
            .expect("conditioning drops exactly one replicated mode")
            .variance
    })?;
    let comm = ensemble_average(parent, measured, grid, |cond| {
        quadrature_stats(cond, target, op)
            .expect("conditioning drops exactly one replicated mode")
            .commutator
    })?;
    Ok((var, comm))
}

/// Evaluate the steering quantity for either direction from the full
/// triplet state `rho_abc`.
pub fn steering(
    rho_abc: &CorrelatedFockDensity,
    direction: SteeringDirection,
    x_grid: &OutcomeGrid,
    y_grid: &OutcomeGrid,
    c_mode: ModeCConditioning,
) -> Result<SteeringReport> {
    if rho_abc.m() != 3 {
        return Err(Error::InvalidParams(format!(
            "steering starts from the full triplet state (m = 3, got {})",
            rho_abc.m()
        )));
    }
    let (var_x, var_y, comm_x, comm_y, unconditional_comm) = match direction {
        SteeringDirection::AToBc => {
            let (vx, cx) = branch(rho_abc, Quadrature::X, x_grid, LadderOp::Pair, Quadrature::X)?;
            let (vy, cy) = branch(rho_abc, Quadrature::Y, y_grid, LadderOp::Pair, Quadrature::Y)?;
            // unconditional |<[X_bc, Y_bc]>| = <n> + 1/2 per remaining mode
            let unc = rho_abc.mean_occupation() + 0.5;
            (vx, vy, cx, cy, unc)
        }
        SteeringDirection::BToA => {
            let (parent_x, _) = condition(
                rho_abc,
                &[HomodyneSetting::new(Mode::C, Quadrature::X, 0.0)],
            )?;
            let parent_y = match c_mode {
                ModeCConditioning::XAtZero => parent_x.clone(),
                ModeCConditioning::MatchedQuadrature => {
                    condition(
                        rho_abc,
                        &[HomodyneSetting::new(Mode::C, Quadrature::Y, 0.0)],
                    )?
                    .0
                }
            };
            let (vx, cx) = branch(&parent_x, Quadrature::X, x_grid, LadderOp::Squared, Quadrature::X)?;
            let (vy, cy) = branch(&parent_y, Quadrature::Y, y_grid, LadderOp::Squared, Quadrature::Y)?;
            let unc = 2.0 * parent_x.mean_occupation() + 1.0;
            (vx, vy, cx, cy, unc)
        }
    };
    // law of total expectation: the ensemble-averaged conditional commutator
    // must reproduce the unconditional one (cross-check of the machinery)
    if (comm_x - unconditional_comm).abs() > 1e-8 * unconditional_comm.max(1.0) {
        return Err(Error::InvalidParams(format!(
            "ensemble-averaged commutator {comm_x} drifted from unconditional {unconditional_comm}"
        )));
    }
    let commutator = 0.5 * (comm_x + comm_y);
    let s = 2.0 * (var_x * var_y).sqrt() / commutator;
    Ok(SteeringReport {
        direction,
        s,
        var_x_inferred: var_x,
        var_y_inferred: var_y,
        commutator_expectation: commutator,
        x_grid: (x_grid.lo, x_grid.hi, x_grid.points),
        y_grid: (y_grid.lo, y_grid.hi, y_grid.points),
    })
}

/// Which conditional higher-order squeezing parameter to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case", tag = "which")]
pub enum SqueezeObservable {
    /// `V_bc = Var(X_bc | x_a) / |<[X_bc, Y_bc]>|` in the pair state
    /// conditioned on `x_a`.
    PairBc { x_a: f64 },
    /// `V_{a^2} = Var(X_{a^2} | x_b, x_c) / |<[X_{a^2}, Y_{a^2}]>|` in the
    /// single-mode state conditioned on `(x_b, x_c)`.
    SquaredAmp { x_b: f64, x_c: f64 },
}

/// Conditional higher-order squeezing parameter; squeezing is present iff
/// the returned value is below 1/2.
pub fn conditional_squeezing(
    rho_abc: &CorrelatedFockDensity,
    observable: SqueezeObservable,
) -> Result<f64> {
    if rho_abc.m() != 3 {
        return Err(Error::InvalidParams(format!(
            "conditional squeezing starts from the full triplet state (m = 3, got {})",
            rho_abc.m()
        )));
    }
    let (conditional, op) = match observable {
        SqueezeObservable::PairBc { x_a } => {
            let (cond, _) = condition(
                rho_abc,
                &[HomodyneSetting::new(Mode::A, Quadrature::X, x_a)],
            )?;
            (cond, LadderOp::Pair)
        }
        SqueezeObservable::SquaredAmp { x_b, x_c } => {
            let (cond, _) = condition(
                rho_abc,
                &[
                    HomodyneSetting::new(Mode::B, Quadrature::X, x_b),
                    HomodyneSetting::new(Mode::C, Quadrature::X, x_c),
                ],
            )?;
            (cond, LadderOp::Squared)
        }
    };
    let stats = quadrature_stats(&conditional, Quadrature::X, op)?;
    Ok(stats.variance / stats.commutator)
}
