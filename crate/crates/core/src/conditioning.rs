//! Homodyne projection of replicated-index density matrices onto quadrature
//! outcomes, outcome probability densities, and ensemble averages over all
//! possible outcomes.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{
    hermite_functions, quadrature_eigenfunctions, CorrelatedFockDensity, Mode, Quadrature,
};

/// Conditional densities below this trace signal a non-normalizable
/// projection instead of returning noise.
const ZERO_TRACE_THRESHOLD: f64 = 1e-300;

/// One homodyne detector: which mode it sits on, which quadrature it
/// measures, and the recorded outcome (sqrt(2)-normalized convention).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HomodyneSetting {
    pub mode: Mode,
    pub quadrature: Quadrature,
    pub outcome: f64,
}

impl HomodyneSetting {
    pub fn new(mode: Mode, quadrature: Quadrature, outcome: f64) -> Self {
        Self {
            mode,
            quadrature,
            outcome,
        }
    }
}

/// Quadrature rule identifier for outcome integration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QuadRule {
    GaussLegendre,
}

/// Outcome-integration grid for ensemble averages.
#[derive(Debug, Clone, serde::Serialize)]
pub struct OutcomeGrid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub rule: QuadRule,
    #[serde(skip)]
    nodes: Vec<(f64, f64)>,
}

impl OutcomeGrid {
    /// Gauss-Legendre rule with `points` nodes on `[lo, hi]`.
    pub fn gauss_legendre(lo: f64, hi: f64, points: usize) -> Self {
        let nodes = gauss_legendre_nodes(points)
            .into_iter()
            .map(|(x, w)| {
                let mid = 0.5 * (lo + hi);
                let half = 0.5 * (hi - lo);
                (mid + half * x, half * w)
            })
            .collect();
        Self {
            lo,
            hi,
            points,
            rule: QuadRule::GaussLegendre,
            nodes,
        }
    }

    /// Default grid for a state truncated at `n_t_max`: 161 Gauss-Legendre
    /// points on `[-L, L]` with `L = sqrt(2 n_t_max) + 4`, beyond which the
    /// outcome envelope of such a state is negligible.
    pub fn default_for_cutoff(n_t_max: usize) -> Self {
        let l = (2.0 * n_t_max as f64).sqrt() + 4.0;
        Self::gauss_legendre(-l, l, 161)
    }

    /// Same bounds, roughly doubled node count (convergence probes).
    pub fn refined(&self) -> Self {
        Self::gauss_legendre(self.lo, self.hi, 2 * self.points - 1)
    }

    /// `(node, weight)` pairs in ascending node order.
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// by Newton iteration on the Legendre recurrence.
fn gauss_legendre_nodes(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 2, "a quadrature rule needs at least two nodes");
    let mut out = vec![(0.0, 0.0); n];
    let m = n.div_ceil(2);
    for k in 0..m {
        let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 1..n {
                let p2 = ((2 * j + 1) as f64 * x * p1 - j as f64 * p0) / (j + 1) as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[k] = (-x.abs(), w);
        out[n - 1 - k] = (x.abs(), w);
    }
    if n % 2 == 1 {
        // enforce the exact central node
        let k = n / 2;
        out[k].0 = 0.0;
    }
    out
}

/// Project `rho` onto the quadrature outcomes of one or two homodyne
/// detectors on distinct modes.
///
/// Returns the normalized conditional state on the remaining replicated
/// modes together with the joint outcome probability density (the trace of
/// the unnormalized projection). Both detectors enter as a single product of
/// overlap factors, so the result is independent of detector order.
pub fn condition(
    rho: &CorrelatedFockDensity,
    settings: &[HomodyneSetting],
) -> Result<(CorrelatedFockDensity, f64)> {
    if settings.is_empty() || settings.len() >= rho.m() {
        return Err(Error::InvalidParams(format!(
            "need 1..={} detectors for an m = {} state (got {})",
            rho.m() - 1,
            rho.m(),
            settings.len()
        )));
    }
    for (i, s) in settings.iter().enumerate() {
        if settings[..i].iter().any(|prev| prev.mode == s.mode) {
            return Err(Error::InvalidParams(format!(
                "mode {} measured twice",
                s.mode.label()
            )));
        }
    }
    let d = rho.dim();
    // combined per-index overlap factor: prod_s <x_s, theta_s | n>
    let mut factor = vec![C64::new(1.0, 0.0); d];
    for s in settings {
        let phi = quadrature_eigenfunctions(d - 1, s.outcome, s.quadrature);
        for (f, p) in factor.iter_mut().zip(&phi) {
            *f *= p;
        }
    }
    let mut projected = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    let mut density = 0.0;
    for n in 0..d {
        for n2 in 0..d {
            projected[(n, n2)] = rho.entry(n, n2) * factor[n] * factor[n2].conj();
        }
        density += projected[(n, n)].re;
    }
    if !(density > ZERO_TRACE_THRESHOLD) {
        return Err(Error::ZeroTraceConditioning { density });
    }
    let conditional = CorrelatedFockDensity::new(rho.m() - settings.len(), projected)?;
    Ok((conditional, density))
}

/// Outcome probability density `P(r)` for homodyning one of the replicated
/// modes of `rho` in the given quadrature.
///
/// For a single-mode state the coherences contribute; with two or more
/// replicated modes the unmeasured copies are orthogonal between different
/// occupation numbers, so only the diagonal survives.
pub fn outcome_density(rho: &CorrelatedFockDensity, quadrature: Quadrature, r: f64) -> f64 {
    let d = rho.dim();
    if rho.m() == 1 {
        let phi = quadrature_eigenfunctions(d - 1, r, quadrature);
        let mut p = C64::new(0.0, 0.0);
        for n in 0..d {
            for n2 in 0..d {
                p += rho.entry(n, n2) * phi[n] * phi[n2].conj();
            }
        }
        p.re
    } else {
        let psi = hermite_functions(d - 1, r);
        rho.diagonal()
            .iter()
            .zip(&psi)
            .map(|(p, f)| p * f * f)
            .sum()
    }
}

/// Sampled outcome density on a grid's nodes.
pub fn outcome_density_on(
    rho: &CorrelatedFockDensity,
    quadrature: Quadrature,
    grid: &OutcomeGrid,
) -> Vec<f64> {
    grid.nodes()
        .iter()
        .map(|&(r, _)| outcome_density(rho, quadrature, r))
        .collect()
}

/// Ensemble average `int dr P(r) statistic(rho_con(r))` over all homodyne
/// outcomes of one replicated mode, using the grid's quadrature rule with a
/// fixed summation order.
///
/// Outcomes with vanishing density contribute nothing. Fails if the grid
/// captures less than `1 - 1e-6` of the outcome probability mass.
pub fn ensemble_average<F>(
    rho: &CorrelatedFockDensity,
    quadrature: Quadrature,
    grid: &OutcomeGrid,
    statistic: F,
) -> Result<f64>
where
    F: Fn(&CorrelatedFockDensity) -> f64,
{
    const REQUIRED_MASS: f64 = 1.0 - 1e-6;
    let probe = HomodyneSetting::new(Mode::A, quadrature, 0.0);
    let mut acc = 0.0;
    let mut mass = 0.0;
    for &(r, w) in grid.nodes() {
        match condition(rho, &[HomodyneSetting { outcome: r, ..probe }]) {
            Ok((conditional, density)) => {
                mass += w * density;
                acc += w * density * statistic(&conditional);
            }
            Err(Error::ZeroTraceConditioning { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if mass < REQUIRED_MASS {
        return Err(Error::GridMassDeficient {
            captured: mass,
            required: REQUIRED_MASS,
        });
    }
    Ok(acc)
}
