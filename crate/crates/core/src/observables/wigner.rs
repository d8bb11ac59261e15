//! Wigner functions on the replicated Fock basis, their negativity, and the
//! phase-space macroscopicity measure.
//!
//! Grids store the position-momentum Wigner function `W(x, p)` in the
//! `beta = (x + i p)/sqrt(2)` convention, normalized so that
//! `sum W dx dp = 1` (vacuum peak `1/pi`). In that convention the
//! `d^2 beta = dx dp / 2` measure and the factor-of-two density rescaling
//! cancel, so negativity and macroscopicity integrals evaluated with the
//! plain `dx dp` measure reproduce the `d^2 beta` definitions.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::CorrelatedFockDensity;

/// Uniform phase-space axis.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn symmetric(radius: f64, points: usize) -> Self {
        assert!(points >= 3 && radius > 0.0);
        Self {
            min: -radius,
            max: radius,
            points,
        }
    }

    /// Axis covering a state with `dim` Fock levels: radius
    /// `sqrt(2 dim) + 3`, step at most ~0.095.
    pub fn covering(dim: usize) -> Self {
        let radius = (2.0 * dim as f64).sqrt() + 3.0;
        let points = 2 * (radius / 0.095).ceil() as usize + 1;
        Self::symmetric(radius, points)
    }

    pub fn step(&self) -> f64 {
        (self.max - self.min) / (self.points - 1) as f64
    }

    pub fn value(&self, i: usize) -> f64 {
        self.min + i as f64 * self.step()
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.value(i)).collect()
    }

    /// Same span with roughly half the step (refinement probes).
    pub fn refined(&self) -> Self {
        Self {
            min: self.min,
            max: self.max,
            points: 2 * self.points - 1,
        }
    }
}

/// Single-mode Wigner function sampled on a rectangular grid.
#[derive(Debug, Clone)]
pub struct WignerGrid {
    pub x_axis: Axis,
    pub p_axis: Axis,
    /// `values[(i, j)] = W(x_i, p_j)`.
    pub values: DMatrix<f64>,
}

impl WignerGrid {
    /// `sum W dx dp`; equals 1 for a state the axes cover.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.x_axis.step() * self.p_axis.step()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Two-mode Wigner function on a replicated pair state, flattened over
/// `(x_b, p_b, x_c, p_c)`.
#[derive(Debug, Clone)]
pub struct WignerGrid4 {
    pub xb_axis: Axis,
    pub pb_axis: Axis,
    pub xc_axis: Axis,
    pub pc_axis: Axis,
    /// Row-major over `(i_xb, i_pb, i_xc, i_pc)`.
    pub values: Vec<f64>,
}

impl WignerGrid4 {
    pub fn cell_volume(&self) -> f64 {
        self.xb_axis.step() * self.pb_axis.step() * self.xc_axis.step() * self.pc_axis.step()
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }
}

/// Fock matrix elements of the displacement operator, `D[j][i] = <j|D(gamma)|i>`,
/// evaluated by stable associated-Laguerre recurrences.
fn displacement_elements(dim: usize, gamma: C64) -> DMatrix<C64> {
    let z = gamma.norm_sqr();
    let envelope = (-0.5 * z).exp();
    let mut d = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for k in 0..dim {
        // scaled off-diagonal prefactors sqrt(m!/(m+k)!)
        let mut scale = (1..=k).map(|j| (j as f64).sqrt().recip()).product::<f64>();
        let gamma_k = gamma.powu(k as u32);
        let gamma_k_conj = (-gamma.conj()).powu(k as u32);
        // associated Laguerre L_m^{(k)}(z) by the three-term recurrence
        let mut l_prev = 0.0_f64;
        let mut l_curr = 1.0_f64;
        for m in 0..dim - k {
            if m > 0 {
                let mf = m as f64;
                let l_next =
                    ((2.0 * mf - 1.0 + k as f64 - z) * l_curr - (mf - 1.0 + k as f64) * l_prev)
                        / mf;
                l_prev = l_curr;
                l_curr = l_next;
                scale *= (mf / (mf + k as f64)).sqrt();
            }
            let base = envelope * scale * l_curr;
            d[(m + k, m)] = gamma_k * base;
            d[(m, m + k)] = gamma_k_conj * base;
        }
    }
    d
}

/// Single-mode Fock Wigner kernel `K[n][n'](beta)` such that
/// `W(beta) = sum_{n,n'} rho[n,n'] K[n][n']` in the `d^2 beta` normalization;
/// `K` is Hermitian in `(n, n')`.
fn wigner_kernel(dim: usize, beta: C64) -> DMatrix<C64> {
    let d = displacement_elements(dim, 2.0 * beta);
    let scale = 2.0 / std::f64::consts::PI;
    DMatrix::from_fn(dim, dim, |n, n2| {
        let parity = if n % 2 == 0 { 1.0 } else { -1.0 };
        scale * parity * d[(n2, n)]
    })
}

fn beta_of(x: f64, p: f64) -> C64 {
    C64::new(x, p) / std::f64::consts::SQRT_2
}

/// Wigner function of a single-mode state on the given axes, by the
/// displaced-parity Fock kernel.
///
/// Fails if the axes miss enough of the state that the grid mass deviates
/// from one by more than `1e-3`.
pub fn wigner(rho: &CorrelatedFockDensity, x_axis: Axis, p_axis: Axis) -> Result<WignerGrid> {
    if rho.m() != 1 {
        return Err(Error::InvalidParams(format!(
            "single-mode Wigner function needs m = 1 (got m = {})",
            rho.m()
        )));
    }
    let dim = rho.dim();
    let xs = x_axis.values();
    let ps = p_axis.values();
    let rows: Vec<Vec<f64>> = xs
        .par_iter()
        .map(|&x| {
            ps.iter()
                .map(|&p| {
                    let kernel = wigner_kernel(dim, beta_of(x, p));
                    let mut acc = C64::new(0.0, 0.0);
                    for n in 0..dim {
                        for n2 in 0..dim {
                            acc += rho.entry(n, n2) * kernel[(n, n2)];
                        }
                    }
                    // beta-density to (x, p)-density
                    0.5 * acc.re
                })
                .collect()
        })
        .collect();
    let values = DMatrix::from_fn(xs.len(), ps.len(), |i, j| rows[i][j]);
    let grid = WignerGrid {
        x_axis,
        p_axis,
        values,
    };
    let mass = grid.mass();
    if (mass - 1.0).abs() > 1e-3 {
        return Err(Error::AxesTooSmall { mass, tol: 1e-3 });
    }
    Ok(grid)
}

/// Point evaluation of the single-mode Wigner function through the cited
/// characteristic-function Fourier route:
/// `W(beta) = (1/pi^2) int chi(xi) e^{beta xi* - beta* xi} d^2 xi` with
/// `chi(xi) = Tr[rho D(xi)]`, integrated numerically.
///
/// Slow by design; it exists as the independent cross-check of the kernel
/// route.
pub fn wigner_via_characteristic(rho: &CorrelatedFockDensity, x: f64, p: f64) -> f64 {
    let dim = rho.dim();
    let beta = beta_of(x, p);
    // chi decays like e^{-|xi|^2/2} times a polynomial of degree 2 dim
    let radius = (2.0 * dim as f64).sqrt() + 5.0;
    let n_nodes = 201usize;
    let grid = crate::conditioning::OutcomeGrid::gauss_legendre(-radius, radius, n_nodes);
    let chi = |xi: C64| -> C64 {
        let d = displacement_elements(dim, xi);
        let mut acc = C64::new(0.0, 0.0);
        for n in 0..dim {
            for n2 in 0..dim {
                acc += rho.entry(n, n2) * d[(n2, n)];
            }
        }
        acc
    };
    let mut w = C64::new(0.0, 0.0);
    for &(u, wu) in grid.nodes() {
        let mut inner = C64::new(0.0, 0.0);
        for &(v, wv) in grid.nodes() {
            let xi = C64::new(u, v);
            // beta xi* - beta* xi = 2 i Im(beta xi*)
            let phase = C64::new(0.0, 2.0 * (beta.im * u - beta.re * v)).exp();
            inner += wv * chi(xi) * phase;
        }
        w += wu * inner;
    }
    // (1/pi^2) for the transform, 1/2 for the (x,p) density
    0.5 * w.re / (std::f64::consts::PI * std::f64::consts::PI)
}

/// Two-mode Wigner function of a replicated pair state by the product of
/// single-mode kernels over the shared index.
pub fn wigner_two_mode(
    rho: &CorrelatedFockDensity,
    xb_axis: Axis,
    pb_axis: Axis,
    xc_axis: Axis,
    pc_axis: Axis,
) -> Result<WignerGrid4> {
    if rho.m() != 2 {
        return Err(Error::InvalidParams(format!(
            "two-mode Wigner function needs m = 2 (got m = {})",
            rho.m()
        )));
    }
    let dim = rho.dim();
    // kernels per phase-space point of each mode
    let kernels_for = |xa: &Axis, pa: &Axis| -> Vec<DMatrix<C64>> {
        let xs = xa.values();
        let ps = pa.values();
        xs.par_iter()
            .flat_map_iter(|&x| {
                ps.iter()
                    .map(|&p| wigner_kernel(dim, beta_of(x, p)))
                    .collect::<Vec<_>>()
            })
            .collect()
    };
    let kb = kernels_for(&xb_axis, &pb_axis);
    let kc = kernels_for(&xc_axis, &pc_axis);
    let nb = kb.len();
    let nc = kc.len();
    let kc_ref = &kc;
    let values: Vec<f64> = (0..nb)
        .into_par_iter()
        .flat_map_iter(|ib| {
            let kb_ib = &kb[ib];
            (0..nc).map(move |ic| {
                let kc_ic = &kc_ref[ic];
                let mut acc = C64::new(0.0, 0.0);
                for n in 0..dim {
                    for n2 in 0..dim {
                        acc += rho.entry(n, n2) * kb_ib[(n, n2)] * kc_ic[(n, n2)];
                    }
                }
                // two Jacobian halves: beta_b and beta_c
                0.25 * acc.re
            })
        })
        .collect();
    let grid = WignerGrid4 {
        xb_axis,
        pb_axis,
        xc_axis,
        pc_axis,
        values,
    };
    let mass = grid.mass();
    if (mass - 1.0).abs() > 1e-2 {
        return Err(Error::AxesTooSmall { mass, tol: 1e-2 });
    }
    Ok(grid)
}

/// Wigner negativity `int (|W| - W) d^2 beta` of a single-mode grid.
pub fn negativity(grid: &WignerGrid) -> f64 {
    grid.values
        .iter()
        .map(|&w| w.abs() - w)
        .sum::<f64>()
        * grid.x_axis.step()
        * grid.p_axis.step()
}

/// Wigner negativity of a two-mode grid.
pub fn negativity_two_mode(grid: &WignerGrid4) -> f64 {
    grid.values.iter().map(|&w| w.abs() - w).sum::<f64>() * grid.cell_volume()
}

/// Phase-space macroscopicity
/// `(pi/2) int W (-d^2/(d beta d beta*) - 1) W d^2 beta`, evaluated with
/// second-order central differences on the interior of the grid
/// (`d^2/(d beta d beta*) = (1/2) Laplacian` in the `(x, p)` convention).
///
/// Requires step sizes of at most 0.1.
pub fn macroscopicity(grid: &WignerGrid) -> Result<f64> {
    const MAX_STEP: f64 = 0.1;
    let hx = grid.x_axis.step();
    let hp = grid.p_axis.step();
    let step = hx.max(hp);
    if step > MAX_STEP {
        return Err(Error::GridTooCoarse {
            step,
            max_step: MAX_STEP,
        });
    }
    let w = &grid.values;
    let (nx, np) = (w.nrows(), w.ncols());
    let mut acc = 0.0;
    for i in 1..nx - 1 {
        for j in 1..np - 1 {
            let lap = (w[(i + 1, j)] - 2.0 * w[(i, j)] + w[(i - 1, j)]) / (hx * hx)
                + (w[(i, j + 1)] - 2.0 * w[(i, j)] + w[(i, j - 1)]) / (hp * hp);
            acc += w[(i, j)] * (-0.5 * lap - w[(i, j)]);
        }
    }
    Ok(std::f64::consts::PI * acc * hx * hp)
}
