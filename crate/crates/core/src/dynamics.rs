//! Joint-state evolution under the triple-photon downconversion interaction
//! with a quantized, depletable pump.
//!
//! The interaction `i chi (a^dag b^dag c^dag p - a b c p^dag)` conserves the
//! photon-number differences among the triplet modes and the total
//! `n_a + n_p`, so a pump Fock component `|0,0,0,n_p>` only ever couples to
//! `|n,n,n,n_p-n>`. Evolution therefore splits into independent tridiagonal
//! blocks, one per initial pump number, which makes pump amplitudes up to
//! `sqrt(200)` cheap on a desk machine.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fock::{
    coherent_amplitudes, i_pow, poisson_tail, CorrelatedFockDensity, FockCutoffs, PureFockVector,
};

/// Physical inputs of one evolution run.
///
/// `times` is the dimensionless axis `tau = |alpha_p| chi t`. Because only
/// that product enters the propagator, `chi` never needs a value other than
/// one; the field exists so configurations can state it explicitly.
#[derive(Debug, Clone)]
pub struct SimParams {
    pub chi: f64,
    pub alpha_p: C64,
    pub cutoffs: FockCutoffs,
    pub times: Vec<f64>,
}

impl SimParams {
    pub fn new(alpha_p: C64, cutoffs: FockCutoffs, times: Vec<f64>) -> Result<Self> {
        if !times.iter().all(|t| t.is_finite() && *t >= 0.0) {
            return Err(Error::InvalidParams(
                "evolution times must be finite and nonnegative".into(),
            ));
        }
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams(
                "evolution times must be strictly increasing".into(),
            ));
        }
        let tail = poisson_tail(alpha_p.norm_sqr(), cutoffs.n_p_max);
        if tail > cutoffs.tail_tol {
            return Err(Error::TailMass {
                tail,
                tol: cutoffs.tail_tol,
                cutoff: cutoffs.n_p_max,
            });
        }
        Ok(Self {
            chi: 1.0,
            alpha_p,
            cutoffs,
            times,
        })
    }
}

/// Joint pure state `sum_{n_p} sum_n c[n_p][n] |n,n,n, n_p - n>`, with the
/// initial coherent pump weights folded into the block amplitudes.
#[derive(Debug, Clone)]
pub struct JointState {
    cutoffs: FockCutoffs,
    /// `blocks[n_p][n]`; block length is `min(n_p, n_t_max) + 1`.
    blocks: Vec<Vec<C64>>,
}

impl JointState {
    pub fn cutoffs(&self) -> FockCutoffs {
        self.cutoffs
    }

    pub fn blocks(&self) -> &[Vec<C64>] {
        &self.blocks
    }

    pub fn amplitude(&self, n: usize, n_p: usize) -> C64 {
        self.blocks
            .get(n_p)
            .and_then(|b| b.get(n))
            .copied()
            .unwrap_or_default()
    }

    pub fn norm(&self) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Mean occupation of any one triplet mode.
    pub fn mean_triplet_occupation(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter().enumerate())
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum()
    }

    /// Mean pump occupation `sum |c|^2 (n_p - n)`.
    pub fn mean_pump_occupation(&self) -> f64 {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(n_p, b)| b.iter().enumerate().map(move |(n, c)| (n_p, n, c)))
            .map(|(n_p, n, c)| (n_p - n) as f64 * c.norm_sqr())
            .sum()
    }
}

/// Real antisymmetric generator of one pump block: `dc/ds = G c` with
/// `s = chi t`, `G[n, n-1] = n^{3/2} sqrt(n_p - n + 1)` and
/// `G[n, n+1] = -(n+1)^{3/2} sqrt(n_p - n)`.
pub fn block_generator(n_p: usize, n_t_max: usize) -> DMatrix<f64> {
    let dim = n_p.min(n_t_max) + 1;
    let mut g = DMatrix::<f64>::zeros(dim, dim);
    for n in 1..dim {
        let up = (n as f64).powf(1.5) * ((n_p - n + 1) as f64).sqrt();
        g[(n, n - 1)] = up;
        g[(n - 1, n)] = -up;
    }
    g
}

/// Positive symmetric tridiagonal `S` with `G = T (-i S) T^dag`,
/// `T = diag(i^n)`; its off-diagonal is the magnitude of `G`'s.
fn block_coupling(n_p: usize, n_t_max: usize) -> DMatrix<f64> {
    let dim = n_p.min(n_t_max) + 1;
    let mut s = DMatrix::<f64>::zeros(dim, dim);
    for n in 1..dim {
        let up = (n as f64).powf(1.5) * ((n_p - n + 1) as f64).sqrt();
        s[(n, n - 1)] = up;
        s[(n - 1, n)] = up;
    }
    s
}

/// Evolve the initial triplet-vacuum, coherent-pump state to every requested
/// time. Blocks are propagated independently (exactly, via one
/// eigendecomposition per block reused across times).
pub fn evolve(params: &SimParams) -> Result<Vec<JointState>> {
    let n_p_max = params.cutoffs.n_p_max;
    let n_t_max = params.cutoffs.n_t_max;
    let weights = coherent_amplitudes(params.alpha_p, n_p_max, params.cutoffs.tail_tol)?;
    let norm: f64 = weights
        .amps
        .iter()
        .map(|a| a.norm_sqr())
        .sum::<f64>()
        .sqrt();
    let alpha_mag = params.alpha_p.norm();

    // tau = |alpha_p| chi t, so the block propagator argument is tau/|alpha_p|.
    let scaled_times: Vec<f64> = if alpha_mag > 0.0 {
        params.times.iter().map(|tau| tau / alpha_mag).collect()
    } else {
        // Vacuum pump: no conversion ever happens and tau must be 0.
        params.times.clone()
    };

    let per_block: Vec<Vec<Vec<C64>>> = (0..=n_p_max)
        .into_par_iter()
        .map(|n_p| -> Result<Vec<Vec<C64>>> {
            let w = weights.amps[n_p] / norm;
            let dim = n_p.min(n_t_max) + 1;
            if dim == 1 {
                // vacuum pump block: nothing to convert
                return Ok(scaled_times.iter().map(|_| vec![w]).collect());
            }
            let coupling = block_coupling(n_p, n_t_max);
            let eig = coupling
                .try_symmetric_eigen(f64::EPSILON, 0)
                .ok_or(Error::BlockEigenFailure { block: n_p })?;
            let v = eig.eigenvectors;
            let e = eig.eigenvalues;
            // c_n(s) = w i^n sum_k V[n,k] e^{-i s E_k} V[0,k]
            Ok(scaled_times
                .iter()
                .map(|&s| {
                    if s == 0.0 {
                        // the initial condition, exactly
                        let mut block = vec![C64::new(0.0, 0.0); dim];
                        block[0] = w;
                        return block;
                    }
                    (0..dim)
                        .map(|n| {
                            let mut acc = C64::new(0.0, 0.0);
                            for k in 0..dim {
                                let phase = C64::new(0.0, -s * e[k]).exp();
                                acc += v[(n, k)] * v[(0, k)] * phase;
                            }
                            w * i_pow(n) * acc
                        })
                        .collect()
                })
                .collect())
        })
        .collect::<Result<Vec<_>>>()?;

    let states: Vec<JointState> = (0..params.times.len())
        .map(|ti| JointState {
            cutoffs: params.cutoffs,
            blocks: per_block.iter().map(|b| b[ti].clone()).collect(),
        })
        .collect();

    for state in &states {
        let drift = (state.norm() - 1.0).abs();
        if drift > 1e-9 {
            return Err(Error::InvalidParams(format!(
                "propagation lost unitarity: |norm - 1| = {drift:.3e}"
            )));
        }
    }
    Ok(states)
}

/// Trace out the pump: `rho[n, n'] = sum_m c_{n, n+m} conj(c_{n', n'+m})`,
/// pairing amplitudes with equal residual pump occupation `m = n_p - n`.
pub fn reduce_to_triplets(state: &JointState) -> CorrelatedFockDensity {
    let n_t = state.cutoffs.n_t_max;
    let n_p_max = state.cutoffs.n_p_max;
    let d = n_t + 1;
    let mut rho = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
    for m in 0..=n_p_max {
        for n in 0..d.min(n_p_max + 1 - m) {
            let cn = state.amplitude(n, n + m);
            if cn.norm_sqr() == 0.0 {
                continue;
            }
            for n2 in 0..d.min(n_p_max + 1 - m) {
                rho[(n, n2)] += cn * state.amplitude(n2, n2 + m).conj();
            }
        }
    }
    CorrelatedFockDensity::new(3, rho).expect("pump trace-out preserves hermiticity and trace")
}

/// Perturbative short-time triplet state
/// `|0,0,0> + g t |1,1,1> + (g t)^2/2 |2,2,2>`, truncated at `order` and
/// normalized. A first-order consistency oracle, not a production path.
pub fn undepleted_short_time(g_t: f64, order: usize, cutoff: usize) -> Result<PureFockVector> {
    if order > 2 {
        return Err(Error::InvalidParams(format!(
            "short-time expansion is only stated through order 2 (got {order})"
        )));
    }
    if cutoff < order {
        return Err(Error::InvalidParams(format!(
            "cutoff {cutoff} cannot hold an order-{order} expansion"
        )));
    }
    let mut amps = vec![C64::new(0.0, 0.0); cutoff + 1];
    amps[0] = C64::new(1.0, 0.0);
    if order >= 1 {
        amps[1] = C64::new(g_t, 0.0);
    }
    if order >= 2 {
        amps[2] = C64::new(0.5 * g_t * g_t, 0.0);
    }
    PureFockVector::new(3, amps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::DenseOracle;
    use approx::assert_relative_eq;

    fn sqrt10() -> C64 {
        C64::new(10.0_f64.sqrt(), 0.0)
    }

    #[test]
    fn generator_vacuum_pump_is_zero() {
        let g = block_generator(0, 5);
        assert_eq!(g.nrows(), 1);
        assert_eq!(g[(0, 0)], 0.0);
    }

    #[test]
    fn generator_single_pump_photon() {
        let g = block_generator(1, 5);
        assert_eq!(g.nrows(), 2);
        assert_eq!(g[(1, 0)], 1.0);
        assert_eq!(g[(0, 1)], -1.0);
    }

    #[test]
    fn generator_matches_dense_oracle_elements() {
        // Every coupling of every block against the explicit 4-mode ladder
        // construction: <n+1,n+1,n+1,n_p-n-1| A |n,n,n,n_p-n>.
        let oracle = DenseOracle::new(3, 4).unwrap();
        for n_p in 0..=4usize {
            let g = block_generator(n_p, 3);
            let dim = n_p.min(3) + 1;
            for n in 0..dim - 1 {
                let dense = oracle.generator_element(
                    [n + 1, n + 1, n + 1, n_p - n - 1],
                    [n, n, n, n_p - n],
                );
                assert_relative_eq!(g[(n + 1, n)], dense, epsilon = 1e-12);
                assert_relative_eq!(g[(n, n + 1)], -dense, epsilon = 1e-12);
            }
        }
        // the spec's spot value
        assert_relative_eq!(block_generator(2, 3)[(1, 0)], 2.0_f64.sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn tau_zero_returns_initial_condition() {
        let cutoffs = FockCutoffs::auto(4, sqrt10(), 1e-8).unwrap();
        let params = SimParams::new(sqrt10(), cutoffs, vec![0.0]).unwrap();
        let state = &evolve(&params).unwrap()[0];
        let weights = coherent_amplitudes(sqrt10(), cutoffs.n_p_max, 1e-8).unwrap();
        let norm: f64 = weights.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for n_p in 0..=cutoffs.n_p_max {
            assert!((state.amplitude(0, n_p) - weights.amps[n_p] / norm).norm() < 1e-14);
            for n in 1..=cutoffs.n_t_max.min(n_p) {
                assert_eq!(state.amplitude(n, n_p).norm(), 0.0);
            }
        }
        assert_relative_eq!(state.norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn block_evolution_matches_dense_oracle() {
        let alpha = C64::new(0.6, 0.0);
        let tail_tol = 1e-3;
        let cutoffs = FockCutoffs::new(3, 4, alpha, tail_tol).unwrap();
        let taus = vec![0.1, 0.3, 0.5];
        let params = SimParams::new(alpha, cutoffs, taus.clone()).unwrap();
        let states = evolve(&params).unwrap();
        let oracle = DenseOracle::new(3, 4).unwrap();
        for (tau, state) in taus.iter().zip(&states) {
            let dense = oracle.evolve_tau(alpha, *tau, tail_tol).unwrap();
            // embed the block representation into the full tensor index
            let mut dist_sqr = 0.0;
            let mut covered = 0.0;
            for n_p in 0..=4usize {
                for n in 0..=n_p.min(3) {
                    let idx = ((n * 4 + n) * 4 + n) * 5 + (n_p - n);
                    dist_sqr += (state.amplitude(n, n_p) - dense[idx]).norm_sqr();
                    covered += dense[idx].norm_sqr();
                }
            }
            assert!(
                dist_sqr.sqrt() < 1e-8,
                "state distance {} at tau = {tau}",
                dist_sqr.sqrt()
            );
            // the dense state holds no amplitude outside the replicated basis
            assert_relative_eq!(covered, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn evolution_populates_triplets_at_fig2_time() {
        let cutoffs = FockCutoffs::auto(10, sqrt10(), 1e-8).unwrap();
        let params = SimParams::new(sqrt10(), cutoffs, vec![0.3]).unwrap();
        let state = &evolve(&params).unwrap()[0];
        assert!(state.mean_triplet_occupation() > 0.0);
        assert_relative_eq!(state.norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn conserved_quantities_and_reality() {
        let cutoffs = FockCutoffs::auto(8, sqrt10(), 1e-8).unwrap();
        let params = SimParams::new(sqrt10(), cutoffs, vec![0.2, 0.6, 1.0]).unwrap();
        let states = evolve(&params).unwrap();
        let initial_pump: f64 = states[0].mean_pump_occupation()
            + states[0].mean_triplet_occupation();
        for state in &states {
            assert!((state.norm() - 1.0).abs() < 1e-9);
            // n_a + n_p is conserved
            let total = state.mean_pump_occupation() + state.mean_triplet_occupation();
            assert!((total - initial_pump).abs() < 1e-9);
            // real pump amplitude keeps every amplitude real
            for block in state.blocks() {
                for c in block {
                    assert!(c.im.abs() < 1e-12, "imag part {}", c.im);
                }
            }
        }
    }

    #[test]
    fn blocks_evolve_independently_and_deterministically() {
        let cutoffs = FockCutoffs::auto(6, sqrt10(), 1e-8).unwrap();
        let params = SimParams::new(sqrt10(), cutoffs, vec![0.4]).unwrap();
        let a = evolve(&params).unwrap();
        let b = evolve(&params).unwrap();
        for (ba, bb) in a[0].blocks().iter().zip(b[0].blocks()) {
            for (ca, cb) in ba.iter().zip(bb) {
                assert_eq!(ca.re.to_bits(), cb.re.to_bits());
                assert_eq!(ca.im.to_bits(), cb.im.to_bits());
            }
        }
        // each block, evolved alone in a pump-Fock initial state, matches the
        // corresponding block of the full run up to its coherent weight
        let weights = coherent_amplitudes(sqrt10(), cutoffs.n_p_max, 1e-8).unwrap();
        let norm: f64 = weights.amps.iter().map(|w| w.norm_sqr()).sum::<f64>().sqrt();
        for n_p in [1usize, 3, 7, 12] {
            let g = block_coupling(n_p, cutoffs.n_t_max);
            let eig = g.symmetric_eigen();
            let dim = n_p.min(cutoffs.n_t_max) + 1;
            let s = 0.4 / sqrt10().norm();
            for n in 0..dim {
                let mut acc = C64::new(0.0, 0.0);
                for k in 0..dim {
                    acc += eig.eigenvectors[(n, k)]
                        * eig.eigenvectors[(0, k)]
                        * C64::new(0.0, -s * eig.eigenvalues[k]).exp();
                }
                let expected = weights.amps[n_p] / norm * i_pow(n) * acc;
                assert!((a[0].amplitude(n, n_p) - expected).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn reduction_of_initial_state_is_triplet_vacuum() {
        let cutoffs = FockCutoffs::auto(5, sqrt10(), 1e-8).unwrap();
        let params = SimParams::new(sqrt10(), cutoffs, vec![0.0]).unwrap();
        let rho = reduce_to_triplets(&evolve(&params).unwrap()[0]);
        assert_relative_eq!(rho.entry(0, 0).re, 1.0, epsilon = 1e-10);
        assert_relative_eq!(rho.purity(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn reduction_matches_dense_partial_trace() {
        let alpha = C64::new(0.6, 0.0);
        let tail_tol = 1e-3;
        let cutoffs = FockCutoffs::new(3, 4, alpha, tail_tol).unwrap();
        let params = SimParams::new(alpha, cutoffs, vec![0.3]).unwrap();
        let rho = reduce_to_triplets(&evolve(&params).unwrap()[0]);
        let oracle = DenseOracle::new(3, 4).unwrap();
        let psi = oracle.evolve_tau(alpha, 0.3, tail_tol).unwrap();
        let rho3 = oracle.triplet_density(&psi);
        let replicated = oracle.replicated_block(&rho3);
        for n in 0..4 {
            for n2 in 0..4 {
                assert!(
                    (rho.entry(n, n2) - replicated[(n, n2)]).norm() < 1e-8,
                    "entry ({n},{n2})"
                );
            }
        }
        assert!(oracle.off_replicated_max(&rho3) < 1e-12);
        let trace: f64 = rho.diagonal().iter().sum();
        assert_relative_eq!(trace, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn short_time_population_grows_quadratically() {
        let cutoffs = FockCutoffs::auto(4, sqrt10(), 1e-8).unwrap();
        let times = vec![1e-3, 1e-2];
        let params = SimParams::new(sqrt10(), cutoffs, times.clone()).unwrap();
        let states = evolve(&params).unwrap();
        let p: Vec<f64> = states
            .iter()
            .map(|s| reduce_to_triplets(s).diagonal()[1])
            .collect();
        let slope = (p[1] / p[0]).ln() / (times[1] / times[0]).ln();
        assert!((slope - 2.0).abs() < 0.05, "log-log slope {slope}");
    }

    #[test]
    fn near_classical_pump_matches_perturbation_theory() {
        // alpha_p = sqrt(200): depletion negligible at tau = 0.05, so the
        // n = 1 population approaches |g t|^2 = tau^2.
        let alpha = C64::new(200.0_f64.sqrt(), 0.0);
        let cutoffs = FockCutoffs::auto(5, alpha, 1e-8).unwrap();
        let params = SimParams::new(alpha, cutoffs, vec![0.05]).unwrap();
        let rho = reduce_to_triplets(&evolve(&params).unwrap()[0]);
        let p1 = rho.diagonal()[1];
        let expected = 0.05_f64.powi(2);
        assert!(
            (p1 - expected).abs() / expected < 0.10,
            "p1 = {p1}, |gt|^2 = {expected}"
        );
    }

    #[test]
    fn short_time_state_examples() {
        let vac = undepleted_short_time(0.0, 2, 4).unwrap();
        assert_relative_eq!(vac.amp(0).re, 1.0, epsilon = 1e-14);

        let st = undepleted_short_time(0.05, 1, 4).unwrap();
        assert_relative_eq!(st.amp(1).re / st.amp(0).re, 0.05, epsilon = 1e-12);
        assert_eq!(st.amp(2).norm(), 0.0);

        assert!(undepleted_short_time(0.1, 3, 5).is_err());
    }

    #[test]
    fn params_validation() {
        let cutoffs = FockCutoffs::auto(3, sqrt10(), 1e-8).unwrap();
        assert!(SimParams::new(sqrt10(), cutoffs, vec![0.3, 0.3]).is_err());
        assert!(SimParams::new(sqrt10(), cutoffs, vec![-0.1]).is_err());
        // pump too big for the stored pump cutoff
        assert!(SimParams::new(C64::new(20.0, 0.0), cutoffs, vec![0.1]).is_err());
    }
}
