//! Foundational Fock-space types, special functions, and target-state
//! constructors.
//!
//! Everything downstream works on the *replicated-index* subspace: because
//! the three downconverted modes are always populated in lockstep, a pure
//! state is a vector of amplitudes on `|n>^(x)m` and a density matrix is a
//! square matrix indexed by `(n, n')` meaning weight on `|n>^(x)m <n'|^(x)m`,
//! with `m` the number of replicated modes (1, 2, or 3).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Which linear quadrature a homodyne detector measures.
///
/// `X = (a + a^dag)/sqrt(2)`, `Y = (a - a^dag)/(sqrt(2) i)`; these are the
/// only two settings used anywhere in the artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Quadrature {
    X,
    Y,
}

impl Quadrature {
    /// Rotation angle of the measured quadrature.
    pub fn angle(self) -> f64 {
        match self {
            Quadrature::X => 0.0,
            Quadrature::Y => std::f64::consts::FRAC_PI_2,
        }
    }

    /// Short label used in CSV column names (`x` or `y`).
    pub fn label(self) -> &'static str {
        match self {
            Quadrature::X => "x",
            Quadrature::Y => "y",
        }
    }
}

/// Labels for the three downconverted modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    A,
    B,
    C,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::A => "a",
            Mode::B => "b",
            Mode::C => "c",
        }
    }
}

/// `i^n` without accumulating rounding error.
pub(crate) fn i_pow(n: usize) -> C64 {
    match n % 4 {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// All harmonic-oscillator eigenfunctions `psi_0(x) .. psi_n_max(x)` at one
/// point, by the normalized three-term recurrence
/// `psi_{n+1} = x sqrt(2/(n+1)) psi_n - sqrt(n/(n+1)) psi_{n-1}`.
///
/// The recurrence form stays finite for arbitrary order; raw Hermite
/// polynomials times factorials overflow near n = 150.
pub fn hermite_functions(n_max: usize, x: f64) -> Vec<f64> {
    let mut psi = Vec::with_capacity(n_max + 1);
    let psi0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    psi.push(psi0);
    if n_max == 0 {
        return psi;
    }
    psi.push(std::f64::consts::SQRT_2 * x * psi0);
    for n in 1..n_max {
        let next = x * (2.0 / (n as f64 + 1.0)).sqrt() * psi[n]
            - (n as f64 / (n as f64 + 1.0)).sqrt() * psi[n - 1];
        psi.push(next);
    }
    psi
}

/// Single harmonic-oscillator eigenfunction `psi_n(x)`.
pub fn hermite_function(n: usize, x: f64) -> f64 {
    *hermite_functions(n, x)
        .last()
        .expect("recurrence always yields n+1 values")
}

/// Position-representation overlap `<x_theta|n> = e^{-i n theta} psi_n(x)`
/// of a Fock state with a rotated-quadrature eigenstate.
///
/// The modulus is independent of the quadrature; the phase convention is the
/// eigenbasis of the rotated quadrature under `a -> a e^{-i theta}`.
pub fn quadrature_eigenfunction(n: usize, x: f64, quadrature: Quadrature) -> C64 {
    let psi = hermite_function(n, x);
    match quadrature {
        Quadrature::X => C64::new(psi, 0.0),
        // e^{-i n pi/2} = (-i)^n
        Quadrature::Y => i_pow(n).conj() * psi,
    }
}

/// Batched version of [`quadrature_eigenfunction`] for all orders up to
/// `n_max`, sharing one recurrence pass.
pub fn quadrature_eigenfunctions(n_max: usize, x: f64, quadrature: Quadrature) -> Vec<C64> {
    let psi = hermite_functions(n_max, x);
    match quadrature {
        Quadrature::X => psi.into_iter().map(|p| C64::new(p, 0.0)).collect(),
        Quadrature::Y => psi
            .into_iter()
            .enumerate()
            .map(|(n, p)| i_pow(n).conj() * p)
            .collect(),
    }
}

/// Truncated Fock expansion of a coherent state, with the discarded tail
/// mass made explicit.
#[derive(Debug, Clone)]
pub struct CoherentAmps {
    /// Entry `n` is `e^{-|alpha|^2/2} alpha^n / sqrt(n!)` for `n = 0..=cutoff`.
    pub amps: Vec<C64>,
    /// Probability mass beyond the cutoff (clamped at zero).
    pub tail_mass: f64,
}

/// Fock amplitudes of the coherent state `|alpha>` up to `cutoff`
/// (inclusive).
///
/// Fails if the Poisson tail beyond the cutoff exceeds `tail_tol`.
pub fn coherent_amplitudes(alpha: C64, cutoff: usize, tail_tol: f64) -> Result<CoherentAmps> {
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    let mut kept = 0.0_f64;
    for n in 0..=cutoff {
        amps.push(c);
        kept += c.norm_sqr();
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    let tail_mass = (1.0 - kept).max(0.0);
    if tail_mass > tail_tol {
        return Err(Error::TailMass {
            tail: tail_mass,
            tol: tail_tol,
            cutoff,
        });
    }
    Ok(CoherentAmps { amps, tail_mass })
}

/// Poisson tail mass `P(N > n_max)` for mean `lambda = |alpha|^2`.
pub(crate) fn poisson_tail(lambda: f64, n_max: usize) -> f64 {
    let mut term = (-lambda).exp();
    let mut cdf = term;
    for n in 0..n_max {
        term *= lambda / (n as f64 + 1.0);
        cdf += term;
    }
    (1.0 - cdf).max(0.0)
}

/// Smallest pump cutoff whose coherent tail mass is below `tol`.
pub(crate) fn pump_cutoff_for(alpha: C64, tol: f64) -> usize {
    let lambda = alpha.norm_sqr();
    let mut n = lambda.ceil() as usize;
    while poisson_tail(lambda, n) > tol {
        n += 1;
    }
    n
}

/// Truncation bounds for the joint simulation basis.
///
/// `n_t_max` caps the triplet occupation per mode; `n_p_max` caps the
/// initial pump photon number. Construction checks that the pump coherent
/// distribution fits below `n_p_max` to within `tail_tol`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FockCutoffs {
    pub n_t_max: usize,
    pub n_p_max: usize,
    pub tail_tol: f64,
}

impl FockCutoffs {
    pub fn new(n_t_max: usize, n_p_max: usize, alpha_p: C64, tail_tol: f64) -> Result<Self> {
        if n_t_max == 0 || n_t_max > n_p_max {
            return Err(Error::InvalidParams(format!(
                "cutoffs must satisfy 0 < n_t_max <= n_p_max (got {n_t_max}, {n_p_max})"
            )));
        }
        if !(tail_tol > 0.0) {
            return Err(Error::InvalidParams(format!(
                "tail tolerance must be positive (got {tail_tol})"
            )));
        }
        let tail = poisson_tail(alpha_p.norm_sqr(), n_p_max);
        if tail > tail_tol {
            return Err(Error::TailMass {
                tail,
                tol: tail_tol,
                cutoff: n_p_max,
            });
        }
        Ok(Self {
            n_t_max,
            n_p_max,
            tail_tol,
        })
    }

    /// Pick `n_p_max` automatically from the pump amplitude and tolerance.
    pub fn auto(n_t_max: usize, alpha_p: C64, tail_tol: f64) -> Result<Self> {
        let n_p = pump_cutoff_for(alpha_p, tail_tol).max(n_t_max);
        Self::new(n_t_max, n_p, alpha_p, tail_tol)
    }
}

/// Normalized pure state on the replicated basis `|n>^(x)m`.
#[derive(Debug, Clone)]
pub struct PureFockVector {
    m: usize,
    amps: Vec<C64>,
}

impl PureFockVector {
    /// Build and normalize. `m` must be 1..=3 and the amplitudes nonzero.
    pub fn new(m: usize, amps: Vec<C64>) -> Result<Self> {
        if !(1..=3).contains(&m) {
            return Err(Error::InvalidParams(format!(
                "replicated mode count must be 1..=3 (got {m})"
            )));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if !(norm_sqr.is_finite() && norm_sqr > 0.0) {
            return Err(Error::InvalidParams(
                "state vector has zero or non-finite norm".into(),
            ));
        }
        let scale = norm_sqr.sqrt().recip();
        Ok(Self {
            m,
            amps: amps.into_iter().map(|a| a * scale).collect(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    /// Amplitude of `|n>^(x)m`, zero beyond the stored cutoff.
    pub fn amp(&self, n: usize) -> C64 {
        self.amps.get(n).copied().unwrap_or_default()
    }

    /// `<self|other>`, zero-padding the shorter vector.
    pub fn overlap(&self, other: &PureFockVector) -> C64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Rank-one density matrix `|psi><psi|`.
    pub fn density(&self) -> CorrelatedFockDensity {
        let d = self.dim();
        let rho = DMatrix::from_fn(d, d, |i, j| self.amps[i] * self.amps[j].conj());
        CorrelatedFockDensity::new(self.m, rho).expect("pure projector is a valid density")
    }
}

/// Density matrix on the replicated-index subspace: entry `(n, n')` is the
/// weight on `|n>^(x)m <n'|^(x)m`.
///
/// Hermiticity is checked and the trace normalized to one at construction.
#[derive(Debug, Clone)]
pub struct CorrelatedFockDensity {
    m: usize,
    rho: DMatrix<C64>,
}

impl CorrelatedFockDensity {
    pub fn new(m: usize, rho: DMatrix<C64>) -> Result<Self> {
        if !(1..=3).contains(&m) {
            return Err(Error::InvalidParams(format!(
                "replicated mode count must be 1..=3 (got {m})"
            )));
        }
        if rho.nrows() != rho.ncols() || rho.nrows() == 0 {
            return Err(Error::InvalidParams(format!(
                "density matrix must be square and nonempty (got {}x{})",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let trace: C64 = rho.diagonal().iter().sum();
        if !(trace.re.is_finite() && trace.re > 0.0) {
            return Err(Error::InvalidParams(format!(
                "density matrix trace must be positive and finite (got {trace})"
            )));
        }
        let mut dev = 0.0_f64;
        for i in 0..rho.nrows() {
            for j in i..rho.ncols() {
                dev = dev.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
            }
        }
        // Scale-relative Hermiticity gate: entries carry the trace scale.
        if dev > 1e-10 * trace.re.max(1.0) {
            return Err(Error::NotHermitian { deviation: dev });
        }
        let rho = rho / C64::new(trace.re, 0.0);
        Ok(Self { m, rho })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn entry(&self, n: usize, n_prime: usize) -> C64 {
        self.rho[(n, n_prime)]
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.rho.diagonal().iter().map(|c| c.re).collect()
    }

    /// `Tr[rho^2]`; for a Hermitian matrix this is the squared Frobenius
    /// norm, no matrix product needed.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Mean occupation of any one of the replicated modes.
    pub fn mean_occupation(&self) -> f64 {
        self.rho
            .diagonal()
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.re)
            .sum()
    }

    /// Smallest eigenvalue; diagnostic for positive semidefiniteness.
    pub fn min_eigenvalue(&self) -> f64 {
        self.rho
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }

    /// Largest index with non-negligible population, for sizing phase-space
    /// grids to the actual support.
    pub fn effective_dim(&self, rel_tol: f64) -> usize {
        let diag = self.diagonal();
        let peak = diag.iter().cloned().fold(0.0_f64, f64::max);
        diag.iter()
            .rposition(|&p| p > rel_tol * peak)
            .map_or(1, |i| i + 1)
    }

    /// Leading `dim x dim` block, renormalized. Only meaningful when the
    /// discarded population is negligible (see [`Self::effective_dim`]).
    pub fn truncate(&self, dim: usize) -> Result<Self> {
        let d = dim.min(self.dim());
        let block = self.rho.view((0, 0), (d, d)).into_owned();
        Self::new(self.m, block)
    }
}

/// Even cat state `(|i alpha> + |-i alpha>) / sqrt(2(1 + e^{-2|alpha|^2}))`
/// in the Fock basis.
///
/// Fails unless the cutoff keeps all but `1e-8` of the mass.
pub fn cat_state(alpha: C64, cutoff: usize) -> Result<PureFockVector> {
    const TAIL_TOL: f64 = 1e-8;
    let norm_sqr = 2.0 * (1.0 + (-2.0 * alpha.norm_sqr()).exp());
    let prefactor = norm_sqr.sqrt().recip();
    // Both coherent branches share e^{-|alpha|^2/2} alpha^n / sqrt(n!); the
    // branch phases i^n and (-i)^n cancel for odd n and double for even n.
    let mut amps = Vec::with_capacity(cutoff + 1);
    let mut c = C64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    let mut kept = 0.0_f64;
    for n in 0..=cutoff {
        let branch_sum = i_pow(n) + i_pow(n).conj(); // i^n + (-i)^n
        let amp = prefactor * branch_sum * c;
        kept += amp.norm_sqr();
        amps.push(amp);
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    let tail = (1.0 - kept).max(0.0);
    if tail > TAIL_TOL {
        return Err(Error::TailMass {
            tail,
            tol: TAIL_TOL,
            cutoff,
        });
    }
    PureFockVector::new(1, amps)
}

/// Two-photon Bell target `(|0,0> + |1,1>)/sqrt(2)` on the replicated pair
/// basis.
pub fn bell_target() -> PureFockVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    PureFockVector::new(2, vec![C64::new(s, 0.0), C64::new(s, 0.0)])
        .expect("static amplitudes are valid")
}

/// Qudit target with amplitudes proportional to (0.63, 0.613, 0.423) on
/// `|0,0>, |1,1>, |2,2>`.
///
/// The quoted amplitudes have squared sum 1.0015; they are renormalized
/// rather than rounded.
pub fn qudit_target() -> PureFockVector {
    PureFockVector::new(
        2,
        vec![
            C64::new(0.63, 0.0),
            C64::new(0.613, 0.0),
            C64::new(0.423, 0.0),
        ],
    )
    .expect("static amplitudes are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const PI_QUARTER_INV: f64 = 0.7511255444649425; // pi^(-1/4)

    #[test]
    fn eigenfunction_ground_state_at_origin() {
        let v = quadrature_eigenfunction(0, 0.0, Quadrature::X);
        assert_relative_eq!(v.re, PI_QUARTER_INV, epsilon = 1e-12);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn eigenfunction_odd_parity_vanishes_at_origin() {
        let v = quadrature_eigenfunction(1, 0.0, Quadrature::X);
        assert_eq!(v.norm(), 0.0);
    }

    #[test]
    fn eigenfunction_second_order_at_origin() {
        // psi_2(0) = pi^(-1/4) (2^2 2!)^(-1/2) H_2(0) with H_2(0) = -2.
        let v = quadrature_eigenfunction(2, 0.0, Quadrature::X);
        assert_relative_eq!(v.re, -PI_QUARTER_INV / 2.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn eigenfunction_y_phase() {
        // <y|1> at y=1: e^{-i pi/2} sqrt(2) pi^(-1/4) e^{-1/2} = -i * 0.644...
        let v = quadrature_eigenfunction(1, 1.0, Quadrature::Y);
        let expected = 2.0_f64.sqrt() * PI_QUARTER_INV * (-0.5_f64).exp();
        assert_relative_eq!(v.im, -expected, epsilon = 1e-12);
        assert_relative_eq!(v.re, 0.0, epsilon = 1e-15);
        // modulus is quadrature-independent
        let vx = quadrature_eigenfunction(1, 1.0, Quadrature::X);
        assert_relative_eq!(v.norm(), vx.norm(), epsilon = 1e-14);
    }

    #[test]
    fn eigenfunction_matches_raw_hermite_for_small_n() {
        // Independent route: explicit H_n and factorial normalization.
        let raw_h = |n: usize, x: f64| -> f64 {
            match n {
                0 => 1.0,
                1 => 2.0 * x,
                2 => 4.0 * x * x - 2.0,
                3 => 8.0 * x.powi(3) - 12.0 * x,
                4 => 16.0 * x.powi(4) - 48.0 * x * x + 12.0,
                _ => unreachable!(),
            }
        };
        let fact = [1.0, 1.0, 2.0, 6.0, 24.0];
        for n in 0..=4usize {
            for x in [-2.3_f64, -0.7, 0.0, 0.4, 1.9, 3.1] {
                let direct = PI_QUARTER_INV
                    * (2.0_f64.powi(n as i32) * fact[n]).sqrt().recip()
                    * (-0.5 * x * x).exp()
                    * raw_h(n, x);
                assert_relative_eq!(hermite_function(n, x), direct, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn eigenfunction_orthonormality_to_n_12() {
        // Trapezoid on [-12, 12]; the Gaussian envelope makes this
        // spectrally accurate.
        let pts = 4801usize;
        let h = 24.0 / (pts - 1) as f64;
        let table: Vec<Vec<f64>> = (0..pts)
            .map(|i| hermite_functions(12, -12.0 + i as f64 * h))
            .collect();
        for n in 0..=12usize {
            for n2 in n..=12usize {
                let mut s = 0.0;
                for (i, row) in table.iter().enumerate() {
                    let w = if i == 0 || i == pts - 1 { 0.5 } else { 1.0 };
                    s += w * row[n] * row[n2];
                }
                s *= h;
                let expected = if n == n2 { 1.0 } else { 0.0 };
                assert!(
                    (s - expected).abs() < 1e-6,
                    "<psi_{n}|psi_{n2}> = {s}, expected {expected}"
                );
            }
        }
    }

    #[test]
    fn coherent_vacuum() {
        let c = coherent_amplitudes(C64::new(0.0, 0.0), 5, 1e-12).unwrap();
        assert_eq!(c.amps.len(), 6);
        assert_relative_eq!(c.amps[0].re, 1.0, epsilon = 1e-15);
        for a in &c.amps[1..] {
            assert_eq!(a.norm(), 0.0);
        }
        assert_eq!(c.tail_mass, 0.0);
    }

    #[test]
    fn coherent_mode_of_poisson_at_ten() {
        let c = coherent_amplitudes(C64::new(10.0_f64.sqrt(), 0.0), 30, 1e-6).unwrap();
        let peak = c.amps[10].norm();
        for (n, a) in c.amps.iter().enumerate() {
            assert!(
                a.norm() <= peak * (1.0 + 1e-12),
                "entry {n} exceeds entry 10"
            );
        }
    }

    #[test]
    fn coherent_tail_error() {
        // Tail of |alpha=1> beyond n=2: e^{-1} sum_{n>=3} 1/n! = 0.0803...
        let err = coherent_amplitudes(C64::new(1.0, 0.0), 2, 1e-6).unwrap_err();
        match err {
            Error::TailMass { tail, .. } => {
                let expected = (1.0_f64).exp().recip() * (std::f64::consts::E - 2.5);
                assert_relative_eq!(tail, expected, epsilon = 1e-12);
            }
            other => panic!("expected TailMass, got {other:?}"),
        }
    }

    #[test]
    fn cat_collapses_to_vacuum_at_zero_amplitude() {
        let cat = cat_state(C64::new(1e-12, 0.0), 10).unwrap();
        assert_relative_eq!(cat.amp(0).re, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn cat_even_support_and_signs() {
        let cat = cat_state(C64::new(1.2, 0.0), 30).unwrap();
        assert_eq!(cat.amp(1).norm(), 0.0);
        // |2> amplitude proportional to (i*1.2)^2/sqrt(2!): negative real.
        assert!(cat.amp(2).re < 0.0);
        assert_relative_eq!(cat.amp(2).im, 0.0, epsilon = 1e-15);
        let ratio = cat.amp(2).re / cat.amp(0).re;
        assert_relative_eq!(ratio, -1.44 / 2.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn cat_normalized() {
        let cat = cat_state(C64::new(2.0, 0.0), 30).unwrap();
        let n: f64 = cat.amps().iter().map(|a| a.norm_sqr()).sum();
        assert_relative_eq!(n, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn cat_insufficient_cutoff_errors() {
        assert!(matches!(
            cat_state(C64::new(3.0, 0.0), 8),
            Err(Error::TailMass { .. })
        ));
    }

    #[test]
    fn bell_and_qudit_targets() {
        let bell = bell_target();
        assert_eq!(bell.m(), 2);
        assert_relative_eq!(bell.amp(0).re, 0.7071067811865476, epsilon = 1e-12);
        assert_relative_eq!(bell.amp(1).re, 0.7071067811865476, epsilon = 1e-12);
        let n: f64 = bell.amps().iter().map(|a| a.norm_sqr()).sum();
        assert_relative_eq!(n, 1.0, epsilon = 1e-14);

        let qudit = qudit_target();
        let scale = qudit.amp(0).re / 0.63;
        assert_relative_eq!(qudit.amp(1).re, 0.613 * scale, epsilon = 1e-12);
        assert_relative_eq!(qudit.amp(2).re, 0.423 * scale, epsilon = 1e-12);
    }

    #[test]
    fn cutoffs_validate_ordering_and_tail() {
        assert!(FockCutoffs::new(5, 3, C64::new(1.0, 0.0), 1e-8).is_err());
        assert!(FockCutoffs::new(0, 3, C64::new(1.0, 0.0), 1e-8).is_err());
        // alpha_p = sqrt(10) needs roughly n_p ~ 36 for a 1e-8 tail.
        let auto = FockCutoffs::auto(10, C64::new(10.0_f64.sqrt(), 0.0), 1e-8).unwrap();
        assert!(auto.n_p_max >= 30 && auto.n_p_max <= 45, "{}", auto.n_p_max);
        assert!(FockCutoffs::new(10, auto.n_p_max - 5, C64::new(10.0_f64.sqrt(), 0.0), 1e-8).is_err());
    }

    #[test]
    fn density_constructor_checks() {
        let bad = DMatrix::from_row_slice(2, 2, &[
            C64::new(0.5, 0.0),
            C64::new(0.1, 0.2),
            C64::new(0.1, 0.2), // not the conjugate
            C64::new(0.5, 0.0),
        ]);
        assert!(matches!(
            CorrelatedFockDensity::new(1, bad),
            Err(Error::NotHermitian { .. })
        ));

        let rho = CorrelatedFockDensity::new(
            1,
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                C64::new(2.0, 0.0),
                C64::new(2.0, 0.0),
            ])),
        )
        .unwrap();
        assert_relative_eq!(rho.entry(0, 0).re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(rho.purity(), 0.5, epsilon = 1e-14);
        assert!(rho.min_eigenvalue() > -1e-12);
    }

    proptest! {
        #[test]
        fn hermite_recurrence_holds(x in -10.0_f64..10.0, n in 1usize..60) {
            let psi = hermite_functions(n + 1, x);
            let lhs = psi[n + 1];
            let rhs = x * (2.0 / (n as f64 + 1.0)).sqrt() * psi[n]
                - (n as f64 / (n as f64 + 1.0)).sqrt() * psi[n - 1];
            prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
        }

        #[test]
        fn coherent_masses_are_poisson(a in 0.1_f64..3.0, n in 0usize..20) {
            let c = coherent_amplitudes(C64::new(a, 0.0), 40, 1e-6).unwrap();
            let lambda = a * a;
            // Poisson pmf by term recurrence, independent of the amplitude path.
            let mut pmf = (-lambda).exp();
            for k in 0..n {
                pmf *= lambda / (k as f64 + 1.0);
            }
            prop_assert!((c.amps[n].norm_sqr() - pmf).abs() < 1e-12);
        }

        #[test]
        fn cat_is_even_and_alpha_sign_symmetric(a in 0.1_f64..2.2) {
            let plus = cat_state(C64::new(a, 0.0), 40).unwrap();
            let minus = cat_state(C64::new(-a, 0.0), 40).unwrap();
            for n in (1..40).step_by(2) {
                prop_assert_eq!(plus.amp(n).norm(), 0.0);
            }
            let ov = plus.overlap(&minus);
            prop_assert!((ov.norm() - 1.0).abs() < 1e-10);
        }
    }
}
