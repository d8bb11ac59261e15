//! Purity, fidelity against pure targets, and cat-amplitude optimization.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{cat_state, CorrelatedFockDensity, PureFockVector};

/// `Tr[rho^2]`.
pub fn purity(rho: &CorrelatedFockDensity) -> f64 {
    rho.purity()
}

/// Uhlmann fidelity against a pure target, which collapses to
/// `sqrt(<psi| rho |psi>)`; dimensions are zero-padded to match.
pub fn fidelity(rho: &CorrelatedFockDensity, target: &PureFockVector) -> Result<f64> {
    if rho.m() != target.m() {
        return Err(Error::InvalidParams(format!(
            "fidelity needs matching replicated-mode counts (rho m = {}, target m = {})",
            rho.m(),
            target.m()
        )));
    }
    let d = rho.dim();
    let mut overlap = C64::new(0.0, 0.0);
    for n in 0..d {
        for n2 in 0..d {
            overlap += target.amp(n).conj() * rho.entry(n, n2) * target.amp(n2);
        }
    }
    Ok(overlap.re.max(0.0).sqrt())
}

/// Fidelity of a single-mode state against the even cat of real amplitude
/// `alpha`, with the cat cutoff chosen generously enough for its own tail.
pub fn cat_fidelity(rho: &CorrelatedFockDensity, alpha: f64) -> Result<f64> {
    let needed = (alpha * alpha + 12.0 * alpha.abs()).ceil() as usize + 12;
    let cat = cat_state(C64::new(alpha, 0.0), needed.max(rho.dim()))?;
    fidelity(rho, &cat)
}

/// Maximize the cat fidelity over real amplitudes inside `[alpha_lo,
/// alpha_hi]` by a coarse scan plus golden-section refinement to `tol` in
/// the amplitude. Returns `(F_max, alpha_star)`.
///
/// A maximum that lands on the bracket boundary is reported as an error,
/// never silently accepted.
pub fn optimal_cat_fidelity(
    rho: &CorrelatedFockDensity,
    alpha_lo: f64,
    alpha_hi: f64,
    tol: f64,
) -> Result<(f64, f64)> {
    if !(alpha_lo < alpha_hi) || !(tol > 0.0) {
        return Err(Error::InvalidParams(
            "need alpha_lo < alpha_hi and a positive tolerance".into(),
        ));
    }
    let f = |a: f64| cat_fidelity(rho, a);

    // coarse bracketing scan
    let scan = 64usize;
    let mut best_i = 0usize;
    let mut best_f = f64::NEG_INFINITY;
    let at = |i: usize| alpha_lo + (alpha_hi - alpha_lo) * i as f64 / scan as f64;
    for i in 0..=scan {
        let v = f(at(i))?;
        if v > best_f {
            best_f = v;
            best_i = i;
        }
    }
    if best_i == 0 || best_i == scan {
        return Err(Error::BoundaryMaximum { alpha: at(best_i) });
    }

    // golden-section refinement in the bracketing interval
    let inv_phi = 0.5 * (5.0_f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (at(best_i - 1), at(best_i + 1));
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while hi - lo > tol {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c)?;
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d)?;
        }
    }
    let alpha_star = 0.5 * (lo + hi);
    Ok((f(alpha_star)?, alpha_star))
}

/// Dominant eigenpair of a density matrix: `(weight, eigenvector)` with the
/// global phase fixed so the largest-magnitude component is real positive.
pub fn dominant_eigenvector(rho: &CorrelatedFockDensity) -> (f64, Vec<C64>) {
    let eig = rho.matrix().clone().symmetric_eigen();
    let (k, &weight) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).expect("eigenvalues are finite"))
        .expect("nonempty spectrum");
    let mut v: Vec<C64> = eig.eigenvectors.column(k).iter().copied().collect();
    let lead = v
        .iter()
        .cloned()
        .max_by(|a, b| a.norm_sqr().partial_cmp(&b.norm_sqr()).expect("finite"))
        .expect("nonempty vector");
    if lead.norm() > 0.0 {
        let phase = lead / lead.norm();
        for c in &mut v {
            *c /= phase;
        }
    }
    (weight, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{bell_target, qudit_target};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    #[test]
    fn purity_of_pure_and_mixed_states() {
        assert_relative_eq!(purity(&bell_target().density()), 1.0, epsilon = 1e-12);
        let mixed = CorrelatedFockDensity::new(
            1,
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                C64::new(0.5, 0.0),
                C64::new(0.5, 0.0),
            ])),
        )
        .unwrap();
        assert_relative_eq!(purity(&mixed), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn fidelity_trivial_cases() {
        let bell = bell_target();
        assert_relative_eq!(fidelity(&bell.density(), &bell).unwrap(), 1.0, epsilon = 1e-12);
        let orthogonal = PureFockVector::new(
            2,
            vec![
                C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
                C64::new(-std::f64::consts::FRAC_1_SQRT_2, 0.0),
            ],
        )
        .unwrap();
        assert!(fidelity(&orthogonal.density(), &bell).unwrap() < 1e-7);
        // mismatched replicated-mode counts
        let single = cat_state(C64::new(1.0, 0.0), 20).unwrap();
        assert!(fidelity(&bell.density(), &single).is_err());
    }

    #[test]
    fn qudit_target_overlap_with_itself() {
        let q = qudit_target();
        assert_relative_eq!(fidelity(&q.density(), &q).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn pure_target_shortcut_equals_full_uhlmann() {
        // Full Uhlmann on random 4-dim mixed states via matrix square roots.
        let uhlmann = |rho: &CorrelatedFockDensity, target: &PureFockVector| -> f64 {
            let d = rho.dim();
            let sigma = target.density();
            // sqrt(sigma) through its eigendecomposition
            let eig = sigma.matrix().clone().symmetric_eigen();
            let mut sqrt_sigma = DMatrix::from_element(d, d, C64::new(0.0, 0.0));
            for k in 0..d {
                let lam = eig.eigenvalues[k].max(0.0).sqrt();
                let col = eig.eigenvectors.column(k);
                for i in 0..d {
                    for j in 0..d {
                        sqrt_sigma[(i, j)] += C64::new(lam, 0.0) * col[i] * col[j].conj();
                    }
                }
            }
            let inner = &sqrt_sigma * rho.matrix() * &sqrt_sigma;
            let inner_eig = inner.symmetric_eigen();
            // clamp eigenvalue noise: sqrt would amplify 1e-16 to 1e-8
            inner_eig
                .eigenvalues
                .iter()
                .map(|l| if *l > 1e-12 { l.sqrt() } else { 0.0 })
                .sum()
        };

        // deterministic pseudo-random mixed states
        let mut seed = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            seed ^= seed << 13;
            seed ^= seed >> 7;
            seed ^= seed << 17;
            (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..5 {
            let d = 4usize;
            let a = DMatrix::from_fn(d, d, |_, _| C64::new(next(), next()));
            let rho_raw = &a * a.adjoint();
            let rho = CorrelatedFockDensity::new(1, rho_raw).unwrap();
            let target = PureFockVector::new(
                1,
                (0..d).map(|_| C64::new(next(), next())).collect(),
            )
            .unwrap();
            let shortcut = fidelity(&rho, &target).unwrap();
            let full = uhlmann(&rho, &target);
            assert!(
                (shortcut - full).abs() < 1e-8,
                "shortcut {shortcut} vs Uhlmann {full}"
            );
        }
    }

    #[test]
    fn optimal_cat_fidelity_recovers_self() {
        let rho = cat_state(C64::new(2.0, 0.0), 40).unwrap().density();
        let (f, alpha) = optimal_cat_fidelity(&rho, 0.5, 4.0, 1e-3).unwrap();
        assert!((alpha - 2.0).abs() < 2e-3, "alpha* = {alpha}");
        // the fidelity curve is quadratic around its optimum, so the
        // amplitude tolerance costs O(tol^2) in fidelity
        assert!((f - 1.0).abs() < 1e-5, "F = {f}");
    }

    #[test]
    fn boundary_maximum_is_an_error() {
        let rho = cat_state(C64::new(2.0, 0.0), 40).unwrap().density();
        assert!(matches!(
            optimal_cat_fidelity(&rho, 2.5, 4.0, 1e-3),
            Err(Error::BoundaryMaximum { .. })
        ));
    }

    #[test]
    fn dominant_eigenvector_of_pure_state() {
        let q = qudit_target();
        let (w, v) = dominant_eigenvector(&q.density());
        assert_relative_eq!(w, 1.0, epsilon = 1e-12);
        for n in 0..3 {
            assert!((v[n].re - q.amp(n).re).abs() < 1e-10);
            assert!(v[n].im.abs() < 1e-12);
        }
    }
}
