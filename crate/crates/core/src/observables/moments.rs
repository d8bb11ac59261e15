//! Normal-ordered ladder moments and higher-order quadrature statistics on
//! the replicated basis.
//!
//! The two composite lowering operators of interest act diagonally in the
//! replicated index: `bc |n,n> = n |n-1,n-1>` and `a^2 |n> =
//! sqrt(n(n-1)) |n-2>`. Their generalized quadratures are
//! `X = (A + A^dag)/2`, `Y = (A - A^dag)/(2i)`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{CorrelatedFockDensity, Quadrature};

/// Composite lowering operator on the replicated basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LadderOp {
    /// `A = bc` on a replicated pair (m = 2).
    Pair,
    /// `A = a^2` on a single mode (m = 1).
    Squared,
    /// `A = a` on a single mode (m = 1).
    Plain,
}

impl LadderOp {
    /// Index step of one application.
    fn step(self) -> usize {
        match self {
            LadderOp::Squared => 2,
            _ => 1,
        }
    }

    /// `A |n> = coeff(n) |n - step>`.
    fn coeff(self, n: usize) -> f64 {
        match self {
            LadderOp::Pair => n as f64,
            LadderOp::Squared => {
                if n < 2 {
                    0.0
                } else {
                    ((n * (n - 1)) as f64).sqrt()
                }
            }
            LadderOp::Plain => (n as f64).sqrt(),
        }
    }

    /// Diagonal commutator `[A, A^dag] |n> = comm(n) |n>` on the replicated
    /// basis: `n_b + n_c + 1` for the pair, `4 n + 2` for the squared mode.
    fn commutator_diag(self, n: usize) -> f64 {
        match self {
            LadderOp::Pair => 2.0 * n as f64 + 1.0,
            LadderOp::Squared => 4.0 * n as f64 + 2.0,
            LadderOp::Plain => 1.0,
        }
    }

    fn required_m(self) -> usize {
        match self {
            LadderOp::Pair => 2,
            _ => 1,
        }
    }

    /// Coefficient of `A^j |n> = f_j(n) |n - j step>`.
    fn repeated(self, n: usize, j: usize) -> f64 {
        let mut acc = 1.0;
        let s = self.step();
        for i in 0..j {
            let idx = n.checked_sub(i * s);
            match idx {
                Some(idx) => acc *= self.coeff(idx),
                None => return 0.0,
            }
        }
        acc
    }
}

/// Normal-ordered moment `<(A^dag)^k A^l>`.
pub fn ladder_moment(rho: &CorrelatedFockDensity, op: LadderOp, k: usize, l: usize) -> C64 {
    let d = rho.dim() as isize;
    let s = op.step() as isize;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..rho.dim() {
        let j = i as isize + (k as isize - l as isize) * s;
        if j < 0 || j >= d {
            continue;
        }
        let f = op.repeated(i, l) * op.repeated(j as usize, k);
        if f != 0.0 {
            acc += rho.entry(i, j as usize) * f;
        }
    }
    acc
}

/// Mean, variance, and commutator expectation of one higher-order
/// quadrature.
#[derive(Debug, Clone, Copy)]
pub struct QuadStats {
    pub mean: f64,
    pub variance: f64,
    /// `|<[X, Y]>| = <[A, A^dag]>/2`, shared by both quadratures.
    pub commutator: f64,
}

/// Statistics of `X = (A + A^dag)/2` or `Y = (A - A^dag)/(2i)` for the
/// composite operator selected by `op`.
///
/// The replicated-mode count of `rho` must match the operator (pair needs
/// m = 2, single-mode operators need m = 1).
pub fn quadrature_stats(
    rho: &CorrelatedFockDensity,
    which: Quadrature,
    op: LadderOp,
) -> Result<QuadStats> {
    if rho.m() != op.required_m() {
        return Err(Error::InvalidParams(format!(
            "{op:?} quadratures need m = {} (state has m = {})",
            op.required_m(),
            rho.m()
        )));
    }
    let a1 = ladder_moment(rho, op, 0, 1);
    let a2 = ladder_moment(rho, op, 0, 2);
    let normal = ladder_moment(rho, op, 1, 1).re;
    let comm: f64 = rho
        .diagonal()
        .iter()
        .enumerate()
        .map(|(n, p)| p * op.commutator_diag(n))
        .sum();
    let anti = normal + comm;
    let (mean, second) = match which {
        Quadrature::X => (a1.re, 0.25 * (2.0 * a2.re + normal + anti)),
        Quadrature::Y => (a1.im, 0.25 * (-2.0 * a2.re + normal + anti)),
    };
    Ok(QuadStats {
        mean,
        variance: second - mean * mean,
        commutator: 0.5 * comm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{bell_target, PureFockVector};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn replicated_fock(n: usize, m: usize) -> CorrelatedFockDensity {
        let mut amps = vec![C64::new(0.0, 0.0); n + 1];
        amps[n] = C64::new(1.0, 0.0);
        PureFockVector::new(m, amps).unwrap().density()
    }

    fn vacuum(m: usize) -> CorrelatedFockDensity {
        replicated_fock(0, m)
    }

    // --- dense two-mode operator oracle -----------------------------------
    // Explicit b (x) c matrices on a D x D product space; used to pin the
    // replicated-basis formulas.

    fn dense_lowering(d: usize) -> DMatrix<C64> {
        DMatrix::from_fn(d, d, |i, j| {
            if j == i + 1 {
                C64::new((j as f64).sqrt(), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    fn dense_pair(d: usize) -> DMatrix<C64> {
        let low = dense_lowering(d);
        low.kronecker(&low)
    }

    fn embed_replicated(amps: &[C64], d: usize) -> nalgebra::DVector<C64> {
        let mut v = nalgebra::DVector::from_element(d * d, C64::new(0.0, 0.0));
        for (n, a) in amps.iter().enumerate() {
            v[n * d + n] = *a;
        }
        v
    }

    #[test]
    fn vacuum_moments_vanish() {
        for op in [LadderOp::Pair, LadderOp::Squared, LadderOp::Plain] {
            let m = op.required_m();
            assert_eq!(ladder_moment(&vacuum(m), op, 0, 1).norm(), 0.0);
            assert_eq!(ladder_moment(&vacuum(m), op, 1, 1).norm(), 0.0);
            assert_eq!(ladder_moment(&vacuum(m), op, 2, 1).norm(), 0.0);
        }
    }

    #[test]
    fn pair_moment_on_one_one() {
        // bc |1,1> = |0,0>, so <(bc)^dag bc> = 1
        let rho = replicated_fock(1, 2);
        assert_relative_eq!(
            ladder_moment(&rho, LadderOp::Pair, 1, 1).re,
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn squared_moments_on_two() {
        // a^2 |2> = sqrt(2) |0>: the k=0, l=1 moment is purely off-diagonal
        let rho = replicated_fock(2, 1);
        assert_eq!(ladder_moment(&rho, LadderOp::Squared, 0, 1).norm(), 0.0);
        assert_relative_eq!(
            ladder_moment(&rho, LadderOp::Squared, 1, 1).re,
            2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn vacuum_quadrature_stats() {
        let bc = quadrature_stats(&vacuum(2), Quadrature::X, LadderOp::Pair).unwrap();
        assert_relative_eq!(bc.mean, 0.0, epsilon = 1e-14);
        assert_relative_eq!(bc.variance, 0.25, epsilon = 1e-14);
        assert_relative_eq!(bc.commutator, 0.5, epsilon = 1e-14);

        let a2 = quadrature_stats(&vacuum(1), Quadrature::X, LadderOp::Squared).unwrap();
        assert_relative_eq!(a2.variance, 0.5, epsilon = 1e-14);
        assert_relative_eq!(a2.commutator, 1.0, epsilon = 1e-14);

        let y = quadrature_stats(&vacuum(2), Quadrature::Y, LadderOp::Pair).unwrap();
        assert_relative_eq!(y.variance, 0.25, epsilon = 1e-14);
    }

    #[test]
    fn arity_mismatch_is_an_error() {
        assert!(quadrature_stats(&vacuum(1), Quadrature::X, LadderOp::Pair).is_err());
        assert!(quadrature_stats(&vacuum(2), Quadrature::X, LadderOp::Squared).is_err());
    }

    #[test]
    fn bell_mean_matches_dense_operator_oracle() {
        // <X_bc> on the Bell target, frozen against the explicit two-mode
        // operator: the cross term rho[1,0] contributes 1/2.
        let bell = bell_target();
        let stats = quadrature_stats(&bell.density(), Quadrature::X, LadderOp::Pair).unwrap();
        let d = 6usize;
        let a = dense_pair(d);
        let x = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        let psi = embed_replicated(bell.amps(), d);
        let dense_mean = (psi.adjoint() * &x * &psi)[(0, 0)].re;
        assert_relative_eq!(dense_mean, 0.5, epsilon = 1e-12);
        assert_relative_eq!(stats.mean, dense_mean, epsilon = 1e-12);
    }

    #[test]
    fn replicated_stats_match_dense_operator_oracle() {
        // Variance and commutator on a replicated superposition, against
        // dense two-mode matrices.
        let d = 8usize;
        let amps: Vec<C64> = vec![
            C64::new(0.6, 0.0),
            C64::new(0.5, 0.2),
            C64::new(-0.3, 0.1),
            C64::new(0.2, -0.4),
        ];
        let state = PureFockVector::new(2, amps).unwrap();
        let stats_x = quadrature_stats(&state.density(), Quadrature::X, LadderOp::Pair).unwrap();
        let stats_y = quadrature_stats(&state.density(), Quadrature::Y, LadderOp::Pair).unwrap();

        let a = dense_pair(d);
        let x = (&a + a.adjoint()) * C64::new(0.5, 0.0);
        let y = (&a - a.adjoint()) * C64::new(0.0, -0.5);
        let psi = embed_replicated(state.amps(), d);
        let expect = |op: &DMatrix<C64>| (psi.adjoint() * op * &psi)[(0, 0)];
        let var = |op: &DMatrix<C64>| {
            let m = expect(op).re;
            (psi.adjoint() * (op * op) * &psi)[(0, 0)].re - m * m
        };
        assert_relative_eq!(stats_x.mean, expect(&x).re, epsilon = 1e-11);
        assert_relative_eq!(stats_x.variance, var(&x), epsilon = 1e-11);
        assert_relative_eq!(stats_y.mean, expect(&y).re, epsilon = 1e-11);
        assert_relative_eq!(stats_y.variance, var(&y), epsilon = 1e-11);
        // commutator expectation |< [X,Y] >| = <n_b + n_c + 1>/2
        let comm = &x * &y - &y * &x;
        let dense_comm = (psi.adjoint() * comm * &psi)[(0, 0)].norm();
        assert_relative_eq!(stats_x.commutator, dense_comm, epsilon = 1e-11);
    }

    #[test]
    fn commutator_identities_exact_on_small_dimension() {
        // [bc, (bc)^dag] = n_b + n_c + 1 and [a^2, a^dag^2] = 4 n + 2,
        // checked elementwise away from the truncation edge.
        let d = 6usize;
        let pair = dense_pair(d);
        let comm_pair = &pair * pair.adjoint() - pair.adjoint() * &pair;
        for nb in 0..d - 1 {
            for nc in 0..d - 1 {
                let i = nb * d + nc;
                let expected = (nb + nc + 1) as f64;
                assert_relative_eq!(comm_pair[(i, i)].re, expected, epsilon = 1e-12);
                for j in 0..d * d {
                    if j != i && nb < d - 2 && nc < d - 2 {
                        assert_eq!(comm_pair[(i, j)].norm(), 0.0);
                    }
                }
            }
        }

        let low = dense_lowering(d);
        let sq = &low * &low;
        let comm_sq = &sq * sq.adjoint() - sq.adjoint() * &sq;
        for n in 0..d - 2 {
            assert_relative_eq!(comm_sq[(n, n)].re, (4 * n + 2) as f64, epsilon = 1e-12);
        }
    }
}
