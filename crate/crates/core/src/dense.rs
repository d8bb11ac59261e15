//! Brute-force 4-mode tensor oracle for tiny cutoffs.
//!
//! Builds the full interaction generator with explicit ladder operators on
//! all four modes and propagates by dense Pade matrix exponential. This
//! module deliberately shares no code with the block propagator in
//! [`crate::dynamics`]; it exists to verify it.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fock::{coherent_amplitudes, quadrature_eigenfunctions, Quadrature};

/// Largest tensor dimension the oracle accepts.
pub const MAX_DENSE_DIM: usize = 320;

/// Full tensor-product representation of the three triplet modes plus the
/// pump, with per-mode Fock cutoffs.
pub struct DenseOracle {
    /// Triplet-mode dimension (`n_t_max + 1`).
    d_t: usize,
    /// Pump dimension (`n_p_max + 1`).
    d_p: usize,
    /// Real generator `a^dag b^dag c^dag p - a b c p^dag`; the Schroedinger
    /// equation reads `d psi / dt = chi * G * psi`.
    generator: DMatrix<f64>,
}

/// Annihilation operator on a `dim`-dimensional Fock space.
fn lowering(dim: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| {
        if j == i + 1 {
            (j as f64).sqrt()
        } else {
            0.0
        }
    })
}

impl DenseOracle {
    pub fn new(n_t_max: usize, n_p_max: usize) -> Result<Self> {
        let d_t = n_t_max + 1;
        let d_p = n_p_max + 1;
        let dim = d_t * d_t * d_t * d_p;
        if dim > MAX_DENSE_DIM {
            return Err(Error::DenseDimension {
                dim,
                max: MAX_DENSE_DIM,
            });
        }
        let low_t = lowering(d_t);
        let raise_t = low_t.transpose();
        let low_p = lowering(d_p);
        let k = raise_t
            .kronecker(&raise_t)
            .kronecker(&raise_t)
            .kronecker(&low_p);
        let generator = &k - k.transpose();
        Ok(Self { d_t, d_p, generator })
    }

    pub fn dim(&self) -> usize {
        self.d_t * self.d_t * self.d_t * self.d_p
    }

    fn index(&self, n_a: usize, n_b: usize, n_c: usize, n_p: usize) -> usize {
        ((n_a * self.d_t + n_b) * self.d_t + n_c) * self.d_p + n_p
    }

    /// Matrix element of the generator between two product Fock states.
    pub fn generator_element(&self, bra: [usize; 4], ket: [usize; 4]) -> f64 {
        self.generator[(
            self.index(bra[0], bra[1], bra[2], bra[3]),
            self.index(ket[0], ket[1], ket[2], ket[3]),
        )]
    }

    /// Triplet vacuum times the truncated, renormalized pump coherent state.
    pub fn initial_state(&self, alpha_p: C64, tail_tol: f64) -> Result<DVector<C64>> {
        let pump = coherent_amplitudes(alpha_p, self.d_p - 1, tail_tol)?;
        let norm: f64 = pump.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let mut psi = DVector::from_element(self.dim(), C64::new(0.0, 0.0));
        for (n_p, w) in pump.amps.iter().enumerate() {
            psi[self.index(0, 0, 0, n_p)] = w / norm;
        }
        Ok(psi)
    }

    /// Propagate for interaction-time product `s = chi * t`.
    pub fn evolve(&self, alpha_p: C64, s: f64, tail_tol: f64) -> Result<DVector<C64>> {
        let psi0 = self.initial_state(alpha_p, tail_tol)?;
        let u = expm_real(&(&self.generator * s));
        let re = &u * psi0.map(|c| c.re);
        let im = &u * psi0.map(|c| c.im);
        Ok(DVector::from_fn(self.dim(), |i, _| C64::new(re[i], im[i])))
    }

    /// Propagate to dimensionless time `tau = |alpha_p| chi t`.
    pub fn evolve_tau(&self, alpha_p: C64, tau: f64, tail_tol: f64) -> Result<DVector<C64>> {
        self.evolve(alpha_p, tau / alpha_p.norm(), tail_tol)
    }

    /// Full three-mode density matrix with the pump traced out
    /// (dimension `d_t^3` per side).
    pub fn triplet_density(&self, psi: &DVector<C64>) -> DMatrix<C64> {
        let d3 = self.d_t * self.d_t * self.d_t;
        let mut rho = DMatrix::from_element(d3, d3, C64::new(0.0, 0.0));
        for i in 0..d3 {
            for j in 0..d3 {
                let mut s = C64::new(0.0, 0.0);
                for n_p in 0..self.d_p {
                    s += psi[i * self.d_p + n_p] * psi[j * self.d_p + n_p].conj();
                }
                rho[(i, j)] = s;
            }
        }
        rho
    }

    /// Extract the replicated-index block `[(n,n,n), (n',n',n')]` of a full
    /// triplet density matrix.
    pub fn replicated_block(&self, rho3: &DMatrix<C64>) -> DMatrix<C64> {
        DMatrix::from_fn(self.d_t, self.d_t, |n, n2| {
            let i = (n * self.d_t + n) * self.d_t + n;
            let j = (n2 * self.d_t + n2) * self.d_t + n2;
            rho3[(i, j)]
        })
    }

    /// Largest magnitude found outside the replicated-index support.
    pub fn off_replicated_max(&self, rho3: &DMatrix<C64>) -> f64 {
        let d = self.d_t;
        let replicated = |i: usize| -> bool {
            let (na, rest) = (i / (d * d), i % (d * d));
            let (nb, nc) = (rest / d, rest % d);
            na == nb && nb == nc
        };
        let mut max = 0.0_f64;
        for i in 0..rho3.nrows() {
            for j in 0..rho3.ncols() {
                if !(replicated(i) && replicated(j)) {
                    max = max.max(rho3[(i, j)].norm());
                }
            }
        }
        max
    }

    /// Project one triplet mode of a full 3-mode density matrix onto a
    /// quadrature outcome. Returns the normalized 2-mode conditional density
    /// (full product-basis indexing on the two remaining modes) and the
    /// outcome probability density.
    pub fn condition_triplet(
        &self,
        rho3: &DMatrix<C64>,
        mode_idx: usize,
        x: f64,
        quadrature: Quadrature,
    ) -> (DMatrix<C64>, f64) {
        assert!(mode_idx < 3);
        let d = self.d_t;
        let phi = quadrature_eigenfunctions(d - 1, x, quadrature);
        let unpack = |i: usize| -> [usize; 3] { [i / (d * d), (i / d) % d, i % d] };
        let d2 = d * d;
        let mut cond = DMatrix::from_element(d2, d2, C64::new(0.0, 0.0));
        for i in 0..rho3.nrows() {
            let ni = unpack(i);
            for j in 0..rho3.ncols() {
                let nj = unpack(j);
                let weight = phi[ni[mode_idx]] * phi[nj[mode_idx]].conj();
                // collapse the measured index out of the row/column labels
                let rem = |n: [usize; 3]| -> usize {
                    let kept: Vec<usize> = (0..3).filter(|&k| k != mode_idx).map(|k| n[k]).collect();
                    kept[0] * d + kept[1]
                };
                cond[(rem(ni), rem(nj))] += rho3[(i, j)] * weight;
            }
        }
        let density: f64 = cond.diagonal().iter().map(|c| c.re).sum();
        (cond / C64::new(density, 0.0), density)
    }

    /// Quadrature outcome probability density of one triplet mode.
    pub fn quadrature_density(
        &self,
        rho3: &DMatrix<C64>,
        mode_idx: usize,
        x: f64,
        quadrature: Quadrature,
    ) -> f64 {
        let d = self.d_t;
        let phi = quadrature_eigenfunctions(d - 1, x, quadrature);
        let unpack = |i: usize| -> [usize; 3] { [i / (d * d), (i / d) % d, i % d] };
        let mut p = C64::new(0.0, 0.0);
        for i in 0..rho3.nrows() {
            let ni = unpack(i);
            for j in 0..rho3.ncols() {
                let nj = unpack(j);
                // <x|n_i><n_j|x> on the measured mode, identity overlap on the rest
                let others_match = (0..3)
                    .filter(|&k| k != mode_idx)
                    .all(|k| ni[k] == nj[k]);
                if others_match {
                    p += rho3[(i, j)] * phi[ni[mode_idx]] * phi[nj[mode_idx]].conj();
                }
            }
        }
        p.re
    }

    /// Expectation of the photon number of one of the four modes
    /// (0 = a, 1 = b, 2 = c, 3 = pump) in a pure state.
    pub fn number_expectation(&self, psi: &DVector<C64>, mode_idx: usize) -> f64 {
        let d = self.d_t;
        let dp = self.d_p;
        let mut acc = 0.0;
        for i in 0..self.dim() {
            let n = match mode_idx {
                0 => i / (d * d * dp),
                1 => (i / (d * dp)) % d,
                2 => (i / dp) % d,
                _ => i % dp,
            };
            acc += n as f64 * psi[i].norm_sqr();
        }
        acc
    }
}

/// Matrix exponential of a real square matrix by Pade(13) scaling and
/// squaring (Higham 2005).
pub fn expm_real(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");

    // 1-norm (max column sum) drives the scaling exponent.
    let norm = (0..n)
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let theta13 = 5.371920351148152;
    let s = if norm > theta13 {
        (norm / theta13).log2().ceil() as u32
    } else {
        0
    };
    let a_scaled = a / 2.0_f64.powi(s as i32);

    const B: [f64; 14] = [
        64764752532480000.0,
        32382376266240000.0,
        7771770303897600.0,
        1187353796428800.0,
        129060195264000.0,
        10559470521600.0,
        670442572800.0,
        33522128640.0,
        1323241920.0,
        40840800.0,
        960960.0,
        16380.0,
        182.0,
        1.0,
    ];
    let eye = DMatrix::<f64>::identity(n, n);
    let a2 = &a_scaled * &a_scaled;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u = &a_scaled
        * (&a6 * (&a6 * B[13] + &a4 * B[11] + &a2 * B[9])
            + &a6 * B[7]
            + &a4 * B[5]
            + &a2 * B[3]
            + &eye * B[1]);
    let v = &a6 * (&a6 * B[12] + &a4 * B[10] + &a2 * B[8])
        + &a6 * B[6]
        + &a4 * B[4]
        + &a2 * B[2]
        + &eye * B[0];
    let mut r = (&v - &u)
        .lu()
        .solve(&(&v + &u))
        .expect("Pade denominator is well conditioned for scaled input");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}
