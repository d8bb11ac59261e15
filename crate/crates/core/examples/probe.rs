// scratch probe for calibration (temporary)
use num_complex::Complex64 as C64;
use triphoton::*;

fn rho_abc(n_t: usize, tau: f64) -> CorrelatedFockDensity {
    let alpha = C64::new(10.0_f64.sqrt(), 0.0);
    let cutoffs = FockCutoffs::auto(n_t, alpha, 1e-8).unwrap();
    let params = SimParams::new(alpha, cutoffs, vec![tau]).unwrap();
    reduce_to_triplets(&evolve(&params).unwrap()[0])
}

fn main() {
    // fig3a: tau = 0.3, x_c = 0, x_b in {3,4,5,6}
    let paper = [(3.0, 0.98, 1.2), (4.0, 0.97, 2.4), (5.0, 0.95, 3.2), (6.0, 0.92, 4.0)];
    for n_t in [26usize, 30, 34] {
        let rho = rho_abc(n_t, 0.3);
        println!("--- n_t = {n_t}");
        for (xb, f_ref, a_ref) in paper {
            let (cond, dens) = condition(
                &rho,
                &[
                    HomodyneSetting::new(Mode::B, Quadrature::X, xb),
                    HomodyneSetting::new(Mode::C, Quadrature::X, 0.0),
                ],
            )
            .unwrap();
            let f_at = cat_fidelity(&cond, a_ref).unwrap();
            let (fmax, astar) = optimal_cat_fidelity(&cond, 0.3, 5.5, 1e-3).unwrap();
            println!(
                "x_b={xb}: F({a_ref})={f_at:.4} (paper {f_ref}), Fmax={fmax:.4} @ alpha*={astar:.3} (paper {a_ref}), P(outcome)={dens:.3e}, <n>={:.2}, d_eff={}",
                cond.mean_occupation(),
                cond.effective_dim(1e-12)
            );
        }
    }

    // fig4: x_b = 3, x_c = 0 at starred times
    println!("--- fig4 (n_t = 20)");
    let stars = [(0.3, 0.98, 1.2), (0.6, 0.96, 1.8), (0.8, 0.87, 2.0), (1.0, 0.83, 2.2)];
    for (tau, f_ref, a_ref) in stars {
        let rho = rho_abc(20, tau);
        let (cond, _) = condition(
            &rho,
            &[
                HomodyneSetting::new(Mode::B, Quadrature::X, 3.0),
                HomodyneSetting::new(Mode::C, Quadrature::X, 0.0),
            ],
        )
        .unwrap();
        let (fmax, astar) = optimal_cat_fidelity(&cond, 0.3, 4.5, 1e-3).unwrap();
        print!("tau={tau}: Fmax={fmax:.4} @ {astar:.3} (paper {f_ref} @ {a_ref})");
        if tau == 1.0 {
            let trimmed = cond.truncate(cond.effective_dim(1e-13)).unwrap();
            let axis = Axis::covering(trimmed.dim());
            let grid = wigner(&trimmed, axis, axis).unwrap();
            print!(", N_a={:.4} (paper 0.58)", negativity(&grid));
        }
        println!();
    }

    // fig5: tau = 0.6, condition on x_a
    println!("--- fig5 (n_t = 12)");
    let rho = rho_abc(12, 0.6);
    for xa in [0.5, 0.75, 1.0, 1.25, 1.5] {
        let (cond, _) =
            condition(&rho, &[HomodyneSetting::new(Mode::A, Quadrature::X, xa)]).unwrap();
        let f_bell = fidelity(&cond, &bell_target()).unwrap();
        let f_qudit = fidelity(&cond, &qudit_target()).unwrap();
        let p = purity(&cond);
        let (w, v) = dominant_eigenvector(&cond);
        println!(
            "x_a={xa}: F_bell={f_bell:.4}, F_qudit={f_qudit:.4}, P={p:.4}, eig_w={w:.4}, amps=({:.3}, {:.3}, {:.3})",
            v[0].norm(),
            v[1].norm(),
            v[2].norm()
        );
    }

    // fig6/7: steering and squeezing over time at alpha_p = sqrt(10)
    println!("--- fig6/fig7 (n_t = 12)");
    let grid = OutcomeGrid::default_for_cutoff(12);
    for tau in [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.8, 1.0, 1.2, 1.5, 2.0] {
        let rho = rho_abc(12, tau);
        let s_abc = steering(&rho, SteeringDirection::AToBc, &grid, &grid, ModeCConditioning::XAtZero)
            .unwrap();
        let s_ba = steering(&rho, SteeringDirection::BToA, &grid, &grid, ModeCConditioning::XAtZero)
            .unwrap();
        let v_bc = conditional_squeezing(&rho, SqueezeObservable::PairBc { x_a: 0.0 }).unwrap();
        let v_a2 =
            conditional_squeezing(&rho, SqueezeObservable::SquaredAmp { x_b: 3.0, x_c: 0.0 })
                .unwrap();
        let p_abc = purity(&rho);
        let (rho_ab, _) =
            condition(&rho, &[HomodyneSetting::new(Mode::C, Quadrature::X, 0.0)]).unwrap();
        println!(
            "tau={tau}: S_abc={:.4}, S_ba={:.4}, V_bc={v_bc:.4}, V_a2={v_a2:.4}, P_abc={p_abc:.4}, P_ab={:.4}",
            s_abc.s,
            s_ba.s,
            purity(&rho_ab)
        );
    }
}
