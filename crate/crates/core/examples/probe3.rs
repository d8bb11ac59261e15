// scratch probe: does a tight truncation reproduce the paper's fig4 stars? (temporary)
use num_complex::Complex64 as C64;
use triphoton::*;

fn main() {
    let alpha = C64::new(10.0_f64.sqrt(), 0.0);
    for n_t in [8usize, 10, 12, 14] {
        println!("--- n_t = {n_t}");
        for tau in [0.3, 0.6, 0.8, 1.0] {
            let cutoffs = FockCutoffs::auto(n_t, alpha, 1e-8).unwrap();
            let params = SimParams::new(alpha, cutoffs, vec![tau]).unwrap();
            let rho = reduce_to_triplets(&evolve(&params).unwrap()[0]);
            let (cond, _) = condition(
                &rho,
                &[
                    HomodyneSetting::new(Mode::B, Quadrature::X, 3.0),
                    HomodyneSetting::new(Mode::C, Quadrature::X, 0.0),
                ],
            )
            .unwrap();
            let (fmax, astar) = optimal_cat_fidelity(&cond, 0.3, 4.5, 1e-3).unwrap();
            let trimmed = cond.truncate(cond.effective_dim(1e-13)).unwrap();
            let axis = Axis::covering(trimmed.dim());
            let grid = wigner(&trimmed, axis, axis).unwrap();
            println!("tau={tau}: Fmax={fmax:.4} @ {astar:.3}, N={:.4}", negativity(&grid));
        }
    }
    // dense tau sweep at converged n_t = 24: where do the paper's values live?
    println!("--- converged Fmax(tau) sweep");
    let cutoffs = FockCutoffs::auto(24, alpha, 1e-8).unwrap();
    let times: Vec<f64> = (1..=22).map(|i| 0.05 * i as f64).collect();
    let params = SimParams::new(alpha, cutoffs, times.clone()).unwrap();
    let states = evolve(&params).unwrap();
    for (tau, st) in times.iter().zip(&states) {
        let rho = reduce_to_triplets(st);
        let (cond, _) = condition(
            &rho,
            &[
                HomodyneSetting::new(Mode::B, Quadrature::X, 3.0),
                HomodyneSetting::new(Mode::C, Quadrature::X, 0.0),
            ],
        )
        .unwrap();
        let (fmax, astar) = optimal_cat_fidelity(&cond, 0.3, 4.8, 1e-3).unwrap();
        println!("tau={tau:.2}: Fmax={fmax:.4} @ {astar:.3}");
    }
}
