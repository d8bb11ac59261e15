// scratch probe: depletion hypothesis at fig4 times (temporary)
use num_complex::Complex64 as C64;
use triphoton::*;

fn main() {
    // near-classical pump (negligible depletion at these taus)
    for (label, asq, n_t) in [("sqrt(10)", 10.0, 24usize), ("sqrt(200)", 200.0, 24)] {
        let alpha = C64::new((asq as f64).sqrt(), 0.0);
        let cutoffs = FockCutoffs::auto(n_t, alpha, 1e-8).unwrap();
        let params = SimParams::new(alpha, cutoffs, vec![0.6, 0.8, 1.0]).unwrap();
        let states = evolve(&params).unwrap();
        println!("--- alpha_p = {label}");
        for (tau, st) in [0.6, 0.8, 1.0].iter().zip(&states) {
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
            println!("tau={tau}: Fmax={fmax:.4} @ {astar:.3}, <n>_cond={:.2}", cond.mean_occupation());
        }
    }
    // dense-oracle check at strong depletion, tau = 1.0
    let alpha = C64::new(0.6, 0.0);
    let oracle = dense::DenseOracle::new(3, 4).unwrap();
    let cutoffs = FockCutoffs::new(3, 4, alpha, 1e-3).unwrap();
    let params = SimParams::new(alpha, cutoffs, vec![1.0, 2.0]).unwrap();
    let states = evolve(&params).unwrap();
    for (tau, st) in [1.0, 2.0].iter().zip(&states) {
        let dense = oracle.evolve_tau(alpha, *tau, 1e-3).unwrap();
        let mut dist = 0.0_f64;
        for n_p in 0..=4usize {
            for n in 0..=n_p.min(3) {
                let idx = ((n * 4 + n) * 4 + n) * 5 + (n_p - n);
                dist += (st.amplitude(n, n_p) - dense[idx]).norm_sqr();
            }
        }
        println!("tau={tau}: block-vs-dense distance {:.2e}", dist.sqrt());
    }
}
