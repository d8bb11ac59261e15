// scratch probe: fig4 sensitivity (temporary)
use num_complex::Complex64 as C64;
use triphoton::*;

fn main() {
    let alpha = C64::new(10.0_f64.sqrt(), 0.0);
    for tau in [0.6, 1.0] {
        println!("--- tau = {tau}");
        for (n_t, tol) in [(16usize, 1e-8), (20, 1e-8), (24, 1e-8), (28, 1e-8), (20, 1e-12)] {
            let cutoffs = FockCutoffs::auto(n_t, alpha, tol).unwrap();
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
            println!(
                "n_t={n_t} tol={tol:.0e}: Fmax={fmax:.5} @ {astar:.4}, N={:.5}, P={:.5}, <n>={:.3}",
                negativity(&grid),
                purity(&cond),
                cond.mean_occupation()
            );
        }
        // fidelity curve shape at n_t = 24
        let cutoffs = FockCutoffs::auto(24, alpha, 1e-8).unwrap();
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
        let curve: Vec<String> = (0..18)
            .map(|i| {
                let a = 1.0 + 0.1 * i as f64;
                format!("{a:.1}:{:.4}", cat_fidelity(&cond, a).unwrap())
            })
            .collect();
        println!("F(alpha): {}", curve.join(" "));
        // diagonal of the conditional state
        let diag = cond.diagonal();
        let line: Vec<String> = diag.iter().take(14).map(|p| format!("{p:.4}")).collect();
        println!("cond diag: {}", line.join(" "));
    }
}
