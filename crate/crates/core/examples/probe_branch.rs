// scratch probe, not part of the deliverable
use gowave_core::model::ModelParams;
use gowave_core::solver::{continue_branch, SolverSettings};
use gowave_core::analysis::slack;

fn main() {
    let t0 = std::time::Instant::now();
    for (name, sigma, alpha, target) in [
        ("reduced", 1.0, 0.0, std::f64::consts::PI.powi(2) / 9.0),
        ("modified", 0.0, 1.0, std::f64::consts::PI.powi(2) / 8.0),
    ] {
        let p = ModelParams::gardner(0.0, sigma, alpha).unwrap();
        let settings = SolverSettings { eps_max: 1.2, ..Default::default() };
        match continue_branch(&p, 1, 0.01, 0.01, &settings) {
            Ok(branch) => {
                let last = branch.points.last().unwrap();
                let s = slack(&p, last.c, &last.profile);
                println!(
                    "{name}: {:?}, {} pts, eps={:.4}, c={:.6} (target {:.6}, rel {:.3}%), slack={:.4e}, n={}, res={:.2e}, t={:.1?}",
                    branch.termination, branch.points.len(), last.eps, last.c, target,
                    (last.c - target).abs() / target * 100.0, s,
                    last.profile.grid().len(), last.residual_norm, t0.elapsed()
                );
            }
            Err(e) => println!("{name}: FAILED {e}"),
        }
    }
}
