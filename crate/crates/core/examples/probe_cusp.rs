// scratch probe for the near-cusp Gardner run, not part of the deliverable
use gowave_core::analysis::{holder_fit, slack, singular_levels};
use gowave_core::model::ModelParams;
use gowave_core::solver::{continue_branch, BranchTermination, SolverSettings};

fn run(alpha: f64, slack_floor: f64, n_max: usize) {
    let p = ModelParams::gardner(0.0, 1.0, alpha).unwrap();
    let settings = SolverSettings {
        eps_max: 2.5,
        slack_floor,
        n_max,
        ..Default::default()
    };
    match continue_branch(&p, 1, 0.01, 0.01, &settings) {
        Ok(branch) => {
            let last = branch.points.last().unwrap();
            let s = slack(&p, last.c, &last.profile);
            let c_crit = -1.0 / (4.0 * alpha);
            let lv = singular_levels(&p, last.c).unwrap();
            // fit at crest (max)
            let idx = last
                .profile
                .samples()
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            let fits: Vec<String> = [(16usize, 2usize), (32, 2), (64, 4)]
                .iter()
                .map(|&(w, e)| match holder_fit(&last.profile, idx, w, e) {
                    Ok((exp, konst)) => format!("w{w}: {exp:.3}/{konst:.3}"),
                    Err(err) => format!("w{w}: ERR {err}"),
                })
                .collect();
            println!(
                "alpha={alpha:+.3}: {:?} {} pts, c_T={:.5} c_crit={:.5} diff={:+.4}, slack={:.2e}, maxphi={:.4} root+={:?} ord={:?}, n={}, fits [{}]",
                branch.termination,
                branch.points.len(),
                last.c,
                c_crit,
                last.c - c_crit,
                s,
                last.profile.samples().iter().fold(f64::MIN, |m, &v| m.max(v)),
                lv.phi_plus,
                lv.order_plus,
                last.profile.grid().len(),
                fits.join(", ")
            );
            let _ = branch.termination == BranchTermination::SlackExhausted;
        }
        Err(e) => println!("alpha={alpha:+.3}: FAILED {e}"),
    }
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let floor: f64 = args.get(1).map(|s| s.parse().unwrap()).unwrap_or(1e-2);
    let n_max: usize = args.get(2).map(|s| s.parse().unwrap()).unwrap_or(1024);
    for alpha in [-0.220, -0.222, -0.224, -0.225, -0.226, -0.228] {
        run(alpha, floor, n_max);
    }
}
