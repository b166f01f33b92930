// scratch probe: fine-floor cusp runs at candidate alphas
use gowave_core::analysis::{holder_fit, slack};
use gowave_core::model::ModelParams;
use gowave_core::solver::{continue_branch, SolverSettings};

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let alphas: Vec<f64> = if args.len() > 1 {
        args[1..].iter().map(|s| s.parse().unwrap()).collect()
    } else {
        vec![-0.22193683]
    };
    for alpha in alphas {
        let t0 = std::time::Instant::now();
        let p = ModelParams::gardner(0.0, 1.0, alpha).unwrap();
        let settings = SolverSettings {
            eps_max: 1.2,
            slack_floor: 1e-4,
            n_max: 4096,
            step_floor_frac: 1.0 / 1024.0,
            ..Default::default()
        };
        match continue_branch(&p, 1, 0.01, 0.01, &settings) {
            Ok(b) => {
                let last = b.points.last().unwrap();
                let s = slack(&p, last.c, &last.profile);
                let maxphi = last.profile.samples().iter().fold(f64::MIN, |m, &v| m.max(v));
                let vertex = -1.0 / (2.0 * alpha);
                let idx = last
                    .profile
                    .samples()
                    .iter()
                    .enumerate()
                    .max_by(|x, y| x.1.partial_cmp(y.1).unwrap())
                    .unwrap()
                    .0;
                let mut line = format!(
                    "alpha={alpha:.8}: {:?} eps={:.4} c_T={:.6} c_crit={:.6} slack={:.2e} maxphi={:.4} vtx={:.4} n={} res={:.1e} t={:.0?}",
                    b.termination, last.eps, last.c, -1.0/(4.0*alpha), s, maxphi, vertex,
                    last.profile.grid().len(), last.residual_norm, t0.elapsed()
                );
                for (w, e) in [(64usize, 8usize), (96, 8), (128, 8)] {
                    match holder_fit(&last.profile, idx, w, e) {
                        Ok((exp, konst)) => line.push_str(&format!(" | w{w}: {exp:.3}/{konst:.2}")),
                        Err(err) => line.push_str(&format!(" | w{w}: ERR {err}")),
                    }
                }
                println!("{line}");
            }
            Err(e) => println!("alpha={alpha:.8}: FAILED {e} t={:.0?}", t0.elapsed()),
        }
    }
}
