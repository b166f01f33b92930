// scratch probe: coarse bisection + fine final run for the cusp fit
use gowave_core::analysis::holder_fit;
use gowave_core::model::ModelParams;
use gowave_core::solver::{continue_branch, Branch, SolverSettings};

fn run(alpha: f64, floor: f64, n_max: usize, eps_max: f64) -> Option<Branch> {
    let p = ModelParams::gardner(0.0, 1.0, alpha).unwrap();
    let settings = SolverSettings {
        eps_max,
        slack_floor: floor,
        n_max,
        ..Default::default()
    };
    continue_branch(&p, 1, 0.01, 0.01, &settings).ok()
}

fn subcritical(branch: &Branch, alpha: f64) -> bool {
    let last = branch.points.last().unwrap();
    let maxphi = last.profile.samples().iter().fold(f64::MIN, |m, &v| m.max(v));
    maxphi < -1.0 / (2.0 * alpha)
}

fn main() {
    let t0 = std::time::Instant::now();
    // coarse bisection
    let (mut lo, mut hi) = (-0.232, -0.218);
    for _ in 0..16 {
        let mid = 0.5 * (lo + hi);
        match run(mid, 5e-3, 1024, 1.6) {
            Some(b) => {
                if subcritical(&b, mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            None => {
                // treat a failed run as supercritical-side
                lo = mid;
            }
        }
    }
    println!("coarse bisection: [{lo:.8}, {hi:.8}] after {:.1?}", t0.elapsed());

    // fine run on the subcritical endpoint
    let alpha = hi;
    let t1 = std::time::Instant::now();
    let b = run(alpha, 1e-4, 4096, 2.0).expect("final branch");
    let last = b.points.last().unwrap();
    let s = gowave_core::analysis::slack(&b.params, last.c, &last.profile);
    let idx = last
        .profile
        .samples()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    println!(
        "final alpha={alpha:.8}: {:?} c_T={:.6} c_crit={:.6} slack={:.2e} n={} pts={} t={:.1?}",
        b.termination,
        last.c,
        -1.0 / (4.0 * alpha),
        s,
        last.profile.grid().len(),
        b.points.len(),
        t1.elapsed()
    );
    for (w, e) in [(32usize, 4usize), (64, 8), (96, 8), (128, 8), (128, 12)] {
        match holder_fit(&last.profile, idx, w, e) {
            Ok((exp, konst)) => println!("  w{w}/e{e}: exponent {exp:.4} constant {konst:.4}"),
            Err(err) => println!("  w{w}/e{e}: ERR {err}"),
        }
    }
    println!("total {:.1?}", t0.elapsed());
}
