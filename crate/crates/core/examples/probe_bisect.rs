// scratch probe: bisect alpha to the critical cusp configuration
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

// true = subcritical: crest stays below the vertex of n'
fn subcritical(branch: &Branch, alpha: f64) -> bool {
    let last = branch.points.last().unwrap();
    let maxphi = last.profile.samples().iter().fold(f64::MIN, |m, &v| m.max(v));
    maxphi < -1.0 / (2.0 * alpha)
}

fn main() {
    let t0 = std::time::Instant::now();
    let floor = 1e-3;
    let (mut lo, mut hi) = (-0.224, -0.222); // lo supercritical, hi subcritical
    for it in 0..14 {
        let mid = 0.5 * (lo + hi);
        let b = run(mid, floor, 2048, 2.0).expect("branch");
        if subcritical(&b, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
        println!("it {it}: bracket [{lo:.8}, {hi:.8}] t={:.1?}", t0.elapsed());
    }
    // final run on the subcritical side
    let alpha = hi;
    let b = run(alpha, floor, 2048, 2.0).expect("branch");
    let last = b.points.last().unwrap();
    let idx = last
        .profile
        .samples()
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .unwrap()
        .0;
    println!(
        "final alpha={alpha:.8}: c_T={:.6}, slack={:.2e}, n={}",
        last.c,
        gowave_core::analysis::slack(&b.params, last.c, &last.profile),
        last.profile.grid().len()
    );
    for (w, e) in [(16usize, 2usize), (32, 2), (48, 3), (64, 3), (96, 4)] {
        match holder_fit(&last.profile, idx, w, e) {
            Ok((exp, konst)) => println!("  w{w}/e{e}: exponent {exp:.4} constant {konst:.4}"),
            Err(err) => println!("  w{w}/e{e}: ERR {err}"),
        }
    }
    println!("total {:?}", t0.elapsed());
}
