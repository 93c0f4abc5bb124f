//! End-to-end acceptance checks, one test per numbered contract. Criteria
//! 1 through 9 live here; criterion 10 (CLI determinism) sits with the
//! binary crate.

use std::io::Write as _;
use std::time::{Duration, Instant};

use gpw_core::lattice::{make_cycle, make_path, triple_cover_fixture, LatticeKind, LatticeMethod};
use gpw_core::spline::{
    spline_characterization_check, spline_reconstruct, spline_solve, spline_solve_projection,
    SplineProblem,
};
use gpw_core::{
    cycle_spectrum, random_connected_graph, random_pw_signal, random_signal, rng_from_seed,
    run_lattice_experiment, verify_cover_poincare, verify_single_poincare,
    verify_single_poincare_with, Cover, FrameSystem, FunctionalSet, Signal, SpectralDecomposition,
    WeightedGraph,
};
use num_complex::Complex64;

/// A raw handle write stays visible under the default harness capture, so
/// every run shows one verdict line per criterion.
fn criterion(number: u32, pass: bool) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let _ = writeln!(std::io::stdout(), "criterion {number}: {verdict}");
    assert!(pass, "criterion {number} failed");
}

fn multiset_close(a: &[f64], b: &[f64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    x.iter().zip(&y).all(|(p, q)| (p - q).abs() <= tol)
}

fn triple_cover(g: &WeightedGraph) -> Cover {
    let n = g.len();
    let subsets: Vec<Vec<usize>> = (0..n / 3)
        .map(|j| vec![3 * j, 3 * j + 1, 3 * j + 2])
        .collect();
    Cover::build(g, subsets).unwrap()
}

#[test]
fn criterion_01_dirichlet_identity() {
    let start = Instant::now();
    let mut rng = rng_from_seed(101);
    let mut pass = true;
    for trial in 0..200usize {
        let n = 2 + trial % 63;
        let g = random_connected_graph(n, trial % 7, &mut rng).unwrap();
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let op_norm = d.lambda_max();
        for _ in 0..10 {
            let f = random_signal(g.len(), &mut rng);
            let quad = f.inner(&g.laplacian_apply(&f).unwrap());
            let grad_sq = g.gradient_norm(&f).unwrap().powi(2);
            let tol = 1e-10 * f.norm_sq() * op_norm;
            if (quad.re - grad_sq).abs() > tol || quad.im.abs() > tol {
                pass = false;
            }
        }
    }
    pass = pass && start.elapsed() < Duration::from_secs(10);
    criterion(1, pass);
}

#[test]
fn criterion_02_single_graph_poincare() {
    let mut rng = rng_from_seed(202);
    let mut pass = true;
    let mut checked = 0usize;
    for trial in 0..200usize {
        let n = 2 + trial % 63;
        let g = random_connected_graph(n, trial % 5, &mut rng).unwrap();
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let offset = Signal::ones(n).scale(Complex64::new(2.0, 0.0));
        let psis = [
            Signal::ones(n),
            Signal::indicator(n, &[n / 2]),
            random_signal(n, &mut rng).add(&offset),
        ];
        for psi in &psis {
            for _ in 0..2 {
                let f = random_signal(n, &mut rng);
                let report = verify_single_poincare_with(&g, &d, psi, &f).unwrap();
                if !report.holds {
                    pass = false;
                }
                checked += 1;
            }
        }
    }
    pass = pass && checked >= 1000;

    // K2 with psi = chi and f = (a, -a): the bound is attained exactly.
    let k2 = WeightedGraph::build(&[("u", "v", 1.0)]).unwrap();
    let a = Complex64::new(0.7, -0.4);
    let f = Signal::new(vec![a, -a]);
    let report = verify_single_poincare(&k2, &Signal::ones(2), &f).unwrap();
    let equality = report.in_kernel
        && report
            .kernel_form
            .as_ref()
            .is_some_and(|c| (c.lhs - c.rhs).abs() <= 1e-12 * c.lhs.max(1.0));
    criterion(2, pass && equality);
}

#[test]
fn criterion_03_cover_inequalities() {
    let mut rng = rng_from_seed(303);
    let mut pass = true;
    for kind in [LatticeKind::Path, LatticeKind::Cycle] {
        for n in [9usize, 30, 99] {
            let g = match kind {
                LatticeKind::Path => make_path(n).unwrap(),
                LatticeKind::Cycle => make_cycle(n).unwrap(),
            };
            let cover = triple_cover(&g);
            let sets = [
                FunctionalSet::characteristic(&cover, None).unwrap(),
                FunctionalSet::normalized(&cover).unwrap(),
                FunctionalSet::dirac(&cover, None).unwrap(),
            ];
            for fs in &sets {
                for _ in 0..1000 {
                    let f = random_signal(n, &mut rng);
                    for epsilon in [0.1, 0.5, 1.0, 2.0, 10.0] {
                        let report =
                            verify_cover_poincare(&g, &cover, fs, &f, epsilon, None).unwrap();
                        if !report.holds {
                            pass = false;
                        }
                    }
                }
            }
        }
    }
    criterion(3, pass);
}

#[test]
fn criterion_04_spectrum_oracles() {
    let mut pass = true;
    for n in 3..=64usize {
        let g = make_cycle(n).unwrap();
        let d = SpectralDecomposition::decompose(&g).unwrap();
        if !multiset_close(d.eigenvalues(), &cycle_spectrum(n), 1e-9) {
            pass = false;
        }
    }

    // The 3-vertex path spectrum drives every cover constant.
    let p3 = make_path(3).unwrap();
    let d3 = SpectralDecomposition::decompose(&p3).unwrap();
    pass = pass && multiset_close(d3.eigenvalues(), &[0.0, 1.0, 3.0], 1e-9);
    let fix = triple_cover_fixture(9, LatticeKind::Path).unwrap();
    pass = pass && (fix.constants().lambda_min - 1.0).abs() <= 1e-9;

    // The demo report must expose the conflicting quoted value set.
    let method = LatticeMethod::Frame { rho: None };
    let report = run_lattice_experiment(&fix, 0.3, 0.5, &method, 3, 404).unwrap();
    let row = report
        .discrepancies
        .iter()
        .find(|r| r.quantity == "induced triple spectrum");
    pass = pass
        && row.is_some_and(|r| {
            !r.agrees
                && r.quoted == vec![0.0, 2.0, 4.0]
                && multiset_close(&r.computed, &[0.0, 1.0, 3.0], 1e-9)
        });
    criterion(4, pass);
}

#[test]
fn criterion_05_frame_bounds() {
    let mut pass = true;
    let mut tested = 0usize;
    for n in [9usize, 30] {
        let g = make_cycle(n).unwrap();
        let cover = triple_cover(&g);
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let sets = [
            FunctionalSet::characteristic(&cover, None).unwrap(),
            FunctionalSet::normalized(&cover).unwrap(),
            FunctionalSet::dirac(&cover, None).unwrap(),
        ];
        for fs in &sets {
            let sup = fs.constants(&cover).admissible_sup;
            for t in [0.1, 0.3, 0.6, 0.9] {
                for epsilon in [0.1, 0.5, 1.0, 2.0] {
                    let omega = t * sup;
                    let frame =
                        FrameSystem::build(&cover, fs, d.pw_space(omega).unwrap(), epsilon)
                            .unwrap();
                    if !frame.hypothesis_holds() {
                        continue;
                    }
                    tested += 1;
                    let (lower, upper) = frame.bounds();
                    let certified = frame.theoretical_lower().unwrap();
                    if lower < certified - 1e-9 || upper > frame.theoretical_upper() + 1e-9 {
                        pass = false;
                    }
                }
            }
        }
    }
    pass = pass && tested >= 20;
    criterion(5, pass);
}

/// The three standing reconstruction fixtures: admissible bandwidths on the
/// 9-path, 9-cycle, and 30-cycle with normalized triples.
fn standing_fixtures() -> Vec<(gpw_core::LatticeFixture, f64, f64)> {
    vec![
        (triple_cover_fixture(9, LatticeKind::Path).unwrap(), 0.5, 0.5),
        (triple_cover_fixture(9, LatticeKind::Cycle).unwrap(), 0.6, 0.5),
        (
            triple_cover_fixture(30, LatticeKind::Cycle).unwrap(),
            0.25,
            1.0,
        ),
    ]
}

#[test]
fn criterion_06_frame_iteration_contracts() {
    let mut rng = rng_from_seed(606);
    let mut pass = true;
    for (fix, omega, epsilon) in standing_fixtures() {
        let pw = fix.decomposition().pw_space(omega).unwrap();
        let frame = FrameSystem::build(
            fix.cover(),
            fix.functionals(),
            fix.decomposition().pw_space(omega).unwrap(),
            epsilon,
        )
        .unwrap();
        let eta = frame.eta(frame.rho_default());
        for _ in 0..50 {
            let f = random_pw_signal(&pw, &mut rng);
            let samples = fix.functionals().sample(&f).unwrap();
            let (_, trace) = frame
                .reconstruct_iterative(&samples, None, 1e-12, 5000, Some(&f))
                .unwrap();
            for (i, err) in trace.errors.as_ref().unwrap().iter().enumerate() {
                if *err > eta.powi(i as i32 + 1) * f.norm() + 1e-9 {
                    pass = false;
                }
            }
        }
    }

    // Dirac functionals on full-bandwidth small cycles give a tight frame:
    // one relaxed step with rho = 2/(A+B) lands on the signal.
    for n in [3usize, 4] {
        let g = make_cycle(n).unwrap();
        let subsets: Vec<Vec<usize>> = (0..n).map(|j| vec![j, (j + 1) % n]).collect();
        let cover = Cover::build(&g, subsets).unwrap();
        let picks: Vec<usize> = (0..n).collect();
        let fs = FunctionalSet::dirac(&cover, Some(&picks)).unwrap();
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let omega = d.lambda_max();
        let frame = FrameSystem::build(&cover, &fs, d.pw_space(omega).unwrap(), 0.5).unwrap();
        let (lower, upper) = frame.bounds();
        if (upper - lower).abs() > 1e-12 {
            pass = false;
        }
        let f = random_signal(n, &mut rng);
        let samples = fs.sample(&f).unwrap();
        let (_, trace) = frame
            .reconstruct_iterative(&samples, None, 1e-12, 10, Some(&f))
            .unwrap();
        if trace.errors.as_ref().unwrap()[0] >= 1e-10 {
            pass = false;
        }
    }
    criterion(6, pass);
}

#[test]
fn criterion_07_dual_frame_round_trip() {
    let mut rng = rng_from_seed(707);
    let mut pass = true;
    for (fix, omega, epsilon) in standing_fixtures() {
        let pw = fix.decomposition().pw_space(omega).unwrap();
        let frame = FrameSystem::build(
            fix.cover(),
            fix.functionals(),
            fix.decomposition().pw_space(omega).unwrap(),
            epsilon,
        )
        .unwrap();
        for _ in 0..50 {
            let f = random_pw_signal(&pw, &mut rng);
            let samples = fix.functionals().sample(&f).unwrap();
            let dual = frame.reconstruct_dual(&samples).unwrap();
            if dual.sub(&f).norm() >= 1e-8 {
                pass = false;
            }
            let (iterative, _) = frame
                .reconstruct_iterative(&samples, None, 1e-12, 5000, None)
                .unwrap();
            if iterative.sub(&dual).norm() >= 1e-6 {
                pass = false;
            }
        }
    }
    criterion(7, pass);
}

#[test]
fn criterion_08_spline_suite() {
    let start = Instant::now();
    let mut rng = rng_from_seed(808);
    let mut pass = true;
    let fixtures = [
        (triple_cover_fixture(9, LatticeKind::Path).unwrap(), 0.5),
        (triple_cover_fixture(9, LatticeKind::Cycle).unwrap(), 0.6),
    ];
    for (fix, omega) in &fixtures {
        let fs = fix.functionals();
        let d = fix.decomposition();
        let pw = d.pw_space(*omega).unwrap();
        let raw = random_pw_signal(&pw, &mut rng);
        let f = raw.scale(Complex64::new(1.0 / raw.norm(), 0.0));

        for k in [1usize, 2, 4, 8] {
            let problem = SplineProblem::from_signal(fs, d, &f, k).unwrap();
            let kkt = spline_solve(&problem).unwrap();
            let projected = spline_solve_projection(&problem).unwrap();
            if kkt.signal.sub(&projected.signal).norm() > 1e-8 {
                pass = false;
            }
            if kkt.interpolation_residual > 1e-9 {
                pass = false;
            }
            for _ in 0..100 {
                let competitor = kkt
                    .signal
                    .add(&fs.kernel_project(&random_signal(f.len(), &mut rng)));
                let energy = d.apply_power(&competitor, k as f64).unwrap().norm();
                if energy < kkt.objective - 1e-9 {
                    pass = false;
                }
            }
            if !spline_characterization_check(&problem, &kkt.signal, 50, &mut rng).unwrap() {
                pass = false;
            }
        }

        let recon = spline_reconstruct(fs, d, fix.constants(), &f, &[1, 2, 4, 8]).unwrap();
        if !recon.hypothesis_holds || recon.gamma >= 1.0 {
            pass = false;
        }
        for step in &recon.steps {
            match step.bound {
                Some(bound) => {
                    if step.error > bound + 1e-12 {
                        pass = false;
                    }
                }
                None => pass = false,
            }
        }
    }
    pass = pass && start.elapsed() < Duration::from_secs(60);
    criterion(8, pass);
}

#[test]
fn criterion_09_lattice_demo() {
    let fix = triple_cover_fixture(30, LatticeKind::Cycle).unwrap();
    let mut pass = (fix.constants().admissible_sup - 1.0).abs() <= 1e-9;

    let frame_report = run_lattice_experiment(
        &fix,
        0.25,
        1.0,
        &LatticeMethod::Frame { rho: None },
        50,
        909,
    )
    .unwrap();
    let spline_report = run_lattice_experiment(
        &fix,
        0.25,
        1.0,
        &LatticeMethod::Spline {
            k_list: vec![1, 2, 4, 8],
        },
        50,
        909,
    )
    .unwrap();
    pass = pass && frame_report.worst_error < 1e-6 && spline_report.worst_error < 1e-6;

    // The sweep range comes from the computed spectral gap of the induced
    // triples, which admits exactly the nine eigenvectors below 1; the
    // quoted gap of 2 would admit fifteen.
    let sweep = &frame_report.eigenvector_sweep;
    pass = pass && sweep.count == 9 && sweep.worst_error < 1e-6;
    let below_quoted = fix
        .decomposition()
        .eigenvalues()
        .iter()
        .filter(|&&l| l < 2.0 * (1.0 - 1e-12))
        .count();
    pass = pass && below_quoted == 15 && below_quoted > sweep.count;
    criterion(9, pass);
}
