//! Frame systems on Paley-Wiener spaces built from sampling functionals,
//! with dual-frame and iterative reconstruction.
//!
//! The frame vectors are xi_j = P_omega psi_j. In the band eigenbasis the
//! analysis matrix P holds the band coefficients of psi_j in column j, the
//! frame operator is T = P P^H, and the empirical frame bounds (A, B) are
//! its extreme eigenvalues: A |f|^2 <= sum_j |<f, psi_j>|^2 <= B |f|^2 for
//! every f in PW_omega, with equality at the extreme eigenvectors.
//!
//! When the bandwidth satisfies 0 < omega < Lambda/((1+eps) Theta), i.e.
//! gamma = (1+eps)(Theta/Lambda) omega < 1, the sampling theory certifies
//! the lower bound (1-gamma) eps/((1+eps) c); the upper bound is
//! C = max |psi_j|^2, multiplied by the covering multiplicity when subsets
//! share vertices. The empirical bounds must bracket inside these whenever
//! the hypothesis holds; both are reported.

use crate::cover::{Cover, FunctionalSet, PoincareConstants};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_extreme_vectors, hermitian_extremes, lu_solve, CMat, CVec};
use crate::signal::Signal;
use crate::spectral::PaleyWienerSpace;
use serde::Serialize;

pub const DEFAULT_ITER_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 10_000;
/// Grid scanned when searching for the epsilon with the best certified
/// lower bound.
pub const DEFAULT_EPS_GRID: [f64; 8] = [0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];

const FRAME_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct FrameSystem<'d> {
    pw: PaleyWienerSpace<'d>,
    epsilon: f64,
    /// m x J; column j holds the band coefficients of psi_j.
    analysis: CMat,
    /// T = analysis * analysis^H.
    frame_op: CMat,
    lower: f64,
    upper: f64,
    gamma: f64,
    hypothesis_holds: bool,
    theoretical_lower: Option<f64>,
    theoretical_upper: f64,
    constants: PoincareConstants,
    is_frame: bool,
}

impl<'d> FrameSystem<'d> {
    pub fn build(
        cover: &Cover,
        fs: &FunctionalSet,
        pw: PaleyWienerSpace<'d>,
        epsilon: f64,
    ) -> Result<Self> {
        if epsilon <= 0.0 {
            return Err(Error::NonPositiveEpsilon { epsilon });
        }
        let m = pw.dim();
        if m == 0 {
            return Err(Error::TrivialPwSpace { omega: pw.omega() });
        }
        let j_count = fs.len();
        let mut analysis = CMat::zeros(m, j_count);
        for j in 0..j_count {
            let coeffs = pw.coefficients(fs.psi(j))?;
            analysis.set_column(j, &coeffs);
        }
        let frame_op = &analysis * analysis.adjoint();
        let (lower, upper) = hermitian_extremes(&frame_op);

        let constants = fs.constants(cover);
        let omega = pw.omega();
        let gamma = (1.0 + epsilon) * constants.theta_max / constants.lambda_min * omega;
        let hypothesis_holds = omega > 0.0 && gamma < 1.0;
        let theoretical_lower = hypothesis_holds
            .then(|| (1.0 - gamma) * epsilon / ((1.0 + epsilon) * constants.c_max));
        let theoretical_upper = constants.psi_norm_sq_max * constants.max_multiplicity as f64;
        let is_frame = lower > FRAME_TOL * upper.max(1.0);

        Ok(FrameSystem {
            pw,
            epsilon,
            analysis,
            frame_op,
            lower,
            upper,
            gamma,
            hypothesis_holds,
            theoretical_lower,
            theoretical_upper,
            constants,
            is_frame,
        })
    }

    pub fn pw(&self) -> PaleyWienerSpace<'d> {
        self.pw
    }

    pub fn omega(&self) -> f64 {
        self.pw.omega()
    }

    pub fn dim(&self) -> usize {
        self.pw.dim()
    }

    pub fn n_functionals(&self) -> usize {
        self.analysis.ncols()
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Empirical frame bounds (A, B).
    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn hypothesis_holds(&self) -> bool {
        self.hypothesis_holds
    }

    pub fn theoretical_lower(&self) -> Option<f64> {
        self.theoretical_lower
    }

    pub fn theoretical_upper(&self) -> f64 {
        self.theoretical_upper
    }

    pub fn constants(&self) -> &PoincareConstants {
        &self.constants
    }

    /// The analysis map restricted to PW_omega is injective, so signals are
    /// determined by their samples.
    pub fn uniqueness_check(&self) -> bool {
        self.is_frame
    }

    /// xi_j = P_omega psi_j.
    pub fn frame_vector(&self, j: usize) -> Signal {
        self.pw.synthesize(&self.analysis.column(j).into_owned())
    }

    /// Canonical dual vector Omega_j, the frame-operator inverse of xi_j.
    pub fn dual_frame_vector(&self, j: usize) -> Result<Signal> {
        if !self.is_frame {
            return Err(Error::NotAFrame { lower: self.lower });
        }
        let coeffs = lu_solve(&self.frame_op, &self.analysis.column(j).into_owned())
            .ok_or(Error::SingularFrameOperator)?;
        Ok(self.pw.synthesize(&coeffs))
    }

    /// Frame operator on PW_omega: f -> sum_j <f, xi_j> xi_j. Signals with
    /// out-of-band content are projected on entry.
    pub fn frame_operator_apply(&self, f: &Signal) -> Result<Signal> {
        let a = self.pw.coefficients(f)?;
        Ok(self.pw.synthesize(&(&self.frame_op * a)))
    }

    /// Extreme eigenvectors of the frame operator, synthesized as signals;
    /// the frame inequality is an equality on them.
    pub fn extreme_signals(&self) -> ((f64, Signal), (f64, Signal)) {
        let ((lo, vlo), (hi, vhi)) = hermitian_extreme_vectors(&self.frame_op);
        (
            (lo, self.pw.synthesize(&vlo)),
            (hi, self.pw.synthesize(&vhi)),
        )
    }

    /// Paper's preferred relaxation 2/(A+B), giving eta = (B-A)/(A+B).
    pub fn rho_default(&self) -> f64 {
        2.0 / (self.lower + self.upper)
    }

    /// Contraction factor for one relaxed iteration.
    pub fn eta(&self, rho: f64) -> f64 {
        (1.0 - rho * self.lower)
            .abs()
            .max((1.0 - rho * self.upper).abs())
    }

    fn checked_samples(&self, samples: &CVec) -> Result<()> {
        if samples.len() != self.n_functionals() {
            return Err(Error::SampleCount {
                expected: self.n_functionals(),
                got: samples.len(),
            });
        }
        if !self.is_frame {
            return Err(Error::NotAFrame { lower: self.lower });
        }
        Ok(())
    }

    /// Frame algorithm: f_n = f_{n-1} + rho (sum_j s_j xi_j - T f_{n-1}),
    /// run in band coefficients from f_0 = 0. The update sum_j s_j xi_j is
    /// computable from the samples alone. When a reference signal is given
    /// the trace records |f - f_n| per iteration.
    pub fn reconstruct_iterative(
        &self,
        samples: &CVec,
        rho: Option<f64>,
        tol: f64,
        max_iter: usize,
        reference: Option<&Signal>,
    ) -> Result<(Signal, IterationTrace)> {
        self.checked_samples(samples)?;
        let rho = rho.unwrap_or_else(|| self.rho_default());
        let limit = 2.0 / self.upper;
        if rho <= 0.0 || rho >= limit {
            return Err(Error::InvalidRelaxation { rho, limit });
        }
        let rhs = &self.analysis * samples;
        let reference_coeffs = match reference {
            Some(f) => Some(self.pw.coefficients(f)?),
            None => None,
        };

        let mut a = CVec::zeros(self.dim());
        let mut update_norms = Vec::new();
        let mut errors = reference_coeffs.as_ref().map(|_| Vec::new());
        let mut converged = false;
        let mut iterations = 0;
        while iterations < max_iter {
            let update = (&rhs - &self.frame_op * &a) * num_complex::Complex64::new(rho, 0.0);
            a += &update;
            iterations += 1;
            let step = update.norm();
            update_norms.push(step);
            if let (Some(errs), Some(truth)) = (errors.as_mut(), reference_coeffs.as_ref()) {
                errs.push((truth - &a).norm());
            }
            if step < tol {
                converged = true;
                break;
            }
        }

        let trace = IterationTrace {
            rho,
            eta: self.eta(rho),
            iterations,
            converged,
            update_norms,
            errors,
        };
        Ok((self.pw.synthesize(&a), trace))
    }

    /// Duffin-Schaeffer reconstruction f = sum_j s_j Omega_j through one
    /// frame-operator solve.
    pub fn reconstruct_dual(&self, samples: &CVec) -> Result<Signal> {
        self.checked_samples(samples)?;
        let rhs = &self.analysis * samples;
        let coeffs = lu_solve(&self.frame_op, &rhs).ok_or(Error::SingularFrameOperator)?;
        Ok(self.pw.synthesize(&coeffs))
    }

    pub fn report(&self) -> FrameReport {
        FrameReport {
            omega: self.omega(),
            epsilon: self.epsilon,
            dimension: self.dim(),
            n_functionals: self.n_functionals(),
            empirical_lower: self.lower,
            empirical_upper: self.upper,
            gamma: self.gamma,
            hypothesis_holds: self.hypothesis_holds,
            theoretical_lower: self.theoretical_lower,
            theoretical_upper: self.theoretical_upper,
            max_multiplicity: self.constants.max_multiplicity,
            is_frame: self.is_frame,
            rho_default: self.rho_default(),
            eta_default: self.eta(self.rho_default()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct IterationTrace {
    pub rho: f64,
    pub eta: f64,
    pub iterations: usize,
    pub converged: bool,
    pub update_norms: Vec<f64>,
    /// |f - f_n| per iteration; present when a reference was supplied.
    pub errors: Option<Vec<f64>>,
}

impl IterationTrace {
    pub fn final_error(&self) -> Option<f64> {
        self.errors.as_ref().and_then(|e| e.last().copied())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameReport {
    pub omega: f64,
    pub epsilon: f64,
    pub dimension: usize,
    pub n_functionals: usize,
    pub empirical_lower: f64,
    pub empirical_upper: f64,
    pub gamma: f64,
    pub hypothesis_holds: bool,
    pub theoretical_lower: Option<f64>,
    pub theoretical_upper: f64,
    pub max_multiplicity: usize,
    pub is_frame: bool,
    pub rho_default: f64,
    pub eta_default: f64,
}

/// Reconstruction summary for reports.
#[derive(Debug, Clone, Serialize)]
pub struct ReconstructionReport {
    pub method: String,
    pub iterations: usize,
    pub final_error: Option<f64>,
    pub eta_bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EpsilonScan {
    pub epsilon: f64,
    pub lower_bound: f64,
}

/// Scan a grid of epsilon values and return the one certifying the best
/// (largest) lower frame bound for this bandwidth, if any certifies one.
pub fn scan_epsilon(
    constants: &PoincareConstants,
    omega: f64,
    grid: &[f64],
) -> Option<EpsilonScan> {
    let mut best: Option<EpsilonScan> = None;
    for &eps in grid {
        if eps <= 0.0 || omega <= 0.0 {
            continue;
        }
        let gamma = (1.0 + eps) * constants.theta_max / constants.lambda_min * omega;
        if gamma >= 1.0 {
            continue;
        }
        let bound = (1.0 - gamma) * eps / ((1.0 + eps) * constants.c_max);
        if best.map_or(true, |b| bound > b.lower_bound) {
            best = Some(EpsilonScan {
                epsilon: eps,
                lower_bound: bound,
            });
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::WeightedGraph;
    use crate::spectral::SpectralDecomposition;
    use approx::assert_abs_diff_eq;
    use num_complex::Complex64;

    fn path(n: usize) -> WeightedGraph {
        let edges: Vec<(String, String, f64)> = (0..n - 1)
            .map(|i| (i.to_string(), (i + 1).to_string(), 1.0))
            .collect();
        WeightedGraph::build(&edges).unwrap()
    }

    fn cycle(n: usize) -> WeightedGraph {
        let edges: Vec<(String, String, f64)> = (0..n)
            .map(|i| (i.to_string(), ((i + 1) % n).to_string(), 1.0))
            .collect();
        WeightedGraph::build(&edges).unwrap()
    }

    fn path9_normalized() -> (WeightedGraph, Cover, FunctionalSet) {
        let g = path(9);
        let cover = Cover::build(
            &g,
            vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]],
        )
        .unwrap();
        let fs = FunctionalSet::normalized(&cover).unwrap();
        (g, cover, fs)
    }

    #[test]
    fn single_unit_functional_is_a_tight_frame_on_constants() {
        let g = path(2);
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let cover = Cover::build(&g, vec![vec![0, 1]]).unwrap();
        let inv = 1.0 / std::f64::consts::SQRT_2;
        let psi = Signal::from_real(&[inv, inv]);
        let fs = FunctionalSet::explicit(&cover, vec![psi]).unwrap();
        let pw = d.pw_space(0.0).unwrap();
        assert_eq!(pw.dim(), 1);
        let sys = FrameSystem::build(&cover, &fs, pw, 1.0).unwrap();
        let (a, b) = sys.bounds();
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-12);
        assert!(sys.uniqueness_check());

        let f = d.eigenvector(0).scale(Complex64::new(0.0, -2.5));
        let samples = fs.sample(&f).unwrap();
        let back = sys.reconstruct_dual(&samples).unwrap();
        assert!(back.sub(&f).norm() < 1e-10);
    }

    #[test]
    fn dirac_frame_on_a_cycle_is_tight() {
        // One Dirac per vertex: the analysis rows are orthonormal, so the
        // frame operator is the identity on every band.
        let g = cycle(3);
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let cover = Cover::build(&g, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let fs = FunctionalSet::dirac(&cover, Some(&[0, 1, 2])).unwrap();
        let pw = d.pw_space(3.0).unwrap();
        assert_eq!(pw.dim(), 3);
        let sys = FrameSystem::build(&cover, &fs, pw, 1.0).unwrap();
        let (a, b) = sys.bounds();
        assert_abs_diff_eq!(a, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(b, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(sys.rho_default(), 1.0, epsilon = 1e-10);

        // Tight frame: one iteration reaches the exact answer.
        let f = Signal::new(vec![
            Complex64::new(0.4, -1.0),
            Complex64::new(1.2, 0.3),
            Complex64::new(-0.7, 0.9),
        ]);
        let samples = fs.sample(&f).unwrap();
        let (recon, trace) =
            sys.reconstruct_iterative(&samples, None, 1e-10, 50, Some(&f)).unwrap();
        assert!(recon.sub(&f).norm() < 1e-10);
        assert!(trace.errors.unwrap()[0] < 1e-10);
    }

    #[test]
    fn frame_operator_quadratic_identity() {
        let (_, cover, fs) = path9_normalized();
        let g = path(9);
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let pw = d.pw_space(0.5).unwrap();
        let sys = FrameSystem::build(&cover, &fs, pw, 0.5).unwrap();
        let f = d
            .eigenvector(0)
            .scale(Complex64::new(1.0, 0.5))
            .add(&d.eigenvector(1).scale(Complex64::new(-0.3, 0.8)));
        let phi_f = sys.frame_operator_apply(&f).unwrap();
        let quad = f.inner(&phi_f).re;
        let sum: f64 = (0..fs.len())
            .map(|j| fs.apply(j, &f).norm_sqr())
            .sum();
        assert_abs_diff_eq!(quad, sum, epsilon = 1e-10 * sum.max(1.0));
    }

    #[test]
    fn bounds_attained_at_extreme_eigenvectors() {
        let (_, cover, fs) = path9_normalized();
        let g = path(9);
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let pw = d.pw_space(0.5).unwrap();
        assert_eq!(pw.dim(), 3);
        let sys = FrameSystem::build(&cover, &fs, pw, 0.5).unwrap();
        let (a, b) = sys.bounds();
        let ((lo, f_lo), (hi, f_hi)) = sys.extreme_signals();
        assert_abs_diff_eq!(lo, a, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, b, epsilon = 1e-12);
        let sum_lo: f64 = (0..fs.len()).map(|j| fs.apply(j, &f_lo).norm_sqr()).sum();
        let sum_hi: f64 = (0..fs.len()).map(|j| fs.apply(j, &f_hi).norm_sqr()).sum();
        assert_abs_diff_eq!(sum_lo, a * f_lo.norm_sq(), epsilon = 1e-9);
        assert_abs_diff_eq!(sum_hi, b * f_hi.norm_sq(), epsilon = 1e-9);
    }

    #[test]
    fn certified_bounds_bracket_empirical_ones() {
        let (_, cover, fs) = path9_normalized();
        let g = path(9);
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let pw = d.pw_space(0.5).unwrap();
        let sys = FrameSystem::build(&cover, &fs, pw, 0.5).unwrap();
        assert!(sys.hypothesis_holds());
        assert_abs_diff_eq!(sys.gamma(), 0.75, epsilon = 1e-12);
        let certified = sys.theoretical_lower().unwrap();
        // (1 - 3/4) * (1/2) / ((3/2) * 3) = 1/36.
        assert_abs_diff_eq!(certified, 1.0 / 36.0, epsilon = 1e-12);
        let (a, b) = sys.bounds();
        assert!(certified <= a + 1e-9);
        assert!(b <= sys.theoretical_upper() + 1e-9);
    }

    #[test]
    fn dual_and_iterative_reconstructions_agree() {
        let (_, cover, fs) = path9_normalized();
        let g = path(9);
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let pw = d.pw_space(0.5).unwrap();
        let sys = FrameSystem::build(&cover, &fs, pw, 0.5).unwrap();
        let f = d
            .eigenvector(0)
            .scale(Complex64::new(0.9, -0.4))
            .add(&d.eigenvector(1).scale(Complex64::new(0.2, 1.1)));
        let samples = fs.sample(&f).unwrap();
        let dual = sys.reconstruct_dual(&samples).unwrap();
        let (iter, trace) = sys
            .reconstruct_iterative(&samples, None, 1e-12, 10_000, Some(&f))
            .unwrap();
        assert!(trace.converged);
        assert!(dual.sub(&f).norm() < 1e-8, "{}", dual.sub(&f).norm());
        assert!(iter.sub(&f).norm() < 1e-8);
        assert!(dual.sub(&iter).norm() < 1e-6);
    }

    #[test]
    fn error_curve_stays_under_the_geometric_bound() {
        let (_, cover, fs) = path9_normalized();
        let g = path(9);
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let pw = d.pw_space(0.5).unwrap();
        let sys = FrameSystem::build(&cover, &fs, pw, 0.5).unwrap();
        let f = d
            .eigenvector(0)
            .scale(Complex64::new(-1.3, 0.2))
            .add(&d.eigenvector(1).scale(Complex64::new(0.5, 0.5)));
        let samples = fs.sample(&f).unwrap();
        let (_, trace) = sys
            .reconstruct_iterative(&samples, None, 1e-13, 200, Some(&f))
            .unwrap();
        let eta = trace.eta;
        assert!(eta < 1.0);
        let norm = f.norm();
        for (n, err) in trace.errors.unwrap().iter().enumerate() {
            let bound = eta.powi(n as i32 + 1) * norm + 1e-9;
            assert!(*err <= bound, "iteration {}: {} > {}", n + 1, err, bound);
        }
    }

    #[test]
    fn dual_of_the_dual_recovers_through_reversed_pairing() {
        let (_, cover, fs) = path9_normalized();
        let g = path(9);
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let pw = d.pw_space(0.5).unwrap();
        let sys = FrameSystem::build(&cover, &fs, pw, 0.5).unwrap();
        let f = d
            .eigenvector(0)
            .scale(Complex64::new(0.3, 0.9))
            .add(&d.eigenvector(1).scale(Complex64::new(-0.6, 0.1)));
        // f = sum_j <f, Omega_j> xi_j.
        let mut back = Signal::zeros(9);
        for j in 0..fs.len() {
            let omega_j = sys.dual_frame_vector(j).unwrap();
            back = back.add_scaled(f.inner(&omega_j), &sys.frame_vector(j));
        }
        assert!(back.sub(&f).norm() < 1e-8);
    }

    #[test]
    fn rank_deficiency_is_reported_not_a_frame() {
        let (_, cover, fs) = path9_normalized();
        let g = path(9);
        let d = SpectralDecomposition::decompose(&g).unwrap();
        // Seven band dimensions against three functionals.
        let pw = d.pw_space(3.5).unwrap();
        assert!(pw.dim() > fs.len());
        let sys = FrameSystem::build(&cover, &fs, pw, 0.5).unwrap();
        assert!(!sys.uniqueness_check());
        let samples = CVec::zeros(fs.len());
        assert!(matches!(
            sys.reconstruct_dual(&samples),
            Err(Error::NotAFrame { .. })
        ));
    }

    #[test]
    fn relaxation_outside_the_convergent_range_is_rejected() {
        let (_, cover, fs) = path9_normalized();
        let g = path(9);
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let pw = d.pw_space(0.5).unwrap();
        let sys = FrameSystem::build(&cover, &fs, pw, 0.5).unwrap();
        let (_, b) = sys.bounds();
        let samples = CVec::zeros(fs.len());
        for rho in [0.0, -1.0, 2.0 / b, 2.0 / b + 1.0] {
            assert!(matches!(
                sys.reconstruct_iterative(&samples, Some(rho), 1e-10, 10, None),
                Err(Error::InvalidRelaxation { .. })
            ));
        }
    }

    #[test]
    fn epsilon_scan_maximizes_the_certified_bound() {
        let (_, cover, fs) = path9_normalized();
        let constants = fs.constants(&cover);
        let best = scan_epsilon(&constants, 0.5, &DEFAULT_EPS_GRID).unwrap();
        // gamma(eps) = (1+eps)/2 < 1 restricts the grid to eps < 1; the
        // bound (1-gamma) eps / ((1+eps) c) peaks at eps = 0.5.
        assert_abs_diff_eq!(best.epsilon, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(best.lower_bound, 1.0 / 36.0, epsilon = 1e-12);
        // Far out of range: nothing certifiable.
        assert!(scan_epsilon(&constants, 5.0, &DEFAULT_EPS_GRID).is_none());
    }
}
