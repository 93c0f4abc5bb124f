//! Sampling and reconstruction of bandlimited signals on finite weighted
//! graphs: Laplacian spectra, Paley-Wiener spaces, averaging functionals on
//! subset covers with Poincare-type inequalities, frame reconstruction, and
//! variational spline interpolation with certified error bounds.

pub mod cover;
pub mod error;
pub mod frame;
pub mod graph;
pub mod lattice;
pub mod linalg;
pub mod random;
pub mod signal;
pub mod spectral;
pub mod spline;

pub use cover::{
    verify_cover_poincare, verify_single_poincare, verify_single_poincare_with, Cover,
    CoverPoincareReport, CoverSpec, FunctionalKind, FunctionalSet, InequalityCheck,
    PoincareConstants, SinglePoincareReport,
};
pub use error::{Error, Result};
pub use frame::{
    scan_epsilon, EpsilonScan, FrameReport, FrameSystem, IterationTrace, ReconstructionReport,
};
pub use graph::WeightedGraph;
pub use lattice::{
    cycle_spectrum, make_cycle, make_path, path_spectrum, run_lattice_experiment,
    triple_cover_fixture, Discrepancy, EigenvectorSweep, LatticeFixture, LatticeKind,
    LatticeMethod, LatticeReport,
};
pub use random::{random_connected_graph, random_pw_signal, random_signal, rng_from_seed};
pub use signal::Signal;
pub use spectral::{BernsteinCheck, PaleyWienerSpace, SpectralDecomposition, SpectrumReport};
pub use spline::{
    doubling_lemma_check, k_inner_product, seminorm_gram_check, spline_characterization_check,
    spline_reconstruct, spline_solve, spline_solve_projection, spline_solve_projection_from,
    SplineProblem, SplineReconstruction, SplineReport, SplineSolution, SplineStep,
};
