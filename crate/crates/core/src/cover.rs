//! Covers by connected vertex subsets, weighted sampling functionals, and
//! Poincare-type inequality verification.
//!
//! A cover is a family {S_j} of vertex subsets whose union is the whole
//! vertex set. Subsets may share vertices but never an edge, each subset
//! must induce a connected subgraph on at least two vertices, and each
//! carries a sampling functional Psi_j(f) = <f, psi_j> with supp psi_j in
//! S_j and Psi_j(chi_j) != 0.
//!
//! The constants attached to the pair (cover, functionals):
//!   theta_j  = |S_j| |psi_j|^2 / |Psi_j(chi_j)|^2
//!   Theta    = max_j theta_j
//!   Lambda   = min_j lambda_{1,j}   (first nonzero induced eigenvalue)
//!   c        = max_j |S_j|^2 / |Psi_j(chi_j)|^2
//!   C        = max_j |psi_j|^2
//! They control every inequality verified here, from the single-graph
//! Poincare inequality to the sharpened bounds for signals annihilating
//! all functionals.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::linalg::{orthonormalize, CVec};
use crate::signal::{parse_complex, Signal};
use crate::spectral::SpectralDecomposition;
use num_complex::Complex64;
use serde::Serialize;
use std::collections::BTreeMap;

/// Margin slack: an inequality holds when rhs - lhs >= -MARGIN_TOL * scale.
const MARGIN_TOL: f64 = 1e-10;

/// Epsilon sweep used by single-graph verification.
pub const SINGLE_EPS_SWEEP: [f64; 3] = [0.1, 1.0, 10.0];

fn check(label: &'static str, lhs: f64, rhs: f64) -> InequalityCheck {
    let margin = rhs - lhs;
    let holds = margin >= -MARGIN_TOL * lhs.abs().max(rhs.abs()).max(1.0);
    InequalityCheck {
        label,
        lhs,
        rhs,
        margin,
        holds,
    }
}

/// One verified inequality: left side, right side, margin = rhs - lhs.
#[derive(Debug, Clone, Serialize)]
pub struct InequalityCheck {
    pub label: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct Cover {
    subsets: Vec<Vec<usize>>,
    induced: Vec<WeightedGraph>,
    induced_spectra: Vec<SpectralDecomposition>,
    multiplicity: Vec<usize>,
    n_vertices: usize,
}

impl Cover {
    /// Validates and builds a cover, with induced subgraphs and their
    /// spectra computed eagerly.
    pub fn build(g: &WeightedGraph, subsets: Vec<Vec<usize>>) -> Result<Self> {
        let n = g.len();
        let mut sorted: Vec<Vec<usize>> = Vec::with_capacity(subsets.len());
        for (j, subset) in subsets.into_iter().enumerate() {
            if subset.len() < 2 {
                return Err(Error::CoverSubsetTooSmall { index: j });
            }
            let mut s = subset;
            s.sort_unstable();
            for pair in s.windows(2) {
                if pair[0] == pair[1] {
                    return Err(Error::CoverDuplicateVertex {
                        index: j,
                        label: g
                            .labels()
                            .get(pair[0])
                            .cloned()
                            .unwrap_or_else(|| pair[0].to_string()),
                    });
                }
            }
            if let Some(&bad) = s.iter().find(|&&v| v >= n) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    size: n,
                });
            }
            sorted.push(s);
        }

        let mut multiplicity = vec![0usize; n];
        for s in &sorted {
            for &v in s {
                multiplicity[v] += 1;
            }
        }
        let missing: Vec<String> = (0..n)
            .filter(|&v| multiplicity[v] == 0)
            .map(|v| g.label(v).to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Error::CoverMissingVertices { missing });
        }

        // No edge of the parent graph may lie inside two different subsets.
        let mut edge_owner: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (j, s) in sorted.iter().enumerate() {
            for (u, v, _) in g.edges() {
                if s.binary_search(&u).is_ok() && s.binary_search(&v).is_ok() {
                    if let Some(&first) = edge_owner.get(&(u, v)) {
                        return Err(Error::CoverSharedEdge {
                            u: g.label(u).to_string(),
                            v: g.label(v).to_string(),
                            first,
                            second: j,
                        });
                    }
                    edge_owner.insert((u, v), j);
                }
            }
        }

        let mut induced = Vec::with_capacity(sorted.len());
        let mut induced_spectra = Vec::with_capacity(sorted.len());
        for (j, s) in sorted.iter().enumerate() {
            let sub = g.induced_subgraph(s)?;
            if !sub.is_connected() {
                return Err(Error::CoverDisconnectedSubset { index: j });
            }
            let spectrum = SpectralDecomposition::decompose(&sub)?;
            debug_assert!(spectrum.lambda_1().is_some());
            induced.push(sub);
            induced_spectra.push(spectrum);
        }

        Ok(Cover {
            subsets: sorted,
            induced,
            induced_spectra,
            multiplicity,
            n_vertices: n,
        })
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    /// Subset vertex lists, each ascending.
    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn subset(&self, j: usize) -> &[usize] {
        &self.subsets[j]
    }

    pub fn induced(&self, j: usize) -> &WeightedGraph {
        &self.induced[j]
    }

    pub fn induced_spectrum(&self, j: usize) -> &SpectralDecomposition {
        &self.induced_spectra[j]
    }

    /// First nonzero eigenvalue of the induced subgraph Laplacian.
    pub fn lambda_1(&self, j: usize) -> f64 {
        self.induced_spectra[j]
            .lambda_1()
            .expect("connected subset has a spectral gap")
    }

    /// Lambda = min_j lambda_{1,j}.
    pub fn lambda_min(&self) -> f64 {
        (0..self.len())
            .map(|j| self.lambda_1(j))
            .fold(f64::INFINITY, f64::min)
    }

    /// How many subsets contain each vertex.
    pub fn multiplicity(&self) -> &[usize] {
        &self.multiplicity
    }

    pub fn max_multiplicity(&self) -> usize {
        self.multiplicity.iter().copied().max().unwrap_or(0)
    }

    /// Sorted union of the subsets indexed by `js`.
    pub fn union_of(&self, js: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.n_vertices];
        for &j in js {
            for &v in &self.subsets[j] {
                seen[v] = true;
            }
        }
        (0..self.n_vertices).filter(|&v| seen[v]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum FunctionalKind {
    Characteristic,
    Normalized,
    Dirac,
    Explicit,
}

#[derive(Debug, Clone)]
pub struct FunctionalSet {
    subsets: Vec<Vec<usize>>,
    psi: Vec<Signal>,
    kinds: Vec<FunctionalKind>,
    /// <chi_j, psi_j>, the pairing whose modulus normalizes theta_j.
    chi_pairing: Vec<Complex64>,
    /// Orthonormal basis of span{psi_j}.
    span_basis: Vec<CVec>,
    n_vertices: usize,
}

impl FunctionalSet {
    /// psi_j = indicator of U_j (defaults to all of S_j).
    pub fn characteristic(cover: &Cover, u_subsets: Option<&[Vec<usize>]>) -> Result<Self> {
        let n = cover.n_vertices();
        let mut psi = Vec::with_capacity(cover.len());
        for j in 0..cover.len() {
            let u: Vec<usize> = match u_subsets {
                Some(us) => {
                    let got = us.get(j).ok_or(Error::FunctionalMissing { index: j })?;
                    if got.is_empty() {
                        return Err(Error::FunctionalZero { index: j });
                    }
                    for &v in got {
                        if cover.subset(j).binary_search(&v).is_err() {
                            return Err(Error::FunctionalOutsideSubset {
                                index: j,
                                label: v.to_string(),
                            });
                        }
                    }
                    got.clone()
                }
                None => cover.subset(j).to_vec(),
            };
            psi.push(Signal::indicator(n, &u));
        }
        Self::assemble(cover, psi, FunctionalKind::Characteristic)
    }

    /// psi_j = chi_j / sqrt(|S_j|), so every theta_j is one.
    pub fn normalized(cover: &Cover) -> Result<Self> {
        let n = cover.n_vertices();
        let psi = cover
            .subsets()
            .iter()
            .map(|s| {
                Signal::indicator(n, s).scale(Complex64::new(1.0 / (s.len() as f64).sqrt(), 0.0))
            })
            .collect();
        Self::assemble(cover, psi, FunctionalKind::Normalized)
    }

    /// psi_j = delta at one vertex of S_j (defaults to the middle vertex in
    /// subset order).
    pub fn dirac(cover: &Cover, vertices: Option<&[usize]>) -> Result<Self> {
        let n = cover.n_vertices();
        let mut psi = Vec::with_capacity(cover.len());
        for j in 0..cover.len() {
            let s = cover.subset(j);
            let v = match vertices {
                Some(vs) => {
                    let &v = vs.get(j).ok_or(Error::FunctionalMissing { index: j })?;
                    if s.binary_search(&v).is_err() {
                        return Err(Error::FunctionalOutsideSubset {
                            index: j,
                            label: v.to_string(),
                        });
                    }
                    v
                }
                None => s[s.len() / 2],
            };
            psi.push(Signal::indicator(n, &[v]));
        }
        Self::assemble(cover, psi, FunctionalKind::Dirac)
    }

    /// Arbitrary weights, one full-length signal per subset, each supported
    /// inside its subset.
    pub fn explicit(cover: &Cover, psi: Vec<Signal>) -> Result<Self> {
        Self::assemble(cover, psi, FunctionalKind::Explicit)
    }

    fn assemble(cover: &Cover, psi: Vec<Signal>, kind: FunctionalKind) -> Result<Self> {
        let n = cover.n_vertices();
        if psi.len() != cover.len() {
            return Err(Error::FunctionalCount {
                expected: cover.len(),
                got: psi.len(),
            });
        }
        let mut chi_pairing = Vec::with_capacity(psi.len());
        for (j, p) in psi.iter().enumerate() {
            if p.len() != n {
                return Err(Error::SignalLength {
                    expected: n,
                    got: p.len(),
                });
            }
            let norm = p.norm();
            if norm == 0.0 {
                return Err(Error::FunctionalZero { index: j });
            }
            if p.mass_outside(cover.subset(j)) > 0.0 {
                let outside = (0..n)
                    .find(|&v| cover.subset(j).binary_search(&v).is_err() && p[v].norm_sqr() > 0.0)
                    .expect("nonzero mass outside the subset");
                return Err(Error::FunctionalOutsideSubset {
                    index: j,
                    label: outside.to_string(),
                });
            }
            let pairing = Signal::indicator(n, cover.subset(j)).inner(p);
            let size = cover.subset(j).len() as f64;
            if pairing.norm() <= 1e-12 * norm * size.sqrt() {
                return Err(Error::FunctionalZeroMean { index: j });
            }
            chi_pairing.push(pairing);
        }
        let vectors: Vec<CVec> = psi
            .iter()
            .map(|p| CVec::from_column_slice(p.values()))
            .collect();
        let span_basis = orthonormalize(&vectors, 1e-12);
        Ok(FunctionalSet {
            subsets: cover.subsets().to_vec(),
            psi,
            kinds: vec![kind; cover.len()],
            chi_pairing,
            span_basis,
            n_vertices: n,
        })
    }

    pub fn len(&self) -> usize {
        self.psi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.psi.is_empty()
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn psi(&self, j: usize) -> &Signal {
        &self.psi[j]
    }

    pub fn kind(&self, j: usize) -> FunctionalKind {
        self.kinds[j]
    }

    /// Psi_j(chi_j).
    pub fn chi_pairing(&self, j: usize) -> Complex64 {
        self.chi_pairing[j]
    }

    /// Psi_j(f) = <f, psi_j>.
    pub fn apply(&self, j: usize, f: &Signal) -> Complex64 {
        f.inner(&self.psi[j])
    }

    /// All samples {Psi_j(f)} as a vector indexed by j.
    pub fn sample(&self, f: &Signal) -> Result<CVec> {
        if f.len() != self.n_vertices {
            return Err(Error::SignalLength {
                expected: self.n_vertices,
                got: f.len(),
            });
        }
        Ok(CVec::from_fn(self.len(), |j, _| self.apply(j, f)))
    }

    /// theta_j, recomputed from psi_j every call.
    pub fn theta(&self, j: usize) -> f64 {
        let size = self.subsets[j].len() as f64;
        size * self.psi[j].norm_sq() / self.chi_pairing[j].norm_sqr()
    }

    /// |S_j|^2 / |Psi_j(chi_j)|^2, the sample amplification weight.
    pub fn sample_weight(&self, j: usize) -> f64 {
        let size = self.subsets[j].len() as f64;
        size * size / self.chi_pairing[j].norm_sqr()
    }

    /// Orthogonal projection of f onto the joint kernel of all functionals.
    pub fn kernel_project(&self, f: &Signal) -> Signal {
        project_out(f, &self.span_basis)
    }

    /// Same, but only the functionals indexed by `js` are annihilated.
    pub fn kernel_project_for(&self, f: &Signal, js: &[usize]) -> Signal {
        let chosen: Vec<CVec> = js
            .iter()
            .map(|&j| CVec::from_column_slice(self.psi[j].values()))
            .collect();
        let basis = orthonormalize(&chosen, 1e-12);
        project_out(f, &basis)
    }

    /// Aggregated constants for this cover/functional pair.
    pub fn constants(&self, cover: &Cover) -> PoincareConstants {
        debug_assert_eq!(cover.len(), self.len());
        let theta: Vec<f64> = (0..self.len()).map(|j| self.theta(j)).collect();
        let lambda_1: Vec<f64> = (0..cover.len()).map(|j| cover.lambda_1(j)).collect();
        let theta_max = theta.iter().copied().fold(0.0, f64::max);
        let lambda_min = lambda_1.iter().copied().fold(f64::INFINITY, f64::min);
        let c_max = (0..self.len())
            .map(|j| self.sample_weight(j))
            .fold(0.0, f64::max);
        let psi_norm_sq_max = self
            .psi
            .iter()
            .map(|p| p.norm_sq())
            .fold(0.0f64, f64::max);
        PoincareConstants {
            subset_sizes: self.subsets.iter().map(|s| s.len()).collect(),
            theta,
            lambda_1,
            theta_max,
            lambda_min,
            c_max,
            psi_norm_sq_max,
            max_multiplicity: cover.max_multiplicity(),
            admissible_sup: lambda_min / theta_max,
        }
    }
}

fn project_out(f: &Signal, basis: &[CVec]) -> Signal {
    let mut out = f.clone();
    for q in basis {
        let coeff: Complex64 = out
            .values()
            .iter()
            .zip(q.iter())
            .map(|(a, b)| a * b.conj())
            .sum();
        for (o, b) in out.values_mut().iter_mut().zip(q.iter()) {
            *o -= coeff * b;
        }
    }
    out
}

/// Constants governing the cover inequalities. `admissible_sup` is
/// Lambda/Theta, the supremum of bandwidths with gamma < 1 as epsilon -> 0.
#[derive(Debug, Clone, Serialize)]
pub struct PoincareConstants {
    pub subset_sizes: Vec<usize>,
    pub theta: Vec<f64>,
    pub lambda_1: Vec<f64>,
    pub theta_max: f64,
    pub lambda_min: f64,
    pub c_max: f64,
    pub psi_norm_sq_max: f64,
    pub max_multiplicity: usize,
    pub admissible_sup: f64,
}

/// Single-graph Poincare verification: one functional on the whole graph.
#[derive(Debug, Clone, Serialize)]
pub struct SinglePoincareReport {
    pub theta: f64,
    pub lambda_1: f64,
    pub in_kernel: bool,
    /// |f|^2 <= (theta/lambda_1)|grad f|^2; present when f annihilates the
    /// functional.
    pub kernel_form: Option<InequalityCheck>,
    /// The same bound for f re-centered to the kernel.
    pub centered: InequalityCheck,
    pub one_set: Vec<EpsilonCheck>,
    /// |f - mean(f) chi|^2 <= (1/lambda_1)|grad f|^2, independent of psi.
    pub mean_value: InequalityCheck,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EpsilonCheck {
    pub epsilon: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

/// Verify the single-graph inequality family for one functional and signal.
/// Decomposes the graph internally; for loops prefer the `_with` variant.
pub fn verify_single_poincare(
    g: &WeightedGraph,
    psi: &Signal,
    f: &Signal,
) -> Result<SinglePoincareReport> {
    let d = SpectralDecomposition::decompose(g)?;
    verify_single_poincare_with(g, &d, psi, f)
}

pub fn verify_single_poincare_with(
    g: &WeightedGraph,
    d: &SpectralDecomposition,
    psi: &Signal,
    f: &Signal,
) -> Result<SinglePoincareReport> {
    let n = g.len();
    if n < 2 || !g.is_connected() {
        return Err(Error::DisconnectedGraph);
    }
    if psi.len() != n {
        return Err(Error::SignalLength {
            expected: n,
            got: psi.len(),
        });
    }
    let lambda_1 = d.lambda_1().ok_or(Error::DisconnectedGraph)?;
    let chi = Signal::ones(n);
    let pairing = chi.inner(psi);
    if pairing.norm() <= 1e-12 * psi.norm() * (n as f64).sqrt() {
        return Err(Error::FunctionalZeroMean { index: 0 });
    }
    let theta = n as f64 * psi.norm_sq() / pairing.norm_sqr();

    let sample = f.inner(psi);
    let grad_sq = g.gradient_norm(f)?.powi(2);
    let in_kernel = sample.norm() <= 1e-12 * f.norm() * psi.norm();

    let kernel_form = in_kernel.then(|| check("kernel", f.norm_sq(), theta / lambda_1 * grad_sq));

    let centered_f = f.add_scaled(-sample / pairing, &chi);
    let centered = check("centered", centered_f.norm_sq(), theta / lambda_1 * grad_sq);

    let weight = (n as f64).powi(2) / pairing.norm_sqr();
    let one_set = SINGLE_EPS_SWEEP
        .iter()
        .map(|&eps| {
            let rhs = (1.0 + eps) * theta / lambda_1 * grad_sq
                + (1.0 + eps) / eps * weight * sample.norm_sqr();
            let c = check("one-set", f.norm_sq(), rhs);
            EpsilonCheck {
                epsilon: eps,
                lhs: c.lhs,
                rhs: c.rhs,
                margin: c.margin,
                holds: c.holds,
            }
        })
        .collect::<Vec<_>>();

    let mean = f.values().iter().sum::<Complex64>() / n as f64;
    let mean_centered = f.add_scaled(-mean, &chi);
    let mean_value = check("mean-value", mean_centered.norm_sq(), grad_sq / lambda_1);

    let holds = kernel_form.as_ref().map_or(true, |c| c.holds)
        && centered.holds
        && one_set.iter().all(|c| c.holds)
        && mean_value.holds;

    Ok(SinglePoincareReport {
        theta,
        lambda_1,
        in_kernel,
        kernel_form,
        centered,
        one_set,
        mean_value,
        holds,
    })
}

/// Cover-level verification of the Poincare inequality family at one
/// epsilon: the subset-by-subset bound, the global Laplacian bound, the
/// sharpened bounds on the joint kernel, and the subgraph-restricted
/// variants for a subfamily of subsets.
#[derive(Debug, Clone, Serialize)]
pub struct CoverPoincareReport {
    pub epsilon: f64,
    pub theta_max: f64,
    pub lambda_min: f64,
    pub max_multiplicity: usize,
    pub local: InequalityCheck,
    pub global: InequalityCheck,
    pub kernel_local: InequalityCheck,
    pub kernel_global: InequalityCheck,
    pub subfamily: Vec<usize>,
    pub subgraph_local: InequalityCheck,
    pub subgraph_global: InequalityCheck,
    pub holds: bool,
}

pub fn verify_cover_poincare(
    g: &WeightedGraph,
    cover: &Cover,
    fs: &FunctionalSet,
    f: &Signal,
    epsilon: f64,
    subfamily: Option<&[usize]>,
) -> Result<CoverPoincareReport> {
    if epsilon <= 0.0 {
        return Err(Error::NonPositiveEpsilon { epsilon });
    }
    if f.len() != g.len() {
        return Err(Error::SignalLength {
            expected: g.len(),
            got: f.len(),
        });
    }
    let constants = fs.constants(cover);
    let theta_max = constants.theta_max;
    let lambda_min = constants.lambda_min;

    // Subset-by-subset right-hand side for an arbitrary signal.
    let local_terms = |f: &Signal| -> Result<(f64, f64)> {
        let mut smooth = 0.0;
        let mut samples = 0.0;
        for j in 0..cover.len() {
            let fj = f.restrict(cover.subset(j));
            let grad_j = cover.induced(j).gradient_norm(&fj)?.powi(2);
            smooth += fs.theta(j) / cover.lambda_1(j) * grad_j;
            samples += fs.sample_weight(j) * fs.apply(j, f).norm_sqr();
        }
        Ok((smooth, samples))
    };

    let (smooth, samples) = local_terms(f)?;
    let local = check(
        "cover-local",
        f.norm_sq(),
        (1.0 + epsilon) * smooth + (1.0 + epsilon) / epsilon * samples,
    );

    let grad_sq = g.gradient_norm(f)?.powi(2);
    let global = check(
        "cover-global",
        f.norm_sq(),
        (1.0 + epsilon) * theta_max / lambda_min * grad_sq
            + (1.0 + epsilon) / epsilon * samples,
    );

    // Sharpened bounds on the projection of f onto the joint kernel.
    let fk = fs.kernel_project(f);
    let (k_smooth, _) = local_terms(&fk)?;
    let kernel_local = check("kernel-local", fk.norm_sq(), k_smooth);
    let k_grad_sq = g.gradient_norm(&fk)?.powi(2);
    let kernel_global = check(
        "kernel-global",
        fk.norm_sq(),
        theta_max / lambda_min * k_grad_sq,
    );

    // Subgraph-restricted variants on the union G_0 of a subfamily,
    // with the same global constants.
    let subfamily: Vec<usize> = match subfamily {
        Some(js) => {
            for &j in js {
                if j >= cover.len() {
                    return Err(Error::IndexOutOfRange {
                        index: j,
                        size: cover.len(),
                    });
                }
            }
            js.to_vec()
        }
        None => (0..cover.len()).step_by(2).collect(),
    };
    let f0 = fs.kernel_project_for(f, &subfamily);
    let union = cover.union_of(&subfamily);
    let lhs0: f64 = union.iter().map(|&v| f0[v].norm_sqr()).sum();
    let mut smooth0 = 0.0;
    for &j in &subfamily {
        let fj = f0.restrict(cover.subset(j));
        let grad_j = cover.induced(j).gradient_norm(&fj)?.powi(2);
        smooth0 += fs.theta(j) / cover.lambda_1(j) * grad_j;
    }
    let subgraph_local = check("subgraph-local", lhs0, smooth0);
    let union_graph = g.induced_subgraph(&union)?;
    let grad0_sq = union_graph.gradient_norm(&f0.restrict(&union))?.powi(2);
    let subgraph_global = check(
        "subgraph-global",
        lhs0,
        theta_max / lambda_min * grad0_sq,
    );

    let holds = local.holds
        && global.holds
        && kernel_local.holds
        && kernel_global.holds
        && subgraph_local.holds
        && subgraph_global.holds;

    Ok(CoverPoincareReport {
        epsilon,
        theta_max,
        lambda_min,
        max_multiplicity: cover.max_multiplicity(),
        local,
        global,
        kernel_local,
        kernel_global,
        subfamily,
        subgraph_local,
        subgraph_global,
        holds,
    })
}

/// Cover definition as parsed from JSON, before resolving vertex references
/// against a concrete graph.
#[derive(Debug, Clone)]
pub struct CoverSpec {
    pub subsets: Vec<Vec<VertexRef>>,
    pub functionals: Option<Vec<FunctionalSpec>>,
}

#[derive(Debug, Clone)]
pub enum VertexRef {
    Index(usize),
    Label(String),
}

#[derive(Debug, Clone)]
pub enum FunctionalSpec {
    Characteristic { subset: Option<Vec<VertexRef>> },
    Normalized,
    Dirac { vertex: Option<VertexRef> },
    Explicit { values: Vec<Complex64> },
}

impl VertexRef {
    fn resolve(&self, g: &WeightedGraph) -> Result<usize> {
        match self {
            VertexRef::Index(i) => {
                if *i >= g.len() {
                    Err(Error::IndexOutOfRange {
                        index: *i,
                        size: g.len(),
                    })
                } else {
                    Ok(*i)
                }
            }
            VertexRef::Label(l) => g.index_of(l),
        }
    }
}

fn vertex_ref(v: &serde_json::Value) -> Result<VertexRef> {
    match v {
        serde_json::Value::Number(n) => n
            .as_u64()
            .map(|i| VertexRef::Index(i as usize))
            .ok_or_else(|| Error::Json(format!("vertex index {n} is not a nonnegative integer"))),
        serde_json::Value::String(s) => Ok(VertexRef::Label(s.clone())),
        other => Err(Error::Json(format!("vertex reference {other} must be an index or label"))),
    }
}

impl CoverSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        let root: serde_json::Value = serde_json::from_str(text)?;
        let subsets_json = root
            .get("subsets")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Json("cover file needs a \"subsets\" array".into()))?;
        let mut subsets = Vec::with_capacity(subsets_json.len());
        for s in subsets_json {
            let arr = s
                .as_array()
                .ok_or_else(|| Error::Json("each subset must be an array of vertices".into()))?;
            subsets.push(arr.iter().map(vertex_ref).collect::<Result<Vec<_>>>()?);
        }
        let functionals = match root.get("functionals") {
            None | Some(serde_json::Value::Null) => None,
            Some(serde_json::Value::Array(arr)) => {
                let mut specs = Vec::with_capacity(arr.len());
                for item in arr {
                    specs.push(functional_spec(item)?);
                }
                Some(specs)
            }
            Some(other) => {
                return Err(Error::Json(format!("\"functionals\" must be an array, got {other}")))
            }
        };
        Ok(CoverSpec {
            subsets,
            functionals,
        })
    }

    /// Resolve against a graph: build the cover and its functional set.
    /// Missing functionals default to characteristic weights on whole
    /// subsets.
    pub fn resolve(&self, g: &WeightedGraph) -> Result<(Cover, FunctionalSet)> {
        let subsets = self
            .subsets
            .iter()
            .map(|s| s.iter().map(|v| v.resolve(g)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let cover = Cover::build(g, subsets)?;
        let fs = match &self.functionals {
            None => FunctionalSet::characteristic(&cover, None)?,
            Some(specs) => {
                if specs.len() != cover.len() {
                    return Err(Error::FunctionalCount {
                        expected: cover.len(),
                        got: specs.len(),
                    });
                }
                resolve_functionals(g, &cover, specs)?
            }
        };
        Ok((cover, fs))
    }
}

fn functional_spec(item: &serde_json::Value) -> Result<FunctionalSpec> {
    let kind = item
        .get("kind")
        .and_then(|v| v.as_str())
        .ok_or_else(|| Error::Json("each functional needs a string \"kind\"".into()))?;
    match kind {
        "characteristic" => {
            let subset = match item.get("subset") {
                None | Some(serde_json::Value::Null) => None,
                Some(serde_json::Value::Array(arr)) => {
                    Some(arr.iter().map(vertex_ref).collect::<Result<Vec<_>>>()?)
                }
                Some(other) => {
                    return Err(Error::Json(format!("\"subset\" must be an array, got {other}")))
                }
            };
            Ok(FunctionalSpec::Characteristic { subset })
        }
        "normalized" => Ok(FunctionalSpec::Normalized),
        "dirac" => {
            let vertex = match item.get("vertex") {
                None | Some(serde_json::Value::Null) => None,
                Some(v) => Some(vertex_ref(v)?),
            };
            Ok(FunctionalSpec::Dirac { vertex })
        }
        "explicit" => {
            let arr = item
                .get("values")
                .and_then(|v| v.as_array())
                .ok_or_else(|| Error::Json("explicit functional needs a \"values\" array".into()))?;
            let mut values = Vec::with_capacity(arr.len());
            for v in arr {
                values.push(match v {
                    serde_json::Value::Number(n) => Complex64::new(
                        n.as_f64()
                            .ok_or_else(|| Error::Json(format!("bad number {n}")))?,
                        0.0,
                    ),
                    serde_json::Value::String(s) => parse_complex(s)?,
                    serde_json::Value::Array(pair) if pair.len() == 2 => {
                        let re = pair[0]
                            .as_f64()
                            .ok_or_else(|| Error::Json("bad [re, im] pair".into()))?;
                        let im = pair[1]
                            .as_f64()
                            .ok_or_else(|| Error::Json("bad [re, im] pair".into()))?;
                        Complex64::new(re, im)
                    }
                    other => {
                        return Err(Error::Json(format!(
                            "functional value {other} must be a number, string, or [re, im]"
                        )))
                    }
                });
            }
            Ok(FunctionalSpec::Explicit { values })
        }
        other => Err(Error::Json(format!("unknown functional kind {other:?}"))),
    }
}

/// Mixed per-subset functional kinds are resolved one entry at a time;
/// explicit values align with the subset's ascending vertex order.
fn resolve_functionals(
    g: &WeightedGraph,
    cover: &Cover,
    specs: &[FunctionalSpec],
) -> Result<FunctionalSet> {
    let n = cover.n_vertices();
    let mut psi = Vec::with_capacity(specs.len());
    for (j, spec) in specs.iter().enumerate() {
        let s = cover.subset(j);
        let signal = match spec {
            FunctionalSpec::Characteristic { subset } => match subset {
                None => Signal::indicator(n, s),
                Some(refs) => {
                    let u = refs
                        .iter()
                        .map(|r| r.resolve(g))
                        .collect::<Result<Vec<_>>>()?;
                    for &v in &u {
                        if s.binary_search(&v).is_err() {
                            return Err(Error::FunctionalOutsideSubset {
                                index: j,
                                label: g.label(v).to_string(),
                            });
                        }
                    }
                    Signal::indicator(n, &u)
                }
            },
            FunctionalSpec::Normalized => Signal::indicator(n, s)
                .scale(Complex64::new(1.0 / (s.len() as f64).sqrt(), 0.0)),
            FunctionalSpec::Dirac { vertex } => {
                let v = match vertex {
                    None => s[s.len() / 2],
                    Some(r) => {
                        let v = r.resolve(g)?;
                        if s.binary_search(&v).is_err() {
                            return Err(Error::FunctionalOutsideSubset {
                                index: j,
                                label: g.label(v).to_string(),
                            });
                        }
                        v
                    }
                };
                Signal::indicator(n, &[v])
            }
            FunctionalSpec::Explicit { values } => {
                if values.len() != s.len() {
                    return Err(Error::SignalLength {
                        expected: s.len(),
                        got: values.len(),
                    });
                }
                let mut full = Signal::zeros(n);
                for (&v, &z) in s.iter().zip(values) {
                    full[v] = z;
                }
                full
            }
        };
        psi.push(signal);
    }
    FunctionalSet::explicit(cover, psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn path(n: usize) -> WeightedGraph {
        let edges: Vec<(String, String, f64)> = (0..n - 1)
            .map(|i| (i.to_string(), (i + 1).to_string(), 1.0))
            .collect();
        WeightedGraph::build(&edges).unwrap()
    }

    fn triple_cover(g: &WeightedGraph) -> Cover {
        let n = g.len();
        assert_eq!(n % 3, 0);
        let subsets = (0..n / 3)
            .map(|j| vec![3 * j, 3 * j + 1, 3 * j + 2])
            .collect();
        Cover::build(g, subsets).unwrap()
    }

    #[test]
    fn path_triple_cover_constants() {
        let g = path(9);
        let cover = triple_cover(&g);
        assert_eq!(cover.len(), 3);
        // Each subset induces a 3-vertex path with spectrum {0, 1, 3}.
        for j in 0..3 {
            assert_abs_diff_eq!(cover.lambda_1(j), 1.0, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(cover.lambda_min(), 1.0, epsilon = 1e-9);
        assert_eq!(cover.max_multiplicity(), 1);

        let normalized = FunctionalSet::normalized(&cover).unwrap();
        let k = normalized.constants(&cover);
        assert_abs_diff_eq!(k.theta_max, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.c_max, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.psi_norm_sq_max, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.admissible_sup, 1.0, epsilon = 1e-9);

        let dirac = FunctionalSet::dirac(&cover, None).unwrap();
        let k = dirac.constants(&cover);
        assert_abs_diff_eq!(k.theta_max, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.c_max, 9.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.psi_norm_sq_max, 1.0, epsilon = 1e-12);

        let characteristic = FunctionalSet::characteristic(&cover, None).unwrap();
        let k = characteristic.constants(&cover);
        assert_abs_diff_eq!(k.theta_max, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.c_max, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(k.psi_norm_sq_max, 3.0, epsilon = 1e-12);
    }

    #[test]
    fn characteristic_on_sub_subset() {
        let g = path(3);
        let cover = Cover::build(&g, vec![vec![0, 1, 2]]).unwrap();
        let fs = FunctionalSet::characteristic(&cover, Some(&[vec![1]])).unwrap();
        // theta = |S| / |U| = 3.
        assert_abs_diff_eq!(fs.theta(0), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn vertex_overlap_allowed_edge_overlap_rejected() {
        let g = path(3);
        let cover = Cover::build(&g, vec![vec![0, 1], vec![1, 2]]).unwrap();
        assert_eq!(cover.multiplicity(), &[1, 2, 1]);
        assert_eq!(cover.max_multiplicity(), 2);

        let shared = Cover::build(&g, vec![vec![0, 1, 2], vec![0, 1]]);
        assert!(matches!(
            shared,
            Err(Error::CoverSharedEdge { first: 0, second: 1, .. })
        ));
    }

    #[test]
    fn cycle_edge_cover_is_valid() {
        let g = WeightedGraph::build(&[
            ("0", "1", 1.0),
            ("1", "2", 1.0),
            ("2", "3", 1.0),
            ("3", "0", 1.0),
        ])
        .unwrap();
        let cover =
            Cover::build(&g, vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]]).unwrap();
        assert_eq!(cover.len(), 4);
        for j in 0..4 {
            assert_abs_diff_eq!(cover.lambda_1(j), 2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn cover_rejections() {
        let g = path(4);
        assert!(matches!(
            Cover::build(&g, vec![vec![0, 1]]),
            Err(Error::CoverMissingVertices { .. })
        ));
        assert!(matches!(
            Cover::build(&g, vec![vec![0, 1, 2], vec![3]]),
            Err(Error::CoverSubsetTooSmall { index: 1 })
        ));
        // {0, 1, 3} induces a single edge plus an isolated vertex.
        assert!(matches!(
            Cover::build(&g, vec![vec![0, 1, 3], vec![1, 2]]),
            Err(Error::CoverDisconnectedSubset { index: 0 })
        ));
        assert!(matches!(
            Cover::build(&g, vec![vec![0, 0, 1], vec![1, 2, 3]]),
            Err(Error::CoverDuplicateVertex { index: 0, .. })
        ));
    }

    #[test]
    fn functional_validation() {
        let g = path(4);
        let cover = Cover::build(&g, vec![vec![0, 1], vec![2, 3]]).unwrap();
        // Support outside the subset.
        let mut bad = Signal::zeros(4);
        bad[0] = Complex64::new(1.0, 0.0);
        bad[2] = Complex64::new(1.0, 0.0);
        let good = Signal::indicator(4, &[2, 3]);
        assert!(matches!(
            FunctionalSet::explicit(&cover, vec![bad, good.clone()]),
            Err(Error::FunctionalOutsideSubset { index: 0, .. })
        ));
        // Zero functional.
        assert!(matches!(
            FunctionalSet::explicit(&cover, vec![Signal::zeros(4), good.clone()]),
            Err(Error::FunctionalZero { index: 0 })
        ));
        // Weights summing to zero.
        let mut zero_mean = Signal::zeros(4);
        zero_mean[0] = Complex64::new(1.0, 0.0);
        zero_mean[1] = Complex64::new(-1.0, 0.0);
        assert!(matches!(
            FunctionalSet::explicit(&cover, vec![zero_mean, good]),
            Err(Error::FunctionalZeroMean { index: 0 })
        ));
    }

    #[test]
    fn samples_of_the_constant_eigenvector() {
        let g = path(9);
        let cover = triple_cover(&g);
        let fs = FunctionalSet::normalized(&cover).unwrap();
        let phi0 = Signal::new(vec![Complex64::new(1.0 / 3.0, 0.0); 9]);
        let samples = fs.sample(&phi0).unwrap();
        for j in 0..3 {
            assert_abs_diff_eq!(samples[j].re, 3f64.sqrt() / 3.0, epsilon = 1e-12);
            assert_abs_diff_eq!(samples[j].im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn theta_invariant_under_scaling() {
        let g = path(6);
        let cover = Cover::build(&g, vec![vec![0, 1, 2], vec![3, 4, 5]]).unwrap();
        let mut psi0 = Signal::zeros(6);
        psi0[0] = Complex64::new(0.3, -0.4);
        psi0[1] = Complex64::new(1.0, 0.2);
        psi0[2] = Complex64::new(-0.1, 0.9);
        let psi1 = Signal::indicator(6, &[3, 4, 5]);
        let base = FunctionalSet::explicit(&cover, vec![psi0.clone(), psi1.clone()]).unwrap();
        let scaled = FunctionalSet::explicit(
            &cover,
            vec![psi0.scale(Complex64::new(-2.5, 1.7)), psi1],
        )
        .unwrap();
        assert_abs_diff_eq!(base.theta(0), scaled.theta(0), epsilon = 1e-12);
    }

    #[test]
    fn k2_kernel_equality_case() {
        let g = path(2);
        let psi = Signal::ones(2);
        let f = Signal::from_real(&[1.5, -1.5]);
        let report = verify_single_poincare(&g, &psi, &f).unwrap();
        assert!(report.in_kernel);
        let kernel = report.kernel_form.as_ref().unwrap();
        assert!(kernel.holds);
        assert_abs_diff_eq!(kernel.lhs, kernel.rhs, epsilon = 1e-12);
        assert!(report.holds);
    }

    #[test]
    fn orthogonality_to_the_ground_state_gives_spectral_gap_bound() {
        let g = path(5);
        let d = SpectralDecomposition::decompose(&g).unwrap();
        let psi = d.eigenvector(0);
        // Any combination of higher modes annihilates <., phi_0>.
        let f = d
            .eigenvector(1)
            .scale(Complex64::new(0.7, 0.1))
            .add(&d.eigenvector(3).scale(Complex64::new(-0.2, 0.5)));
        let report = verify_single_poincare_with(&g, &d, &psi, &f).unwrap();
        assert!(report.in_kernel);
        assert_abs_diff_eq!(report.theta, 1.0, epsilon = 1e-12);
        assert!(report.holds, "{report:?}");
    }

    #[test]
    fn cover_report_holds_for_mixed_signal() {
        let g = path(9);
        let cover = triple_cover(&g);
        for fs in [
            FunctionalSet::characteristic(&cover, None).unwrap(),
            FunctionalSet::normalized(&cover).unwrap(),
            FunctionalSet::dirac(&cover, None).unwrap(),
        ] {
            let f = Signal::new(
                (0..9)
                    .map(|i| Complex64::new((i as f64 * 1.3).sin(), (i as f64 * 0.7).cos()))
                    .collect(),
            );
            for eps in [0.1, 1.0, 10.0] {
                let report = verify_cover_poincare(&g, &cover, &fs, &f, eps, None).unwrap();
                assert!(report.holds, "eps = {eps}: {report:?}");
            }
        }
    }

    #[test]
    fn kernel_projection_annihilates_all_samples() {
        let g = path(9);
        let cover = triple_cover(&g);
        let fs = FunctionalSet::dirac(&cover, None).unwrap();
        let f = Signal::new(
            (0..9)
                .map(|i| Complex64::new(1.0 / (i as f64 + 1.0), (i as f64).sqrt()))
                .collect(),
        );
        let fk = fs.kernel_project(&f);
        let samples = fs.sample(&fk).unwrap();
        for j in 0..3 {
            assert!(samples[j].norm() <= 1e-12 * f.norm());
        }
    }

    #[test]
    fn gradient_superadditivity_over_the_cover() {
        let g = path(9);
        let cover = triple_cover(&g);
        let f = Signal::new(
            (0..9)
                .map(|i| Complex64::new((i as f64).powi(2) * 0.1, -(i as f64) * 0.3))
                .collect(),
        );
        let total = g.gradient_norm(&f).unwrap().powi(2);
        let mut sum = 0.0;
        for j in 0..cover.len() {
            let fj = f.restrict(cover.subset(j));
            sum += cover.induced(j).gradient_norm(&fj).unwrap().powi(2);
        }
        assert!(sum <= total + 1e-10 * total.max(1.0));
    }

    #[test]
    fn cover_spec_round_trip() {
        let g = path(4);
        let text = r#"{
            "subsets": [[0, 1], ["2", "3"]],
            "functionals": [
                {"kind": "dirac", "vertex": 1},
                {"kind": "explicit", "values": [1, "1-j"]}
            ]
        }"#;
        let spec = CoverSpec::from_json(text).unwrap();
        let (cover, fs) = spec.resolve(&g).unwrap();
        assert_eq!(cover.len(), 2);
        assert_abs_diff_eq!(fs.psi(0)[1].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(fs.psi(1)[3].im, -1.0, epsilon = 1e-15);
        // Defaulted functionals: characteristic on each whole subset.
        let spec = CoverSpec::from_json(r#"{"subsets": [[0, 1], [1, 2, 3]]}"#).unwrap();
        let (_, fs) = spec.resolve(&g).unwrap();
        assert_eq!(fs.kind(0), FunctionalKind::Characteristic);
        assert_abs_diff_eq!(fs.psi(1)[2].re, 1.0, epsilon = 1e-15);
    }
}
