//! Dense linear algebra helpers on top of nalgebra.
//!
//! Complex matrices are handled through the real embedding
//! [[Re, -Im], [Im, Re]], which turns Hermitian eigenproblems and SVD solves
//! into real symmetric ones. The embedding is a *-isomorphism, so singular
//! values and eigenvalues carry over (with doubled multiplicity).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending,
/// eigenvector columns aligned with them.
pub fn sym_eigen_sorted(m: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = nalgebra::SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(i));
    }
    (values, vectors)
}

pub fn real_embedding(a: &CMat) -> DMatrix<f64> {
    let (m, n) = a.shape();
    let mut e = DMatrix::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let z = a[(i, j)];
            e[(i, j)] = z.re;
            e[(i, j + n)] = -z.im;
            e[(i + m, j)] = z.im;
            e[(i + m, j + n)] = z.re;
        }
    }
    e
}

pub fn embed_vec(b: &CVec) -> DVector<f64> {
    let m = b.len();
    let mut e = DVector::zeros(2 * m);
    for i in 0..m {
        e[i] = b[i].re;
        e[i + m] = b[i].im;
    }
    e
}

pub fn unembed_vec(e: &DVector<f64>) -> CVec {
    let n = e.len() / 2;
    CVec::from_fn(n, |i, _| Complex64::new(e[i], e[i + n]))
}

/// Extreme eigenvalues (min, max) of a Hermitian matrix.
pub fn hermitian_extremes(t: &CMat) -> (f64, f64) {
    debug_assert_eq!(t.nrows(), t.ncols());
    if t.nrows() == 0 {
        return (0.0, 0.0);
    }
    let max_im = t.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let scale = t.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let values = if max_im <= 1e-14 * scale.max(1.0) {
        let re = t.map(|z| z.re);
        nalgebra::SymmetricEigen::new(re).eigenvalues
    } else {
        nalgebra::SymmetricEigen::new(real_embedding(t)).eigenvalues
    };
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Extreme eigenpairs ((min value, vector), (max value, vector)) of a
/// Hermitian matrix. Any unit vector of the embedded eigenspace unembeds to
/// a valid complex eigenvector.
pub fn hermitian_extreme_vectors(t: &CMat) -> ((f64, CVec), (f64, CVec)) {
    debug_assert!(t.nrows() == t.ncols() && t.nrows() > 0);
    let (values, vectors) = sym_eigen_sorted(real_embedding(t));
    let last = values.len() - 1;
    (
        (values[0], unembed_vec(&vectors.column(0).into_owned())),
        (values[last], unembed_vec(&vectors.column(last).into_owned())),
    )
}

/// LU solve of a square Hermitian (or general) complex system.
pub fn lu_solve(t: &CMat, b: &CVec) -> Option<CVec> {
    nalgebra::LU::new(t.clone()).solve(b)
}

#[derive(Debug, Clone)]
pub struct SvdSolution {
    pub x: CVec,
    /// Complex rank after truncation.
    pub rank: usize,
    /// sigma_max / sigma_min over the kept singular values.
    pub condition: f64,
    pub sigma_max: f64,
    /// |A x - b|.
    pub residual: f64,
}

/// Minimum-norm least-squares solve of A x = b via SVD of the real
/// embedding, truncating singular values below `rcond * sigma_max`.
pub fn svd_solve(a: &CMat, b: &CVec, rcond: f64) -> SvdSolution {
    let ea = real_embedding(a);
    let eb = embed_vec(b);
    let svd = ea.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cut = rcond * sigma_max;
    let u = svd.u.as_ref().expect("svd with u");
    let v_t = svd.v_t.as_ref().expect("svd with v_t");
    let mut coeffs = u.transpose() * &eb;
    let mut kept = 0usize;
    let mut sigma_min = f64::INFINITY;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > cut && s > 0.0 {
            coeffs[i] /= s;
            kept += 1;
            sigma_min = sigma_min.min(s);
        } else {
            coeffs[i] = 0.0;
        }
    }
    let ex = v_t.transpose() * coeffs;
    let x = unembed_vec(&ex);
    let residual = (&ea * &ex - eb).norm();
    let condition = if kept == 0 {
        f64::INFINITY
    } else {
        sigma_max / sigma_min
    };
    SvdSolution {
        x,
        rank: kept / 2, // real singular values come in pairs
        condition,
        sigma_max,
        residual,
    }
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Returns an
/// orthonormal basis of the span; vectors with residual norm below
/// `tol * original_norm_scale` are dropped.
pub fn orthonormalize(vectors: &[CVec], tol: f64) -> Vec<CVec> {
    let scale = vectors
        .iter()
        .map(|v| v.norm())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let mut basis: Vec<CVec> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &basis {
                let c = q.dotc(&w);
                w -= q * c;
            }
        }
        let n = w.norm();
        if n > tol * scale {
            basis.push(w / Complex64::new(n, 0.0));
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of span(`vectors`) in C^n.
pub fn complement_basis(vectors: &[CVec], n: usize, tol: f64) -> Vec<CVec> {
    let span = orthonormalize(vectors, tol);
    let mut all = span.clone();
    let mut complement = Vec::new();
    for i in 0..n {
        let mut e = CVec::zeros(n);
        e[i] = Complex64::new(1.0, 0.0);
        let before = all.len();
        for _ in 0..2 {
            for q in &all {
                let c = q.dotc(&e);
                e -= q * c;
            }
        }
        let nrm = e.norm();
        if nrm > tol {
            all.push(e / Complex64::new(nrm, 0.0));
            debug_assert_eq!(all.len(), before + 1);
            complement.push(all.last().unwrap().clone());
        }
    }
    debug_assert_eq!(span.len() + complement.len(), n);
    complement
}
