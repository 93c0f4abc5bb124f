//! Seeded random fixtures: signals, bandlimited signals, connected graphs.
//!
//! Every generator takes the RNG explicitly so a run is reproducible from a
//! single seed. ChaCha8 is the stream of record; tests and the CLI must not
//! fall back to entropy.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::WeightedGraph;
use crate::linalg::CVec;
use crate::signal::Signal;
use crate::spectral::PaleyWienerSpace;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Complex signal with independent entries uniform on [-1, 1]^2.
pub fn random_signal(n: usize, rng: &mut impl Rng) -> Signal {
    Signal::new(
        (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    )
}

/// Random bandlimited signal: uniform coefficients on the band, synthesized.
pub fn random_pw_signal(pw: &PaleyWienerSpace<'_>, rng: &mut impl Rng) -> Signal {
    let coeffs = CVec::from_fn(pw.dim(), |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    pw.synthesize(&coeffs)
}

/// Connected graph on `n >= 2` vertices: a random attachment tree plus up to
/// `extra_edges` distinct extra edges. Weights are uniform on (0, 10]; the
/// open left end keeps every edge weight strictly positive.
pub fn random_connected_graph(
    n: usize,
    extra_edges: usize,
    rng: &mut impl Rng,
) -> Result<WeightedGraph> {
    let mut edges: Vec<(String, String, f64)> = Vec::new();
    let mut present = std::collections::HashSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        present.insert((u, v));
        let w = 10.0 * (1.0 - rng.gen::<f64>());
        edges.push((format!("v{u}"), format!("v{v}"), w));
    }
    let mut attempts = 0;
    let mut added = 0;
    while added < extra_edges && attempts < 20 * extra_edges.max(1) {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if !present.insert(key) {
            continue;
        }
        let w = 10.0 * (1.0 - rng.gen::<f64>());
        edges.push((format!("v{}", key.0), format!("v{}", key.1), w));
        added += 1;
    }
    WeightedGraph::build(&edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_runs_are_identical() {
        let mut r1 = rng_from_seed(11);
        let mut r2 = rng_from_seed(11);
        let a = random_signal(16, &mut r1);
        let b = random_signal(16, &mut r2);
        assert_eq!(a.values(), b.values());
        let g1 = random_connected_graph(10, 5, &mut r1).unwrap();
        let g2 = random_connected_graph(10, 5, &mut r2).unwrap();
        assert_eq!(g1.edges().collect::<Vec<_>>(), g2.edges().collect::<Vec<_>>());
    }

    #[test]
    fn random_graphs_are_connected_with_positive_weights() {
        let mut rng = rng_from_seed(3);
        for trial in 0..50 {
            let n = 2 + (trial % 20);
            let g = random_connected_graph(n, trial % 7, &mut rng).unwrap();
            assert_eq!(g.len(), n);
            assert!(g.is_connected());
            assert!(g.edges().all(|(_, _, w)| w > 0.0 && w <= 10.0));
        }
    }

    #[test]
    fn pw_signals_stay_in_band() {
        let mut rng = rng_from_seed(5);
        let g = random_connected_graph(12, 6, &mut rng).unwrap();
        let d = crate::spectral::SpectralDecomposition::decompose(&g).unwrap();
        let omega = d.eigenvalues()[5];
        let pw = d.pw_space(omega).unwrap();
        for _ in 0..10 {
            let f = random_pw_signal(&pw, &mut rng);
            assert!(pw.out_of_band_mass(&f).unwrap() <= 1e-9 * f.norm().max(1.0));
        }
    }
}
