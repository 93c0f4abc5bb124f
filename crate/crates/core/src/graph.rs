//! Finite weighted graphs and their Laplacian.
//!
//! A graph is a finite vertex list with symmetric nonnegative edge weights,
//! no self-loops. The weighted degree is w(v) = sum_u w(v, u) and the
//! Laplacian acts by
//!
//! ```text
//!     (L f)(v) = sum_u (f(v) - f(u)) w(v, u)
//! ```
//!
//! The weighted gradient seminorm is
//! |grad f|^2 = (1/2) sum_{u,v} |f(u) - f(v)|^2 w(u, v), with each unordered
//! edge counted once in the implementation. `<f, Lf> = |grad f|^2` holds
//! exactly in exact arithmetic; tests pin the identity to 1e-10 relative.
//!
//! Edge-list text format: one `u v weight` triple per line, `#` starts a
//! comment, blank lines ignored. Entries are symmetrized; restating an edge
//! with the same weight is allowed, conflicting weights are rejected. A zero
//! weight registers its endpoints without creating an edge.

use crate::error::{Error, Result};
use crate::signal::Signal;
use num_complex::Complex64;
use std::collections::{BTreeMap, HashMap};

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    /// Canonical (min, max) vertex pairs to positive weights.
    edges: BTreeMap<(usize, usize), f64>,
    /// Neighbor lists derived from `edges`.
    adjacency: Vec<Vec<(usize, f64)>>,
    degrees: Vec<f64>,
}

impl WeightedGraph {
    /// Build from (u, v, weight) triples; vertex order is first appearance.
    pub fn build<S: AsRef<str>>(edge_list: &[(S, S, f64)]) -> Result<Self> {
        if edge_list.is_empty() {
            return Err(Error::EmptyEdgeList);
        }
        let mut labels: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut intern = |label: &str, index: &mut HashMap<String, usize>| -> usize {
            if let Some(&i) = index.get(label) {
                i
            } else {
                let i = labels.len();
                labels.push(label.to_string());
                index.insert(label.to_string(), i);
                i
            }
        };
        let mut edges: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edge_list {
            let (u, v, w) = (u.as_ref(), v.as_ref(), *w);
            if w < 0.0 {
                return Err(Error::NegativeWeight {
                    u: u.to_string(),
                    v: v.to_string(),
                    weight: w,
                });
            }
            let ui = intern(u, &mut index);
            let vi = intern(v, &mut index);
            if ui == vi {
                if w != 0.0 {
                    return Err(Error::SelfLoop {
                        v: u.to_string(),
                        weight: w,
                    });
                }
                continue;
            }
            if w == 0.0 {
                continue;
            }
            let key = (ui.min(vi), ui.max(vi));
            if let Some(&prev) = edges.get(&key) {
                if prev != w {
                    return Err(Error::ConflictingEdge {
                        u: labels[key.0].clone(),
                        v: labels[key.1].clone(),
                        first: prev,
                        second: w,
                    });
                }
            } else {
                edges.insert(key, w);
            }
        }
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut degrees = vec![0.0; n];
        for (&(u, v), &w) in &edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
            degrees[u] += w;
            degrees[v] += w;
        }
        Ok(WeightedGraph {
            labels,
            index,
            edges,
            adjacency,
            degrees,
        })
    }

    /// Parse the `u v weight` text format.
    pub fn from_edge_list_text(text: &str) -> Result<Self> {
        let mut triples: Vec<(String, String, f64)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(Error::EdgeListParse {
                    line: lineno + 1,
                    message: format!("expected `u v weight`, got {} fields", fields.len()),
                });
            }
            let w: f64 = fields[2].parse().map_err(|_| Error::EdgeListParse {
                line: lineno + 1,
                message: format!("cannot parse weight {:?}", fields[2]),
            })?;
            if !w.is_finite() {
                return Err(Error::EdgeListParse {
                    line: lineno + 1,
                    message: format!("weight {w} is not finite"),
                });
            }
            triples.push((fields[0].to_string(), fields[1].to_string(), w));
        }
        if triples.is_empty() {
            return Err(Error::EmptyEdgeList);
        }
        WeightedGraph::build(&triples)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| Error::UnknownVertex {
                label: label.to_string(),
            })
    }

    /// Unordered edges with positive weight, keys canonical (min, max).
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.edges.iter().map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn weight(&self, u: usize, v: usize) -> f64 {
        if u == v {
            return 0.0;
        }
        let key = (u.min(v), u.max(v));
        self.edges.get(&key).copied().unwrap_or(0.0)
    }

    /// Weighted degree w(v).
    pub fn degree(&self, v: usize) -> f64 {
        self.degrees[v]
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    /// (L f)(v) = sum_u (f(v) - f(u)) w(v, u).
    pub fn laplacian_apply(&self, f: &Signal) -> Result<Signal> {
        self.check_len(f)?;
        let mut out = Signal::zeros(self.len());
        for v in 0..self.len() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(u, w) in &self.adjacency[v] {
                acc += (f[v] - f[u]) * w;
            }
            out[v] = acc;
        }
        Ok(out)
    }

    /// Dense Laplacian matrix (row-major), for spectral work.
    pub fn laplacian_matrix(&self) -> nalgebra::DMatrix<f64> {
        let n = self.len();
        let mut m = nalgebra::DMatrix::zeros(n, n);
        for (u, v, w) in self.edges() {
            m[(u, v)] -= w;
            m[(v, u)] -= w;
            m[(u, u)] += w;
            m[(v, v)] += w;
        }
        m
    }

    /// |grad f| = sqrt( sum over unordered edges of |f(u)-f(v)|^2 w(u,v) ).
    pub fn gradient_norm(&self, f: &Signal) -> Result<f64> {
        self.check_len(f)?;
        let mut acc = 0.0;
        for (u, v, w) in self.edges() {
            acc += (f[u] - f[v]).norm_sqr() * w;
        }
        Ok(acc.sqrt())
    }

    /// Subgraph induced by `subset` (dense indices, parent order kept),
    /// retaining the weights of edges with both endpoints inside.
    pub fn induced_subgraph(&self, subset: &[usize]) -> Result<WeightedGraph> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let mut seen = std::collections::HashSet::new();
        for &i in subset {
            if i >= self.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    size: self.len(),
                });
            }
            if !seen.insert(i) {
                return Err(Error::CoverDuplicateVertex {
                    index: 0,
                    label: self.labels[i].clone(),
                });
            }
        }
        let mut order: Vec<usize> = subset.to_vec();
        order.sort_unstable();
        let local: HashMap<usize, usize> = order.iter().enumerate().map(|(l, &g)| (g, l)).collect();
        let labels: Vec<String> = order.iter().map(|&g| self.labels[g].clone()).collect();
        let index: HashMap<String, usize> = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let mut edges = BTreeMap::new();
        for (&(u, v), &w) in &self.edges {
            if let (Some(&lu), Some(&lv)) = (local.get(&u), local.get(&v)) {
                edges.insert((lu.min(lv), lu.max(lv)), w);
            }
        }
        let n = labels.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut degrees = vec![0.0; n];
        for (&(u, v), &w) in &edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
            degrees[u] += w;
            degrees[v] += w;
        }
        Ok(WeightedGraph {
            labels,
            index,
            edges,
            adjacency,
            degrees,
        })
    }

    /// Connectivity over edges with positive weight.
    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &(u, _) in &self.adjacency[v] {
                if !seen[u] {
                    seen[u] = true;
                    count += 1;
                    stack.push(u);
                }
            }
        }
        count == self.len()
    }

    fn check_len(&self, f: &Signal) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::SignalLength {
                expected: self.len(),
                got: f.len(),
            });
        }
        Ok(())
    }
}
