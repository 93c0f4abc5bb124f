//! Complex-valued signals on a vertex set.
//!
//! A `Signal` is a dense complex vector indexed by the graph's vertex order.
//! The inner product is the standard Hermitian one,
//!
//! ```text
//!     <f, g> = sum_v f(v) * conj(g(v))
//! ```
//!
//! File formats: a JSON array whose entries are numbers, `[re, im]` pairs, or
//! complex literals like `"1.5-2j"`; or a two-column CSV `vertex,value` keyed
//! by vertex label.

use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq)]
pub struct Signal(Vec<Complex64>);

impl Signal {
    pub fn new(values: Vec<Complex64>) -> Self {
        Signal(values)
    }

    pub fn zeros(n: usize) -> Self {
        Signal(vec![Complex64::new(0.0, 0.0); n])
    }

    /// All-ones indicator of the full vertex set.
    pub fn ones(n: usize) -> Self {
        Signal(vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn from_real(values: &[f64]) -> Self {
        Signal(values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Indicator of a vertex subset (dense indices).
    pub fn indicator(n: usize, subset: &[usize]) -> Self {
        let mut v = Signal::zeros(n);
        for &i in subset {
            v.0[i] = Complex64::new(1.0, 0.0);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.0
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.0
    }

    pub fn inner(&self, other: &Signal) -> Complex64 {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Signal {
        Signal(self.0.iter().map(|z| z * c).collect())
    }

    pub fn add(&self, other: &Signal) -> Signal {
        debug_assert_eq!(self.len(), other.len());
        Signal(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Signal) -> Signal {
        debug_assert_eq!(self.len(), other.len());
        Signal(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// axpy: self + c * other.
    pub fn add_scaled(&self, c: Complex64, other: &Signal) -> Signal {
        debug_assert_eq!(self.len(), other.len());
        Signal(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + c * b)
                .collect(),
        )
    }

    /// Restriction to a subset, in subset order.
    pub fn restrict(&self, subset: &[usize]) -> Signal {
        Signal(subset.iter().map(|&i| self.0[i]).collect())
    }

    /// Largest |f(v)| outside the given subset; zero support check helper.
    pub fn mass_outside(&self, subset: &[usize]) -> f64 {
        let inside: std::collections::HashSet<usize> = subset.iter().copied().collect();
        self.0
            .iter()
            .enumerate()
            .filter(|(i, _)| !inside.contains(i))
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max)
    }
}

impl std::ops::Index<usize> for Signal {
    type Output = Complex64;
    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl std::ops::IndexMut<usize> for Signal {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

// ---------- complex literals ----------

/// Parse `re`, `imj`, or `re+imj` (also `re-imj`); a bare `j` counts as `1j`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::ComplexParse {
            text: text.to_string(),
        });
    }
    let err = || Error::ComplexParse {
        text: text.to_string(),
    };

    if let Some(body) = s.strip_suffix(['j', 'J']) {
        // Split at the last +/- that is not part of an exponent and not leading.
        let bytes = body.as_bytes();
        let mut split = None;
        for i in (1..bytes.len()).rev() {
            let c = bytes[i] as char;
            if (c == '+' || c == '-') && !matches!(bytes[i - 1] as char, 'e' | 'E') {
                split = Some(i);
                break;
            }
        }
        match split {
            Some(i) => {
                let re: f64 = body[..i].trim().parse().map_err(|_| err())?;
                let imtext = body[i..].trim();
                let im = parse_signed_coefficient(imtext).ok_or_else(err)?;
                Ok(Complex64::new(re, im))
            }
            None => {
                let im = parse_signed_coefficient(body.trim()).ok_or_else(err)?;
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s.parse().map_err(|_| err())?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// `+`, `-`, or empty mantissa mean 1, -1, 1.
fn parse_signed_coefficient(text: &str) -> Option<f64> {
    match text {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        other => other.parse().ok(),
    }
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im >= 0.0 {
        format!("{}+{}j", z.re, z.im)
    } else {
        format!("{}{}j", z.re, z.im)
    }
}

// ---------- file formats ----------

/// One entry of a JSON signal array: number, `[re, im]`, or complex literal.
fn json_entry_to_complex(v: &serde_json::Value) -> Result<Complex64> {
    match v {
        serde_json::Value::Number(n) => {
            let x = n.as_f64().ok_or_else(|| Error::SignalParse {
                message: format!("non-finite number {n}"),
            })?;
            Ok(Complex64::new(x, 0.0))
        }
        serde_json::Value::String(s) => parse_complex(s),
        serde_json::Value::Array(pair) if pair.len() == 2 => {
            let re = pair[0].as_f64().ok_or_else(|| Error::SignalParse {
                message: "pair entries must be numbers".into(),
            })?;
            let im = pair[1].as_f64().ok_or_else(|| Error::SignalParse {
                message: "pair entries must be numbers".into(),
            })?;
            Ok(Complex64::new(re, im))
        }
        other => Err(Error::SignalParse {
            message: format!("unsupported entry {other}"),
        }),
    }
}

/// Signal from a JSON array, in vertex order.
pub fn signal_from_json(text: &str) -> Result<Signal> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    let arr = v.as_array().ok_or_else(|| Error::SignalParse {
        message: "expected a JSON array".into(),
    })?;
    let mut out = Vec::with_capacity(arr.len());
    for entry in arr {
        out.push(json_entry_to_complex(entry)?);
    }
    Ok(Signal::new(out))
}

/// Signal from two-column CSV `vertex,value`; `labels` fixes the vertex order.
/// Every vertex must be assigned exactly once.
pub fn signal_from_csv(text: &str, labels: &[String]) -> Result<Signal> {
    let index: std::collections::HashMap<&str, usize> = labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    let mut values = vec![None; labels.len()];
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if lineno == 0 && line.to_ascii_lowercase().starts_with("vertex") {
            continue; // header row
        }
        let (label, value) = line.split_once(',').ok_or_else(|| Error::SignalParse {
            message: format!("line {}: expected `vertex,value`", lineno + 1),
        })?;
        let label = label.trim();
        let &i = index.get(label).ok_or_else(|| Error::UnknownVertex {
            label: label.to_string(),
        })?;
        if values[i].is_some() {
            return Err(Error::SignalParse {
                message: format!("vertex {label} assigned twice"),
            });
        }
        values[i] = Some(parse_complex(value)?);
    }
    let mut out = Vec::with_capacity(labels.len());
    for (i, v) in values.into_iter().enumerate() {
        out.push(v.ok_or_else(|| Error::SignalParse {
            message: format!("vertex {} missing", labels[i]),
        })?);
    }
    Ok(Signal::new(out))
}

/// JSON array with numbers for real entries and `[re, im]` pairs otherwise.
pub fn signal_to_json(f: &Signal) -> String {
    let entries: Vec<serde_json::Value> = f
        .values()
        .iter()
        .map(|z| {
            if z.im == 0.0 {
                serde_json::json!(z.re)
            } else {
                serde_json::json!([z.re, z.im])
            }
        })
        .collect();
    serde_json::Value::Array(entries).to_string()
}
