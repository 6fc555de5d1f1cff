//! Finite sets and substochastic kernels.
//!
//! A kernel `X → Y` is a `|X| × |Y|` row-major matrix with `p[x][y] = p(y|x)`,
//! entries in `[0, 1]` and row masses at most `1`.

use std::fmt;

use crate::diagram::Generator;
use crate::error::{Error, Result};
use crate::eval;
use crate::morphism::{Backend, Morphism, ScalarValue, Tolerance};

#[derive(Clone, Debug, PartialEq)]
pub struct SubKernel {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl SubKernel {
    /// Builds a kernel from row-major entries, rejecting anything outside the
    /// substochastic range. Nothing is clamped.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::dims("kernel entries", rows * cols, data.len()));
        }
        let k = SubKernel { rows, cols, data };
        k.validate(Tolerance::DEFAULT)?;
        Ok(k)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::dims("kernel row", cols, bad.len()));
        }
        SubKernel::new(rows.len(), cols, rows.concat())
    }

    /// A state `I → X`.
    pub fn state(weights: &[f64]) -> Result<Self> {
        SubKernel::new(1, weights.len(), weights.to_vec())
    }

    /// An effect `X → I`.
    pub fn effect(values: &[f64]) -> Result<Self> {
        SubKernel::new(values.len(), 1, values.to_vec())
    }

    pub fn scalar(s: f64) -> Result<Self> {
        SubKernel::new(1, 1, vec![s])
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SubKernel {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// Unchecked constructor for internally computed kernels.
    pub(crate) fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for x in 0..rows {
            for y in 0..cols {
                data.push(f(x, y));
            }
        }
        SubKernel { rows, cols, data }
    }

    pub(crate) fn from_data_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        SubKernel { rows, cols, data }
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.cols..(x + 1) * self.cols]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        // chunks(0) panics; an empty codomain still has `rows` empty rows
        (0..self.rows).map(move |x| self.row(x))
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    pub fn row_mass(&self, x: usize) -> f64 {
        self.row(x).iter().sum()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.rows().map(<[f64]>::to_vec).collect()
    }

    pub fn validate(&self, tol: Tolerance) -> Result<()> {
        let t = tol.value();
        for (x, row) in self.rows().enumerate() {
            for (y, &p) in row.iter().enumerate() {
                if !(p.is_finite() && p >= 0.0 && p <= 1.0 + t) {
                    return Err(Error::InvalidMorphism(format!(
                        "entry ({x},{y}) = {p} is outside [0, 1]"
                    )));
                }
            }
            let mass: f64 = row.iter().sum();
            if mass > 1.0 + t {
                return Err(Error::InvalidMorphism(format!("row {x} has mass {mass} > 1")));
            }
        }
        Ok(())
    }

    /// Entrywise equality up to `tol`.
    pub fn equal(&self, other: &SubKernel, tol: Tolerance) -> Result<bool> {
        self.approx_eq(other, tol)
    }

    /// Multiplies every entry by `s ∈ [0, 1]`, i.e. `s ⊗ self`.
    pub fn scale(&self, s: f64) -> SubKernel {
        SubKernel {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|p| p * s).collect(),
        }
    }
}

pub fn compose(f: &SubKernel, g: &SubKernel) -> Result<SubKernel> {
    f.then(g)
}

pub fn tensor(f: &SubKernel, g: &SubKernel) -> SubKernel {
    f.tensor(g)
}

pub fn equal(f: &SubKernel, g: &SubKernel, tol: Tolerance) -> Result<bool> {
    f.approx_eq(g, tol)
}

/// Which structural morphism to build on a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StructuralKind {
    Copy,
    Discard,
    Compare,
    Cap,
    /// Swaps the first `split` factors past the remaining ones.
    Swap { split: usize },
    Unit,
}

/// Structural morphism on a word given by its factor cardinalities,
/// elaborated through the uniformity equations.
pub fn structural<M: Morphism>(kind: StructuralKind, cards: &[usize]) -> Result<M> {
    Ok(match kind {
        StructuralKind::Copy => eval::copy_on(cards),
        StructuralKind::Discard => eval::discard_on(cards),
        StructuralKind::Compare => eval::compare_on(cards),
        StructuralKind::Cap => eval::cap_on(cards),
        StructuralKind::Swap { split } => {
            if split > cards.len() {
                return Err(Error::dims("swap split", cards.len(), split));
            }
            let (a, b) = cards.split_at(split);
            eval::swap_on(a, b)
        }
        StructuralKind::Unit => eval::unit_on(cards)?,
    })
}

pub fn is_deterministic(f: &SubKernel, tol: Tolerance) -> bool {
    f.is_deterministic(tol)
}

pub fn is_total(f: &SubKernel, tol: Tolerance) -> bool {
    f.is_total(tol)
}

pub fn is_quasi_total(f: &SubKernel, tol: Tolerance) -> bool {
    f.is_quasi_total(tol)
}

impl Morphism for SubKernel {
    const BACKEND: Backend = Backend::FinStoch;

    fn dom(&self) -> usize {
        self.rows
    }

    fn cod(&self) -> usize {
        self.cols
    }

    fn identity(n: usize) -> Self {
        SubKernel::from_fn(n, n, |x, y| if x == y { 1.0 } else { 0.0 })
    }

    fn then(&self, next: &Self) -> Result<Self> {
        if self.cols != next.rows {
            return Err(Error::dims("compose", self.cols, next.rows));
        }
        let mut out = vec![0.0; self.rows * next.cols];
        for x in 0..self.rows {
            let dst = &mut out[x * next.cols..(x + 1) * next.cols];
            for (y, &p) in self.row(x).iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                for (d, &q) in dst.iter_mut().zip(next.row(y)) {
                    *d += p * q;
                }
            }
        }
        Ok(SubKernel::from_data_unchecked(self.rows, next.cols, out))
    }

    fn tensor(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut data = vec![0.0; rows * cols];
        for x1 in 0..self.rows {
            for x2 in 0..other.rows {
                let r = x1 * other.rows + x2;
                for (y1, &p) in self.row(x1).iter().enumerate() {
                    if p == 0.0 {
                        continue;
                    }
                    for (y2, &q) in other.row(x2).iter().enumerate() {
                        data[r * cols + y1 * other.cols + y2] = p * q;
                    }
                }
            }
        }
        SubKernel::from_data_unchecked(rows, cols, data)
    }

    fn swap(left: usize, right: usize) -> Self {
        let n = left * right;
        let mut k = SubKernel::zeros(n, n);
        for x in 0..left {
            for y in 0..right {
                k.data[(x * right + y) * n + y * left + x] = 1.0;
            }
        }
        k
    }

    fn copy(n: usize) -> Self {
        SubKernel::from_fn(n, n * n, |x, j| if j == x * n + x { 1.0 } else { 0.0 })
    }

    fn discard(n: usize) -> Self {
        SubKernel::from_fn(n, 1, |_, _| 1.0)
    }

    fn compare(n: usize) -> Self {
        SubKernel::from_fn(n * n, n, |i, x| if i == x * n + x { 1.0 } else { 0.0 })
    }

    fn cap(n: usize) -> Self {
        SubKernel::from_fn(n * n, 1, |i, _| if i / n.max(1) == i % n.max(1) { 1.0 } else { 0.0 })
    }

    fn residual(&self, other: &Self) -> Result<f64> {
        crate::morphism::check_parallel("kernel comparison", self, other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    fn scalar_value(&self) -> Option<ScalarValue> {
        (self.rows == 1 && self.cols == 1).then(|| ScalarValue::Prob(self.data[0]))
    }

    fn from_payload(name: &str, generator: &Generator, dom: usize, cod: usize) -> Result<Self> {
        let rows = generator.finstoch.as_ref().ok_or_else(|| Error::MissingPayload {
            generator: name.to_string(),
            backend: Backend::FinStoch,
        })?;
        let invalid = |reason: String| Error::InvalidPayload {
            generator: name.to_string(),
            reason,
        };
        if rows.len() != dom {
            return Err(invalid(format!("expected {dom} rows, found {}", rows.len())));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != cod) {
            return Err(invalid(format!("expected rows of length {cod}, found {}", r.len())));
        }
        SubKernel::new(dom, cod, rows.concat()).map_err(|e| invalid(e.to_string()))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.to_rows())
    }

    fn is_total(&self, tol: Tolerance) -> bool {
        (0..self.rows).all(|x| (self.row_mass(x) - 1.0).abs() <= tol.value())
    }

    /// An effect is deterministic iff it is `{0, 1}`-valued, so `f` is
    /// quasi-total iff every row mass is `0` or `1`.
    fn is_quasi_total(&self, tol: Tolerance) -> bool {
        (0..self.rows).all(|x| {
            let m = self.row_mass(x);
            m.abs() <= tol.value() || (m - 1.0).abs() <= tol.value()
        })
    }
}

impl fmt::Display for SubKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows == 0 {
            return write!(f, "(empty 0×{} kernel)", self.cols);
        }
        for (x, row) in self.rows().enumerate() {
            if x > 0 {
                writeln!(f)?;
            }
            let cells: Vec<String> = row.iter().map(|p| format!("{p}")).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}
