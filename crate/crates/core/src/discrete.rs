//! Partial functions and relations between finite sets.
//!
//! Both share the operation surface of [`crate::finstoch`]; equality is
//! exact. Only relations carry the codiscard `unit`.

use std::fmt;

use crate::diagram::Generator;
use crate::error::{Error, Result};
use crate::finstoch::StructuralKind;
use crate::morphism::{check_parallel, Backend, Morphism, ScalarValue, Tolerance};

/// A partial function `dom → cod` as an option-valued table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PartialFn {
    cod: usize,
    table: Vec<Option<usize>>,
}

impl PartialFn {
    pub fn new(cod: usize, table: Vec<Option<usize>>) -> Result<Self> {
        if let Some(bad) = table.iter().flatten().find(|&&y| y >= cod) {
            return Err(Error::InvalidMorphism(format!(
                "output index {bad} out of range for codomain of size {cod}"
            )));
        }
        Ok(PartialFn { cod, table })
    }

    pub(crate) fn from_fn(dom: usize, cod: usize, f: impl Fn(usize) -> Option<usize>) -> Self {
        PartialFn {
            cod,
            table: (0..dom).map(f).collect(),
        }
    }

    pub fn apply(&self, x: usize) -> Option<usize> {
        self.table[x]
    }

    pub fn table(&self) -> &[Option<usize>] {
        &self.table
    }

    pub fn is_everywhere_defined(&self) -> bool {
        self.table.iter().all(Option::is_some)
    }
}

/// A relation `dom → cod` as a row-major boolean matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FinRel {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl FinRel {
    pub fn new(rows: usize, cols: usize, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != rows * cols {
            return Err(Error::dims("relation entries", rows * cols, bits.len()));
        }
        Ok(FinRel { rows, cols, bits })
    }

    pub fn empty(rows: usize, cols: usize) -> Self {
        FinRel {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    pub fn full(rows: usize, cols: usize) -> Self {
        FinRel {
            rows,
            cols,
            bits: vec![true; rows * cols],
        }
    }

    /// The relation containing exactly the listed pairs.
    pub fn from_pairs(rows: usize, cols: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let mut r = FinRel::empty(rows, cols);
        for &(x, y) in pairs {
            if x >= rows || y >= cols {
                return Err(Error::InvalidMorphism(format!(
                    "pair ({x},{y}) outside a {rows}×{cols} relation"
                )));
            }
            r.bits[x * cols + y] = true;
        }
        Ok(r)
    }

    pub(crate) fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(rows * cols);
        for x in 0..rows {
            for y in 0..cols {
                bits.push(f(x, y));
            }
        }
        FinRel { rows, cols, bits }
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[x * self.cols + y]
    }

    pub fn row(&self, x: usize) -> &[bool] {
        &self.bits[x * self.cols..(x + 1) * self.cols]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn pairs(&self) -> Vec<(usize, usize)> {
        (0..self.rows)
            .flat_map(|x| (0..self.cols).map(move |y| (x, y)))
            .filter(|&(x, y)| self.get(x, y))
            .collect()
    }

    pub fn is_subrelation_of(&self, other: &FinRel) -> Result<bool> {
        check_parallel("relation inclusion", self, other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b))
    }

    pub fn union(&self, other: &FinRel) -> Result<FinRel> {
        check_parallel("relation union", self, other)?;
        Ok(FinRel {
            rows: self.rows,
            cols: self.cols,
            bits: self.bits.iter().zip(&other.bits).map(|(&a, &b)| a || b).collect(),
        })
    }
}

pub fn compose_par(f: &PartialFn, g: &PartialFn) -> Result<PartialFn> {
    f.then(g)
}

pub fn compose_rel(f: &FinRel, g: &FinRel) -> Result<FinRel> {
    f.then(g)
}

pub fn structural_par(kind: StructuralKind, cards: &[usize]) -> Result<PartialFn> {
    crate::finstoch::structural(kind, cards)
}

pub fn structural_rel(kind: StructuralKind, cards: &[usize]) -> Result<FinRel> {
    crate::finstoch::structural(kind, cards)
}

/// Predicate flags of a morphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Predicates {
    pub deterministic: bool,
    pub total: bool,
    pub quasi_total: bool,
}

pub fn predicates_discrete<M: Morphism>(f: &M) -> Predicates {
    let tol = Tolerance::DEFAULT;
    Predicates {
        deterministic: f.is_deterministic(tol),
        total: f.is_total(tol),
        quasi_total: f.is_quasi_total(tol),
    }
}

impl Morphism for PartialFn {
    const BACKEND: Backend = Backend::Par;

    fn dom(&self) -> usize {
        self.table.len()
    }

    fn cod(&self) -> usize {
        self.cod
    }

    fn identity(n: usize) -> Self {
        PartialFn::from_fn(n, n, Some)
    }

    fn then(&self, next: &Self) -> Result<Self> {
        if self.cod != next.dom() {
            return Err(Error::dims("compose", self.cod, next.dom()));
        }
        Ok(PartialFn {
            cod: next.cod,
            table: self.table.iter().map(|y| y.and_then(|y| next.table[y])).collect(),
        })
    }

    fn tensor(&self, other: &Self) -> Self {
        let n2 = other.dom();
        PartialFn::from_fn(self.dom() * n2, self.cod * other.cod, |i| {
            let y1 = self.table[i / n2]?;
            let y2 = other.table[i % n2]?;
            Some(y1 * other.cod + y2)
        })
    }

    fn swap(left: usize, right: usize) -> Self {
        PartialFn::from_fn(left * right, left * right, |i| {
            let (x, y) = (i / right, i % right);
            Some(y * left + x)
        })
    }

    fn copy(n: usize) -> Self {
        PartialFn::from_fn(n, n * n, |x| Some(x * n + x))
    }

    fn discard(n: usize) -> Self {
        PartialFn::from_fn(n, 1, |_| Some(0))
    }

    fn compare(n: usize) -> Self {
        PartialFn::from_fn(n * n, n, |i| (i / n == i % n).then_some(i / n))
    }

    fn cap(n: usize) -> Self {
        PartialFn::from_fn(n * n, 1, |i| (i / n == i % n).then_some(0))
    }

    fn residual(&self, other: &Self) -> Result<f64> {
        check_parallel("partial function comparison", self, other)?;
        Ok(if self == other { 0.0 } else { 1.0 })
    }

    fn scalar_value(&self) -> Option<ScalarValue> {
        (self.dom() == 1 && self.cod == 1).then(|| ScalarValue::Defined(self.table[0].is_some()))
    }

    fn from_payload(name: &str, generator: &Generator, dom: usize, cod: usize) -> Result<Self> {
        let table = generator.par.as_ref().ok_or_else(|| Error::MissingPayload {
            generator: name.to_string(),
            backend: Backend::Par,
        })?;
        let invalid = |reason: String| Error::InvalidPayload {
            generator: name.to_string(),
            reason,
        };
        if table.len() != dom {
            return Err(invalid(format!("expected {dom} entries, found {}", table.len())));
        }
        PartialFn::new(cod, table.clone()).map_err(|e| invalid(e.to_string()))
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::json!(self.table)
    }

    /// Copying is natural in Par.
    fn is_deterministic(&self, _tol: Tolerance) -> bool {
        true
    }

    fn is_total(&self, _tol: Tolerance) -> bool {
        self.is_everywhere_defined()
    }

    fn is_quasi_total(&self, _tol: Tolerance) -> bool {
        true
    }
}

impl Morphism for FinRel {
    const BACKEND: Backend = Backend::Rel;

    fn dom(&self) -> usize {
        self.rows
    }

    fn cod(&self) -> usize {
        self.cols
    }

    fn identity(n: usize) -> Self {
        FinRel::from_fn(n, n, |x, y| x == y)
    }

    fn then(&self, next: &Self) -> Result<Self> {
        if self.cols != next.rows {
            return Err(Error::dims("compose", self.cols, next.rows));
        }
        let mut bits = vec![false; self.rows * next.cols];
        for x in 0..self.rows {
            let dst = &mut bits[x * next.cols..(x + 1) * next.cols];
            for (y, _) in self.row(x).iter().enumerate().filter(|(_, &b)| b) {
                for (d, &b) in dst.iter_mut().zip(next.row(y)) {
                    *d |= b;
                }
            }
        }
        Ok(FinRel {
            rows: self.rows,
            cols: next.cols,
            bits,
        })
    }

    fn tensor(&self, other: &Self) -> Self {
        FinRel::from_fn(self.rows * other.rows, self.cols * other.cols, |i, j| {
            self.get(i / other.rows, j / other.cols) && other.get(i % other.rows, j % other.cols)
        })
    }

    fn swap(left: usize, right: usize) -> Self {
        FinRel::from_fn(left * right, left * right, |i, j| {
            j == (i % right) * left + i / right
        })
    }

    fn copy(n: usize) -> Self {
        FinRel::from_fn(n, n * n, |x, j| j == x * n + x)
    }

    fn discard(n: usize) -> Self {
        FinRel::full(n, 1)
    }

    fn compare(n: usize) -> Self {
        FinRel::from_fn(n * n, n, |i, x| i == x * n + x)
    }

    fn cap(n: usize) -> Self {
        FinRel::from_fn(n * n, 1, |i, _| i / n == i % n)
    }

    fn unit(n: usize) -> Result<Self> {
        Ok(FinRel::full(1, n))
    }

    fn residual(&self, other: &Self) -> Result<f64> {
        check_parallel("relation comparison", self, other)?;
        Ok(if self == other { 0.0 } else { 1.0 })
    }

    fn scalar_value(&self) -> Option<ScalarValue> {
        (self.rows == 1 && self.cols == 1).then(|| ScalarValue::Truth(self.bits[0]))
    }

    fn from_payload(name: &str, generator: &Generator, dom: usize, cod: usize) -> Result<Self> {
        let rows = generator.rel.as_ref().ok_or_else(|| Error::MissingPayload {
            generator: name.to_string(),
            backend: Backend::Rel,
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
        FinRel::new(dom, cod, rows.concat())
    }

    fn to_json(&self) -> serde_json::Value {
        let rows: Vec<&[bool]> = (0..self.rows).map(|x| self.row(x)).collect();
        serde_json::json!(rows)
    }

    /// Every relation is quasi-total: `m ; ε` is always deterministic.
    fn is_quasi_total(&self, _tol: Tolerance) -> bool {
        true
    }
}

impl fmt::Display for PartialFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self
            .table
            .iter()
            .enumerate()
            .map(|(x, y)| match y {
                Some(y) => format!("{x} ↦ {y}"),
                None => format!("{x} ↦ ⊥"),
            })
            .collect();
        write!(f, "{{{}}}", cells.join(", "))
    }
}

impl fmt::Display for FinRel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<String> = self.pairs().iter().map(|(x, y)| format!("({x},{y})")).collect();
        write!(f, "{{{}}} ⊆ {}×{}", pairs.join(", "), self.rows, self.cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::{commutes_with_copy, commutes_with_discard, restricts_itself};

    const TOL: Tolerance = Tolerance::DEFAULT;

    fn pf(cod: usize, t: &[Option<usize>]) -> PartialFn {
        PartialFn::new(cod, t.to_vec()).unwrap()
    }

    #[test]
    fn par_composition() {
        let f = pf(2, &[Some(1), None]);
        let g = pf(1, &[None, Some(0)]);
        assert_eq!(compose_par(&f, &g).unwrap(), pf(1, &[Some(0), None]));
        assert_eq!(compose_par(&f, &PartialFn::identity(2)).unwrap(), f);
        assert!(compose_par(&g, &g).is_err());
    }

    #[test]
    fn rel_composition() {
        // carriers {0..6}; (1,2) ; (2,5) = (1,5)
        let r = FinRel::from_pairs(6, 6, &[(1, 2)]).unwrap();
        let s = FinRel::from_pairs(6, 6, &[(2, 5)]).unwrap();
        assert_eq!(compose_rel(&r, &s).unwrap().pairs(), vec![(1, 5)]);
        let empty = FinRel::empty(6, 6);
        assert_eq!(compose_rel(&empty, &s).unwrap(), empty);
    }

    #[test]
    fn par_structure() {
        let cmp = PartialFn::compare(2);
        assert_eq!(cmp.table(), &[Some(0), None, None, Some(1)]);
        assert!(structural_par(StructuralKind::Unit, &[2]).is_err());
        assert_eq!(PartialFn::copy(3).then(&PartialFn::compare(3)).unwrap(), PartialFn::identity(3));
    }

    #[test]
    fn rel_structure() {
        assert_eq!(FinRel::copy(3).then(&FinRel::compare(3)).unwrap(), FinRel::identity(3));
        assert_eq!(FinRel::unit(2).unwrap().pairs(), vec![(0, 0), (0, 1)]);
        let u: FinRel = structural_rel(StructuralKind::Unit, &[2, 2]).unwrap();
        assert_eq!(u, FinRel::full(1, 4));
    }

    #[test]
    fn swap_is_involutive_and_moves_pairs() {
        let s = FinRel::swap(2, 3);
        assert!(s.get(3 + 2, 2 * 2 + 1));
        assert_eq!(s.then(&FinRel::swap(3, 2)).unwrap(), FinRel::identity(6));
        let p = PartialFn::swap(2, 3);
        assert_eq!(p.then(&PartialFn::swap(3, 2)).unwrap(), PartialFn::identity(6));
    }

    #[test]
    fn par_predicates_match_equations() {
        let cases = [
            pf(2, &[Some(1), None, Some(0)]),
            pf(2, &[Some(1), Some(1), Some(0)]),
            pf(1, &[None, None, None]),
        ];
        for f in &cases {
            let p = predicates_discrete(f);
            assert!(p.deterministic && p.quasi_total);
            assert!(commutes_with_copy(f, TOL));
            assert!(restricts_itself(f, TOL));
            assert_eq!(p.total, commutes_with_discard(f, TOL));
        }
        assert!(predicates_discrete(&cases[1]).total);
        assert!(!predicates_discrete(&cases[0]).total);
    }

    #[test]
    fn rel_predicates_from_equations() {
        // Example carrier {1,2,3} encoded as 0..3
        let s = FinRel::from_pairs(3, 3, &[(0, 1), (0, 2)]).unwrap();
        let p = predicates_discrete(&s);
        assert!(!p.deterministic);
        assert!(!p.total);
        assert!(p.quasi_total);
        assert!(restricts_itself(&s, TOL));

        let func = FinRel::from_pairs(3, 2, &[(0, 1), (1, 0), (2, 0)]).unwrap();
        let p = predicates_discrete(&func);
        assert!(p.deterministic && p.total);

        let partial = FinRel::from_pairs(3, 2, &[(0, 1)]).unwrap();
        let p = predicates_discrete(&partial);
        assert!(p.deterministic && !p.total);
    }

    #[test]
    fn zero_cardinality() {
        let e = FinRel::copy(0);
        assert_eq!((e.dom(), e.cod()), (0, 0));
        assert_eq!(FinRel::unit(0).unwrap().then(&FinRel::discard(0)).unwrap(), FinRel::empty(1, 1));
        assert_eq!(PartialFn::compare(0).dom(), 0);
    }

    #[test]
    fn payload_validation() {
        let mut g = Generator {
            par: Some(vec![Some(3)]),
            ..Generator::default()
        };
        assert!(PartialFn::from_payload("g", &g, 1, 3).is_err());
        g.rel = Some(vec![vec![true, false]]);
        assert!(FinRel::from_payload("g", &g, 1, 2).is_ok());
        assert!(matches!(
            FinRel::from_payload("g", &Generator::default(), 1, 2),
            Err(Error::MissingPayload { .. })
        ));
    }
}
