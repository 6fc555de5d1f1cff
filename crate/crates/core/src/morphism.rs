//! The copy-discard-compare interface shared by every semantic backend.
//!
//! A backend is a type of morphisms between finite sets, identified with
//! their cardinalities. Tensor words are flattened lexicographically with
//! the leftmost factor most significant, so an element `(x1, x2)` of
//! `X1 ⊗ X2` has index `x1 * |X2| + x2`. Every backend uses this layout.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::diagram::Generator;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Backend {
    FinStoch,
    Par,
    Rel,
}

impl Backend {
    pub const ALL: [Backend; 3] = [Backend::FinStoch, Backend::Par, Backend::Rel];

    pub fn name(self) -> &'static str {
        match self {
            Backend::FinStoch => "finstoch",
            Backend::Par => "par",
            Backend::Rel => "rel",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finstoch" => Ok(Backend::FinStoch),
            "par" => Ok(Backend::Par),
            "rel" => Ok(Backend::Rel),
            other => Err(Error::Config(format!("unknown backend `{other}`"))),
        }
    }
}

impl Serialize for Backend {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// Absolute tolerance for numeric equality and inequality checks.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Tolerance(f64);

impl Tolerance {
    pub const DEFAULT: Tolerance = Tolerance(1e-9);

    pub fn new(tol: f64) -> Result<Self> {
        if tol.is_finite() && tol >= 0.0 {
            Ok(Tolerance(tol))
        } else {
            Err(Error::Config(format!("tolerance must be a non-negative number, got {tol}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance::DEFAULT
    }
}

/// A morphism `I → I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScalarValue {
    /// A probability in `[0, 1]`.
    Prob(f64),
    /// Defined or undefined, for partial functions.
    Defined(bool),
    /// True or false, for relations.
    Truth(bool),
}

impl ScalarValue {
    /// Closed-form zero-scalar test, one case per backend.
    pub fn is_zero(self, tol: Tolerance) -> bool {
        match self {
            ScalarValue::Prob(p) => p.abs() <= tol.value(),
            ScalarValue::Defined(d) => !d,
            ScalarValue::Truth(t) => !t,
        }
    }

    /// Numeric reading; `1.0` for defined/true, `0.0` otherwise.
    pub fn as_f64(self) -> f64 {
        match self {
            ScalarValue::Prob(p) => p,
            ScalarValue::Defined(b) | ScalarValue::Truth(b) => f64::from(u8::from(b)),
        }
    }
}

impl fmt::Display for ScalarValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScalarValue::Prob(p) => write!(f, "{p}"),
            ScalarValue::Defined(true) => f.write_str("defined"),
            ScalarValue::Defined(false) => f.write_str("undefined"),
            ScalarValue::Truth(t) => write!(f, "{t}"),
        }
    }
}

impl Serialize for ScalarValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ScalarValue::Prob(p) => s.serialize_f64(*p),
            ScalarValue::Defined(true) => s.serialize_str("defined"),
            ScalarValue::Defined(false) => s.serialize_str("undefined"),
            ScalarValue::Truth(t) => s.serialize_bool(*t),
        }
    }
}

/// Morphisms of a finite copy-discard-compare category.
///
/// Structural constants here act on a single flattened object of the given
/// cardinality. Word-level structure is elaborated from these by
/// [`crate::eval`].
pub trait Morphism: Clone + fmt::Debug + fmt::Display + Send + Sync + 'static {
    const BACKEND: Backend;

    fn dom(&self) -> usize;
    fn cod(&self) -> usize;

    fn identity(n: usize) -> Self;

    /// Sequential composition in diagrammatic order: `self ; next`.
    fn then(&self, next: &Self) -> Result<Self>;

    fn tensor(&self, other: &Self) -> Self;

    /// The symmetry `X ⊗ Y → Y ⊗ X` with `|X| = left`, `|Y| = right`.
    fn swap(left: usize, right: usize) -> Self;

    fn copy(n: usize) -> Self;
    fn discard(n: usize) -> Self;
    fn compare(n: usize) -> Self;
    fn cap(n: usize) -> Self;

    /// The codiscard `I → X`; only relations have one.
    fn unit(_n: usize) -> Result<Self> {
        Err(Error::Unsupported {
            what: "unit",
            backend: Self::BACKEND,
        })
    }

    /// Largest entrywise defect between two parallel morphisms. Exact
    /// backends report `0.0` or `1.0`.
    fn residual(&self, other: &Self) -> Result<f64>;

    fn approx_eq(&self, other: &Self, tol: Tolerance) -> Result<bool> {
        Ok(self.residual(other)? <= tol.value())
    }

    /// Reads a `1 × 1` morphism as a scalar.
    fn scalar_value(&self) -> Option<ScalarValue>;

    fn from_payload(name: &str, generator: &Generator, dom: usize, cod: usize) -> Result<Self>;

    fn to_json(&self) -> serde_json::Value;

    fn is_deterministic(&self, tol: Tolerance) -> bool {
        commutes_with_copy(self, tol)
    }

    fn is_total(&self, tol: Tolerance) -> bool {
        commutes_with_discard(self, tol)
    }

    fn is_quasi_total(&self, tol: Tolerance) -> bool {
        restricts_itself(self, tol)
    }
}

/// `f ; δ = δ ; (f ⊗ f)`.
pub fn commutes_with_copy<M: Morphism>(f: &M, tol: Tolerance) -> bool {
    let lhs = f.then(&M::copy(f.cod())).expect("copy matches codomain");
    let rhs = M::copy(f.dom())
        .then(&f.tensor(f))
        .expect("copy matches domain");
    lhs.approx_eq(&rhs, tol).unwrap_or(false)
}

/// `f ; ε = ε`.
pub fn commutes_with_discard<M: Morphism>(f: &M, tol: Tolerance) -> bool {
    let lhs = f.then(&M::discard(f.cod())).expect("discard matches codomain");
    lhs.approx_eq(&M::discard(f.dom()), tol).unwrap_or(false)
}

/// `f ⪯ f`, i.e. `f = δ ; (f ⊗ (f ; ε))`.
pub fn restricts_itself<M: Morphism>(f: &M, tol: Tolerance) -> bool {
    crate::order::restriction_leq(f, f, tol)
        .map(|v| v.holds)
        .unwrap_or(false)
}

/// `f ; ε`.
pub fn domain_effect<M: Morphism>(f: &M) -> M {
    f.then(&M::discard(f.cod())).expect("discard matches codomain")
}

pub(crate) fn check_parallel<M: Morphism>(context: &'static str, f: &M, g: &M) -> Result<()> {
    if f.dom() != g.dom() {
        return Err(Error::dims(context, f.dom(), g.dom()));
    }
    if f.cod() != g.cod() {
        return Err(Error::dims(context, f.cod(), g.cod()));
    }
    Ok(())
}
