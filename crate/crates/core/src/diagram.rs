//! Typed string-diagram terms over a signature of finite base objects and
//! generators, and the typechecker assigning each term a domain and
//! codomain word.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::discrete::{FinRel, PartialFn};
use crate::error::{Error, Result};
use crate::finstoch::SubKernel;
use crate::morphism::Morphism;

/// A tensor word of base-object names. The empty word is the unit `I`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObjectType(Vec<String>);

impl ObjectType {
    pub fn unit() -> Self {
        ObjectType(Vec::new())
    }

    pub fn new<I, S>(names: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ObjectType(names.into_iter().map(Into::into).collect())
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &ObjectType) -> ObjectType {
        let mut names = self.0.clone();
        names.extend(other.0.iter().cloned());
        ObjectType(names)
    }

    /// Splits the word after its first `k` factors.
    pub fn split_at(&self, k: usize) -> Option<(ObjectType, ObjectType)> {
        (k <= self.0.len()).then(|| {
            let (a, b) = self.0.split_at(k);
            (ObjectType(a.to_vec()), ObjectType(b.to_vec()))
        })
    }

    /// Cardinalities of each factor.
    pub fn cards(&self, sig: &Signature) -> Result<Vec<usize>> {
        self.0.iter().map(|n| sig.object(n)).collect()
    }

    /// Product of the factor cardinalities; `1` for the empty word.
    pub fn cardinality(&self, sig: &Signature) -> Result<usize> {
        Ok(self.cards(sig)?.iter().product())
    }
}

impl fmt::Display for ObjectType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.0.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DiagramTerm {
    Gen(String),
    Id(ObjectType),
    Seq(Box<DiagramTerm>, Box<DiagramTerm>),
    Par(Box<DiagramTerm>, Box<DiagramTerm>),
    Swap(ObjectType, ObjectType),
    Copy(ObjectType),
    Discard(ObjectType),
    Compare(ObjectType),
    Cap(ObjectType),
    Unit(ObjectType),
}

impl DiagramTerm {
    pub fn gen(name: impl Into<String>) -> Self {
        DiagramTerm::Gen(name.into())
    }

    pub fn seq(left: DiagramTerm, right: DiagramTerm) -> Self {
        DiagramTerm::Seq(Box::new(left), Box::new(right))
    }

    pub fn par(left: DiagramTerm, right: DiagramTerm) -> Self {
        DiagramTerm::Par(Box::new(left), Box::new(right))
    }

    /// Generator names in left-to-right order, with repetition.
    pub fn generators(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_generators(&mut out);
        out
    }

    fn collect_generators<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            DiagramTerm::Gen(n) => out.push(n),
            DiagramTerm::Seq(a, b) | DiagramTerm::Par(a, b) => {
                a.collect_generators(out);
                b.collect_generators(out);
            }
            _ => {}
        }
    }
}

/// A generating morphism with optional payloads for each backend.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Generator {
    pub dom: ObjectType,
    pub cod: ObjectType,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub finstoch: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub par: Option<Vec<Option<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rel: Option<Vec<Vec<bool>>>,
}

impl Generator {
    pub fn new(dom: ObjectType, cod: ObjectType) -> Self {
        Generator {
            dom,
            cod,
            ..Generator::default()
        }
    }
}

/// Base objects with their cardinalities, and typed generators.
///
/// Payloads are checked against the declared types and the backend
/// invariants whenever a generator is added.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSignature")]
pub struct Signature {
    objects: BTreeMap<String, usize>,
    #[serde(default)]
    generators: BTreeMap<String, Generator>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSignature {
    objects: BTreeMap<String, usize>,
    #[serde(default)]
    generators: BTreeMap<String, Generator>,
}

impl TryFrom<RawSignature> for Signature {
    type Error = Error;

    fn try_from(raw: RawSignature) -> Result<Self> {
        let mut sig = Signature {
            objects: raw.objects,
            generators: BTreeMap::new(),
        };
        for (name, generator) in raw.generators {
            sig.add_generator(name, generator)?;
        }
        Ok(sig)
    }
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSignature =
            serde_json::from_str(text).map_err(|e| Error::InvalidSignature(e.to_string()))?;
        Signature::try_from(raw)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidSignature(format!("{}: {e}", path.display())))?;
        Signature::from_json(&text)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("signature serializes")
    }

    pub fn add_object(&mut self, name: impl Into<String>, cardinality: usize) -> &mut Self {
        self.objects.insert(name.into(), cardinality);
        self
    }

    pub fn add_generator(&mut self, name: impl Into<String>, generator: Generator) -> Result<&mut Self> {
        let name = name.into();
        let dom = generator.dom.cardinality(self)?;
        let cod = generator.cod.cardinality(self)?;
        if generator.finstoch.is_some() {
            SubKernel::from_payload(&name, &generator, dom, cod)?;
        }
        if generator.par.is_some() {
            PartialFn::from_payload(&name, &generator, dom, cod)?;
        }
        if generator.rel.is_some() {
            FinRel::from_payload(&name, &generator, dom, cod)?;
        }
        self.generators.insert(name, generator);
        Ok(self)
    }

    pub fn object(&self, name: &str) -> Result<usize> {
        self.objects
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownObject { name: name.to_string() })
    }

    pub fn generator(&self, name: &str) -> Result<&Generator> {
        self.generators.get(name).ok_or_else(|| Error::UnknownGenerator {
            name: name.to_string(),
            span: None,
        })
    }

    pub fn has_generator(&self, name: &str) -> bool {
        self.generators.contains_key(name)
    }

    pub fn objects(&self) -> impl Iterator<Item = (&str, usize)> {
        self.objects.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn generators(&self) -> impl Iterator<Item = (&str, &Generator)> {
        self.generators.iter().map(|(k, v)| (k.as_str(), v))
    }
}

/// Computes the domain and codomain of `term`.
pub fn typecheck(term: &DiagramTerm, sig: &Signature) -> Result<(ObjectType, ObjectType)> {
    let mut path = vec!["root"];
    check(term, sig, &mut path)
}

fn check_word(word: &ObjectType, sig: &Signature) -> Result<()> {
    word.cards(sig).map(|_| ())
}

fn check(
    term: &DiagramTerm,
    sig: &Signature,
    path: &mut Vec<&'static str>,
) -> Result<(ObjectType, ObjectType)> {
    use DiagramTerm::*;
    match term {
        Gen(name) => {
            let g = sig.generator(name)?;
            Ok((g.dom.clone(), g.cod.clone()))
        }
        Id(x) => {
            check_word(x, sig)?;
            Ok((x.clone(), x.clone()))
        }
        Seq(a, b) => {
            path.push("left");
            let (dom, mid) = check(a, sig, path)?;
            path.pop();
            path.push("right");
            let (mid2, cod) = check(b, sig, path)?;
            path.pop();
            if mid != mid2 {
                return Err(Error::TypeMismatch {
                    path: path.join("."),
                    left: mid,
                    right: mid2,
                });
            }
            Ok((dom, cod))
        }
        Par(a, b) => {
            path.push("left");
            let (d1, c1) = check(a, sig, path)?;
            path.pop();
            path.push("right");
            let (d2, c2) = check(b, sig, path)?;
            path.pop();
            Ok((d1.concat(&d2), c1.concat(&c2)))
        }
        Swap(x, y) => {
            check_word(x, sig)?;
            check_word(y, sig)?;
            Ok((x.concat(y), y.concat(x)))
        }
        Copy(x) => {
            check_word(x, sig)?;
            Ok((x.clone(), x.concat(x)))
        }
        Discard(x) => {
            check_word(x, sig)?;
            Ok((x.clone(), ObjectType::unit()))
        }
        Compare(x) => {
            check_word(x, sig)?;
            Ok((x.concat(x), x.clone()))
        }
        Cap(x) => {
            check_word(x, sig)?;
            Ok((x.concat(x), ObjectType::unit()))
        }
        Unit(x) => {
            check_word(x, sig)?;
            Ok((ObjectType::unit(), x.clone()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig() -> Signature {
        let mut sig = Signature::new();
        sig.add_object("X", 2).add_object("Y", 3);
        sig.add_generator("f", Generator::new(ObjectType::new(["X"]), ObjectType::new(["Y"])))
            .unwrap();
        sig
    }

    fn w(names: &[&str]) -> ObjectType {
        ObjectType::new(names.iter().copied())
    }

    #[test]
    fn identity_types() {
        let sig = sig();
        assert_eq!(typecheck(&DiagramTerm::Id(w(&["X"])), &sig).unwrap(), (w(&["X"]), w(&["X"])));
    }

    #[test]
    fn discard_after_generator() {
        let sig = sig();
        let t = DiagramTerm::seq(DiagramTerm::gen("f"), DiagramTerm::Discard(w(&["Y"])));
        assert_eq!(typecheck(&t, &sig).unwrap(), (w(&["X"]), ObjectType::unit()));
    }

    #[test]
    fn mismatched_sequence_reports_path() {
        let sig = sig();
        let t = DiagramTerm::par(
            DiagramTerm::Id(w(&[])),
            DiagramTerm::seq(DiagramTerm::gen("f"), DiagramTerm::gen("f")),
        );
        match typecheck(&t, &sig) {
            Err(Error::TypeMismatch { path, left, right }) => {
                assert_eq!(path, "root.right");
                assert_eq!(left, w(&["Y"]));
                assert_eq!(right, w(&["X"]));
            }
            other => panic!("expected type mismatch, got {other:?}"),
        }
    }

    #[test]
    fn structural_types() {
        let sig = sig();
        let xy = w(&["X", "Y"]);
        let xyxy = xy.concat(&xy);
        assert_eq!(typecheck(&DiagramTerm::Copy(xy.clone()), &sig).unwrap(), (xy.clone(), xyxy.clone()));
        assert_eq!(typecheck(&DiagramTerm::Compare(xy.clone()), &sig).unwrap(), (xyxy.clone(), xy.clone()));
        assert_eq!(typecheck(&DiagramTerm::Cap(xy.clone()), &sig).unwrap(), (xyxy, ObjectType::unit()));
        assert_eq!(typecheck(&DiagramTerm::Unit(xy.clone()), &sig).unwrap(), (ObjectType::unit(), xy));
        assert_eq!(
            typecheck(&DiagramTerm::Swap(w(&["X"]), w(&["Y"])), &sig).unwrap(),
            (w(&["X", "Y"]), w(&["Y", "X"]))
        );
    }

    #[test]
    fn unknown_names() {
        let sig = sig();
        assert!(matches!(
            typecheck(&DiagramTerm::gen("g"), &sig),
            Err(Error::UnknownGenerator { .. })
        ));
        assert!(matches!(
            typecheck(&DiagramTerm::Copy(w(&["Z"])), &sig),
            Err(Error::UnknownObject { .. })
        ));
    }

    #[test]
    fn cardinality_of_words() {
        let sig = sig();
        assert_eq!(ObjectType::unit().cardinality(&sig).unwrap(), 1);
        assert_eq!(w(&["X", "Y", "X"]).cardinality(&sig).unwrap(), 12);
    }

    #[test]
    fn signature_json_rejects_bad_payloads() {
        let ok = r#"{"objects": {"X": 2}, "generators": {"s": {"dom": [], "cod": ["X"], "finstoch": [[0.5, 0.5]], "par": [1], "rel": [[true, true]]}}}"#;
        assert!(Signature::from_json(ok).is_ok());
        let too_much_mass = r#"{"objects": {"X": 2}, "generators": {"s": {"dom": [], "cod": ["X"], "finstoch": [[0.7, 0.5]]}}}"#;
        assert!(matches!(Signature::from_json(too_much_mass), Err(Error::InvalidPayload { .. })));
        let wrong_shape = r#"{"objects": {"X": 2}, "generators": {"s": {"dom": [], "cod": ["X"], "rel": [[true]]}}}"#;
        assert!(Signature::from_json(wrong_shape).is_err());
        let bad_index = r#"{"objects": {"X": 2}, "generators": {"s": {"dom": [], "cod": ["X"], "par": [2]}}}"#;
        assert!(Signature::from_json(bad_index).is_err());
        let unknown_object = r#"{"objects": {"X": 2}, "generators": {"s": {"dom": ["Q"], "cod": []}}}"#;
        assert!(Signature::from_json(unknown_object).is_err());
    }
}
