//! Conditionals and the Bayesian inverses built from them.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::discrete::{FinRel, PartialFn};
use crate::error::{Error, Result};
use crate::finstoch::SubKernel;
use crate::morphism::{Backend, Morphism, Tolerance};
use crate::order::{restriction_leq, ConditionalOrder};
use crate::random::{trial_rng, Random};

/// `f ◁ g = δ_X ; ((f ; δ_A) ⊗ id_X) ; (id_A ⊗ g)` for `f : X → A` and
/// `g : A ⊗ X → B`.
pub fn cond_compose<M: Morphism>(f: &M, g: &M) -> Result<M> {
    let (x, a) = (f.dom(), f.cod());
    if g.dom() != a * x {
        return Err(Error::dims("conditional composition", a * x, g.dom()));
    }
    M::copy(x)
        .then(&f.then(&M::copy(a))?.tensor(&M::identity(x)))?
        .then(&M::identity(a).tensor(g))
}

/// `f ; (id_A ⊗ ε_B)` for `f : X → A ⊗ B`.
pub fn marginal<M: Morphism>(f: &M, split: (usize, usize)) -> Result<M> {
    check_split(f, split)?;
    f.then(&M::identity(split.0).tensor(&M::discard(split.1)))
}

fn check_split<M: Morphism>(f: &M, (a, b): (usize, usize)) -> Result<()> {
    if f.cod() != a * b {
        return Err(Error::dims("joint codomain", a * b, f.cod()));
    }
    Ok(())
}

/// A joint `X → A ⊗ B` split as `marginal ◁ conditional`.
#[derive(Clone, Debug)]
pub struct JointFactorization<M> {
    /// `X → A`.
    pub marginal: M,
    /// `A ⊗ X → B`, quasi-total.
    pub conditional: M,
    pub backend: Backend,
}

impl<M: Morphism> JointFactorization<M> {
    pub fn recompose(&self) -> Result<M> {
        cond_compose(&self.marginal, &self.conditional)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "backend": self.backend,
            "marginal": self.marginal.to_json(),
            "conditional": self.conditional.to_json(),
        })
    }
}

/// Backends with conditionals.
pub trait Conditionals: ConditionalOrder + Random {
    /// The canonical conditional: normalization in kernels, the least
    /// conditional in partial functions and relations.
    fn canonical_conditional(f: &Self, split: (usize, usize), tol: Tolerance) -> Result<Self>;

    /// A random quasi-total conditional of `f`. Rows of `A ⊗ X` where the
    /// marginal is supported are forced by `f`; the rest are arbitrary.
    fn sample_conditional<R: Rng + ?Sized>(
        f: &Self,
        split: (usize, usize),
        tol: Tolerance,
        rng: &mut R,
    ) -> Result<Self>;
}

pub fn conditional<M: Conditionals>(
    f: &M,
    split: (usize, usize),
    tol: Tolerance,
) -> Result<JointFactorization<M>> {
    Ok(JointFactorization {
        marginal: marginal(f, split)?,
        conditional: M::canonical_conditional(f, split, tol)?,
        backend: M::BACKEND,
    })
}

/// The inverse `B ⊗ X → A` of `g : A → B` with respect to `f : X → A`: the
/// conditional of `f ; δ_A ; (g ⊗ id_A) : X → B ⊗ A`.
pub fn bayes_invert<M: Conditionals>(g: &M, f: &M, tol: Tolerance) -> Result<M> {
    if f.cod() != g.dom() {
        return Err(Error::dims("bayesian inversion", g.dom(), f.cod()));
    }
    let a = g.dom();
    let joint = f
        .then(&M::copy(a))?
        .then(&g.tensor(&M::identity(a)))?;
    Ok(conditional(&joint, (g.cod(), a), tol)?.conditional)
}

/// Whether `c : A ⊗ X → B` is a conditional of `f : X → A ⊗ B`.
pub fn is_conditional<M: Morphism>(c: &M, f: &M, split: (usize, usize), tol: Tolerance) -> Result<bool> {
    if !c.is_quasi_total(tol) {
        return Err(Error::NotQuasiTotal);
    }
    let (a, b) = split;
    if c.dom() != a * f.dom() {
        return Err(Error::dims("conditional domain", a * f.dom(), c.dom()));
    }
    if c.cod() != b {
        return Err(Error::dims("conditional codomain", b, c.cod()));
    }
    cond_compose(&marginal(f, split)?, c)?.approx_eq(f, tol)
}

#[derive(Clone, Debug, Serialize)]
pub struct LeastConditionalReport {
    pub trials: usize,
    /// Sampled conditionals `c` with `c0 ⪯ c` failing, by trial index.
    pub counterexamples: Vec<usize>,
    /// Samples that turned out not to be conditionals; a sampler bug.
    pub invalid_samples: Vec<usize>,
    pub max_residual: f64,
}

impl LeastConditionalReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty() && self.invalid_samples.is_empty()
    }
}

/// Samples `trials` conditionals `c` of `f` and checks `c0 ⪯ c` for each.
pub fn is_least_conditional_sample<M: Conditionals>(
    c0: &M,
    f: &M,
    split: (usize, usize),
    trials: usize,
    seed: u64,
    tol: Tolerance,
) -> Result<LeastConditionalReport> {
    if !c0.is_quasi_total(tol) {
        return Err(Error::NotQuasiTotal);
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|i| -> Result<(bool, bool, f64)> {
            let mut rng = trial_rng(seed, i as u64);
            let c = M::sample_conditional(f, split, tol, &mut rng)?;
            let valid = is_conditional(&c, f, split, tol)?;
            let v = restriction_leq(c0, &c, tol)?;
            Ok((valid, v.holds, v.residual))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut report = LeastConditionalReport {
        trials,
        counterexamples: Vec::new(),
        invalid_samples: Vec::new(),
        max_residual: 0.0,
    };
    for (i, (valid, holds, residual)) in outcomes.into_iter().enumerate() {
        if !valid {
            report.invalid_samples.push(i);
        }
        if holds {
            report.max_residual = report.max_residual.max(residual);
        } else {
            report.counterexamples.push(i);
        }
    }
    Ok(report)
}

impl Conditionals for SubKernel {
    /// `c(b | a, x) = f(a, b | x) / m(a | x)`, and a zero row where the
    /// marginal is at most `tol`.
    fn canonical_conditional(f: &Self, (na, nb): (usize, usize), tol: Tolerance) -> Result<Self> {
        let m = marginal(f, (na, nb))?;
        let nx = f.dom();
        Ok(SubKernel::from_fn(na * nx, nb, |i, b| {
            let (a, x) = (i / nx, i % nx);
            let mass = m.get(x, a);
            if mass > tol.value() {
                f.get(x, a * nb + b) / mass
            } else {
                0.0
            }
        }))
    }

    fn sample_conditional<R: Rng + ?Sized>(
        f: &Self,
        split: (usize, usize),
        tol: Tolerance,
        rng: &mut R,
    ) -> Result<Self> {
        let c0 = Self::canonical_conditional(f, split, tol)?;
        let m = marginal(f, split)?;
        let free = SubKernel::random_quasi_total(c0.dom(), c0.cod(), rng);
        let nx = f.dom();
        Ok(SubKernel::from_fn(c0.dom(), c0.cod(), |i, b| {
            if m.get(i % nx, i / nx) > tol.value() {
                c0.get(i, b)
            } else {
                free.get(i, b)
            }
        }))
    }
}

impl Conditionals for PartialFn {
    /// `c0(a, x) = b` when `f(x) = (a, b)`, undefined otherwise.
    fn canonical_conditional(f: &Self, (na, nb): (usize, usize), _tol: Tolerance) -> Result<Self> {
        check_split(f, (na, nb))?;
        let nx = f.dom();
        Ok(PartialFn::from_fn(na * nx, nb, |i| {
            let (a, x) = (i / nx, i % nx);
            f.apply(x).filter(|ab| ab / nb == a).map(|ab| ab % nb)
        }))
    }

    fn sample_conditional<R: Rng + ?Sized>(
        f: &Self,
        split: (usize, usize),
        tol: Tolerance,
        rng: &mut R,
    ) -> Result<Self> {
        let c0 = Self::canonical_conditional(f, split, tol)?;
        let free = PartialFn::random(c0.dom(), c0.cod(), rng);
        let nx = f.dom();
        let nb = split.1;
        Ok(PartialFn::from_fn(c0.dom(), c0.cod(), |i| {
            let (a, x) = (i / nx, i % nx);
            let supported = f.apply(x).is_some_and(|ab| ab / nb == a);
            if supported {
                c0.apply(i)
            } else {
                free.apply(i)
            }
        }))
    }
}

impl Conditionals for FinRel {
    /// `c0` relates `(a, x)` to `b` iff `f` relates `x` to `(a, b)`.
    fn canonical_conditional(f: &Self, (na, nb): (usize, usize), _tol: Tolerance) -> Result<Self> {
        check_split(f, (na, nb))?;
        let nx = f.dom();
        Ok(FinRel::from_fn(na * nx, nb, |i, b| {
            let (a, x) = (i / nx, i % nx);
            f.get(x, a * nb + b)
        }))
    }

    fn sample_conditional<R: Rng + ?Sized>(
        f: &Self,
        split: (usize, usize),
        tol: Tolerance,
        rng: &mut R,
    ) -> Result<Self> {
        let c0 = Self::canonical_conditional(f, split, tol)?;
        let m = marginal(f, split)?;
        let free = FinRel::random(c0.dom(), c0.cod(), rng);
        let nx = f.dom();
        Ok(FinRel::from_fn(c0.dom(), c0.cod(), |i, b| {
            if m.get(i % nx, i / nx) {
                c0.get(i, b)
            } else {
                free.get(i, b)
            }
        }))
    }
}
