//! Inequalities between diagrams and cancellation by scalars.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{card, expect, inputs, run_laws, Law, LawBackend, LawReport, Outcome, Suite, SuiteConfig};
use crate::error::{Error, Result};
use crate::finstoch::SubKernel;
use crate::inference::{bayes_invert, cond_compose};
use crate::morphism::{Backend, Morphism, ScalarValue, Tolerance};
use crate::order::{conditional_leq, ConditionalOrder};
use crate::random::Random;

/// Both sides of an inequality `lhs ⊑ rhs` and the verdict.
#[derive(Clone, Debug)]
pub struct InequalityCheck<M> {
    pub lhs: M,
    pub rhs: M,
    pub holds: bool,
    /// The two sides are equal up to tolerance.
    pub equal: bool,
    pub residual: f64,
}

fn inequality<M: ConditionalOrder>(lhs: M, rhs: M, tol: Tolerance) -> Result<InequalityCheck<M>> {
    let v = conditional_leq(&lhs, &rhs, tol)?;
    let equal = lhs.approx_eq(&rhs, tol)?;
    Ok(InequalityCheck {
        holds: v.holds,
        equal,
        residual: v.residual,
        lhs,
        rhs,
    })
}

/// `(u ; v)² ⊑ u ; δ ; (v ⊗ v) ; μ` with squares read as
/// `δ ; (k ⊗ k) ; μ`.
fn squared<M: Morphism>(k: &M) -> Result<M> {
    M::copy(k.dom()).then(&k.tensor(k))?.then(&M::compare(k.cod()))
}

/// `u ; δ ; (v ⊗ w) ; μ`, the pointwise second moment of `v` and `w`
/// averaged through `u`.
fn averaged_product<M: Morphism>(u: &M, v: &M, w: &M) -> Result<M> {
    u.then(&M::copy(u.cod()))?.then(&v.tensor(w))
}

/// For `h : X → A`, `f : A → Y`, `g : A → Z`, with `K = h ; δ ; (f ⊗ g)`:
///
/// ```text
/// δ ; (K ⊗ K) ; μ  ⊑  δ ; ((h ; δ ; (f ⊗ f) ; μ) ⊗ (h ; δ ; (g ⊗ g) ; μ))
/// ```
pub fn check_cauchy_schwarz<M: ConditionalOrder>(h: &M, f: &M, g: &M, tol: Tolerance) -> Result<InequalityCheck<M>> {
    if h.cod() != f.dom() {
        return Err(Error::dims("cauchy-schwarz", h.cod(), f.dom()));
    }
    if h.cod() != g.dom() {
        return Err(Error::dims("cauchy-schwarz", h.cod(), g.dom()));
    }
    let k = averaged_product(h, f, g)?;
    let lhs = squared(&k)?;
    let ff = averaged_product(h, f, f)?.then(&M::compare(f.cod()))?;
    let gg = averaged_product(h, g, g)?.then(&M::compare(g.cod()))?;
    let rhs = M::copy(h.dom()).then(&ff.tensor(&gg))?;
    inequality(lhs, rhs, tol)
}

/// For `u : X → A`, `v : A → Y`: `δ ; ((u;v) ⊗ (u;v)) ; μ ⊑ u ; δ ; (v ⊗ v) ; μ`.
pub fn check_means<M: ConditionalOrder>(u: &M, v: &M, tol: Tolerance) -> Result<InequalityCheck<M>> {
    if u.cod() != v.dom() {
        return Err(Error::dims("means inequality", u.cod(), v.dom()));
    }
    let lhs = squared(&u.then(v)?)?;
    let rhs = averaged_product(u, v, v)?.then(&M::compare(v.cod()))?;
    inequality(lhs, rhs, tol)
}

/// Direct evaluation of both sides of the kernel Cauchy–Schwarz inequality,
/// indexed by `(x, (y, z))`.
pub fn cauchy_schwarz_numeric(h: &SubKernel, f: &SubKernel, g: &SubKernel) -> (SubKernel, SubKernel) {
    let (nx, na, ny, nz) = (h.dom(), h.cod(), f.cod(), g.cod());
    let lhs = SubKernel::from_fn(nx, ny * nz, |x, yz| {
        let (y, z) = (yz / nz, yz % nz);
        let s: f64 = (0..na).map(|a| h.get(x, a) * f.get(a, y) * g.get(a, z)).sum();
        s * s
    });
    let rhs = SubKernel::from_fn(nx, ny * nz, |x, yz| {
        let (y, z) = (yz / nz, yz % nz);
        let sf: f64 = (0..na).map(|a| h.get(x, a) * f.get(a, y).powi(2)).sum();
        let sg: f64 = (0..na).map(|a| h.get(x, a) * g.get(a, z).powi(2)).sum();
        sf * sg
    });
    (lhs, rhs)
}

/// Direct evaluation of both sides of the weighted means inequality.
pub fn means_numeric(u: &SubKernel, v: &SubKernel) -> (SubKernel, SubKernel) {
    let (nx, na, ny) = (u.dom(), u.cod(), v.cod());
    let lhs = SubKernel::from_fn(nx, ny, |x, y| {
        let s: f64 = (0..na).map(|a| u.get(x, a) * v.get(a, y)).sum();
        s * s
    });
    let rhs = SubKernel::from_fn(nx, ny, |x, y| (0..na).map(|a| u.get(x, a) * v.get(a, y).powi(2)).sum());
    (lhs, rhs)
}

fn numeric_leq(lhs: &SubKernel, rhs: &SubKernel, tol: Tolerance) -> bool {
    lhs.entries().iter().zip(rhs.entries()).all(|(l, r)| *l <= r + tol.value())
}

/// The scalar `σ ; p`.
pub fn validity<M: Morphism>(sigma: &M, p: &M) -> Result<ScalarValue> {
    if sigma.dom() != 1 {
        return Err(Error::dims("validity prior domain", 1, sigma.dom()));
    }
    if p.cod() != 1 {
        return Err(Error::dims("validity predicate codomain", 1, p.cod()));
    }
    let s = sigma.then(p)?;
    Ok(s.scalar_value().expect("composite is a scalar"))
}

#[derive(Clone, Debug)]
pub struct ValidityReport<M> {
    pub prior_validity: ScalarValue,
    /// The updated state `p†_σ : I → X`.
    pub posterior: M,
    pub posterior_validity: ScalarValue,
    pub holds: bool,
    /// The prior validity is a zero scalar, so the update says nothing.
    pub degenerate: bool,
}

impl<M: Morphism> ValidityReport<M> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "prior_validity": self.prior_validity,
            "posterior": self.posterior.to_json(),
            "posterior_validity": self.posterior_validity,
            "holds": self.holds,
            "degenerate": self.degenerate,
        })
    }
}

/// Compares `σ ; p` with `p†_σ ; p`.
pub fn check_validity_increase<M: crate::inference::Conditionals>(
    sigma: &M,
    p: &M,
    tol: Tolerance,
) -> Result<ValidityReport<M>> {
    let prior = validity(sigma, p)?;
    let posterior = bayes_invert(p, sigma, tol)?;
    let prior_m = sigma.then(p)?;
    let post_m = posterior.then(p)?;
    let posterior_validity = post_m.scalar_value().expect("scalar");
    Ok(ValidityReport {
        prior_validity: prior,
        holds: conditional_leq(&prior_m, &post_m, tol)?.holds,
        degenerate: prior.is_zero(tol),
        posterior,
        posterior_validity,
    })
}

/// Closed-form test for the zero scalar of each backend.
pub fn is_zero_scalar<M: Morphism>(s: &M, tol: Tolerance) -> Result<bool> {
    s.scalar_value()
        .map(|v| v.is_zero(tol))
        .ok_or_else(|| Error::InvalidMorphism(format!("expected a scalar, got {}×{}", s.dom(), s.cod())))
}

/// Tests `s ⊗ f = s ⊗ g` on `samples` random pairs.
pub fn is_zero_scalar_sampled<M: Random>(
    s: &M,
    samples: usize,
    rng: &mut ChaCha8Rng,
    tol: Tolerance,
) -> Result<bool> {
    is_zero_scalar(s, tol)?;
    for _ in 0..samples {
        let (a, b) = (rng.gen_range(1..=3), rng.gen_range(1..=3));
        let f = M::random(a, b, rng);
        let mut g = M::random(a, b, rng);
        while g.approx_eq(&f, tol)? {
            g = M::random(a, b, rng);
        }
        if !s.tensor(&f).approx_eq(&s.tensor(&g), tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Laws for a fixed scalar: cancellation of equations and of `⊑`.
fn cancellation_laws<M: LawBackend>(s: Option<M>, cfg: &SuiteConfig) -> Vec<Law> {
    let (max, tol) = (cfg.max_card, cfg.tol);
    let pick = move |rng: &mut ChaCha8Rng| s.clone().unwrap_or_else(|| M::random_nonzero_scalar(rng));
    let pick2 = pick.clone();
    vec![
        Law::random("cancellation", move |rng| {
            let s = pick(rng);
            if is_zero_scalar(&s, tol)? {
                return Ok(Outcome::Vacuous);
            }
            let f = M::random(card(rng, max), card(rng, max), rng);
            let g = if rng.gen_bool(0.5) { f.clone() } else { M::random(f.dom(), f.cod(), rng) };
            if !s.tensor(&f).approx_eq(&s.tensor(&g), tol)? {
                return Ok(Outcome::Vacuous);
            }
            let scaled = Tolerance::new(tol.value() / s.scalar_value().expect("scalar").as_f64())?;
            Ok(expect(f.approx_eq(&g, scaled)?, "s ⊗ f = s ⊗ g but f ≠ g", &[("s", &s), ("f", &f), ("g", &g)]))
        }),
        Law::random("cancellation of the conditional preorder", move |rng| {
            let s = pick2(rng);
            if is_zero_scalar(&s, tol)? {
                return Ok(Outcome::Vacuous);
            }
            let g = M::random(card(rng, max), card(rng, max), rng);
            let f = if rng.gen_bool(0.75) {
                cond_compose(&g, &M::random(g.cod() * g.dom(), 1, rng))?
            } else {
                M::random(g.dom(), g.cod(), rng)
            };
            let named = [("s", &s), ("f", &f), ("g", &g)];
            let scaled = conditional_leq(&s.tensor(&f), &s.tensor(&g), tol)?;
            let Some(r) = scaled.witness else {
                return Ok(Outcome::Vacuous);
            };
            let loose = Tolerance::new(tol.value() / s.scalar_value().expect("scalar").as_f64())?;
            let recomposed = cond_compose(&g, &r)?;
            let residual = f.residual(&recomposed)?;
            if residual > loose.value() {
                return Ok(Outcome::fail(inputs(&named), f.to_json(), recomposed.to_json(), residual, Some("witness does not cancel".into())));
            }
            Ok(expect(conditional_leq(&f, &g, loose)?.holds, "f ⋢ g after cancelling s", &named))
        }),
    ]
}

/// Cancellation laws for one scalar, as a report.
pub fn check_cancellative<M: LawBackend>(s: &M, trials: usize, seed: u64) -> Result<LawReport> {
    is_zero_scalar(s, Tolerance::DEFAULT)?;
    let cfg = SuiteConfig::new(trials, seed);
    cfg.validate()?;
    let laws = cancellation_laws(Some(s.clone()), &cfg);
    Ok(run_laws(Suite::Cancellative, M::BACKEND, &laws, &cfg))
}

pub(super) fn cancellative<M: LawBackend>(cfg: &SuiteConfig) -> Vec<Law> {
    let tol = cfg.tol;
    let mut laws = vec![Law::random("zero scalars: closed form matches sampling", move |rng| {
        let s = M::random_scalar(rng);
        let closed = is_zero_scalar(&s, tol)?;
        let sampled = is_zero_scalar_sampled(&s, 8, rng, tol)?;
        Ok(expect(closed == sampled, "closed form and sampling disagree", &[("s", &s)]))
    })];
    laws.extend(cancellation_laws::<M>(None, cfg));
    laws
}

fn inequality_outcome<M: LawBackend>(named: &[(&str, &M)], c: &InequalityCheck<M>, exact: bool) -> Outcome {
    if c.holds && (!exact || c.equal) {
        Outcome::pass(c.residual)
    } else {
        let message = if c.holds { "sides differ where equality is expected" } else { "inequality fails" };
        Outcome::fail(inputs(named), c.lhs.to_json(), c.rhs.to_json(), c.residual, Some(message.into()))
    }
}

/// Checks the diagrammatic verdict against a direct numeric evaluation.
fn agrees<M: LawBackend>(
    named: &[(&str, &M)],
    c: &InequalityCheck<M>,
    numeric: (SubKernel, SubKernel),
    tol: Tolerance,
) -> Result<Outcome> {
    let (lhs, rhs) = (c.lhs.as_kernel().expect("kernel"), c.rhs.as_kernel().expect("kernel"));
    let drift = lhs.residual(&numeric.0)?.max(rhs.residual(&numeric.1)?);
    let same_verdict = numeric_leq(&numeric.0, &numeric.1, tol) == c.holds;
    Ok(if same_verdict && drift <= 1e-12 {
        Outcome::pass(drift)
    } else {
        Outcome::fail(inputs(named), numeric.0.to_json(), numeric.1.to_json(), drift, Some("diagram and formula disagree".into()))
    })
}

pub(super) fn cauchy_schwarz<M: LawBackend>(cfg: &SuiteConfig) -> Vec<Law> {
    let (max, tol) = (cfg.max_card, cfg.tol);
    let exact = M::BACKEND == Backend::Par;
    let mut laws = vec![Law::random("cauchy-schwarz", move |rng| {
        let (x, a, y, z) = (card(rng, max), card(rng, max), card(rng, max), card(rng, max));
        let (h, f, g) = (M::random(x, a, rng), M::random(a, y, rng), M::random(a, z, rng));
        let named = [("h", &h), ("f", &f), ("g", &g)];
        let c = check_cauchy_schwarz(&h, &f, &g, tol)?;
        let verdict = inequality_outcome(&named, &c, exact);
        match h.as_kernel() {
            Some(hk) => {
                let numeric = cauchy_schwarz_numeric(hk, f.as_kernel().expect("kernel"), g.as_kernel().expect("kernel"));
                Ok(verdict.and(agrees(&named, &c, numeric, tol)?))
            }
            None => Ok(verdict),
        }
    })];
    if M::BACKEND == Backend::FinStoch {
        laws.push(Law::fixed("orthogonal effects", move || {
            let h = SubKernel::state(&[0.5, 0.5])?;
            let (f, g) = (SubKernel::effect(&[1.0, 0.0])?, SubKernel::effect(&[0.0, 1.0])?);
            let c = check_cauchy_schwarz(&h, &f, &g, tol)?;
            let want = (c.lhs.get(0, 0) - 0.0).abs() < 1e-12 && (c.rhs.get(0, 0) - 0.25).abs() < 1e-12;
            Ok(expect(c.holds && want, "expected 0 ≤ 0.25", &[("h", &h), ("f", &f), ("g", &g)]))
        }));
        laws.push(Law::fixed("equal effects attain equality", move || {
            let h = SubKernel::state(&[0.5, 0.5])?;
            let f = SubKernel::effect(&[1.0, 0.0])?;
            let c = check_cauchy_schwarz(&h, &f, &f, tol)?;
            let want = (c.lhs.get(0, 0) - 0.25).abs() < 1e-12 && c.equal;
            Ok(expect(c.holds && want, "expected 0.25 = 0.25", &[("h", &h), ("f", &f)]))
        }));
    }
    laws
}

pub(super) fn means<M: LawBackend>(cfg: &SuiteConfig) -> Vec<Law> {
    let (max, tol) = (cfg.max_card, cfg.tol);
    let exact = M::BACKEND == Backend::Par;
    let check = move |rng: &mut ChaCha8Rng, x: usize, y: usize| -> Result<Outcome> {
        let a = card(rng, max);
        let (u, v) = (M::random(x, a, rng), M::random(a, y, rng));
        let named = [("u", &u), ("v", &v)];
        let c = check_means(&u, &v, tol)?;
        let verdict = inequality_outcome(&named, &c, exact);
        match u.as_kernel() {
            Some(uk) => Ok(verdict.and(agrees(&named, &c, means_numeric(uk, v.as_kernel().expect("kernel")), tol)?)),
            None => Ok(verdict),
        }
    };
    let mut laws = vec![
        Law::random("means", move |rng| {
            let (x, y) = (card(rng, max), card(rng, max));
            check(rng, x, y)
        }),
        Law::random("squared expectation below expected square", move |rng| check(rng, 1, 1)),
    ];
    if M::BACKEND == Backend::FinStoch {
        laws.push(Law::fixed("expectation example", move || {
            let sigma = SubKernel::state(&[0.5, 0.5])?;
            let p = SubKernel::effect(&[0.8, 0.4])?;
            let c = check_means(&sigma, &p, tol)?;
            let want = (c.lhs.get(0, 0) - 0.36).abs() < 1e-12 && (c.rhs.get(0, 0) - 0.4).abs() < 1e-12;
            Ok(expect(c.holds && want, "expected 0.36 ≤ 0.4", &[("sigma", &sigma), ("p", &p)]))
        }));
    }
    laws
}

fn validity_outcome<M: LawBackend>(sigma: &M, p: &M, tol: Tolerance) -> Result<Outcome> {
    let report = check_validity_increase(sigma, p, tol)?;
    Ok(if report.degenerate {
        Outcome::Vacuous
    } else if report.holds {
        Outcome::pass(0.0)
    } else {
        Outcome::fail(
            inputs(&[("sigma", sigma), ("p", p)]),
            serde_json::json!(report.prior_validity),
            serde_json::json!(report.posterior_validity),
            report.prior_validity.as_f64() - report.posterior_validity.as_f64(),
            Some("posterior validity decreased".into()),
        )
    })
}

pub(super) fn validity_suite<M: LawBackend>(cfg: &SuiteConfig) -> Vec<Law> {
    let (max, tol) = (cfg.max_card, cfg.tol);
    let mut laws = vec![
        Law::random("validity increase", move |rng| {
            let n = card(rng, max);
            let (sigma, p) = (M::random(1, n, rng), M::random(n, 1, rng));
            validity_outcome(&sigma, &p, tol)
        }),
        Law::random("validity increase, deterministic evidence", move |rng| {
            let n = card(rng, max);
            let (sigma, p) = (M::random(1, n, rng), M::random_deterministic(n, 1, rng));
            validity_outcome(&sigma, &p, tol)
        }),
        Law::random("validity increase, full prior", move |rng| {
            let n = card(rng, max);
            let sigma = M::random_quasi_total(1, n, rng);
            let p = M::random(n, 1, rng);
            validity_outcome(&sigma, &p, tol)
        }),
    ];
    if M::BACKEND == Backend::FinStoch {
        let fixed = |name, p: [f64; 2], prior: f64, post: f64| {
            Law::fixed(name, move || {
                let sigma = SubKernel::state(&[0.5, 0.5])?;
                let p = SubKernel::effect(&p)?;
                let r = check_validity_increase(&sigma, &p, Tolerance::DEFAULT)?;
                let ok = r.holds
                    && (r.prior_validity.as_f64() - prior).abs() <= 1e-9
                    && (r.posterior_validity.as_f64() - post).abs() <= 1e-9;
                Ok(expect(ok, "fixed validity case not reproduced", &[("sigma", &sigma), ("p", &p)]))
            })
        };
        laws.push(fixed("sharp evidence example", [1.0, 0.0], 0.5, 1.0));
        laws.push(fixed("fuzzy evidence example", [0.8, 0.4], 0.6, 2.0 / 3.0));
    }
    laws
}
