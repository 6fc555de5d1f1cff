//! Conditionals, Bayesian inverses and least conditionals.

use rand_chacha::ChaCha8Rng;

use super::{card, expect, expect_eq, inputs, Law, LawBackend, Outcome, SuiteConfig};
use crate::error::Result;
use crate::inference::{bayes_invert, is_conditional, is_least_conditional_sample};
use crate::morphism::Tolerance;
use crate::order::restriction_leq;
use rand::Rng;

/// A random conditional of `δ_n` drawn by the backend sampler.
fn copy_conditional<M: LawBackend>(n: usize, tol: Tolerance, rng: &mut ChaCha8Rng) -> Result<M> {
    M::sample_conditional(&M::copy(n), (n, n), tol, rng)
}

fn restricted<M: LawBackend>(named: &[(&str, &M)], f: &M, g: &M, tol: Tolerance) -> Result<Outcome> {
    let v = restriction_leq(f, g, tol)?;
    Ok(if v.holds {
        Outcome::pass(v.residual)
    } else {
        Outcome::fail(inputs(named), f.to_json(), g.to_json(), v.residual, Some("not restriction-below".into()))
    })
}

pub(super) fn conditionals<M: LawBackend>(cfg: &SuiteConfig) -> Vec<Law> {
    let (max, tol) = (cfg.max_card, cfg.tol);
    let joint = move |rng: &mut ChaCha8Rng| {
        let (x, a, b) = (card(rng, max), card(rng, max), card(rng, max));
        (M::random(x, a * b, rng), (a, b))
    };
    vec![
        Law::random("canonical conditional recomposes", move |rng| {
            let (f, split) = joint(rng);
            let c = M::canonical_conditional(&f, split, tol)?;
            let ok = c.is_quasi_total(tol) && is_conditional(&c, &f, split, tol)?;
            Ok(expect(ok, "not a quasi-total conditional", &[("f", &f), ("c", &c)]))
        }),
        Law::random("sampled conditional recomposes", move |rng| {
            let (f, split) = joint(rng);
            let c = M::sample_conditional(&f, split, tol, rng)?;
            let ok = c.is_quasi_total(tol) && is_conditional(&c, &f, split, tol)?;
            Ok(expect(ok, "not a quasi-total conditional", &[("f", &f), ("c", &c)]))
        }),
        Law::random("bayesian inverse is a conditional", move |rng| {
            let (x, a, b) = (card(rng, max), card(rng, max), card(rng, max));
            let (f, g) = (M::random(x, a, rng), M::random(a, b, rng));
            let inv = bayes_invert(&g, &f, tol)?;
            let joint = f.then(&M::copy(a))?.then(&g.tensor(&M::identity(a)))?;
            let ok = is_conditional(&inv, &joint, (b, a), tol)?;
            Ok(expect(ok, "inverse does not recompose the joint", &[("f", &f), ("g", &g), ("inverse", &inv)]))
        }),
        Law::random("conditionals of copy undo it", move |rng| {
            let n = card(rng, max);
            let c = copy_conditional::<M>(n, tol, rng)?;
            expect_eq(&[("c", &c)], &M::copy(n).then(&c)?, &M::identity(n), tol)
        }),
        Law::random("discarded copy conditional conditions the identity", move |rng| {
            let n = card(rng, max);
            let c = copy_conditional::<M>(n, tol, rng)?;
            let d = c.then(&M::discard(n))?;
            let ok = is_conditional(&d, &M::identity(n), (n, 1), tol)?;
            let undo = M::copy(n).then(&d)?.approx_eq(&M::discard(n), tol)?;
            Ok(expect(ok && undo, "c ; del is not a conditional of id", &[("c", &c)]))
        }),
        Law::random("comparator is below every copy conditional", move |rng| {
            let n = card(rng, max);
            let c = copy_conditional::<M>(n, tol, rng)?;
            restricted(&[("c", &c)], &M::compare(n), &c, tol)
        }),
        Law::random("cap is below every identity conditional", move |rng| {
            let n = card(rng, max);
            let c = copy_conditional::<M>(n, tol, rng)?.then(&M::discard(n))?;
            restricted(&[("c", &c)], &M::cap(n), &c, tol)
        }),
        Law::random("canonical conditional is least among samples", move |rng| {
            let (f, split) = joint(rng);
            let c0 = M::canonical_conditional(&f, split, tol)?;
            let report = is_least_conditional_sample(&c0, &f, split, 4, rng.gen(), tol)?;
            Ok(if report.passed() {
                Outcome::pass(report.max_residual)
            } else {
                let detail = serde_json::to_value(&report).expect("report serializes");
                Outcome::fail(inputs(&[("f", &f), ("c0", &c0)]), detail, serde_json::Value::Null, report.max_residual, Some("a sampled conditional lies below c0".into()))
            })
        }),
        Law::random("least copy conditional yields caps", move |rng| {
            let n = card(rng, max);
            let mu0 = M::canonical_conditional(&M::copy(n), (n, n), tol)?;
            let cap0 = mu0.then(&M::discard(n))?;
            let named = [("mu0", &mu0), ("cap0", &cap0)];
            let commutative = M::swap(n, n).then(&cap0)?.approx_eq(&cap0, tol)?;
            let counit = M::copy(n).then(&cap0)?.approx_eq(&M::discard(n), tol)?;
            let frob_l = M::copy(n).tensor(&M::identity(n)).then(&M::identity(n).tensor(&cap0))?;
            let frob_r = M::identity(n).tensor(&M::copy(n)).then(&cap0.tensor(&M::identity(n)))?;
            let frobenius = frob_l.approx_eq(&frob_r, tol)?;
            let ok = commutative && counit && frobenius;
            Ok(expect(ok, "cap axioms fail", &named)
                .and(expect_eq(&named, &mu0, &M::compare(n), tol)?)
                .and(expect_eq(&named, &cap0, &M::cap(n), tol)?))
        }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::finstoch::SubKernel;
    use crate::morphism::Morphism;
    use crate::random::trial_rng;

    #[test]
    fn copy_conditionals_on_two_points() {
        let tol = Tolerance::DEFAULT;
        let mut rng = trial_rng(3, 0);
        for _ in 0..500 {
            let c: SubKernel = copy_conditional(2, tol, &mut rng).unwrap();
            assert!(restriction_leq(&SubKernel::compare(2), &c, tol).unwrap().holds);
        }
    }
}
