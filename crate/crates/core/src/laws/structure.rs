//! Structural axioms and the relational appendix laws.

use rand_chacha::ChaCha8Rng;

use super::{card, expect, expect_eq, expect_leq, Law, LawBackend, SuiteConfig};
use crate::discrete::FinRel;
use crate::error::Result;
use crate::eval::{cap_on, compare_on, copy_on, discard_on, unit_on};
use crate::morphism::{Morphism, Tolerance};
use crate::order::restriction_leq;
use crate::random::Random;

fn id<M: Morphism>(n: usize) -> M {
    M::identity(n)
}

/// An equation between two structural morphisms on one object.
fn on_one<M: LawBackend>(
    name: &'static str,
    cfg: &SuiteConfig,
    sides: fn(usize) -> Result<(M, M)>,
) -> Law {
    let (max, tol) = (cfg.max_card, cfg.tol);
    Law::random(name, move |rng| {
        let n = card(rng, max);
        let (l, r) = sides(n)?;
        expect_eq::<M>(&[], &l, &r, tol)
    })
}

/// An inclusion `lhs ⊑ rhs` between morphisms built on one object.
fn on_one_leq<M: LawBackend>(
    name: &'static str,
    cfg: &SuiteConfig,
    sides: fn(usize) -> Result<(M, M)>,
) -> Law {
    let (max, tol) = (cfg.max_card, cfg.tol);
    Law::random(name, move |rng| {
        let n = card(rng, max);
        let (l, r) = sides(n)?;
        expect_leq::<M>(&[], &l, &r, tol)
    })
}

/// An equation on a word of two objects.
fn on_two<M: LawBackend>(
    name: &'static str,
    cfg: &SuiteConfig,
    sides: fn(usize, usize) -> Result<(M, M)>,
) -> Law {
    let (max, tol) = (cfg.max_card, cfg.tol);
    Law::random(name, move |rng| {
        let (n, m) = (card(rng, max), card(rng, max));
        let (l, r) = sides(n, m)?;
        expect_eq::<M>(&[], &l, &r, tol)
    })
}

fn random_pair<M: Random>(rng: &mut ChaCha8Rng, max: usize) -> (M, M) {
    let (a, b, c, d) = (card(rng, max), card(rng, max), card(rng, max), card(rng, max));
    (M::random(a, b, rng), M::random(c, d, rng))
}

pub(super) fn axioms<M: LawBackend>(cfg: &SuiteConfig) -> Vec<Law> {
    let (max, tol) = (cfg.max_card, cfg.tol);
    let mut laws = vec![
        // symmetric monoidal sanity
        Law::random("composition associative", move |rng| {
            let ns: Vec<usize> = (0..4).map(|_| card(rng, max)).collect();
            let f = M::random(ns[0], ns[1], rng);
            let g = M::random(ns[1], ns[2], rng);
            let h = M::random(ns[2], ns[3], rng);
            let l = f.then(&g)?.then(&h)?;
            let r = f.then(&g.then(&h)?)?;
            expect_eq(&[("f", &f), ("g", &g), ("h", &h)], &l, &r, tol)
        }),
        Law::random("identity neutral", move |rng| {
            let (a, b) = (card(rng, max), card(rng, max));
            let f = M::random(a, b, rng);
            let l = id::<M>(a).then(&f)?;
            let r = f.then(&id(b))?;
            Ok(expect_eq(&[("f", &f)], &l, &f, tol)?.and(expect_eq(&[("f", &f)], &r, &f, tol)?))
        }),
        Law::random("interchange", move |rng| {
            let ns: Vec<usize> = (0..6).map(|_| card(rng, max)).collect();
            let f = M::random(ns[0], ns[1], rng);
            let f2 = M::random(ns[1], ns[2], rng);
            let g = M::random(ns[3], ns[4], rng);
            let g2 = M::random(ns[4], ns[5], rng);
            let l = f.tensor(&g).then(&f2.tensor(&g2))?;
            let r = f.then(&f2)?.tensor(&g.then(&g2)?);
            expect_eq(&[("f", &f), ("f2", &f2), ("g", &g), ("g2", &g2)], &l, &r, tol)
        }),
        Law::random("swap natural", move |rng| {
            let (f, g) = random_pair::<M>(rng, max);
            let l = f.tensor(&g).then(&M::swap(f.cod(), g.cod()))?;
            let r = M::swap(f.dom(), g.dom()).then(&g.tensor(&f))?;
            expect_eq(&[("f", &f), ("g", &g)], &l, &r, tol)
        }),
        on_two::<M>("swap involutive", cfg, |n, m| {
            Ok((M::swap(n, m).then(&M::swap(m, n))?, id(n * m)))
        }),
        // comonoid
        on_one::<M>("copy associative", cfg, |n| {
            let d = M::copy(n);
            Ok((
                d.then(&d.tensor(&id(n)))?,
                d.then(&id::<M>(n).tensor(&d))?,
            ))
        }),
        on_one::<M>("copy counital left", cfg, |n| {
            Ok((M::copy(n).then(&M::discard(n).tensor(&id(n)))?, id(n)))
        }),
        on_one::<M>("copy counital right", cfg, |n| {
            Ok((M::copy(n).then(&id::<M>(n).tensor(&M::discard(n)))?, id(n)))
        }),
        on_one::<M>("copy commutative", cfg, |n| {
            Ok((M::copy(n).then(&M::swap(n, n))?, M::copy(n)))
        }),
        on_two::<M>("copy uniform", cfg, |n, m| Ok((copy_on(&[n, m]), M::copy(n * m)))),
        on_two::<M>("discard uniform", cfg, |n, m| Ok((discard_on(&[n, m]), M::discard(n * m)))),
        Law::fixed("copy and discard on the unit", || {
            let a = expect_eq::<M>(&[], &M::copy(1), &id(1), Tolerance::DEFAULT)?;
            let b = expect_eq::<M>(&[], &M::discard(1), &id(1), Tolerance::DEFAULT)?;
            Ok(a.and(b))
        }),
        Law::random("functions are deterministic and total", move |rng| {
            let (a, b) = (card(rng, max), card(rng, max));
            let f = M::random_function(a, b, rng);
            Ok(expect(
                f.is_deterministic(tol) && f.is_total(tol),
                "a total function failed to commute with copy or discard",
                &[("f", &f)],
            ))
        }),
        // comparators
        on_one::<M>("compare associative", cfg, |n| {
            let mu = M::compare(n);
            Ok((
                mu.tensor(&id(n)).then(&mu)?,
                id::<M>(n).tensor(&mu).then(&mu)?,
            ))
        }),
        on_one::<M>("compare commutative", cfg, |n| {
            Ok((M::swap(n, n).then(&M::compare(n))?, M::compare(n)))
        }),
        on_one::<M>("copy then compare", cfg, |n| {
            Ok((M::copy(n).then(&M::compare(n))?, id(n)))
        }),
        on_one::<M>("compare frobenius left", cfg, |n| {
            let (d, mu) = (M::copy(n), M::compare(n));
            Ok((
                d.tensor(&id(n)).then(&id::<M>(n).tensor(&mu))?,
                mu.then(&d)?,
            ))
        }),
        on_one::<M>("compare frobenius right", cfg, |n| {
            let (d, mu) = (M::copy(n), M::compare(n));
            Ok((
                id::<M>(n).tensor(&d).then(&mu.tensor(&id(n)))?,
                mu.then(&d)?,
            ))
        }),
        on_two::<M>("compare uniform", cfg, |n, m| Ok((compare_on(&[n, m]), M::compare(n * m)))),
        // caps
        on_one::<M>("cap commutative", cfg, |n| {
            Ok((M::swap(n, n).then(&M::cap(n))?, M::cap(n)))
        }),
        on_one::<M>("copy then cap", cfg, |n| {
            Ok((M::copy(n).then(&M::cap(n))?, M::discard(n)))
        }),
        on_one::<M>("cap frobenius", cfg, |n| {
            let (d, cap) = (M::copy(n), M::cap(n));
            Ok((
                d.tensor(&id(n)).then(&id::<M>(n).tensor(&cap))?,
                id::<M>(n).tensor(&d).then(&cap.tensor(&id(n)))?,
            ))
        }),
        on_two::<M>("cap uniform", cfg, |n, m| Ok((cap_on(&[n, m]), M::cap(n * m)))),
        Law::fixed("compare and cap on the unit", || {
            let a = expect_eq::<M>(&[], &M::compare(1), &id(1), Tolerance::DEFAULT)?;
            let b = expect_eq::<M>(&[], &M::cap(1), &id(1), Tolerance::DEFAULT)?;
            Ok(a.and(b))
        }),
        // caps and comparators determine each other
        on_one::<M>("cap from compare", cfg, |n| {
            Ok((M::compare(n).then(&M::discard(n))?, M::cap(n)))
        }),
        on_one::<M>("compare from cap", cfg, |n| {
            let (d, cap) = (M::copy(n), M::cap(n));
            Ok((d.tensor(&id(n)).then(&id::<M>(n).tensor(&cap))?, M::compare(n)))
        }),
    ];
    if M::unit(1).is_ok() {
        laws.push(on_two::<M>("unit uniform", cfg, |n, m| {
            Ok((unit_on(&[n, m])?, M::unit(n * m)?))
        }));
    }
    laws
}

pub(super) fn rel_appendix(cfg: &SuiteConfig) -> Vec<Law> {
    type R = FinRel;
    let (max, tol) = (cfg.max_card, cfg.tol);
    vec![
        on_one::<R>("unit left neutral", cfg, |n| {
            Ok((R::unit(n)?.tensor(&id(n)).then(&R::compare(n))?, id(n)))
        }),
        on_one::<R>("unit right neutral", cfg, |n| {
            Ok((id::<R>(n).tensor(&R::unit(n)?).then(&R::compare(n))?, id(n)))
        }),
        on_one::<R>("compare associative", cfg, |n| {
            let mu = R::compare(n);
            Ok((
                mu.tensor(&id(n)).then(&mu)?,
                id::<R>(n).tensor(&mu).then(&mu)?,
            ))
        }),
        on_one::<R>("compare commutative", cfg, |n| {
            Ok((R::swap(n, n).then(&R::compare(n))?, R::compare(n)))
        }),
        on_one::<R>("special", cfg, |n| Ok((R::copy(n).then(&R::compare(n))?, id(n)))),
        on_one::<R>("frobenius", cfg, |n| {
            let (d, mu) = (R::copy(n), R::compare(n));
            Ok((
                d.tensor(&id(n)).then(&id::<R>(n).tensor(&mu))?,
                id::<R>(n).tensor(&d).then(&mu.tensor(&id(n)))?,
            ))
        }),
        on_two::<R>("unit uniform", cfg, |n, m| Ok((unit_on(&[n, m])?, R::unit(n * m)?))),
        Law::random("copy lax natural", move |rng| {
            let (a, b) = (card(rng, max), card(rng, max));
            let f = R::random(a, b, rng);
            let l = f.then(&R::copy(b))?;
            let r = R::copy(a).then(&f.tensor(&f))?;
            expect_leq(&[("f", &f)], &l, &r, tol)
        }),
        Law::random("discard lax natural", move |rng| {
            let (a, b) = (card(rng, max), card(rng, max));
            let f = R::random(a, b, rng);
            expect_leq(&[("f", &f)], &f.then(&R::discard(b))?, &R::discard(a), tol)
        }),
        Law::random("compare lax natural", move |rng| {
            let (a, b) = (card(rng, max), card(rng, max));
            let f = R::random(a, b, rng);
            let l = R::compare(a).then(&f)?;
            let r = f.tensor(&f).then(&R::compare(b))?;
            expect_leq(&[("f", &f)], &l, &r, tol)
        }),
        Law::random("unit lax natural", move |rng| {
            let (a, b) = (card(rng, max), card(rng, max));
            let f = R::random(a, b, rng);
            expect_leq(&[("f", &f)], &R::unit(a)?.then(&f)?, &R::unit(b)?, tol)
        }),
        on_one_leq::<R>("identity below copy-compare", cfg, |n| {
            Ok((id(n), R::copy(n).then(&R::compare(n))?))
        }),
        on_one_leq::<R>("compare-copy below identity", cfg, |n| {
            Ok((R::compare(n).then(&R::copy(n))?, id(n * n)))
        }),
        on_one_leq::<R>("identity below discard-unit", cfg, |n| {
            Ok((id(n), R::discard(n).then(&R::unit(n)?)?))
        }),
        on_one_leq::<R>("unit-discard below identity", cfg, |n| {
            Ok((R::unit(n)?.then(&R::discard(n))?, id(1)))
        }),
        Law::random("every relation is quasi-total", move |rng| {
            let (a, b) = (card(rng, max), card(rng, max));
            let f = R::random(a, b, rng);
            let v = restriction_leq(&f, &f, tol)?;
            Ok(expect(v.holds, "relation does not restrict itself", &[("f", &f)]))
        }),
    ]
}
