//! Preorder enrichment laws and balancedness.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{card, expect, expect_leq, inputs, Law, LawBackend, Outcome, SuiteConfig};
use crate::discrete::FinRel;
use crate::error::{Error, Result};
use crate::inference::cond_compose;
use crate::morphism::{Backend, Morphism, Tolerance};
use crate::order::{
    conditional_leq, generic_witness_search, restriction_leq, sharp_witness, witness_residual,
    SearchConfig,
};

/// Both sides of the hypothesis and the conclusion of the balance rule.
#[derive(Clone, Debug)]
pub struct BalancedOutcome<M> {
    pub hypothesis: bool,
    /// `None` when the hypothesis fails.
    pub conclusion: Option<bool>,
    pub hypothesis_sides: (M, M),
    pub conclusion_sides: (M, M),
    pub residual: f64,
}

/// For `f : A → X`, `g : X → Y`, `h : Y → Z`, the rule
///
/// ```text
/// f ; δ ; ((g;h) ⊗ (g;h)) = f ; g ; δ ; (h ⊗ h)
///     ⇒ f ; δ ; ((g;h) ⊗ g) = f ; g ; δ ; (h ⊗ id)
/// ```
pub fn check_balanced<M: Morphism>(f: &M, g: &M, h: &M, tol: Tolerance) -> Result<BalancedOutcome<M>> {
    if f.cod() != g.dom() {
        return Err(Error::dims("balance rule", f.cod(), g.dom()));
    }
    if g.cod() != h.dom() {
        return Err(Error::dims("balance rule", g.cod(), h.dom()));
    }
    let gh = g.then(h)?;
    let fg = f.then(g)?;
    let fd = f.then(&M::copy(f.cod()))?;
    let fgd = fg.then(&M::copy(g.cod()))?;
    let hyp = (fd.then(&gh.tensor(&gh))?, fgd.then(&h.tensor(h))?);
    let con = (
        fd.then(&gh.tensor(g))?,
        fgd.then(&h.tensor(&M::identity(g.cod())))?,
    );
    let hyp_res = hyp.0.residual(&hyp.1)?;
    let hypothesis = hyp_res <= tol.value();
    let con_res = con.0.residual(&con.1)?;
    Ok(BalancedOutcome {
        hypothesis,
        conclusion: hypothesis.then_some(con_res <= tol.value()),
        hypothesis_sides: hyp,
        conclusion_sides: con,
        residual: if hypothesis { con_res } else { hyp_res },
    })
}

fn balanced_outcome<M: Morphism>(f: &M, g: &M, h: &M, tol: Tolerance) -> Result<Outcome> {
    let b = check_balanced(f, g, h, tol)?;
    Ok(match b.conclusion {
        None => Outcome::Vacuous,
        Some(true) => Outcome::pass(b.residual),
        Some(false) => Outcome::fail(
            inputs(&[("f", f), ("g", g), ("h", h)]),
            b.conclusion_sides.0.to_json(),
            b.conclusion_sides.1.to_json(),
            b.residual,
            Some("hypothesis holds but conclusion fails".into()),
        ),
    })
}

fn chain(rng: &mut ChaCha8Rng, max: usize) -> [usize; 4] {
    [card(rng, max), card(rng, max), card(rng, max), card(rng, max)]
}

pub(super) fn balanced<M: LawBackend>(cfg: &SuiteConfig) -> Vec<Law> {
    let (max, tol) = (cfg.max_card, cfg.tol);
    vec![
        Law::random("random triple", move |rng| {
            let [a, x, y, z] = chain(rng, max);
            let (f, g, h) = (M::random(a, x, rng), M::random(x, y, rng), M::random(y, z, rng));
            balanced_outcome(&f, &g, &h, tol)
        }),
        Law::random("random triple with few outputs", move |rng| {
            let [a, x, _, _] = chain(rng, max);
            let (f, g, h) = (M::random(a, x, rng), M::random(x, 1, rng), M::random(1, 2, rng));
            balanced_outcome(&f, &g, &h, tol)
        }),
        Law::random("deterministic middle", move |rng| {
            let [a, x, y, z] = chain(rng, max);
            let f = M::random(a, x, rng);
            let g = M::random_deterministic(x, y, rng);
            let h = M::random(y, z, rng);
            non_vacuous(balanced_outcome(&f, &g, &h, tol)?)
        }),
        Law::random("quasi-total middle, constant last", move |rng| {
            let [a, x, y, z] = chain(rng, max);
            let f = M::random(a, x, rng);
            let g = M::random_quasi_total(x, y, rng);
            let point = M::random_function(1, z, rng);
            let h = M::discard(y).then(&point)?;
            non_vacuous(balanced_outcome(&f, &g, &h, tol)?)
        }),
    ]
}

/// A constructed instance must satisfy its hypothesis.
fn non_vacuous(o: Outcome) -> Result<Outcome> {
    Ok(match o {
        Outcome::Vacuous => Outcome::fail(
            serde_json::Value::Null,
            serde_json::Value::Null,
            serde_json::Value::Null,
            f64::INFINITY,
            Some("constructed instance missed the hypothesis".into()),
        ),
        other => other,
    })
}

/// `g ◁ r` for a random effect `r`, so that the result lies below `g`.
fn below<M: LawBackend>(g: &M, rng: &mut ChaCha8Rng) -> Result<M> {
    let r = M::random(g.cod() * g.dom(), 1, rng);
    cond_compose(g, &r)
}

pub(super) fn enrichment<M: LawBackend>(cfg: &SuiteConfig) -> Vec<Law> {
    let (max, tol) = (cfg.max_card, cfg.tol);
    let mut laws = vec![
        Law::random("reflexive", move |rng| {
            let f = M::random(card(rng, max), card(rng, max), rng);
            expect_leq(&[("f", &f)], &f, &f, tol)
        }),
        Law::random("transitive", move |rng| {
            let h = M::random(card(rng, max), card(rng, max), rng);
            let g = below(&h, rng)?;
            let f = below(&g, rng)?;
            let premise = conditional_leq(&f, &g, tol)?.holds && conditional_leq(&g, &h, tol)?.holds;
            if !premise {
                return Ok(expect(false, "constructed chain is not increasing", &[("f", &f), ("g", &g), ("h", &h)]));
            }
            expect_leq(&[("f", &f), ("g", &g), ("h", &h)], &f, &h, tol)
        }),
        Law::random("witness recomposes", move |rng| {
            let g = M::random(card(rng, max), card(rng, max), rng);
            let f = if rng.gen_bool(0.5) { below(&g, rng)? } else { M::random(g.dom(), g.cod(), rng) };
            let v = conditional_leq(&f, &g, tol)?;
            let Some(r) = v.witness else {
                return Ok(Outcome::Vacuous);
            };
            let residual = witness_residual(&f, &g, &r)?;
            let shaped = r.dom() == f.cod() * f.dom() && r.cod() == 1;
            let in_range = shaped
                && r.as_kernel().is_none_or(|k| k.entries().iter().all(|v| (0.0..=1.0).contains(v)));
            Ok(if residual <= tol.value() && in_range {
                Outcome::pass(residual)
            } else {
                Outcome::fail(inputs(&[("f", &f), ("g", &g)]), f.to_json(), cond_compose(&g, &r)?.to_json(), residual, None)
            })
        }),
        Law::random("precomposition monotone", move |rng| {
            let [a, x, y, _] = chain(rng, max);
            let (h, f2) = (M::random(a, x, rng), M::random(x, y, rng));
            let f = below(&f2, rng)?;
            expect_leq(&[("h", &h), ("f", &f), ("f2", &f2)], &h.then(&f)?, &h.then(&f2)?, tol)
        }),
        Law::random("postcomposition monotone", move |rng| {
            let [x, y, z, _] = chain(rng, max);
            let (f2, h) = (M::random(x, y, rng), M::random(y, z, rng));
            let f = below(&f2, rng)?;
            expect_leq(&[("f", &f), ("f2", &f2), ("h", &h)], &f.then(&h)?, &f2.then(&h)?, tol)
        }),
        Law::random("composition monotone", move |rng| {
            let [x, y, z, _] = chain(rng, max);
            let (f2, g2) = (M::random(x, y, rng), M::random(y, z, rng));
            let (f, g) = (below(&f2, rng)?, below(&g2, rng)?);
            let named = [("f", &f), ("f2", &f2), ("g", &g), ("g2", &g2)];
            expect_leq(&named, &f.then(&g)?, &f2.then(&g2)?, tol)
        }),
        Law::random("tensor monotone", move |rng| {
            let [a, b, c, d] = chain(rng, max);
            let (f2, g2) = (M::random(a, b, rng), M::random(c, d, rng));
            let (f, g) = (below(&f2, rng)?, below(&g2, rng)?);
            let named = [("f", &f), ("f2", &f2), ("g", &g), ("g2", &g2)];
            let left = expect_leq(&named, &f.tensor(&g2), &f2.tensor(&g2), tol)?;
            let right = expect_leq(&named, &f2.tensor(&g), &f2.tensor(&g2), tol)?;
            let both = expect_leq(&named, &f.tensor(&g), &f2.tensor(&g2), tol)?;
            Ok(left.and(right).and(both))
        }),
        Law::random("copy-f-f-compare below f", move |rng| {
            let (x, y) = (card(rng, max), card(rng, max));
            let f = M::random(x, y, rng);
            let l = M::copy(x).then(&f.tensor(&f))?.then(&M::compare(y))?;
            expect_leq(&[("f", &f)], &l, &f, tol)
        }),
        Law::random("identity below copy-compare", move |rng| {
            let n = card(rng, max);
            expect_leq::<M>(&[], &M::identity(n), &M::copy(n).then(&M::compare(n))?, tol)
        }),
        Law::random("compare-copy below identity", move |rng| {
            let n = card(rng, max);
            expect_leq::<M>(&[], &M::compare(n).then(&M::copy(n))?, &M::identity(n * n), tol)
        }),
        Law::random("subunital", move |rng| {
            let n = card(rng, max);
            let p = M::random(n, 1, rng);
            expect_leq(&[("p", &p)], &p, &M::discard(n), tol)
        }),
        Law::random("restriction implies conditional for quasi-total", move |rng| {
            let (x, y) = (card(rng, max), card(rng, max));
            let g = M::random_quasi_total(x, y, rng);
            let (f, constructed) = if rng.gen_bool(0.5) {
                // f = δ ; (g ⊗ e) with a sharp effect e
                let e = M::random_deterministic(x, 1, rng);
                (M::copy(x).then(&g.tensor(&e))?, true)
            } else {
                (M::random_quasi_total(x, y, rng), false)
            };
            let named = [("f", &f), ("g", &g)];
            if !f.is_quasi_total(tol) || !restriction_leq(&f, &g, tol)?.holds {
                return Ok(if constructed {
                    expect(false, "constructed pair is not restriction-ordered", &named)
                } else {
                    Outcome::Vacuous
                });
            }
            expect_leq(&named, &f, &g, tol)
        }),
        Law::random("decider agrees with witness search", move |rng| {
            // keep |X| · |Y| within the boolean search limit
            let x = card(rng, max.min(4));
            let y = card(rng, (16 / x).min(max));
            let (f, g) = M::random_search_pair(x, y, rng);
            let config = SearchConfig {
                grid_steps: 64,
                slack: 1.0 / 128.0 + tol.value(),
            };
            let decided = conditional_leq(&f, &g, tol)?.holds;
            let searched = generic_witness_search(&f, &g, config)?.holds;
            Ok(expect(decided == searched, "decider and brute-force search disagree", &[("f", &f), ("g", &g)]))
        }),
    ];
    if M::BACKEND != Backend::Rel {
        laws.push(Law::random("conditional and restriction agree for quasi-total", move |rng| {
            let (x, y) = (card(rng, max), card(rng, max));
            let g = M::random_quasi_total(x, y, rng);
            let f = if rng.gen_bool(0.5) {
                let e = M::random_deterministic(x, 1, rng);
                M::copy(x).then(&g.tensor(&e))?
            } else {
                M::random_quasi_total(x, y, rng)
            };
            let named = [("f", &f), ("g", &g)];
            let cond = conditional_leq(&f, &g, tol)?.holds;
            let restr = restriction_leq(&f, &g, tol)?.holds;
            if cond != restr {
                return Ok(expect(false, "conditional preorder and restriction order disagree", &named));
            }
            if !cond {
                return Ok(Outcome::pass(0.0));
            }
            let r = sharp_witness(&f, &g, tol)?;
            let residual = witness_residual(&f, &g, &r)?;
            let sharp = r.is_deterministic(tol);
            Ok(if sharp && residual <= tol.value() {
                Outcome::pass(residual)
            } else {
                Outcome::fail(inputs(&named), r.to_json(), serde_json::Value::Null, residual, Some("sharp witness invalid".into()))
            })
        }));
    }
    if M::BACKEND == Backend::FinStoch {
        laws.push(Law::random("conditional implies pointwise", move |rng| {
            let g = M::random(card(rng, max), card(rng, max), rng);
            let f = below(&g, rng)?;
            let (fk, gk) = (f.as_kernel().expect("kernel"), g.as_kernel().expect("kernel"));
            let dominated = fk.entries().iter().zip(gk.entries()).all(|(a, b)| *a <= b + tol.value());
            Ok(expect(dominated, "f = g ◁ r is not pointwise below g", &[("f", &f), ("g", &g)]))
        }));
    }
    if M::BACKEND == Backend::Rel {
        laws.push(Law::fixed("separation example", move || {
            let r = FinRel::from_pairs(3, 3, &[(0, 1)])?;
            let s = FinRel::from_pairs(3, 3, &[(0, 1), (0, 2)])?;
            let cond = conditional_leq(&r, &s, tol)?.holds;
            let restr = restriction_leq(&r, &s, tol)?.holds;
            Ok(expect(cond && !restr, "expected ⊑ to hold and ⪯ to fail", &[("R", &r), ("S", &s)]))
        }));
    }
    laws
}
