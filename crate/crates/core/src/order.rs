//! The restriction order `⪯` and the conditional preorder `⊑`.
//!
//! `f ⪯ g` when `f = δ ; (g ⊗ (f ; ε))`. `f ⊑ g` when some effect
//! `r : Y ⊗ X → I` has `f = g ◁ r`. Both deciders report the defect of the
//! defining equation so callers can tighten the tolerance afterwards.

use rayon::prelude::*;
use serde::Serialize;

use crate::discrete::{FinRel, PartialFn};
use crate::error::{Error, Result};
use crate::finstoch::SubKernel;
use crate::inference::cond_compose;
use crate::morphism::{check_parallel, domain_effect, Morphism, Tolerance};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Restriction,
    Conditional,
}

#[derive(Clone, Debug)]
pub struct OrderVerdict<M> {
    pub relation: Relation,
    pub holds: bool,
    /// Effect `Y ⊗ X → I`; only for the conditional preorder.
    pub witness: Option<M>,
    pub residual: f64,
}

impl<M: Morphism> OrderVerdict<M> {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "relation": self.relation,
            "holds": self.holds,
            "residual": self.residual,
            "witness": self.witness.as_ref().map(Morphism::to_json),
        })
    }
}

/// Decides `f ⪯ g` by evaluating both sides of its defining equation.
pub fn restriction_leq<M: Morphism>(f: &M, g: &M, tol: Tolerance) -> Result<OrderVerdict<M>> {
    check_parallel("restriction order", f, g)?;
    let rhs = M::copy(f.dom()).then(&g.tensor(&domain_effect(f)))?;
    let residual = f.residual(&rhs)?;
    Ok(OrderVerdict {
        relation: Relation::Restriction,
        holds: residual <= tol.value(),
        witness: None,
        residual,
    })
}

/// Residual of `f = g ◁ r`.
pub fn witness_residual<M: Morphism>(f: &M, g: &M, r: &M) -> Result<f64> {
    f.residual(&cond_compose(g, r)?)
}

/// Grid and slack for [`ConditionalOrder::witness_search`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SearchConfig {
    /// Candidate witness values are `k / grid_steps`.
    pub grid_steps: usize,
    pub slack: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            grid_steps: 64,
            slack: Tolerance::DEFAULT.value(),
        }
    }
}

/// Largest `|Y| · |X|` accepted by the brute-force searches.
pub const SEARCH_LIMIT: usize = 64;
/// Largest `|Y| · |X|` for exhaustive boolean enumeration.
pub const BOOLEAN_SEARCH_LIMIT: usize = 16;

/// Backend-specific deciders for `⊑`.
pub trait ConditionalOrder: Morphism {
    fn conditional_leq(f: &Self, g: &Self, tol: Tolerance) -> Result<OrderVerdict<Self>>;

    /// A `{0,1}`-valued witness of `f ⊑ g` for quasi-total `f`, `g`.
    fn sharp_witness(f: &Self, g: &Self, tol: Tolerance) -> Result<Self>;

    /// Brute-force search for a witness. Only meant as a test oracle.
    fn witness_search(f: &Self, g: &Self, config: SearchConfig) -> Result<OrderVerdict<Self>>;
}

pub fn conditional_leq<M: ConditionalOrder>(f: &M, g: &M, tol: Tolerance) -> Result<OrderVerdict<M>> {
    M::conditional_leq(f, g, tol)
}

pub fn sharp_witness<M: ConditionalOrder>(f: &M, g: &M, tol: Tolerance) -> Result<M> {
    M::sharp_witness(f, g, tol)
}

pub fn generic_witness_search<M: ConditionalOrder>(
    f: &M,
    g: &M,
    config: SearchConfig,
) -> Result<OrderVerdict<M>> {
    M::witness_search(f, g, config)
}

fn sharp_preconditions<M: ConditionalOrder>(f: &M, g: &M, tol: Tolerance) -> Result<()> {
    check_parallel("sharp witness", f, g)?;
    if !f.is_quasi_total(tol) || !g.is_quasi_total(tol) {
        return Err(Error::NotQuasiTotal);
    }
    if !M::conditional_leq(f, g, tol)?.holds {
        return Err(Error::NotComparable);
    }
    Ok(())
}

fn checked_witness<M: Morphism>(f: &M, g: &M, r: M, tol: Tolerance) -> Result<M> {
    if witness_residual(f, g, &r)? <= tol.value() {
        Ok(r)
    } else {
        Err(Error::NotComparable)
    }
}

/// Exhaustive search over `2^n` boolean effects, returning the first hit in
/// mask order regardless of scheduling.
fn boolean_search<M: Morphism>(
    f: &M,
    g: &M,
    build: impl Fn(usize, u64) -> M + Sync,
) -> Result<OrderVerdict<M>> {
    check_parallel("witness search", f, g)?;
    let n = f.dom() * f.cod();
    if n > BOOLEAN_SEARCH_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: BOOLEAN_SEARCH_LIMIT,
        });
    }
    let found = (0..1u64 << n).into_par_iter().find_first(|&mask| {
        let r = build(n, mask);
        witness_residual(f, g, &r).is_ok_and(|d| d == 0.0)
    });
    Ok(OrderVerdict {
        relation: Relation::Conditional,
        holds: found.is_some(),
        witness: found.map(|mask| build(n, mask)),
        residual: if found.is_some() { 0.0 } else { 1.0 },
    })
}

/// Index of `(y, x)` in `Y ⊗ X`.
fn yx(y: usize, x: usize, dom: usize) -> usize {
    y * dom + x
}

impl ConditionalOrder for SubKernel {
    /// Pointwise domination `f ≤ g`, witnessed by the ratio `f / g`.
    fn conditional_leq(f: &Self, g: &Self, tol: Tolerance) -> Result<OrderVerdict<Self>> {
        check_parallel("conditional preorder", f, g)?;
        let (nx, ny) = (f.dom(), f.cod());
        let t = tol.value();
        let dominated = (0..nx).all(|x| (0..ny).all(|y| f.get(x, y) <= g.get(x, y) + t));
        let r = SubKernel::from_fn(ny * nx, 1, |i, _| {
            let (y, x) = (i / nx.max(1), i % nx.max(1));
            let gv = g.get(x, y);
            if gv > t {
                (f.get(x, y) / gv).clamp(0.0, 1.0)
            } else {
                1.0
            }
        });
        let residual = witness_residual(f, g, &r)?;
        Ok(OrderVerdict {
            relation: Relation::Conditional,
            holds: dominated,
            witness: dominated.then_some(r),
            residual,
        })
    }

    /// `r(y, x) = 0` where row `x` of `f` vanishes and `1` elsewhere.
    fn sharp_witness(f: &Self, g: &Self, tol: Tolerance) -> Result<Self> {
        sharp_preconditions(f, g, tol)?;
        let nx = f.dom();
        let r = SubKernel::from_fn(f.cod() * nx, 1, |i, _| {
            if f.row_mass(i % nx.max(1)) <= tol.value() {
                0.0
            } else {
                1.0
            }
        });
        checked_witness(f, g, r, tol)
    }

    /// Since `(g ◁ r)[x][y] = g[x][y] · r(y, x)`, the grid search splits into
    /// one independent search per entry. The assembled witness is verified
    /// by full evaluation of `g ◁ r`.
    fn witness_search(f: &Self, g: &Self, config: SearchConfig) -> Result<OrderVerdict<Self>> {
        check_parallel("witness search", f, g)?;
        let (nx, ny) = (f.dom(), f.cod());
        if nx * ny > SEARCH_LIMIT {
            return Err(Error::TooLarge {
                size: nx * ny,
                limit: SEARCH_LIMIT,
            });
        }
        if config.grid_steps == 0 {
            return Err(Error::Config("grid must have at least one step".into()));
        }
        let steps = config.grid_steps;
        let mut values = vec![0.0; nx * ny];
        let mut found = true;
        for x in 0..nx {
            for y in 0..ny {
                let (fv, gv) = (f.get(x, y), g.get(x, y));
                let best = (0..=steps)
                    .map(|k| k as f64 / steps as f64)
                    .map(|v| (v, (gv * v - fv).abs()))
                    .fold((1.0, f64::INFINITY), |acc, c| if c.1 < acc.1 { c } else { acc });
                found &= best.1 <= config.slack;
                values[yx(y, x, nx)] = best.0;
            }
        }
        let r = SubKernel::from_data_unchecked(nx * ny, 1, values);
        let residual = witness_residual(f, g, &r)?;
        let holds = found && residual <= config.slack;
        Ok(OrderVerdict {
            relation: Relation::Conditional,
            holds,
            witness: holds.then_some(r),
            residual,
        })
    }
}

impl ConditionalOrder for PartialFn {
    /// Coincides with the restriction order. The witness is defined at
    /// `(y, x)` exactly when `f(x) = y`.
    fn conditional_leq(f: &Self, g: &Self, tol: Tolerance) -> Result<OrderVerdict<Self>> {
        let v = restriction_leq(f, g, tol)?;
        Ok(OrderVerdict {
            relation: Relation::Conditional,
            holds: v.holds,
            witness: v.holds.then(|| graph_witness_par(f)),
            residual: v.residual,
        })
    }

    fn sharp_witness(f: &Self, g: &Self, tol: Tolerance) -> Result<Self> {
        sharp_preconditions(f, g, tol)?;
        checked_witness(f, g, graph_witness_par(f), tol)
    }

    fn witness_search(f: &Self, g: &Self, _config: SearchConfig) -> Result<OrderVerdict<Self>> {
        boolean_search(f, g, |n, mask| {
            PartialFn::from_fn(n, 1, |i| (mask >> i & 1 == 1).then_some(0))
        })
    }
}

fn graph_witness_par(f: &PartialFn) -> PartialFn {
    let nx = f.dom();
    PartialFn::from_fn(f.cod() * nx, 1, |i| {
        let (y, x) = (i / nx, i % nx);
        (f.apply(x) == Some(y)).then_some(0)
    })
}

impl ConditionalOrder for FinRel {
    /// Inclusion `f ⊆ g`, witnessed by `r(y, x) = f(x, y)`.
    fn conditional_leq(f: &Self, g: &Self, _tol: Tolerance) -> Result<OrderVerdict<Self>> {
        check_parallel("conditional preorder", f, g)?;
        let r = graph_witness_rel(f);
        let residual = witness_residual(f, g, &r)?;
        let holds = f.is_subrelation_of(g)?;
        Ok(OrderVerdict {
            relation: Relation::Conditional,
            holds,
            witness: holds.then_some(r),
            residual,
        })
    }

    fn sharp_witness(f: &Self, g: &Self, tol: Tolerance) -> Result<Self> {
        sharp_preconditions(f, g, tol)?;
        checked_witness(f, g, graph_witness_rel(f), tol)
    }

    fn witness_search(f: &Self, g: &Self, _config: SearchConfig) -> Result<OrderVerdict<Self>> {
        boolean_search(f, g, |n, mask| FinRel::from_fn(n, 1, |i, _| mask >> i & 1 == 1))
    }
}

fn graph_witness_rel(f: &FinRel) -> FinRel {
    let nx = f.dom();
    FinRel::from_fn(f.cod() * nx, 1, |i, _| f.get(i % nx, i / nx))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: Tolerance = Tolerance::DEFAULT;

    fn k(rows: &[&[f64]]) -> SubKernel {
        SubKernel::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn restriction_examples() {
        let f = k(&[&[0.25, 0.25]]);
        let g = k(&[&[0.5, 0.5]]);
        assert!(restriction_leq(&f, &g, TOL).unwrap().holds);
        assert!(!restriction_leq(&g, &f, TOL).unwrap().holds);
        let coin = k(&[&[0.5, 0.5], &[0.0, 0.0]]);
        assert!(restriction_leq(&coin, &coin, TOL).unwrap().holds);
        let half = k(&[&[0.25, 0.25]]);
        assert!(!restriction_leq(&half, &half, TOL).unwrap().holds);
    }

    #[test]
    fn conditional_ratio_witness() {
        let f = k(&[&[0.2, 0.3]]);
        let g = k(&[&[0.5, 0.3]]);
        let v = conditional_leq(&f, &g, TOL).unwrap();
        assert!(v.holds);
        assert!(v.residual <= 1e-12);
        let r = v.witness.unwrap();
        assert!((r.get(0, 0) - 0.4).abs() < 1e-12);
        assert!((r.get(1, 0) - 1.0).abs() < 1e-12);
        let back = conditional_leq(&g, &f, TOL).unwrap();
        assert!(!back.holds);
        assert!(back.witness.is_none());
    }

    #[test]
    fn sharp_witness_examples() {
        let f = k(&[&[0.0, 0.0], &[0.3, 0.7]]);
        let g = k(&[&[0.4, 0.6], &[0.3, 0.7]]);
        let r = sharp_witness(&f, &g, TOL).unwrap();
        // index (y, x) = y * 2 + x
        assert_eq!(r.entries(), &[0.0, 1.0, 0.0, 1.0]);
        assert!(witness_residual(&f, &g, &r).unwrap() <= 1e-12);

        let r = sharp_witness(&g, &g, TOL).unwrap();
        assert!(r.entries().iter().all(|&v| v == 1.0));

        let half = k(&[&[0.25, 0.25]]);
        let full = k(&[&[0.5, 0.5]]);
        assert_eq!(sharp_witness(&half, &full, TOL), Err(Error::NotQuasiTotal));
        assert_eq!(sharp_witness(&g, &f, TOL), Err(Error::NotComparable));
    }

    #[test]
    fn rel_separation_example() {
        // carrier {0, 1, 2}; R = {(0,1)}, S = {(0,1), (0,2)}
        let r = FinRel::from_pairs(3, 3, &[(0, 1)]).unwrap();
        let s = FinRel::from_pairs(3, 3, &[(0, 1), (0, 2)]).unwrap();
        let cond = conditional_leq(&r, &s, TOL).unwrap();
        assert!(cond.holds);
        assert_eq!(cond.residual, 0.0);
        assert!(!restriction_leq(&r, &s, TOL).unwrap().holds);
        assert!(!conditional_leq(&s, &r, TOL).unwrap().holds);
    }

    #[test]
    fn par_orders_coincide() {
        let f = PartialFn::new(2, vec![Some(1), None]).unwrap();
        let g = PartialFn::new(2, vec![Some(1), Some(0)]).unwrap();
        let h = PartialFn::new(2, vec![Some(0), Some(0)]).unwrap();
        for (a, b) in [(&f, &g), (&g, &f), (&f, &h), (&g, &g)] {
            let c = conditional_leq(a, b, TOL).unwrap();
            assert_eq!(c.holds, restriction_leq(a, b, TOL).unwrap().holds);
            if c.holds {
                assert_eq!(witness_residual(a, b, &c.witness.unwrap()).unwrap(), 0.0);
            }
        }
        assert!(conditional_leq(&f, &g, TOL).unwrap().holds);
        assert!(!conditional_leq(&g, &f, TOL).unwrap().holds);
    }

    #[test]
    fn searches_agree_with_deciders() {
        let f = k(&[&[0.25, 0.5]]);
        let g = k(&[&[0.5, 0.5]]);
        let s = generic_witness_search(&f, &g, SearchConfig::default()).unwrap();
        assert!(s.holds);
        assert!(!generic_witness_search(&g, &f, SearchConfig::default()).unwrap().holds);
        let reflexive = generic_witness_search(&g, &g, SearchConfig::default()).unwrap();
        assert!(reflexive.witness.unwrap().entries().iter().all(|&v| v == 1.0));

        let r = FinRel::from_pairs(3, 3, &[(0, 1)]).unwrap();
        let s = FinRel::from_pairs(3, 3, &[(0, 1), (0, 2)]).unwrap();
        assert!(generic_witness_search(&r, &s, SearchConfig::default()).unwrap().holds);
        assert!(!generic_witness_search(&s, &r, SearchConfig::default()).unwrap().holds);

        let big = FinRel::empty(5, 4);
        assert!(matches!(
            generic_witness_search(&big, &big, SearchConfig::default()),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn mismatched_shapes_are_rejected() {
        let f = k(&[&[0.5, 0.5]]);
        let g = k(&[&[1.0]]);
        assert!(matches!(restriction_leq(&f, &g, TOL), Err(Error::DimensionMismatch { .. })));
        assert!(matches!(conditional_leq(&f, &g, TOL), Err(Error::DimensionMismatch { .. })));
    }
}
