//! Evaluation of diagram terms into a backend.
//!
//! Structural morphisms on words are built from the single-object ones
//! through the uniformity equations:
//!
//! ```text
//! δ_{X⊗W} = (δ_X ⊗ δ_W) ; (id_X ⊗ σ_{X,W} ⊗ id_W)        δ_I = id
//! ε_{X⊗W} = ε_X ⊗ ε_W                                    ε_I = id
//! μ_{X⊗W} = (id_X ⊗ σ_{W,X} ⊗ id_W) ; (μ_X ⊗ μ_W)        μ_I = id
//! ∩_{X⊗W} = (id_X ⊗ σ_{W,X} ⊗ id_W) ; (∩_X ⊗ ∩_W)        ∩_I = id
//! ```

use crate::diagram::{typecheck, DiagramTerm, ObjectType, Signature};
use crate::error::Result;
use crate::morphism::Morphism;

fn product(cards: &[usize]) -> usize {
    cards.iter().product()
}

fn middle_swap<M: Morphism>(outer: usize, a: usize, b: usize, inner: usize) -> M {
    M::identity(outer)
        .tensor(&M::swap(a, b))
        .tensor(&M::identity(inner))
}

pub fn identity_on<M: Morphism>(cards: &[usize]) -> M {
    M::identity(product(cards))
}

pub fn copy_on<M: Morphism>(cards: &[usize]) -> M {
    match cards {
        [] => M::identity(1),
        [n] => M::copy(*n),
        [n, rest @ ..] => {
            let r = product(rest);
            M::copy(*n)
                .tensor(&copy_on::<M>(rest))
                .then(&middle_swap(*n, *n, r, r))
                .expect("uniform copy is well typed")
        }
    }
}

pub fn discard_on<M: Morphism>(cards: &[usize]) -> M {
    cards
        .iter()
        .fold(M::identity(1), |acc, &n| acc.tensor(&M::discard(n)))
}

pub fn compare_on<M: Morphism>(cards: &[usize]) -> M {
    match cards {
        [] => M::identity(1),
        [n] => M::compare(*n),
        [n, rest @ ..] => {
            let r = product(rest);
            middle_swap::<M>(*n, r, *n, r)
                .then(&M::compare(*n).tensor(&compare_on::<M>(rest)))
                .expect("uniform compare is well typed")
        }
    }
}

pub fn cap_on<M: Morphism>(cards: &[usize]) -> M {
    match cards {
        [] => M::identity(1),
        [n] => M::cap(*n),
        [n, rest @ ..] => {
            let r = product(rest);
            middle_swap::<M>(*n, r, *n, r)
                .then(&M::cap(*n).tensor(&cap_on::<M>(rest)))
                .expect("uniform cap is well typed")
        }
    }
}

pub fn unit_on<M: Morphism>(cards: &[usize]) -> Result<M> {
    cards
        .iter()
        .try_fold(M::identity(1), |acc, &n| Ok(acc.tensor(&M::unit(n)?)))
}

/// `σ_{X,Y}` for words; a block permutation of the flattened indices.
pub fn swap_on<M: Morphism>(left: &[usize], right: &[usize]) -> M {
    M::swap(product(left), product(right))
}

/// Evaluates a term after typechecking it.
pub fn evaluate<M: Morphism>(term: &DiagramTerm, sig: &Signature) -> Result<M> {
    typecheck(term, sig)?;
    eval_checked(term, sig)
}

fn cards(word: &ObjectType, sig: &Signature) -> Result<Vec<usize>> {
    word.cards(sig)
}

fn eval_checked<M: Morphism>(term: &DiagramTerm, sig: &Signature) -> Result<M> {
    use DiagramTerm::*;
    Ok(match term {
        Gen(name) => {
            let g = sig.generator(name)?;
            M::from_payload(name, g, g.dom.cardinality(sig)?, g.cod.cardinality(sig)?)?
        }
        Id(x) => identity_on(&cards(x, sig)?),
        Seq(a, b) => eval_checked::<M>(a, sig)?.then(&eval_checked(b, sig)?)?,
        Par(a, b) => eval_checked::<M>(a, sig)?.tensor(&eval_checked(b, sig)?),
        Swap(x, y) => swap_on(&cards(x, sig)?, &cards(y, sig)?),
        Copy(x) => copy_on(&cards(x, sig)?),
        Discard(x) => discard_on(&cards(x, sig)?),
        Compare(x) => compare_on(&cards(x, sig)?),
        Cap(x) => cap_on(&cards(x, sig)?),
        Unit(x) => unit_on(&cards(x, sig)?)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{FinRel, PartialFn};
    use crate::finstoch::SubKernel;

    fn uniform_matches_flat<M: Morphism + PartialEq>() {
        for cards in [vec![2, 3], vec![3, 1, 2], vec![0, 2], vec![2, 2, 2]] {
            let n = product(&cards);
            assert_eq!(copy_on::<M>(&cards), M::copy(n), "copy on {cards:?}");
            assert_eq!(compare_on::<M>(&cards), M::compare(n), "compare on {cards:?}");
            assert_eq!(cap_on::<M>(&cards), M::cap(n), "cap on {cards:?}");
            assert_eq!(discard_on::<M>(&cards), M::discard(n), "discard on {cards:?}");
        }
        assert_eq!(copy_on::<M>(&[]), M::identity(1));
        assert_eq!(discard_on::<M>(&[]), M::identity(1));
    }

    #[test]
    fn uniform_structure_agrees_with_flattened_layout() {
        uniform_matches_flat::<SubKernel>();
        uniform_matches_flat::<PartialFn>();
        uniform_matches_flat::<FinRel>();
    }

    #[test]
    fn unit_only_in_rel() {
        assert!(unit_on::<SubKernel>(&[2]).is_err());
        assert!(unit_on::<PartialFn>(&[2]).is_err());
        assert_eq!(unit_on::<FinRel>(&[2, 3]).unwrap(), FinRel::full(1, 6));
        assert_eq!(unit_on::<SubKernel>(&[]).unwrap(), SubKernel::identity(1));
    }
}
