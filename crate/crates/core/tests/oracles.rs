//! Library results against naive reference computations.

use pmc_core::order::{generic_witness_search, sharp_witness, SearchConfig};
use pmc_core::random::{trial_rng, Random};
use pmc_core::{
    bayes_invert, cond_compose, conditional, conditional_leq, restriction_leq, FinRel, Morphism, PartialFn, SubKernel,
    Tolerance,
};
use proptest::prelude::*;

const TOL: Tolerance = Tolerance::DEFAULT;

type Matrix = Vec<Vec<f64>>;

fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    a.iter()
        .map(|row| (0..b[0].len()).map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum()).collect())
        .collect()
}

fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let mut out = Vec::new();
    for ar in a {
        for br in b {
            out.push(ar.iter().flat_map(|x| br.iter().map(move |y| x * y)).collect());
        }
    }
    out
}

fn close(a: &Matrix, b: &Matrix, eps: f64) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(r, s)| r.len() == s.len() && r.iter().zip(s).all(|(x, y)| (x - y).abs() <= eps))
}

fn kernel(rows: &[&[f64]]) -> SubKernel {
    SubKernel::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
}

fn substochastic(max: usize) -> impl Strategy<Value = Matrix> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(prop::collection::vec(0.0f64..1.0, c), r).prop_map(|rows| {
            rows.into_iter()
                .map(|row| {
                    let s: f64 = row.iter().sum::<f64>().max(1.0);
                    row.into_iter().map(|v| v / s).collect()
                })
                .collect()
        })
    })
}

proptest! {
    #[test]
    fn composition_is_matrix_product(a in substochastic(4), seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 0);
        let b = SubKernel::random(a[0].len(), 3, &mut rng).to_rows();
        let got = SubKernel::from_rows(&a).unwrap().then(&SubKernel::from_rows(&b).unwrap()).unwrap();
        prop_assert!(close(&got.to_rows(), &matmul(&a, &b), 1e-12));
    }

    #[test]
    fn tensor_is_kronecker_product(a in substochastic(3), b in substochastic(3)) {
        let got = SubKernel::from_rows(&a).unwrap().tensor(&SubKernel::from_rows(&b).unwrap());
        prop_assert!(close(&got.to_rows(), &kron(&a, &b), 1e-12));
    }

    #[test]
    fn bayes_inverse_is_bayes_rule(seed in any::<u64>(), nx in 1usize..4, na in 1usize..4, nb in 1usize..4) {
        let mut rng = trial_rng(seed, 1);
        let f = SubKernel::random(nx, na, &mut rng);
        let g = SubKernel::random(na, nb, &mut rng);
        let inv = bayes_invert(&g, &f, TOL).unwrap();
        prop_assert_eq!((inv.dom(), inv.cod()), (nb * nx, na));
        for b in 0..nb {
            for x in 0..nx {
                let evidence: f64 = (0..na).map(|a| f.get(x, a) * g.get(a, b)).sum();
                for a in 0..na {
                    let want = if evidence <= TOL.value() { 0.0 } else { f.get(x, a) * g.get(a, b) / evidence };
                    prop_assert!((inv.get(b * nx + x, a) - want).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn rel_bayes_inverse_formula(seed in any::<u64>(), nx in 1usize..4, na in 1usize..4, nb in 1usize..4) {
        let mut rng = trial_rng(seed, 2);
        let f = FinRel::random(nx, na, &mut rng);
        let g = FinRel::random(na, nb, &mut rng);
        let inv = bayes_invert(&g, &f, TOL).unwrap();
        for b in 0..nb {
            for x in 0..nx {
                for a in 0..na {
                    prop_assert_eq!(inv.get(b * nx + x, a), f.get(x, a) && g.get(a, b));
                }
            }
        }
    }

    #[test]
    fn rel_preorder_is_subset_and_search_agrees(seed in any::<u64>(), nx in 1usize..4, ny in 1usize..4) {
        let mut rng = trial_rng(seed, 3);
        let g = FinRel::random(nx, ny, &mut rng);
        let f = if seed % 2 == 0 {
            FinRel::random(nx, ny, &mut rng)
        } else {
            FinRel::new(nx, ny, g.bits().iter().map(|&b| b && rand::Rng::gen_bool(&mut rng, 0.5)).collect()).unwrap()
        };
        let subset = f.bits().iter().zip(g.bits()).all(|(a, b)| !a || *b);
        prop_assert_eq!(conditional_leq(&f, &g, TOL).unwrap().holds, subset);
        prop_assert_eq!(generic_witness_search(&f, &g, SearchConfig::default()).unwrap().holds, subset);
    }

    #[test]
    fn finstoch_preorder_is_pointwise_domination(seed in any::<u64>(), nx in 1usize..5, ny in 1usize..5) {
        let mut rng = trial_rng(seed, 4);
        let g = SubKernel::random(nx, ny, &mut rng);
        let f = SubKernel::random(nx, ny, &mut rng);
        let dominated = f.entries().iter().zip(g.entries()).all(|(a, b)| *a <= b + TOL.value());
        let v = conditional_leq(&f, &g, TOL).unwrap();
        prop_assert_eq!(v.holds, dominated);
        if let Some(r) = v.witness {
            prop_assert!(f.residual(&cond_compose(&g, &r).unwrap()).unwrap() <= 1e-9);
        }
    }

    #[test]
    fn validity_is_a_dot_product(seed in any::<u64>(), n in 1usize..7) {
        let mut rng = trial_rng(seed, 5);
        let sigma = SubKernel::random(1, n, &mut rng);
        let p = SubKernel::random(n, 1, &mut rng);
        let dot: f64 = (0..n).map(|x| sigma.get(0, x) * p.get(x, 0)).sum();
        let v = pmc_core::laws::validity(&sigma, &p).unwrap().as_f64();
        prop_assert!((v - dot).abs() <= 1e-12);
    }

    #[test]
    fn cauchy_schwarz_sides_match_the_inequality_formula(seed in any::<u64>()) {
        let mut rng = trial_rng(seed, 6);
        let h = SubKernel::random(1, 3, &mut rng);
        let f = SubKernel::random(3, 2, &mut rng);
        let g = SubKernel::random(3, 2, &mut rng);
        let c = pmc_core::laws::check_cauchy_schwarz(&h, &f, &g, TOL).unwrap();
        for y in 0..2 {
            for z in 0..2 {
                let cross: f64 = (0..3).map(|a| h.get(0, a) * f.get(a, y) * g.get(a, z)).sum();
                let ff: f64 = (0..3).map(|a| h.get(0, a) * f.get(a, y) * f.get(a, y)).sum();
                let gg: f64 = (0..3).map(|a| h.get(0, a) * g.get(a, z) * g.get(a, z)).sum();
                prop_assert!((c.lhs.get(0, y * 2 + z) - cross * cross).abs() <= 1e-12);
                prop_assert!((c.rhs.get(0, y * 2 + z) - ff * gg).abs() <= 1e-12);
                prop_assert!(cross * cross <= ff * gg + 1e-12);
            }
        }
    }
}

#[test]
fn composition_example() {
    let f = kernel(&[&[0.5, 0.25]]);
    let g = kernel(&[&[1.0, 0.0], &[0.0, 0.5]]);
    assert_eq!(f.then(&g).unwrap().to_rows(), vec![vec![0.5, 0.125]]);
}

#[test]
fn row_masses() {
    let f = kernel(&[&[0.5, 0.5], &[0.2, 0.3]]);
    let m = f.then(&SubKernel::discard(2)).unwrap();
    assert!(close(&m.to_rows(), &vec![vec![1.0], vec![0.5]], 1e-15));
}

#[test]
fn kronecker_example() {
    let t = kernel(&[&[1.0, 0.0]]).tensor(&kernel(&[&[0.0, 1.0]]));
    assert_eq!(t.to_rows(), vec![vec![0.0, 1.0, 0.0, 0.0]]);
}

#[test]
fn copied_product_entry() {
    let f = kernel(&[&[0.5, 0.5], &[0.2, 0.3]]);
    let d = SubKernel::copy(2).then(&f.tensor(&f)).unwrap();
    assert!((d.get(1, 1) - 0.2 * 0.3).abs() < 1e-15);
}

#[test]
fn fair_coin_is_total_but_random() {
    let f = kernel(&[&[0.5, 0.5]]);
    assert!(f.is_total(TOL) && f.is_quasi_total(TOL) && !f.is_deterministic(TOL));
    let lhs = f.then(&SubKernel::copy(2)).unwrap();
    let rhs = SubKernel::copy(1).then(&f.tensor(&f)).unwrap();
    assert!(!lhs.approx_eq(&rhs, TOL).unwrap());
}

#[test]
fn discrete_examples() {
    let f = PartialFn::new(2, vec![Some(1), None]).unwrap();
    let g = PartialFn::new(2, vec![None, Some(0)]).unwrap();
    assert_eq!(f.then(&g).unwrap().table(), &[Some(0), None]);

    let r = FinRel::from_pairs(3, 3, &[(0, 1), (0, 2)]).unwrap();
    assert!(!r.is_deterministic(TOL));
}

#[test]
fn conditional_composition_examples() {
    let f = SubKernel::state(&[0.4, 0.6]).unwrap();
    let g = kernel(&[&[0.5, 0.5], &[0.5, 0.5]]);
    assert!(close(&cond_compose(&f, &g).unwrap().to_rows(), &vec![vec![0.2, 0.2, 0.3, 0.3]], 1e-15));

    let f = PartialFn::new(1, vec![Some(0)]).unwrap();
    let g = PartialFn::new(2, vec![Some(1)]).unwrap();
    assert_eq!(cond_compose(&f, &g).unwrap().table(), &[Some(1)]);
}

#[test]
fn conditional_examples() {
    let joint = SubKernel::state(&[0.2, 0.2, 0.3, 0.3]).unwrap();
    let c = conditional(&joint, (2, 2), TOL).unwrap();
    assert!(close(&c.marginal.to_rows(), &vec![vec![0.4, 0.6]], 1e-15));
    assert!(close(&c.conditional.to_rows(), &vec![vec![0.5, 0.5]; 2], 1e-15));

    let joint = SubKernel::state(&[0.5, 0.5, 0.0, 0.0]).unwrap();
    let c = conditional(&joint, (2, 2), TOL).unwrap();
    assert_eq!(c.conditional.row(1), &[0.0, 0.0]);
}

#[test]
fn bayes_examples() {
    let f = SubKernel::state(&[0.5, 0.5]).unwrap();
    let g = kernel(&[&[0.5, 0.5], &[0.0, 1.0]]);
    let inv = bayes_invert(&g, &f, TOL).unwrap();
    assert!(close(&inv.to_rows(), &vec![vec![1.0, 0.0], vec![1.0 / 3.0, 2.0 / 3.0]], 1e-12));

    let f = SubKernel::state(&[0.3, 0.0, 0.7]).unwrap();
    let inv = bayes_invert(&SubKernel::identity(3), &f, TOL).unwrap();
    let want: Matrix = (0..3).map(|b| (0..3).map(|a| if a == b && b != 1 { 1.0 } else { 0.0 }).collect()).collect();
    assert!(close(&inv.to_rows(), &want, 1e-15));
}

#[test]
fn order_examples() {
    let f = kernel(&[&[0.25, 0.25]]);
    let g = kernel(&[&[0.5, 0.5]]);
    assert!(conditional_leq(&f, &g, TOL).unwrap().holds);

    let f = kernel(&[&[0.2, 0.3]]);
    let g = kernel(&[&[0.5, 0.3]]);
    let v = conditional_leq(&f, &g, TOL).unwrap();
    assert!(v.holds);
    let r = v.witness.unwrap();
    assert!((r.get(0, 0) - 0.4).abs() < 1e-12 && (r.get(1, 0) - 1.0).abs() < 1e-12);
    assert!(!conditional_leq(&g, &f, TOL).unwrap().holds);

    let f = kernel(&[&[0.0, 0.0], &[0.3, 0.7]]);
    let g = kernel(&[&[0.4, 0.6], &[0.3, 0.7]]);
    let r = sharp_witness(&f, &g, TOL).unwrap();
    // index (y, x) = y·|X| + x
    assert_eq!(r.entries(), &[0.0, 1.0, 0.0, 1.0]);
    assert!(f.residual(&cond_compose(&g, &r).unwrap()).unwrap() <= 1e-9);
    assert!(restriction_leq(&f, &g, TOL).unwrap().holds);
}

#[test]
fn rel_scalars() {
    let zero = FinRel::empty(1, 1);
    let one = FinRel::identity(1);
    assert!(pmc_core::laws::is_zero_scalar(&zero, TOL).unwrap());
    assert!(!pmc_core::laws::is_zero_scalar(&one, TOL).unwrap());
    let f = FinRel::random(2, 2, &mut trial_rng(0, 0));
    assert!(one.tensor(&f).approx_eq(&f, TOL).unwrap());
}
