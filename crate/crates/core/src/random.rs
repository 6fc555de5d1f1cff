//! Seeded random morphisms for the law harness.
//!
//! Kernel rows are Dirichlet-style vectors scaled by a mass drawn uniformly
//! from `[0, 1]`; one row in five gets an exact mass of `0` or `1` so that
//! boundary cases show up. Partial functions pick each output uniformly from
//! the codomain plus "undefined". Relations flip a fair coin per pair.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::discrete::{FinRel, PartialFn};
use crate::finstoch::SubKernel;
use crate::morphism::Morphism;

/// Generator for one trial; independent of how trials are scheduled.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub trait Random: Morphism {
    fn random<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self;
    fn random_quasi_total<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self;
    fn random_deterministic<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self;
    /// Total and deterministic; a plain function when `cod > 0`.
    fn random_function<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self;
}

fn dirichlet_row<R: Rng + ?Sized>(cols: usize, mass: f64, rng: &mut R) -> Vec<f64> {
    if cols == 0 {
        return Vec::new();
    }
    let w: Vec<f64> = (0..cols).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        let mut row = vec![0.0; cols];
        row[rng.gen_range(0..cols)] = mass;
        return row;
    }
    w.into_iter().map(|v| v / total * mass).collect()
}

fn kernel_from_rows(rows: usize, cols: usize, data: Vec<Vec<f64>>) -> SubKernel {
    SubKernel::from_data_unchecked(rows, cols, data.concat())
}

impl Random for SubKernel {
    fn random<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self {
        let rows = (0..dom)
            .map(|_| {
                let mass = if rng.gen_bool(0.2) {
                    if rng.gen_bool(0.5) {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    rng.gen::<f64>()
                };
                dirichlet_row(cod, mass, rng)
            })
            .collect();
        kernel_from_rows(dom, cod, rows)
    }

    fn random_quasi_total<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self {
        let rows = (0..dom)
            .map(|_| {
                let mass = if rng.gen_bool(0.2) { 0.0 } else { 1.0 };
                dirichlet_row(cod, mass, rng)
            })
            .collect();
        kernel_from_rows(dom, cod, rows)
    }

    fn random_deterministic<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self {
        let mut data = vec![0.0; dom * cod];
        for x in 0..dom {
            if cod > 0 && rng.gen_bool(0.8) {
                data[x * cod + rng.gen_range(0..cod)] = 1.0;
            }
        }
        SubKernel::from_data_unchecked(dom, cod, data)
    }

    fn random_function<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self {
        let mut data = vec![0.0; dom * cod];
        if cod > 0 {
            for x in 0..dom {
                data[x * cod + rng.gen_range(0..cod)] = 1.0;
            }
        }
        SubKernel::from_data_unchecked(dom, cod, data)
    }
}

impl Random for PartialFn {
    fn random<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self {
        let table = (0..dom)
            .map(|_| {
                let k = rng.gen_range(0..=cod);
                (k < cod).then_some(k)
            })
            .collect();
        PartialFn::new(cod, table).expect("outputs in range")
    }

    fn random_quasi_total<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self {
        Self::random(dom, cod, rng)
    }

    fn random_deterministic<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self {
        Self::random(dom, cod, rng)
    }

    fn random_function<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self {
        let table = (0..dom)
            .map(|_| (cod > 0).then(|| rng.gen_range(0..cod)))
            .collect();
        PartialFn::new(cod, table).expect("outputs in range")
    }
}

impl Random for FinRel {
    fn random<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self {
        let bits = (0..dom * cod).map(|_| rng.gen_bool(0.5)).collect();
        FinRel::new(dom, cod, bits).expect("sized")
    }

    fn random_quasi_total<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self {
        Self::random(dom, cod, rng)
    }

    /// At most one output per input.
    fn random_deterministic<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self {
        let f = PartialFn::random(dom, cod, rng);
        FinRel::from_fn(dom, cod, |x, y| f.apply(x) == Some(y))
    }

    fn random_function<R: Rng + ?Sized>(dom: usize, cod: usize, rng: &mut R) -> Self {
        let f = PartialFn::random_function(dom, cod, rng);
        FinRel::from_fn(dom, cod, |x, y| f.apply(x) == Some(y))
    }
}

/// A kernel whose entries are multiples of `1 / denom`.
pub fn random_lattice_kernel<R: Rng + ?Sized>(
    dom: usize,
    cod: usize,
    denom: u32,
    rng: &mut R,
) -> SubKernel {
    let mut data = vec![0.0; dom * cod];
    if cod > 0 {
        for x in 0..dom {
            let units = rng.gen_range(0..=denom);
            let mut counts = vec![0u32; cod];
            for _ in 0..units {
                counts[rng.gen_range(0..cod)] += 1;
            }
            for (y, c) in counts.into_iter().enumerate() {
                data[x * cod + y] = f64::from(c) / f64::from(denom);
            }
        }
    }
    SubKernel::from_data_unchecked(dom, cod, data)
}

/// A random state `I → X`, i.e. a kernel with one row.
pub fn random_state<M: Random, R: Rng + ?Sized>(n: usize, rng: &mut R) -> M {
    M::random(1, n, rng)
}

/// A random effect `X → I`.
pub fn random_effect<M: Random, R: Rng + ?Sized>(n: usize, rng: &mut R) -> M {
    M::random(n, 1, rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphism::Tolerance;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| trial_rng(7, 3).gen()).collect();
        let b: Vec<u64> = (0..4).map(|_| trial_rng(7, 3).gen()).collect();
        assert_eq!(a, b);
        assert_ne!(trial_rng(7, 3).gen::<u64>(), trial_rng(7, 4).gen::<u64>());
    }

    #[test]
    fn generated_kernels_are_substochastic() {
        let mut rng = trial_rng(1, 0);
        for _ in 0..200 {
            let (d, c) = (rng.gen_range(0..5), rng.gen_range(0..5));
            let k = SubKernel::random(d, c, &mut rng);
            k.validate(Tolerance::DEFAULT).unwrap();
            let q = SubKernel::random_quasi_total(d, c, &mut rng);
            assert!(q.is_quasi_total(Tolerance::DEFAULT));
            let det = SubKernel::random_deterministic(d, c, &mut rng);
            assert!(det.is_deterministic(Tolerance::DEFAULT));
            let l = random_lattice_kernel(d, c, 16, &mut rng);
            l.validate(Tolerance::DEFAULT).unwrap();
        }
    }

    #[test]
    fn discrete_generators_respect_their_class() {
        let mut rng = trial_rng(2, 0);
        let tol = Tolerance::DEFAULT;
        for _ in 0..200 {
            let (d, c) = (rng.gen_range(0..4), rng.gen_range(1..4));
            assert!(FinRel::random_deterministic(d, c, &mut rng).is_deterministic(tol));
            let f = FinRel::random_function(d, c, &mut rng);
            assert!(f.is_deterministic(tol) && f.is_total(tol));
            assert!(PartialFn::random_function(d, c, &mut rng).is_total(tol));
        }
    }
}
