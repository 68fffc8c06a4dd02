#![allow(dead_code)]

use nhq_core::{ComplexMatrix, HermitianOperator, NonHermitianHamiltonian, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> HermitianOperator {
    let mut m = ComplexMatrix::zeros(n);
    for i in 0..n {
        m[(i, i)] = C64::new(rng.gen_range(-scale..scale), 0.0);
        for j in i + 1..n {
            let z = C64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianOperator::new(m).unwrap()
}

/// Γ = A A† + floor·I: positive definite and generically not ∝ I.
pub fn random_decay(rng: &mut impl Rng, n: usize, scale: f64, floor: f64) -> HermitianOperator {
    let mut a = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let mut g = a.matmul(&a.adjoint()).scale(scale / n as f64);
    g.axpy(floor, &ComplexMatrix::identity(n));
    HermitianOperator::new(g).unwrap()
}

/// Full-rank state with unit trace, eigenvalues bounded away from zero.
pub fn random_mixed_state(rng: &mut impl Rng, n: usize) -> HermitianOperator {
    let mut a = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let mut m = a.matmul(&a.adjoint());
    m.axpy(0.3, &ComplexMatrix::identity(n));
    let tr = m.trace().re;
    HermitianOperator::new(m.scale(1.0 / tr)).unwrap()
}

pub fn random_model(seed: u64, n: usize) -> (NonHermitianHamiltonian, HermitianOperator) {
    let mut r = rng(seed);
    let h = random_hermitian(&mut r, n, 1.0);
    let g = random_decay(&mut r, n, 0.4, 0.02);
    let rho = random_mixed_state(&mut r, n);
    (NonHermitianHamiltonian::new(h, g).unwrap(), rho)
}
