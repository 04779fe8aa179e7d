//! Seeded fixtures shared by the benchmarks.

use fmsys::random::{gaussian_vector, random_dissipative_system, random_row_contraction};
use fmsys::{ComplexVector, RowContractionTuple, SystemRealization};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Fixture {
    pub sys: SystemRealization,
    pub x0: ComplexVector,
    pub tuple: RowContractionTuple,
    pub rng: ChaCha8Rng,
}

pub fn fixture(arity: usize, dim_x: usize, dim_k: usize) -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed + arity as u64);
    let sys = random_dissipative_system(&mut rng, arity, dim_x, 1, 1, 0.95).expect("valid shapes");
    let x0 = gaussian_vector(&mut rng, dim_x);
    let tuple = random_row_contraction(&mut rng, arity, dim_k, 0.5).expect("norm below 1");
    Fixture { sys, x0, tuple, rng }
}
