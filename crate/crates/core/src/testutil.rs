use rand::Rng;

use crate::linalg::{Operator, C64};
use crate::state::{gaussian_c64, DensityMatrix};

pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Operator {
    let g = Operator::from_vec(dim, (0..dim * dim).map(|_| gaussian_c64(rng)).collect()).unwrap();
    g.hermitian_part()
}

pub fn bell_phi_plus() -> DensityMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = C64::new(0.0, 0.0);
    DensityMatrix::pure(&[C64::new(s, 0.0), z, z, C64::new(s, 0.0)]).unwrap()
}
