//! Closed-form two-qubit estimates written entry by entry in terms of the
//! input matrix. Indices 0..3 stand for `00, 01, 10, 11`.

use crate::linalg::{Operator, C64, ONE};

fn build(rows: [[C64; 4]; 4]) -> Operator {
    Operator::from_rows(rows.iter().map(|r| r.to_vec()).collect()).expect("4x4 literal")
}

/// ζ_X with `p = 5`: exact diagonal and corners; the remaining entries mix
/// pairs of elements that share a flipped-register partner.
pub fn zeta_x(rho: &Operator) -> Operator {
    let r = |i: usize, j: usize| rho[(i, j)];
    build([
        [r(0, 0), r(0, 1) + r(2, 3), r(0, 2) + r(1, 3), r(0, 3)],
        [r(1, 0) + r(3, 2), r(1, 1), r(1, 2), r(1, 3) + r(0, 2)],
        [r(2, 0) + r(3, 1), r(2, 1), r(2, 2), r(2, 3) + r(0, 1)],
        [r(3, 0), r(3, 1) + r(2, 0), r(3, 2) + r(1, 0), r(3, 3)],
    ])
}

/// ζ_1 with `p = 5`: exact single-flip entries, diagonal `2ρ_ii − ρ_īī`,
/// zero corners.
pub fn zeta_1(rho: &Operator) -> Operator {
    let r = |i: usize, j: usize| rho[(i, j)];
    let z = C64::new(0.0, 0.0);
    let two = C64::new(2.0, 0.0);
    build([
        [two * r(0, 0) - r(3, 3), r(0, 1), r(0, 2), z],
        [r(1, 0), two * r(1, 1) - r(2, 2), z, r(1, 3)],
        [r(2, 0), z, two * r(2, 2) - r(1, 1), r(2, 3)],
        [z, r(3, 1), r(3, 2), two * r(3, 3) - r(0, 0)],
    ])
}

/// ζ_1a (`{1⊗1, H⊗1, HS⊗1}`) with `p = 3`.
pub fn zeta_1a(rho: &Operator) -> Operator {
    let r = |i: usize, j: usize| rho[(i, j)];
    let z = C64::new(0.0, 0.0);
    let d = |i: usize, partner: usize| -ONE + r(i, i) * 2.0 + r(partner, partner);
    build([
        [d(0, 2), z, r(0, 2), z],
        [z, d(1, 3), z, r(1, 3)],
        [r(2, 0), z, d(2, 0), z],
        [z, r(3, 1), z, d(3, 1)],
    ])
}

/// ζ_1b (`{1⊗1, 1⊗H, 1⊗HS}`) with `p = 3`.
pub fn zeta_1b(rho: &Operator) -> Operator {
    let r = |i: usize, j: usize| rho[(i, j)];
    let z = C64::new(0.0, 0.0);
    let d = |i: usize, partner: usize| -ONE + r(i, i) * 2.0 + r(partner, partner);
    build([
        [d(0, 1), r(0, 1), z, z],
        [r(1, 0), d(1, 0), z, z],
        [z, z, d(2, 3), r(2, 3)],
        [z, z, r(3, 2), d(3, 2)],
    ])
}

/// Forward-channel kernel of the single unitary `H⊗H`, scaled by 4.
pub fn b_h(rho: &Operator) -> Operator {
    let r = |i: usize, j: usize| rho[(i, j)];
    let tr = rho.trace();
    let s01 = r(0, 1) + r(1, 0) + r(2, 3) + r(3, 2);
    let s02 = r(0, 2) + r(1, 3) + r(2, 0) + r(3, 1);
    let s03 = r(0, 3) + r(1, 2) + r(2, 1) + r(3, 0);
    build([
        [tr, s01, s02, s03],
        [s01, tr, s03, s02],
        [s02, s03, tr, s01],
        [s03, s02, s01, tr],
    ])
}

/// Forward-channel kernel of the single unitary `HS⊗HS`, scaled by 4.
pub fn b_hs(rho: &Operator) -> Operator {
    let r = |i: usize, j: usize| rho[(i, j)];
    let tr = rho.trace();
    let a = r(0, 1) - r(1, 0) + r(2, 3) - r(3, 2);
    let b = r(0, 2) + r(1, 3) - r(2, 0) - r(3, 1);
    let c = r(0, 3) - r(1, 2) - r(2, 1) + r(3, 0);
    let e = -r(0, 3) + r(1, 2) + r(2, 1) - r(3, 0);
    build([
        [tr, a, b, c],
        [-a, tr, e, b],
        [-b, e, tr, a],
        [c, -b, -a, tr],
    ])
}

/// `−1 + (p/4)·B` for a single-unitary set with kernel `B`.
pub fn single_unitary(p: f64, kernel: &Operator) -> Operator {
    let mut out = kernel.scale_real(p / 4.0);
    out.add_scaled(-ONE, &Operator::identity(4).expect("4x4"));
    out
}
