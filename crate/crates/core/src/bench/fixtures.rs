//! Named states and observables used by the benchmarks.

use std::f64::consts::PI;

use crate::error::{PqstError, Result};
use crate::linalg::{Operator, C64};
use crate::operators::Observable;
use crate::state::{DensityMatrix, Validation};

/// A named fixture: a state, an observable, or both, with the reference
/// values it should reproduce.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: String,
    pub state: Option<DensityMatrix>,
    pub observable: Option<Observable>,
    pub expected_norm: Option<f64>,
    pub expected_purity: Option<f64>,
    pub expected_entanglement: Option<f64>,
    /// The state is supported on the diagonal and anti-diagonal.
    pub x_state: bool,
}

pub const FIXTURE_NAMES: [&str; 15] = [
    "rho2",
    "rho2X",
    "rho3",
    "rho3X",
    "table2-i",
    "table2-ii",
    "table2-iii",
    "table2-iv",
    "table2-v",
    "O2X",
    "O2NX",
    "O2",
    "O3X",
    "O3NX",
    "O3",
];

const RHO2_UPPER: [(f64, f64); 10] = [
    (0.3484, 0.0),
    (0.0242, 0.1014),
    (0.0118, -0.0301),
    (-0.1986, 0.0933),
    (0.2641, 0.0),
    (0.0447, -0.0050),
    (-0.0548, -0.0516),
    (0.1210, 0.0),
    (0.0263, -0.0367),
    (0.2665, 0.0),
];

const RHO3_UPPER: [(f64, f64); 36] = [
    (0.1855, 0.0),
    (-0.0429, 0.0097),
    (0.0075, -0.0288),
    (0.0319, -0.0305),
    (-0.0640, -0.0150),
    (0.0061, 0.0318),
    (-0.0125, -0.0371),
    (0.0348, -0.0563),
    (0.1172, 0.0),
    (0.0383, 0.0321),
    (0.0171, -0.0024),
    (0.0434, -0.0252),
    (0.0786, -0.0181),
    (-0.0078, 0.0359),
    (-0.0350, 0.0078),
    (0.1012, 0.0),
    (0.0545, -0.0414),
    (0.0106, -0.0673),
    (0.0505, -0.0307),
    (0.0487, -0.0143),
    (-0.0449, 0.0372),
    (0.0957, 0.0),
    (0.0118, -0.0219),
    (0.0630, 0.0153),
    (0.0474, -0.0341),
    (-0.0510, 0.0032),
    (0.1038, 0.0),
    (0.0349, 0.0267),
    (-0.0042, 0.0408),
    (-0.0387, -0.0013),
    (0.1308, 0.0),
    (0.0294, -0.0356),
    (-0.0518, 0.0164),
    (0.1359, 0.0),
    (-0.0453, 0.0288),
    (0.1300, 0.0),
];

fn hermitian_from_upper(d: usize, upper: &[(f64, f64)]) -> Result<Operator> {
    let mut m = Operator::zeros(d)?;
    let mut it = upper.iter();
    for i in 0..d {
        for j in i..d {
            let &(re, im) = it.next().expect("d(d+1)/2 entries");
            m[(i, j)] = C64::new(re, im);
            m[(j, i)] = C64::new(re, -im);
        }
    }
    Ok(m)
}

/// Diagonal plus anti-diagonal; `anti[k]` is entry `(k, d-1-k)` for the
/// upper half.
fn x_matrix(diag: &[f64], anti: &[(f64, f64)]) -> Result<Operator> {
    let d = diag.len();
    let mut m = Operator::diagonal(&diag.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())?;
    for (k, &(re, im)) in anti.iter().enumerate() {
        m[(k, d - 1 - k)] = C64::new(re, im);
        m[(d - 1 - k, k)] = C64::new(re, -im);
    }
    Ok(m)
}

fn real_vec(v: &[f64]) -> Vec<C64> {
    v.iter().map(|&x| C64::new(x, 0.0)).collect()
}

/// `sin θ|0⟩ + cos θ|1⟩`
fn tilted(theta: f64) -> Vec<C64> {
    real_vec(&[theta.sin(), theta.cos()])
}

fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

/// `1/2 − c·(a_x I_x + a_y I_y + a_z I_z)` with `I_k = σ_k / 2`.
fn spin_factor(c: f64, axis: [f64; 3]) -> Operator {
    let [ax, ay, az] = axis;
    let h = 0.5 * c;
    Operator::from_rows(vec![
        vec![C64::new(0.5 - h * az, 0.0), C64::new(-h * ax, h * ay)],
        vec![C64::new(-h * ax, -h * ay), C64::new(0.5 + h * az, 0.0)],
    ])
    .expect("2x2")
}

fn product_state(a: Operator, b: Operator) -> Result<DensityMatrix> {
    DensityMatrix::new(a.kron(&b)?)
}

fn state(name: &str) -> Result<Option<DensityMatrix>> {
    let printed = |op| DensityMatrix::with_validation(op, Validation::PRINTED);
    Ok(Some(match name {
        "rho2" => printed(hermitian_from_upper(4, &RHO2_UPPER)?)?,
        "rho2X" => printed(x_matrix(
            &[0.19375, 0.30625, 0.30625, 0.19375],
            &[(0.09375, 0.0), (-0.20625, 0.0)],
        )?)?,
        "rho3" => printed(hermitian_from_upper(8, &RHO3_UPPER)?)?,
        "rho3X" => printed(x_matrix(
            &[0.20, 0.15, 0.10, 0.18, 0.12, 0.10, 0.08, 0.07],
            &[(0.05, 0.02), (0.04, 0.03), (0.03, 0.01), (0.06, 0.02)],
        )?)?,
        "table2-i" => DensityMatrix::pure(&kron_vec(&tilted(PI / 6.0), &tilted(PI / 3.0)))?,
        "table2-ii" => DensityMatrix::pure(&kron_vec(&tilted(PI / 8.0), &tilted(PI / 12.0)))?,
        "table2-iii" => {
            let (c, s) = ((PI / 4.0).cos(), (PI / 4.0).sin());
            let (c6, s6) = ((PI / 6.0).cos(), (PI / 6.0).sin());
            product_state(spin_factor(c, [-s, 0.0, c]), spin_factor(c, [-s6, 0.0, c6]))?
        }
        "table2-iv" => {
            let c = (PI / 6.0).cos();
            let (c4, s4) = ((PI / 4.0).cos(), (PI / 4.0).sin());
            let (c3, s3) = ((PI / 3.0).cos(), (PI / 3.0).sin());
            product_state(spin_factor(c, [0.0, s4, c4]), spin_factor(c, [s3, 0.0, c3]))?
        }
        "table2-v" => {
            let (s6, c6) = ((PI / 6.0).sin(), (PI / 6.0).cos());
            let (s12, c12) = ((PI / 12.0).sin(), (PI / 12.0).cos());
            DensityMatrix::pure(&real_vec(&[s6 * s12, s6 * c12, s12 * c6, -c6 * c12]))?
        }
        _ => return Ok(None),
    }))
}

fn observable(name: &str) -> Result<Option<(Observable, f64)>> {
    let (text, norm) = match name {
        "O2X" => ("8 ZZ; 2 XY; 3 XX; -10 IZ", 18.630),
        "O2NX" => ("7 XZ; 15 YZ; 12 ZX", 28.553),
        "O2" => ("8 ZY; 12 XZ; 3 XX; -10 IZ; 9 II", 34.061),
        "O3X" => ("2 IIZ; 4 XXX; 6 XYX; 8 YYX; 10 IZZ; 12 XXX", 34.819),
        "O3NX" => ("2 XZY; 4 YIY", 4.472),
        "O3" => ("5 XXX; 10 ZZZ; 7 XYY; -6 ZIZ; 6 YYY; 7 ZXX; -2 ZXI", 25.038),
        _ => return Ok(None),
    };
    Ok(Some((text.parse()?, norm)))
}

pub fn load_fixture(name: &str) -> Result<Fixture> {
    let mut f = Fixture {
        name: name.to_string(),
        state: state(name)?,
        observable: None,
        expected_norm: None,
        expected_purity: None,
        expected_entanglement: None,
        x_state: matches!(name, "rho2X" | "rho3X"),
    };
    if let Some((obs, norm)) = observable(name)? {
        f.observable = Some(obs);
        f.expected_norm = Some(norm);
    }
    match name {
        "table2-i" | "table2-ii" => {
            f.expected_purity = Some(1.0);
            f.expected_entanglement = Some(0.0);
        }
        "table2-iii" => {
            f.expected_purity = Some(0.56);
            f.expected_entanglement = Some(0.0);
        }
        "table2-iv" => {
            f.expected_purity = Some(0.765);
            f.expected_entanglement = Some(0.0);
        }
        "table2-v" => {
            f.expected_purity = Some(1.0);
            f.expected_entanglement = Some(0.28);
        }
        _ => {}
    }
    if f.state.is_none() && f.observable.is_none() {
        return Err(PqstError::UnknownFixture(name.to_string()));
    }
    Ok(f)
}

pub fn fixture_state(name: &str) -> Result<DensityMatrix> {
    load_fixture(name)?
        .state
        .ok_or_else(|| PqstError::UnknownFixture(format!("{name} is not a state fixture")))
}

pub fn fixture_observable(name: &str) -> Result<Observable> {
    load_fixture(name)?
        .observable
        .ok_or_else(|| PqstError::UnknownFixture(format!("{name} is not an observable fixture")))
}
