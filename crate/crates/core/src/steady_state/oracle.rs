//! Reference solver for verification. Builds the full 3x3 complex system
//! from the parameters and solves it with Gaussian elimination and partial
//! pivoting, sharing no algebra with [`super::solve_general`].

use num_complex::Complex64;

use super::SteadyState;
use crate::error::{Error, Result};
use crate::model::{SpinState, ValidatedParams};

type Row = [Complex64; 4];

pub fn oracle_solve(
    params: &ValidatedParams,
    omega_l: f64,
    spin: SpinState,
) -> Result<SteadyState> {
    let p = params.raw();
    let i = Complex64::i();
    let zero = Complex64::new(0.0, 0.0);
    let (g_e, g_o) = match spin {
        SpinState::Up => (p.g_e, p.g_o),
        SpinState::Down => (zero, zero),
    };
    let kappa_e = p.kappa_e0 + p.kappa_e1;
    let kappa_o = p.kappa_o0 + p.kappa_o1;
    let gamma = 0.5 * p.gamma_s + p.gamma_p;

    // Augmented matrix [M | b]; unknowns (c_e, c_o, σ).
    let mut m: [Row; 3] = [
        [
            i * (p.omega_e - omega_l) + kappa_e,
            zero,
            i * g_e,
            i * p.kappa_e1.sqrt(),
        ],
        [
            zero,
            i * (p.omega_o - omega_l) + kappa_o,
            i * g_o,
            p.kappa_o1.sqrt().into(),
        ],
        [
            i * g_e.conj(),
            i * g_o.conj(),
            i * (p.omega_a - omega_l) + gamma,
            zero,
        ],
    ];
    let x = gaussian_elimination(&mut m).ok_or(Error::Singular { omega_l })?;
    let (c_e, c_o, sigma) = (x[0], x[1], x[2]);

    let from_even = c_e * i * p.kappa_e1.sqrt();
    let from_odd = c_o * p.kappa_o1.sqrt();
    Ok(SteadyState {
        spin,
        omega_l,
        c_e,
        c_o,
        sigma,
        t: Complex64::new(1.0, 0.0) + from_even - from_odd,
        r: from_even + from_odd,
        loss_cavity_e: 2.0 * p.kappa_e0 * c_e.norm_sqr(),
        loss_cavity_o: 2.0 * p.kappa_o0 * c_o.norm_sqr(),
        loss_emitter: 2.0 * gamma * sigma.norm_sqr(),
    })
}

fn gaussian_elimination(m: &mut [Row; 3]) -> Option<[Complex64; 3]> {
    let n = 3;
    let scale = m
        .iter()
        .flat_map(|row| row[..n].iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return None;
    }
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .unwrap();
        if m[pivot][col].norm() <= 1e-14 * scale {
            return None;
        }
        m.swap(col, pivot);
        for row in col + 1..n {
            let factor = m[row][col] / m[col][col];
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            let pivot_row = m[col];
            for (target, &src) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *target -= factor * src;
            }
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); 3];
    for row in (0..n).rev() {
        let mut acc = m[row][n];
        for k in row + 1..n {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}
