//! Modular-quadrature Pauli operators for the cat code: `X = sign(p)`,
//! `Z = (-1)^n`, `Y = i X Z`.

use nalgebra::DMatrix;

use super::fock::C64;
use crate::quadrature::gauss_legendre;

#[derive(Debug, Clone)]
pub struct QspOperators {
    pub x: DMatrix<C64>,
    pub y: DMatrix<C64>,
    pub z: DMatrix<C64>,
}

/// Hermite functions `ψ_0..ψ_{dim-1}` at each point, as a `dim × points` matrix.
fn hermite_functions(dim: usize, xs: &[f64]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(dim, xs.len());
    let c0 = std::f64::consts::PI.powf(-0.25);
    for (j, &x) in xs.iter().enumerate() {
        let mut prev = 0.0;
        let mut cur = c0 * (-0.5 * x * x).exp();
        for n in 0..dim {
            out[(n, j)] = cur;
            let nf = n as f64;
            let next = (2.0 / (nf + 1.0)).sqrt() * x * cur - (nf / (nf + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
        }
    }
    out
}

/// `2 ∫_0^∞ ψ_m ψ_n dx` on a composite Gauss–Legendre grid with `panels`
/// panels over `[0, length]`.
fn half_line_overlaps(dim: usize, length: f64, panels: usize) -> DMatrix<f64> {
    let (gx, gw) = gauss_legendre(20);
    let h = length / panels as f64;
    let mut xs = Vec::with_capacity(panels * gx.len());
    let mut ws = Vec::with_capacity(panels * gx.len());
    for p in 0..panels {
        let mid = (p as f64 + 0.5) * h;
        for (x, w) in gx.iter().zip(&gw) {
            xs.push(mid + 0.5 * h * x);
            ws.push(0.5 * h * w);
        }
    }
    let psi = hermite_functions(dim, &xs);
    let weighted = DMatrix::from_fn(dim, xs.len(), |n, j| psi[(n, j)] * ws[j]);
    weighted * psi.transpose()
}

/// Matrix of `sign(p)` in the Fock basis. It is Hermitian and purely
/// imaginary: `⟨m|sign(p)|n⟩ = i^(m-n) · 2∫_0^∞ ψ_m ψ_n` for odd `m + n`.
pub fn sign_momentum(dim: usize) -> DMatrix<C64> {
    let length = (2.0 * dim as f64 + 1.0).sqrt() + 10.0;
    let mut panels = 32;
    let mut current = half_line_overlaps(dim, length, panels);
    while panels < 4096 {
        panels *= 2;
        let next = half_line_overlaps(dim, length, panels);
        let change = (&next - &current).amax();
        current = next;
        if change < 1e-13 {
            break;
        }
    }
    DMatrix::from_fn(dim, dim, |m, n| {
        let v = 2.0 * current[(m, n)];
        if (m + n) % 2 == 0 || v.abs() < 1e-12 {
            return C64::new(0.0, 0.0);
        }
        // i^(m-n) with m - n odd is ±i.
        let sign = if (m as i64 - n as i64).rem_euclid(4) == 1 { 1.0 } else { -1.0 };
        C64::new(0.0, sign * v)
    })
}

impl QspOperators {
    pub fn new(dim: usize) -> Self {
        let x = sign_momentum(dim);
        let z = DMatrix::from_fn(dim, dim, |m, n| {
            if m == n {
                C64::new(if m % 2 == 0 { 1.0 } else { -1.0 }, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let y = &x * &z * C64::new(0.0, 1.0);
        QspOperators { x, y, z }
    }
}
