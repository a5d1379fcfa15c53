//! Gaussian random momentum displacements `exp(i p q)` with `p` drawn from
//! a normal distribution of variance `σ²/2`.

use nalgebra::{DMatrix, DVector};

use super::fock::{FockSpace, FockVector, C64};
use crate::error::{Error, Result};
use crate::quadrature::gauss_hermite;

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(pub DMatrix<C64>);

impl DensityMatrix {
    pub fn pure(state: &FockVector) -> Self {
        DensityMatrix(&state.amplitudes * state.amplitudes.adjoint())
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn expectation(&self, op: &DMatrix<C64>) -> C64 {
        (op * &self.0).trace()
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with(&self, psi: &DVector<C64>) -> f64 {
        psi.dotc(&(&self.0 * psi)).re
    }
}

/// Displacement noise of width `σ`, averaged with a Gauss–Hermite rule.
#[derive(Debug, Clone, PartialEq)]
pub struct DisplacementNoise {
    pub sigma: f64,
    /// Momentum kicks and their probability weights.
    pub kicks: Vec<(f64, f64)>,
}

impl DisplacementNoise {
    pub fn new(sigma: f64, order: usize) -> Result<Self> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("noise width must be non-negative, got {sigma}")));
        }
        let (x, w) = gauss_hermite(order);
        let norm = std::f64::consts::PI.sqrt();
        let kicks = x.iter().zip(&w).map(|(x, w)| (sigma * x, w / norm)).collect();
        Ok(DisplacementNoise { sigma, kicks })
    }

    /// Channel output. Displacements are diagonal in the position
    /// eigenbasis, so the channel multiplies `ρ` element-wise there.
    pub fn apply(&self, space: &FockSpace, rho: &DensityMatrix) -> DensityMatrix {
        let dim = space.dim();
        let x = space.nodes();
        let mask = DMatrix::from_fn(dim, dim, |k, l| {
            self.kicks
                .iter()
                .map(|(p, w)| C64::from_polar(*w, p * (x[k] - x[l])))
                .sum::<C64>()
        });
        let u = space.modes().map(|v| C64::new(v, 0.0));
        let inner = u.transpose() * &rho.0 * &u;
        let damped = inner.component_mul(&mask);
        DensityMatrix(&u * damped * u.transpose())
    }
}
