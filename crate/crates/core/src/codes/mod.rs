//! Cat and squeezed-cat codes under residual momentum-displacement noise:
//! state fidelities, Bloch-sphere averages, and the logical fidelity read
//! out with modular-quadrature Pauli operators.

pub mod channel;
pub mod fock;
pub mod qsp;

use std::sync::OnceLock;

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_hermite, gauss_legendre};
use fock::{cat_basis, required_truncation, squeeze_operator, apply_real, FockSpace, FockVector, C64};
use qsp::QspOperators;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Code {
    Cat { alpha: f64 },
    /// Cat code squeezed so that the position quadrature shrinks by
    /// `squeeze_factor` (`e^r`, below one).
    SqueezedCat { alpha: f64, squeeze_factor: f64 },
}

impl Code {
    pub fn alpha(&self) -> f64 {
        match *self {
            Code::Cat { alpha } | Code::SqueezedCat { alpha, .. } => alpha,
        }
    }

    /// Squeezing rescales the noise seen by the underlying cat code.
    pub fn noise_scale(&self) -> f64 {
        match *self {
            Code::Cat { .. } => 1.0,
            Code::SqueezedCat { squeeze_factor, .. } => squeeze_factor,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CodeSettings {
    /// Photon-number cutoff for the code states; `None` picks
    /// [`default_truncation`].
    pub n_trunc: Option<usize>,
    pub hermite_order: usize,
    /// Points per Bloch-sphere axis.
    pub bloch_order: usize,
}

impl Default for CodeSettings {
    fn default() -> Self {
        CodeSettings {
            n_trunc: None,
            hermite_order: 41,
            bloch_order: 16,
        }
    }
}

pub fn default_truncation(alpha: f64) -> usize {
    required_truncation(alpha).max(60)
}

/// Bloch-sphere rule: Gauss–Legendre in `cos ϑ`, uniform in `φ`. Returns
/// `(ϑ, φ, weight)` with weights summing to one.
pub fn bloch_grid(order: usize) -> Vec<(f64, f64, f64)> {
    let (u, w) = gauss_legendre(order);
    let mut out = Vec::with_capacity(order * order);
    for (ui, wi) in u.iter().zip(&w) {
        for m in 0..order {
            let phi = 2.0 * std::f64::consts::PI * m as f64 / order as f64;
            out.push((ui.acos(), phi, wi / (2.0 * order as f64)));
        }
    }
    out
}

/// Coefficients of `cos(ϑ/2)|0⟩ + e^{iφ} sin(ϑ/2)|1⟩`.
pub fn logical_coefficients(theta: f64, phi: f64) -> [C64; 2] {
    [
        C64::new((0.5 * theta).cos(), 0.0),
        C64::from_polar((0.5 * theta).sin(), phi),
    ]
}

type Kernel = [[C64; 2]; 2];

fn quadratic_form(k: &Kernel, c: &[C64; 2]) -> C64 {
    let mut s = C64::new(0.0, 0.0);
    for a in 0..2 {
        for b in 0..2 {
            s += c[a].conj() * k[a][b] * c[b];
        }
    }
    s
}

/// Fidelity calculator for one code with fixed truncation and rules.
#[derive(Debug)]
pub struct CodeEvaluator {
    code: Code,
    n_trunc: usize,
    space: FockSpace,
    basis: [FockVector; 2],
    position: [DVector<C64>; 2],
    hermite: (Vec<f64>, Vec<f64>),
    bloch: Vec<(f64, f64, f64)>,
    qsp: OnceLock<QspOperators>,
}

impl CodeEvaluator {
    pub fn new(code: Code, settings: &CodeSettings) -> Result<Self> {
        let alpha = code.alpha();
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::InvalidParameter(format!("cat amplitude must be positive, got {alpha}")));
        }
        let scale = code.noise_scale();
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidParameter(format!("squeeze factor must be positive, got {scale}")));
        }
        if settings.hermite_order == 0 || settings.bloch_order == 0 {
            return Err(Error::InvalidParameter("quadrature orders must be positive".into()));
        }
        let n_trunc = settings.n_trunc.unwrap_or_else(|| default_truncation(alpha));
        let dim = 2 * n_trunc;
        let [zero, one] = cat_basis(alpha, n_trunc)?;
        let basis = [zero.embed(dim), one.embed(dim)];
        let space = FockSpace::new(dim);
        let position = [space.to_position(&basis[0].amplitudes), space.to_position(&basis[1].amplitudes)];
        Ok(CodeEvaluator {
            code,
            n_trunc,
            space,
            basis,
            position,
            hermite: gauss_hermite(settings.hermite_order),
            bloch: bloch_grid(settings.bloch_order),
            qsp: OnceLock::new(),
        })
    }

    pub fn code(&self) -> Code {
        self.code
    }

    pub fn n_trunc(&self) -> usize {
        self.n_trunc
    }

    /// Logical basis in the working space (twice the truncation).
    pub fn basis(&self) -> &[FockVector; 2] {
        &self.basis
    }

    pub fn space(&self) -> &FockSpace {
        &self.space
    }

    pub fn logical_state(&self, theta: f64, phi: f64) -> FockVector {
        let [a, b] = logical_coefficients(theta, phi);
        FockVector::superpose(a, &self.basis[0], b, &self.basis[1])
    }

    /// Momentum kicks `(p, weight)` for noise width `sigma`, including the
    /// reduction from squeezing.
    fn kicks(&self, sigma: f64) -> Result<Vec<(f64, f64)>> {
        if !(sigma.is_finite() && sigma >= 0.0) {
            return Err(Error::InvalidParameter(format!("noise width must be non-negative, got {sigma}")));
        }
        let s = sigma * self.code.noise_scale();
        let norm = std::f64::consts::PI.sqrt();
        Ok(self.hermite.0.iter().zip(&self.hermite.1).map(|(x, w)| (s * x, w / norm)).collect())
    }

    /// `⟨a|exp(ipq)|b⟩` for each kick.
    fn kernels(&self, sigma: f64) -> Result<Vec<(f64, Kernel)>> {
        let nodes = self.space.nodes();
        let kicks = self.kicks(sigma)?;
        Ok(kicks
            .into_iter()
            .map(|(p, w)| {
                let mut k = [[C64::new(0.0, 0.0); 2]; 2];
                for (i, x) in nodes.iter().enumerate() {
                    let phase = C64::from_polar(1.0, p * x);
                    for a in 0..2 {
                        let left = self.position[a][i].conj() * phase;
                        for b in 0..2 {
                            k[a][b] += left * self.position[b][i];
                        }
                    }
                }
                (w, k)
            })
            .collect())
    }

    fn fidelity_with(kernels: &[(f64, Kernel)], c: &[C64; 2]) -> f64 {
        kernels.iter().map(|(w, k)| w * quadratic_form(k, c).norm_sqr()).sum()
    }

    /// Fidelity of the logical state `(ϑ, φ)` after the noise channel.
    pub fn fidelity(&self, theta: f64, phi: f64, sigma: f64) -> Result<f64> {
        let kernels = self.kernels(sigma)?;
        Ok(Self::fidelity_with(&kernels, &logical_coefficients(theta, phi)))
    }

    /// Fidelity averaged over the Bloch sphere.
    pub fn average_fidelity(&self, sigma: f64) -> Result<f64> {
        let kernels = self.kernels(sigma)?;
        Ok(self
            .bloch
            .iter()
            .map(|(t, p, w)| w * Self::fidelity_with(&kernels, &logical_coefficients(*t, *p)))
            .sum())
    }

    pub fn qsp_operators(&self) -> &QspOperators {
        self.qsp.get_or_init(|| QspOperators::new(self.space.dim()))
    }

    /// Logical images `⟨a|E†(O)|b⟩` of the modular Pauli operators X, Y, Z.
    fn pauli_images(&self, sigma: f64) -> Result<[Kernel; 3]> {
        if let Code::SqueezedCat { .. } = self.code {
            return Err(Error::InvalidParameter("modular readout is defined for the plain cat code".into()));
        }
        let ops = self.qsp_operators();
        let kicks = self.kicks(sigma)?;
        let mut out = [[[C64::new(0.0, 0.0); 2]; 2]; 3];
        for (p, w) in kicks {
            let moved = [
                self.space.displace(&self.basis[0].amplitudes, p),
                self.space.displace(&self.basis[1].amplitudes, p),
            ];
            for (slot, op) in out.iter_mut().zip([&ops.x, &ops.y, &ops.z]) {
                let images = [op * &moved[0], op * &moved[1]];
                for a in 0..2 {
                    for b in 0..2 {
                        slot[a][b] += moved[a].dotc(&images[b]) * w;
                    }
                }
            }
        }
        Ok(out)
    }

    fn logical_fidelity_with(images: &[Kernel; 3], theta: f64, phi: f64) -> f64 {
        let c = logical_coefficients(theta, phi);
        let axis = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
        let overlap: f64 = axis.iter().zip(images).map(|(n, k)| n * quadratic_form(k, &c).re).sum();
        0.5 * (1.0 + overlap)
    }

    /// Logical fidelity read out through the modular Pauli operators.
    pub fn qsp_fidelity(&self, theta: f64, phi: f64, sigma: f64) -> Result<f64> {
        let images = self.pauli_images(sigma)?;
        Ok(Self::logical_fidelity_with(&images, theta, phi))
    }

    pub fn qsp_average_fidelity(&self, sigma: f64) -> Result<f64> {
        let images = self.pauli_images(sigma)?;
        Ok(self
            .bloch
            .iter()
            .map(|(t, p, w)| w * Self::logical_fidelity_with(&images, *t, *p))
            .sum())
    }
}

/// Squeezed-cat basis built by applying the squeezing operator in Fock
/// space, in a working space of dimension `dim`.
pub fn squeezed_cat_basis(alpha: f64, squeeze_factor: f64, n_trunc: usize, dim: usize) -> Result<[FockVector; 2]> {
    let [zero, one] = cat_basis(alpha, n_trunc)?;
    let s = squeeze_operator(squeeze_factor, dim, 2 * dim)?;
    Ok([apply_real(&s, &zero, dim), apply_real(&s, &one, dim)])
}

pub fn average_fidelity(code: Code, sigma: f64) -> Result<f64> {
    CodeEvaluator::new(code, &CodeSettings::default())?.average_fidelity(sigma)
}

pub fn qsp_average_fidelity(alpha: f64, sigma: f64) -> Result<f64> {
    CodeEvaluator::new(Code::Cat { alpha }, &CodeSettings::default())?.qsp_average_fidelity(sigma)
}
