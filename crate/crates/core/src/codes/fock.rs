//! Truncated Fock-space states and the position eigenbasis used to apply
//! displacements in momentum.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;

/// State in a truncated Fock basis together with the probability weight
/// that fell outside the truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub amplitudes: DVector<C64>,
    pub norm_deficit: f64,
}

impl FockVector {
    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Zero-pad to a larger dimension.
    pub fn embed(&self, dim: usize) -> FockVector {
        assert!(dim >= self.dim(), "cannot embed into a smaller space");
        let mut amplitudes = DVector::zeros(dim);
        amplitudes.rows_mut(0, self.dim()).copy_from(&self.amplitudes);
        FockVector {
            amplitudes,
            norm_deficit: self.norm_deficit,
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `a·self + b·other`, normalised.
    pub fn superpose(a: C64, x: &FockVector, b: C64, y: &FockVector) -> FockVector {
        let v = &x.amplitudes * a + &y.amplitudes * b;
        let n = v.norm();
        FockVector {
            amplitudes: v / C64::new(n, 0.0),
            norm_deficit: x.norm_deficit.max(y.norm_deficit),
        }
    }
}

/// Fock amplitudes of the coherent state `|β⟩` up to `dim - 1` photons,
/// not renormalised.
pub fn coherent_amplitudes(beta: C64, dim: usize) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    if dim == 0 {
        return v;
    }
    v[0] = C64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    for n in 1..dim {
        v[n] = v[n - 1] * beta / (n as f64).sqrt();
    }
    v
}

/// Smallest truncation accepted for cat amplitude `alpha`.
pub fn required_truncation(alpha: f64) -> usize {
    (alpha * alpha + 8.0 * alpha + 16.0).ceil() as usize
}

const DEFICIT_LIMIT: f64 = 1e-6;

/// Logical basis `(|iα⟩ ± |-iα⟩)/N±` of the cat code.
pub fn cat_basis(alpha: f64, n_trunc: usize) -> Result<[FockVector; 2]> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("cat amplitude must be positive, got {alpha}")));
    }
    let required = required_truncation(alpha);
    if n_trunc < required {
        return Err(Error::TruncationTooSmall { n_trunc, required });
    }
    let coh = coherent_amplitudes(C64::new(0.0, alpha), n_trunc);
    let overlap = (-2.0 * alpha * alpha).exp();
    let mut out = Vec::with_capacity(2);
    for (parity, sign) in [(0, 1.0), (1, -1.0)] {
        let mut v = DVector::zeros(n_trunc);
        for n in (parity..n_trunc).step_by(2) {
            v[n] = coh[n] * 2.0;
        }
        let exact = 2.0 * (1.0 + sign * overlap);
        let kept = v.norm_squared();
        let deficit = (1.0 - kept / exact).max(0.0);
        if deficit > DEFICIT_LIMIT {
            return Err(Error::TruncationTooSmall {
                n_trunc,
                required: 2 * n_trunc,
            });
        }
        let norm = kept.sqrt();
        out.push(FockVector {
            amplitudes: v / C64::new(norm, 0.0),
            norm_deficit: deficit,
        });
    }
    let one = out.pop().expect("two basis states");
    let zero = out.pop().expect("two basis states");
    Ok([zero, one])
}

fn lowering(dim: usize) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = (n as f64).sqrt();
    }
    a
}

/// Squeezing that rescales the position quadrature by `factor`, i.e.
/// `S† q S = factor · q`, computed in a space of dimension `pad` and
/// returned as the leading `dim × dim` block.
pub fn squeeze_operator(factor: f64, dim: usize, pad: usize) -> Result<DMatrix<f64>> {
    if !(factor.is_finite() && factor > 0.0) {
        return Err(Error::InvalidParameter(format!("squeeze factor must be positive, got {factor}")));
    }
    let pad = pad.max(dim);
    let r = -factor.ln();
    let a = lowering(pad);
    let a2 = &a * &a;
    let generator = (&a2 - a2.transpose()) * (0.5 * r);
    let s = generator.exp();
    Ok(s.view((0, 0), (dim, dim)).into_owned())
}

/// Apply a real operator given in a padded space to a state.
pub fn apply_real(op: &DMatrix<f64>, state: &FockVector, dim: usize) -> FockVector {
    let padded = state.embed(op.ncols());
    let out = op.map(|v| C64::new(v, 0.0)) * &padded.amplitudes;
    let head = out.rows(0, dim).into_owned();
    let kept = head.norm_squared();
    FockVector {
        amplitudes: head / C64::new(kept.sqrt(), 0.0),
        norm_deficit: (1.0 - kept).max(0.0) + state.norm_deficit,
    }
}

/// Eigenbasis of the truncated position operator `q = (a + a†)/√2`.
#[derive(Debug, Clone)]
pub struct FockSpace {
    dim: usize,
    nodes: DVector<f64>,
    modes: DMatrix<f64>,
}

impl FockSpace {
    pub fn new(dim: usize) -> Self {
        let mut q = DMatrix::zeros(dim, dim);
        for n in 1..dim {
            let v = (n as f64 / 2.0).sqrt();
            q[(n - 1, n)] = v;
            q[(n, n - 1)] = v;
        }
        let eig = SymmetricEigen::new(q);
        FockSpace {
            dim,
            nodes: eig.eigenvalues,
            modes: eig.eigenvectors,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Eigenvalues of the truncated position operator.
    pub fn nodes(&self) -> &DVector<f64> {
        &self.nodes
    }

    /// Columns are the position eigenvectors in the Fock basis.
    pub fn modes(&self) -> &DMatrix<f64> {
        &self.modes
    }

    /// Amplitudes of `psi` in the position eigenbasis.
    pub fn to_position(&self, psi: &DVector<C64>) -> DVector<C64> {
        self.modes.transpose().map(|v| C64::new(v, 0.0)) * psi
    }

    pub fn from_position(&self, amps: &DVector<C64>) -> DVector<C64> {
        self.modes.map(|v| C64::new(v, 0.0)) * amps
    }

    /// `exp(i p q)` as a dense matrix.
    pub fn displacement(&self, p: f64) -> DMatrix<C64> {
        let u = self.modes.map(|v| C64::new(v, 0.0));
        let phases = DVector::from_iterator(self.dim, self.nodes.iter().map(|x| C64::from_polar(1.0, p * x)));
        let scaled = DMatrix::from_fn(self.dim, self.dim, |i, j| u[(i, j)] * phases[j]);
        scaled * u.transpose()
    }

    /// `exp(i p q) psi`.
    pub fn displace(&self, psi: &DVector<C64>, p: f64) -> DVector<C64> {
        let mut amps = self.to_position(psi);
        for (a, x) in amps.iter_mut().zip(self.nodes.iter()) {
            *a *= C64::from_polar(1.0, p * x);
        }
        self.from_position(&amps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_basis_orthonormal() {
        let [z, o] = cat_basis(2.0, 60).unwrap();
        assert!((z.norm() - 1.0).abs() < 1e-14);
        assert!((o.norm() - 1.0).abs() < 1e-14);
        assert!(z.inner(&o).norm() < 1e-15);
        assert!(z.norm_deficit < 1e-6 && o.norm_deficit < 1e-6);
    }

    #[test]
    fn truncation_guard() {
        assert_eq!(
            cat_basis(2.0, 30),
            Err(Error::TruncationTooSmall { n_trunc: 30, required: 36 })
        );
    }

    #[test]
    fn displacement_is_unitary_and_shifts_momentum() {
        let space = FockSpace::new(80);
        let d = space.displacement(0.4);
        let eye = DMatrix::<C64>::identity(80, 80);
        assert!((d.adjoint() * &d - eye).camax() < 1e-12);
        // exp(ipq)|0⟩ is the coherent state with β = i p/√2.
        let vac = coherent_amplitudes(C64::new(0.0, 0.0), 80);
        let moved = space.displace(&vac, 0.4);
        let expected = coherent_amplitudes(C64::new(0.0, 0.4 / 2f64.sqrt()), 80);
        assert!((moved - expected).camax() < 1e-12);
    }

    #[test]
    fn squeeze_rescales_position() {
        let dim = 80;
        let s = squeeze_operator(0.5, dim, 240).unwrap();
        let vac = FockVector {
            amplitudes: coherent_amplitudes(C64::new(0.0, 0.0), 1),
            norm_deficit: 0.0,
        };
        let sq = apply_real(&s, &vac, dim);
        // Position variance of the squeezed vacuum is factor²/2.
        let mut q = DMatrix::zeros(dim, dim);
        for n in 1..dim {
            let v = C64::new((n as f64 / 2.0).sqrt(), 0.0);
            q[(n - 1, n)] = v;
            q[(n, n - 1)] = v;
        }
        let qq = &q * &q;
        let var = sq.amplitudes.dotc(&(qq * &sq.amplitudes)).re;
        assert!((var - 0.125).abs() < 1e-10, "{var}");
    }
}
