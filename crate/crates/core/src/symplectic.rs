//! 2×2 quadrature blocks, 4×4 two-mode transforms and the gate library.

use std::fmt;
use std::ops::Mul;

use nalgebra::{Matrix2, Matrix4};

use crate::error::{Error, Result};

/// Quadrature label, used wherever a convention picks `q` or `p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quadrature {
    Q,
    P,
}

impl Quadrature {
    pub fn other(self) -> Self {
        match self {
            Quadrature::Q => Quadrature::P,
            Quadrature::P => Quadrature::Q,
        }
    }
}

/// Real 2×2 block acting on `(q, p)` of a single mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadMatrix(pub Matrix2<f64>);

impl QuadMatrix {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        QuadMatrix(Matrix2::new(a, b, c, d))
    }

    pub fn identity() -> Self {
        QuadMatrix(Matrix2::identity())
    }

    pub fn zeros() -> Self {
        QuadMatrix(Matrix2::zeros())
    }

    pub fn diag(a: f64, d: f64) -> Self {
        QuadMatrix::new(a, 0.0, 0.0, d)
    }

    pub fn scaled_identity(s: f64) -> Self {
        QuadMatrix::diag(s, s)
    }

    /// Symplectic form `[[0, 1], [-1, 0]]`.
    pub fn omega() -> Self {
        QuadMatrix::new(0.0, 1.0, -1.0, 0.0)
    }

    /// Phase-space rotation `[[cos, sin], [-sin, cos]]`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        QuadMatrix::new(c, s, -s, c)
    }

    /// Parity `-I`, a rotation by π.
    pub fn parity() -> Self {
        QuadMatrix::scaled_identity(-1.0)
    }

    /// Reflection `diag(1, -1)`; not symplectic on its own.
    pub fn reflection() -> Self {
        QuadMatrix::diag(1.0, -1.0)
    }

    /// Single-mode squeezer `diag(e^r, e^-r)`.
    pub fn squeeze(r: f64) -> Self {
        QuadMatrix::diag(r.exp(), (-r).exp())
    }

    /// Phase-sensitive gain `diag(γ, 1/γ)`. Negative γ includes a parity flip.
    pub fn gain(gamma: f64) -> Result<Self> {
        if gamma == 0.0 || !gamma.is_finite() {
            return Err(Error::InvalidGain(gamma));
        }
        Ok(QuadMatrix::diag(gamma, 1.0 / gamma))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn det(&self) -> f64 {
        let m = &self.0;
        m[(0, 0)] * m[(1, 1)] - m[(0, 1)] * m[(1, 0)]
    }

    pub fn transpose(&self) -> Self {
        QuadMatrix(self.0.transpose())
    }

    pub fn scale(&self, s: f64) -> Self {
        QuadMatrix(self.0 * s)
    }

    pub fn inverse(&self) -> Result<Self> {
        let det = self.det();
        let scale = self.0.amax().max(f64::MIN_POSITIVE);
        if !det.is_finite() || det.abs() <= 1e-300 || det.abs() / (scale * scale) < 1e-22 {
            return Err(Error::RankDeficient);
        }
        let m = &self.0;
        Ok(QuadMatrix::new(
            m[(1, 1)] / det,
            -m[(0, 1)] / det,
            -m[(1, 0)] / det,
            m[(0, 0)] / det,
        ))
    }

    pub fn singular_values(&self) -> (f64, f64) {
        let svd = rot_svd(self);
        (svd.d1.abs(), svd.d2.abs())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn max_abs_diff(&self, other: &QuadMatrix) -> f64 {
        (self.0 - other.0).amax()
    }

    /// A 2×2 block is symplectic iff its determinant is one.
    pub fn is_symplectic(&self, tol: f64) -> bool {
        (self.det() - 1.0).abs() <= tol
    }
}

impl Mul for QuadMatrix {
    type Output = QuadMatrix;
    fn mul(self, rhs: QuadMatrix) -> QuadMatrix {
        QuadMatrix(self.0 * rhs.0)
    }
}

impl Mul<&QuadMatrix> for &QuadMatrix {
    type Output = QuadMatrix;
    fn mul(self, rhs: &QuadMatrix) -> QuadMatrix {
        QuadMatrix(self.0 * rhs.0)
    }
}

/// Factorisation `M = left · diag(d1, d2) · right` with `left` and `right`
/// proper rotations. `d1 >= |d2|`; `d2` carries the sign of `det M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotSvd {
    pub left: QuadMatrix,
    pub d1: f64,
    pub d2: f64,
    pub right: QuadMatrix,
}

impl RotSvd {
    /// Same factorisation with the diagonal entries exchanged:
    /// `left·Ω · diag(d2, d1) · Ωᵀ·right`.
    pub fn swapped(&self) -> RotSvd {
        let om = QuadMatrix::omega();
        RotSvd {
            left: self.left * om,
            d1: self.d2,
            d2: self.d1,
            right: om.transpose() * self.right,
        }
    }

    pub fn diag(&self) -> QuadMatrix {
        QuadMatrix::diag(self.d1, self.d2)
    }

    pub fn reconstruct(&self) -> QuadMatrix {
        self.left * self.diag() * self.right
    }
}

fn ccw(angle: f64) -> QuadMatrix {
    QuadMatrix::rotation(-angle)
}

/// Closed-form 2×2 singular value decomposition with rotation factors.
pub fn rot_svd(m: &QuadMatrix) -> RotSvd {
    let (a, b, c, d) = (m.get(0, 0), m.get(0, 1), m.get(1, 0), m.get(1, 1));
    let e = 0.5 * (a + d);
    let f = 0.5 * (a - d);
    let g = 0.5 * (c + b);
    let h = 0.5 * (c - b);
    let q = e.hypot(h);
    let r = f.hypot(g);
    let scale = m.max_abs();
    if scale == 0.0 {
        return RotSvd {
            left: QuadMatrix::identity(),
            d1: 0.0,
            d2: 0.0,
            right: QuadMatrix::identity(),
        };
    }
    let a2 = h.atan2(e);
    if r <= 1e-15 * scale {
        return RotSvd {
            left: QuadMatrix::identity(),
            d1: q,
            d2: q,
            right: ccw(a2),
        };
    }
    let a1 = g.atan2(f);
    let phi = 0.5 * (a2 + a1);
    let theta = 0.5 * (a2 - a1);
    RotSvd {
        left: ccw(phi),
        d1: q + r,
        d2: q - r,
        right: ccw(theta),
    }
}

/// Side on which the reflection `Z` is applied when `det M < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Symplectic matrix proportional to `M⁻¹` (times `Z` if `det M < 0`).
pub fn symplectic_from_fullrank(m: &QuadMatrix, side: Side) -> Result<QuadMatrix> {
    let det = m.det();
    let inv = m.inverse()?;
    let scaled = inv.scale(det.abs().sqrt());
    if det > 0.0 {
        Ok(scaled)
    } else {
        Ok(match side {
            Side::Left => QuadMatrix::reflection() * scaled,
            Side::Right => scaled * QuadMatrix::reflection(),
        })
    }
}

/// Real 4×4 linear map on `(q1, p1, q2, p2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeTransform(pub Matrix4<f64>);

impl TwoModeTransform {
    pub fn identity() -> Self {
        TwoModeTransform(Matrix4::identity())
    }

    pub fn from_blocks(t11: QuadMatrix, t12: QuadMatrix, t21: QuadMatrix, t22: QuadMatrix) -> Self {
        let mut m = Matrix4::zeros();
        for (bi, bj, blk) in [(0, 0, t11), (0, 1, t12), (1, 0, t21), (1, 1, t22)] {
            m.fixed_view_mut::<2, 2>(2 * bi, 2 * bj).copy_from(&blk.0);
        }
        TwoModeTransform(m)
    }

    pub fn from_rows(rows: [[f64; 4]; 4]) -> Self {
        TwoModeTransform(Matrix4::from_fn(|i, j| rows[i][j]))
    }

    pub fn to_rows(&self) -> [[f64; 4]; 4] {
        let mut out = [[0.0; 4]; 4];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[(i, j)];
            }
        }
        out
    }

    /// Independent local operations: `a` on mode 1, `b` on mode 2.
    pub fn local(a: QuadMatrix, b: QuadMatrix) -> Self {
        TwoModeTransform::from_blocks(a, QuadMatrix::zeros(), QuadMatrix::zeros(), b)
    }

    /// Block mapping input mode `j` to output mode `i` (1-based).
    pub fn block(&self, i: usize, j: usize) -> QuadMatrix {
        assert!((1..=2).contains(&i) && (1..=2).contains(&j), "mode index must be 1 or 2");
        QuadMatrix(self.0.fixed_view::<2, 2>(2 * (i - 1), 2 * (j - 1)).into_owned())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    pub fn transpose(&self) -> Self {
        TwoModeTransform(self.0.transpose())
    }

    /// Conjugate by local operations: `out · self · input`.
    pub fn dressed(&self, out1: QuadMatrix, out2: QuadMatrix, in1: QuadMatrix, in2: QuadMatrix) -> Self {
        TwoModeTransform::local(out1, out2) * *self * TwoModeTransform::local(in1, in2)
    }

    pub fn inverse(&self) -> Result<Self> {
        self.0.try_inverse().map(TwoModeTransform).ok_or(Error::RankDeficient)
    }

    /// Max-abs entry of `T Ω Tᵀ - Ω`.
    pub fn symplectic_residual(&self) -> f64 {
        let om = omega4();
        (self.0 * om * self.0.transpose() - om).amax()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.amax()
    }

    pub fn max_abs_diff(&self, other: &TwoModeTransform) -> f64 {
        (self.0 - other.0).amax()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Mul for TwoModeTransform {
    type Output = TwoModeTransform;
    fn mul(self, rhs: TwoModeTransform) -> TwoModeTransform {
        TwoModeTransform(self.0 * rhs.0)
    }
}

impl From<Gate> for TwoModeTransform {
    fn from(g: Gate) -> Self {
        g.matrix()
    }
}

fn omega4() -> Matrix4<f64> {
    let om = QuadMatrix::omega();
    TwoModeTransform::local(om, om).0
}

/// Named two-mode gates, also used as canonical representatives of the
/// equivalence classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Identity,
    Swap,
    /// Beam splitter with mixing angle θ; transmissivity `sin²θ`.
    BeamSplitter(f64),
    /// Two-mode squeezer with squeezing `r`.
    TwoModeSqueeze(f64),
    /// Two-mode squeezer followed by a swap.
    SwappedTwoModeSqueeze(f64),
    /// Quantum non-demolition gate. `transmitted` names the quadrature of
    /// mode 2 copied into mode 1: `Q` is `exp(-iη p1 q2)`, `P` is `exp(iη q1 p2)`.
    Qnd { strength: f64, transmitted: Quadrature },
    /// QND gate followed by a swap. `matched` names the mode-2 quadrature
    /// that is fully transmitted (zero reflection).
    SwappedQnd { strength: f64, matched: Quadrature },
}

impl Gate {
    pub fn matrix(&self) -> TwoModeTransform {
        let i = QuadMatrix::identity();
        let z = QuadMatrix::reflection();
        let o = QuadMatrix::zeros();
        match *self {
            Gate::Identity => TwoModeTransform::identity(),
            Gate::Swap => TwoModeTransform::from_blocks(o, i, i, o),
            Gate::BeamSplitter(theta) => {
                let (s, c) = theta.sin_cos();
                TwoModeTransform::from_blocks(i.scale(c), i.scale(s), i.scale(-s), i.scale(c))
            }
            Gate::TwoModeSqueeze(r) => {
                let (ch, sh) = (r.cosh(), r.sinh());
                TwoModeTransform::from_blocks(i.scale(ch), z.scale(sh), z.scale(sh), i.scale(ch))
            }
            Gate::SwappedTwoModeSqueeze(r) => {
                let (ch, sh) = (r.cosh(), r.sinh());
                TwoModeTransform::from_blocks(z.scale(sh), i.scale(ch), i.scale(ch), z.scale(sh))
            }
            Gate::Qnd { strength: eta, transmitted: Quadrature::Q } => TwoModeTransform::from_blocks(
                i,
                QuadMatrix::diag(eta, 0.0),
                QuadMatrix::diag(0.0, -eta),
                i,
            ),
            Gate::Qnd { strength: eta, transmitted: Quadrature::P } => TwoModeTransform::from_blocks(
                i,
                QuadMatrix::diag(0.0, eta),
                QuadMatrix::diag(-eta, 0.0),
                i,
            ),
            Gate::SwappedQnd { strength: eta, matched: Quadrature::Q } => TwoModeTransform::from_blocks(
                QuadMatrix::diag(-eta, 0.0),
                i,
                i,
                QuadMatrix::diag(0.0, eta),
            ),
            Gate::SwappedQnd { strength: eta, matched: Quadrature::P } => TwoModeTransform::from_blocks(
                QuadMatrix::diag(0.0, -eta),
                i,
                i,
                QuadMatrix::diag(eta, 0.0),
            ),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::Identity => "identity",
            Gate::Swap => "swap",
            Gate::BeamSplitter(_) => "beam-splitter",
            Gate::TwoModeSqueeze(_) => "two-mode-squeeze",
            Gate::SwappedTwoModeSqueeze(_) => "swapped-two-mode-squeeze",
            Gate::Qnd { .. } => "qnd",
            Gate::SwappedQnd { .. } => "swapped-qnd",
        }
    }

    /// The continuous parameter of the gate, if any.
    pub fn parameter(&self) -> Option<f64> {
        match *self {
            Gate::Identity | Gate::Swap => None,
            Gate::BeamSplitter(x) | Gate::TwoModeSqueeze(x) | Gate::SwappedTwoModeSqueeze(x) => Some(x),
            Gate::Qnd { strength, .. } | Gate::SwappedQnd { strength, .. } => Some(strength),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.parameter() {
            Some(x) => write!(f, "{}({})", self.name(), x),
            None => f.write_str(self.name()),
        }
    }
}

/// Inverse of the standard swapped QND gate, built from the gate itself and
/// quarter-turn rotations on both modes.
pub fn swapped_qnd_inverse(strength: f64) -> TwoModeTransform {
    let fwd = QuadMatrix::rotation(std::f64::consts::FRAC_PI_2);
    let back = QuadMatrix::rotation(-std::f64::consts::FRAC_PI_2);
    TwoModeTransform::local(back, back)
        * Gate::SwappedQnd { strength, matched: Quadrature::Q }.matrix()
        * TwoModeTransform::local(fwd, fwd)
}
