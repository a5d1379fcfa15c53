//! Local symplectic operations that bring a transducer to the canonical
//! representative of its class, either with arbitrary local operations or
//! with rotations only on mode 2.

use crate::classification::{classify_with, Classification, ClassifyOptions, Subclass, TransducerClass};
use crate::error::{Error, Result};
use crate::symplectic::{rot_svd, symplectic_from_fullrank, Gate, QuadMatrix, Quadrature, Side, TwoModeTransform};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagOptions {
    pub classify: ClassifyOptions,
    /// For the single-quadrature classes, which quadrature carries the
    /// transmission (`[[1,2]]`) or the zero reflection (`[[2,1]]`).
    pub prefer: Quadrature,
}

impl Default for DiagOptions {
    fn default() -> Self {
        DiagOptions {
            classify: ClassifyOptions::default(),
            prefer: Quadrature::Q,
        }
    }
}

/// `T' = diag(out1, out2) · T · diag(in1, in2)` equal to a canonical gate.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalForm {
    pub out1: QuadMatrix,
    pub out2: QuadMatrix,
    pub in1: QuadMatrix,
    pub in2: QuadMatrix,
    pub transformed: TwoModeTransform,
    pub canonical: Gate,
    pub classification: Classification,
    /// Max-abs distance between `transformed` and the canonical matrix.
    pub residual: f64,
}

impl DiagonalForm {
    /// Diagonal entries `(Λq, Λp)` of each block of the transformed map,
    /// indexed `[i-1][j-1]`.
    pub fn lambda(&self) -> [[(f64, f64); 2]; 2] {
        let t = &self.transformed;
        let mut out = [[(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (t.get(2 * i, 2 * j), t.get(2 * i + 1, 2 * j + 1));
            }
        }
        out
    }
}

/// Form reached with rotations only on mode 2, for which the `q`
/// quadratures of both outputs depend only on the `q` inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedForm {
    pub out1: QuadMatrix,
    pub out2: QuadMatrix,
    pub in1: QuadMatrix,
    pub in2: QuadMatrix,
    pub transformed: TwoModeTransform,
    /// Reflection magnitude on mode 2 for the `[[1,2]]` class.
    pub xi: Option<f64>,
    /// Transmission strength for the single-quadrature classes.
    pub strength: Option<f64>,
    pub classification: Classification,
}

impl ConstrainedForm {
    /// `q`-quadrature response: `tqq[i][j]` maps `q` of input `j+1` to `q`
    /// of output `i+1`.
    pub fn tqq(&self) -> [[f64; 2]; 2] {
        self.sub(0)
    }

    pub fn tpp(&self) -> [[f64; 2]; 2] {
        self.sub(1)
    }

    fn sub(&self, offset: usize) -> [[f64; 2]; 2] {
        let t = &self.transformed;
        [
            [t.get(offset, offset), t.get(offset, 2 + offset)],
            [t.get(2 + offset, offset), t.get(2 + offset, 2 + offset)],
        ]
    }

    /// Largest coefficient of a `p` input on a `q` output.
    pub fn q_leakage(&self) -> f64 {
        let t = &self.transformed;
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max(t.get(2 * i, 2 * j + 1).abs());
            }
        }
        worst
    }
}

pub fn diagonalize(t: &TwoModeTransform) -> Result<DiagonalForm> {
    diagonalize_with(t, &DiagOptions::default())
}

/// Canonical representative of the class of `t`.
pub fn canonical_gate(t: &TwoModeTransform) -> Result<Gate> {
    Ok(diagonalize(t)?.canonical)
}

struct Locals {
    out1: QuadMatrix,
    out2: QuadMatrix,
    in1: QuadMatrix,
    in2: QuadMatrix,
}

impl Locals {
    fn check(&self) -> Result<()> {
        for (name, m) in [("out1", self.out1), ("out2", self.out2), ("in1", self.in1), ("in2", self.in2)] {
            let err = (m.det() - 1.0).abs();
            if !(err <= 1e-8) {
                return Err(Error::Inconsistent(format!("local {name} has det {}", m.det())));
            }
        }
        Ok(())
    }

    fn apply(&self, t: &TwoModeTransform) -> TwoModeTransform {
        t.dressed(self.out1, self.out2, self.in1, self.in2)
    }
}

/// Mode-1 locals fixed by demanding canonical cross blocks `c21`, `c12`.
fn cross_locals(t: &TwoModeTransform, out2: QuadMatrix, in2: QuadMatrix, c21: QuadMatrix, c12: QuadMatrix) -> Result<Locals> {
    let in1 = (out2 * t.block(2, 1)).inverse()? * c21;
    let out1 = c12 * (t.block(1, 2) * in2).inverse()?;
    Ok(Locals { out1, out2, in1, in2 })
}

struct FullRankData {
    c21: QuadMatrix,
    c12: QuadMatrix,
    gate: Gate,
}

fn full_rank_data(sub: Subclass, chi: f64) -> FullRankData {
    let id = QuadMatrix::identity();
    let z = QuadMatrix::reflection();
    match sub {
        Subclass::BeamSplitter => {
            let s = chi.max(0.0).sqrt();
            let c = (1.0 - chi).max(0.0).sqrt();
            FullRankData {
                c21: id.scale(-s),
                c12: id.scale(s),
                gate: Gate::BeamSplitter(s.atan2(c)),
            }
        }
        Subclass::TwoModeSqueeze => {
            let sh = (-chi).max(0.0).sqrt();
            FullRankData {
                c21: z.scale(sh),
                c12: z.scale(sh),
                gate: Gate::TwoModeSqueeze(sh.asinh()),
            }
        }
        Subclass::SwappedTwoModeSqueeze => {
            let ch = chi.max(1.0).sqrt();
            FullRankData {
                c21: id.scale(ch),
                c12: id.scale(ch),
                gate: Gate::SwappedTwoModeSqueeze((chi - 1.0).max(0.0).sqrt().asinh()),
            }
        }
    }
}

fn rank_one_split(block: &QuadMatrix, zero_first: bool) -> (QuadMatrix, QuadMatrix, f64) {
    let svd = rot_svd(block);
    let strength = svd.d1;
    let svd = if zero_first { svd.swapped() } else { svd };
    (svd.left.transpose(), svd.right.transpose(), strength)
}

pub fn diagonalize_with(t: &TwoModeTransform, opts: &DiagOptions) -> Result<DiagonalForm> {
    let classification = classify_with(t, &opts.classify)?;
    let (t11, t12, t21, t22) = (t.block(1, 1), t.block(1, 2), t.block(2, 1), t.block(2, 2));
    let id = QuadMatrix::identity();

    let (locals, canonical) = match classification.class {
        TransducerClass::Identity => (
            Locals {
                out1: t11.inverse()?,
                out2: t22.inverse()?,
                in1: id,
                in2: id,
            },
            Gate::Identity,
        ),
        TransducerClass::Qnd => {
            // Transmission block becomes diag(η, 0) or diag(0, η).
            let (out1, in2, eta) = rank_one_split(&t12, opts.prefer == Quadrature::P);
            let in1 = (out1 * t11).inverse()?;
            let out2 = (t22 * in2).inverse()?;
            (
                Locals { out1, out2, in1, in2 },
                Gate::Qnd { strength: eta, transmitted: opts.prefer },
            )
        }
        TransducerClass::Full(sub) => {
            let data = full_rank_data(sub, classification.chi);
            let svd = rot_svd(&t22);
            let out2 = svd.left.transpose();
            let dw = svd.diag() * svd.right;
            let in2 = match sub {
                Subclass::SwappedTwoModeSqueeze => {
                    let sh = (-t22.det()).max(0.0).sqrt();
                    dw.inverse()?.scale(sh) * QuadMatrix::reflection()
                }
                _ => symplectic_from_fullrank(&dw, Side::Left)?,
            };
            (cross_locals(t, out2, in2, data.c21, data.c12)?, data.gate)
        }
        TransducerClass::SwappedQnd => {
            // Reflection block becomes diag(0, η) when q is matched.
            let (out2, in2, eta) = rank_one_split(&t22, opts.prefer == Quadrature::Q);
            (
                cross_locals(t, out2, in2, id, id)?,
                Gate::SwappedQnd { strength: eta, matched: opts.prefer },
            )
        }
        TransducerClass::Swap => (
            Locals {
                out1: t12.inverse()?,
                out2: id,
                in1: t21.inverse()?,
                in2: id,
            },
            Gate::Swap,
        ),
    };

    locals.check()?;
    let transformed = locals.apply(t);
    let residual = transformed.max_abs_diff(&canonical.matrix());
    Ok(DiagonalForm {
        out1: locals.out1,
        out2: locals.out2,
        in1: locals.in1,
        in2: locals.in2,
        transformed,
        canonical,
        classification,
        residual,
    })
}

/// Orthogonal-times-lower-triangular split `u = rot · low` with `low[0][0] > 0`.
fn ql_rotation(u: &QuadMatrix) -> (QuadMatrix, QuadMatrix) {
    let mut angle = u.get(0, 1).atan2(u.get(1, 1));
    let mut rot = QuadMatrix::rotation(angle);
    let mut low = rot.transpose() * *u;
    if low.get(0, 0) < 0.0 {
        angle += std::f64::consts::PI;
        rot = QuadMatrix::rotation(angle);
        low = rot.transpose() * *u;
    }
    (rot, low)
}

/// Reduce `t` with rotations only on mode 2 so that `q` outputs are fed by
/// `q` inputs alone.
pub fn diagonalize_constrained(t: &TwoModeTransform, prefer: Quadrature) -> Result<ConstrainedForm> {
    diagonalize_constrained_with(t, prefer, &ClassifyOptions::default())
}

pub fn diagonalize_constrained_with(
    t: &TwoModeTransform,
    prefer: Quadrature,
    copts: &ClassifyOptions,
) -> Result<ConstrainedForm> {
    let classification = classify_with(t, copts)?;
    let (t11, t12, t22) = (t.block(1, 1), t.block(1, 2), t.block(2, 2));
    let mut xi = None;
    let mut strength = None;

    let locals = match classification.class {
        TransducerClass::Identity => return Err(Error::NoTransmission),
        TransducerClass::Qnd => {
            let (out1, in2, eta) = rank_one_split(&t12, prefer == Quadrature::P);
            let in1 = (out1 * t11).inverse()?;
            let u = (t22 * in2).scale(-1.0);
            let (rot, low) = ql_rotation(&u);
            xi = Some(low.get(0, 0));
            strength = Some(eta);
            Locals {
                out1,
                out2: rot.transpose(),
                in1,
                in2,
            }
        }
        TransducerClass::Full(sub) => {
            let data = full_rank_data(sub, classification.chi);
            let svd = rot_svd(&t22);
            cross_locals(t, svd.left.transpose(), svd.right.transpose(), data.c21, data.c12)?
        }
        TransducerClass::SwappedQnd | TransducerClass::Swap => {
            let opts = DiagOptions {
                classify: *copts,
                prefer,
            };
            let full = diagonalize_with(t, &opts)?;
            if let Gate::SwappedQnd { strength: eta, .. } = full.canonical {
                strength = Some(eta);
            }
            Locals {
                out1: full.out1,
                out2: full.out2,
                in1: full.in1,
                in2: full.in2,
            }
        }
    };

    locals.check()?;
    let transformed = locals.apply(t);
    Ok(ConstrainedForm {
        out1: locals.out1,
        out2: locals.out2,
        in1: locals.in1,
        in2: locals.in2,
        transformed,
        xi,
        strength,
        classification,
    })
}
