//! Equivalence classes of two-mode transducers under local symplectic
//! operations, labelled by the ranks of the transmission and reflection
//! blocks into mode 2 and by the transmissivity `χ = det T21`.

use std::fmt;

use crate::error::{Error, Result};
use crate::symplectic::{QuadMatrix, TwoModeTransform};

/// Continuous family inside the full-rank class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subclass {
    /// `χ < 0`
    TwoModeSqueeze,
    /// `0 < χ < 1`
    BeamSplitter,
    /// `χ > 1`
    SwappedTwoModeSqueeze,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TransducerClass {
    /// `[[0,2]]`: no transmission, equivalent to the identity.
    Identity,
    /// `[[1,2]]`: one quadrature transmitted, QND-like.
    Qnd,
    /// `[[2,2]]`: both quadratures transmitted and reflected.
    Full(Subclass),
    /// `[[2,1]]`: one quadrature impedance matched, swapped-QND-like.
    SwappedQnd,
    /// `[[2,0]]`: perfect swap.
    Swap,
}

impl TransducerClass {
    /// `(rank T21, rank T22)`.
    pub fn ranks(&self) -> (u8, u8) {
        match self {
            TransducerClass::Identity => (0, 2),
            TransducerClass::Qnd => (1, 2),
            TransducerClass::Full(_) => (2, 2),
            TransducerClass::SwappedQnd => (2, 1),
            TransducerClass::Swap => (2, 0),
        }
    }

    /// Classes that already transmit at least one quadrature without
    /// reflection, and so need no interference correction.
    pub fn is_matched(&self) -> bool {
        matches!(self, TransducerClass::SwappedQnd | TransducerClass::Swap)
    }

    pub fn canonical_name(&self) -> &'static str {
        match self {
            TransducerClass::Identity => "identity",
            TransducerClass::Qnd => "QND",
            TransducerClass::Full(Subclass::TwoModeSqueeze) => "TMS",
            TransducerClass::Full(Subclass::BeamSplitter) => "BS",
            TransducerClass::Full(Subclass::SwappedTwoModeSqueeze) => "swapped TMS",
            TransducerClass::SwappedQnd => "sQND",
            TransducerClass::Swap => "SWAP",
        }
    }
}

impl fmt::Display for TransducerClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (t, r) = self.ranks();
        write!(f, "[[{t},{r}]]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClassWarning {
    /// A singular value sits within one decade of the rank threshold.
    NearDegenerate { margin: f64 },
    /// Full-rank class with `χ` indistinguishable from 0 or 1.
    BoundaryClass { chi: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifyOptions {
    /// Relative singular-value threshold for rank decisions.
    pub rank_tol: f64,
    /// Relative tolerance on `T Ω Tᵀ = Ω`.
    pub symplectic_tol: f64,
    /// Distance of `χ` from 0 or 1 that triggers a boundary warning.
    pub boundary_tol: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            rank_tol: 1e-9,
            symplectic_tol: 1e-10,
            boundary_tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub class: TransducerClass,
    pub n_t: u8,
    pub n_r: u8,
    /// `χ`, snapped to exactly 0 or 1 outside the full-rank class.
    pub chi: f64,
    /// `det T21` as computed.
    pub chi_raw: f64,
    /// Smallest distance, in decades, between a singular value of
    /// `T21`/`T22` and the rank threshold.
    pub margin: f64,
    pub symplectic_residual: f64,
    /// Largest `|det T_i1 + det T_i2 - 1|` over the two output modes.
    pub det_residual: f64,
    /// Ranks of the four blocks, indexed `[i-1][j-1]`.
    pub block_ranks: [[u8; 2]; 2],
    pub warnings: Vec<ClassWarning>,
}

impl Classification {
    pub fn near_degenerate(&self) -> bool {
        self.margin < 1.0
    }
}

struct RankInfo {
    rank: u8,
    margin: f64,
}

fn rank_of(block: &QuadMatrix, tol: f64) -> RankInfo {
    let (s1, s2) = block.singular_values();
    let threshold = tol * s1.max(1.0);
    let mut rank = 0;
    let mut margin = f64::INFINITY;
    for s in [s1, s2] {
        if s > threshold {
            rank += 1;
        }
        if s > 0.0 {
            margin = margin.min((s / threshold).log10().abs());
        }
    }
    RankInfo { rank, margin }
}

pub fn classify(t: &TwoModeTransform) -> Result<Classification> {
    classify_with(t, &ClassifyOptions::default())
}

pub fn classify_with(t: &TwoModeTransform, opts: &ClassifyOptions) -> Result<Classification> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter("transform has non-finite entries".into()));
    }
    let scale = t.max_abs().max(1.0);
    let residual = t.symplectic_residual();
    let allowed = opts.symplectic_tol * scale * scale;
    if residual > allowed {
        return Err(Error::NotSymplectic { residual });
    }

    let (t11, t12, t21, t22) = (t.block(1, 1), t.block(1, 2), t.block(2, 1), t.block(2, 2));
    let row1 = (t11.det() + t12.det() - 1.0).abs();
    let row2 = (t21.det() + t22.det() - 1.0).abs();
    if row1.max(row2) > allowed {
        return Err(Error::NotSymplectic { residual: residual.max(row1).max(row2) });
    }

    let r21 = rank_of(&t21, opts.rank_tol);
    let r22 = rank_of(&t22, opts.rank_tol);
    let r12 = rank_of(&t12, opts.rank_tol);
    let r11 = rank_of(&t11, opts.rank_tol);
    if r12.rank != r21.rank || r11.rank != r22.rank {
        return Err(Error::NotSymplectic { residual });
    }

    let chi_raw = t21.det();
    let class = match (r21.rank, r22.rank) {
        (0, 2) => TransducerClass::Identity,
        (1, 2) => TransducerClass::Qnd,
        (2, 1) => TransducerClass::SwappedQnd,
        (2, 0) => TransducerClass::Swap,
        (2, 2) => TransducerClass::Full(if chi_raw < 0.0 {
            Subclass::TwoModeSqueeze
        } else if chi_raw < 1.0 {
            Subclass::BeamSplitter
        } else {
            Subclass::SwappedTwoModeSqueeze
        }),
        _ => return Err(Error::NotSymplectic { residual }),
    };

    let chi = match class {
        TransducerClass::Identity | TransducerClass::Qnd => 0.0,
        TransducerClass::SwappedQnd | TransducerClass::Swap => 1.0,
        TransducerClass::Full(_) => chi_raw,
    };

    let margin = r21.margin.min(r22.margin);
    let mut warnings = Vec::new();
    if margin < 1.0 {
        warnings.push(ClassWarning::NearDegenerate { margin });
    }
    if matches!(class, TransducerClass::Full(_))
        && (chi_raw.abs() <= opts.boundary_tol || (chi_raw - 1.0).abs() <= opts.boundary_tol)
    {
        warnings.push(ClassWarning::BoundaryClass { chi: chi_raw });
    }

    Ok(Classification {
        class,
        n_t: r21.rank,
        n_r: r22.rank,
        chi,
        chi_raw,
        margin,
        symplectic_residual: residual,
        det_residual: row1.max(row2),
        block_ranks: [[r11.rank, r12.rank], [r21.rank, r22.rank]],
        warnings,
    })
}
