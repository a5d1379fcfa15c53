//! Two-pass interference correction: send the signal through a transducer,
//! apply a phase-sensitive gain on mode 1, and send it through again so the
//! two reflections of one quadrature cancel. Also the six-pass sequence that
//! removes the residual back-action of a swapped QND gate.

use crate::classification::{classify, Classification, TransducerClass};
use crate::diagonalization::{diagonalize_constrained, diagonalize_with, DiagOptions, DiagonalForm};
use crate::error::{Error, Result};
use crate::symplectic::{swapped_qnd_inverse, Gate, QuadMatrix, Quadrature, TwoModeTransform};

/// Which way quantum information is carried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    OneToTwo,
    TwoToOne,
}

/// Operation that removes the residual swapped-QND noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Finishing {
    /// Squeezed vacuum with squeezing `r` fed into mode 1.
    InjectSqueezing { r: f64 },
    /// Homodyne of mode 1 with inefficiency `ε`, fed forward onto mode 2
    /// with gain `feedforward`.
    HomodyneFeedforward { inefficiency: f64, feedforward: f64 },
    /// The composite is already a swap.
    None,
}

/// Resource available for finishing a corrected transducer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resource {
    Squeezing { r: f64 },
    Homodyne { inefficiency: f64, feedforward: Option<f64> },
}

/// Residual displacement-noise width after squeezing injection.
pub fn squeezing_sigma(strength: f64, r: f64) -> f64 {
    strength.abs() * (-r).exp()
}

/// Residual displacement-noise width after homodyne feed-forward.
pub fn homodyne_sigma(strength: f64, feedforward: f64, inefficiency: f64) -> f64 {
    let v = strength * strength + feedforward * feedforward
        - 2.0 * strength * feedforward * (1.0 - inefficiency).sqrt();
    v.max(0.0).sqrt()
}

/// Feed-forward gain minimising [`homodyne_sigma`].
pub fn optimal_feedforward(strength: f64, inefficiency: f64) -> f64 {
    strength * (1.0 - inefficiency).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionPlan {
    pub direction: Direction,
    /// Number of transducer passes (1 when an input is already matched).
    pub passes: usize,
    /// Gain on mode 1 between the passes.
    pub gamma: Option<f64>,
    /// First pass with its local operations applied.
    pub first: TwoModeTransform,
    /// Second pass with its local operations applied.
    pub second: Option<TwoModeTransform>,
    pub composite: TwoModeTransform,
    pub resulting_class: Classification,
    /// Composite reduced by mode-2 rotations (and mode-1 operations) to
    /// swapped-QND or swap form.
    pub standard_form: DiagonalForm,
    /// Swapped-QND strength of the composite; 0 for a swap.
    pub strength: f64,
    pub finishing: Finishing,
    pub residual_sigma: f64,
}

/// Gain that cancels the `q2 → q2` path of `second ∘ G(γ) ∘ first`, given
/// the `q`-quadrature responses of the two passes.
pub fn matching_gain(first: [[f64; 2]; 2], second: [[f64; 2]; 2]) -> Result<f64> {
    let scale = first.iter().chain(second.iter()).flatten().fold(1.0f64, |m, v| m.max(v.abs()));
    if first[1][1].abs() <= 1e-12 * scale {
        return Err(Error::AlreadyMatched);
    }
    let path = second[1][0] * first[0][1];
    if path.abs() <= 1e-12 * scale * scale {
        return Err(Error::ZeroTransmissionPath);
    }
    Ok(-second[1][1] * first[1][1] / path)
}

fn ideal_finishing(direction: Direction, strength: f64) -> Finishing {
    if strength == 0.0 {
        return Finishing::None;
    }
    match direction {
        Direction::TwoToOne => Finishing::InjectSqueezing { r: f64::INFINITY },
        Direction::OneToTwo => Finishing::HomodyneFeedforward {
            inefficiency: 0.0,
            feedforward: strength,
        },
    }
}

fn standard_form(t: &TwoModeTransform) -> Result<(DiagonalForm, f64)> {
    let opts = DiagOptions {
        prefer: Quadrature::Q,
        ..Default::default()
    };
    let form = diagonalize_with(t, &opts)?;
    let strength = match form.canonical {
        Gate::SwappedQnd { strength, .. } => strength,
        Gate::Swap => 0.0,
        other => {
            return Err(Error::Inconsistent(format!("corrected composite reduced to {other}")));
        }
    };
    Ok((form, strength))
}

/// Plan a two-pass correction of `first` followed by `second`.
pub fn correct(first: &TwoModeTransform, second: &TwoModeTransform, direction: Direction) -> Result<CorrectionPlan> {
    let c1 = classify(first)?;
    let c3 = classify(second)?;
    for c in [&c1, &c3] {
        if c.class == TransducerClass::Identity {
            return Err(Error::Uncorrectable(c.class.to_string()));
        }
    }

    for (c, t) in [(&c1, first), (&c3, second)] {
        if c.class.is_matched() {
            let (form, strength) = standard_form(t)?;
            let finishing = ideal_finishing(direction, strength);
            return Ok(CorrectionPlan {
                direction,
                passes: 1,
                gamma: None,
                first: *t,
                second: None,
                composite: *t,
                resulting_class: c.clone(),
                standard_form: form,
                strength,
                finishing,
                residual_sigma: 0.0,
            });
        }
    }

    let pass1 = diagonalize_constrained(first, Quadrature::Q)?;
    let pass3 = diagonalize_constrained(second, Quadrature::P)?;
    let gamma = matching_gain(pass1.tqq(), pass3.tqq())?;
    let gain = TwoModeTransform::local(QuadMatrix::gain(gamma)?, QuadMatrix::identity());
    let composite = pass3.transformed * gain * pass1.transformed;
    let resulting_class = classify(&composite)?;
    if !resulting_class.class.is_matched() {
        return Err(Error::Inconsistent(format!(
            "composite landed in class {}",
            resulting_class.class
        )));
    }
    let (form, strength) = standard_form(&composite)?;
    Ok(CorrectionPlan {
        direction,
        passes: 2,
        gamma: Some(gamma),
        first: pass1.transformed,
        second: Some(pass3.transformed),
        composite,
        resulting_class,
        standard_form: form,
        strength,
        finishing: ideal_finishing(direction, strength),
        residual_sigma: 0.0,
    })
}

/// Replace the ideal finishing of `plan` with one using a finite resource.
pub fn finish(plan: &CorrectionPlan, resource: Resource) -> Result<CorrectionPlan> {
    let eta = plan.strength;
    let (finishing, sigma) = match (plan.direction, resource) {
        (_, _) if eta == 0.0 => (Finishing::None, 0.0),
        (Direction::TwoToOne, Resource::Squeezing { r }) => {
            if r.is_nan() {
                return Err(Error::InvalidParameter("squeezing must be a number".into()));
            }
            (Finishing::InjectSqueezing { r }, squeezing_sigma(eta, r))
        }
        (Direction::OneToTwo, Resource::Homodyne { inefficiency, feedforward }) => {
            if !(0.0..=1.0).contains(&inefficiency) {
                return Err(Error::InvalidParameter(format!("inefficiency {inefficiency} outside [0, 1]")));
            }
            let ff = feedforward.unwrap_or_else(|| optimal_feedforward(eta, inefficiency));
            (
                Finishing::HomodyneFeedforward { inefficiency, feedforward: ff },
                homodyne_sigma(eta, ff, inefficiency),
            )
        }
        (dir, res) => {
            return Err(Error::InvalidParameter(format!("resource {res:?} cannot finish direction {dir:?}")));
        }
    };
    let mut out = plan.clone();
    out.finishing = finishing;
    out.residual_sigma = sigma;
    Ok(out)
}

/// Strength of the swapped QND gate produced by the six-pass sequence.
pub fn merged_strength(eta: [f64; 3], gamma1: f64, gamma2: f64) -> f64 {
    (gamma1 * eta[0] - eta[1] + gamma2 * eta[2]) / (gamma1 * gamma2)
}

/// `G⁻¹(γ1) sQ(η3) G(γ2) sQ⁻¹(η2) G(γ1) sQ(η1) G⁻¹(γ2)` with gains on mode 1.
pub fn six_pass_composite(eta: [f64; 3], gamma1: f64, gamma2: f64) -> Result<TwoModeTransform> {
    let id = QuadMatrix::identity();
    let g = |gamma: f64| -> Result<TwoModeTransform> { Ok(TwoModeTransform::local(QuadMatrix::gain(gamma)?, id)) };
    let sq = |strength: f64| Gate::SwappedQnd { strength, matched: Quadrature::Q }.matrix();
    Ok(g(1.0 / gamma1)?
        * sq(eta[2])
        * g(gamma2)?
        * swapped_qnd_inverse(eta[1])
        * g(gamma1)?
        * sq(eta[0])
        * g(1.0 / gamma2)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SixPass {
    pub gamma1: f64,
    pub gamma2: f64,
    pub composite: TwoModeTransform,
    /// Max-abs distance from the swap.
    pub deviation: f64,
}

fn gains_usable(g: &[f64; 2]) -> bool {
    g.iter().all(|v| v.is_finite() && *v != 0.0)
}

fn conditioning(g: &[f64; 2]) -> f64 {
    g.iter().map(|v| v.abs().log10().abs()).fold(0.0, f64::max)
}

/// Gains that turn three swapped QND passes into a swap.
pub fn six_pass_gains(eta: [f64; 3]) -> Result<(f64, f64)> {
    if eta.iter().any(|e| *e == 0.0 || !e.is_finite()) {
        return Err(Error::DegenerateStrengths(format!("{eta:?}")));
    }
    let candidates = [
        [(eta[1] - eta[2]) / eta[0], 1.0],
        [1.0, (eta[1] - eta[0]) / eta[2]],
        [eta[1] / (eta[0] + eta[2]); 2],
    ];
    let usable: Vec<&[f64; 2]> = candidates.iter().filter(|g| gains_usable(g)).collect();
    let pick = usable
        .iter()
        .find(|g| conditioning(g) <= 2.0)
        .or_else(|| usable.iter().min_by(|a, b| conditioning(a).total_cmp(&conditioning(b))))
        .ok_or_else(|| Error::DegenerateStrengths(format!("no finite nonzero gains for {eta:?}")))?;
    Ok((pick[0], pick[1]))
}

pub fn six_pass_swap(eta: [f64; 3]) -> Result<SixPass> {
    let (gamma1, gamma2) = six_pass_gains(eta)?;
    let composite = six_pass_composite(eta, gamma1, gamma2)?;
    let deviation = composite.max_abs_diff(&Gate::Swap.matrix());
    Ok(SixPass {
        gamma1,
        gamma2,
        composite,
        deviation,
    })
}
