//! Beam-splitter transducer with a lossy mode 1: closed-form evolution,
//! unitary dilation, and the added-noise and capacity figures of merit for
//! the standard single pass and for two-pass interference.

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::symplectic::{rot_svd, QuadMatrix};

/// Transfer direction through the transducer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transfer {
    /// Mode 1 into mode 2.
    WriteIn,
    /// Mode 2 into mode 1.
    Readout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    /// One pass of the full duration.
    Standard,
    /// Two half-duration passes with a gain between them.
    Interference,
}

fn validate(g: f64, kappa: f64, t: f64) -> Result<()> {
    if !(g.is_finite() && g > 0.0) {
        return Err(Error::InvalidParameter(format!("coupling g must be positive, got {g}")));
    }
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(Error::InvalidParameter(format!("decay rate must be non-negative, got {kappa}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!("time must be non-negative, got {t}")));
    }
    if kappa >= 4.0 * g {
        return Err(Error::OverdampedUnsupported { kappa, g });
    }
    Ok(())
}

/// Amplitude map of the two modes after time `t` of beam-splitter coupling
/// `g` with mode 1 decaying at rate `kappa`.
pub fn system_matrix(g: f64, kappa: f64, t: f64) -> Result<Matrix2<f64>> {
    validate(g, kappa, t)?;
    let sin_gamma = kappa / (4.0 * g);
    let cos_gamma = (1.0 - sin_gamma * sin_gamma).sqrt();
    let gamma = sin_gamma.asin();
    let theta = g * t;
    let phase = theta * cos_gamma;
    let pre = (-theta * sin_gamma).exp() / cos_gamma;
    Ok(Matrix2::new(
        pre * (phase + gamma).cos(),
        pre * phase.sin(),
        -pre * phase.sin(),
        pre * (phase - gamma).cos(),
    ))
}

/// Passive dilation: the rows of `[system | bath]` are orthonormal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dilation {
    pub system: Matrix2<f64>,
    pub bath: Matrix2<f64>,
}

impl Dilation {
    /// Row `i` of `[system | bath]`.
    pub fn row(&self, i: usize) -> [f64; 4] {
        [self.system[(i, 0)], self.system[(i, 1)], self.bath[(i, 0)], self.bath[(i, 1)]]
    }

    /// Max-abs deviation of `[system | bath]` from having orthonormal rows.
    pub fn unitarity_residual(&self) -> f64 {
        (self.system * self.system.transpose() + self.bath * self.bath.transpose() - Matrix2::identity()).amax()
    }
}

pub fn dilate(system: &Matrix2<f64>) -> Result<Dilation> {
    let svd = rot_svd(&QuadMatrix(*system));
    let mut widths = [0.0; 2];
    for (w, d) in widths.iter_mut().zip([svd.d1, svd.d2]) {
        let lambda = d.abs();
        if lambda > 1.0 + 1e-9 {
            return Err(Error::GainDetected { singular_value: lambda });
        }
        *w = (1.0 - lambda * lambda).max(0.0).sqrt();
    }
    let bath = svd.left.0 * Matrix2::from_diagonal(&nalgebra::Vector2::new(widths[0], widths[1]));
    Ok(Dilation { system: *system, bath })
}

/// Response of the two output quadratures to the six noise-carrying inputs
/// of the two-pass protocol: both modes, then the bath of each pass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolArrays {
    pub gamma: f64,
    pub tqq: [[f64; 6]; 2],
    pub tpp: [[f64; 6]; 2],
}

impl ProtocolArrays {
    /// Max-abs deviation from `Σ_k tqq[i][k]·tpp[j][k] = δ_ij`.
    pub fn commutator_residual(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let s: f64 = (0..6).map(|k| self.tqq[i][k] * self.tpp[j][k]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((s - target).abs());
            }
        }
        worst
    }
}

/// Two passes of duration `tau/2` with gain `gamma` on mode 1 between them.
pub fn protocol_arrays(g: f64, kappa: f64, tau: f64, gamma: f64) -> Result<ProtocolArrays> {
    if gamma == 0.0 || !gamma.is_finite() {
        return Err(Error::InvalidGain(gamma));
    }
    let d = dilate(&system_matrix(g, kappa, tau / 2.0)?)?;
    let rows = [d.row(0), d.row(1)];
    let mut tqq = [[0.0; 6]; 2];
    let mut tpp = [[0.0; 6]; 2];
    for i in 0..2 {
        for k in 0..4 {
            let via1 = rows[i][0] * rows[0][k];
            let via2 = rows[i][1] * rows[1][k];
            tqq[i][k] = gamma * via1 + via2;
            tpp[i][k] = via1 / gamma + via2;
        }
        for k in 4..6 {
            tqq[i][k] = rows[i][k - 2];
            tpp[i][k] = rows[i][k - 2];
        }
    }
    Ok(ProtocolArrays { gamma, tqq, tpp })
}

/// Gain between the passes that cancels the reflection of the matched
/// quadrature on the output mode.
pub fn impedance_gain(g: f64, kappa: f64, tau: f64, transfer: Transfer) -> Result<f64> {
    let t = system_matrix(g, kappa, tau / 2.0)?;
    let path = t[(1, 0)] * t[(0, 1)];
    let reflect = match transfer {
        Transfer::WriteIn => t[(1, 1)],
        Transfer::Readout => t[(0, 0)],
    };
    if reflect.abs() <= 1e-12 {
        return Err(Error::AlreadyMatched);
    }
    if path.abs() <= 1e-14 {
        return Err(Error::ZeroTransmissionPath);
    }
    Ok(-reflect * reflect / path)
}

/// Entropy of a thermal state with mean occupation `n`, in bits.
pub fn thermal_entropy(n: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    (n + 1.0) * (n + 1.0).log2() - n * n.log2()
}

/// Lower bound on the quantum capacity of a phase-insensitive channel with
/// transmissivity `tau` and added thermal occupation `n`.
pub fn capacity_bound(tau: f64, n: f64) -> f64 {
    (((tau / (1.0 - tau)).abs()).log2() - thermal_entropy(n)).max(0.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseReport {
    /// Gain between the passes (1 for a single pass).
    pub gamma: f64,
    /// Homodyne feed-forward gain, where the scheme uses one.
    pub eta_d: Option<f64>,
    pub n_q: f64,
    pub n_p: f64,
    /// Added noise after the optimal single-mode squeeze, `2√(NqNp)`.
    pub nbar_min: f64,
    /// Squeeze factor achieving `nbar_min`.
    pub gamma0: f64,
    /// Transmissivity of the equivalent phase-insensitive channel.
    pub tau_c: f64,
    pub n_c: f64,
    pub q: f64,
}

fn added_noise(noise: &[f64], signal: f64) -> f64 {
    0.25 * noise.iter().map(|v| v * v).sum::<f64>() / (signal * signal)
}

/// Feed-forward gain minimising the `p` added noise, where `out` is the
/// output `p` row and `meas` is the measured `p` row; index 0 is the signal.
pub fn optimal_eta_d(out: &[f64], meas: &[f64]) -> f64 {
    let (a1, b1) = (out[0], meas[0]);
    let (mut aa, mut ab, mut bb) = (0.0, 0.0, 0.0);
    for (a, b) in out.iter().zip(meas).skip(1) {
        aa += a * a;
        ab += a * b;
        bb += b * b;
    }
    (ab * a1 - aa * b1) / (bb * a1 - ab * b1)
}

fn report(gamma: f64, eta_d: Option<f64>, q_row: &[f64], p_row: &[f64], signal: usize) -> Result<NoiseReport> {
    let noise = |row: &[f64]| -> Vec<f64> {
        row.iter().enumerate().filter(|(k, _)| *k != signal).map(|(_, v)| *v).collect()
    };
    let (qn, pn) = (noise(q_row), noise(p_row));
    let (sq, sp) = (q_row[signal], p_row[signal]);
    if sq == 0.0 || sp == 0.0 {
        return Err(Error::ZeroTransmissionPath);
    }
    let n_q = added_noise(&qn, sq);
    let n_p = added_noise(&pn, sp);
    let nbar_min = 2.0 * (n_q * n_p).sqrt();
    let gamma0 = if n_q == 0.0 && n_p == 0.0 { 1.0 } else { (n_q / n_p).powf(0.25) };

    let tau_c = sq * sp;
    let vq: f64 = 0.5 * qn.iter().map(|v| v * v).sum::<f64>();
    let vp: f64 = 0.5 * pn.iter().map(|v| v * v).sum::<f64>();
    let spread = (vq * vp).sqrt();
    let gap = (1.0 - tau_c).abs();
    let (n_c, q) = if spread <= 1e-12 && gap <= 1e-9 {
        (0.0, f64::INFINITY)
    } else if gap == 0.0 {
        // Limit of the capacity bound as the transmissivity reaches one.
        (f64::INFINITY, (tau_c.abs().log2() - (std::f64::consts::E * spread).log2()).max(0.0))
    } else {
        let raw = spread / gap - 0.5;
        let n_c = if raw >= 0.0 {
            raw
        } else if raw >= -0.5 + 1e-12 {
            0.0
        } else {
            return Err(Error::Inconsistent(format!("negative added thermal noise {raw}")));
        };
        (n_c, capacity_bound(tau_c, n_c))
    };

    Ok(NoiseReport {
        gamma,
        eta_d,
        n_q,
        n_p,
        nbar_min,
        gamma0,
        tau_c,
        n_c,
        q,
    })
}

/// Noise figures for transferring mode 1 into mode 2 over total time `tau`.
pub fn writein_metrics(g: f64, kappa: f64, tau: f64, scheme: Scheme) -> Result<NoiseReport> {
    match scheme {
        Scheme::Standard => {
            let d = dilate(&system_matrix(g, kappa, tau)?)?;
            let row = d.row(1);
            report(1.0, None, &row, &row, 0)
        }
        Scheme::Interference => {
            let gamma = impedance_gain(g, kappa, tau, Transfer::WriteIn)?;
            let arr = protocol_arrays(g, kappa, tau, gamma)?;
            let eta_d = optimal_eta_d(&arr.tpp[1], &arr.tpp[0]);
            let p_row: Vec<f64> = (0..6).map(|k| arr.tpp[1][k] - eta_d * arr.tpp[0][k]).collect();
            report(gamma, Some(eta_d), &arr.tqq[1], &p_row, 0)
        }
    }
}

/// Noise figures for transferring mode 2 into mode 1 over total time `tau`.
///
/// In the interference scheme the `q` reflection of mode 1 is removed by
/// squeezing, so only the bath inputs contribute noise.
pub fn readout_metrics(g: f64, kappa: f64, tau: f64, scheme: Scheme) -> Result<NoiseReport> {
    match scheme {
        Scheme::Standard => {
            let d = dilate(&system_matrix(g, kappa, tau)?)?;
            let row = d.row(0);
            report(1.0, None, &row, &row, 1)
        }
        Scheme::Interference => {
            let gamma = impedance_gain(g, kappa, tau, Transfer::Readout)?;
            let arr = protocol_arrays(g, kappa, tau, gamma)?;
            report(gamma, None, &arr.tqq[0][1..], &arr.tpp[0][1..], 0)
        }
    }
}

pub fn metrics(g: f64, kappa: f64, tau: f64, scheme: Scheme, transfer: Transfer) -> Result<NoiseReport> {
    match transfer {
        Transfer::WriteIn => writein_metrics(g, kappa, tau, scheme),
        Transfer::Readout => readout_metrics(g, kappa, tau, scheme),
    }
}
