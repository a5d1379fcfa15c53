//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use transduction::codes::channel::{DensityMatrix, DisplacementNoise};
use transduction::codes::fock::{FockSpace, FockVector};
use transduction::codes::{logical_coefficients, squeezed_cat_basis, Code, CodeEvaluator, CodeSettings};
use transduction::interference::{correct, matching_gain, six_pass_swap, Direction};
use transduction::lossy::{capacity_bound, dilate, system_matrix, writein_metrics, Scheme};
use transduction::{classify, diagonalize, Gate, QuadMatrix, Quadrature, TransducerClass, TwoModeTransform};
use transduction_cli::args::{ModeArg, Scale, SweepLossyArgs, TransferArg};
use transduction_cli::commands::sweep_lossy_csv;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit: Duration, detail: String) -> Outcome {
    if elapsed <= limit {
        Ok(detail)
    } else {
        Err(format!("{detail}; took {elapsed:?}, limit {limit:?}"))
    }
}

fn tau_tenth() -> f64 {
    0.1 * PI / 2.0
}

fn local(rng: &mut ChaCha8Rng, max_squeeze: f64) -> QuadMatrix {
    QuadMatrix::rotation(rng.gen_range(-PI..PI))
        * QuadMatrix::squeeze(rng.gen_range(-max_squeeze..max_squeeze))
        * QuadMatrix::rotation(rng.gen_range(-PI..PI))
}

fn rotation(rng: &mut ChaCha8Rng) -> QuadMatrix {
    QuadMatrix::rotation(rng.gen_range(-PI..PI))
}

fn dress(rng: &mut ChaCha8Rng, t: &TwoModeTransform) -> TwoModeTransform {
    t.dressed(local(rng, 1.0), local(rng, 1.0), local(rng, 1.0), local(rng, 1.0))
}

fn random_gate(rng: &mut ChaCha8Rng) -> Gate {
    match rng.gen_range(0..7) {
        0 => Gate::Identity,
        1 => Gate::Swap,
        2 => Gate::BeamSplitter(rng.gen_range(0.05..1.52)),
        3 => Gate::TwoModeSqueeze(rng.gen_range(0.05..1.5)),
        4 => Gate::SwappedTwoModeSqueeze(rng.gen_range(0.05..1.5)),
        5 => Gate::Qnd {
            strength: rng.gen_range(0.1..3.0),
            transmitted: Quadrature::Q,
        },
        _ => Gate::SwappedQnd {
            strength: rng.gen_range(0.1..3.0),
            matched: Quadrature::Q,
        },
    }
}

/// Product of beam splitters, a two-mode squeezer and local operations:
/// a generic symplectic transducer.
fn random_symplectic(rng: &mut ChaCha8Rng) -> TwoModeTransform {
    let mut l = || TwoModeTransform::local(local(rng, 0.5), local(rng, 0.5));
    let (d1, d2, d3) = (l(), l(), l());
    let bs1 = Gate::BeamSplitter(rng.gen_range(0.0..PI)).matrix();
    let bs2 = Gate::BeamSplitter(rng.gen_range(0.0..PI)).matrix();
    let tms = Gate::TwoModeSqueeze(rng.gen_range(-0.8..0.8)).matrix();
    d1 * bs1 * d2 * tms * d3 * bs2
}

fn c1_standard_noise() -> Outcome {
    let start = Instant::now();
    let m = writein_metrics(1.0, 0.0, tau_tenth(), Scheme::Standard).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let exact = 0.5 / (PI / 20.0).tan().powi(2);
    let ok = (m.nbar_min - exact).abs() < 1e-9 * exact && (m.nbar_min / 19.9 - 1.0).abs() < 0.005;
    check(ok, format!("Nbar_min={:.6} (closed form {exact:.6})", m.nbar_min))?;
    within(elapsed, Duration::from_secs(1), format!("Nbar_min={:.6}", m.nbar_min))
}

fn c2_standard_capacity() -> Outcome {
    let start = Instant::now();
    let m = writein_metrics(1.0, 0.0, tau_tenth(), Scheme::Standard).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let exact = (PI / 20.0).sin().powi(2);
    let ok = (m.tau_c - exact).abs() < 1e-12 && m.tau_c <= 0.5 && m.q == 0.0;
    check(ok, format!("tau_C={:.9}, Q={}", m.tau_c, m.q))?;
    within(elapsed, Duration::from_secs(1), format!("tau_C={:.9}, Q={}", m.tau_c, m.q))
}

fn c3_interference_lossless() -> Outcome {
    let m = writein_metrics(1.0, 0.0, tau_tenth(), Scheme::Interference).map_err(|e| e.to_string())?;
    let ideal = capacity_bound(1.0, 0.0);
    let q_ok = if ideal.is_finite() { (m.q - ideal).abs() < 1e-9 } else { m.q == ideal };
    let ok = m.nbar_min < 1e-9 && (m.tau_c - 1.0).abs() < 1e-9 && q_ok;
    check(ok, format!("Nbar_min={:.3e}, tau_C={}, Q={} (ideal {ideal})", m.nbar_min, m.tau_c, m.q))
}

/// First grid crossing of `level`, linearly interpolated.
fn crossing(xs: &[f64], ys: &[f64], level: f64, above: bool) -> Option<f64> {
    let hit = |y: f64| if above { y > level } else { y <= level };
    let i = ys.iter().position(|&y| hit(y))?;
    if i == 0 {
        return Some(xs[0]);
    }
    let (x0, x1, y0, y1) = (xs[i - 1], xs[i], ys[i - 1], ys[i]);
    Some(if y1 == y0 { x1 } else { x0 + (level - y0) * (x1 - x0) / (y1 - y0) })
}

fn c4_loss_curves() -> Outcome {
    let start = Instant::now();
    let tau = tau_tenth();
    let ks: Vec<f64> = (0..=400).map(|i| 0.2 * i as f64 / 400.0).collect();
    let mut nbar = Vec::new();
    let mut q = Vec::new();
    for &k in &ks {
        let m = writein_metrics(1.0, k, tau, Scheme::Interference).map_err(|e| e.to_string())?;
        nbar.push(m.nbar_min);
        q.push(m.q);
    }
    let std = writein_metrics(1.0, 0.1, tau, Scheme::Standard).map_err(|e| e.to_string())?;
    let int = writein_metrics(1.0, 0.1, tau, Scheme::Interference).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let half = crossing(&ks, &nbar, 0.5, true);
    let q_zero = crossing(&ks, &q, 0.0, false);
    let inside = |x: Option<f64>| x.is_some_and(|x| (0.05..=0.2).contains(&x));
    let detail = format!(
        "at kappa=0.1g {:.4} vs {:.4}; Nbar crosses 0.5 at {:?}; Q reaches 0 at {:?}",
        int.nbar_min, std.nbar_min, half, q_zero
    );
    check(int.nbar_min <= std.nbar_min / 10.0 && inside(half) && inside(q_zero), detail.clone())?;
    within(elapsed, Duration::from_secs(10), detail)
}

fn c5_classification_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let start = Instant::now();
    let (mut chi_err, mut det_res) = (0.0f64, 0.0f64);
    for i in 0..1000 {
        let t = if i % 2 == 0 {
            random_symplectic(&mut rng)
        } else {
            let g = random_gate(&mut rng).matrix();
            dress(&mut rng, &g)
        };
        let d = dress(&mut rng, &t);
        let a = classify(&t).map_err(|e| format!("case {i}: {e}"))?;
        let b = classify(&d).map_err(|e| format!("case {i}: {e}"))?;
        if a.class != b.class {
            return Err(format!("case {i}: class {} became {}", a.class, b.class));
        }
        let ranks = b.block_ranks;
        if ranks[0][0] != ranks[1][1] || ranks[0][1] != ranks[1][0] {
            return Err(format!("case {i}: block ranks {ranks:?}"));
        }
        chi_err = chi_err.max((a.chi - b.chi).abs());
        det_res = det_res.max(a.det_residual).max(b.det_residual);
    }
    let elapsed = start.elapsed();
    let detail = format!("max chi change {chi_err:.2e}, max row-determinant residual {det_res:.2e}");
    check(chi_err < 1e-9 && det_res < 1e-10, detail.clone())?;
    within(elapsed, Duration::from_secs(5), detail)
}

fn c6_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut param_err, mut det_err, mut residual) = (0.0f64, 0.0f64, 0.0f64);
    let gates = |rng: &mut ChaCha8Rng| {
        vec![
            Gate::Identity,
            Gate::Swap,
            Gate::BeamSplitter(rng.gen_range(0.05..1.52)),
            Gate::TwoModeSqueeze(rng.gen_range(0.05..1.5)),
            Gate::SwappedTwoModeSqueeze(rng.gen_range(0.05..1.5)),
            Gate::Qnd {
                strength: rng.gen_range(0.1..3.0),
                transmitted: Quadrature::Q,
            },
            Gate::SwappedQnd {
                strength: rng.gen_range(0.1..3.0),
                matched: Quadrature::Q,
            },
        ]
    };
    for _ in 0..100 {
        for g in gates(&mut rng) {
            // A QND strength changes under squeezing of the modes it
            // couples, so those modes only receive rotations.
            let t = match g {
                Gate::Qnd { .. } => g
                    .matrix()
                    .dressed(rotation(&mut rng), local(&mut rng, 1.0), local(&mut rng, 1.0), rotation(&mut rng)),
                Gate::SwappedQnd { .. } => g
                    .matrix()
                    .dressed(local(&mut rng, 1.0), rotation(&mut rng), local(&mut rng, 1.0), rotation(&mut rng)),
                _ => dress(&mut rng, &g.matrix()),
            };
            let form = diagonalize(&t).map_err(|e| format!("{g}: {e}"))?;
            if form.canonical.name() != g.name() {
                return Err(format!("{g} recovered as {}", form.canonical));
            }
            if let (Some(a), Some(b)) = (g.parameter(), form.canonical.parameter()) {
                param_err = param_err.max((a - b).abs());
            }
            for m in [form.out1, form.out2, form.in1, form.in2] {
                det_err = det_err.max((m.det() - 1.0).abs());
            }
            residual = residual.max(form.residual);
        }
    }
    check(
        param_err < 1e-8 && det_err < 1e-12 && residual < 1e-9,
        format!("parameter error {param_err:.2e}, local det error {det_err:.2e}, residual {residual:.2e}"),
    )
}

fn c7_interference_correction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let correctable = |rng: &mut ChaCha8Rng| match rng.gen_range(0..4) {
        0 => Gate::BeamSplitter(rng.gen_range(0.05..1.52)),
        1 => Gate::TwoModeSqueeze(rng.gen_range(0.05..1.5)),
        2 => Gate::SwappedTwoModeSqueeze(rng.gen_range(0.05..1.5)),
        _ => Gate::Qnd {
            strength: rng.gen_range(0.1..3.0),
            transmitted: Quadrature::Q,
        },
    };
    for i in 0..1000 {
        let (g1, g3) = (correctable(&mut rng).matrix(), correctable(&mut rng).matrix());
        let first = dress(&mut rng, &g1);
        let second = dress(&mut rng, &g3);
        let dir = if i % 2 == 0 { Direction::OneToTwo } else { Direction::TwoToOne };
        let plan = correct(&first, &second, dir).map_err(|e| format!("pair {i}: {e}"))?;
        let c = &plan.resulting_class;
        if !matches!(c.class, TransducerClass::SwappedQnd | TransducerClass::Swap) || c.block_ranks[1][1] > 1 {
            return Err(format!("pair {i}: composite class {} ranks {:?}", c.class, c.block_ranks));
        }
    }
    let mut worst = 0.0f64;
    for theta in [PI / 20.0, PI / 8.0, PI / 5.0, PI / 3.0] {
        let bs = Gate::BeamSplitter(theta).matrix();
        let q_of = |t: &TwoModeTransform| [[t.get(0, 0), t.get(0, 2)], [t.get(2, 0), t.get(2, 2)]];
        let gamma = matching_gain(q_of(&bs), q_of(&bs)).map_err(|e| e.to_string())?;
        let gain = TwoModeTransform::local(QuadMatrix::gain(gamma).map_err(|e| e.to_string())?, QuadMatrix::identity());
        let composite = bs * gain * bs;
        let (tan, cot) = (theta.tan(), 1.0 / theta.tan());
        let eta = 1.0 - tan * tan;
        let expected = TwoModeTransform::from_rows([
            [eta * cot * cot, 0.0, cot, 0.0],
            [0.0, 0.0, 0.0, tan],
            [-cot, 0.0, 0.0, 0.0],
            [0.0, -tan, 0.0, eta],
        ]);
        worst = worst.max(composite.max_abs_diff(&expected)).max((gamma - cot * cot).abs());
    }
    check(worst < 1e-12, format!("1000 pairs matched; two-beam-splitter deviation {worst:.2e}"))
}

fn c8_six_pass() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let mut eta = [0.0; 3];
        for e in &mut eta {
            let sign = if rng.gen_bool(0.5) { -1.0 } else { 1.0 };
            *e = sign * rng.gen_range(0.05..5.0);
        }
        let s = six_pass_swap(eta).map_err(|e| format!("{eta:?}: {e}"))?;
        worst = worst.max(s.deviation);
    }
    check(worst < 1e-10, format!("max deviation from swap {worst:.2e}"))
}

/// Fourth-order Runge–Kutta for the lossy beam-splitter amplitudes.
fn integrate(g: f64, kappa: f64, t: f64) -> nalgebra::Matrix2<f64> {
    let a = nalgebra::Matrix2::new(-0.5 * kappa, g, -g, 0.0);
    let steps = ((t / 1e-3).ceil() as usize).max(1);
    let h = t / steps as f64;
    let mut m = nalgebra::Matrix2::identity();
    for _ in 0..steps {
        let k1 = a * m;
        let k2 = a * (m + k1 * (0.5 * h));
        let k3 = a * (m + k2 * (0.5 * h));
        let k4 = a * (m + k3 * h);
        m += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    }
    m
}

fn c9_lossy_oracle() -> Outcome {
    let (mut worst, mut unit) = (0.0f64, 0.0f64);
    for i in 0..20 {
        let kappa = 2.0 * i as f64 / 19.0;
        for j in 0..20 {
            let t = PI * j as f64 / 19.0;
            let closed = system_matrix(1.0, kappa, t).map_err(|e| e.to_string())?;
            worst = worst.max((closed - integrate(1.0, kappa, t)).amax());
            unit = unit.max(dilate(&closed).map_err(|e| e.to_string())?.unitarity_residual());
        }
    }
    check(
        worst < 1e-8 && unit < 1e-10,
        format!("max deviation from ODE {worst:.2e}, dilation residual {unit:.2e}"),
    )
}

fn c10_codes() -> Outcome {
    let start = Instant::now();
    let alpha = 2.0;
    let factor = 0.5;
    let base = CodeSettings::default();
    let cat = CodeEvaluator::new(Code::Cat { alpha }, &base).map_err(|e| e.to_string())?;
    let sq_code = Code::SqueezedCat {
        alpha,
        squeeze_factor: factor,
    };
    let sq = CodeEvaluator::new(sq_code, &base).map_err(|e| e.to_string())?;

    let f0 = cat.average_fidelity(0.0).map_err(|e| e.to_string())?;
    let s0 = sq.average_fidelity(0.0).map_err(|e| e.to_string())?;
    if (f0 - 1.0).abs() > 1e-8 || (s0 - 1.0).abs() > 1e-8 {
        return Err(format!("noiseless fidelities {f0}, {s0}"));
    }

    // Squeezed cat built by an explicit squeezing operator, against the
    // cat evaluated at the reduced noise width.
    let dim = 240;
    let basis = squeezed_cat_basis(alpha, factor, cat.n_trunc(), dim).map_err(|e| e.to_string())?;
    let space = FockSpace::new(dim);
    let mut identity_err = 0.0f64;
    for (theta, phi) in [(0.0, 0.0), (PI / 2.0, 0.0), (0.9, 1.7)] {
        let [c0, c1] = logical_coefficients(theta, phi);
        let state = FockVector::superpose(c0, &basis[0], c1, &basis[1]);
        for sigma in [0.2, 0.6, 1.0] {
            let noise = DisplacementNoise::new(sigma, 41).map_err(|e| e.to_string())?;
            let rho = noise.apply(&space, &DensityMatrix::pure(&state));
            let explicit = rho.fidelity_with(&state.amplitudes);
            let scaled = cat.fidelity(theta, phi, sigma * factor).map_err(|e| e.to_string())?;
            identity_err = identity_err.max((explicit - scaled).abs());
        }
    }
    if identity_err > 1e-6 {
        return Err(format!("squeezed-cat identity off by {identity_err:.2e}"));
    }

    for i in 1..=10 {
        let sigma = 0.1 * i as f64;
        let fc = cat.average_fidelity(sigma).map_err(|e| e.to_string())?;
        let fs = sq.average_fidelity(sigma).map_err(|e| e.to_string())?;
        let fq = cat.qsp_average_fidelity(sigma).map_err(|e| e.to_string())?;
        if fs < fc || fq < fc {
            return Err(format!("ordering fails at sigma={sigma}: cat {fc}, squeezed {fs}, modular {fq}"));
        }
    }

    let doubled = CodeSettings {
        n_trunc: Some(2 * cat.n_trunc()),
        hermite_order: 2 * base.hermite_order,
        bloch_order: 2 * base.bloch_order,
    };
    let cat2 = CodeEvaluator::new(Code::Cat { alpha }, &doubled).map_err(|e| e.to_string())?;
    let sq2 = CodeEvaluator::new(sq_code, &doubled).map_err(|e| e.to_string())?;
    let mut drift = 0.0f64;
    for i in 0..=10 {
        let sigma = 0.1 * i as f64;
        let pairs = [
            (cat.average_fidelity(sigma), cat2.average_fidelity(sigma)),
            (sq.average_fidelity(sigma), sq2.average_fidelity(sigma)),
            (cat.qsp_average_fidelity(sigma), cat2.qsp_average_fidelity(sigma)),
        ];
        for (a, b) in pairs {
            drift = drift.max((a.map_err(|e| e.to_string())? - b.map_err(|e| e.to_string())?).abs());
        }
    }
    let elapsed = start.elapsed();
    let detail = format!("identity error {identity_err:.2e}, doubling drift {drift:.2e}");
    check(drift < 1e-6, detail.clone())?;
    within(elapsed, Duration::from_secs(60), detail)
}

fn c11_cli_determinism() -> Outcome {
    let args = |threads| SweepLossyArgs {
        kappa: None,
        kappa_start: 0.0,
        kappa_stop: 0.2,
        kappa_count: 41,
        scale: Scale::Linear,
        g: 1.0,
        tau_frac: 0.1,
        mode: ModeArg::Both,
        direction: TransferArg::Writein,
        threads,
        out: None,
    };
    let serial = sweep_lossy_csv(&args(1)).map_err(|e| e.to_string())?;
    let parallel = sweep_lossy_csv(&args(4)).map_err(|e| e.to_string())?;
    let again = sweep_lossy_csv(&args(4)).map_err(|e| e.to_string())?;
    if serial != parallel || parallel != again {
        return Err("library sweep output differs between runs".into());
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut outputs = Vec::new();
    for (name, threads) in [("a.csv", "1"), ("b.csv", "4"), ("c.csv", "4")] {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_transduce"))
            .args(["sweep-lossy", "--kappa-count", "41", "--mode", "both", "--threads", threads, "--out"])
            .arg(&path)
            .status()
            .map_err(|e| e.to_string())?;
        if !status.success() {
            return Err(format!("sweep-lossy exited with {status}"));
        }
        outputs.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    let same = outputs.iter().all(|o| *o == outputs[0]) && outputs[0] == serial.as_bytes();
    check(same, format!("{} bytes, identical across runs and thread counts", outputs[0].len()))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("standard transfer adds about 20 quanta of noise", c1_standard_noise),
        ("standard transfer has zero capacity", c2_standard_capacity),
        ("lossless interference transfer is ideal", c3_interference_lossless),
        ("interference noise and capacity versus loss", c4_loss_curves),
        ("classification invariant under local operations", c5_classification_invariance),
        ("canonical forms recovered from dressed gates", c6_round_trip),
        ("interference correction reaches a matched class", c7_interference_correction),
        ("six passes compose to a swap", c8_six_pass),
        ("lossy evolution matches direct integration", c9_lossy_oracle),
        ("bosonic-code fidelities", c10_codes),
        ("sweep output is deterministic", c11_cli_determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let ms = start.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{ms:.0} ms]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {detail} [{ms:.0} ms]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
