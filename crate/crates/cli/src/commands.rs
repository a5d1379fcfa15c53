use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use transduction::codes::{Code, CodeEvaluator, CodeSettings};
use transduction::diagonalization::DiagonalForm;
use transduction::interference::{correct, finish, six_pass_swap, Direction, Resource};
use transduction::lossy::{metrics, Scheme, Transfer};
use transduction::{diagonalize, Classification, Gate, QuadMatrix, TransducerClass, TwoModeTransform};

use crate::args::{
    ClassifyArgs, CodeArg, CodeFidelityArgs, CorrectArgs, DirectionArg, ModeArg, Scale, SixPassArgs,
    SweepLossyArgs, TransferArg,
};
use crate::error::{CliError, CliResult};
use crate::matrix_file;
use crate::output::{csv, number, short, write_atomic};

/// Environment variable holding the default photon-number truncation.
pub const NTRUNC_ENV: &str = "TRANSDUCE_NTRUNC";

/// Largest deviation from a swap accepted by `six-pass`.
pub const SIX_PASS_TOL: f64 = 1e-8;

pub const LOSSY_HEADER: [&str; 8] = ["mode", "kappa_over_g", "N_q", "N_p", "Nbar_min", "tau_C", "n_C", "Q"];

type Block = [[f64; 2]; 2];

fn block(m: &QuadMatrix) -> Block {
    [[m.0[(0, 0)], m.0[(0, 1)]], [m.0[(1, 0)], m.0[(1, 1)]]]
}

fn rows(t: &TwoModeTransform) -> [[f64; 4]; 4] {
    t.to_rows()
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> CliResult<()> {
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::validation(format!("stdout: {e}"))),
    }
}

fn say(stdout: &mut dyn Write, line: &str) -> CliResult<()> {
    writeln!(stdout, "{line}").map_err(|e| CliError::validation(format!("stdout: {e}")))
}

fn to_toml<T: Serialize>(value: &T) -> String {
    toml::to_string(value).expect("report serializes")
}

fn parameter_name(class: TransducerClass) -> Option<&'static str> {
    use transduction::Subclass;
    match class {
        TransducerClass::Full(Subclass::BeamSplitter) => Some("theta"),
        TransducerClass::Full(_) => Some("r"),
        TransducerClass::Qnd | TransducerClass::SwappedQnd => Some("eta"),
        TransducerClass::Identity | TransducerClass::Swap => None,
    }
}

fn gate_summary(class: &Classification, gate: &Gate) -> String {
    let mut s = format!("{} {}", class.class, class.class.canonical_name());
    if let (Some(name), Some(value)) = (parameter_name(class.class), gate.parameter()) {
        s.push_str(&format!(" {name}={}", short(value)));
    }
    s
}

#[derive(Debug, Serialize)]
pub struct Locals {
    pub out1: Block,
    pub out2: Block,
    pub in1: Block,
    pub in2: Block,
}

impl Locals {
    fn from_form(form: &DiagonalForm) -> Self {
        Locals {
            out1: block(&form.out1),
            out2: block(&form.out2),
            in1: block(&form.in1),
            in2: block(&form.in2),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ClassifyReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub class: String,
    pub canonical: String,
    pub gate: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter_name: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parameter: Option<f64>,
    pub chi: f64,
    pub chi_raw: f64,
    pub margin_decades: f64,
    pub symplectic_residual: f64,
    pub row_determinant_residual: f64,
    pub block_ranks: [[u8; 2]; 2],
    pub warnings: Vec<String>,
    pub diagonalization_residual: f64,
    pub locals: Locals,
    #[serde(skip)]
    pub summary: String,
}

impl ClassifyReport {
    pub fn new(t: &TwoModeTransform, label: Option<String>) -> CliResult<Self> {
        let form = diagonalize(t)?;
        let c = &form.classification;
        Ok(ClassifyReport {
            label,
            class: c.class.to_string(),
            canonical: c.class.canonical_name().to_string(),
            gate: form.canonical.name().to_string(),
            parameter_name: parameter_name(c.class),
            parameter: form.canonical.parameter(),
            chi: c.chi,
            chi_raw: c.chi_raw,
            margin_decades: c.margin,
            symplectic_residual: c.symplectic_residual,
            row_determinant_residual: c.det_residual,
            block_ranks: c.block_ranks,
            warnings: c.warnings.iter().map(|w| format!("{w:?}")).collect(),
            diagonalization_residual: form.residual,
            locals: Locals::from_form(&form),
            summary: format!("{}, chi={}", gate_summary(c, &form.canonical), short(c.chi)),
        })
    }
}

pub fn classify(args: &ClassifyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let (file, t) = matrix_file::load(&args.path)?;
    let report = ClassifyReport::new(&t, file.label)?;
    say(stdout, &report.summary)?;
    let text = to_toml(&report);
    match &args.out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => emit(&format!("\n{text}"), None, stdout),
    }
}

#[derive(Debug, Serialize)]
pub struct CorrectReport {
    pub direction: &'static str,
    pub passes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    pub composite_class: String,
    pub canonical: String,
    /// Swapped-QND strength left after correction; 0 for a swap.
    pub strength: f64,
    pub finishing: String,
    pub sigma_formula: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_sigma: Option<f64>,
    pub composite: [[f64; 4]; 4],
    pub first_pass: [[f64; 4]; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub second_pass: Option<[[f64; 4]; 4]>,
    pub standard_locals: Locals,
}

pub fn correct_cmd(args: &CorrectArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let (_, first) = matrix_file::load(&args.first)?;
    let (_, second) = matrix_file::load(&args.second)?;
    let (direction, name) = match args.direction {
        DirectionArg::OneToTwo => (Direction::OneToTwo, "1to2"),
        DirectionArg::TwoToOne => (Direction::TwoToOne, "2to1"),
    };
    let resource = match (args.squeezing, args.inefficiency) {
        (Some(_), Some(_)) => {
            return Err(CliError::validation("give either --squeezing or --inefficiency, not both"));
        }
        (Some(r), None) => Some(Resource::Squeezing { r }),
        (None, Some(inefficiency)) => Some(Resource::Homodyne {
            inefficiency,
            feedforward: None,
        }),
        (None, None) => None,
    };
    let mut plan = correct(&first, &second, direction)?;
    let mut residual_sigma = None;
    if let Some(res) = resource {
        plan = finish(&plan, res)?;
        residual_sigma = Some(plan.residual_sigma);
    }
    let sigma_formula = match direction {
        Direction::TwoToOne => "sigma = |eta| exp(-r)",
        Direction::OneToTwo => {
            "sigma = sqrt(eta^2 + eta_D^2 - 2 eta eta_D sqrt(1 - eps)), smallest at eta_D = eta sqrt(1 - eps)"
        }
    };
    let c = &plan.resulting_class;
    let report = CorrectReport {
        direction: name,
        passes: plan.passes,
        gamma: plan.gamma,
        composite_class: c.class.to_string(),
        canonical: c.class.canonical_name().to_string(),
        strength: plan.strength,
        finishing: format!("{:?}", plan.finishing),
        sigma_formula,
        residual_sigma,
        composite: rows(&plan.composite),
        first_pass: rows(&plan.first),
        second_pass: plan.second.as_ref().map(rows),
        standard_locals: Locals::from_form(&plan.standard_form),
    };
    let mut line = format!("composite {}", gate_summary(c, &plan.standard_form.canonical));
    if let Some(g) = plan.gamma {
        line.push_str(&format!(", gamma={}", short(g)));
    }
    line.push_str(&format!(", passes={}", plan.passes));
    if let Some(s) = residual_sigma {
        line.push_str(&format!(", sigma={}", short(s)));
    }
    say(stdout, &line)?;
    emit(&format!("\n{}", to_toml(&report)), None, stdout)?;
    if let Some(path) = &args.out {
        matrix_file::save(path, &plan.composite, "interference composite")?;
    }
    Ok(())
}

/// Grid from `start` to `stop` inclusive with exact endpoints.
pub fn grid(start: f64, stop: f64, count: usize, scale: Scale, what: &str) -> CliResult<Vec<f64>> {
    if !(start.is_finite() && stop.is_finite()) {
        return Err(CliError::validation(format!("{what} range must be finite")));
    }
    if count < 2 {
        return Err(CliError::validation(format!("{what} count must be at least 2, got {count}")));
    }
    if start >= stop {
        return Err(CliError::validation(format!("{what} range needs start < stop, got {start} and {stop}")));
    }
    if scale == Scale::Log && start <= 0.0 {
        return Err(CliError::validation(format!("log {what} range needs a positive start, got {start}")));
    }
    let last = (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            if i == 0 {
                return start;
            }
            if i == count - 1 {
                return stop;
            }
            let f = i as f64 / last;
            match scale {
                Scale::Linear => start + (stop - start) * f,
                Scale::Log => (start.ln() + (stop.ln() - start.ln()) * f).exp(),
            }
        })
        .collect())
}

fn pool(threads: usize) -> CliResult<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::validation(format!("thread pool: {e}")))
}

/// CSV text for a lossy-transducer sweep. Rows are grouped by mode, then
/// ordered by decay rate.
pub fn sweep_lossy_csv(args: &SweepLossyArgs) -> CliResult<String> {
    if !(args.g.is_finite() && args.g > 0.0) {
        return Err(CliError::validation(format!("--g must be positive, got {}", args.g)));
    }
    if !(args.tau_frac.is_finite() && args.tau_frac > 0.0) {
        return Err(CliError::validation(format!("--tau-frac must be positive, got {}", args.tau_frac)));
    }
    let ratios = match args.kappa {
        Some(k) => vec![k],
        None => grid(args.kappa_start, args.kappa_stop, args.kappa_count, args.scale, "kappa")?,
    };
    if let Some(bad) = ratios.iter().find(|k| !(k.is_finite() && (0.0..4.0).contains(*k))) {
        return Err(CliError::validation(format!("kappa/g must lie in [0, 4), got {bad}")));
    }
    let schemes: &[(Scheme, &str)] = match args.mode {
        ModeArg::Interference => &[(Scheme::Interference, "interference")],
        ModeArg::Standard => &[(Scheme::Standard, "standard")],
        ModeArg::Both => &[(Scheme::Interference, "interference"), (Scheme::Standard, "standard")],
    };
    let transfer = match args.direction {
        TransferArg::Writein => Transfer::WriteIn,
        TransferArg::Readout => Transfer::Readout,
    };
    let g = args.g;
    let tau = args.tau_frac * FRAC_PI_2 / g;
    let points: Vec<(Scheme, &str, f64)> = schemes
        .iter()
        .flat_map(|&(s, name)| ratios.iter().map(move |&k| (s, name, k)))
        .collect();
    let results: Vec<CliResult<Vec<String>>> = pool(args.threads)?.install(|| {
        points
            .par_iter()
            .map(|&(scheme, name, ratio)| {
                let m = metrics(g, ratio * g, tau, scheme, transfer)?;
                Ok(vec![
                    name.to_string(),
                    number(ratio),
                    number(m.n_q),
                    number(m.n_p),
                    number(m.nbar_min),
                    number(m.tau_c),
                    number(m.n_c),
                    number(m.q),
                ])
            })
            .collect()
    });
    let table = results.into_iter().collect::<CliResult<Vec<_>>>()?;
    Ok(csv(&LOSSY_HEADER, &table))
}

pub fn sweep_lossy(args: &SweepLossyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let text = sweep_lossy_csv(args)?;
    emit(&text, args.out.as_deref(), stdout)
}

fn truncation(explicit: Option<usize>) -> CliResult<Option<usize>> {
    if explicit.is_some() {
        return Ok(explicit);
    }
    match std::env::var(NTRUNC_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::validation(format!("{NTRUNC_ENV} must be a positive integer, got {v:?}"))),
        Err(_) => Ok(None),
    }
}

fn column_name(code: CodeArg) -> &'static str {
    match code {
        CodeArg::Cat => "F_cat",
        CodeArg::SqueezedCat => "F_squeezed_cat",
        CodeArg::Qsp => "F_qsp",
    }
}

/// CSV text of Bloch-averaged fidelities, one column per requested code and
/// a final column with the truncation used.
pub fn code_fidelity_csv(args: &CodeFidelityArgs) -> CliResult<String> {
    if args.codes.is_empty() {
        return Err(CliError::validation("no codes requested"));
    }
    for (i, c) in args.codes.iter().enumerate() {
        if args.codes[..i].contains(c) {
            return Err(CliError::validation(format!("code {} requested twice", column_name(*c))));
        }
    }
    let sigmas = grid(args.sigma_start, args.sigma_stop, args.sigma_count, args.scale, "sigma")?;
    if sigmas[0] < 0.0 {
        return Err(CliError::validation("sigma must be non-negative"));
    }
    let settings = CodeSettings {
        n_trunc: truncation(args.n_trunc)?,
        ..CodeSettings::default()
    };
    let cat = CodeEvaluator::new(Code::Cat { alpha: args.alpha }, &settings)?;
    let squeezed = if args.codes.contains(&CodeArg::SqueezedCat) {
        Some(CodeEvaluator::new(
            Code::SqueezedCat {
                alpha: args.alpha,
                squeeze_factor: args.squeeze,
            },
            &settings,
        )?)
    } else {
        None
    };
    if args.codes.contains(&CodeArg::Qsp) {
        cat.qsp_operators();
    }
    let n_trunc = cat.n_trunc().to_string();
    let results: Vec<CliResult<Vec<String>>> = pool(args.threads)?.install(|| {
        sigmas
            .par_iter()
            .map(|&sigma| {
                let mut row = vec![number(sigma)];
                for code in &args.codes {
                    let f = match code {
                        CodeArg::Cat => cat.average_fidelity(sigma)?,
                        CodeArg::SqueezedCat => squeezed.as_ref().expect("built above").average_fidelity(sigma)?,
                        CodeArg::Qsp => cat.qsp_average_fidelity(sigma)?,
                    };
                    row.push(number(f));
                }
                row.push(n_trunc.clone());
                Ok(row)
            })
            .collect()
    });
    let table = results.into_iter().collect::<CliResult<Vec<_>>>()?;
    let mut header = vec!["sigma"];
    header.extend(args.codes.iter().map(|c| column_name(*c)));
    header.push("n_trunc");
    Ok(csv(&header, &table))
}

pub fn code_fidelity(args: &CodeFidelityArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let text = code_fidelity_csv(args)?;
    emit(&text, args.out.as_deref(), stdout)
}

#[derive(Debug, Serialize)]
pub struct SixPassReport {
    pub eta: [f64; 3],
    pub gamma1: f64,
    pub gamma2: f64,
    pub deviation: f64,
    pub composite: [[f64; 4]; 4],
}

pub fn six_pass(args: &SixPassArgs, stdout: &mut dyn Write) -> CliResult<()> {
    let eta = [args.eta[0], args.eta[1], args.eta[2]];
    let s = six_pass_swap(eta)?;
    let report = SixPassReport {
        eta,
        gamma1: s.gamma1,
        gamma2: s.gamma2,
        deviation: s.deviation,
        composite: rows(&s.composite),
    };
    say(
        stdout,
        &format!(
            "gamma1={}, gamma2={}, deviation={}",
            short(s.gamma1),
            short(s.gamma2),
            number(s.deviation)
        ),
    )?;
    let text = to_toml(&report);
    match &args.out {
        Some(path) => write_atomic(path, text.as_bytes())?,
        None => emit(&format!("\n{text}"), None, stdout)?,
    }
    if !(s.deviation < SIX_PASS_TOL) {
        return Err(CliError::domain(format!(
            "composite misses the swap by {}",
            number(s.deviation)
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(grid(0.0, 1.0, 3, Scale::Linear, "x").unwrap(), vec![0.0, 0.5, 1.0]);
        let g = grid(0.01, 1.0, 3, Scale::Log, "x").unwrap();
        assert_eq!(g[0], 0.01);
        assert!((g[1] - 0.1).abs() < 1e-15);
        assert_eq!(g[2], 1.0);
        assert_eq!(grid(1e-3, 1.0, 2, Scale::Log, "x").unwrap().len(), 2);
        assert!(grid(0.0, 1.0, 1, Scale::Linear, "x").is_err());
        assert!(grid(1.0, 1.0, 3, Scale::Linear, "x").is_err());
        assert!(grid(0.0, 1.0, 3, Scale::Log, "x").is_err());
    }

    #[test]
    fn classify_summary_lines() {
        let r = ClassifyReport::new(&Gate::Swap.matrix(), None).unwrap();
        assert_eq!(r.summary, "[[2,0]] SWAP, chi=1");
        let r = ClassifyReport::new(&Gate::BeamSplitter(std::f64::consts::FRAC_PI_4).matrix(), None).unwrap();
        assert_eq!(r.summary, "[[2,2]] BS theta=0.785398163397, chi=0.5");
    }
}
