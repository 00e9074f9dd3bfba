//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, ValueEnum};
use num_complex::Complex64;

use crate::channels::{self, ChannelSpec};
use crate::error::{Error, Result};
use crate::gates::{compose, GateOp};
use crate::protocol::Protocol;
use crate::qstate::NORM_TOL;
use crate::report::Report;
use crate::unitaries::{self, netlist};

/// Inputs whose squared norm is off by at most this much are renormalized
/// with a warning; larger deviations are rejected.
pub const RENORMALIZE_TOL: f64 = 1e-6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ProtocolArg {
    One,
    Two,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::One => Protocol::One,
            ProtocolArg::Two => Protocol::Two,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Exact,
    Sample,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputArg {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CircuitArg {
    U1,
    U2,
    Channel1,
    Channel2,
}

/// Simulate probabilistic controlled teleportation of one or two qubits.
#[derive(Debug, Parser)]
#[command(name = "pctele", version)]
pub struct Args {
    /// Which protocol to run
    #[arg(long, value_enum, required_unless_present = "dump_circuit")]
    pub protocol: Option<ProtocolArg>,

    /// Input amplitudes, comma separated; entries like `0.6`, `0.8i`, `0.3-0.4i`
    #[arg(
        long,
        allow_hyphen_values = true,
        required_unless_present = "dump_circuit"
    )]
    pub alpha: Option<String>,

    /// Channel coefficients, comma separated reals (2 for protocol one, 4 for two)
    #[arg(long, allow_hyphen_values = true)]
    pub beta: String,

    /// Enumerate every branch exactly or draw Monte-Carlo trials
    #[arg(long, value_enum, default_value = "exact")]
    pub mode: ModeArg,

    /// Number of Monte-Carlo trials in sample mode
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,

    /// Base seed; trial t draws from stream t of this seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Report format on stdout
    #[arg(long, value_enum, default_value = "text")]
    pub output: OutputArg,

    /// Print a gate netlist instead of running a protocol
    #[arg(long, value_enum)]
    pub dump_circuit: Option<CircuitArg>,
}

/// Parses `re`, `imi`, `re+imi` or `re-imi` (also `i`, `-i`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::InvalidInput(format!("cannot parse {text:?} as a complex number"));
    let num = |s: &str| -> Result<f64> {
        let v: f64 = match s {
            "" | "+" => 1.0,
            "-" => -1.0,
            _ => s.parse().map_err(|_| bad())?,
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(bad())
        }
    };
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(bad)?,
            0.0,
        ));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().map_err(|_| bad())?;
            if !re.is_finite() {
                return Err(bad());
            }
            Ok(Complex64::new(re, num(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, num(body)?)),
    }
}

pub fn parse_list<T>(text: &str, item: impl Fn(&str) -> Result<T>) -> Result<Vec<T>> {
    text.split(',').map(|s| item(s.trim())).collect()
}

fn parse_real(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::InvalidInput(format!("cannot parse {s:?} as a real number")))
}

/// Rescales `v` to unit norm when the squared norm is within
/// [`RENORMALIZE_TOL`] of 1, returning whether it changed.
fn renormalize<T>(
    name: &str,
    v: &mut [T],
    norm_sqr: impl Fn(&T) -> f64,
    scale: impl Fn(&mut T, f64),
) -> Result<bool> {
    let n: f64 = v.iter().map(norm_sqr).sum();
    let dev = (n - 1.0).abs();
    if dev <= NORM_TOL {
        return Ok(false);
    }
    if dev > RENORMALIZE_TOL {
        return Err(Error::InvalidInput(format!(
            "{name} must be normalized (sum of squared magnitudes is {n})"
        )));
    }
    let k = 1.0 / n.sqrt();
    v.iter_mut().for_each(|x| scale(x, k));
    Ok(true)
}

fn parse_beta(text: &str, expected: Option<usize>, err: &mut dyn Write) -> Result<ChannelSpec> {
    let mut beta = parse_list(text, parse_real)?;
    if let Some(n) = expected {
        if beta.len() != n {
            return Err(Error::InvalidChannel(format!(
                "expected {n} beta values, got {}",
                beta.len()
            )));
        }
    }
    if renormalize("beta", &mut beta, |b| b * b, |b, k| *b *= k)? {
        let _ = writeln!(err, "warning: beta renormalized to unit norm");
    }
    ChannelSpec::new(&beta)
}

fn parse_alpha(text: &str, expected: usize, err: &mut dyn Write) -> Result<Vec<Complex64>> {
    let mut alpha = parse_list(text, parse_complex)?;
    if alpha.len() != expected {
        return Err(Error::InvalidInput(format!(
            "expected {expected} alpha values, got {}",
            alpha.len()
        )));
    }
    if renormalize("alpha", &mut alpha, |a| a.norm_sqr(), |a, k| *a *= k)? {
        let _ = writeln!(err, "warning: alpha renormalized to unit norm");
    }
    Ok(alpha)
}

/// Netlist for `circuit` with a trailing `# max_deviation` line measuring
/// the composed circuit against its target (matrix or prepared state).
pub fn dump_circuit(circuit: CircuitArg, spec: &ChannelSpec) -> Result<String> {
    let (ops, deviation): (Vec<GateOp>, f64) = match circuit {
        CircuitArg::U1 => {
            let ops = unitaries::u1_circuit(spec)?;
            let dev =
                compose(&ops, &unitaries::U1_LABELS)?.max_abs_diff(&unitaries::u1_matrix(spec)?)?;
            (ops, dev)
        }
        CircuitArg::U2 => {
            let ops = unitaries::u2_circuit(spec)?;
            let dev =
                compose(&ops, &unitaries::U2_LABELS)?.max_abs_diff(&unitaries::u2_matrix(spec)?)?;
            (ops, dev)
        }
        CircuitArg::Channel1 => {
            let ops = channels::channel_one_circuit(spec)?;
            let got = channels::prepare(&ops, &channels::CHANNEL_ONE_LABELS)?;
            (
                ops,
                state_deviation(got.amplitudes(), channels::channel_one(spec)?.amplitudes()),
            )
        }
        CircuitArg::Channel2 => {
            let ops = channels::channel_two_circuit(spec)?;
            let got = channels::prepare(&ops, &channels::CHANNEL_TWO_LABELS)?;
            (
                ops,
                state_deviation(got.amplitudes(), channels::channel_two(spec)?.amplitudes()),
            )
        }
    };
    let mut text = netlist(&ops);
    text.push_str(&format!("# max_deviation {deviation:e}\n"));
    Ok(text)
}

fn state_deviation(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

fn expected_betas(circuit: CircuitArg) -> usize {
    match circuit {
        CircuitArg::U1 | CircuitArg::Channel1 => 2,
        CircuitArg::U2 | CircuitArg::Channel2 => 4,
    }
}

fn execute(args: &Args, err: &mut dyn Write) -> Result<String> {
    if let Some(circuit) = args.dump_circuit {
        let spec = parse_beta(&args.beta, Some(expected_betas(circuit)), err)?;
        return dump_circuit(circuit, &spec);
    }
    let protocol: Protocol = args.protocol.expect("required by the parser").into();
    let spec = parse_beta(&args.beta, Some(protocol.beta_len()), err)?;
    let alpha = parse_alpha(
        args.alpha.as_deref().expect("required by the parser"),
        protocol.alpha_len(),
        err,
    )?;
    let report = match args.mode {
        ModeArg::Exact => Report::exact(protocol, &alpha, &spec)?,
        ModeArg::Sample => Report::sample(protocol, &alpha, &spec, args.trials, args.seed)?,
    };
    match args.output {
        OutputArg::Json => Ok(report.to_json()),
        OutputArg::Csv => report.to_csv(),
        OutputArg::Text => Ok(report.to_text()),
    }
}

fn is_validation(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidInput(_)
            | Error::InvalidChannel(_)
            | Error::NotNormalized(_)
            | Error::CodeOutOfRange { .. }
    )
}

/// Runs the command line `args` (including the program name). Reports go to
/// `out`, diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(&args, err) {
        Ok(text) => match out.write_all(text.as_bytes()) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_RUNTIME
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if is_validation(&e) {
                EXIT_USAGE
            } else {
                EXIT_RUNTIME
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["pctele"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn complex_parsing() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("0.6i").unwrap(), c(0.0, 0.6));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("i").unwrap(), c(0.0, 1.0));
        assert_eq!(parse_complex("0.3-0.4i").unwrap(), c(0.3, -0.4));
        assert_eq!(parse_complex("-0.3+0.4i").unwrap(), c(-0.3, 0.4));
        assert_eq!(parse_complex("1e-3+2e-3i").unwrap(), c(1e-3, 2e-3));
        assert_eq!(parse_complex("2E+1-i").unwrap(), c(20.0, -1.0));
        assert_eq!(parse_complex(" 0.5 + 0.5i ").unwrap(), c(0.5, 0.5));
        for bad in ["", "x", "1+", "0.3+0.4j", "nan", "inf", "1++2i"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn exact_protocol_one() {
        let (code, out, _) = run_str(&[
            "--protocol",
            "one",
            "--beta",
            "0.6,0.8",
            "--alpha",
            "1,0",
            "--mode",
            "exact",
            "--output",
            "json",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["success_probability_analytic"], 0.72);
        assert_eq!(v["success_probability_exact"], 0.72);
    }

    #[test]
    fn exact_protocol_two_degenerate() {
        let (code, out, _) = run_str(&[
            "--protocol",
            "two",
            "--beta",
            "0.5,0.5,0.5,0.5",
            "--alpha",
            "1,0,0,0",
            "--output",
            "json",
        ]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["success_probability_analytic"], 1.0);
        assert_eq!(v["success_probability_exact"], 1.0);
    }

    #[test]
    fn beta_order_violation() {
        let (code, out, err) =
            run_str(&["--protocol", "one", "--beta", "0.8,0.6", "--alpha", "1,0"]);
        assert_eq!(code, 2);
        assert!(out.is_empty());
        assert!(err.contains("beta[0] must not exceed beta[1]"), "{err}");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(
            run_str(&["--protocol", "three", "--beta", "0.6,0.8", "--alpha", "1,0"]).0,
            2
        );
        assert_eq!(run_str(&["--beta", "0.6,0.8", "--alpha", "1,0"]).0, 2);
        assert_eq!(run_str(&["--protocol", "one", "--alpha", "1,0"]).0, 2);
        assert_eq!(run_str(&["--dump-circuit", "u3", "--beta", "0.6,0.8"]).0, 2);
        assert_eq!(
            run_str(&["--protocol", "one", "--beta", "0.6,0.8", "--alpha", "1,0,0"]).0,
            2
        );
        assert_eq!(
            run_str(&[
                "--protocol",
                "one",
                "--beta",
                "0.6,0.8",
                "--alpha",
                "1,0",
                "--trials",
                "x"
            ])
            .0,
            2
        );
        assert_eq!(
            run_str(&[
                "--protocol",
                "one",
                "--beta",
                "0.6,0.8",
                "--alpha",
                "1,0",
                "--mode",
                "sample",
                "--trials",
                "0"
            ])
            .0,
            2
        );
        assert_eq!(
            run_str(&[
                "--protocol",
                "two",
                "--beta",
                "0.6,0.8",
                "--alpha",
                "1,0,0,0"
            ])
            .0,
            2
        );
        let (code, out, _) = run_str(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("--dump-circuit"));
    }

    #[test]
    fn alpha_normalization_policy() {
        let (code, _, err) = run_str(&[
            "--protocol",
            "one",
            "--beta",
            "0.6,0.8",
            "--alpha",
            "0.6,0.8000001i",
        ]);
        assert_eq!(code, 0);
        assert!(err.contains("warning: alpha renormalized"));
        let (code, _, err) = run_str(&[
            "--protocol",
            "one",
            "--beta",
            "0.6,0.8",
            "--alpha",
            "0.6,0.81",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("alpha must be normalized"), "{err}");
        let (code, _, err) = run_str(&[
            "--protocol",
            "one",
            "--beta",
            "0.6,0.8",
            "--alpha",
            "0.6,0.8i",
        ]);
        assert_eq!(code, 0);
        assert!(err.is_empty());
    }

    #[test]
    fn negative_values_accepted() {
        let (code, _, err) = run_str(&[
            "--protocol",
            "one",
            "--beta",
            "-0.6,0.8",
            "--alpha",
            "-0.6,-0.8i",
        ]);
        assert_eq!(code, 0, "{err}");
    }

    #[test]
    fn dump_u1() {
        let (code, out, _) = run_str(&["--dump-circuit", "u1", "--beta", "0.6,0.8"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 7);
        assert_eq!(
            lines
                .iter()
                .filter(|l| l.starts_with("GATE CNOT 3 5"))
                .count(),
            2
        );
        assert_eq!(
            lines
                .iter()
                .filter(|l| l.starts_with("GATE CNOT 5 3"))
                .count(),
            2
        );
        assert_eq!(lines.iter().filter(|l| l.starts_with("GATE RY")).count(), 2);
        let dev: f64 = lines[6]
            .strip_prefix("# max_deviation ")
            .unwrap()
            .parse()
            .unwrap();
        assert!(dev <= 1e-12);
    }

    #[test]
    fn dump_u2_equal_betas() {
        let (code, out, _) = run_str(&["--dump-circuit", "u2", "--beta", "0.5,0.5,0.5,0.5"]);
        assert_eq!(code, 0);
        for l in out.lines().filter(|l| l.starts_with("GATE RY")) {
            let angle: f64 = l.rsplit(' ').next().unwrap().parse().unwrap();
            assert_eq!(angle, 0.0);
        }
    }

    #[test]
    fn dump_channels() {
        let (code, out, _) = run_str(&["--dump-circuit", "channel1", "--beta", "0.6,0.8"]);
        assert_eq!(code, 0);
        let gates: Vec<&str> = out.lines().filter(|l| l.starts_with("GATE")).collect();
        assert_eq!(gates.len(), 3);
        assert!(gates[0].starts_with("GATE R 2"));
        let (code, out, _) = run_str(&[
            "--dump-circuit",
            "channel2",
            "--beta",
            "0.3,0.4,0.5,0.7071067811865476",
        ]);
        assert_eq!(code, 0, "{out}");
        assert!(out.lines().last().unwrap().starts_with("# max_deviation"));
        assert_eq!(
            run_str(&["--dump-circuit", "channel2", "--beta", "0.6,0.8"]).0,
            2
        );
    }

    #[test]
    fn identical_flags_identical_output() {
        let args = [
            "--protocol",
            "two",
            "--beta",
            "0.3,0.4,0.5,0.7071067811865476",
            "--alpha",
            "0.5,0.5i,-0.5,0.5",
            "--mode",
            "sample",
            "--trials",
            "2000",
            "--seed",
            "9",
            "--output",
            "json",
        ];
        let a = run_str(&args);
        let b = run_str(&args);
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1);
    }

    #[test]
    fn csv_and_text_outputs() {
        let (code, out, _) = run_str(&[
            "--protocol",
            "one",
            "--beta",
            "0.6,0.8",
            "--alpha",
            "1,0",
            "--output",
            "csv",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 17);
        let (code, out, _) = run_str(&["--protocol", "one", "--beta", "0.6,0.8", "--alpha", "1,0"]);
        assert_eq!(code, 0);
        assert!(out.contains("success probability (analytic): 0.72"));
        assert!(out.contains("success probability (exact): 0.72"));
    }
}
