//! `cmdecomp`: class groups, generalized composition, transcendental lattices and
//! decompositions of singular abelian surfaces from the command line.
//!
//! Exit status is 0 on success, 1 when a mathematical precondition fails (or a verification
//! finds a mismatch) and 2 on usage errors.

mod commands;
mod config;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;

use cmdecomp::Form;

#[derive(Parser, Debug)]
#[command(name = "cmdecomp", version, about = "Decompositions of singular abelian surfaces into CM elliptic curves")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Properly reduce a positive definite form.
    #[command(allow_negative_numbers = true)]
    Reduce {
        #[arg(long, value_parser = parse_form)]
        form: FormArg,
    },
    /// List the reduced forms and the structure of C(D).
    #[command(allow_negative_numbers = true)]
    Classgroup {
        #[arg(long)]
        disc: BigInt,
    },
    /// h(D) by enumeration, or h(f^2 d_K) by the class number formula.
    #[command(allow_negative_numbers = true)]
    Classnumber {
        #[arg(long, conflicts_with_all = ["dk", "f"], required_unless_present = "dk")]
        disc: Option<BigInt>,
        #[arg(long, requires = "f")]
        dk: Option<BigInt>,
        #[arg(long, requires = "dk")]
        f: Option<BigInt>,
    },
    /// Dirichlet composition of two forms of the same discriminant.
    #[command(allow_negative_numbers = true)]
    Compose {
        #[arg(long, value_parser = parse_form)]
        form1: FormArg,
        #[arg(long, value_parser = parse_form)]
        form2: FormArg,
    },
    /// Generalized composition of classes with possibly different conductors.
    #[command(allow_negative_numbers = true)]
    Gcompose {
        #[arg(long, value_parser = parse_form)]
        form1: FormArg,
        #[arg(long, value_parser = parse_form)]
        form2: FormArg,
    },
    /// Lift a class of C(D0) to C(D) along the projection.
    #[command(allow_negative_numbers = true)]
    Lift {
        #[arg(long, value_parser = parse_form)]
        form: FormArg,
        #[arg(long)]
        disc: BigInt,
    },
    /// Stabilizer of C(D0) in C(D), or the intersection of two stabilizers.
    #[command(allow_negative_numbers = true)]
    Stab {
        #[arg(long)]
        disc: BigInt,
        #[arg(long)]
        sub: BigInt,
        #[arg(long)]
        sub2: Option<BigInt>,
    },
    /// Transcendental lattice of E_{s tau(Q1)} x E_{t tau(Q2)}, or of the surface attached to a form.
    #[command(allow_negative_numbers = true)]
    Tlattice {
        #[arg(long, value_parser = parse_form, conflicts_with_all = ["form1", "form2"], required_unless_present_all = ["form1", "form2"])]
        surface: Option<FormArg>,
        #[arg(long, value_parser = parse_form, requires = "form2")]
        form1: Option<FormArg>,
        #[arg(long, default_value = "1")]
        scale1: BigInt,
        #[arg(long, value_parser = parse_form, requires = "form1")]
        form2: Option<FormArg>,
        #[arg(long, default_value = "1")]
        scale2: BigInt,
    },
    /// Decompositions of the surface with transcendental form n * Q0.
    #[command(allow_negative_numbers = true)]
    Decompose {
        #[arg(long)]
        n: BigInt,
        #[arg(long, value_parser = parse_form)]
        form: FormArg,
        #[arg(long, value_enum, default_value_t = Method::Brute)]
        method: Method,
        /// List every pair in text output.
        #[arg(long)]
        pairs: bool,
    },
    /// Compare brute-force counts with the counting formulas over a grid.
    #[command(allow_negative_numbers = true)]
    VerifyMa {
        /// Fundamental discriminants; repeat the flag for several fields.
        #[arg(long)]
        dk: Vec<BigInt>,
        #[arg(long)]
        f0_max: Option<u64>,
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long, value_enum)]
        method: Option<Method>,
        /// Sweep configuration file (TOML); flags given on the command line take precedence.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Write the table here instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Check the class-number sum identity for (d_K, f0, n).
    #[command(allow_negative_numbers = true)]
    VerifySum {
        #[arg(long)]
        dk: BigInt,
        #[arg(long)]
        f0: BigInt,
        #[arg(long)]
        n: BigInt,
    },
    /// Elliptic K3 models attached to each unordered decomposition.
    #[command(allow_negative_numbers = true)]
    ShiodaInose {
        #[arg(long)]
        n: BigInt,
        #[arg(long, value_parser = parse_form)]
        form: FormArg,
        #[arg(long, default_value_t = cmdecomp_moduli::DEFAULT_PRECISION)]
        precision: usize,
        /// Significant digits in the printed values.
        #[arg(long, default_value_t = 30)]
        digits: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Brute,
    Action,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// A comma-separated triple `a,b,c`; positive definiteness is checked when the command runs.
#[derive(Clone, Debug)]
struct FormArg([BigInt; 3]);

impl FormArg {
    fn form(self) -> Result<Form, Failure> {
        let [a, b, c] = self.0;
        Ok(Form::new(a, b, c)?)
    }
}

fn parse_form(s: &str) -> Result<FormArg, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected a,b,c but got {s:?}"));
    }
    let v: Vec<BigInt> = parts.iter().map(|p| p.parse().map_err(|_| format!("{p:?} is not an integer"))).collect::<Result<_, _>>()?;
    Ok(FormArg(v.try_into().expect("three parts")))
}

/// Failure categories, mapped onto the exit status.
#[derive(Debug)]
pub enum Failure {
    /// A mathematical precondition failed or a verification found a mismatch.
    Math(String),
    Usage(String),
}

impl From<cmdecomp::Error> for Failure {
    fn from(e: cmdecomp::Error) -> Self {
        Failure::Math(e.to_string())
    }
}

impl From<cmdecomp_moduli::Error> for Failure {
    fn from(e: cmdecomp_moduli::Error) -> Self {
        Failure::Math(e.to_string())
    }
}

/// What a command produced: text and JSON renderings, plus whether a check failed.
pub struct Output {
    pub text: String,
    pub json: serde_json::Value,
    pub failed: bool,
}

fn run(cli: Cli) -> Result<Output, Failure> {
    use Command::*;
    let json = cli.json;
    match cli.command {
        Reduce { form } => commands::reduce(&form.form()?),
        Classgroup { disc } => commands::classgroup(&disc),
        Classnumber { disc, dk, f } => commands::classnumber(disc, dk, f),
        Compose { form1, form2 } => commands::compose(&form1.form()?, &form2.form()?),
        Gcompose { form1, form2 } => commands::gcompose(&form1.form()?, &form2.form()?),
        Lift { form, disc } => commands::lift(&form.form()?, &disc),
        Stab { disc, sub, sub2 } => commands::stab(&disc, &sub, sub2.as_ref()),
        Tlattice { surface, form1, scale1, form2, scale2 } => match (surface, form1, form2) {
            (Some(q), _, _) => commands::tlattice_surface(&q.form()?),
            (None, Some(q1), Some(q2)) => commands::tlattice_pair(&q1.form()?, &scale1, &q2.form()?, &scale2),
            _ => Err(Failure::Usage("give --surface or both --form1 and --form2".into())),
        },
        Decompose { n, form, method, pairs } => commands::decompose(&n, &form.form()?, method, pairs),
        VerifyMa { dk, f0_max, n_max, method, config, output, format } => {
            let cfg = config::SweepConfig::resolve(config.as_deref(), dk, f0_max, n_max, method, output, format)?;
            commands::verify_ma(&cfg, json)
        }
        VerifySum { dk, f0, n } => commands::verify_sum(&dk, &f0, &n),
        ShiodaInose { n, form, precision, digits } => commands::shioda_inose(&n, &form.form()?, precision, digits),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json = cli.json;
    match run(cli) {
        Ok(out) => {
            // A closed pipe downstream is not an error worth reporting.
            let mut stdout = std::io::stdout().lock();
            let _ = if json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&out.json).expect("JSON values serialize"))
            } else {
                write!(stdout, "{}", out.text)
            };
            if out.failed {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(Failure::Math(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
    }
}
