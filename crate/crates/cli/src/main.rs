use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use volterra_core::decomposition::{growth_ratio_max, DecompositionCase};
use volterra_core::exactnum::{fmt_rational, parse_rational};
use volterra_core::piecewise::piece_count;
use volterra_core::report::VerificationReport;
use volterra_core::sequences::{
    convolve_id, kronecker_character, mobius_sieve, numeric_a2, numeric_constants, read_sequence_csv, twist,
    write_sequence_csv, ArithSequence, CharacterSpec,
};
use volterra_core::suites;
use volterra_core::volterra::{grid, resolvent_solution, ResidualChecker, VolterraCase};
use volterra_core::{ConstLinear, Error, GaussianRational, PiecewiseLaurent, SideConvention};

#[derive(Parser)]
#[command(
    name = "volterra-lab",
    version,
    about = "Exact checks of Volterra-type identities for arithmetic error terms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sieve a sequence and write it as `n,value` CSV.
    Sieve(SieveArgs),
    /// Run the identity suites and write a `identity,x,residual,exact_zero` report.
    Verify(Common),
    /// Write `x,E,E_AR,E_AN` on the grid.
    Table(Common),
    /// Apply the resolvent to a piecewise dump and write `x,F,residual`.
    Solve(SolveArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Exact,
    Numeric,
}

#[derive(Args, Clone)]
struct Common {
    /// `mu`, `mu_chi` (with --D), or `file:PATH` holding `n,value[,b]`.
    #[arg(long, default_value = "mu")]
    seq: String,
    /// Fundamental discriminant of the character for `mu_chi`.
    #[arg(long = "D", allow_negative_numbers = true)]
    discriminant: Option<i64>,
    /// Character table CSV (`residue,value`) for `mu_chi` instead of --D.
    #[arg(long)]
    character: Option<PathBuf>,
    /// Domain end.
    #[arg(long = "X", default_value = "100")]
    end: String,
    /// Grid denominator: points k/denom.
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    denom: u64,
    /// Free constants of the solution family; repeatable.
    #[arg(long = "A", allow_negative_numbers = true, default_values_t = vec!["0".to_string()])]
    free_constants: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    /// Absolute error target for numeric constants.
    #[arg(long, default_value_t = 1e-9)]
    precision: f64,
}

#[derive(Args)]
struct SieveArgs {
    #[command(flatten)]
    common: Common,
    /// Also write the `b = Id * a` column.
    #[arg(long)]
    with_b: bool,
    /// Write the error term on [0, X] as a piecewise dump to this path.
    #[arg(long)]
    dump_error_term: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Piecewise dump of the right-hand side E.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    denom: u64,
    #[arg(long = "A", allow_negative_numbers = true, default_value = "0")]
    free_constant: String,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
}

/// Failure classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Identity(String),
    Usage(anyhow::Error),
    Precision(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        match e.downcast_ref::<Error>() {
            Some(Error::PrecisionUnattainable { .. }) => Failure::Precision(e),
            _ => Failure::Usage(e),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        anyhow::Error::from(e).into()
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sieve(args) => cmd_sieve(&args),
        Command::Verify(c) => cmd_verify(&c),
        Command::Table(c) => cmd_table(&c),
        Command::Solve(args) => cmd_solve(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Identity(msg)) => {
            eprintln!("identity failure: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Precision(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

enum Selector {
    Mu,
    MuChi(CharacterSpec),
    File(PathBuf),
}

/// The sequence, its `b`, and the character when `a = μχ`.
struct Source {
    case: VolterraCase,
    selector: Selector,
}

impl Common {
    fn end(&self) -> anyhow::Result<BigRational> {
        let x = parse_rational(&self.end).with_context(|| format!("--X {}", self.end))?;
        if x <= BigRational::zero() {
            anyhow::bail!("--X must be positive, got {}", self.end);
        }
        Ok(x)
    }

    fn constants(&self) -> anyhow::Result<Vec<GaussianRational>> {
        self.free_constants
            .iter()
            .map(|s| s.parse::<GaussianRational>().with_context(|| format!("--A {s}")))
            .collect()
    }

    fn selector(&self) -> anyhow::Result<Selector> {
        match self.seq.as_str() {
            "mu" => Ok(Selector::Mu),
            "mu_chi" => {
                let chi = match (&self.character, self.discriminant) {
                    (Some(path), None) => CharacterSpec::from_csv_path(path)?,
                    (None, Some(d)) => kronecker_character(d)?,
                    _ => anyhow::bail!("mu_chi needs exactly one of --D or --character"),
                };
                Ok(Selector::MuChi(chi))
            }
            s => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(Selector::File(PathBuf::from(path))),
                _ => anyhow::bail!("--seq must be mu, mu_chi or file:PATH, got '{s}'"),
            },
        }
    }

    fn source(&self) -> anyhow::Result<Source> {
        if self.mode == Mode::Numeric && !(self.precision > 0.0) {
            anyhow::bail!("--precision must be positive");
        }
        let end = self.end()?;
        let selector = self.selector()?;
        let case = match &selector {
            Selector::Mu => VolterraCase::new(mobius_sieve(piece_count(&end))?, end, GaussianRational::zero())?,
            Selector::MuChi(chi) => VolterraCase::new(
                twist(&mobius_sieve(piece_count(&end))?, chi),
                end,
                GaussianRational::zero(),
            )?,
            Selector::File(path) => {
                let file = read_sequence_csv(path).with_context(|| format!("reading {}", path.display()))?;
                match file.b {
                    Some(b) => {
                        let b = ArithSequence::from_exact("b", b)?;
                        VolterraCase::with_b(file.a, b, end, GaussianRational::zero())?
                    }
                    None => VolterraCase::new(file.a, end, GaussianRational::zero())?,
                }
            }
        };
        Ok(Source { case, selector })
    }

    fn output(&self) -> anyhow::Result<Box<dyn Write>> {
        open_output(self.out.as_ref())
    }
}

fn open_output(path: Option<&PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

impl Source {
    fn character(&self) -> Option<&CharacterSpec> {
        match &self.selector {
            Selector::MuChi(chi) => Some(chi),
            _ => None,
        }
    }

    fn decomposition(&self) -> anyhow::Result<DecompositionCase> {
        let end = self.case.end.clone();
        Ok(match &self.selector {
            Selector::Mu => DecompositionCase::untwisted(end)?,
            Selector::MuChi(chi) => DecompositionCase::twisted(chi, end)?,
            Selector::File(_) => DecompositionCase::generic_from_case(&self.case)?,
        })
    }
}

fn cmd_sieve(args: &SieveArgs) -> Outcome {
    let src = args.common.source()?;
    let a = &src.case.a;
    let n = piece_count(&src.case.end).saturating_sub(1).clamp(1, a.len());
    let a = ArithSequence::from_exact(a.name(), (1..=n).map(|k| a.value(k)).collect())?;
    let b = args.with_b.then(|| convolve_id(&a));
    let mut out = args.common.output()?;
    write_sequence_csv(&a, b.as_ref(), &mut out)?;
    out.flush().map_err(anyhow::Error::from)?;
    if let Some(path) = &args.dump_error_term {
        let dump = src.case.build_error_term()?.to_dump();
        std::fs::write(path, dump).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn cmd_verify(c: &Common) -> Outcome {
    let src = c.source()?;
    let constants = c.constants()?;
    let case = &src.case;
    let xs = grid(&BigRational::zero(), &case.end, c.denom);

    let mut report = VerificationReport::new();
    report.extend(suites::convolution(case)?);
    report.extend(suites::theorem(case, &constants, &xs)?);
    report.extend(suites::lemma1(case, &xs)?);
    report.extend(suites::jumps(case, 1000)?);
    report.extend(suites::remainder_continuity(case)?);
    report.extend(suites::f1_slope(case)?);
    report.extend(suites::homogeneous(&constants, &xs)?);
    report.extend(suites::resolvent(case, &xs)?);
    report.extend(suites::floor_identity(&case.a, &case.b, &xs)?);
    match &src.selector {
        Selector::Mu => {
            report.extend(suites::mertens(&case.a, &xs)?);
            report.extend(suites::decomposition(&src.decomposition()?, &xs)?);
            report.extend(suites::trivial_relations(&case.end, &xs)?);
        }
        Selector::MuChi(_) => {
            let dc = src.decomposition()?;
            report.extend(suites::decomposition(&dc, &xs)?);
            report.extend(suites::twisted_solution(&dc, &constants, &xs)?);
        }
        Selector::File(_) => {}
    }

    let mut out = c.output()?;
    report.write_csv(&mut out)?;
    out.flush().map_err(anyhow::Error::from)?;

    if c.mode == Mode::Numeric {
        let (a2, a2_bound) = numeric_a2(&case.a, src.character(), c.precision)?;
        let e = src.decomposition()?.e;
        let two = BigRational::from_integer(2.into());
        let sample: Vec<BigRational> = xs.iter().filter(|x| **x >= two).cloned().collect();
        if !sample.is_empty() {
            let (ratio, at) = growth_ratio_max(&e, &sample, a2, Complex64::zero())?;
            eprintln!(
                "max |E(x)|/(x log x) = {ratio} at x = {} (A2 = {} +/- {a2_bound:e})",
                fmt_rational(&at),
                a2.re
            );
            if !ratio.is_finite() {
                return Err(Failure::Identity(format!(
                    "growth ratio is not finite at x = {}",
                    fmt_rational(&at)
                )));
            }
        }
    }

    eprintln!("{} rows, {} failures", report.len(), report.failures());
    match report.first_failure() {
        None => Ok(()),
        Some(row) => Err(Failure::Identity(format!(
            "{} at x = {}: residual {}",
            row.identity,
            fmt_rational(&row.x),
            row.residual
        ))),
    }
}

fn fmt_numeric(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{}{:+}i", z.re, z.im)
    }
}

fn cmd_table(c: &Common) -> Outcome {
    let src = c.source()?;
    let dc = src.decomposition()?;
    let xs = grid(&BigRational::zero(), &dc.end, c.denom);
    let mut out = c.output()?;
    let io = |e: io::Error| Failure::Usage(e.into());

    let numeric = match c.mode {
        Mode::Exact => None,
        Mode::Numeric => {
            let (a2, a1, a2_bound, a1_bound) = if dc.e_an.is_some() {
                let k = numeric_constants(&dc.a, src.character(), c.precision)?;
                (k.a2, k.a1, k.a2_bound, k.a1_bound)
            } else {
                let (a2, bound) = numeric_a2(&dc.a, src.character(), c.precision)?;
                (a2, Complex64::zero(), bound, 0.0)
            };
            writeln!(out, "# A2 = {} +/- {a2_bound:e}", fmt_numeric(a2)).map_err(io)?;
            if dc.e_an.is_some() {
                writeln!(out, "# A1 = {} +/- {a1_bound:e}", fmt_numeric(a1)).map_err(io)?;
            }
            Some((a2, a1))
        }
    };
    let show = |v: &ConstLinear| match numeric {
        Some((a2, a1)) => fmt_numeric(v.numeric(a2, a1)),
        None => v.to_string(),
    };

    writeln!(out, "x,E,E_AR,E_AN").map_err(io)?;
    for x in &xs {
        let parts = dc.parts(x)?;
        let x_text = match numeric {
            Some(_) => format!("{}", x.to_f64().unwrap_or(f64::NAN)),
            None => fmt_rational(x),
        };
        let an = parts.e_an.as_ref().map(show).unwrap_or_default();
        writeln!(out, "{x_text},{},{},{an}", show(&parts.e), show(&parts.e_ar)).map_err(io)?;
    }
    out.flush().map_err(io)?;
    Ok(())
}

fn cmd_solve(args: &SolveArgs) -> Outcome {
    let text = std::fs::read_to_string(&args.input).with_context(|| format!("reading {}", args.input.display()))?;
    let e = PiecewiseLaurent::from_dump(&text).with_context(|| format!("parsing {}", args.input.display()))?;
    let a: GaussianRational = args
        .free_constant
        .parse()
        .with_context(|| format!("--A {}", args.free_constant))?;
    let f = resolvent_solution(&e, &a)?;
    let checker = ResidualChecker::new(f.clone(), e.clone())?;
    let xs = grid(&BigRational::zero(), e.end(), args.denom);

    let numeric = if args.mode == Mode::Numeric {
        if !f.pieces().iter().all(|p| p.terms().all(|(_, c)| c.is_constant())) {
            return Err(Failure::Usage(anyhow::anyhow!(
                "numeric mode needs E free of A2 and A1; use --mode exact"
            )));
        }
        true
    } else {
        false
    };

    let mut out = open_output(args.out.as_ref())?;
    let io = |e: io::Error| Failure::Usage(e.into());
    writeln!(out, "x,F,residual").map_err(io)?;
    let mut first_bad = None;
    for x in &xs {
        let fx = f.eval_at(x, SideConvention::Point)?;
        let r = checker.at(x, SideConvention::Point)?;
        if !r.is_zero() && first_bad.is_none() {
            first_bad = Some(x.clone());
        }
        if numeric {
            let z = Complex64::zero();
            writeln!(
                out,
                "{},{},{}",
                x.to_f64().unwrap_or(f64::NAN),
                fmt_numeric(fx.numeric(z, z)),
                fmt_numeric(r.numeric(z, z))
            )
            .map_err(io)?;
        } else {
            writeln!(out, "{},{fx},{r}", fmt_rational(x)).map_err(io)?;
        }
    }
    out.flush().map_err(io)?;
    match first_bad {
        None => Ok(()),
        Some(x) => Err(Failure::Identity(format!(
            "residual is nonzero at x = {}",
            fmt_rational(&x)
        ))),
    }
}
