mod output;

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use initial_integrals::dyadic::{set_level_cap, DyadicStep};
use initial_integrals::instances::{cantor_project, indefinite_integral, integrate, pairing, CylinderFunction};
use initial_integrals::measures::{
    density_measure, integrate_measure, psi, shipped_measure_targets, verify_axioms, verify_psi, AxiomReport, Category,
    FunctorTarget, SimpleFn, TargetSpec,
};
use initial_integrals::report::LawOutcome;
use initial_integrals::scalar::{ComplexRational, Exponent, Rational, Scalar};
use initial_integrals::sequences::{seq_universal, FiniteSeq, SeqTarget};
use initial_integrals::suite::verify_all;
use initial_integrals::universal::{
    adamek_chain, apply_universal, compile_theta, verify_morphism, AlgebraTarget, ChainKind, MorphismTable,
};

use output::{float17, to_json};

#[derive(Parser)]
#[command(name = "initial-integrals", version, about = "Exact dyadic integration, universal morphisms and measure-space functors")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    /// Read scalars as complex numbers {"re": .., "im": ..}.
    #[arg(long, global = true)]
    complex: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the unique morphism into an algebra target.
    Compile {
        #[arg(long)]
        target: PathBuf,
        #[arg(long, default_value_t = 8)]
        max_level: u32,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Apply a compiled table to a step function.
    Apply {
        #[arg(long)]
        table: PathBuf,
        #[arg(long)]
        step: PathBuf,
    },
    /// Check a compiled table against the morphism laws.
    Verify {
        #[arg(long)]
        table: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Integral of a step function over [0, 1].
    Integrate { step: PathBuf },
    /// Indefinite integral as node values.
    Indefinite {
        step: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Pairing of f in L^p with g in L^q.
    Pair {
        f: PathBuf,
        g: PathBuf,
        #[arg(long, value_parser = parse_exponent)]
        p: Exponent,
        #[arg(long, value_parser = parse_exponent)]
        q: Exponent,
    },
    /// Project a cylinder function onto its first `bits` coordinates.
    CantorProject {
        function: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        bits: i64,
    },
    /// Apply the universal map into a sequence target.
    SeqApply {
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        seq: PathBuf,
    },
    /// Finite measure spaces.
    #[command(subcommand)]
    Measure(MeasureCommand),
    /// Run every verification suite.
    VerifyAll {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: u32,
        /// Extra algebra targets to gate and verify.
        #[arg(long = "extra-target")]
        extra: Vec<PathBuf>,
        /// Include per-suite wall-clock times (makes the report nondeterministic).
        #[arg(long)]
        timing: bool,
        #[arg(long)]
        json_out: Option<PathBuf>,
        #[arg(long)]
        text_out: Option<PathBuf>,
    },
    /// Build and check the first stages of an initial chain.
    Adamek {
        #[arg(long, value_enum, default_value_t = Functor::Double)]
        functor: Functor,
        #[arg(long, value_parser = parse_exponent, default_value = "2")]
        p: Exponent,
        #[arg(long, default_value_t = 5)]
        stages: u32,
    },
}

#[derive(Subcommand)]
enum MeasureCommand {
    /// Integral of a simple function.
    Integrate { function: PathBuf },
    /// The unique morphism into a target, evaluated on a simple function.
    Psi {
        #[arg(long)]
        target: PathBuf,
        function: PathBuf,
    },
    /// Check target axioms and the properties of psi.
    Verify {
        #[arg(long, value_parser = parse_category, default_value = "B")]
        category: Category,
        #[arg(long, default_value_t = 200)]
        trials: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// A target spec; defaults to the shipped targets of the category.
        #[arg(long)]
        target: Option<PathBuf>,
        /// Also demand equality in the norm axioms.
        #[arg(long)]
        strict: bool,
    },
    /// The density measure of a simple function.
    Density { function: PathBuf },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Functor {
    Double,
    Prepend,
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    s.parse().map_err(|e: initial_integrals::error::Error| e.to_string())
}

fn parse_category(s: &str) -> Result<Category, String> {
    s.parse().map_err(|e: initial_integrals::error::Error| e.to_string())
}

struct Outcome {
    json: Value,
    text: String,
    ok: bool,
}

impl Outcome {
    fn value(json: Value, text: String) -> Self {
        Outcome { json, text, ok: true }
    }
}

fn read_text(path: &Path) -> anyhow::Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        return Ok(s);
    }
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> anyhow::Result<T> {
    let text = read_text(path)?;
    serde_json::from_str(&text).with_context(|| format!("invalid input in {}", path.display()))
}

/// A step as `{"level", "coeffs"}` or a bare coefficient list.
fn read_step<S: Scalar>(path: &Path) -> anyhow::Result<DyadicStep<S>> {
    let value: Value = read_json(path)?;
    let step = if value.is_array() {
        let coeffs: Vec<S> = serde_json::from_value(value)?;
        DyadicStep::from_coeffs(coeffs)?
    } else {
        serde_json::from_value(value)?
    };
    Ok(step)
}

fn read_seq<S: Scalar>(path: &Path) -> anyhow::Result<FiniteSeq<S>> {
    let value: Value = read_json(path)?;
    if value.is_array() {
        Ok(FiniteSeq::new(serde_json::from_value(value)?))
    } else {
        Ok(serde_json::from_value(value).with_context(|| format!("invalid sequence in {}", path.display()))?)
    }
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("cannot write {}", path.display()))
}

fn to_value<T: Serialize>(v: &T) -> anyhow::Result<Value> {
    Ok(serde_json::to_value(v)?)
}

fn join<S: Scalar>(v: &[S]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn laws_text(laws: &[LawOutcome]) -> String {
    let mut out = String::new();
    for l in laws {
        out.push_str(&format!("{} {} ({} cases)", if l.passed { "PASS" } else { "FAIL" }, l.law, l.cases));
        if let Some(n) = &l.note {
            out.push_str(&format!(": {n}"));
        }
        out.push('\n');
        if let Some(c) = &l.counterexample {
            out.push_str(&format!("  counterexample: {c}\n"));
        }
    }
    out
}

fn axiom_reports(category: Category, reports: Vec<AxiomReport>) -> anyhow::Result<Outcome> {
    let ok = reports.iter().all(|r| r.passed);
    let mut text = String::new();
    for r in &reports {
        text.push_str(&format!("{} {} in {}\n", if r.passed { "PASS" } else { "FAIL" }, r.target, r.category));
        text.push_str(&laws_text(&r.laws));
    }
    Ok(Outcome { json: json!({"category": category, "passed": ok, "reports": reports}), text, ok })
}

fn run_scalar<S: Scalar>(command: &Command) -> anyhow::Result<Outcome> {
    match command {
        Command::Compile { target, max_level, output } => {
            let t: AlgebraTarget<S> = read_json(target)?;
            let table = compile_theta(&t, *max_level)?;
            let summary = format!(
                "table for {}: dimension {}, levels 0..={}, {} certificate, operator norm {}\n",
                t.name(),
                t.dim(),
                max_level,
                serde_json::to_value(t.certificate().method)?.as_str().unwrap_or("?"),
                float17(t.certificate().operator_norm)
            );
            match output {
                Some(path) => {
                    write_file(path, &to_json(&table)?)?;
                    Ok(Outcome::value(json!({"written": path, "target": t.name(), "max_level": max_level}), summary))
                }
                None => Ok(Outcome::value(to_value(&table)?, summary)),
            }
        }
        Command::Apply { table, step } => {
            let table: MorphismTable<S> = read_json(table)?;
            table.check_shapes()?;
            let f = read_step::<S>(step)?;
            let v = apply_universal(&table, &f)?;
            Ok(Outcome::value(to_value(&v)?, join(&v) + "\n"))
        }
        Command::Verify { table, samples, seed } => {
            let table: MorphismTable<S> = read_json(table)?;
            let report = verify_morphism(&table, *samples, *seed)?;
            let text = format!("target {}\n{}", report.target, laws_text(&report.laws));
            Ok(Outcome { json: to_value(&report)?, text, ok: report.passed })
        }
        Command::Integrate { step } => {
            let v = integrate(&read_step::<S>(step)?);
            Ok(Outcome::value(to_value(&v)?, format!("{v}\n")))
        }
        Command::Indefinite { step, output } => {
            let f = indefinite_integral(&read_step::<S>(step)?);
            let text = format!("level {}: {}\n", f.level(), join(f.values()));
            match output {
                Some(path) => {
                    write_file(path, &to_json(&f)?)?;
                    Ok(Outcome::value(json!({"written": path}), text))
                }
                None => Ok(Outcome::value(to_value(&f)?, text)),
            }
        }
        Command::Pair { f, g, p, q } => {
            let v = pairing(&read_step::<S>(f)?, &read_step::<S>(g)?, p, q)?;
            Ok(Outcome::value(to_value(&v)?, format!("{v}\n")))
        }
        Command::CantorProject { function, bits } => {
            let f = CylinderFunction::from_step(read_step::<S>(function)?);
            let g = cantor_project(&f, *bits)?;
            Ok(Outcome::value(to_value(&g)?, format!("level {}: {}\n", g.level(), join(g.coeffs()))))
        }
        Command::SeqApply { target, seq } => {
            let t: SeqTarget<S> = read_json(target)?;
            let v = seq_universal(&t, &read_seq::<S>(seq)?);
            Ok(Outcome::value(to_value(&v)?, join(&v) + "\n"))
        }
        Command::Measure(m) => run_measure::<S>(m),
        Command::VerifyAll { .. } | Command::Adamek { .. } => unreachable!("handled before dispatch"),
    }
}

fn run_measure<S: Scalar>(command: &MeasureCommand) -> anyhow::Result<Outcome> {
    match command {
        MeasureCommand::Integrate { function } => {
            let f: SimpleFn<S> = read_json(function)?;
            let v = integrate_measure(&f);
            Ok(Outcome::value(to_value(&v)?, format!("{v}\n")))
        }
        MeasureCommand::Psi { target, function } => {
            let spec: TargetSpec<S> = read_json(target)?;
            let t = spec.build()?;
            let f: SimpleFn<S> = read_json(function)?;
            let v = psi(t.as_ref(), &f)?;
            Ok(Outcome::value(to_value(&v)?, join(&v) + "\n"))
        }
        MeasureCommand::Density { function } => {
            let f: SimpleFn<S> = read_json(function)?;
            let m = density_measure(&f);
            let text = format!("{}\ntotal variation {}\n", join(m.mass()), float17(m.total_variation().to_f64()));
            Ok(Outcome::value(to_value(&m)?, text))
        }
        MeasureCommand::Verify { category, trials, seed, target, strict } => {
            let targets: Vec<Box<dyn FunctorTarget<S>>> = match target {
                Some(path) => vec![read_json::<TargetSpec<S>>(path)?.build()?],
                None => shipped_measure_targets::<S>(*seed)
                    .into_iter()
                    .filter(|t| admits(t.category, *category))
                    .map(|t| t.target)
                    .collect(),
            };
            let mut reports = Vec::new();
            for t in &targets {
                let mut r = verify_axioms(t.as_ref(), *category, *trials, *seed, *strict);
                let psi_laws = verify_psi(t.as_ref(), *category, *trials, *seed);
                r.passed &= psi_laws.passed;
                r.laws.extend(psi_laws.laws);
                reports.push(r);
            }
            axiom_reports(*category, reports)
        }
    }
}

/// Whether a target shipped for `native` can be checked in `requested`.
fn admits(native: Category, requested: Category) -> bool {
    match requested {
        Category::Bemb => true,
        Category::B => native != Category::Bemb,
        Category::H => native == Category::H,
    }
}

fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    match &cli.command {
        Command::VerifyAll { seed, trials, extra, timing, json_out, text_out } => {
            let extra: Vec<Value> = extra.iter().map(|p| read_json(p)).collect::<anyhow::Result<_>>()?;
            let mut report = verify_all(*seed, *trials, &extra, *timing);
            report.command = std::env::args().skip(1).collect();
            let text = report.to_text();
            if let Some(path) = json_out {
                write_file(path, &to_json(&report)?)?;
            }
            if let Some(path) = text_out {
                write_file(path, &text)?;
            }
            Ok(Outcome { json: to_value(&report)?, text, ok: report.passed })
        }
        Command::Adamek { functor, p, stages } => {
            let kind = match functor {
                Functor::Double => ChainKind::DoubleWithPNorm(p.clone()),
                Functor::Prepend => ChainKind::PrependScalar(p.clone()),
            };
            let r = adamek_chain(kind, *stages)?;
            let text = format!(
                "{} dims {:?}\ncoherent {:?}\nisometric {:?}\nlambek {:?}\n",
                if r.passed { "PASS" } else { "FAIL" },
                r.dims,
                r.coherent,
                r.isometric,
                r.lambek_identity
            );
            Ok(Outcome { json: to_value(&r)?, text, ok: r.passed })
        }
        other if cli.complex => run_scalar::<ComplexRational>(other),
        other => run_scalar::<Rational>(other),
    }
}

fn apply_level_cap() -> anyhow::Result<()> {
    if let Ok(raw) = std::env::var("INITIAL_INTEGRALS_MAX_LEVEL") {
        let cap: u32 = raw
            .trim()
            .parse()
            .with_context(|| format!("INITIAL_INTEGRALS_MAX_LEVEL must be a non-negative integer, got {raw:?}"))?;
        if cap > 30 {
            bail!("INITIAL_INTEGRALS_MAX_LEVEL = {cap} exceeds 30");
        }
        set_level_cap(cap);
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = apply_level_cap().and_then(|()| run(&cli));
    match result {
        Ok(out) => {
            let rendered = match cli.format {
                Format::Json => to_json(&out.json).map(|s| s + "\n"),
                Format::Text => Ok(out.text),
            };
            match rendered {
                Ok(s) => print!("{s}"),
                Err(e) => {
                    eprintln!("error: {e:#}");
                    return ExitCode::from(2);
                }
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
