//! Command-line front end.
//!
//! Exit codes: `0` success (and identities hold), `1` an identity check
//! failed (`check-eom`, `verify-suite`), `2` parse or usage error, `3`
//! domain error (mixed negative powers, unsupported indices, ...).

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::algebra::normal_order;
use crate::calculus::DerivativeKind;
use crate::commutator::{commutator_brute, commutator_series};
use crate::eom::{AppendixReport, EomReport, appendix_demo, check_eom};
use crate::error::{Error, Result};
use crate::format::{self, OutputFormat};
use crate::parse::{parse_classical, parse_operator, parse_rational};
use crate::quantize::{BasisIndex, BuiltinRule, OrderingRule, Orientation, express_in_basis, quantize};
use crate::verify::{VerifyOptions, run_verify};
use serde_json::json;

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum FormatArg {
    Plain,
    Latex,
    Structured,
}

impl From<FormatArg> for OutputFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Plain => OutputFormat::Plain,
            FormatArg::Latex => OutputFormat::Latex,
            FormatArg::Structured => OutputFormat::Structured,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum DefArg {
    First,
    WeylMod,
    SymMod,
    Second,
}

impl From<DefArg> for DerivativeKind {
    fn from(d: DefArg) -> Self {
        match d {
            DefArg::First => DerivativeKind::FirstType,
            DefArg::WeylMod => DerivativeKind::FirstTypeWeylMod,
            DefArg::SymMod => DerivativeKind::FirstTypeSymMod,
            DefArg::Second => DerivativeKind::SecondType,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum LetterArg {
    Q,
    P,
}

impl From<LetterArg> for crate::algebra::Letter {
    fn from(l: LetterArg) -> Self {
        match l {
            LetterArg::Q => crate::algebra::Letter::Q,
            LetterArg::P => crate::algebra::Letter::P,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum BasisArg {
    Weyl,
    Sym,
    Bj,
}

impl From<BasisArg> for BuiltinRule {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Weyl => BuiltinRule::Weyl,
            BasisArg::Sym => BuiltinRule::SimplestSymmetric,
            BasisArg::Bj => BuiltinRule::BornJordan,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, ValueEnum)]
enum MethodArg {
    Brute,
    Series,
}

#[derive(Parser, Debug)]
#[command(
    name = "weylcalc",
    about = "Exact operator calculus for the one-dimensional Weyl algebra",
    disable_help_subcommand = true
)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "plain")]
    format: FormatArg,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct RuleArg {
    /// Ordering rule: weyl | sym | bj | custom:FILE
    #[arg(long)]
    rule: String,
}

impl RuleArg {
    fn resolve(&self) -> Result<OrderingRule> {
        match self.rule.as_str() {
            "weyl" => Ok(OrderingRule::Weyl),
            "sym" => Ok(OrderingRule::SimplestSymmetric),
            "bj" => Ok(OrderingRule::BornJordan),
            other => match other.strip_prefix("custom:") {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
                        offset: 0,
                        message: format!("cannot read rule file `{path}`: {e}"),
                    })?;
                    parse_custom_rule(&text)
                }
                None => Err(Error::Parse {
                    offset: 0,
                    message: format!("unknown rule `{other}` (expected weyl|sym|bj|custom:FILE)"),
                }),
            },
        }
    }
}

/// Custom rule file: first line `orientation q` or `orientation p`, second
/// line whitespace-separated rationals summing to one.
fn parse_custom_rule(text: &str) -> Result<OrderingRule> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().unwrap_or_default().trim().to_string();
    let orientation = match header.as_str() {
        "orientation q" => Orientation::QSide,
        "orientation p" => Orientation::PSide,
        _ => {
            return Err(Error::Parse {
                offset: 0,
                message: "rule file must start with `orientation q` or `orientation p`".into(),
            });
        }
    };
    let weights_line = lines.next().ok_or(Error::Parse {
        offset: 0,
        message: "rule file is missing the weights line".into(),
    })?;
    let weights = weights_line
        .split_whitespace()
        .map(parse_rational)
        .collect::<Result<Vec<_>>>()?;
    OrderingRule::custom(orientation, weights)
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantize a classical polynomial under an ordering rule.
    Quantize {
        #[command(flatten)]
        rule: RuleArg,
        /// Classical polynomial in commuting q and p.
        expr: String,
    },
    /// Rewrite an operator expression into canonical normal order.
    NormalOrder { expr: String },
    /// Differentiate an operator expression.
    Diff {
        /// Derivative definition.
        #[arg(long, value_enum)]
        def: DefArg,
        /// Differentiation variable.
        #[arg(long, value_enum)]
        wrt: LetterArg,
        /// Number of applications.
        #[arg(long, default_value_t = 1)]
        order: u32,
        expr: String,
    },
    /// Commutator of two operators, by brute force or the closed-form series.
    Commutator {
        #[arg(long, value_enum, default_value = "brute")]
        method: MethodArg,
        /// Basis for the series method.
        #[arg(long, value_enum)]
        basis: Option<BasisArg>,
        /// Indices M,N,R,S of the two basis operators (series method).
        #[arg(long)]
        idx: Option<String>,
        /// Left operand (brute method).
        a: Option<String>,
        /// Right operand (brute method).
        b: Option<String>,
    },
    /// Express a normal-ordered operator in a built-in basis.
    Express {
        #[arg(long, value_enum)]
        basis: BasisArg,
        expr: String,
    },
    /// Check the quantum equations of motion for a quantized Hamiltonian.
    CheckEom {
        #[command(flatten)]
        rule: RuleArg,
        #[arg(long, value_enum)]
        def: DefArg,
        /// Classical Hamiltonian in commuting q and p.
        expr: String,
    },
    /// Differentiate `q p^m` and its antinormal rewrite with every rule.
    AppendixDemo {
        #[arg(long)]
        m: i64,
    },
    /// Run the full identity suites.
    VerifySuite {
        #[arg(long)]
        max_index: Option<i64>,
    },
}

/// Captured outcome of one CLI invocation.
#[derive(Clone, Debug)]
pub struct CliOutput {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn usage(message: String) -> CliOutput {
    CliOutput {
        code: 2,
        stdout: String::new(),
        stderr: message,
    }
}

fn error_output(err: Error) -> CliOutput {
    CliOutput {
        code: if err.is_parse() { 2 } else { 3 },
        stdout: String::new(),
        stderr: format!("error: {err}\n"),
    }
}

fn render_eom_report(report: &EomReport, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Structured => {
            let value = json!({
                "type": "eom-report",
                "rule": report.rule,
                "derivative": report.derivative_kind.describe(),
                "hamiltonian": format::expression_value(&report.hamiltonian),
                "residual_q": format::expression_value(&report.residual_q.as_expression()),
                "residual_p": format::expression_value(&report.residual_p.as_expression()),
                "passed": report.passed,
            });
            format!("{value}\n")
        }
        _ => {
            let mut out = String::new();
            if let Some(rule) = &report.rule {
                out.push_str(&format!("rule: {rule}\n"));
            }
            out.push_str(&format!("derivative: {}\n", report.derivative_kind.describe()));
            out.push_str(&format!(
                "hamiltonian: {}\n",
                format::expression(&report.hamiltonian, fmt)
            ));
            out.push_str(&format!(
                "residual_q: {}\n",
                format::normal_form(&report.residual_q, fmt)
            ));
            out.push_str(&format!(
                "residual_p: {}\n",
                format::normal_form(&report.residual_p, fmt)
            ));
            out.push_str(&format!("passed: {}\n", report.passed));
            out
        }
    }
}

fn render_appendix_report(report: &AppendixReport, fmt: OutputFormat) -> String {
    match fmt {
        OutputFormat::Structured => {
            let value = json!({
                "type": "appendix-demo",
                "m": report.m,
                "expected_discrepancy":
                    format::expression_value(&report.expected_discrepancy.as_expression()),
                "variants": report.variants.iter().map(|v| json!({
                    "kind": v.kind.describe(),
                    "derivative_normal": format::expression_value(&v.derivative_normal),
                    "derivative_antinormal": format::expression_value(&v.derivative_antinormal),
                    "discrepancy": format::expression_value(&v.discrepancy.as_expression()),
                })).collect::<Vec<_>>(),
                "second_type_discrepancy":
                    format::expression_value(&report.second_type_discrepancy.as_expression()),
            });
            format!("{value}\n")
        }
        _ => {
            let mut out = String::new();
            out.push_str(&format!("m = {}\n", report.m));
            out.push_str(&format!(
                "expected discrepancy: {}\n",
                format::normal_form(&report.expected_discrepancy, fmt)
            ));
            for v in &report.variants {
                let tag = v.kind.describe();
                out.push_str(&format!(
                    "[{tag}] d(normal form):     {}\n",
                    format::expression(&v.derivative_normal, fmt)
                ));
                out.push_str(&format!(
                    "[{tag}] d(antinormal form): {}\n",
                    format::expression(&v.derivative_antinormal, fmt)
                ));
                out.push_str(&format!(
                    "[{tag}] discrepancy:        {}\n",
                    format::normal_form(&v.discrepancy, fmt)
                ));
            }
            out.push_str(&format!(
                "[second] discrepancy:       {}\n",
                format::normal_form(&report.second_type_discrepancy, fmt)
            ));
            out
        }
    }
}

fn dispatch(cli: Cli) -> std::result::Result<CliOutput, CliOutput> {
    let fmt: OutputFormat = cli.format.into();
    let ok = |stdout: String| {
        Ok(CliOutput {
            code: 0,
            stdout,
            stderr: String::new(),
        })
    };
    match cli.command {
        Command::Quantize { rule, expr } => {
            let rule = rule.resolve().map_err(error_output)?;
            let poly = parse_classical(&expr).map_err(error_output)?;
            let image = quantize(&poly, &rule).map_err(error_output)?;
            ok(format!("{}\n", format::expression(&image, fmt)))
        }
        Command::NormalOrder { expr } => {
            let e = parse_operator(&expr).map_err(error_output)?;
            let nf = normal_order(&e).map_err(error_output)?;
            ok(format!("{}\n", format::normal_form(&nf, fmt)))
        }
        Command::Diff {
            def,
            wrt,
            order,
            expr,
        } => {
            let kind: DerivativeKind = def.into();
            let letter = wrt.into();
            let mut e = parse_operator(&expr).map_err(error_output)?;
            for _ in 0..order {
                e = kind.apply(&e, letter).map_err(error_output)?;
            }
            ok(format!("{}\n", format::expression(&e, fmt)))
        }
        Command::Commutator {
            method,
            basis,
            idx,
            a,
            b,
        } => match method {
            MethodArg::Brute => {
                let (a, b) = match (a, b) {
                    (Some(a), Some(b)) => (a, b),
                    _ => {
                        return Err(usage(
                            "error: the brute method needs two operand expressions\n".into(),
                        ));
                    }
                };
                let ea = parse_operator(&a).map_err(error_output)?;
                let eb = parse_operator(&b).map_err(error_output)?;
                let nf = commutator_brute(&ea, &eb).map_err(error_output)?;
                ok(format!("{}\n", format::normal_form(&nf, fmt)))
            }
            MethodArg::Series => {
                let (basis, idx) = match (basis, idx) {
                    (Some(basis), Some(idx)) => (basis, idx),
                    _ => {
                        return Err(usage(
                            "error: the series method needs --basis and --idx M,N,R,S\n".into(),
                        ));
                    }
                };
                let parts: Vec<i64> = idx
                    .split(',')
                    .map(|p| p.trim().parse::<i64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| usage(format!("error: bad --idx `{idx}`\n")))?;
                if parts.len() != 4 {
                    return Err(usage("error: --idx needs four integers M,N,R,S\n".into()));
                }
                let builtin: BuiltinRule = basis.into();
                let a_idx = BasisIndex::new(parts[0], parts[1]).map_err(error_output)?;
                let b_idx = BasisIndex::new(parts[2], parts[3]).map_err(error_output)?;
                let terms = commutator_series(builtin, a_idx, b_idx).map_err(error_output)?;
                ok(format!(
                    "{}\n",
                    format::series(builtin.basis_symbol(), &terms, fmt)
                ))
            }
        },
        Command::Express { basis, expr } => {
            let builtin: BuiltinRule = basis.into();
            let rule = builtin.rule();
            let e = parse_operator(&expr).map_err(error_output)?;
            let nf = normal_order(&e).map_err(error_output)?;
            let coeffs = express_in_basis(&nf, &rule).map_err(error_output)?;
            ok(format!(
                "{}\n",
                format::basis_map(rule.basis_symbol(), &coeffs, fmt)
            ))
        }
        Command::CheckEom { rule, def, expr } => {
            let rule = rule.resolve().map_err(error_output)?;
            let poly = parse_classical(&expr).map_err(error_output)?;
            let h = quantize(&poly, &rule).map_err(error_output)?;
            let report = check_eom(&h, def.into())
                .map_err(error_output)?
                .with_rule(rule.describe());
            let code = if report.passed { 0 } else { 1 };
            Ok(CliOutput {
                code,
                stdout: render_eom_report(&report, fmt),
                stderr: String::new(),
            })
        }
        Command::AppendixDemo { m } => {
            if m < 2 {
                return Err(usage("error: --m must be at least 2\n".into()));
            }
            let report = appendix_demo(m).map_err(error_output)?;
            ok(render_appendix_report(&report, fmt))
        }
        Command::VerifySuite { max_index } => {
            let mut options = VerifyOptions::default();
            if let Some(k) = max_index {
                options.max_index = k;
            }
            let outcome = run_verify(&options);
            let stdout = match fmt {
                OutputFormat::Structured => {
                    let value = json!({
                        "type": "verify",
                        "checks": outcome.checks.iter().map(|c| json!({
                            "name": c.name,
                            "passed": c.passed,
                            "detail": c.detail,
                        })).collect::<Vec<_>>(),
                        "passed": outcome.passed(),
                    });
                    format!("{value}\n")
                }
                _ => outcome.render_lines(),
            };
            Ok(CliOutput {
                code: if outcome.passed() { 0 } else { 1 },
                stdout,
                stderr: String::new(),
            })
        }
    }
}

/// Runs the command line; never panics on bad input.  The first element of
/// `args` must be the first real argument (the program name is added
/// internally).
pub fn run<I, S>(args: I) -> CliOutput
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    let mut argv: Vec<String> = vec!["weylcalc".into()];
    argv.extend(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            // help and version requests are successful output, not errors
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let rendered = e.render().to_string();
            return if code == 0 {
                CliOutput {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                CliOutput {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(out) | Err(out) => out,
    }
}
