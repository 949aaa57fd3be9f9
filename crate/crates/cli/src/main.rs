use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use cubalg_core::poly::PolyDoc;
use cubalg_core::snap::{format_float, format_number};
use cubalg_core::{
    aliasing_nf, bm_ortho, cubature_degree, cubature_value, exact_expectation, fraction_weights, gauss_rule,
    s_orthogonality, weighing_polynomial, weights, Design, Fraction, HermiteExpansion, OrderKind, RecurrenceSystem,
    TermOrder, Tolerance,
};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] cubalg_core::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_numeric() => 3,
            _ => 2,
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "cubalg", version, about = "Cubature formulae from vanishing ideals in orthogonal bases")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Term order: lex, deglex or degrevlex.
    #[arg(long, global = true, default_value = "deglex")]
    order: String,

    /// Absolute residual threshold.
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol_abs: Option<f64>,

    /// Residual threshold relative to the candidate column norm.
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol_rel: Option<f64>,

    /// Fallback tolerances as `abs` or `abs,rel`.
    #[arg(long, global = true, env = "CUBALG_TOL", hide_env_values = true)]
    tol: Option<String>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Gaussian rule of a built-in system.
    Rule { system: String, n: usize },
    /// Reduced Gröbner basis of the design's vanishing ideal.
    Gbasis { design: PathBuf },
    /// Cubature weights of the design.
    Weights { design: PathBuf },
    /// Cubature value and exact expectation of a polynomial.
    Expect { design: PathBuf, poly: PathBuf },
    /// Exact expectation of a polynomial.
    Exact { poly: PathBuf },
    /// Degree of exactness of the design's cubature formula.
    Degree { design: PathBuf },
    /// Weighing polynomial of the Hermite rule on `n` nodes.
    Weighing { n: usize },
    /// Normal form of `H_{n+k}` on the zeros of `H_n`.
    Alias { n: usize, k: usize },
    /// Weights of a subset of the zeros of `π_n`.
    Fraction {
        parent_n: usize,
        subset: PathBuf,
        /// System used when the subset file names none.
        #[arg(long, default_value = "hermite")]
        system: String,
    },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum SubsetDoc {
    Bare(Vec<f64>),
    Named { system: Option<String>, points: Vec<f64> },
}

fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn read_design(path: &Path) -> CliResult<Design> {
    Ok(Design::from_json(&read(path)?)?)
}

impl Cli {
    fn order(&self, dim: usize) -> CliResult<TermOrder> {
        let kind: OrderKind = self.order.parse()?;
        Ok(TermOrder::new(kind, dim))
    }

    /// Flags win over `CUBALG_TOL`, which wins over the defaults.
    fn tolerance(&self) -> CliResult<Tolerance> {
        let mut tol = Tolerance::default();
        if let Some(raw) = &self.tol {
            let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
            let parse = |s: &str| s.parse::<f64>().map_err(|_| CliError::Input(format!("bad tolerance `{raw}`")));
            match parts.as_slice() {
                [abs] => tol.abs = parse(abs)?,
                [abs, rel] => {
                    tol.abs = parse(abs)?;
                    tol.rel = parse(rel)?;
                }
                _ => return Err(CliError::Input(format!("bad tolerance `{raw}`"))),
            }
        }
        tol.abs = self.tol_abs.unwrap_or(tol.abs);
        tol.rel = self.tol_rel.unwrap_or(tol.rel);
        if !(tol.abs > 0.0 && tol.rel > 0.0 && tol.abs.is_finite() && tol.rel.is_finite()) {
            return Err(CliError::Input("tolerances must be positive and finite".into()));
        }
        Ok(tol)
    }
}

fn list(xs: &[f64]) -> String {
    let items: Vec<String> = xs.iter().map(|&x| format_float(x)).collect();
    format!("[{}]", items.join(", "))
}

fn expansion_json(e: &HermiteExpansion) -> Value {
    let terms: Vec<Value> =
        e.terms().iter().rev().map(|(j, c)| json!({ "index": j, "coeff": c.to_string() })).collect();
    json!(terms)
}

fn run(cli: &Cli) -> CliResult<String> {
    let text = cli.format == Format::Text;
    let out = match &cli.command {
        Command::Rule { system, n } => {
            let sys = RecurrenceSystem::by_name(system)?;
            let rule = gauss_rule(&sys, *n)?;
            if text {
                format!("nodes = {}\nweights = {}\ndegree = {}", list(&rule.nodes), list(&rule.weights), rule.degree)
            } else {
                json!({ "system": sys.name(), "nodes": rule.nodes, "weights": rule.weights, "degree": rule.degree })
                    .to_string()
            }
        }
        Command::Gbasis { design } => {
            let design = read_design(design)?;
            let basis = bm_ortho(&design, &cli.order(design.dim())?, cli.tolerance()?)?;
            for w in &basis.warnings {
                eprintln!("warning: {w}");
            }
            if text {
                let mut lines: Vec<String> =
                    basis.polys().iter().enumerate().map(|(i, g)| format!("g{} = {}", i + 1, g.render(&basis.order))).collect();
                let l: Vec<String> = basis.standard.exps().iter().map(|e| e.to_string()).collect();
                lines.push(format!("L = {{{}}}", l.join(", ")));
                lines.join("\n")
            } else {
                serde_json::to_string_pretty(&basis.to_json_value()).expect("json value prints")
            }
        }
        Command::Weights { design } => {
            let design = read_design(design)?;
            let w = weights(&design, &cli.order(design.dim())?)?;
            if text {
                let lines: Vec<String> = design.points().iter().zip(&w).map(|(z, w)| format!("{} {}", list(z), format_float(*w))).collect();
                lines.join("\n")
            } else {
                json!({ "points": design.points(), "weights": w }).to_string()
            }
        }
        Command::Expect { design, poly } => {
            let design = read_design(design)?;
            let doc = PolyDoc::from_json(&read(poly)?)?;
            let p = doc.poly.to_ortho(design.systems())?;
            let order = cli.order(design.dim())?;
            let basis = bm_ortho(&design, &order, cli.tolerance()?)?;
            let w = cubalg_core::ideal::weights_for(&design, &basis.standard)?;
            let value = cubature_value(|z| p.eval(z).unwrap_or(f64::NAN), &design, &w)?;
            let exact = exact_expectation(&p);
            let degree = cubature_degree(&basis).ok();
            if text {
                let degree = degree.map_or("undefined".to_string(), |d| d.to_string());
                format!(
                    "value = {}\nexact = {}\nerror = {}\ndegree = {degree}",
                    format_float(value),
                    format_float(exact),
                    format_float(exact - value)
                )
            } else {
                json!({ "value": value, "exact": exact, "error": exact - value, "degree": degree, "errorTerms": null })
                    .to_string()
            }
        }
        Command::Exact { poly } => {
            let doc = PolyDoc::from_json(&read(poly)?)?;
            if doc.systems.is_empty() {
                return Err(CliError::Input("the polynomial names no systems".into()));
            }
            let e = exact_expectation(&doc.poly.to_ortho(&doc.systems)?);
            if text {
                format_number(e, 1_000_000, 1e-12)
            } else {
                json!({ "value": e }).to_string()
            }
        }
        Command::Degree { design } => {
            let design = read_design(design)?;
            let basis = bm_ortho(&design, &cli.order(design.dim())?, cli.tolerance()?)?;
            let s = basis.polys().iter().map(s_orthogonality).collect::<Result<Vec<_>, _>>()?;
            let degree = cubature_degree(&basis)?;
            if text {
                let s: Vec<String> = s.iter().map(i64::to_string).collect();
                format!("degree = {degree}\ns = [{}]", s.join(", "))
            } else {
                json!({ "degree": degree, "s": s }).to_string()
            }
        }
        Command::Weighing { n } => {
            let lam = weighing_polynomial(*n)?;
            if text {
                format!("lambda = {lam}")
            } else {
                json!({ "n": n, "terms": expansion_json(&lam) }).to_string()
            }
        }
        Command::Alias { n, k } => {
            let nf = aliasing_nf(*k, *n)?;
            if text {
                let rhs = if nf.is_zero() { "0".to_string() } else { nf.to_string() };
                format!("H{} = {rhs}", n + k)
            } else {
                json!({ "n": n, "k": k, "terms": expansion_json(&nf) }).to_string()
            }
        }
        Command::Fraction { parent_n, subset, system } => {
            let doc: SubsetDoc =
                serde_json::from_str(&read(subset)?).map_err(|e| CliError::Input(format!("{}: {e}", subset.display())))?;
            let (name, points) = match doc {
                SubsetDoc::Bare(p) => (system.clone(), p),
                SubsetDoc::Named { system: s, points } => (s.unwrap_or_else(|| system.clone()), points),
            };
            let fr = Fraction::new(RecurrenceSystem::by_name(&name)?, *parent_n, &points)?;
            let w = fraction_weights(&fr)?;
            if text {
                format!("nodes = {}\nweights = {}", list(fr.subset()), list(&w))
            } else {
                json!({ "system": name, "nodes": fr.subset(), "weights": w }).to_string()
            }
        }
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("cubalg: {msg}");
            ExitCode::from(e.exit_code())
        }
    }
}
