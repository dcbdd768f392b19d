//! The three subcommands. Each one resolves its settings (flags, then the
//! config file on top), runs the corresponding library call, and emits a
//! deterministic report: same configuration and seed, same bytes.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use axiograd::{
    check, model_from_json, reports_to_csv, rewrite_max_to_relu, softplus_convergence_study,
    taylor_convergence_study, Attribution, AttributionMethod, AxiomId, AxiomReport,
    CaseGenerator, ConvergenceSeries, Domain, IgMethod, Model, MonomialClosedForm,
    PairedLshapeMethod, PathMethod, PathSpec, QuadratureConfig, ScalarFunction, ShapleyMethod,
    Verdict, DEFAULT_CASES, DEFAULT_TOLERANCE,
};
use clap::Args;

use crate::config::{
    parse_usize_list, parse_vector, resolve, resolve_path, resolve_quadrature, resolve_required,
    FileConfig, QuadFlags,
};
use crate::CliError;

#[derive(Args)]
pub struct CommonArgs {
    /// JSON config file; its fields override the corresponding flags
    /// (a warning is printed per overridden flag).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Report format: json or csv.
    #[arg(long)]
    pub format: Option<String>,
    /// Gauss-Legendre order per panel (default 16).
    #[arg(long)]
    pub quad_order: Option<usize>,
    /// Switch to the midpoint rule with this many nodes per panel.
    #[arg(long)]
    pub quad_points: Option<usize>,
    /// Starting panel count (default 8).
    #[arg(long)]
    pub quad_panels: Option<usize>,
    /// Refinement limit on the panel count.
    #[arg(long)]
    pub quad_max_panels: Option<usize>,
    /// Absolute tolerance for panel refinement (default 1e-10).
    #[arg(long)]
    pub quad_tol: Option<f64>,
}

impl CommonArgs {
    fn quad_flags(&self) -> QuadFlags {
        QuadFlags {
            order: self.quad_order,
            points: self.quad_points,
            panels: self.quad_panels,
            max_panels: self.quad_max_panels,
            tolerance: self.quad_tol,
        }
    }
}

#[derive(Args)]
pub struct AttributeArgs {
    /// Model file (JSON).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// ig | shapley | monomial-closed-form | paired-lshape |
    /// path:{straight,power,lshape_xy,lshape_yx} | ensemble:W*KIND,...
    #[arg(long)]
    pub method: Option<String>,
    /// x̄ as comma-separated decimals, e.g. "1,1".
    #[arg(long)]
    pub input: Option<String>,
    /// x′ as comma-separated decimals, e.g. "0,0".
    #[arg(long)]
    pub baseline: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct AxiomsArgs {
    /// Method under audit (same forms as `attribute --method`).
    #[arg(long)]
    pub method: Option<String>,
    /// Check every axiom.
    #[arg(long)]
    pub all: bool,
    /// Check one axiom by name; repeatable.
    #[arg(long = "axiom")]
    pub axioms: Vec<String>,
    /// Case-generator seed (the AXIOGRAD_SEED environment variable
    /// overrides this flag).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Generated cases per axiom.
    #[arg(long)]
    pub cases: Option<usize>,
    /// Violation tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Input dimension for generated cases.
    #[arg(long)]
    pub dim: Option<usize>,
    /// Half-width of the centered case-generation box.
    #[arg(long)]
    pub half_width: Option<f64>,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Args)]
pub struct ConvergeArgs {
    /// softplus (net smoothing) or taylor (series truncation).
    #[arg(long)]
    pub kind: Option<String>,
    /// Model file (JSON).
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// x̄ as comma-separated decimals.
    #[arg(long)]
    pub input: Option<String>,
    /// x′ as comma-separated decimals.
    #[arg(long)]
    pub baseline: Option<String>,
    /// Sharpness grid for the softplus study (default "1,10,100,1000").
    #[arg(long)]
    pub alphas: Option<String>,
    /// Truncation orders for the taylor study (default "1,2,...,8").
    #[arg(long)]
    pub orders: Option<String>,
    #[command(flatten)]
    pub common: CommonArgs,
}

/// A parsed `--method`. Monomial closed form needs the model and baseline to
/// finish building, so it stays symbolic until then.
enum MethodSpec {
    Library(Box<dyn AttributionMethod>),
    MonomialClosedForm,
}

fn parse_method(text: &str, quad: QuadratureConfig) -> Result<MethodSpec, CliError> {
    match text {
        "ig" => return Ok(MethodSpec::Library(Box::new(IgMethod { quad }))),
        "shapley" => return Ok(MethodSpec::Library(Box::new(ShapleyMethod))),
        "monomial-closed-form" => return Ok(MethodSpec::MonomialClosedForm),
        "paired-lshape" => {
            return Ok(MethodSpec::Library(Box::new(PairedLshapeMethod { quad })));
        }
        _ => {}
    }
    if let Some(kind) = text.strip_prefix("path:") {
        let path = parse_path_kind(kind)?;
        return Ok(MethodSpec::Library(Box::new(PathMethod { path, quad })));
    }
    if let Some(members) = text.strip_prefix("ensemble:") {
        let parsed = members
            .split(',')
            .map(|piece| {
                let (weight, kind) = piece.split_once('*').ok_or_else(|| {
                    CliError::Config(format!(
                        "ensemble member {piece:?} must be WEIGHT*KIND, e.g. 0.5*lshape_xy"
                    ))
                })?;
                let weight: f64 = weight.trim().parse().map_err(|_| {
                    CliError::Config(format!("ensemble weight {weight:?} is not a number"))
                })?;
                Ok((weight, parse_path_kind(kind.trim())?))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let path = PathSpec::ensemble(parsed);
        return Ok(MethodSpec::Library(Box::new(PathMethod { path, quad })));
    }
    Err(CliError::Config(format!(
        "unknown method {text:?}; expected ig, shapley, monomial-closed-form, paired-lshape, \
         path:KIND, or ensemble:W*KIND,..."
    )))
}

fn parse_path_kind(kind: &str) -> Result<PathSpec, CliError> {
    match kind {
        "straight" => Ok(PathSpec::straight()),
        "power" => Ok(PathSpec::power()),
        "lshape_xy" => Ok(PathSpec::lshape_xy()),
        "lshape_yx" => Ok(PathSpec::lshape_yx()),
        other => Err(CliError::Config(format!(
            "unknown path kind {other:?}; expected straight, power, lshape_xy, or lshape_yx"
        ))),
    }
}

fn load_model(path: &Path) -> Result<Model, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        CliError::Config(format!("cannot read model file {}: {e}", path.display()))
    })?;
    model_from_json(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| {
            CliError::Config(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_format(text: &str) -> Result<Format, CliError> {
    match text {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        other => Err(CliError::Config(format!(
            "unknown format {other:?}; expected json or csv"
        ))),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Format {
    Json,
    Csv,
}

fn attribution_csv(attribution: &Attribution) -> String {
    let mut header = String::from("method");
    for i in 1..=attribution.values.len() {
        header.push_str(&format!(",a{i}"));
    }
    header.push_str(",residual,quad_error\n");
    let mut row = attribution.method.clone();
    for v in &attribution.values {
        row.push_str(&format!(",{v}"));
    }
    row.push_str(&format!(",{},{}\n", attribution.residual, attribution.quad_error));
    header + &row
}

pub fn attribute(args: &AttributeArgs) -> Result<ExitCode, CliError> {
    let file = FileConfig::load(args.common.config.as_deref(), "attribute")?;
    let model_path = resolve_path(file.model.as_ref(), args.model.as_ref(), "model")
        .ok_or_else(|| CliError::Config("--model is required".into()))?;
    let method_name = resolve_required(file.method.as_ref(), args.method.as_ref(), "method")?;
    let x_bar = resolve_endpoint(file.input.as_deref(), args.input.as_deref(), "input")?;
    let x_prime =
        resolve_endpoint(file.baseline.as_deref(), args.baseline.as_deref(), "baseline")?;
    let quad = resolve_quadrature(
        QuadratureConfig::default(),
        file.quad.as_ref(),
        &args.common.quad_flags(),
    )?;
    let format = parse_format(&resolve(
        file.format.as_ref(),
        args.common.format.as_ref(),
        "json".into(),
        "format",
    ))?;
    let out = resolve_path(file.out.as_ref(), args.common.out.as_ref(), "out");

    let model = load_model(&model_path)?;
    if model.input_dim() != x_bar.len() {
        return Err(CliError::Config(format!(
            "--input has {} coordinates but the model takes {}",
            x_bar.len(),
            model.input_dim()
        )));
    }
    if x_bar.len() != x_prime.len() {
        return Err(CliError::Config(format!(
            "--input has {} coordinates but --baseline has {}",
            x_bar.len(),
            x_prime.len()
        )));
    }

    let method = match parse_method(&method_name, quad)? {
        MethodSpec::Library(method) => method,
        MethodSpec::MonomialClosedForm => match &model {
            Model::Monomial { exponents, center, .. } => {
                if center != &x_prime {
                    return Err(CliError::Config(format!(
                        "monomial-closed-form needs the baseline to equal the monomial \
                         center {center:?}, got {x_prime:?}"
                    )));
                }
                Box::new(MonomialClosedForm { exponents: exponents.clone() })
            }
            _ => {
                return Err(CliError::Config(
                    "monomial-closed-form only applies to monomial models".into(),
                ));
            }
        },
    };

    let attribution = method.attribute(&model, &x_bar, &x_prime)?;
    let report = match format {
        Format::Json => to_pretty_json(&attribution)?,
        Format::Csv => attribution_csv(&attribution),
    };
    emit(&report, out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn resolve_endpoint(
    file: Option<&[f64]>,
    flag: Option<&str>,
    name: &str,
) -> Result<Vec<f64>, CliError> {
    match (file, flag) {
        (Some(v), Some(_)) => {
            eprintln!("warning: config file overrides --{name} (using {v:?})");
            Ok(v.to_vec())
        }
        (Some(v), None) => Ok(v.to_vec()),
        (None, Some(text)) => parse_vector(text, name),
        (None, None) => Err(CliError::Config(format!("--{name} is required"))),
    }
}

pub fn axioms(args: &AxiomsArgs) -> Result<ExitCode, CliError> {
    let file = FileConfig::load(args.common.config.as_deref(), "axioms")?;
    let method_name = resolve_required(file.method.as_ref(), args.method.as_ref(), "method")?;
    let seed = resolve_seed(file.seed, args.seed)?;
    let cases = resolve(file.cases.as_ref(), args.cases.as_ref(), DEFAULT_CASES, "cases");
    let tol = resolve(file.tol.as_ref(), args.tol.as_ref(), DEFAULT_TOLERANCE, "tol");
    let dim = resolve(file.dim.as_ref(), args.dim.as_ref(), 2, "dim");
    let half_width =
        resolve(file.half_width.as_ref(), args.half_width.as_ref(), 2.0, "half-width");
    let quad = resolve_quadrature(
        QuadratureConfig::default(),
        file.quad.as_ref(),
        &args.common.quad_flags(),
    )?;
    let format = parse_format(&resolve(
        file.format.as_ref(),
        args.common.format.as_ref(),
        "json".into(),
        "format",
    ))?;
    let out = resolve_path(file.out.as_ref(), args.common.out.as_ref(), "out");

    let selected = select_axioms(args, &file)?;
    let method = match parse_method(&method_name, quad)? {
        MethodSpec::Library(method) => method,
        MethodSpec::MonomialClosedForm => {
            return Err(CliError::Config(
                "monomial-closed-form is tied to one fixed monomial model and cannot serve \
                 generated axiom cases; audit ig on monomial models instead"
                    .into(),
            ));
        }
    };

    let generator = CaseGenerator::new(seed, dim, Domain::centered(dim, half_width), cases)?;
    let reports = selected
        .iter()
        .map(|&axiom| check(axiom, method.as_ref(), &generator, tol))
        .collect::<axiograd::Result<Vec<AxiomReport>>>()?;

    for report in &reports {
        let verdict = match report.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "FAIL",
            Verdict::Inapplicable => "inapplicable",
        };
        eprintln!(
            "{}: {verdict} (worst {}, {} cases)",
            report.axiom, report.worst, report.cases
        );
    }

    let text = match format {
        Format::Json => to_pretty_json(&reports)?,
        Format::Csv => reports_to_csv(&method.name(), &reports),
    };
    emit(&text, out.as_deref())?;

    if reports.iter().any(|r| r.verdict == Verdict::Fail) {
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}

/// `--seed`, unless AXIOGRAD_SEED is set — the environment always wins.
fn resolve_seed(file: Option<u64>, flag: Option<u64>) -> Result<u64, CliError> {
    let configured = match (file, flag) {
        (Some(f), Some(_)) => {
            eprintln!("warning: config file overrides --seed (using {f})");
            Some(f)
        }
        (Some(f), None) => Some(f),
        (None, flag) => flag,
    };
    match std::env::var("AXIOGRAD_SEED") {
        Ok(text) => {
            let seed = text.parse::<u64>().map_err(|_| {
                CliError::Config(format!("AXIOGRAD_SEED={text:?} is not a whole number"))
            })?;
            if configured.is_some() {
                eprintln!("warning: AXIOGRAD_SEED overrides the configured seed (using {seed})");
            }
            Ok(seed)
        }
        Err(_) => Ok(configured.unwrap_or(42)),
    }
}

fn select_axioms(args: &AxiomsArgs, file: &FileConfig) -> Result<Vec<AxiomId>, CliError> {
    let all = file.all.unwrap_or(args.all);
    let named: &[String] = match &file.axioms {
        Some(list) => {
            if !args.axioms.is_empty() {
                eprintln!("warning: config file overrides --axiom (using {list:?})");
            }
            list
        }
        None => &args.axioms,
    };
    if all && !named.is_empty() {
        return Err(CliError::Config(
            "pass either --all or --axiom selections, not both".into(),
        ));
    }
    if all {
        return Ok(AxiomId::ALL.to_vec());
    }
    if named.is_empty() {
        return Err(CliError::Config(
            "select axioms with --all or one or more --axiom NAME".into(),
        ));
    }
    named
        .iter()
        .map(|name| {
            AxiomId::from_str(name).map_err(|_| {
                CliError::Config(format!(
                    "unknown axiom {name:?}; valid names: {}",
                    AxiomId::ALL.map(|a| a.name()).join(", ")
                ))
            })
        })
        .collect()
}

pub fn converge(args: &ConvergeArgs) -> Result<ExitCode, CliError> {
    let file = FileConfig::load(args.common.config.as_deref(), "converge")?;
    let kind = resolve_required(file.kind.as_ref(), args.kind.as_ref(), "kind")?;
    let model_path = resolve_path(file.model.as_ref(), args.model.as_ref(), "model")
        .ok_or_else(|| CliError::Config("--model is required".into()))?;
    let x_bar = resolve_endpoint(file.input.as_deref(), args.input.as_deref(), "input")?;
    let x_prime =
        resolve_endpoint(file.baseline.as_deref(), args.baseline.as_deref(), "baseline")?;
    // Sharp smoothings concentrate the integrand; give refinement more room
    // than the attribute default.
    let quad = resolve_quadrature(
        QuadratureConfig { max_panels: 1 << 13, ..QuadratureConfig::default() },
        file.quad.as_ref(),
        &args.common.quad_flags(),
    )?;
    let format = parse_format(&resolve(
        file.format.as_ref(),
        args.common.format.as_ref(),
        "csv".into(),
        "format",
    ))?;
    let out = resolve_path(file.out.as_ref(), args.common.out.as_ref(), "out");

    let model = load_model(&model_path)?;
    let series: ConvergenceSeries = match kind.as_str() {
        "softplus" => {
            let net = match model {
                Model::Net(net) => net,
                Model::MaxTree { tree, domain } => rewrite_max_to_relu(&tree, domain)?,
                _ => {
                    return Err(CliError::Config(
                        "the softplus study needs a network or max-tree model".into(),
                    ));
                }
            };
            let alphas = resolve_grid(
                file.alphas.as_deref(),
                args.alphas.as_deref(),
                vec![1.0, 10.0, 100.0, 1000.0],
                "alphas",
            )?;
            softplus_convergence_study(&net, &x_bar, &x_prime, &alphas, &quad)?
        }
        "taylor" => {
            let expr = model.to_expr().map_err(|e| CliError::Config(e.to_string()))?;
            let orders = match (file.orders.as_deref(), args.orders.as_deref()) {
                (Some(list), flag) => {
                    if flag.is_some() {
                        eprintln!("warning: config file overrides --orders (using {list:?})");
                    }
                    list.to_vec()
                }
                (None, Some(text)) => parse_usize_list(text, "orders")?,
                (None, None) => (1..=8).collect(),
            };
            taylor_convergence_study(&expr, &x_bar, &x_prime, &orders, &quad)?
        }
        other => {
            return Err(CliError::Config(format!(
                "unknown study kind {other:?}; expected softplus or taylor"
            )));
        }
    };

    let text = match format {
        Format::Json => to_pretty_json(&series)?,
        Format::Csv => series.to_csv(),
    };
    emit(&text, out.as_deref())?;
    Ok(ExitCode::SUCCESS)
}

fn resolve_grid(
    file: Option<&[f64]>,
    flag: Option<&str>,
    default: Vec<f64>,
    name: &str,
) -> Result<Vec<f64>, CliError> {
    match (file, flag) {
        (Some(list), flag) => {
            if flag.is_some() {
                eprintln!("warning: config file overrides --{name} (using {list:?})");
            }
            Ok(list.to_vec())
        }
        (None, Some(text)) => parse_vector(text, name),
        (None, None) => Ok(default),
    }
}

fn to_pretty_json<T: serde::Serialize>(value: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| CliError::Config(format!("cannot serialize report: {e}")))
}
