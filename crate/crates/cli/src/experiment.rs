//! Execution of a validated configuration: one entry per (ε, n) pair, run
//! concurrently, each writing its own files; summary files are written
//! afterwards in a fixed order.

use std::path::{Path, PathBuf};

use rayon::prelude::*;

use cdlab_core::discretize::{self, Method, ProblemSpec1D, ReducedSl};
use cdlab_core::norms::{self, OscReport, Window};
use cdlab_core::oracles::{self, ExactSolution, ProjectionTarget};
use cdlab_core::quadrature;
use cdlab_core::upg2d;
use cdlab_core::{BubbleSpec, Forcing, Forcing2D, Mesh1D, NodalField1D, P1Function, ScalarFn};

use crate::config::{Data, ExperimentConfig, MeshValue, MethodKind, OutputKind};
use crate::csv::{fmt, fmt_opt, Csv};
use crate::descriptor::Descriptor1D;
use crate::error::CliError;
use crate::table::{ConvergenceTable, TableRow};

#[derive(Debug, Clone)]
struct Entry {
    eps_index: usize,
    eps_label: String,
    eps: f64,
    n: usize,
}

impl Entry {
    fn h(&self) -> f64 {
        1.0 / self.n as f64
    }
}

#[derive(Debug, Clone, Default)]
struct ErrorRow {
    err_inf: Option<f64>,
    err_l2: Option<f64>,
    err_h1: Option<f64>,
    singular: bool,
    defect: Option<f64>,
    bound: Option<f64>,
}

#[derive(Debug, Clone)]
struct EntryResult {
    entry: Entry,
    files: Vec<(&'static str, String)>,
    errors: Option<ErrorRow>,
    osc: Vec<(Option<usize>, OscReport)>,
    inverse_error: Option<f64>,
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    /// (kind, file name) in index order.
    pub files: Vec<(String, String)>,
}

/// Nodal values at x_0..x_n of a 1D discrete solution.
#[derive(Debug, Clone)]
struct Solved {
    full: Option<Vec<f64>>,
    singular: bool,
    defect: Option<f64>,
}

impl Solved {
    fn from_field(u: &NodalField1D) -> Self {
        Self {
            full: Some(u.full_values()),
            singular: false,
            defect: None,
        }
    }
}

fn bubble_for(method: MethodKind, eps: f64, h: f64) -> Result<BubbleSpec, CliError> {
    Ok(match method {
        MethodKind::UpgQuadratic => BubbleSpec::quadratic(h)?,
        MethodKind::UpgScaled => BubbleSpec::scaled_quadratic(eps, h)?,
        MethodKind::UpgExponential => BubbleSpec::exponential(eps, h)?,
        MethodKind::UpgForward => BubbleSpec::forward_solve(eps, h)?,
        other => return Err(CliError::Config(format!("{} has no bubble", other.name()))),
    })
}

/// ∫₀¹ w with w(x) = ∫₀ˣ f.
fn mean_of_w(f: &Forcing) -> f64 {
    quadrature::composite(
        |x| f.antiderivative(x),
        0.0,
        1.0,
        64,
        quadrature::DEFAULT_ORDER,
    )
}

fn projection_of_w(f: &Forcing, mesh: &Mesh1D) -> Result<P1Function, CliError> {
    let wbar = mean_of_w(f);
    let ff = f.clone();
    let target = ScalarFn::new(move |x| ff.antiderivative(x) - wbar);
    Ok(oracles::l2_project(
        &target,
        ProjectionTarget::EqualEnds,
        mesh,
    )?)
}

fn reduced_sl(mesh: &Mesh1D, f: &Forcing) -> Result<Solved, CliError> {
    Ok(
        match discretize::solve_reduced_sl(mesh, &f.to_scalar_fn())? {
            ReducedSl::Unique(u) => Solved::from_field(&u),
            ReducedSl::Singular {
                defect, particular, ..
            } => Solved {
                full: particular.map(|u| u.full_values()),
                singular: true,
                defect: Some(defect),
            },
        },
    )
}

fn solve_1d(method: MethodKind, eps: f64, mesh: &Mesh1D, f: &Forcing) -> Result<Solved, CliError> {
    let sf = f.to_scalar_fn();
    let h = mesh.h();
    match method {
        MethodKind::ReducedSl => reduced_sl(mesh, f),
        MethodKind::Sl if eps == 0.0 => reduced_sl(mesh, f),
        MethodKind::Sl => {
            let spec = ProblemSpec1D::new(eps, sf, mesh.clone(), Method::StandardLinear)?;
            Ok(Solved::from_field(&discretize::solve(&spec)?))
        }
        MethodKind::Spls | MethodKind::ReducedSpls => {
            let sys = discretize::assemble_spls(eps, mesh, &sf)?;
            Ok(Solved::from_field(&discretize::solve_spls(&sys)?.1))
        }
        MethodKind::UpgQuadratic
        | MethodKind::UpgScaled
        | MethodKind::UpgExponential
        | MethodKind::UpgForward => {
            let spec = ProblemSpec1D::new(
                eps,
                sf,
                mesh.clone(),
                Method::Upg(bubble_for(method, eps, h)?),
            )?;
            Ok(Solved::from_field(&discretize::solve(&spec)?))
        }
        MethodKind::L2projTilde => Ok(Solved {
            full: Some(projection_of_w(f, mesh)?.values),
            singular: false,
            defect: None,
        }),
        MethodKind::Upg2d | MethodKind::Reduced2d | MethodKind::GreensInverse => Err(
            CliError::Config(format!("{} is not a 1D solution method", method.name())),
        ),
    }
}

fn add(a: &Solved, b: &Solved) -> Solved {
    Solved {
        full: match (&a.full, &b.full) {
            (Some(x), Some(y)) => Some(x.iter().zip(y).map(|(p, q)| p + q).collect()),
            _ => None,
        },
        singular: a.singular || b.singular,
        defect: match (a.defect, b.defect) {
            (None, None) => None,
            (x, y) => Some(x.unwrap_or(0.0) + y.unwrap_or(0.0)),
        },
    }
}

fn stem(cfg: &ExperimentConfig, e: &Entry) -> String {
    if cfg.method.is_reduced() {
        format!("{}_n{}", cfg.method.name(), e.n)
    } else {
        format!("{}_eps{}_n{}", cfg.method.name(), e.eps_label, e.n)
    }
}

fn interior_field(mesh: &Mesh1D, full: &[f64]) -> Result<NodalField1D, CliError> {
    Ok(NodalField1D::new(
        mesh.clone(),
        full[1..full.len() - 1].to_vec(),
    )?)
}

fn run_1d(
    cfg: &ExperimentConfig,
    d: &Descriptor1D,
    e: &Entry,
    out: &Path,
) -> Result<EntryResult, CliError> {
    let mesh = Mesh1D::new(e.n)?;
    let h = mesh.h();
    let f = &d.forcing;
    let (solved, parts) = if d.split {
        let mean = f.mean();
        let free = solve_1d(cfg.method, e.eps, &mesh, &f.mean_free())?;
        let constant = solve_1d(cfg.method, e.eps, &mesh, &Forcing::Constant(mean))?;
        (add(&free, &constant), Some((free, constant)))
    } else {
        (solve_1d(cfg.method, e.eps, &mesh, f)?, None)
    };
    let exact = if e.eps > 0.0 {
        Some(ExactSolution::new(e.eps, f)?)
    } else {
        None
    };
    let zero_boundary = cfg.method != MethodKind::L2projTilde;
    let field = match (&solved.full, zero_boundary) {
        (Some(v), true) => Some(interior_field(&mesh, v)?),
        _ => None,
    };

    let mut result = EntryResult {
        entry: e.clone(),
        files: Vec::new(),
        errors: None,
        osc: Vec::new(),
        inverse_error: None,
    };

    if cfg.wants(OutputKind::Solution) {
        if let Some(full) = &solved.full {
            let csv = solution_csv(cfg, e, &mesh, f, full, exact.as_ref(), parts.as_ref())?;
            let name = format!("{}_solution.csv", stem(cfg, e));
            csv.write(&out.join(&name))?;
            result.files.push(("solution", name));
        }
    }

    let mut row = ErrorRow {
        singular: solved.singular,
        defect: solved.defect,
        ..Default::default()
    };
    if let (Some(u), Some(ex)) = (&field, &exact) {
        let window = match &cfg.window {
            Some([a, b]) => Window::new(a.resolve(h)?, b.resolve(h)?)
                .map_err(|x| CliError::Config(x.to_string()))?,
            None => Window::full(),
        };
        let (l2, h1) = norms::windowed_errors(u, &ex.as_scalar_fn(), &ex.derivative_fn(), window);
        row.err_inf = Some(norms::discrete_inf_error(u, &ex.as_scalar_fn()));
        row.err_l2 = Some(l2);
        row.err_h1 = Some(h1);
        if cfg.method == MethodKind::UpgScaled {
            let (fi, dfi) = f.sup_norms();
            row.bound = Some(2.0 * e.eps * fi + h * h / 4.0 * dfi);
        }
    }
    result.errors = Some(row);

    if let Some(full) = &solved.full {
        let nodal = interior_field(&mesh, full)?;
        result.osc.push((None, norms::oscillation_report(&nodal)));
    }
    Ok(result)
}

fn solution_csv(
    cfg: &ExperimentConfig,
    e: &Entry,
    mesh: &Mesh1D,
    f: &Forcing,
    full: &[f64],
    exact: Option<&ExactSolution>,
    parts: Option<&(Solved, Solved)>,
) -> Result<Csv, CliError> {
    let h = mesh.h();
    let n = mesh.n();
    let mut header = vec!["x".to_string(), "u_h".to_string()];
    let mut cols: Vec<Vec<Option<f64>>> = Vec::new();
    let nodes = mesh.nodes();
    let wmean = f.mean();
    for c in &cfg.columns {
        let col: Vec<Option<f64>> = match c.as_str() {
            "exact" => nodes.iter().map(|&x| exact.map(|u| u.value(x))).collect(),
            "U_h" => {
                let r = reduced_sl(mesh, f)?;
                (0..=n).map(|j| r.full.as_ref().map(|v| v[j])).collect()
            }
            "w" => nodes.iter().map(|&x| Some(f.antiderivative(x))).collect(),
            "theta" => nodes
                .iter()
                .map(|&x| Some(f.antiderivative(x) - wmean))
                .collect(),
            "U" => {
                let wbar = mean_of_w(f);
                nodes
                    .iter()
                    .map(|&x| Some(f.antiderivative(x) - wbar))
                    .collect()
            }
            "u_plus_teeth" => {
                let amp = if e.eps > 0.0 {
                    h * h / (2.0 * e.eps)
                } else {
                    f64::NAN
                };
                (0..=n)
                    .map(|j| {
                        let teeth = if j > 0 && j < n && j % 2 == 1 {
                            amp
                        } else {
                            0.0
                        };
                        exact.map(|u| u.value(nodes[j]) + teeth)
                    })
                    .collect()
            }
            "centered" => {
                let p = P1Function {
                    mesh: mesh.clone(),
                    values: full.to_vec(),
                };
                let m = p.integral();
                full.iter().map(|v| Some(v - m)).collect()
            }
            "l2proj" => projection_of_w(f, mesh)?
                .values
                .into_iter()
                .map(Some)
                .collect(),
            "teeth" => {
                let t: Vec<f64> = full
                    .windows(3)
                    .map(|w| (w[1] - 0.5 * (w[0] + w[2])).abs())
                    .collect();
                (0..=n)
                    .map(|j| {
                        if j == 0 || j == n {
                            None
                        } else {
                            Some(t[j - 1])
                        }
                    })
                    .collect()
            }
            other => return Err(CliError::Config(format!("unknown column '{other}'"))),
        };
        header.push(c.clone());
        cols.push(col);
    }
    if let Some((free, constant)) = parts {
        header.push("u_mean_free".into());
        cols.push((0..=n).map(|j| free.full.as_ref().map(|v| v[j])).collect());
        header.push("u_mean".into());
        cols.push(
            (0..=n)
                .map(|j| constant.full.as_ref().map(|v| v[j]))
                .collect(),
        );
    }
    let mut csv = Csv::with_header(header);
    for j in 0..=n {
        let mut row = vec![fmt(nodes[j]), fmt(full[j])];
        row.extend(cols.iter().map(|c| fmt_opt(c[j])));
        csv.push(row);
    }
    Ok(csv)
}

fn run_2d(
    cfg: &ExperimentConfig,
    f: &Forcing2D,
    e: &Entry,
    out: &Path,
) -> Result<EntryResult, CliError> {
    let u = match cfg.method {
        MethodKind::Upg2d => upg2d::solve_2d_fast(&upg2d::assemble_2d(e.eps, e.n, f)?)?,
        _ => upg2d::solve_reduced_2d(e.n, f)?,
    };
    let mut result = EntryResult {
        entry: e.clone(),
        files: Vec::new(),
        errors: None,
        osc: Vec::new(),
        inverse_error: None,
    };
    let h = e.h();
    let base = stem(cfg, e);
    let mut seen = Vec::new();
    for s in &cfg.sections {
        let i = s.resolve(e.n)?;
        if seen.contains(&i) {
            continue;
        }
        seen.push(i);
        let sec = upg2d::section(&u, i)?;
        let teeth = norms::teeth_profile(&sec);
        if cfg.wants(OutputKind::Solution) {
            let mut csv = Csv::new(&["y", "u_section", "teeth_amplitude"]);
            for j in 0..=e.n {
                let t = if j == 0 || j == e.n {
                    None
                } else {
                    Some(teeth[j - 1])
                };
                csv.push(vec![fmt(j as f64 * h), fmt(sec.node_value(j)), fmt_opt(t)]);
            }
            let name = format!("{base}_section_i{i}.csv");
            csv.write(&out.join(&name))?;
            result.files.push(("section", name));
        }
        result.osc.push((Some(i), norms::oscillation_report(&sec)));
    }
    if cfg.wants(OutputKind::Solution) {
        let mut csv = Csv::new(&["x", "y", "u"]);
        for j in 0..=e.n {
            for i in 0..=e.n {
                let v = if i == 0 || j == 0 || i == e.n || j == e.n {
                    0.0
                } else {
                    u.get(i, j)
                };
                csv.push(vec![fmt(i as f64 * h), fmt(j as f64 * h), fmt(v)]);
            }
        }
        let name = format!("{base}_field.csv");
        csv.write(&out.join(&name))?;
        result.files.push(("field", name));
    }
    Ok(result)
}

fn run_greens(e: &Entry) -> Result<EntryResult, CliError> {
    let mesh = Mesh1D::new(e.n)?;
    let bubble = BubbleSpec::exponential(e.eps, mesh.h())?;
    let (m, _) = discretize::assemble_upg(e.eps, &mesh, &bubble, &ScalarFn::constant(1.0));
    let prod = m.to_dense() * oracles::inverse_via_greens(e.eps, &mesh);
    let m = e.n - 1;
    let mut err = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            let target = if i == j { 1.0 } else { 0.0 };
            err = err.max((prod[(i, j)] - target).abs());
        }
    }
    Ok(EntryResult {
        entry: e.clone(),
        files: Vec::new(),
        errors: None,
        osc: Vec::new(),
        inverse_error: Some(err),
    })
}

fn entries(cfg: &ExperimentConfig) -> Result<Vec<Entry>, CliError> {
    let mut out = Vec::new();
    for (k, e) in cfg.eps.iter().enumerate() {
        for &n in &cfg.n {
            let eps = e.resolve(1.0 / n as f64)?;
            let eps_label = match e {
                MeshValue::Number(_) => format!("{eps:e}"),
                MeshValue::Expr(_) => e.label(),
            };
            out.push(Entry {
                eps_index: k,
                eps_label,
                eps,
                n,
            });
        }
    }
    Ok(out)
}

pub fn run(cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary, CliError> {
    std::fs::create_dir_all(out_dir).map_err(|e| CliError::Io {
        path: out_dir.display().to_string(),
        source: e,
    })?;
    let list = entries(cfg)?;
    let results: Vec<EntryResult> = list
        .par_iter()
        .map(|e| match (&cfg.f, cfg.method) {
            (_, MethodKind::GreensInverse) => run_greens(e),
            (Data::OneD(d), _) => run_1d(cfg, d, e, out_dir),
            (Data::TwoD(f), _) => run_2d(cfg, f, e, out_dir),
        })
        .collect::<Result<_, _>>()?;

    let mut files: Vec<(String, String)> = Vec::new();
    for r in &results {
        files.extend(r.files.iter().map(|(k, n)| (k.to_string(), n.clone())));
    }
    let method = cfg.method.name();

    if cfg.wants(OutputKind::Errors) {
        if cfg.method == MethodKind::GreensInverse {
            let mut csv = Csv::new(&["eps", "n", "eps_over_h", "max_abs_error"]);
            for r in &results {
                let e = &r.entry;
                csv.push(vec![
                    fmt(e.eps),
                    e.n.to_string(),
                    fmt(e.eps * e.n as f64),
                    fmt_opt(r.inverse_error),
                ]);
            }
            csv.write(&out_dir.join("greens.csv"))?;
            files.push(("greens".into(), "greens.csv".into()));
        } else if results.iter().any(|r| r.errors.is_some()) {
            let mut csv = Csv::new(&[
                "method",
                "eps",
                "n",
                "h",
                "err_inf",
                "err_l2",
                "err_h1",
                "bound_inf",
                "singular",
                "defect",
            ]);
            for r in &results {
                if let Some(row) = &r.errors {
                    let e = &r.entry;
                    csv.push(vec![
                        method.to_string(),
                        fmt(e.eps),
                        e.n.to_string(),
                        fmt(e.h()),
                        fmt_opt(row.err_inf),
                        fmt_opt(row.err_l2),
                        fmt_opt(row.err_h1),
                        fmt_opt(row.bound),
                        row.singular.to_string(),
                        fmt_opt(row.defect),
                    ]);
                }
            }
            csv.write(&out_dir.join("errors.csv"))?;
            files.push(("errors".into(), "errors.csv".into()));
        }
    }

    if cfg.wants(OutputKind::Oscillation) {
        let mut csv = Csv::new(&[
            "method",
            "eps",
            "n",
            "section",
            "sign_changes",
            "teeth_amplitude",
            "max_jump",
        ]);
        for r in &results {
            for (section, rep) in &r.osc {
                let e = &r.entry;
                csv.push(vec![
                    method.to_string(),
                    fmt(e.eps),
                    e.n.to_string(),
                    section.map(|s| s.to_string()).unwrap_or_default(),
                    rep.sign_changes.to_string(),
                    fmt(rep.teeth_amplitude),
                    fmt(rep.max_jump),
                ]);
            }
        }
        csv.write(&out_dir.join("oscillation.csv"))?;
        files.push(("oscillation".into(), "oscillation.csv".into()));
    }

    if cfg.wants(OutputKind::Table) {
        for (k, label) in cfg.eps.iter().enumerate() {
            let rows: Vec<TableRow> = results
                .iter()
                .filter(|r| r.entry.eps_index == k)
                .filter_map(|r| {
                    let row = r.errors.as_ref()?;
                    Some(TableRow {
                        n: r.entry.n,
                        h: r.entry.h(),
                        err_inf: row.err_inf?,
                        err_l2: row.err_l2?,
                        err_h1: row.err_h1?,
                        bound: row.bound,
                    })
                })
                .collect();
            if rows.is_empty() {
                continue;
            }
            let name = match label {
                MeshValue::Number(v) => format!("table_eps{v:e}.csv"),
                other => format!("table_eps{}.csv", other.label()),
            };
            ConvergenceTable::new(rows)
                .to_csv()
                .write(&out_dir.join(&name))?;
            files.push(("table".into(), name));
        }
    }

    let mut index = Csv::new(&["kind", "file"]);
    for (k, f) in &files {
        index.push(vec![k.clone(), f.clone()]);
    }
    index.write(&out_dir.join("index.csv"))?;
    files.push(("index".into(), "index.csv".into()));
    Ok(RunSummary {
        out_dir: out_dir.to_path_buf(),
        files,
    })
}
