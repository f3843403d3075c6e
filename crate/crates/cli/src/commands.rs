use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use rayon::prelude::*;

use sepfront::criterion::{
    log_grid, renyi_conditional, scan_q, sweep_surface, t_critical, vertex_locus, Branch,
    CriticalOptions, CriticalTemperature, FrontierOptions, FrontierOutcome, QScanConfig, SweepNode,
};
use sepfront::entropy::{self, conditional_sign_at_infinity, InfinitySign, QValue};
use sepfront::error::Error;
use sepfront::figures::{self, Preset};
use sepfront::model::ModelParams;
use sepfront::oracle;
use sepfront::verify::{run_suite, VerifyConfig};

use crate::grid::GridSpec;
use crate::output::{emit, Cell, Format, Record};
use crate::{Command, FrontierArgs, PointArgs};

pub struct Context {
    pub format: Format,
    pub output: Option<PathBuf>,
}

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Domain(_) | Error::Config(_) => 2,
            Error::NonConvergence { .. }
            | Error::TruncationTooSmall { .. }
            | Error::NegativeEigenvalue(_)
            | Error::EigensolverStall { .. } => 3,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            return Failure {
                code: 0,
                message: String::new(),
            };
        }
        Failure {
            code: 3,
            message: format!("output: {e}"),
        }
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

impl PointArgs {
    fn params(&self) -> Result<ModelParams, Error> {
        ModelParams::new(self.x, self.y, self.t, self.alpha)
    }
}

fn q_label(q: QValue) -> Cell {
    match q {
        QValue::Infinity => Cell::from("inf"),
        other => Cell::from(other.as_f64()),
    }
}

fn sign_label(s: InfinitySign) -> &'static str {
    match s {
        InfinitySign::Positive => "positive",
        InfinitySign::Negative => "negative",
        InfinitySign::Tie => "tie",
    }
}

fn point_cells(p: &ModelParams) -> Record {
    vec![
        ("x", p.x().into()),
        ("y", p.y().into()),
        ("t", p.t().into()),
        ("alpha", p.alpha().into()),
    ]
}

pub fn run(command: Command, ctx: &Context) -> CmdResult {
    let records = match command {
        Command::Eval { point, q } => eval(&point, q)?,
        Command::ScanQ {
            point,
            q_grid,
            linear,
        } => scan(&point, q_grid, linear)?,
        Command::Frontier { x, x_grid, line } => frontier(x, x_grid, &line)?,
        Command::Sweep {
            x_grid,
            t_grid,
            alpha,
            tol,
            coarse,
            no_vertices,
        } => {
            let line = FrontierArgs {
                t: None,
                t_grid: Some(t_grid),
                alpha,
                tol,
                coarse,
                no_vertices,
            };
            frontier(None, Some(x_grid), &line)?
        }
        Command::TCritical { x, alpha, tol } => critical(x, alpha, tol)?,
        Command::Verify { seed, samples } => return verify(seed, samples, ctx),
        Command::Figure { id } => figure(id)?,
        Command::DumpMatrix {
            point,
            levels,
            tail_tol,
        } => return dump(&point, levels, tail_tol, ctx),
    };
    let (ok, failure) = match &records {
        Outcome::Rows(_) => (true, None),
        Outcome::AllFailed(_, f) => (false, Some(f)),
    };
    emit(records.rows(), ctx.format, ctx.output.as_deref())?;
    if ok {
        Ok(ExitCode::SUCCESS)
    } else {
        let f = failure.expect("failure recorded");
        Err(Failure {
            code: f.code,
            message: f.message.clone(),
        })
    }
}

/// Rows to print; a grid command whose every node failed still prints its
/// rows but exits with the first node's error.
enum Outcome {
    Rows(Vec<Record>),
    AllFailed(Vec<Record>, Failure),
}

impl Outcome {
    fn rows(&self) -> &[Record] {
        match self {
            Outcome::Rows(r) | Outcome::AllFailed(r, _) => r,
        }
    }
}

fn eval(point: &PointArgs, q: f64) -> Result<Outcome, Failure> {
    let p = point.params()?;
    let qv = QValue::new(q)?;
    let mut row = point_cells(&p);
    row.push(("q", q_label(qv)));
    if qv == QValue::Infinity {
        let sign = conditional_sign_at_infinity(&p);
        for key in [
            "tr_joint_q",
            "tr_marginal_q",
            "s_joint",
            "s_marginal",
            "s_conditional",
            "truncation_error",
        ] {
            row.push((key, Cell::Empty));
        }
        row.push(("s_conditional_sign", sign_label(sign).into()));
        return Ok(Outcome::Rows(vec![row]));
    }
    let r = entropy::entropy_report(&p, qv)?;
    let negative = entropy::conditional_is_negative(&p, qv)?;
    row.extend([
        ("tr_joint_q", r.tr_joint_q.into()),
        ("tr_marginal_q", r.tr_marginal_q.into()),
        ("s_joint", r.s_joint.into()),
        ("s_marginal", r.s_marginal.into()),
        ("s_conditional", r.s_conditional.into()),
        ("truncation_error", r.truncation_error.into()),
        (
            "s_conditional_sign",
            if negative { "negative" } else { "nonnegative" }.into(),
        ),
    ]);
    Ok(Outcome::Rows(vec![row]))
}

fn scan(point: &PointArgs, grid: GridSpec, linear: bool) -> Result<Outcome, Failure> {
    let p = point.params()?;
    if grid.start <= 0.0 {
        return Err(usage("q grid must start above 0"));
    }
    let mut qs = if linear {
        grid.points()
    } else {
        log_grid(grid.start, grid.end, grid.count)
    };
    // q = 1 is always evaluated through the von Neumann limit
    qs.retain(|&q| q != 1.0);
    if qs.is_empty() {
        return Err(usage("q grid has no points besides q = 1"));
    }
    let cfg = QScanConfig {
        q_grid: qs,
        refine: false,
        include_infinity: true,
    };
    let s = scan_q(&p, &cfg)?;
    let q_min = s.q_min();
    let mut rows: Vec<Record> = s
        .values
        .iter()
        .map(|&(q, v)| {
            let qv = if q == 1.0 {
                QValue::One
            } else {
                QValue::Finite(q)
            };
            let negative = entropy::conditional_is_negative(&p, qv).unwrap_or(v < 0.0);
            vec![
                ("q", q_label(qv)),
                ("s_conditional", v.into()),
                ("renyi_conditional", renyi_conditional(q, v).into()),
                (
                    "sign",
                    if negative { "negative" } else { "nonnegative" }.into(),
                ),
                ("is_q_min", (qv == q_min).into()),
            ]
        })
        .collect();
    let inf = s.infinity.unwrap_or(InfinitySign::Tie);
    rows.push(vec![
        ("q", q_label(QValue::Infinity)),
        ("s_conditional", Cell::Empty),
        ("renyi_conditional", Cell::Empty),
        ("sign", sign_label(inf).into()),
        ("is_q_min", (q_min == QValue::Infinity).into()),
    ]);
    Ok(Outcome::Rows(rows))
}

fn branch_label(b: Branch) -> &'static str {
    match b {
        Branch::Linear => "linear",
        Branch::Curved => "curved",
    }
}

fn frontier_record(node: &SweepNode, vertex: Option<f64>, with_vertices: bool) -> Record {
    let mut row: Record = vec![
        ("x", node.x.into()),
        ("t", node.t.into()),
        ("alpha", node.alpha.into()),
    ];
    let (status, y, q, branch, multi, err): (&str, Cell, Cell, Cell, Cell, Cell) =
        match &node.outcome {
            Ok(FrontierOutcome::Boundary(pt)) => (
                "boundary",
                pt.y_frontier.into(),
                q_label(pt.q_min),
                branch_label(pt.branch).into(),
                pt.multi_bracket.into(),
                Cell::Empty,
            ),
            Ok(FrontierOutcome::NoEntangledRegion) => (
                "no_entangled_region",
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
            ),
            Err(e) => (
                "error",
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                Cell::Empty,
                e.to_string().into(),
            ),
        };
    row.extend([
        ("status", status.into()),
        ("y_frontier", y),
        ("q_min", q),
        ("branch", branch),
        ("multi_bracket", multi),
    ]);
    if with_vertices {
        row.push(("vertex_x", vertex.into()));
    }
    row.push(("error", err));
    row
}

fn frontier(
    x: Option<f64>,
    x_grid: Option<GridSpec>,
    line: &FrontierArgs,
) -> Result<Outcome, Failure> {
    let xs = match (x, x_grid) {
        (Some(x), None) => vec![x],
        (None, Some(g)) => g.points(),
        _ => return Err(usage("give exactly one of --x or --x-grid")),
    };
    let ts = match (line.t, line.t_grid) {
        (Some(t), None) => vec![t],
        (None, Some(g)) => g.points(),
        _ => return Err(usage("give exactly one of --T or --T-grid")),
    };
    let cfg = QScanConfig::default();
    let opts = FrontierOptions {
        coarse_points: line.coarse,
        y_tol: line.tol,
    };
    let with_vertices = !line.no_vertices;
    // rows along x carry their own vertex; a single x needs a separate x scan per T
    let row_vertices = with_vertices && xs.len() > 1;
    let sweep = sweep_surface(&xs, &ts, line.alpha, &cfg, &opts, row_vertices)?;
    let vertices: Vec<Option<f64>> = if row_vertices {
        sweep.vertices.iter().map(|v| v.1).collect()
    } else if with_vertices {
        ts.par_iter()
            .map(|&t| vertex_locus(t, line.alpha, &cfg, &opts).ok().flatten())
            .collect()
    } else {
        vec![None; ts.len()]
    };
    let rows: Vec<Record> = sweep
        .nodes
        .iter()
        .enumerate()
        .map(|(i, node)| frontier_record(node, vertices[i / xs.len()], with_vertices))
        .collect();
    if let Some(first_err) = sweep
        .nodes
        .iter()
        .all(|n| n.outcome.is_err())
        .then(|| sweep.nodes[0].outcome.clone())
    {
        let e = first_err.expect_err("all nodes failed");
        return Ok(Outcome::AllFailed(rows, e.into()));
    }
    Ok(Outcome::Rows(rows))
}

fn critical(x: f64, alpha: f64, tol: f64) -> Result<Outcome, Failure> {
    ModelParams::new(x, 0.0, 0.0, alpha)?;
    let opts = CriticalOptions {
        t_tol: tol,
        ..CriticalOptions::default()
    };
    let tc = t_critical(x, alpha, &QScanConfig::default(), &opts)?;
    let (status, value): (&str, Cell) = match tc {
        CriticalTemperature::Critical(t) => ("critical", t.into()),
        CriticalTemperature::NeverEntangled => ("never_entangled", Cell::Empty),
    };
    Ok(Outcome::Rows(vec![vec![
        ("x", x.into()),
        ("alpha", alpha.into()),
        ("status", status.into()),
        ("t_critical", value),
    ]]))
}

fn verify(seed: u64, samples: usize, ctx: &Context) -> CmdResult {
    if samples == 0 {
        return Err(usage("--samples must be at least 1"));
    }
    let report = run_suite(&VerifyConfig {
        seed,
        samples,
        ..VerifyConfig::default()
    });
    let rows: Vec<Record> = report
        .properties
        .iter()
        .map(|p| {
            vec![
                ("property", p.name.into()),
                ("status", if p.ok() { "pass" } else { "fail" }.into()),
                ("passed", p.passed.into()),
                ("checked", p.checked.into()),
                ("seed", Cell::Int(seed)),
                ("samples", samples.into()),
                ("first_failure", p.first_failure.clone().into()),
            ]
        })
        .collect();
    emit(&rows, ctx.format, ctx.output.as_deref())?;
    match report.first_failure() {
        None => Ok(ExitCode::SUCCESS),
        Some(p) => {
            eprintln!(
                "verification failed: {}: {}",
                p.name,
                p.first_failure.as_deref().unwrap_or("no detail")
            );
            Ok(ExitCode::from(1))
        }
    }
}

fn figure(id: Preset) -> Result<Outcome, Failure> {
    let table = figures::generate(id)?;
    let rows = table
        .rows
        .iter()
        .map(|r| {
            table
                .columns
                .iter()
                .zip(r)
                .map(|(&c, &v)| (c, Cell::from(v)))
                .collect()
        })
        .collect();
    Ok(Outcome::Rows(rows))
}

fn dump(point: &PointArgs, levels: Option<usize>, tail_tol: f64, ctx: &Context) -> CmdResult {
    let p = point.params()?;
    let n = match levels {
        Some(n) => n,
        None => oracle::levels_for_tol(&p, tail_tol)?,
    };
    let state = oracle::materialize(&p, n, tail_tol)?;
    match &ctx.output {
        Some(path) => {
            let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
            state.write_triplets(&mut f)?;
            f.flush()?;
        }
        None => state.write_triplets(std::io::stdout().lock())?,
    }
    eprintln!(
        "levels={n} dim={} tail_weight={:e}",
        state.dim(),
        state.tail_weight()
    );
    Ok(ExitCode::SUCCESS)
}
