//! Command-line front end.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nalgebra::{DMatrix, DVector};
use serde_json::{json, Value};

use crate::avlp::SolveOutcome;
use crate::error::{Error, ErrorKind, Result};
use crate::interval::{IntervalMatrix, IntervalVector, SignVector};
use crate::linalg::hull_vertices_orthant;
use crate::lp::{solve_lp, LpProblem, Status};
use crate::options::Options;
use crate::problem::{AvlpProblem, Realization};
use crate::problem_file::{digest, parse_problem_str, ProblemFile};
use crate::range::{self, Tightness, UpperBound};
use crate::report::{ext_vec, ExtReal, Failure, InputInfo, Report, Settings};
use crate::sampling;
use crate::stability::{self, Basis, StabilityCertificate, StabilityStatus};

pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_SIZE_CAP: i32 = 4;

pub fn exit_code(kind: ErrorKind) -> i32 {
    match kind {
        ErrorKind::Input => EXIT_INPUT,
        ErrorKind::Numerical => EXIT_NUMERICAL,
        ErrorKind::SizeCap => EXIT_SIZE_CAP,
    }
}

fn kind_name(kind: ErrorKind) -> &'static str {
    match kind {
        ErrorKind::Input => "input",
        ErrorKind::Numerical => "numerical",
        ErrorKind::SizeCap => "size-cap",
    }
}

fn kind_from_name(name: &str) -> ErrorKind {
    match name {
        "input" => ErrorKind::Input,
        "size-cap" => ErrorKind::SizeCap,
        _ => ErrorKind::Numerical,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "avlp-range", version, about = "Optimal value ranges of interval absolute value linear programs")]
pub struct Cli {
    /// Feasibility and optimality tolerance.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Largest number of variables for which all orthants are enumerated.
    #[arg(long, global = true, default_value_t = 16)]
    pub orthant_cap: usize,
    /// Iteration limit of the worst-case upper bound.
    #[arg(long, global = true, default_value_t = 50)]
    pub max_iters: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Record wall time in the report. Off by default so reports are reproducible.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Corner {
    Midpoint,
    /// Lower endpoints of every coefficient.
    Inf,
    /// Upper endpoints of every coefficient.
    Sup,
    /// `A_{e,s}`, `sup b`, `c_s`, `sup D`.
    Best,
    /// `A_{e,-s}`, `inf b`, `c_{-s}`, `inf D`.
    Worst,
}

#[derive(Debug, Args)]
pub struct StableArgs {
    /// Work under stability of the given basis.
    #[arg(long)]
    pub bstable: bool,
    /// 1-based constraint indices of the basis, e.g. `1,2`. Detected from the
    /// nominal program when omitted.
    #[arg(long, value_delimiter = ',')]
    pub basis: Vec<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a problem file and print its dimensions.
    Check { file: PathBuf },
    /// Solve one realization.
    Solve {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Corner::Midpoint)]
        at: Corner,
        /// Sign vector for `--at best|worst`, as `+-+` or `1,-1,1`. Defaults to all `+`.
        #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
        sign: Option<SignVector>,
        /// Solve the realization in this problem file (all radii zero) instead.
        #[arg(long, conflicts_with_all = ["at", "sign"])]
        explicit: Option<PathBuf>,
    },
    /// Best-case optimal value.
    Best {
        file: PathBuf,
        #[command(flatten)]
        stable: StableArgs,
    },
    /// Worst-case optimal value bounds.
    Worst {
        file: PathBuf,
        #[command(flatten)]
        stable: StableArgs,
    },
    /// Best case and both worst-case bounds.
    Range { file: PathBuf },
    /// Basis stability certificate.
    Stability {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        basis: Vec<usize>,
    },
    /// Vertices of the basic solution set inside one orthant.
    Vertices {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        basis: Vec<usize>,
        /// Orthant, as `+-` or `1,-1`. Read from the primal enclosure when omitted.
        #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
        orthant: Option<SignVector>,
    },
    /// Solve sampled realizations. The values are not certified bounds.
    SampleOracle {
        file: PathBuf,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use a full grid with this many points per uncertain coefficient instead.
        #[arg(long)]
        grid: Option<usize>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Check { .. } => "check",
            Command::Solve { .. } => "solve",
            Command::Best { .. } => "best",
            Command::Worst { .. } => "worst",
            Command::Range { .. } => "range",
            Command::Stability { .. } => "stability",
            Command::Vertices { .. } => "vertices",
            Command::SampleOracle { .. } => "sample-oracle",
        }
    }

    fn file(&self) -> &Path {
        match self {
            Command::Check { file }
            | Command::Solve { file, .. }
            | Command::Best { file, .. }
            | Command::Worst { file, .. }
            | Command::Range { file }
            | Command::Stability { file, .. }
            | Command::Vertices { file, .. }
            | Command::SampleOracle { file, .. } => file,
        }
    }
}

/// Accepts `+-+`, `1,-1,1` or `+1,-1,+1`.
pub fn parse_sign(text: &str) -> std::result::Result<SignVector, String> {
    let entries: Option<Vec<i8>> = if text.contains(',') {
        text.split(',')
            .map(|t| match t.trim() {
                "1" | "+1" | "+" => Some(1),
                "-1" | "-" => Some(-1),
                _ => None,
            })
            .collect()
    } else {
        text.chars()
            .map(|ch| match ch {
                '+' => Some(1),
                '-' => Some(-1),
                _ => None,
            })
            .collect()
    };
    match entries {
        Some(e) if !e.is_empty() => SignVector::new(e).map_err(|e| e.to_string()),
        _ => Err(format!("\"{text}\" is not a sign vector such as +-+ or 1,-1,1")),
    }
}

fn load(path: &Path) -> Result<(ProblemFile, String)> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Parse(format!("not UTF-8: {e}")))?;
    let file = parse_problem_str(&text)?;
    Ok((file, digest(text.as_bytes())))
}

fn vec_json(v: &DVector<f64>) -> Value {
    json!(ext_vec(v.iter().copied()))
}

fn rows_json(m: &DMatrix<f64>) -> Value {
    json!(m
        .row_iter()
        .map(|r| ext_vec(r.iter().copied()))
        .collect::<Vec<_>>())
}

pub fn realization_json(r: &Realization) -> Value {
    json!({"A": rows_json(&r.a), "b": vec_json(&r.b), "c": vec_json(&r.c), "D": rows_json(&r.d)})
}

fn box_json(v: &IntervalVector) -> Value {
    json!({"inf": vec_json(v.inf()), "sup": vec_json(v.sup())})
}

fn outcome_json(out: &SolveOutcome) -> Value {
    json!({
        "status": out.status,
        "value": ExtReal(out.value),
        "x": vec_json(&out.x),
        "sign": out.sign,
        "orthant": out.orthant,
        "ray": out.ray.as_ref().map(vec_json),
        "orthants": out.orthants,
    })
}

fn tightness_json(t: &Tightness) -> Value {
    json!({
        "sign": t.sign,
        "tight": t.tight,
        "value": t.value.map(ExtReal),
        "reason": t.reason,
    })
}

fn upper_json(u: &UpperBound) -> Value {
    json!({
        "value": ExtReal(u.value),
        "stop": u.stop,
        "witness": realization_json(&u.witness),
        "iterates": u.log,
    })
}

fn certificate_json(c: &StabilityCertificate) -> Value {
    json!({
        "status": c.status,
        "regularity": c.regularity,
        "primal": c.primal.as_ref().map(box_json),
        "primal_margin": c.primal_margin.map(ExtReal),
        "dual": c.dual.as_ref().map(box_json),
        "dual_margin": c.dual_margin.map(ExtReal),
        "failed": c.failed,
    })
}

struct Run<'a> {
    p: &'a AvlpProblem,
    opts: Options,
    report: Report,
}

impl Run<'_> {
    fn fail(&mut self, field: &str, e: &Error) {
        self.report.failures.push(Failure {
            field: field.to_string(),
            kind: kind_name(e.kind()).to_string(),
            message: e.to_string(),
        });
    }

    /// Records an error as a failure of `field` and drops the value.
    fn keep<T>(&mut self, field: &str, r: Result<T>) -> Option<T> {
        r.map_err(|e| self.fail(field, &e)).ok()
    }

    fn basis(&mut self, given: &[usize]) -> Result<Basis> {
        let (m, n) = (self.p.nrows(), self.p.nvars());
        if !given.is_empty() {
            return Basis::from_one_based(given, m, n);
        }
        let lp = LpProblem::new(self.p.c().mid(), self.p.a().mid(), self.p.b().mid())?;
        let out = solve_lp(&lp, self.opts.tol)?;
        let rows = match (out.status, out.basis) {
            (Status::Optimal, Some(rows)) => rows,
            (status, _) => {
                return Err(Error::Input(format!(
                    "no optimal basis of max mid(c)·x s.t. mid(A) x <= mid(b) (status {}); pass --basis",
                    format!("{status:?}").to_lowercase()
                )))
            }
        };
        let basis = Basis::new(rows, m, n)?;
        self.report
            .note(format!("basis {:?} taken from the nominal linear program", basis.one_based()));
        Ok(basis)
    }

    fn certificate(&mut self, basis: &Basis) -> Result<StabilityCertificate> {
        let cert = stability::verify_b_stability(self.p, basis, self.opts.tol)?;
        self.report.detail("basis", basis.one_based());
        self.report.detail("certificate", certificate_json(&cert));
        Ok(cert)
    }

    fn check(&mut self) {
        let p = self.p;
        let uncertain = [p.a().inf() != p.a().sup(), p.d().inf() != p.d().sup()];
        let count = |lo: &[f64], hi: &[f64]| lo.iter().zip(hi).filter(|(a, b)| a < b).count();
        let n_unc = count(p.a().inf().as_slice(), p.a().sup().as_slice())
            + count(p.b().inf().as_slice(), p.b().sup().as_slice())
            + count(p.c().inf().as_slice(), p.c().sup().as_slice())
            + count(p.d().inf().as_slice(), p.d().sup().as_slice());
        self.report.value("rows", p.nrows() as f64);
        self.report.value("vars", p.nvars() as f64);
        self.report.value("uncertain_coefficients", n_unc as f64);
        self.report.detail("interval_A", uncertain[0]);
        self.report.detail("interval_D", uncertain[1]);
        if p.nvars() > self.opts.orthant_cap {
            let e = Error::SizeCap {
                n: p.nvars(),
                cap: self.opts.orthant_cap,
            };
            self.fail("orthants", &e);
        }
    }

    fn solve(&mut self, at: Corner, sign: Option<SignVector>, explicit: Option<&Path>) -> Result<()> {
        let p = self.p;
        let r = if let Some(path) = explicit {
            let (file, sha) = load(path)?;
            let q = &file.problem;
            if q.a().rad().amax() > 0.0 || q.b().rad().amax() > 0.0 || q.c().rad().amax() > 0.0 || q.d().rad().amax() > 0.0 {
                return Err(Error::Input(format!("{}: an explicit realization must have zero radii", path.display())));
            }
            let r = q.midpoint();
            if !p.contains(&r, self.opts.tol) {
                return Err(Error::Input(format!(
                    "{}: realization is not contained in the interval data",
                    path.display()
                )));
            }
            self.report.detail("explicit", json!({"path": path.display().to_string(), "sha256": sha}));
            r
        } else {
            let s = sign.unwrap_or_else(|| SignVector::ones(p.nvars()));
            if s.len() != p.nvars() {
                return Err(Error::dim(format!("sign of length {} for {} variables", s.len(), p.nvars())));
            }
            let e = DVector::from_element(p.nrows(), 1.0);
            let r = match at {
                Corner::Midpoint => p.midpoint(),
                Corner::Inf => Realization {
                    a: p.a().inf().clone(),
                    b: p.b().inf().clone(),
                    c: p.c().inf().clone(),
                    d: p.d().inf().clone(),
                },
                Corner::Sup => Realization {
                    a: p.a().sup().clone(),
                    b: p.b().sup().clone(),
                    c: p.c().sup().clone(),
                    d: p.d().sup().clone(),
                },
                Corner::Best => {
                    let sv = s.to_vector();
                    Realization {
                        a: p.a().realize(&e, &sv)?,
                        b: p.b().sup().clone(),
                        c: p.c().realize(&sv)?,
                        d: p.d().sup().clone(),
                    }
                }
                Corner::Worst => {
                    let sv = s.negated().to_vector();
                    Realization {
                        a: p.a().realize(&e, &sv)?,
                        b: p.b().inf().clone(),
                        c: p.c().realize(&sv)?,
                        d: p.d().inf().clone(),
                    }
                }
            };
            self.report.detail("at", format!("{at:?}").to_lowercase());
            if matches!(at, Corner::Best | Corner::Worst) {
                self.report.detail("sign", &s);
            }
            r
        };
        let out = r.solve(self.opts.orthant_cap, self.opts.tol)?;
        self.report.value("value", out.value);
        self.report.detail("realization", realization_json(&r));
        self.report.detail("outcome", outcome_json(&out));
        Ok(())
    }

    fn best(&mut self, stable: &StableArgs) -> Result<()> {
        if !stable.bstable {
            let best = range::best_case(self.p, &self.opts)?;
            self.report.value("best", best.value);
            self.report.detail("outcome", outcome_json(&best.outcome));
            self.report.detail("witness", realization_json(&best.witness));
            return Ok(());
        }
        let basis = self.basis(&stable.basis)?;
        let cert = self.certificate(&basis)?;
        if !cert.is_verified() {
            return Err(unverified(&cert));
        }
        let v = stability::best_case_bstable(self.p, &basis, self.opts.tol)?;
        self.report.value("best_bstable", v);
        Ok(())
    }

    fn worst(&mut self, stable: &StableArgs) -> Result<()> {
        if stable.bstable {
            let basis = self.basis(&stable.basis)?;
            let cert = self.certificate(&basis)?;
            if cert.status != StabilityStatus::VerifiedNondegenerate {
                return Err(unverified(&cert));
            }
            let w = stability::worst_case_bstable(self.p, &basis, self.opts.orthant_cap)?;
            self.report.value("worst_bstable", w.value);
            self.report.detail("x", vec_json(&w.x));
            self.report.detail("sign", &w.sign);
            self.report.detail("witness", realization_json(&w.witness));
            self.report.detail(
                "gave",
                json!({"method": w.gave.method, "solves": w.gave.solves, "residual": w.gave.residual, "unique": w.gave.unique}),
            );
            if !w.gave.unique {
                self.report.note("uniqueness of the absolute value equation solution was not verified");
            }
            if let Some(ch) = self.keep("characterizations", stability::bstable_characterizations(self.p, &basis, &self.opts)) {
                self.report.detail("characterizations", ch);
            }
            return Ok(());
        }
        let (lower, upper) = rayon::join(
            || range::worst_lower_bound(self.p, &self.opts),
            || range::worst_upper_bound(self.p, &self.opts),
        );
        if let Some(lower) = self.keep("worst_lower", lower) {
            self.report.value("worst_lower", lower.value);
            self.report.detail("worst_lower_outcome", outcome_json(&lower.outcome));
            let tests: Vec<_> = lower
                .outcome
                .optimal_orthants(self.opts.tol)
                .iter()
                .map(|s| range::tightness_against(self.p, &lower, s, &self.opts))
                .collect();
            if let Some(tests) = self.keep("tightness", tests.into_iter().collect::<Result<Vec<_>>>()) {
                if tests.iter().any(|t| t.tight) {
                    self.report.value("worst", lower.value);
                }
                self.report.detail("tightness", tests.iter().map(tightness_json).collect::<Vec<_>>());
            }
        }
        if let Some(upper) = self.keep("worst_upper", upper) {
            self.report.value("worst_upper", upper.value);
            if upper.value == f64::NEG_INFINITY {
                self.report.value("worst", upper.value);
            }
            self.report.detail("worst_upper", upper_json(&upper));
        }
        let v = &self.report.values;
        if let (Some(l), Some(u)) = (v.get("worst_lower"), v.get("worst_upper")) {
            if (u.0 - l.0).abs() <= range::BOUNDS_MEET_TOL * (1.0 + l.0.abs()) {
                let l = l.0;
                self.report.value("worst", l);
            }
        }
        Ok(())
    }

    fn range(&mut self) {
        let r = range::full_range(self.p, &self.opts);
        if let Some(b) = &r.best {
            self.report.value("best", b.value);
            self.report.detail("best_witness", realization_json(&b.witness));
            self.report.detail("best_sign", &b.outcome.sign);
        }
        if let Some(l) = &r.worst_lower {
            self.report.value("worst_lower", l.value);
            self.report.detail("worst_lower_sign", &l.outcome.sign);
            self.report
                .detail("tightness", r.tightness.iter().map(tightness_json).collect::<Vec<_>>());
        }
        if let Some(u) = &r.worst_upper {
            self.report.value("worst_upper", u.value);
            self.report.detail("worst_upper", upper_json(u));
        }
        if let Some(w) = r.worst_exact() {
            self.report.value("worst", w);
        }
        for f in &r.failures {
            self.report.failures.push(Failure {
                field: f.field.to_string(),
                kind: kind_name(f.kind).to_string(),
                message: f.message.clone(),
            });
        }
    }

    fn stability(&mut self, given: &[usize]) -> Result<()> {
        let basis = self.basis(given)?;
        let cert = self.certificate(&basis)?;
        if let Some(m) = cert.primal_margin {
            self.report.value("primal_margin", m);
        }
        if let Some(m) = cert.dual_margin {
            self.report.value("dual_margin", m);
        }
        if let Some(reason) = &cert.failed {
            self.report.note(format!("not verified: {reason}"));
        }
        Ok(())
    }

    fn vertices(&mut self, given: &[usize], orthant: Option<SignVector>) -> Result<()> {
        let p = self.p;
        let basis = self.basis(given)?;
        let s = match orthant {
            Some(s) if s.len() == p.nvars() => s,
            Some(s) => {
                return Err(Error::dim(format!("orthant of length {} for {} variables", s.len(), p.nvars())))
            }
            None => {
                let cert = self.certificate(&basis)?;
                let primal = cert.primal.ok_or_else(|| {
                    Error::Input("no primal enclosure to read the orthant from; pass --orthant".into())
                })?;
                if primal.iter().any(|iv| iv.contains_zero()) {
                    return Err(Error::Input(
                        "the primal enclosure meets a coordinate hyperplane; pass --orthant".into(),
                    ));
                }
                SignVector::of(&primal.mid())
            }
        };
        // Inside orthant s the basic rows read (A - D diag(s))_B x = b_B.
        let sv = s.to_vector();
        let rows = basis.rows();
        let mid = (p.a().mid() - p.d().mid() * DMatrix::from_diagonal(&sv)).select_rows(rows.iter());
        let rad = (p.a().rad() + p.d().rad()).select_rows(rows.iter());
        let m = IntervalMatrix::from_mid_rad(&mid, &rad)?;
        let b = p.b().select(rows);
        let verts = hull_vertices_orthant(&m, &b, &s)?;
        self.report.value("count", verts.len() as f64);
        self.report.detail("orthant", &s);
        self.report
            .detail("vertices", verts.iter().map(vec_json).collect::<Vec<_>>());
        Ok(())
    }

    fn sample_oracle(&mut self, samples: usize, seed: u64, grid: Option<usize>) -> Result<()> {
        let realizations = match grid {
            Some(k) => {
                self.report.detail("grid_points", k);
                sampling::grid_realizations(self.p, k)?
            }
            None => {
                self.report.settings.seed = Some(seed);
                sampling::sample_realizations(self.p, samples, seed)
            }
        };
        let summary = sampling::oracle_over(&realizations, &self.opts)?;
        self.report.value("min_observed", summary.min);
        self.report.value("max_observed", summary.max);
        if !realizations.is_empty() {
            self.report
                .detail("argmin_realization", realization_json(&realizations[summary.argmin]));
            self.report
                .detail("argmax_realization", realization_json(&realizations[summary.argmax]));
        }
        self.report.detail("summary", summary);
        self.report.detail("certified", false);
        self.report
            .note("observed values of sampled realizations; they bracket the range from inside and are not certified bounds");
        Ok(())
    }
}

fn unverified(cert: &StabilityCertificate) -> Error {
    Error::Inconsistent(format!(
        "stability {} for this basis ({})",
        match cert.status {
            StabilityStatus::Verified => "verified only with a degenerate dual",
            _ => "not verified",
        },
        cert.failed.as_deref().unwrap_or("dual margin too small")
    ))
}

/// Runs a parsed command. Errors before a report exists are returned; errors
/// inside the report are listed in its `failures`.
pub fn run(cli: &Cli) -> Result<Report> {
    let started = Instant::now();
    let path = cli.command.file();
    let (file, sha) = load(path)?;
    let opts = Options {
        tol: cli.tol,
        orthant_cap: cli.orthant_cap,
        max_iters: cli.max_iters,
    };
    let info = InputInfo {
        path: path.display().to_string(),
        name: file.name.clone(),
        sha256: sha,
        rows: file.problem.nrows(),
        vars: file.problem.nvars(),
    };
    let settings = Settings {
        tol: opts.tol,
        orthant_cap: opts.orthant_cap,
        max_iters: opts.max_iters,
        seed: None,
    };
    let mut run = Run {
        p: &file.problem,
        opts,
        report: Report::new(cli.command.name(), info, settings),
    };
    let field = cli.command.name();
    let result = match &cli.command {
        Command::Check { .. } => {
            run.check();
            Ok(())
        }
        Command::Solve { at, sign, explicit, .. } => run.solve(*at, sign.clone(), explicit.as_deref()),
        Command::Best { stable, .. } => run.best(stable),
        Command::Worst { stable, .. } => run.worst(stable),
        Command::Range { .. } => {
            run.range();
            Ok(())
        }
        Command::Stability { basis, .. } => run.stability(basis),
        Command::Vertices { basis, orthant, .. } => run.vertices(basis, orthant.clone()),
        Command::SampleOracle { samples, seed, grid, .. } => run.sample_oracle(*samples, *seed, *grid),
    };
    if let Err(e) = result {
        run.fail(field, &e);
    }
    if cli.timing {
        run.report.wall_time_ms = Some(started.elapsed().as_secs_f64() * 1e3);
    }
    Ok(run.report)
}

/// Exit status of a produced report: 0 iff it has no failures, otherwise the
/// code of the first failure.
pub fn report_status(report: &Report) -> i32 {
    report
        .failures
        .first()
        .map_or(0, |f| exit_code(kind_from_name(&f.kind)))
}

/// Entry point with injectable streams. Returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match run(&cli) {
        Ok(report) => {
            let text = match cli.format {
                Format::Json => report.to_json() + "\n",
                Format::Text => report.to_text(),
            };
            let _ = out.write_all(text.as_bytes());
            for f in &report.failures {
                let _ = writeln!(err, "error: {}: {}", f.field, f.message);
            }
            report_status(&report)
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(e.kind())
        }
    }
}
