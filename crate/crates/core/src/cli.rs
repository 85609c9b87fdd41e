//! Command-line front end. Exit codes: 0 success or verified, 1 refuted,
//! mismatch, counterexample, or unfinished solve, 2 usage or I/O error.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};

use crate::bbsolver::{solve_ip, z_is_tight, Limits, SolveResult, SolveStatus};
use crate::certcheck::{self, check_certificate, parse_certificate_with_lines, write_certificate, InputVerdict, Verdict};
use crate::modelgen::{emit, stats, Form, Format, Model, ModelSpec};
use crate::oracle;
use crate::rational::Rational;
use crate::setcore::{enumerate_iso_classes, Family};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "chvatal", version, about = "Exact integer programs, certificates, and a brute-force oracle for Chvátal's conjecture")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct ModelArgs {
    /// Formulation: inf, opt, or red.
    #[arg(long)]
    form: Form,
    /// Ground set size.
    #[arg(long)]
    n: usize,
    /// Level of the symmetry fixing (RED only).
    #[arg(long)]
    m: Option<usize>,
    /// Fixed family of m-sets, e.g. "{1,2,3,4},{1,2,3,5}".
    #[arg(long)]
    family: Option<String>,
}

#[derive(Args, Debug, Clone)]
struct LimitArgs {
    /// Wall-clock limit per solve, in seconds.
    #[arg(long, default_value_t = 43200)]
    time_limit: u64,
    /// Node limit per solve.
    #[arg(long)]
    nodes: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a model in the certificate problem format.
    Generate {
        #[command(flatten)]
        model: ModelArgs,
        /// Print size statistics instead of the model.
        #[arg(long)]
        stats: bool,
        /// Commented one-row-per-line listing instead of the certificate format.
        #[arg(long)]
        readable: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve a model exactly and optionally write its certificate.
    Solve {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        limits: LimitArgs,
        /// Certificate output path.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Verify a certificate's derivations and goal.
    Check {
        /// Certificate file (or use --cert).
        path: Option<PathBuf>,
        /// Certificate file.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Compare a certificate's problem section with a regenerated model.
    VerifyInput {
        path: Option<PathBuf>,
        /// Certificate file.
        #[arg(long)]
        cert: Option<PathBuf>,
        #[command(flatten)]
        model: ModelArgs,
    },
    /// Check the star property on every downset of 2^[n].
    Oracle {
        /// Ground set size.
        #[arg(long)]
        n: usize,
        /// Allow n = 6.
        #[arg(long)]
        long_run: bool,
        /// Threads sharing the downset enumeration.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// List isomorphism classes of k-families of m-subsets of [n].
    Classes {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        /// Directory receiving one level-fixed RED model per class.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate, solve, check, and verify the input of one model, or of every
    /// class representative when --k is given instead of --family.
    Pipeline {
        #[command(flatten)]
        model: ModelArgs,
        /// Family size; solves every isomorphism class of k-families of m-sets.
        #[arg(long)]
        k: Option<usize>,
        #[command(flatten)]
        limits: LimitArgs,
        /// Parallel solves.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Directory for certificates.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Everything a run depends on, echoed as the first output line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    pub subcommand: String,
    pub n: Option<usize>,
    pub form: Option<Form>,
    pub m: Option<usize>,
    pub k: Option<usize>,
    pub family: Option<String>,
    pub out: Option<PathBuf>,
    pub cert: Option<PathBuf>,
    pub time_limit: Option<u64>,
    pub nodes: Option<u64>,
    pub workers: Option<usize>,
    pub stats: bool,
    pub readable: bool,
    pub long_run: bool,
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn opt<T: fmt::Display>(v: &Option<T>) -> String {
            v.as_ref().map_or("-".to_string(), |v| v.to_string())
        }
        let path = |p: &Option<PathBuf>| p.as_ref().map_or("-".to_string(), |p| p.display().to_string());
        write!(
            f,
            "# run: subcommand={} form={} n={} m={} k={} family={} out={} cert={} time_limit={} nodes={} workers={} stats={} readable={} long_run={}",
            self.subcommand,
            opt(&self.form.map(|f| f.to_string().to_lowercase())),
            opt(&self.n),
            opt(&self.m),
            opt(&self.k),
            self.family.as_ref().map_or("-".to_string(), |s| format!("\"{s}\"")),
            path(&self.out),
            path(&self.cert),
            opt(&self.time_limit),
            opt(&self.nodes),
            opt(&self.workers),
            self.stats,
            self.readable,
            self.long_run
        )
    }
}

impl RunConfig {
    fn from_command(c: &Command) -> Self {
        let mut rc = RunConfig::default();
        let model = |rc: &mut RunConfig, m: &ModelArgs| {
            rc.form = Some(m.form);
            rc.n = Some(m.n);
            rc.m = m.m;
            rc.family = m.family.clone();
        };
        let limits = |rc: &mut RunConfig, l: &LimitArgs| {
            rc.time_limit = Some(l.time_limit);
            rc.nodes = l.nodes;
        };
        match c {
            Command::Generate { model: m, stats, readable, out } => {
                rc.subcommand = "generate".into();
                model(&mut rc, m);
                rc.stats = *stats;
                rc.readable = *readable;
                rc.out = out.clone();
            }
            Command::Solve { model: m, limits: l, cert } => {
                rc.subcommand = "solve".into();
                model(&mut rc, m);
                limits(&mut rc, l);
                rc.cert = cert.clone();
            }
            Command::Check { path, cert } => {
                rc.subcommand = "check".into();
                rc.cert = path.clone().or(cert.clone());
            }
            Command::VerifyInput { path, cert, model: m } => {
                rc.subcommand = "verify-input".into();
                model(&mut rc, m);
                rc.cert = path.clone().or(cert.clone());
            }
            Command::Oracle { n, long_run, workers } => {
                rc.subcommand = "oracle".into();
                rc.n = Some(*n);
                rc.long_run = *long_run;
                rc.workers = Some(*workers);
            }
            Command::Classes { n, m, k, out } => {
                rc.subcommand = "classes".into();
                rc.n = Some(*n);
                rc.m = Some(*m);
                rc.k = Some(*k);
                rc.out = out.clone();
            }
            Command::Pipeline { model: m, k, limits: l, workers, out } => {
                rc.subcommand = "pipeline".into();
                model(&mut rc, m);
                limits(&mut rc, l);
                rc.k = *k;
                rc.workers = Some(*workers);
                rc.out = out.clone();
            }
        }
        rc
    }
}

/// Parses argv (including the program name) and runs the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    println!("{}", RunConfig::from_command(&cli.command));
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}

fn spec_of(m: &ModelArgs) -> anyhow::Result<ModelSpec> {
    let mut spec = ModelSpec::new(m.form, m.n);
    let family = m.family.as_deref().map(|lit| Family::parse(m.n, lit)).transpose()?;
    let level = match (m.m, family) {
        (None, None) => None,
        (Some(level), fam) => Some((level, fam.map_or_else(|| Family::empty(m.n), Ok)?)),
        (None, Some(fam)) => {
            let size = fam.members().first().map(|s| s.len()).ok_or_else(|| anyhow!("--family is empty; give --m"))?;
            Some((size, fam))
        }
    };
    if let Some((level, fam)) = level {
        spec = spec.with_level(level, fam);
    }
    Ok(spec)
}

fn write_out(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn limits_of(l: &LimitArgs) -> Limits {
    Limits { time: Some(Duration::from_secs(l.time_limit)), nodes: l.nodes, progress: true }
}

fn show(v: Option<&Rational>) -> String {
    v.map_or("-".to_string(), |v| v.to_string())
}

/// A completed solve that disproves the conjecture for this model.
fn is_counterexample(model: &Model, r: &SolveResult) -> bool {
    match model.form {
        Form::Inf => r.status == SolveStatus::Optimal,
        Form::Opt | Form::Red => r.best_objective.as_ref().is_some_and(|v| v.is_positive()),
    }
}

fn summary(model: &Model, r: &SolveResult) -> String {
    let status = match r.status {
        SolveStatus::Optimal => "optimal",
        SolveStatus::Infeasible => "infeasible",
        SolveStatus::Limit => "limit",
    };
    let mut s = format!(
        "{}: status={status} objective={} dual_bound={} nodes={} time={:.3}s",
        model.name,
        show(r.best_objective.as_ref()),
        show(r.dual_bound.as_ref()),
        r.node_count,
        r.elapsed.as_secs_f64()
    );
    if let (Some(x), Some(_)) = (&r.best_solution, model.z()) {
        s.push_str(&format!(" z_tight={}", z_is_tight(model, x)));
    }
    s
}

fn read_cert(path: Option<PathBuf>, flag: Option<PathBuf>) -> anyhow::Result<(PathBuf, String)> {
    let p = path.or(flag).ok_or_else(|| anyhow!("no certificate file given"))?;
    let text = fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
    Ok((p, text))
}

fn dispatch(command: Command) -> anyhow::Result<i32> {
    match command {
        Command::Generate { model, stats: want_stats, readable, out } => {
            let m = spec_of(&model)?.build()?;
            if want_stats {
                println!("{}", stats(&m));
                return Ok(EXIT_OK);
            }
            let fmt = if readable { Format::Readable } else { Format::CertProblem };
            write_out(out.as_deref(), &emit(&m, fmt))?;
            Ok(EXIT_OK)
        }
        Command::Solve { model, limits, cert } => {
            let m = spec_of(&model)?.build()?;
            let r = solve_ip(&m, &limits_of(&limits))?;
            println!("{}", summary(&m, &r));
            if let (Some(path), Some(c)) = (&cert, &r.certificate) {
                write_out(Some(path), &write_certificate(c))?;
                println!("certificate: {} ({} derivations)", path.display(), c.derivations.len());
            }
            Ok(if r.status == SolveStatus::Limit || is_counterexample(&m, &r) { EXIT_REFUTED } else { EXIT_OK })
        }
        Command::Check { path, cert } => {
            let (p, text) = read_cert(path, cert)?;
            let (c, lines) = match parse_certificate_with_lines(&text) {
                Ok(v) => v,
                Err(e) => {
                    println!("parse error: {}: {e}", p.display());
                    return Ok(EXIT_USAGE);
                }
            };
            match check_certificate(&c) {
                Verdict::Verified => {
                    println!("verified: {} derivations", c.derivations.len());
                    Ok(EXIT_OK)
                }
                Verdict::Refuted(r) => {
                    println!("refuted at line {}: {r}", r.line(Some(&lines), &c));
                    Ok(EXIT_REFUTED)
                }
            }
        }
        Command::VerifyInput { path, cert, model } => {
            let (p, text) = read_cert(path, cert)?;
            let c = match certcheck::parse_certificate(&text) {
                Ok(c) => c,
                Err(e) => {
                    println!("parse error: {}: {e}", p.display());
                    return Ok(EXIT_USAGE);
                }
            };
            match certcheck::verify_input(&c, &spec_of(&model)?).map_err(|e| anyhow!(e))? {
                InputVerdict::Match => {
                    println!("match");
                    Ok(EXIT_OK)
                }
                InputVerdict::Mismatch(d) => {
                    println!("mismatch: {d}");
                    Ok(EXIT_REFUTED)
                }
            }
        }
        Command::Oracle { n, long_run, workers } => {
            let progress = |k: usize| eprintln!("downsets checked: {k}");
            let report = oracle::verify_conjecture(n, long_run, workers, &progress)?;
            print!("{}", report.text());
            println!("{}", report.record());
            Ok(if report.all_satisfy { EXIT_OK } else { EXIT_REFUTED })
        }
        Command::Classes { n, m, k, out } => {
            let classes = enumerate_iso_classes(n, m, k)?;
            println!("classes: {}", classes.representatives.len());
            for (i, rep) in classes.representatives.iter().enumerate() {
                println!("{i}: {rep}");
                if let Some(dir) = &out {
                    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
                    let model = ModelSpec::new(Form::Red, n).with_level(m, rep.clone()).build();
                    match model {
                        Ok(model) => {
                            let path = dir.join(format!("red{n}_m{m}_k{k}_c{i}.lp"));
                            write_out(Some(&path), &emit(&model, Format::CertProblem))?;
                        }
                        Err(e) => println!("{i}: no model: {e}"),
                    }
                }
            }
            Ok(EXIT_OK)
        }
        Command::Pipeline { model, k, limits, workers, out } => pipeline(model, k, limits, workers, out),
    }
}

/// Output lines of one pipeline run and whether every stage passed.
fn pipeline_one(spec: &ModelSpec, limits: &Limits, out: Option<&Path>, tag: &str) -> (Vec<String>, bool) {
    let mut lines = Vec::new();
    let model = match spec.build() {
        Ok(m) => m,
        Err(e) => return (vec![format!("{tag}generate: failed: {e}")], false),
    };
    let st = stats(&model);
    lines.push(format!("{tag}generate: {} {st}", model.name));
    let r = match solve_ip(&model, limits) {
        Ok(r) => r,
        Err(e) => {
            lines.push(format!("{tag}solve: failed: {e}"));
            return (lines, false);
        }
    };
    lines.push(format!("{tag}solve: {}", summary(&model, &r)));
    let Some(cert) = &r.certificate else {
        lines.push(format!("{tag}check: skipped, no certificate"));
        return (lines, false);
    };
    let text = write_certificate(cert);
    if let Some(dir) = out {
        let path = dir.join(format!("{}.cert", file_stem(&model.name)));
        if let Err(e) = fs::write(&path, &text) {
            lines.push(format!("{tag}write: failed: {e}"));
            return (lines, false);
        }
        lines.push(format!("{tag}certificate: {}", path.display()));
    }
    // check and verify the serialized text, as an external reader would
    let parsed = match certcheck::parse_certificate(&text) {
        Ok(c) => c,
        Err(e) => {
            lines.push(format!("{tag}check: parse error: {e}"));
            return (lines, false);
        }
    };
    let verdict = check_certificate(&parsed);
    lines.push(format!(
        "{tag}check: {}",
        match &verdict {
            Verdict::Verified => "verified".to_string(),
            Verdict::Refuted(e) => format!("refuted: {e}"),
        }
    ));
    let input = certcheck::verify_input(&parsed, spec);
    lines.push(format!(
        "{tag}verify-input: {}",
        match &input {
            Ok(InputVerdict::Match) => "match".to_string(),
            Ok(InputVerdict::Mismatch(d)) => format!("mismatch: {d}"),
            Err(e) => format!("error: {e}"),
        }
    ));
    let ok = verdict.is_verified() && matches!(input, Ok(InputVerdict::Match)) && !is_counterexample(&model, &r);
    (lines, ok)
}

/// `RED(5)^{...}` style names as `red_5_...`.
fn file_stem(name: &str) -> String {
    name.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_ascii_lowercase)
        .collect::<Vec<_>>()
        .join("_")
}

fn pipeline(model: ModelArgs, k: Option<usize>, limits: LimitArgs, workers: usize, out: Option<PathBuf>) -> anyhow::Result<i32> {
    if let Some(dir) = &out {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let limits = limits_of(&limits);
    let specs: Vec<ModelSpec> = match k {
        None => vec![spec_of(&model)?],
        Some(k) => {
            if model.family.is_some() {
                bail!("--k and --family are mutually exclusive");
            }
            let m = model.m.ok_or_else(|| anyhow!("--k needs --m"))?;
            enumerate_iso_classes(model.n, m, k)?
                .representatives
                .into_iter()
                .map(|rep| ModelSpec::new(model.form, model.n).with_level(m, rep))
                .collect()
        }
    };
    let results: Vec<Mutex<Option<(Vec<String>, bool)>>> = specs.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let worker = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= specs.len() {
            break;
        }
        let tag = if specs.len() > 1 { format!("[{i}] ") } else { String::new() };
        let res = pipeline_one(&specs[i], &limits, out.as_deref(), &tag);
        *results[i].lock().unwrap() = Some(res);
    };
    std::thread::scope(|s| {
        for _ in 0..workers.clamp(1, specs.len().max(1)) {
            s.spawn(worker);
        }
    });
    let mut all_ok = true;
    for r in results {
        let (lines, ok) = r.into_inner().unwrap().expect("every model is processed");
        lines.iter().for_each(|l| println!("{l}"));
        all_ok &= ok;
    }
    println!("pipeline: {}", if all_ok { "ok" } else { "failed" });
    Ok(if all_ok { EXIT_OK } else { EXIT_REFUTED })
}
