//! End-to-end verification of declaration files.

use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::{Path, PathBuf};

use crate::assertion::Assertion;
use crate::error::{Error, Result, Span};
use crate::front::{builtins, parse, typecheck_proof, CheckedProof, Decl, Env, EnvEntry};
use crate::linalg::{self, Mat, Tolerances};
use crate::order::{inf_le, Certificate, OrderDecision, OrderParams, Verdict};
use crate::outline::{build_outline, render_matrix, render_named, render_real, NameTable, ProofOutline};
use crate::qmat::{parse_operator, save_json, LoadedOperator};
use crate::semantics::{check_formula_empirical, EmpiricalOptions, EmpiricalVerdict, Mode, SemanticsOptions, DEFAULT_CAP};
use crate::wlp::{recheck_step, wlp, wp_loopfree_steps, WlpOptions, WlpResult};

/// Where `load "..."` paths are read from.
pub trait OperatorSource {
    fn read(&self, path: &str) -> Result<Vec<u8>>;
}

/// Reads paths relative to a base directory.
pub struct FsSource {
    pub base: PathBuf,
}

impl OperatorSource for FsSource {
    fn read(&self, path: &str) -> Result<Vec<u8>> {
        let full = self.base.join(path);
        std::fs::read(&full).map_err(|source| Error::Io {
            path: full.display().to_string(),
            source,
        })
    }
}

/// In-memory files, keyed by the path written in the source.
#[derive(Default)]
pub struct MemSource {
    pub files: BTreeMap<String, Vec<u8>>,
}

impl MemSource {
    pub fn with(mut self, path: &str, contents: impl Into<Vec<u8>>) -> Self {
        self.files.insert(path.to_string(), contents.into());
        self
    }
}

impl OperatorSource for MemSource {
    fn read(&self, path: &str) -> Result<Vec<u8>> {
        self.files.get(path).cloned().ok_or_else(|| Error::Io {
            path: path.to_string(),
            source: std::io::Error::new(std::io::ErrorKind::NotFound, "no such operator file"),
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub epsilon: f64,
    pub max_iters: usize,
    /// Runs the empirical semantics check at this unrolling depth.
    pub oracle_depth: Option<usize>,
    pub oracle_samples: usize,
    pub save_dir: Option<PathBuf>,
    pub seed: u64,
    pub mode: Mode,
    pub cap: usize,
    pub tolerances: Tolerances,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            epsilon: 1e-7,
            max_iters: 2000,
            oracle_depth: None,
            oracle_samples: 200,
            save_dir: None,
            seed: 7,
            mode: Mode::Partial,
            cap: DEFAULT_CAP,
            tolerances: Tolerances::default(),
        }
    }
}

impl VerifyOptions {
    pub fn order_params(&self) -> OrderParams {
        OrderParams {
            tol_accept: self.epsilon,
            max_iters: self.max_iters,
        }
    }

    pub fn wlp_options(&self) -> WlpOptions {
        WlpOptions {
            cap: self.cap,
            order: self.order_params(),
            tolerances: self.tolerances,
            ..WlpOptions::default()
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProofReport {
    pub name: String,
    pub checked: CheckedProof,
    pub transform: WlpResult,
    pub outline: ProofOutline,
    /// Decision of `pre ⊑_inf computed`, when a precondition was given.
    pub decision: Option<OrderDecision>,
    pub outline_rechecked: bool,
    pub oracle: Option<EmpiricalVerdict>,
}

impl ProofReport {
    pub fn verdict(&self) -> Option<Verdict> {
        self.decision.as_ref().map(|d| d.verdict)
    }

    pub fn computed_pre(&self) -> &Assertion {
        &self.transform.pre
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub proofs: Vec<ProofReport>,
    /// Output of `show` commands, in order.
    pub shows: Vec<String>,
    pub names: NameTable,
    pub text: String,
}

impl Report {
    pub fn proof(&self, name: &str) -> Option<&ProofReport> {
        self.proofs.iter().find(|p| p.name == name)
    }

    /// 0 when every decided formula holds, 1 if any fails, 2 if any is inconclusive.
    pub fn exit_code(&self) -> i32 {
        let verdicts: Vec<_> = self.proofs.iter().filter_map(ProofReport::verdict).collect();
        if verdicts.contains(&Verdict::Fails) {
            1
        } else if verdicts.contains(&Verdict::Inconclusive) {
            2
        } else {
            0
        }
    }
}

/// Exit code for a pipeline error.
pub fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::InvariantUndecided { .. } | Error::InternalCertificate(_) => 2,
        _ => 3,
    }
}

pub fn verify_file(path: &Path, opts: &VerifyOptions) -> Result<Report> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    verify_source(&text, &FsSource { base }, opts)
}

pub fn verify_source(source: &str, files: &dyn OperatorSource, opts: &VerifyOptions) -> Result<Report> {
    let file = parse(source)?;
    let mut s = Session {
        env: builtins(),
        files,
        opts,
        loaded: BTreeMap::new(),
        report: Report::default(),
    };
    for d in &file.decls {
        match d {
            Decl::Load { name, path, span } => s.load(name, path, *span)?,
            Decl::Proof { name, proof, span } => {
                if s.env.contains(name) || s.report.proof(name).is_some() {
                    return Err(Error::DuplicateName {
                        name: name.clone(),
                        span: *span,
                    });
                }
                let checked = typecheck_proof(name, proof, &s.env, &opts.tolerances)?;
                s.run_proof(checked)?;
            }
            Decl::Show { name, span } => {
                let out = s.show(name, *span)?;
                s.report.text.push_str(&out);
                s.report.text.push('\n');
                s.report.shows.push(out);
            }
        }
    }
    Ok(s.report)
}

struct Session<'a> {
    env: Env,
    files: &'a dyn OperatorSource,
    opts: &'a VerifyOptions,
    loaded: BTreeMap<String, LoadedOperator>,
    report: Report,
}

impl Session<'_> {
    fn load(&mut self, name: &str, path: &str, span: Span) -> Result<()> {
        if self.env.contains(name) || self.report.proof(name).is_some() {
            return Err(Error::DuplicateName {
                name: name.to_string(),
                span,
            });
        }
        let bytes = self.files.read(path)?;
        let op = parse_operator(&bytes, &self.opts.tolerances).map_err(|e| match e {
            Error::Format { offset, message } => Error::Format {
                offset,
                message: format!("{path}: {message}"),
            },
            Error::Validation(m) => Error::Validation(format!("{path}: {m}")),
            other => other,
        })?;
        self.env.define(name, op.clone().into_env_entry(), span)?;
        self.loaded.insert(name.to_string(), op);
        Ok(())
    }

    fn run_proof(&mut self, checked: CheckedProof) -> Result<()> {
        let opts = self.opts;
        let wopts = opts.wlp_options();
        let post = &checked.post.assertion;
        let liberal = opts.mode == Mode::Partial;
        let transform = if liberal {
            wlp(&checked.program, post, &wopts)?
        } else {
            if checked.program.root.contains_loop() {
                return Err(Error::Unsupported(format!(
                    "proof `{}`: total correctness is only supported for loop-free programs",
                    checked.name
                )));
            }
            wp_loopfree_steps(&checked.program, post, &wopts)?
        };
        let decision = match &checked.pre {
            Some(pre) => Some(inf_le(&pre.assertion, &transform.pre, &opts.order_params())?),
            None => None,
        };
        let first_new = self.report.names.generated().len();
        let outline = build_outline(&checked, &transform, &mut self.report.names);
        let mut outline_rechecked = true;
        for step in &transform.steps {
            outline_rechecked &= recheck_step(&checked.program, &transform, step, liberal, &wopts, 1e-9)?;
        }
        let oracle = match opts.oracle_depth {
            Some(depth) => {
                let pre = checked
                    .pre
                    .as_ref()
                    .map(|p| p.assertion.clone())
                    .unwrap_or_else(|| transform.pre.clone());
                Some(check_formula_empirical(
                    &pre,
                    &checked.program,
                    post,
                    opts.mode,
                    &EmpiricalOptions {
                        samples: opts.oracle_samples,
                        depth,
                        seed: opts.seed,
                        tol: opts.epsilon,
                        semantics: SemanticsOptions {
                            cap: opts.cap,
                            truncate: true,
                        },
                    },
                )?)
            }
            None => None,
        };
        if let Some(dir) = &opts.save_dir {
            std::fs::create_dir_all(dir).map_err(|source| Error::Io {
                path: dir.display().to_string(),
                source,
            })?;
            for p in &self.report.names.generated()[first_new..] {
                save_json(
                    &dir.join(format!("{}.qmat.json", p.name)),
                    &LoadedOperator::Hermitian(linalg::chop(&p.matrix, 1e-14)),
                )?;
            }
        }
        let report = ProofReport {
            name: checked.name.clone(),
            checked,
            transform,
            outline,
            decision,
            outline_rechecked,
            oracle,
        };
        let text = render_proof_report(&report, &self.report.names, opts);
        self.report.text.push_str(&text);
        self.report.text.push('\n');
        self.report.proofs.push(report);
        Ok(())
    }

    fn show(&self, name: &str, span: Span) -> Result<String> {
        if let Some(p) = self.report.proof(name) {
            return Ok(format!("def {name} := {}end\n", p.outline.text));
        }
        if let Some(op) = self.loaded.get(name) {
            return Ok(match op {
                LoadedOperator::Unitary(m) | LoadedOperator::Hermitian(m) => render_named(name, m),
                LoadedOperator::Measurement(p0, p1) => {
                    format!("{}\n{}", render_named(&format!("{name}.P0"), p0), render_named(&format!("{name}.P1"), p1))
                }
            });
        }
        if let Some(entry) = self.env.get(name) {
            return Ok(match entry {
                EnvEntry::Identity => render_named(name, &linalg::identity(2)),
                EnvEntry::Zero => render_named(name, &linalg::zeros(2)),
                EnvEntry::Matrix(m) => render_named(name, m),
                EnvEntry::Measurement(p0, p1) => {
                    format!("{}\n{}", render_named(&format!("{name}.P0"), p0), render_named(&format!("{name}.P1"), p1))
                }
            });
        }
        if let Some(p) = self.report.names.get(name) {
            return Ok(render_named(&p.label(), &p.matrix));
        }
        Err(Error::UnknownName {
            name: name.to_string(),
            span,
        })
    }
}

fn weights(lambda: &[f64]) -> String {
    lambda.iter().map(|&l| render_real(l)).collect::<Vec<_>>().join(", ")
}

/// One line per target of an order decision.
pub fn render_decision(decision: &OrderDecision, target_labels: &[String]) -> String {
    let mut out = String::new();
    for t in &decision.targets {
        let label = target_labels.get(t.target).cloned().unwrap_or_else(|| format!("#{}", t.target));
        match &t.certificate {
            Certificate::Holds { lambda, residual } => {
                let _ = writeln!(out, "  {label}: holds, weights ({}), residual {:.3e}", weights(lambda), residual);
            }
            Certificate::Fails { witness, margin } => {
                let _ = writeln!(out, "  {label}: fails, margin {:.9}, witness state:", margin);
                for line in render_matrix(&linalg::outer(witness)).lines() {
                    let _ = writeln!(out, "    {line}");
                }
            }
            Certificate::Inconclusive {
                lower,
                upper,
                iterations,
            } => {
                let _ = writeln!(
                    out,
                    "  {label}: inconclusive, optimum in [{lower:.3e}, {upper:.3e}] after {iterations} evaluations"
                );
            }
        }
    }
    out
}


pub fn render_proof_report(r: &ProofReport, names: &NameTable, opts: &VerifyOptions) -> String {
    let mut out = String::new();
    let reg = r.checked.register();
    let _ = writeln!(out, "== proof {} [{}] ({} correctness)", r.name, reg, match opts.mode {
        Mode::Partial => "partial",
        Mode::Total => "total",
    });
    out.push_str(&r.outline.text);
    let kind = if r.checked.program.root.contains_loop() {
        "derived precondition"
    } else if opts.mode == Mode::Total {
        "weakest precondition"
    } else {
        "weakest liberal precondition"
    };
    let _ = writeln!(out, "{kind}: {{ {} }}", r.outline.verification_condition);
    for label in &r.outline.condition_terms {
        let base = label.split('[').next().unwrap_or_default();
        if let Some(p) = names.get(base) {
            for line in render_named(&p.label(), &p.matrix).lines() {
                let _ = writeln!(out, "  {line}");
            }
        }
    }
    for step in &r.transform.steps {
        if let Some(d) = &step.invariant_check {
            let _ = writeln!(out, "loop invariant at statement {:?}: {}", step.path, d.verdict);
        }
    }
    let _ = writeln!(out, "outline re-check: {}", if r.outline_rechecked { "ok" } else { "MISMATCH" });
    match (&r.checked.pre, &r.decision) {
        (Some(pre), Some(d)) => {
            let _ = writeln!(out, "precondition: {}", pre.text());
            let _ = writeln!(out, "verdict: {}", d.verdict);
            out.push_str(&render_decision(d, &r.outline.condition_terms));
        }
        _ => {
            let _ = writeln!(out, "no precondition given; the computed precondition is reported above");
        }
    }
    if let Some(o) = &r.oracle {
        match o {
            EmpiricalVerdict::NoCounterexample {
                samples,
                channels,
                truncated,
            } => {
                let _ = writeln!(
                    out,
                    "semantic check: no counterexample ({samples} states, {channels} channel(s){})",
                    if *truncated { ", truncated" } else { "" }
                );
            }
            EmpiricalVerdict::Counterexample(cx) => {
                let _ = writeln!(
                    out,
                    "semantic check: counterexample at state {} and channel {}, violation {:.3e}",
                    cx.sample, cx.element, cx.margin
                );
            }
        }
    }
    out
}

/// Human-readable rendering of a pipeline error.
pub fn render_error(err: &Error) -> String {
    let mut out = format!("Error: {err}\n");
    if let Error::InvalidInvariant { invariant, decision, .. } = err {
        let labels: Vec<String> = (0..decision.targets.len()).map(|i| format!("body precondition #{i}")).collect();
        let _ = writeln!(out, "Order relation not satisfied:\n  {invariant} <= body precondition ({} elements)", labels.len());
        out.push_str(&render_decision(decision, &labels));
    }
    out
}

/// The matrix of a predicate label produced by a run, on the proof register.
pub fn generated_matrix(report: &Report, name: &str) -> Option<Mat> {
    report.names.get(name).map(|p| p.matrix.clone())
}
