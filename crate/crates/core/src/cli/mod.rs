//! Command-line front end: spec files, subcommand dispatch, and text/JSON
//! rendering. [`run`] never touches stdout, so it can be driven from tests.

pub mod specfile;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::amalgam::{AmalgamSpec, Letter, Side};
use crate::dynamics::{self, DynamicsError, ElementAction};
use crate::exec::Execution;
use crate::groups::{Fingerprint, DEFAULT_ORDER_CAP};
use crate::nil_index::{self, AdaptedReport, NilIndexError, SplittingReport, Summand, VcClass, VcKind};
use crate::tree::{self, AcylindricityReport};

pub use specfile::{SpecFile, SpecFileError};

pub const ORDER_CAP_VAR: &str = "NILSPLIT_ORDER_CAP";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandResult {
    /// 0 on success, 1 for bad input, 2 when an internal invariant breaks.
    pub exit_code: i32,
    pub payload: String,
}

#[derive(Debug, Parser)]
#[command(name = "nilsplit", version, about = "Virtually cyclic subgroups of amalgams of finite groups")]
struct Cli {
    /// Run every stage on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse and build a spec, then print indices and fingerprints.
    Validate {
        spec: PathBuf,
        /// Print the spec back in table form instead.
        #[arg(long)]
        echo: bool,
    },
    /// Reduce a word and describe how it acts on the tree.
    Classify {
        spec: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// List the conjugacy classes found up to the syllable bound.
    Enumerate {
        spec: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_syllables: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check the adapted-family axioms for the enumerated classes.
    Adapted {
        spec: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_syllables: usize,
        #[arg(long, default_value_t = 4)]
        conj_bound: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print the splitting formula.
    Report {
        spec: PathBuf,
        #[arg(long, default_value_t = 4)]
        max_syllables: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check that paths of length k near the base edge have finite
    /// pointwise stabilizers.
    Acylindrical {
        spec: PathBuf,
        #[arg(short = 'k', default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 3)]
        radius: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

enum Failure {
    Input(String),
    Internal(String),
}

impl From<SpecFileError> for Failure {
    fn from(e: SpecFileError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::InvariantViolation(_) => Failure::Internal(e.to_string()),
            DynamicsError::EllipticElement(_) => Failure::Input(e.to_string()),
        }
    }
}

impl From<NilIndexError> for Failure {
    fn from(e: NilIndexError) -> Self {
        match e {
            NilIndexError::BoundTooSmall { .. } => Failure::Input(e.to_string()),
            NilIndexError::InconsistentStabilizer(_) => Failure::Internal(e.to_string()),
            NilIndexError::Dynamics(d) => d.into(),
        }
    }
}

/// Parses `argv` (including the program name) and runs one subcommand.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let exit_code = if e.use_stderr() { 1 } else { 0 };
            return CommandResult {
                exit_code,
                payload: e.render().to_string(),
            };
        }
    };
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match dispatch(cli.command, exec) {
        Ok(payload) => CommandResult { exit_code: 0, payload },
        Err(Failure::Input(msg)) => CommandResult {
            exit_code: 1,
            payload: format!("error: {msg}\n"),
        },
        Err(Failure::Internal(msg)) => CommandResult {
            exit_code: 2,
            payload: format!("internal error: {msg}\n"),
        },
    }
}

fn order_cap() -> Result<usize, Failure> {
    match std::env::var(ORDER_CAP_VAR) {
        Err(_) => Ok(DEFAULT_ORDER_CAP),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{ORDER_CAP_VAR} must be a positive integer, got `{v}`"))),
    }
}

fn load(path: &std::path::Path) -> Result<AmalgamSpec, Failure> {
    let file = SpecFile::read(path)?;
    Ok(file.build(order_cap()?)?)
}

fn json<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("reports serialize");
    out.push('\n');
    out
}

fn dispatch(command: Command, exec: Execution) -> Result<String, Failure> {
    match command {
        Command::Validate { spec, echo } => {
            let spec = load(&spec)?;
            Ok(if echo {
                SpecFile::from_spec(&spec).to_json()
            } else {
                validate_text(&spec)
            })
        }
        Command::Classify { spec, word } => {
            let spec = load(&spec)?;
            let letters = Letter::parse_word(&word).map_err(|e| Failure::Input(e.to_string()))?;
            let nf = spec.reduce(&letters).map_err(|e| Failure::Input(e.to_string()))?;
            let action = dynamics::classify_element(&spec, &nf)?;
            Ok(classify_text(&nf, &action))
        }
        Command::Enumerate {
            spec,
            max_syllables,
            format,
        } => {
            let spec = load(&spec)?;
            let classes = nil_index::enumerate_vc_classes_with(&spec, max_syllables, exec)?;
            Ok(match format {
                Format::Text => enumerate_text(&classes, max_syllables),
                Format::Json => json(&classes.iter().map(class_json).collect::<Vec<_>>()),
            })
        }
        Command::Adapted {
            spec,
            max_syllables,
            conj_bound,
            format,
        } => {
            let spec = load(&spec)?;
            let classes = nil_index::enumerate_vc_classes_with(&spec, max_syllables, exec)?;
            let report = nil_index::check_adapted_with(&spec, &classes, max_syllables, conj_bound, exec)?;
            Ok(match format {
                Format::Text => adapted_text(&report),
                Format::Json => json(&report),
            })
        }
        Command::Report {
            spec,
            max_syllables,
            format,
        } => {
            let spec = load(&spec)?;
            let report = nil_index::splitting_report_with(&spec, max_syllables, exec)?;
            Ok(match format {
                Format::Text => report_text(&report),
                Format::Json => json(&ReportJson::from(&report)),
            })
        }
        Command::Acylindrical {
            spec,
            k,
            radius,
            format,
        } => {
            let spec = load(&spec)?;
            let report = tree::check_acylindrical(&spec, k, radius).map_err(|e| Failure::Input(e.to_string()))?;
            Ok(match format {
                Format::Text => acylindrical_text(&report),
                Format::Json => json(&report),
            })
        }
    }
}

fn describe(fp: &Fingerprint) -> String {
    format!("{} (order {})", fp.name, fp.order)
}

fn validate_text(spec: &AmalgamSpec) -> String {
    let (i1, i2) = spec.indices();
    let h = spec.h.fingerprint();
    let mut out = String::new();
    let _ = writeln!(out, "name: {}", spec.name);
    let _ = writeln!(out, "indices ({i1},{i2}), H = {}", h.name);
    for side in Side::BOTH {
        let _ = writeln!(out, "G{} = {}", side.number(), describe(&spec.group(side).fingerprint()));
    }
    let _ = writeln!(out, "H = {}", describe(&h));
    out
}

fn classify_text(nf: &crate::amalgam::NormalForm, action: &ElementAction) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "normal form: {nf}");
    if nf.is_identity() {
        let _ = writeln!(out, "identity");
    }
    match action {
        ElementAction::Elliptic { fixed_vertex } => {
            let _ = writeln!(out, "verdict: elliptic");
            let _ = writeln!(out, "translation length: 0");
            let _ = writeln!(out, "fixed vertex: {fixed_vertex}");
        }
        ElementAction::Hyperbolic {
            translation_length,
            axis,
        } => {
            let _ = writeln!(out, "verdict: hyperbolic");
            let _ = writeln!(out, "translation length: {translation_length}");
            let _ = writeln!(out, "axis period: {}", axis.period);
        }
    }
    out
}

fn type_name(class: &VcClass) -> &'static str {
    if class.is_dihedral() {
        "D_infinity"
    } else {
        "F_semidirect_Z"
    }
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn write_class(out: &mut String, i: usize, class: &VcClass) {
    let stab = &class.rep.stab;
    let _ = writeln!(
        out,
        "[{i}] {} translator {} (translation length {})",
        type_name(class),
        class.rep.axis.translator,
        class.rep.axis.translation_length()
    );
    let _ = writeln!(
        out,
        "    t_min {}, F = {}, alpha = {}",
        stab.t_min,
        class.fixer_fingerprint().name,
        nil_index::alpha_label(class.twist())
    );
    if let VcKind::DInfinity {
        reflection,
        a_fingerprint,
        b_fingerprint,
        c_fingerprint,
        ..
    } = &class.kind
    {
        let _ = writeln!(
            out,
            "    reflection {reflection}, A = {}, B = {}, C = {}",
            a_fingerprint.name, b_fingerprint.name, c_fingerprint.name
        );
    }
    let c = &class.constraints;
    let _ = write!(out, "    constraints: fixer in edge stabilizers {}", yes(c.fixer_in_edge_stabilizers));
    if let (Some(a), Some(b)) = (c.a_fixes_cell, c.b_fixes_cell) {
        let _ = write!(out, ", A fixes a cell {}, B fixes a cell {}", yes(a), yes(b));
    }
    out.push('\n');
}

fn enumerate_text(classes: &[VcClass], max_syllables: usize) -> String {
    let mut out = format!("classes: {} (max syllables {max_syllables})\n", classes.len());
    for (i, class) in classes.iter().enumerate() {
        write_class(&mut out, i, class);
    }
    out
}

fn adapted_text(report: &AdaptedReport) -> String {
    let mut out = format!(
        "adapted family check: {} classes, max syllables {}, conj bound {}\n",
        report.classes, report.max_syllables, report.conj_bound
    );
    for a in &report.axioms {
        let _ = writeln!(
            out,
            "axiom {} {} ({} checks): {}",
            a.axiom,
            if a.passed { "PASS" } else { "FAIL" },
            a.checks,
            a.description
        );
        if let Some(w) = &a.witness {
            let _ = writeln!(out, "    witness: {}", serde_json::to_string(w).expect("witness serializes"));
        }
    }
    let _ = writeln!(out, "all axioms: {}", if report.all_passed() { "PASS" } else { "FAIL" });
    out
}

fn report_text(report: &SplittingReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", report.name);
    let _ = writeln!(out, "left: {}", report.left_label);
    let _ = writeln!(
        out,
        "summands: {} (max syllables {}, {})",
        report.summands.len(),
        report.truncation.max_syllables,
        if report.truncation.complete {
            "complete"
        } else {
            "truncated"
        }
    );
    for (i, s) in report.summands.iter().enumerate() {
        write_class(&mut out, i, &s.class);
        let _ = writeln!(out, "    nil: {}", s.nil_label);
        if let Some(v) = &s.v_prime_label {
            let _ = writeln!(out, "    V': {v}");
        }
    }
    out
}

fn acylindrical_text(report: &AcylindricityReport) -> String {
    let mut out = format!(
        "k = {}, radius {}: {}\npaths checked: {}\nmax stabilizer order: {}\n",
        report.k,
        report.radius,
        if report.holds { "holds" } else { "fails" },
        report.paths_checked,
        report.max_stab_order
    );
    if let Some(w) = &report.witness {
        let _ = writeln!(out, "witness: {w}");
    }
    out
}

/// One summand in the JSON report.
#[derive(Debug, Serialize)]
pub struct SummandJson<'a> {
    #[serde(rename = "type")]
    pub kind: &'static str,
    #[serde(rename = "F")]
    pub f: &'a Fingerprint,
    pub alpha: &'a [usize],
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<&'a Fingerprint>,
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub b: Option<&'a Fingerprint>,
    #[serde(rename = "C", skip_serializing_if = "Option::is_none")]
    pub c: Option<&'a Fingerprint>,
    pub translator: String,
    pub translation_length: usize,
    pub t_min: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reflection: Option<String>,
    pub constraints: nil_index::ConstraintFlags,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nil_label: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_prime_label: Option<&'a str>,
}

pub fn class_json(class: &VcClass) -> SummandJson<'_> {
    let (a, b, c, reflection) = match &class.kind {
        VcKind::DInfinity {
            a_fingerprint,
            b_fingerprint,
            c_fingerprint,
            reflection,
            ..
        } => (
            Some(a_fingerprint),
            Some(b_fingerprint),
            Some(c_fingerprint),
            Some(reflection.to_string()),
        ),
        VcKind::Semidirect { .. } => (None, None, None, None),
    };
    SummandJson {
        kind: type_name(class),
        f: class.fixer_fingerprint(),
        alpha: class.twist().as_slice(),
        a,
        b,
        c,
        translator: class.rep.axis.translator.to_string(),
        translation_length: class.rep.axis.translation_length(),
        t_min: class.rep.stab.t_min.to_string(),
        reflection,
        constraints: class.constraints,
        nil_label: None,
        v_prime_label: None,
    }
}

fn summand_json(s: &Summand) -> SummandJson<'_> {
    SummandJson {
        nil_label: Some(&s.nil_label),
        v_prime_label: s.v_prime_label.as_deref(),
        ..class_json(&s.class)
    }
}

#[derive(Debug, Serialize)]
pub struct ReportJson<'a> {
    pub name: &'a str,
    pub left_label: &'a str,
    pub summands: Vec<SummandJson<'a>>,
    pub truncation: nil_index::Truncation,
}

impl<'a> From<&'a SplittingReport> for ReportJson<'a> {
    fn from(r: &'a SplittingReport) -> Self {
        Self {
            name: &r.name,
            left_label: &r.left_label,
            summands: r.summands.iter().map(summand_json).collect(),
            truncation: r.truncation,
        }
    }
}
