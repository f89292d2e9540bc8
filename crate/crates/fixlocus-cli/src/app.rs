//! Command dispatch. Exit codes: 0 success, 1 validation or computation
//! failure, 2 parse failure (command line, document syntax, or element
//! expression). Diagnostics go to the error stream, results to the output
//! stream.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use fixlocus_core::{
    component_count, component_upper_bound, fermat_instance, fiber_oracle_count,
    fuchsian_default_specs, macbeath_count, oval_count, schottky_instance, CatalogError,
    CatalogInstance, ElementId, FiniteGroup, InstanceKind, DEFAULT_GROUP_CAP,
};

use crate::document::{
    lower, parse_document, render_document, render_permutation, DocEcsEntry, DocumentError,
    ImageValue, InstanceDocument, Lowered,
};
use crate::report::{render_rational, Report, ReportRow};
use crate::wordtext::parse_word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 1;
pub const EXIT_PARSE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "fixlocus",
    version,
    about = "Counts connected components of fixed-point loci for finite group actions",
    long_about = "Counts connected components of fixed-point loci for finite group actions\n\
        described by instance documents: a finite permutation group, a source\n\
        presentation with distinguished torsion generators, and per-order\n\
        normalizer data. See the fixtures directory for document examples."
)]
struct Cli {
    /// Emit the machine-readable report form instead of the human listing
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance document
    file: PathBuf,
    /// Element to evaluate: a presentation generator or word, a word over
    /// the group generators, or a permutation in cycle notation
    #[arg(long, conflicts_with = "all")]
    element: Option<String>,
    /// Evaluate every non-trivial group element
    #[arg(long)]
    all: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Component counts of fixed-point loci (defaults to the ecs images)
    Count(InstanceArgs),
    /// Upper bounds from the torsion data alone
    Bound(InstanceArgs),
    /// Surface fixed-point counts by the counting formula
    Macbeath(InstanceArgs),
    /// Surface fixed-point counts by the brute-force coset-fiber oracle
    Oracle(InstanceArgs),
    /// Oval counts for a symmetry, from the reflections section
    Ovals {
        /// Instance document with a reflections section
        file: PathBuf,
        /// The symmetry; defaults to the image of the first reflection class
        #[arg(long)]
        element: Option<String>,
    },
    /// Check the document: relators, surjectivity, torsion orders
    Validate {
        /// Instance document
        file: PathBuf,
    },
    /// Built-in instances: emit the document, or self-check with --check
    Catalog {
        #[command(subcommand)]
        which: CatalogCommand,
    },
}

#[derive(Subcommand)]
enum CatalogCommand {
    /// The order-m^k abelian action with k torsion generators of order m
    Fermat {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        /// Recompute the known counts and print them
        #[arg(long)]
        check: bool,
    },
    /// The rank-5 handlebody action of the elementary abelian group of order 8
    Schottky {
        /// Recompute the known counts and print them
        #[arg(long)]
        check: bool,
    },
}

struct Failure {
    code: i32,
    message: String,
}

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{rendered}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{rendered}");
                    EXIT_PARSE
                }
            };
        }
    };
    match dispatch(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<(), Failure> {
    match &cli.command {
        Command::Count(args) => instance_command(args, cli.machine, out, count_report),
        Command::Bound(args) => instance_command(args, cli.machine, out, bound_report),
        Command::Macbeath(args) => instance_command(args, cli.machine, out, macbeath_report),
        Command::Oracle(args) => instance_command(args, cli.machine, out, oracle_report),
        Command::Ovals { file, element } => {
            ovals_command(file, element.as_deref(), cli.machine, out)
        }
        Command::Validate { file } => validate_command(file, cli.machine, out),
        Command::Catalog { which } => catalog_command(which, out),
    }
}

fn group_cap() -> Result<usize, Failure> {
    match std::env::var("FIXLOCUS_GROUP_CAP") {
        Ok(text) => match text.trim().parse::<usize>() {
            Ok(cap) if cap >= 1 => Ok(cap),
            _ => Err(fail(
                EXIT_PARSE,
                format!("FIXLOCUS_GROUP_CAP must be a positive integer, got `{text}`"),
            )),
        },
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_GROUP_CAP),
        Err(e) => Err(fail(EXIT_PARSE, format!("FIXLOCUS_GROUP_CAP: {e}"))),
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<(InstanceDocument, Lowered), Failure> {
    let cap = group_cap()?;
    let text = read_file(path)?;
    let doc = parse_document(&text).map_err(|e| {
        let code = match e {
            DocumentError::Syntax { .. } => EXIT_PARSE,
            DocumentError::Structure { .. } => EXIT_VALIDATION,
        };
        fail(code, format!("{}: {e}", path.display()))
    })?;
    let lowered =
        lower(&doc, cap).map_err(|e| fail(EXIT_VALIDATION, format!("{}: {e}", path.display())))?;
    Ok((doc, lowered))
}

/// Elements a subcommand works on, with a label for the report row.
fn chosen_elements(
    doc: &InstanceDocument,
    lowered: &Lowered,
    element: Option<&str>,
    all: bool,
) -> Result<Vec<(Option<String>, ElementId)>, Failure> {
    let group = lowered.epi.target();
    if let Some(text) = element {
        let id = resolve_element_text(doc, lowered, text)?;
        return Ok(vec![(Some(text.to_string()), id)]);
    }
    if all {
        let identity = group.identity();
        return Ok(group
            .elements()
            .filter(|&g| g != identity)
            .map(|g| (None, g))
            .collect());
    }
    if lowered.epi.ecs().is_empty() {
        return Err(fail(
            EXIT_VALIDATION,
            "no ecs entries to default to; pass --element or --all",
        ));
    }
    Ok(lowered
        .epi
        .ecs()
        .iter()
        .map(|e| (Some(format!("ecs{}", e.index)), e.image))
        .collect())
}

/// An element expression: presentation word, group-generator word, or
/// permutation, tried in that order.
fn resolve_element_text(
    doc: &InstanceDocument,
    lowered: &Lowered,
    text: &str,
) -> Result<ElementId, Failure> {
    let group = lowered.epi.target();
    if let Ok(w) = parse_word(text, lowered.epi.presentation().generator_names()) {
        return lowered
            .epi
            .evaluate_word(&w)
            .map_err(|e| fail(EXIT_PARSE, format!("element `{text}`: {e}")));
    }
    let group_names: Vec<String> = doc
        .group_generators
        .iter()
        .map(|(n, _)| n.clone())
        .collect();
    if let Ok(w) = parse_word(text, &group_names) {
        let mut acc = group.identity();
        for &(g, e) in w.letters() {
            let gen = group
                .id_of(&doc.group_generators[g].1)
                .expect("generators are members");
            acc = group.compose(acc, group.power(gen, e));
        }
        return Ok(acc);
    }
    match crate::document::parse_permutation(text, group.degree()) {
        Ok(p) => group.id_of(&p).ok_or_else(|| {
            fail(
                EXIT_VALIDATION,
                format!("element `{text}` is not in the group"),
            )
        }),
        Err(_) => Err(fail(
            EXIT_PARSE,
            format!(
                "element `{text}` is neither a presentation word, a group word, nor a permutation"
            ),
        )),
    }
}

/// Selected elements paired with their report labels (`name` column).
type Targets = [(Option<String>, ElementId)];

fn instance_command(
    args: &InstanceArgs,
    machine: bool,
    out: &mut dyn Write,
    build: fn(&Lowered, &Targets) -> Result<Report, Failure>,
) -> Result<(), Failure> {
    let (doc, lowered) = load(&args.file)?;
    let targets = chosen_elements(&doc, &lowered, args.element.as_deref(), args.all)?;
    let report = build(&lowered, &targets)?;
    emit(out, &report, machine)
}

fn emit(out: &mut dyn Write, report: &Report, machine: bool) -> Result<(), Failure> {
    let text = if machine {
        report.render_machine()
    } else {
        report.render_human()
    };
    out.write_all(text.as_bytes())
        .map_err(|e| fail(EXIT_VALIDATION, format!("write failed: {e}")))
}

fn base_row(group: &FiniteGroup, label: &Option<String>, g: ElementId) -> ReportRow {
    let mut row = ReportRow::new();
    if let Some(label) = label {
        row = row.push("name", label);
    }
    row.push("element", render_permutation(group.perm(g)))
}

fn join(values: impl IntoIterator<Item = String>) -> String {
    let joined = values.into_iter().collect::<Vec<_>>().join(" ");
    if joined.is_empty() {
        "-".to_string()
    } else {
        joined
    }
}

/// The normalizer data for counting: the document's section, or the
/// defaults n_i = m_i for a signature instance without one.
fn counting_specs(
    lowered: &Lowered,
    report: &mut Report,
) -> Result<Vec<fixlocus_core::NormalizerImageSpec>, Failure> {
    if !lowered.specs.is_empty() {
        return Ok(lowered.specs.clone());
    }
    if matches!(lowered.epi.kind(), InstanceKind::FuchsianSignature(_)) {
        report.assume("normalizer image orders defaulted to n_i = m_i for every divisor");
        return fuchsian_default_specs(&lowered.epi)
            .map_err(|e| fail(EXIT_VALIDATION, e.to_string()));
    }
    Ok(Vec::new())
}

fn count_report(lowered: &Lowered, targets: &Targets) -> Result<Report, Failure> {
    let mut report = Report::new("count");
    let specs = counting_specs(lowered, &mut report)?;
    let group = lowered.epi.target();
    for (label, g) in targets {
        let fix = component_count(&lowered.epi, *g, &lowered.merge, &specs)
            .map_err(|e| fail(EXIT_VALIDATION, format!("element {}: {e}", group.perm(*g))))?;
        let row = base_row(group, label, *g)
            .push("order", fix.order)
            .push("j", join(fix.j_set.iter().map(|i| i.to_string())))
            .push("i", join(fix.i_set.iter().map(|i| i.to_string())))
            .push(
                "n",
                join(fix.n_values.iter().map(|(i, n)| format!("{i}:{n}"))),
            )
            .push("count", fix.count)
            .push("bound", render_rational(fix.upper_bound));
        report.rows.push(row);
        for a in &fix.assumptions {
            report.assume(a);
        }
    }
    Ok(report)
}

fn bound_report(lowered: &Lowered, targets: &Targets) -> Result<Report, Failure> {
    let mut report = Report::new("bound");
    let group = lowered.epi.target();
    for (label, g) in targets {
        let bound = component_upper_bound(&lowered.epi, *g)
            .map_err(|e| fail(EXIT_VALIDATION, format!("element {}: {e}", group.perm(*g))))?;
        let row = base_row(group, label, *g)
            .push("order", group.element_order(*g))
            .push("bound", render_rational(bound));
        report.rows.push(row);
    }
    Ok(report)
}

fn macbeath_report(lowered: &Lowered, targets: &Targets) -> Result<Report, Failure> {
    let mut report = Report::new("macbeath");
    let group = lowered.epi.target();
    for (label, g) in targets {
        let fix = macbeath_count(&lowered.epi, *g)
            .map_err(|e| fail(EXIT_VALIDATION, format!("element {}: {e}", group.perm(*g))))?;
        let row = base_row(group, label, *g)
            .push("order", group.element_order(*g))
            .push(
                "contributing",
                join(fix.contributing_indices.iter().map(|i| i.to_string())),
            )
            .push("count", fix.count);
        report.rows.push(row);
    }
    Ok(report)
}

fn oracle_report(lowered: &Lowered, targets: &Targets) -> Result<Report, Failure> {
    let mut report = Report::new("oracle");
    let group = lowered.epi.target();
    for (label, g) in targets {
        let count = fiber_oracle_count(&lowered.epi, *g)
            .map_err(|e| fail(EXIT_VALIDATION, format!("element {}: {e}", group.perm(*g))))?;
        report
            .rows
            .push(base_row(group, label, *g).push("count", count));
    }
    Ok(report)
}

fn ovals_command(
    file: &Path,
    element: Option<&str>,
    machine: bool,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let (doc, lowered) = load(file)?;
    if lowered.reflections.is_empty() {
        return Err(fail(EXIT_VALIDATION, "document has no reflections section"));
    }
    let sigma = match element {
        Some(text) => resolve_element_text(&doc, &lowered, text)?,
        None => lowered.reflections[0].reflection_image,
    };
    let group = lowered.epi.target();
    let count = oval_count(&lowered.epi, sigma, &lowered.reflections).map_err(|e| {
        fail(
            EXIT_VALIDATION,
            format!("element {}: {e}", group.perm(sigma)),
        )
    })?;
    let mut report = Report::new("ovals");
    report.rows.push(
        ReportRow::new()
            .push("element", render_permutation(group.perm(sigma)))
            .push("classes", lowered.reflections.len())
            .push("ovals", count),
    );
    report.assume("reflection classes and centralizer words taken as given");
    emit(out, &report, machine)
}

fn validate_command(file: &Path, machine: bool, out: &mut dyn Write) -> Result<(), Failure> {
    let (_, lowered) = load(file)?;
    let result = lowered.epi.validate();
    let mut report = Report::new("validate");
    for entry in &result.entries {
        report.rows.push(
            ReportRow::new()
                .push("check", &entry.check)
                .push("passed", entry.passed)
                .push("detail", &entry.detail),
        );
    }
    emit(out, &report, machine)?;
    if result.passed() {
        Ok(())
    } else {
        let first = result.first_failure().expect("some entry failed");
        Err(fail(
            EXIT_VALIDATION,
            format!("validation failed: {}: {}", first.check, first.detail),
        ))
    }
}

fn catalog_command(which: &CatalogCommand, out: &mut dyn Write) -> Result<(), Failure> {
    let cap = group_cap()?;
    let (instance, check) = match which {
        CatalogCommand::Fermat { m, k, check } => {
            if let Some(order) = m.checked_pow(*k as u32) {
                if order > cap {
                    return Err(fail(
                        EXIT_VALIDATION,
                        format!("group order {order} exceeds the cap {cap}"),
                    ));
                }
            }
            let instance = fermat_instance(*m, *k).map_err(|e| match e {
                CatalogError::BadParameters { .. } => fail(EXIT_PARSE, e.to_string()),
                CatalogError::Group(_) => fail(EXIT_VALIDATION, e.to_string()),
            })?;
            (instance, *check)
        }
        CatalogCommand::Schottky { check } => (schottky_instance(), *check),
    };
    if check {
        let mut parts = Vec::new();
        for exp in &instance.expected {
            let fix = component_count(&instance.epi, exp.element, &instance.merge, &instance.specs)
                .map_err(|e| fail(EXIT_VALIDATION, format!("{}: {e}", exp.label)))?;
            if fix.count != exp.count {
                return Err(fail(
                    EXIT_VALIDATION,
                    format!(
                        "{}: computed {} but the catalog expects {}",
                        exp.label, fix.count, exp.count
                    ),
                ));
            }
            parts.push(format!("{}: {}", exp.label, fix.count));
        }
        writeln!(out, "{}", parts.join(", "))
            .map_err(|e| fail(EXIT_VALIDATION, format!("write failed: {e}")))?;
    } else {
        let doc = document_from_catalog(&instance);
        out.write_all(render_document(&doc).as_bytes())
            .map_err(|e| fail(EXIT_VALIDATION, format!("write failed: {e}")))?;
    }
    Ok(())
}

/// The document form of a catalog instance: group generators named g1, g2,
/// ... in enumeration-generator order, images as permutation literals.
fn document_from_catalog(instance: &CatalogInstance) -> InstanceDocument {
    let epi = &instance.epi;
    let group = epi.target();
    let group_generators: Vec<(String, _)> = group
        .generators()
        .iter()
        .enumerate()
        .map(|(i, p)| (format!("g{}", i + 1), p.clone()))
        .collect();
    let generator_names = epi.presentation().generator_names().to_vec();
    let images = epi
        .images()
        .iter()
        .map(|&id| ImageValue::Perm(group.perm(id).clone()))
        .collect();
    let ecs = epi
        .ecs()
        .iter()
        .map(|e| {
            let pos = epi
                .images()
                .iter()
                .position(|&img| img == e.image)
                .expect("catalog ecs images are generator images");
            DocEcsEntry {
                index: e.index,
                order: e.order,
                image: generator_names[pos].clone(),
                orientation: e.orientation,
            }
        })
        .collect();
    let signature = epi
        .signature()
        .map(|sig| (sig.orbit_genus(), sig.periods().to_vec()));
    InstanceDocument {
        degree: group.degree(),
        group_generators,
        generator_names: generator_names.clone(),
        relators: epi.presentation().relators().to_vec(),
        images,
        signature,
        ecs,
        normalizer_images: instance.specs.clone(),
        merge: Vec::new(),
        reflections: Vec::new(),
    }
}
