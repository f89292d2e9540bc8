//! The instance document: a line-oriented, diff-able text container for
//! one counting problem, and its lowering to validated library data.
//!
//! Layout, in canonical section order (later sections are optional):
//!
//! ```text
//! [group]
//! degree = 6
//! g1 = (1 2)            # 1-based disjoint cycles; identity is ()
//!
//! [generators]
//! k1                    # source-presentation generator names, one per line
//!
//! [relators]
//! k1^2                  # words over the presentation generators
//!
//! [images]
//! k1 = g1               # value: word over the group generators, or cycles
//!
//! [signature]
//! genus = 0
//! periods = 2 2 4 4
//!
//! [ecs]
//! 1 = 2 k1 +            # index = order image-name, optional +|- for the
//!                       # preserving/reversing orientation mark
//!
//! [normalizer_images]
//! 1 2 = 4               # index divisor = integer value
//! 2 2 = k1, k2          # ... or comma-separated presentation words
//!
//! [merge]
//! element = g1          # blocks below attach to the latest element
//! block = 1 2 : note
//! block = 3
//!
//! [reflections]
//! class = g1 ; k1, k2   # class image ; centralizer-image words
//! ```
//!
//! `#` starts a comment, blank lines are ignored, whitespace around
//! tokens is insignificant. Image values that parse as disjoint cycles
//! are permutations; anything else is read as a word over the group
//! generator names.

use crate::wordtext::{parse_word, render_word, WordParseError};
use fixlocus_core::{
    CountError, EcsEntry, ElementId, EpimorphismInstance, FiniteGroup, FuchsianSignature,
    GroupError, InstanceKind, MergeBlock, MergeEntry, MergeSpec, NormalizerImageSource,
    NormalizerImageSpec, Orientation, Permutation, Presentation, ReflectionClassData, Word,
    WordError,
};
use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ImageValue {
    Perm(Permutation),
    GroupWord(Word),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocEcsEntry {
    pub index: usize,
    pub order: usize,
    pub image: String,
    pub orientation: Orientation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocMergeEntry {
    pub element: ImageValue,
    /// (1-based ecs labels, optional note)
    pub blocks: Vec<(Vec<usize>, Option<String>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DocReflectionClass {
    pub image: ImageValue,
    pub words: Vec<Word>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceDocument {
    pub degree: usize,
    pub group_generators: Vec<(String, Permutation)>,
    pub generator_names: Vec<String>,
    pub relators: Vec<Word>,
    /// Aligned with `generator_names`.
    pub images: Vec<ImageValue>,
    pub signature: Option<(usize, Vec<usize>)>,
    pub ecs: Vec<DocEcsEntry>,
    pub normalizer_images: Vec<NormalizerImageSpec>,
    pub merge: Vec<DocMergeEntry>,
    pub reflections: Vec<DocReflectionClass>,
}

/// Parse-stage failures carry a line; structure-stage failures carry the
/// section that is malformed or missing. The distinction drives the CLI
/// exit code: syntax is a parse failure, structure is a validation one.
#[derive(Clone, Debug)]
pub enum DocumentError {
    Syntax { line: usize, message: String },
    Structure { section: String, message: String },
}

impl fmt::Display for DocumentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DocumentError::Syntax { line, message } => write!(f, "line {line}: {message}"),
            DocumentError::Structure { section, message } => {
                write!(f, "section [{section}]: {message}")
            }
        }
    }
}

impl std::error::Error for DocumentError {}

fn syntax(line: usize, message: impl Into<String>) -> DocumentError {
    DocumentError::Syntax {
        line,
        message: message.into(),
    }
}

fn structure(section: &str, message: impl Into<String>) -> DocumentError {
    DocumentError::Structure {
        section: section.to_string(),
        message: message.into(),
    }
}

fn word_error(line: usize, e: WordParseError) -> DocumentError {
    let message = match e {
        WordParseError::Syntax {
            column, message, ..
        } => format!("column {column}: {message}"),
        WordParseError::UnknownGenerator { column, name, .. } => {
            format!("column {column}: unknown generator `{name}`")
        }
    };
    syntax(line, message)
}

/// 1-based disjoint-cycle text for a permutation of the given degree.
pub fn render_permutation(p: &Permutation) -> String {
    let cycles = p.cycles();
    if cycles.is_empty() {
        return "()".to_string();
    }
    cycles
        .iter()
        .map(|c| {
            let pts: Vec<String> = c.iter().map(|x| (x + 1).to_string()).collect();
            format!("({})", pts.join(" "))
        })
        .collect()
}

/// Strict parse of 1-based disjoint cycles: only digits, spaces, and
/// parentheses may appear. `()` is the identity.
pub fn parse_permutation(text: &str, degree: usize) -> Result<Permutation, String> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err("empty permutation".to_string());
    }
    if !trimmed
        .chars()
        .all(|c| c.is_ascii_digit() || c.is_whitespace() || c == '(' || c == ')')
    {
        return Err("permutations contain only digits, spaces, and parentheses".to_string());
    }
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut rest = trimmed;
    while !rest.is_empty() {
        rest = rest.trim_start();
        if rest.is_empty() {
            break;
        }
        let Some(stripped) = rest.strip_prefix('(') else {
            return Err("expected `(`".to_string());
        };
        let Some(close) = stripped.find(')') else {
            return Err("unclosed cycle".to_string());
        };
        let body = &stripped[..close];
        if body.contains('(') {
            return Err("nested `(` inside a cycle".to_string());
        }
        let mut cycle = Vec::new();
        for part in body.split_whitespace() {
            let pt: usize = part
                .parse()
                .map_err(|_| format!("malformed point `{part}`"))?;
            if pt == 0 || pt > degree {
                return Err(format!("point {pt} outside 1..={degree}"));
            }
            cycle.push(pt - 1);
        }
        if !cycle.is_empty() {
            cycles.push(cycle);
        }
        rest = &stripped[close + 1..];
    }
    Permutation::from_cycles(degree, &cycles).map_err(|e| e.to_string())
}

fn parse_image_value(
    text: &str,
    line: usize,
    degree: usize,
    group_names: &[String],
) -> Result<ImageValue, DocumentError> {
    match parse_permutation(text, degree) {
        Ok(p) => Ok(ImageValue::Perm(p)),
        Err(perm_err) => match parse_word(text, group_names) {
            Ok(w) => Ok(ImageValue::GroupWord(w)),
            Err(word_err) => {
                // A value full of digits and parens was meant as a
                // permutation; report that failure, not the word one.
                if text.trim().starts_with('(')
                    && !text.contains(|c: char| c.is_alphabetic() || c == '_')
                {
                    Err(syntax(line, format!("malformed permutation: {perm_err}")))
                } else {
                    Err(word_error(line, word_err))
                }
            }
        },
    }
}

fn render_image_value(v: &ImageValue, group_names: &[String]) -> String {
    match v {
        ImageValue::Perm(p) => render_permutation(p),
        ImageValue::GroupWord(w) => render_word(w, group_names),
    }
}

const SECTION_ORDER: [&str; 9] = [
    "group",
    "generators",
    "relators",
    "images",
    "signature",
    "ecs",
    "normalizer_images",
    "merge",
    "reflections",
];

/// One content line inside a section.
struct Line<'a> {
    number: usize,
    text: &'a str,
}

fn split_sections(text: &str) -> Result<Vec<(String, Vec<Line<'_>>)>, DocumentError> {
    let mut sections: Vec<(String, Vec<Line>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = header_name(content) {
            if !SECTION_ORDER.contains(&name) {
                return Err(syntax(number, format!("unknown section `[{name}]`")));
            }
            if sections.iter().any(|(n, _)| n == name) {
                return Err(syntax(number, format!("duplicate section `[{name}]`")));
            }
            sections.push((name.to_string(), Vec::new()));
        } else {
            match sections.last_mut() {
                Some((_, lines)) => lines.push(Line {
                    number,
                    text: content,
                }),
                None if content.starts_with('[') => {
                    return Err(syntax(number, "malformed section header"))
                }
                None => return Err(syntax(number, "content before the first section header")),
            }
        }
    }
    Ok(sections)
}

/// A line is a section header only when it is exactly `[ident]`. Bracketed
/// commutator words always contain a comma or operators, so relator lines
/// starting with `[` stay section content.
fn header_name(content: &str) -> Option<&str> {
    let inner = content.strip_prefix('[')?.strip_suffix(']')?.trim();
    let mut chars = inner.chars();
    let first = chars.next()?;
    if !(first.is_ascii_alphabetic() || first == '_') {
        return None;
    }
    chars
        .all(|c| c.is_ascii_alphanumeric() || c == '_')
        .then_some(inner)
}

fn key_value<'a>(line: &Line<'a>) -> Result<(&'a str, &'a str), DocumentError> {
    match line.text.split_once('=') {
        Some((k, v)) => Ok((k.trim(), v.trim())),
        None => Err(syntax(line.number, "expected `key = value`")),
    }
}

pub fn parse_document(text: &str) -> Result<InstanceDocument, DocumentError> {
    let sections = split_sections(text)?;
    let get = |name: &str| sections.iter().find(|(n, _)| n == name).map(|(_, l)| l);

    // [group]
    let group_lines = get("group").ok_or_else(|| structure("group", "section missing"))?;
    let mut degree: Option<usize> = None;
    let mut group_generators: Vec<(String, Permutation)> = Vec::new();
    for line in group_lines {
        let (key, value) = key_value(line)?;
        if key == "degree" {
            if degree.is_some() {
                return Err(syntax(line.number, "duplicate `degree`"));
            }
            let d: usize = value
                .parse()
                .map_err(|_| syntax(line.number, format!("malformed degree `{value}`")))?;
            if d == 0 {
                return Err(syntax(line.number, "degree must be at least 1"));
            }
            degree = Some(d);
        } else {
            let d = degree
                .ok_or_else(|| syntax(line.number, "`degree` must come before generators"))?;
            if !is_ident(key) {
                return Err(syntax(line.number, format!("bad generator name `{key}`")));
            }
            if group_generators.iter().any(|(n, _)| n == key) {
                return Err(syntax(
                    line.number,
                    format!("duplicate group generator `{key}`"),
                ));
            }
            let p = parse_permutation(value, d)
                .map_err(|e| syntax(line.number, format!("malformed permutation: {e}")))?;
            group_generators.push((key.to_string(), p));
        }
    }
    let degree = degree.ok_or_else(|| structure("group", "missing `degree`"))?;
    if group_generators.is_empty() {
        return Err(structure("group", "no group generators"));
    }
    let group_names: Vec<String> = group_generators.iter().map(|(n, _)| n.clone()).collect();

    // [generators]
    let gen_lines = get("generators").ok_or_else(|| structure("generators", "section missing"))?;
    let mut generator_names = Vec::new();
    for line in gen_lines {
        for name in line.text.split_whitespace() {
            if !is_ident(name) {
                return Err(syntax(line.number, format!("bad generator name `{name}`")));
            }
            generator_names.push(name.to_string());
        }
    }
    if generator_names.is_empty() {
        return Err(structure("generators", "no presentation generators"));
    }

    // [relators]
    let mut relators = Vec::new();
    if let Some(lines) = get("relators") {
        for line in lines {
            relators.push(
                parse_word(line.text, &generator_names).map_err(|e| word_error(line.number, e))?,
            );
        }
    }

    // [images]
    let image_lines = get("images").ok_or_else(|| structure("images", "section missing"))?;
    let mut images: Vec<Option<ImageValue>> = vec![None; generator_names.len()];
    for line in image_lines {
        let (key, value) = key_value(line)?;
        let Some(pos) = generator_names.iter().position(|n| n == key) else {
            return Err(syntax(
                line.number,
                format!("`{key}` is not a presentation generator"),
            ));
        };
        if images[pos].is_some() {
            return Err(syntax(line.number, format!("duplicate image for `{key}`")));
        }
        images[pos] = Some(parse_image_value(value, line.number, degree, &group_names)?);
    }
    let images: Vec<ImageValue> = {
        let mut out = Vec::new();
        for (i, slot) in images.into_iter().enumerate() {
            match slot {
                Some(v) => out.push(v),
                None => {
                    return Err(structure(
                        "images",
                        format!("no image for `{}`", generator_names[i]),
                    ))
                }
            }
        }
        out
    };

    // [signature]
    let mut signature = None;
    if let Some(lines) = get("signature") {
        let mut genus: Option<usize> = None;
        let mut periods: Option<Vec<usize>> = None;
        for line in lines {
            let (key, value) = key_value(line)?;
            match key {
                "genus" => {
                    genus =
                        Some(value.parse().map_err(|_| {
                            syntax(line.number, format!("malformed genus `{value}`"))
                        })?)
                }
                "periods" => {
                    let mut ps = Vec::new();
                    for part in value.split_whitespace() {
                        ps.push(part.parse().map_err(|_| {
                            syntax(line.number, format!("malformed period `{part}`"))
                        })?);
                    }
                    periods = Some(ps);
                }
                other => {
                    return Err(syntax(
                        line.number,
                        format!("unknown signature key `{other}`"),
                    ))
                }
            }
        }
        let genus = genus.ok_or_else(|| structure("signature", "missing `genus`"))?;
        let periods = periods.ok_or_else(|| structure("signature", "missing `periods`"))?;
        signature = Some((genus, periods));
    }

    // [ecs]
    let mut ecs = Vec::new();
    if let Some(lines) = get("ecs") {
        for line in lines {
            let (key, value) = key_value(line)?;
            let index: usize = key
                .parse()
                .map_err(|_| syntax(line.number, format!("malformed ecs label `{key}`")))?;
            let parts: Vec<&str> = value.split_whitespace().collect();
            if parts.len() < 2 || parts.len() > 3 {
                return Err(syntax(
                    line.number,
                    "expected `<label> = <order> <image-name> [+|-]`",
                ));
            }
            let order: usize = parts[0]
                .parse()
                .map_err(|_| syntax(line.number, format!("malformed order `{}`", parts[0])))?;
            let image = parts[1].to_string();
            if !generator_names.contains(&image) {
                return Err(syntax(
                    line.number,
                    format!("`{image}` is not a presentation generator"),
                ));
            }
            let orientation = match parts.get(2) {
                None => Orientation::Unspecified,
                Some(&"+") => Orientation::Preserving,
                Some(&"-") => Orientation::Reversing,
                Some(other) => {
                    return Err(syntax(
                        line.number,
                        format!("orientation mark must be `+` or `-`, got `{other}`"),
                    ))
                }
            };
            ecs.push(DocEcsEntry {
                index,
                order,
                image,
                orientation,
            });
        }
    }

    // [normalizer_images]
    let mut normalizer_images = Vec::new();
    if let Some(lines) = get("normalizer_images") {
        for line in lines {
            let (key, value) = key_value(line)?;
            let parts: Vec<&str> = key.split_whitespace().collect();
            if parts.len() != 2 {
                return Err(syntax(line.number, "expected `<label> <divisor> = ...`"));
            }
            let ecs_index: usize = parts[0]
                .parse()
                .map_err(|_| syntax(line.number, format!("malformed label `{}`", parts[0])))?;
            let power_divisor: usize = parts[1]
                .parse()
                .map_err(|_| syntax(line.number, format!("malformed divisor `{}`", parts[1])))?;
            let source = if let Ok(v) = value.parse::<usize>() {
                NormalizerImageSource::Value(v)
            } else {
                let mut words = Vec::new();
                for piece in value.split(',') {
                    words.push(
                        parse_word(piece, &generator_names)
                            .map_err(|e| word_error(line.number, e))?,
                    );
                }
                NormalizerImageSource::GeneratorWords(words)
            };
            normalizer_images.push(NormalizerImageSpec {
                ecs_index,
                power_divisor,
                source,
            });
        }
    }

    // [merge]
    let mut merge: Vec<DocMergeEntry> = Vec::new();
    if let Some(lines) = get("merge") {
        for line in lines {
            let (key, value) = key_value(line)?;
            match key {
                "element" => merge.push(DocMergeEntry {
                    element: parse_image_value(value, line.number, degree, &group_names)?,
                    blocks: Vec::new(),
                }),
                "block" => {
                    let entry = merge
                        .last_mut()
                        .ok_or_else(|| syntax(line.number, "`block` before any `element`"))?;
                    let (indices_text, note) = match value.split_once(':') {
                        Some((i, n)) => (i, Some(n.trim().to_string())),
                        None => (value, None),
                    };
                    let mut indices = Vec::new();
                    for part in indices_text.split_whitespace() {
                        indices.push(part.parse::<usize>().map_err(|_| {
                            syntax(line.number, format!("malformed ecs label `{part}`"))
                        })?);
                    }
                    if indices.is_empty() {
                        return Err(syntax(line.number, "empty merge block"));
                    }
                    entry.blocks.push((indices, note));
                }
                other => return Err(syntax(line.number, format!("unknown merge key `{other}`"))),
            }
        }
    }

    // [reflections]
    let mut reflections = Vec::new();
    if let Some(lines) = get("reflections") {
        for line in lines {
            let (key, value) = key_value(line)?;
            if key != "class" {
                return Err(syntax(
                    line.number,
                    format!("unknown reflections key `{key}`"),
                ));
            }
            let (image_text, words_text) = match value.split_once(';') {
                Some((i, w)) => (i.trim(), w.trim()),
                None => {
                    return Err(syntax(
                        line.number,
                        "expected `class = <image> ; <word list>`",
                    ))
                }
            };
            let image = parse_image_value(image_text, line.number, degree, &group_names)?;
            let mut words = Vec::new();
            if !words_text.is_empty() {
                for piece in words_text.split(',') {
                    words.push(
                        parse_word(piece, &generator_names)
                            .map_err(|e| word_error(line.number, e))?,
                    );
                }
            }
            reflections.push(DocReflectionClass { image, words });
        }
    }

    Ok(InstanceDocument {
        degree,
        group_generators,
        generator_names,
        relators,
        images,
        signature,
        ecs,
        normalizer_images,
        merge,
        reflections,
    })
}

fn is_ident(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_alphanumeric() || c == '_')
}

pub fn render_document(doc: &InstanceDocument) -> String {
    let group_names: Vec<String> = doc
        .group_generators
        .iter()
        .map(|(n, _)| n.clone())
        .collect();
    let mut s = String::new();
    s.push_str("[group]\n");
    s.push_str(&format!("degree = {}\n", doc.degree));
    for (name, p) in &doc.group_generators {
        s.push_str(&format!("{name} = {}\n", render_permutation(p)));
    }
    s.push_str("\n[generators]\n");
    for name in &doc.generator_names {
        s.push_str(name);
        s.push('\n');
    }
    if !doc.relators.is_empty() {
        s.push_str("\n[relators]\n");
        for r in &doc.relators {
            s.push_str(&render_word(r, &doc.generator_names));
            s.push('\n');
        }
    }
    s.push_str("\n[images]\n");
    for (name, v) in doc.generator_names.iter().zip(&doc.images) {
        s.push_str(&format!(
            "{name} = {}\n",
            render_image_value(v, &group_names)
        ));
    }
    if let Some((genus, periods)) = &doc.signature {
        s.push_str("\n[signature]\n");
        s.push_str(&format!("genus = {genus}\n"));
        let ps: Vec<String> = periods.iter().map(|p| p.to_string()).collect();
        s.push_str(&format!("periods = {}\n", ps.join(" ")));
    }
    if !doc.ecs.is_empty() {
        s.push_str("\n[ecs]\n");
        for e in &doc.ecs {
            let mark = match e.orientation {
                Orientation::Preserving => " +",
                Orientation::Reversing => " -",
                Orientation::Unspecified => "",
            };
            s.push_str(&format!("{} = {} {}{mark}\n", e.index, e.order, e.image));
        }
    }
    if !doc.normalizer_images.is_empty() {
        s.push_str("\n[normalizer_images]\n");
        for spec in &doc.normalizer_images {
            let value = match &spec.source {
                NormalizerImageSource::Value(v) => v.to_string(),
                NormalizerImageSource::GeneratorWords(words) => words
                    .iter()
                    .map(|w| render_word(w, &doc.generator_names))
                    .collect::<Vec<_>>()
                    .join(", "),
            };
            s.push_str(&format!(
                "{} {} = {value}\n",
                spec.ecs_index, spec.power_divisor
            ));
        }
    }
    if !doc.merge.is_empty() {
        s.push_str("\n[merge]\n");
        for entry in &doc.merge {
            s.push_str(&format!(
                "element = {}\n",
                render_image_value(&entry.element, &group_names)
            ));
            for (indices, note) in &entry.blocks {
                let idx: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
                match note {
                    Some(n) => s.push_str(&format!("block = {} : {n}\n", idx.join(" "))),
                    None => s.push_str(&format!("block = {}\n", idx.join(" "))),
                }
            }
        }
    }
    if !doc.reflections.is_empty() {
        s.push_str("\n[reflections]\n");
        for class in &doc.reflections {
            let words: Vec<String> = class
                .words
                .iter()
                .map(|w| render_word(w, &doc.generator_names))
                .collect();
            s.push_str(&format!(
                "class = {} ; {}\n",
                render_image_value(&class.image, &group_names),
                words.join(", ")
            ));
        }
    }
    s
}

/// Everything the commands need, produced from one document.
pub struct Lowered {
    pub epi: EpimorphismInstance,
    pub specs: Vec<NormalizerImageSpec>,
    pub merge: MergeSpec,
    pub reflections: Vec<ReflectionClassData>,
}

#[derive(Debug)]
pub enum LowerError {
    Group(GroupError),
    Word(WordError),
    Count(CountError),
    Structure { section: String, message: String },
}

impl fmt::Display for LowerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LowerError::Group(e) => write!(f, "{e}"),
            LowerError::Word(e) => write!(f, "{e}"),
            LowerError::Count(e) => write!(f, "{e}"),
            LowerError::Structure { section, message } => {
                write!(f, "section [{section}]: {message}")
            }
        }
    }
}

impl std::error::Error for LowerError {}

impl From<GroupError> for LowerError {
    fn from(e: GroupError) -> Self {
        LowerError::Group(e)
    }
}
impl From<WordError> for LowerError {
    fn from(e: WordError) -> Self {
        LowerError::Word(e)
    }
}
impl From<CountError> for LowerError {
    fn from(e: CountError) -> Self {
        LowerError::Count(e)
    }
}

fn resolve_element(
    group: &FiniteGroup,
    generator_ids: &[ElementId],
    value: &ImageValue,
    section: &str,
) -> Result<ElementId, LowerError> {
    match value {
        ImageValue::Perm(p) => group.id_of(p).ok_or_else(|| LowerError::Structure {
            section: section.to_string(),
            message: format!(
                "permutation {} is not in the generated group",
                render_permutation(p)
            ),
        }),
        ImageValue::GroupWord(w) => {
            let mut acc = group.identity();
            for &(g, e) in w.letters() {
                acc = group.compose(acc, group.power(generator_ids[g], e));
            }
            Ok(acc)
        }
    }
}

pub fn lower(doc: &InstanceDocument, cap: usize) -> Result<Lowered, LowerError> {
    let perms: Vec<Permutation> = doc
        .group_generators
        .iter()
        .map(|(_, p)| p.clone())
        .collect();
    let group = FiniteGroup::enumerate_capped(doc.degree, perms, cap)?;
    let generator_ids: Vec<ElementId> = doc
        .group_generators
        .iter()
        .map(|(_, p)| group.id_of(p).expect("generators are always members"))
        .collect();

    let presentation = Presentation::new(doc.generator_names.clone(), doc.relators.clone())?;
    let mut images = Vec::new();
    for v in &doc.images {
        images.push(resolve_element(&group, &generator_ids, v, "images")?);
    }

    let mut ecs = Vec::new();
    for entry in &doc.ecs {
        let pos = doc
            .generator_names
            .iter()
            .position(|n| *n == entry.image)
            .expect("ecs image names are checked at parse time");
        ecs.push(EcsEntry {
            index: entry.index,
            order: entry.order,
            image: images[pos],
            orientation: entry.orientation,
        });
    }

    let kind = match &doc.signature {
        Some((genus, periods)) => {
            InstanceKind::FuchsianSignature(FuchsianSignature::new(*genus, periods.clone())?)
        }
        None => InstanceKind::General,
    };

    let epi = EpimorphismInstance::new(presentation, group.clone(), images, ecs, kind)?;

    let merge = if doc.merge.is_empty() {
        MergeSpec::discrete()
    } else {
        let mut entries = Vec::new();
        for entry in &doc.merge {
            let element = resolve_element(&group, &generator_ids, &entry.element, "merge")?;
            let mut blocks = Vec::new();
            for (indices, note) in &entry.blocks {
                blocks.push(MergeBlock::new(indices.clone(), note.clone())?);
            }
            entries.push(MergeEntry { element, blocks });
        }
        MergeSpec::new(entries)?
    };

    let mut reflections = Vec::new();
    for class in &doc.reflections {
        reflections.push(ReflectionClassData {
            reflection_image: resolve_element(&group, &generator_ids, &class.image, "reflections")?,
            centralizer_image_generators: class.words.clone(),
        });
    }

    Ok(Lowered {
        epi,
        specs: doc.normalizer_images.clone(),
        merge,
        reflections,
    })
}
