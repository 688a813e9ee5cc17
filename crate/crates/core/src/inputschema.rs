//! Embedded input schemas: a small pattern language compiled from the
//! schema fragments inside `<input>` elements, plus validation of
//! documentation record fragments against compiled patterns.
//!
//! The supported subset:
//!
//! * `element` — named, containing attributes plus one content form
//! * `attribute` — named, content `text` or `data`
//! * `text` — arbitrary text content
//! * `data` — datatype `string` (params `minLength`/`maxLength`),
//!   `integer` or `date` (params `minInclusive`/`maxInclusive`)
//! * `choice`, `optional`, `oneOrMore`, `zeroOrMore` over element particles
//! * literal element text (`<element name="yes">Yes</element>`), modeled
//!   as [`PatternNode::Literal`]
//!
//! A run of sibling elements whose whole content is a literal is matched
//! as an exclusive choice: the record carries exactly one of them, with
//! exactly that text. This is what makes a yes/no selector checkable.
//!
//! Everything else RELAX NG offers (interleave, grammar/ref, name classes,
//! list, mixed) is out of the subset and reported as unsupported.

use chrono::NaiveDate;

use crate::diag::{Code, Diagnostic, ValidationReport};
use crate::path::sibling_path;

/// RELAX NG structure namespace expected on input bodies.
pub const RNG_NS: &str = "http://relaxng.org/ns/structure/1.0";

/// A compiled pattern.
///
/// Compiled element children are normalized to attribute patterns first,
/// content second; hand-built trees must follow the same order for
/// canonical-form round-trips to hold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PatternNode {
    Element {
        name: String,
        children: Vec<PatternNode>,
    },
    Attribute {
        name: String,
        content: Box<PatternNode>,
    },
    Text,
    Data(Datatype),
    Choice {
        alternatives: Vec<PatternNode>,
    },
    Optional {
        inner: Box<PatternNode>,
    },
    OneOrMore {
        inner: Box<PatternNode>,
    },
    ZeroOrMore {
        inner: Box<PatternNode>,
    },
    /// Fixed element text content.
    Literal {
        text: String,
    },
}

/// Datatype with its permitted parameters baked in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Datatype {
    Str {
        min_length: Option<usize>,
        max_length: Option<usize>,
    },
    Int {
        min_inclusive: Option<i64>,
        max_inclusive: Option<i64>,
    },
    Date {
        min_inclusive: Option<NaiveDate>,
        max_inclusive: Option<NaiveDate>,
    },
}

/// Compile a standalone XML fragment into a pattern.
pub fn compile_pattern(xml: &str) -> Result<PatternNode, Diagnostic> {
    let opts = roxmltree::ParsingOptions {
        allow_dtd: false,
        ..Default::default()
    };
    let doc = roxmltree::Document::parse_with_options(xml, opts)
        .map_err(|e| Diagnostic::new(Code::XmlMalformed, "/", format!("not well-formed XML: {e}")))?;
    compile_node(doc.root_element(), "")
}

/// Compile one schema element. `parent` is the pattern-local path used in
/// diagnostics.
pub(crate) fn compile_node(
    node: roxmltree::Node<'_, '_>,
    parent: &str,
) -> Result<PatternNode, Diagnostic> {
    let name = node.tag_name().name();
    let path = format!("{parent}/{name}");
    if let Some(ns) = node.tag_name().namespace() {
        if ns != RNG_NS {
            return Err(Diagnostic::new(
                Code::PatternUnsupported,
                path,
                format!("foreign namespace {ns:?}"),
            ));
        }
    }
    match name {
        "element" => compile_element(node, &path),
        "attribute" => compile_attribute(node, &path),
        "text" => Ok(PatternNode::Text),
        "data" => compile_data(node, &path),
        "value" => Ok(PatternNode::Literal {
            text: text_content(node),
        }),
        "choice" => {
            let alternatives = compile_children(node, &path)?;
            if alternatives.is_empty() {
                return Err(Diagnostic::new(Code::PatternUnsupported, path, "empty choice"));
            }
            Ok(PatternNode::Choice { alternatives })
        }
        "optional" | "oneOrMore" | "zeroOrMore" => {
            let mut inner = compile_children(node, &path)?;
            if inner.len() != 1 {
                return Err(Diagnostic::new(
                    Code::PatternUnsupported,
                    path,
                    format!("{name} must wrap exactly one pattern"),
                ));
            }
            let inner = Box::new(inner.pop().unwrap());
            if name != "optional" && !is_productive(&inner) {
                return Err(Diagnostic::new(
                    Code::PatternUnsupported,
                    path,
                    format!("{name} over a possibly-empty pattern"),
                ));
            }
            Ok(match name {
                "optional" => PatternNode::Optional { inner },
                "oneOrMore" => PatternNode::OneOrMore { inner },
                _ => PatternNode::ZeroOrMore { inner },
            })
        }
        other => Err(Diagnostic::new(
            Code::PatternUnsupported,
            path,
            format!("construct <{other}> is outside the supported subset"),
        )),
    }
}

fn is_productive(p: &PatternNode) -> bool {
    !matches!(p, PatternNode::Optional { .. } | PatternNode::ZeroOrMore { .. })
}

fn text_content(node: roxmltree::Node<'_, '_>) -> String {
    let mut out = String::new();
    for child in node.children() {
        if let Some(t) = child.text() {
            out.push_str(t);
        }
    }
    out.trim().to_string()
}

fn compile_children(
    node: roxmltree::Node<'_, '_>,
    path: &str,
) -> Result<Vec<PatternNode>, Diagnostic> {
    let mut out = Vec::new();
    for child in node.children() {
        if child.is_element() {
            out.push(compile_node(child, path)?);
        }
    }
    Ok(out)
}

fn compile_element(node: roxmltree::Node<'_, '_>, path: &str) -> Result<PatternNode, Diagnostic> {
    let name = node
        .attribute("name")
        .ok_or_else(|| {
            Diagnostic::new(
                Code::PatternUnsupported,
                path,
                "element without a name attribute (name classes are unsupported)",
            )
        })?
        .to_string();
    let mut children = compile_children(node, path)?;
    let literal = text_content(node);
    if !literal.is_empty() {
        if !children.is_empty() {
            return Err(Diagnostic::new(
                Code::PatternUnsupported,
                path,
                "mixed literal text and child patterns",
            ));
        }
        children.push(PatternNode::Literal { text: literal });
    }
    // normalize: attributes first, content after
    let (attrs, content): (Vec<_>, Vec<_>) = children.into_iter().partition(is_attr_particle);
    check_content_shape(&content, path)?;
    let mut normalized = attrs;
    normalized.extend(content);
    Ok(PatternNode::Element {
        name,
        children: normalized,
    })
}

fn is_attr_particle(p: &PatternNode) -> bool {
    match p {
        PatternNode::Attribute { .. } => true,
        PatternNode::Optional { inner } => matches!(**inner, PatternNode::Attribute { .. }),
        _ => false,
    }
}

/// Content is either one textual pattern or a sequence of element
/// particles; mixing the two is out of the subset.
fn check_content_shape(content: &[PatternNode], path: &str) -> Result<(), Diagnostic> {
    let textual = content.iter().filter(|p| is_textual(p)).count();
    if textual > 0 && content.len() > 1 {
        return Err(Diagnostic::new(
            Code::PatternUnsupported,
            path,
            "mixed content is outside the supported subset",
        ));
    }
    for p in content {
        if !is_textual(p) {
            check_element_particle(p, path)?;
        }
    }
    Ok(())
}

fn is_textual(p: &PatternNode) -> bool {
    matches!(
        p,
        PatternNode::Text | PatternNode::Data(_) | PatternNode::Literal { .. }
    )
}

fn check_element_particle(p: &PatternNode, path: &str) -> Result<(), Diagnostic> {
    match p {
        PatternNode::Element { .. } => Ok(()),
        PatternNode::Optional { inner }
        | PatternNode::OneOrMore { inner }
        | PatternNode::ZeroOrMore { inner } => check_element_particle(inner, path),
        PatternNode::Choice { alternatives } => {
            for alt in alternatives {
                check_element_particle(alt, path)?;
            }
            Ok(())
        }
        other => Err(Diagnostic::new(
            Code::PatternUnsupported,
            path,
            format!("{} is not allowed in element content here", kind_name(other)),
        )),
    }
}

fn kind_name(p: &PatternNode) -> &'static str {
    match p {
        PatternNode::Element { .. } => "element",
        PatternNode::Attribute { .. } => "attribute",
        PatternNode::Text => "text",
        PatternNode::Data(_) => "data",
        PatternNode::Choice { .. } => "choice",
        PatternNode::Optional { .. } => "optional",
        PatternNode::OneOrMore { .. } => "oneOrMore",
        PatternNode::ZeroOrMore { .. } => "zeroOrMore",
        PatternNode::Literal { .. } => "literal text",
    }
}

fn compile_data(node: roxmltree::Node<'_, '_>, path: &str) -> Result<PatternNode, Diagnostic> {
    let dt = node.attribute("type").unwrap_or("string");
    let mut min_length = None;
    let mut max_length = None;
    let mut min_inclusive = None;
    let mut max_inclusive = None;
    for child in node.children().filter(|c| c.is_element()) {
        if child.tag_name().name() != "param" {
            return Err(Diagnostic::new(
                Code::PatternUnsupported,
                path,
                format!("unexpected <{}> inside data", child.tag_name().name()),
            ));
        }
        let pname = child.attribute("name").unwrap_or_default().to_string();
        let value = text_content(child);
        let param_err = |msg: String| Diagnostic::new(Code::PatternParam, format!("{path}/param"), msg);
        match (dt, pname.as_str()) {
            ("string", "minLength") => {
                min_length = Some(value.parse::<usize>().map_err(|_| {
                    param_err(format!("minLength value {value:?} is not a non-negative integer"))
                })?)
            }
            ("string", "maxLength") => {
                max_length = Some(value.parse::<usize>().map_err(|_| {
                    param_err(format!("maxLength value {value:?} is not a non-negative integer"))
                })?)
            }
            ("integer", "minInclusive") => {
                min_inclusive = Some(value.parse::<i64>().map_err(|_| {
                    param_err(format!("minInclusive value {value:?} is not an integer"))
                })?)
            }
            ("integer", "maxInclusive") => {
                max_inclusive = Some(value.parse::<i64>().map_err(|_| {
                    param_err(format!("maxInclusive value {value:?} is not an integer"))
                })?)
            }
            ("date", "minInclusive") | ("date", "maxInclusive") => {
                let d: NaiveDate = value.parse().map_err(|_| {
                    param_err(format!("{pname} value {value:?} is not an ISO 8601 date"))
                })?;
                if pname == "minInclusive" {
                    min_inclusive = Some(d.num_days_from_ce() as i64);
                } else {
                    max_inclusive = Some(d.num_days_from_ce() as i64);
                }
            }
            _ => {
                return Err(param_err(format!(
                    "param {pname:?} is not valid for datatype {dt:?}"
                )))
            }
        }
    }
    let datatype = match dt {
        "string" => Datatype::Str {
            min_length,
            max_length,
        },
        "integer" => Datatype::Int {
            min_inclusive,
            max_inclusive,
        },
        "date" => Datatype::Date {
            min_inclusive: min_inclusive.map(date_from_days),
            max_inclusive: max_inclusive.map(date_from_days),
        },
        other => {
            return Err(Diagnostic::new(
                Code::PatternUnsupported,
                path,
                format!("datatype {other:?} is outside the supported subset"),
            ))
        }
    };
    Ok(PatternNode::Data(datatype))
}

fn date_from_days(days: i64) -> NaiveDate {
    NaiveDate::from_num_days_from_ce_opt(days as i32).expect("date came from a NaiveDate")
}

use chrono::Datelike;

// ---------------------------------------------------------------------------
// canonical XML emission
// ---------------------------------------------------------------------------

/// Render a pattern back to its canonical XML form. Compiling the result
/// yields the same tree.
pub fn pattern_to_xml(pattern: &PatternNode, indent: usize) -> String {
    let mut out = String::new();
    emit(pattern, indent, &mut out);
    out
}

fn pad(out: &mut String, indent: usize) {
    for _ in 0..indent {
        out.push_str("  ");
    }
}

fn emit(p: &PatternNode, indent: usize, out: &mut String) {
    match p {
        PatternNode::Element { name, children } => {
            pad(out, indent);
            if children.is_empty() {
                out.push_str(&format!("<element name=\"{}\"/>\n", esc_attr(name)));
            } else if let [PatternNode::Literal { text }] = children.as_slice() {
                out.push_str(&format!(
                    "<element name=\"{}\">{}</element>\n",
                    esc_attr(name),
                    esc_text(text)
                ));
            } else {
                out.push_str(&format!("<element name=\"{}\">\n", esc_attr(name)));
                for child in children {
                    emit(child, indent + 1, out);
                }
                pad(out, indent);
                out.push_str("</element>\n");
            }
        }
        PatternNode::Attribute { name, content } => {
            pad(out, indent);
            out.push_str(&format!("<attribute name=\"{}\">\n", esc_attr(name)));
            emit(content, indent + 1, out);
            pad(out, indent);
            out.push_str("</attribute>\n");
        }
        PatternNode::Text => {
            pad(out, indent);
            out.push_str("<text/>\n");
        }
        PatternNode::Data(dt) => emit_data(dt, indent, out),
        PatternNode::Choice { alternatives } => {
            emit_wrapper("choice", alternatives, indent, out);
        }
        PatternNode::Optional { inner } => emit_wrapper("optional", std::slice::from_ref(inner), indent, out),
        PatternNode::OneOrMore { inner } => emit_wrapper("oneOrMore", std::slice::from_ref(inner), indent, out),
        PatternNode::ZeroOrMore { inner } => emit_wrapper("zeroOrMore", std::slice::from_ref(inner), indent, out),
        PatternNode::Literal { text } => {
            pad(out, indent);
            out.push_str(&esc_text(text));
            out.push('\n');
        }
    }
}

fn emit_wrapper(name: &str, children: &[impl AsRef<PatternNode>], indent: usize, out: &mut String) {
    pad(out, indent);
    out.push_str(&format!("<{name}>\n"));
    for child in children {
        emit(child.as_ref(), indent + 1, out);
    }
    pad(out, indent);
    out.push_str(&format!("</{name}>\n"));
}

impl AsRef<PatternNode> for PatternNode {
    fn as_ref(&self) -> &PatternNode {
        self
    }
}

fn emit_data(dt: &Datatype, indent: usize, out: &mut String) {
    let (name, params) = match dt {
        Datatype::Str {
            min_length,
            max_length,
        } => (
            "string",
            vec![
                ("minLength", min_length.map(|v| v.to_string())),
                ("maxLength", max_length.map(|v| v.to_string())),
            ],
        ),
        Datatype::Int {
            min_inclusive,
            max_inclusive,
        } => (
            "integer",
            vec![
                ("minInclusive", min_inclusive.map(|v| v.to_string())),
                ("maxInclusive", max_inclusive.map(|v| v.to_string())),
            ],
        ),
        Datatype::Date {
            min_inclusive,
            max_inclusive,
        } => (
            "date",
            vec![
                ("minInclusive", min_inclusive.map(|v| v.to_string())),
                ("maxInclusive", max_inclusive.map(|v| v.to_string())),
            ],
        ),
    };
    let present: Vec<(&str, String)> = params
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v)))
        .collect();
    pad(out, indent);
    if present.is_empty() {
        out.push_str(&format!("<data type=\"{name}\"/>\n"));
    } else {
        out.push_str(&format!("<data type=\"{name}\">\n"));
        for (k, v) in present {
            pad(out, indent + 1);
            out.push_str(&format!("<param name=\"{k}\">{}</param>\n", esc_text(&v)));
        }
        pad(out, indent);
        out.push_str("</data>\n");
    }
}

fn esc_text(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn esc_attr(s: &str) -> String {
    esc_text(s).replace('"', "&quot;")
}

// ---------------------------------------------------------------------------
// record validation
// ---------------------------------------------------------------------------

/// Validate a record fragment against a compiled pattern. The report is
/// empty exactly when the record matches.
pub fn validate_record(pattern: &PatternNode, record_xml: &str) -> ValidationReport {
    let opts = roxmltree::ParsingOptions {
        allow_dtd: false,
        ..Default::default()
    };
    let doc = match roxmltree::Document::parse_with_options(record_xml, opts) {
        Ok(doc) => doc,
        Err(e) => {
            return ValidationReport::new(vec![Diagnostic::new(
                Code::XmlMalformed,
                "/",
                format!("record is not well-formed XML: {e}"),
            )])
        }
    };
    let root = doc.root_element();
    let PatternNode::Element { .. } = pattern else {
        return ValidationReport::new(vec![Diagnostic::new(
            Code::RecElement,
            "/",
            "pattern root is not an element",
        )]);
    };
    let path = format!("/{}", root.tag_name().name());
    let mut diags = Vec::new();
    if element_matches(pattern, root) {
        return ValidationReport::new(diags);
    }
    explain_element(pattern, root, &path, &mut diags);
    if diags.is_empty() {
        diags.push(Diagnostic::new(
            Code::RecElement,
            path,
            "record does not match the pattern",
        ));
    }
    ValidationReport::new(diags)
}

/// Pattern element children split into attribute patterns and content.
struct Parts<'p> {
    attrs: Vec<(&'p str, &'p PatternNode, bool)>,
    content: Vec<&'p PatternNode>,
}

fn split_parts(children: &[PatternNode]) -> Parts<'_> {
    let mut attrs = Vec::new();
    let mut content = Vec::new();
    for child in children {
        match child {
            PatternNode::Attribute { name, content: c } => attrs.push((name.as_str(), c.as_ref(), true)),
            PatternNode::Optional { inner } => {
                if let PatternNode::Attribute { name, content: c } = inner.as_ref() {
                    attrs.push((name.as_str(), c.as_ref(), false));
                } else {
                    content.push(child);
                }
            }
            other => content.push(other),
        }
    }
    Parts { attrs, content }
}

fn data_ok(dt: &Datatype, raw: &str) -> bool {
    let value = raw.trim();
    match dt {
        Datatype::Str {
            min_length,
            max_length,
        } => {
            let n = value.chars().count();
            min_length.map_or(true, |min| n >= min) && max_length.map_or(true, |max| n <= max)
        }
        Datatype::Int {
            min_inclusive,
            max_inclusive,
        } => match value.parse::<i64>() {
            Ok(v) => {
                min_inclusive.map_or(true, |min| v >= min)
                    && max_inclusive.map_or(true, |max| v <= max)
            }
            Err(_) => false,
        },
        Datatype::Date {
            min_inclusive,
            max_inclusive,
        } => match value.parse::<NaiveDate>() {
            Ok(v) => {
                min_inclusive.map_or(true, |min| v >= min)
                    && max_inclusive.map_or(true, |max| v <= max)
            }
            Err(_) => false,
        },
    }
}

fn rec_text(el: roxmltree::Node<'_, '_>) -> String {
    let mut out = String::new();
    for child in el.children() {
        if let Some(t) = child.text() {
            out.push_str(t);
        }
    }
    out
}

fn rec_children<'a, 'input>(el: roxmltree::Node<'a, 'input>) -> Vec<roxmltree::Node<'a, 'input>> {
    el.children().filter(|c| c.is_element()).collect()
}

fn has_stray_text(el: roxmltree::Node<'_, '_>) -> bool {
    el.children()
        .filter_map(|c| c.text())
        .any(|t| !t.trim().is_empty())
}

fn element_matches(pattern: &PatternNode, el: roxmltree::Node<'_, '_>) -> bool {
    let PatternNode::Element { name, children } = pattern else {
        return false;
    };
    if el.tag_name().name() != name.as_str() {
        return false;
    }
    let parts = split_parts(children);
    // attributes: unordered, no extras
    let mut consumed = vec![false; el.attributes().len()];
    for (aname, content, required) in &parts.attrs {
        let found = el
            .attributes()
            .enumerate()
            .find(|(_, a)| a.name() == *aname);
        match found {
            Some((i, a)) => {
                consumed[i] = true;
                match content {
                    PatternNode::Text => {}
                    PatternNode::Data(dt) => {
                        if !data_ok(dt, a.value()) {
                            return false;
                        }
                    }
                    _ => return false,
                }
            }
            None => {
                if *required {
                    return false;
                }
            }
        }
    }
    for (i, _) in el.attributes().enumerate() {
        if !consumed[i] {
            return false;
        }
    }
    content_matches(&parts.content, el)
}

fn content_matches(content: &[&PatternNode], el: roxmltree::Node<'_, '_>) -> bool {
    let children = rec_children(el);
    match content {
        [] => children.is_empty() && !has_stray_text(el),
        [PatternNode::Text] => children.is_empty(),
        [PatternNode::Data(dt)] => children.is_empty() && data_ok(dt, &rec_text(el)),
        [PatternNode::Literal { text }] => {
            children.is_empty() && rec_text(el).trim() == text.as_str()
        }
        particles => {
            if has_stray_text(el) {
                return false;
            }
            let groups = group_particles(particles);
            seq_matches(&groups, &children)
        }
    }
}

/// A content particle prepared for sequence matching.
enum Group<'p> {
    One(&'p PatternNode),
    Optional(&'p PatternNode),
    OneOrMore(&'p PatternNode),
    ZeroOrMore(&'p PatternNode),
    Choice(&'p [PatternNode]),
    /// Run of literal-content elements: exactly one must be present.
    LiteralRun(Vec<&'p PatternNode>),
}

fn is_literal_element(p: &PatternNode) -> bool {
    matches!(p, PatternNode::Element { children, .. }
        if matches!(children.as_slice(), [PatternNode::Literal { .. }]))
}

fn group_particles<'p>(particles: &[&'p PatternNode]) -> Vec<Group<'p>> {
    let mut groups = Vec::new();
    let mut i = 0;
    while i < particles.len() {
        if is_literal_element(particles[i]) {
            let mut run = vec![particles[i]];
            let mut j = i + 1;
            while j < particles.len() && is_literal_element(particles[j]) {
                run.push(particles[j]);
                j += 1;
            }
            if run.len() >= 2 {
                groups.push(Group::LiteralRun(run));
                i = j;
                continue;
            }
        }
        groups.push(match particles[i] {
            PatternNode::Optional { inner } => Group::Optional(inner),
            PatternNode::OneOrMore { inner } => Group::OneOrMore(inner),
            PatternNode::ZeroOrMore { inner } => Group::ZeroOrMore(inner),
            PatternNode::Choice { alternatives } => Group::Choice(alternatives),
            other => Group::One(other),
        });
        i += 1;
    }
    groups
}

fn particle_matches(p: &PatternNode, el: roxmltree::Node<'_, '_>) -> bool {
    match p {
        PatternNode::Element { .. } => element_matches(p, el),
        PatternNode::Choice { alternatives } => alternatives.iter().any(|a| particle_matches(a, el)),
        PatternNode::Optional { inner }
        | PatternNode::OneOrMore { inner }
        | PatternNode::ZeroOrMore { inner } => particle_matches(inner, el),
        _ => false,
    }
}

fn seq_matches(groups: &[Group<'_>], children: &[roxmltree::Node<'_, '_>]) -> bool {
    fn rec(groups: &[Group<'_>], children: &[roxmltree::Node<'_, '_>], gi: usize, ci: usize) -> bool {
        if gi == groups.len() {
            return ci == children.len();
        }
        match &groups[gi] {
            Group::One(p) => {
                ci < children.len()
                    && particle_matches(p, children[ci])
                    && rec(groups, children, gi + 1, ci + 1)
            }
            Group::Optional(p) => {
                rec(groups, children, gi + 1, ci)
                    || (ci < children.len()
                        && particle_matches(p, children[ci])
                        && rec(groups, children, gi + 1, ci + 1))
            }
            Group::ZeroOrMore(p) => {
                let mut k = ci;
                if rec(groups, children, gi + 1, k) {
                    return true;
                }
                while k < children.len() && particle_matches(p, children[k]) {
                    k += 1;
                    if rec(groups, children, gi + 1, k) {
                        return true;
                    }
                }
                false
            }
            Group::OneOrMore(p) => {
                let mut k = ci;
                while k < children.len() && particle_matches(p, children[k]) {
                    k += 1;
                    if rec(groups, children, gi + 1, k) {
                        return true;
                    }
                }
                false
            }
            Group::Choice(alts) => {
                ci < children.len()
                    && alts.iter().any(|a| particle_matches(a, children[ci]))
                    && rec(groups, children, gi + 1, ci + 1)
            }
            Group::LiteralRun(alts) => {
                ci < children.len()
                    && alts.iter().any(|a| element_matches(a, children[ci]))
                    && rec(groups, children, gi + 1, ci + 1)
            }
        }
    }
    rec(groups, children, 0, 0)
}

// ---------------------------------------------------------------------------
// mismatch explanation (runs only when the boolean matcher said no)
// ---------------------------------------------------------------------------

fn explain_element(
    pattern: &PatternNode,
    el: roxmltree::Node<'_, '_>,
    path: &str,
    diags: &mut Vec<Diagnostic>,
) {
    let PatternNode::Element { name, children } = pattern else {
        diags.push(Diagnostic::new(Code::RecElement, path, "expected an element"));
        return;
    };
    if el.tag_name().name() != name.as_str() {
        diags.push(Diagnostic::new(
            Code::RecElement,
            path,
            format!("expected element <{name}>, found <{}>", el.tag_name().name()),
        ));
        return;
    }
    let parts = split_parts(children);
    let mut consumed = vec![false; el.attributes().len()];
    for (aname, content, required) in &parts.attrs {
        match el.attributes().enumerate().find(|(_, a)| a.name() == *aname) {
            Some((i, a)) => {
                consumed[i] = true;
                explain_text_value(content, a.value(), &format!("{path}/@{aname}"), diags);
            }
            None => {
                if *required {
                    diags.push(Diagnostic::new(
                        Code::RecElement,
                        path,
                        format!("missing attribute {aname:?}"),
                    ));
                }
            }
        }
    }
    for (i, a) in el.attributes().enumerate() {
        if !consumed[i] {
            diags.push(Diagnostic::new(
                Code::RecExtra,
                path,
                format!("attribute {:?} is not allowed here", a.name()),
            ));
        }
    }
    explain_content(&parts.content, el, path, diags);
}

fn explain_text_value(pattern: &PatternNode, raw: &str, path: &str, diags: &mut Vec<Diagnostic>) {
    match pattern {
        PatternNode::Text => {}
        PatternNode::Data(dt) => explain_data(dt, raw, path, diags),
        PatternNode::Literal { text } => {
            if raw.trim() != text.as_str() {
                diags.push(Diagnostic::new(
                    Code::RecDatatype,
                    path,
                    format!("expected fixed text {text:?}, found {:?}", raw.trim()),
                ));
            }
        }
        _ => diags.push(Diagnostic::new(Code::RecElement, path, "unsupported value pattern")),
    }
}

fn explain_data(dt: &Datatype, raw: &str, path: &str, diags: &mut Vec<Diagnostic>) {
    let value = raw.trim();
    match dt {
        Datatype::Str {
            min_length,
            max_length,
        } => {
            let n = value.chars().count();
            if let Some(min) = min_length {
                if n < *min {
                    diags.push(Diagnostic::new(
                        Code::RecBounds,
                        path,
                        format!("string length {n} is below minLength {min}"),
                    ));
                }
            }
            if let Some(max) = max_length {
                if n > *max {
                    diags.push(Diagnostic::new(
                        Code::RecBounds,
                        path,
                        format!("string length {n} exceeds maxLength {max}"),
                    ));
                }
            }
        }
        Datatype::Int {
            min_inclusive,
            max_inclusive,
        } => match value.parse::<i64>() {
            Ok(v) => {
                if let Some(min) = min_inclusive {
                    if v < *min {
                        diags.push(Diagnostic::new(
                            Code::RecBounds,
                            path,
                            format!("{v} is below minInclusive {min}"),
                        ));
                    }
                }
                if let Some(max) = max_inclusive {
                    if v > *max {
                        diags.push(Diagnostic::new(
                            Code::RecBounds,
                            path,
                            format!("{v} exceeds maxInclusive {max}"),
                        ));
                    }
                }
            }
            Err(_) => diags.push(Diagnostic::new(
                Code::RecDatatype,
                path,
                format!("{value:?} is not a base-10 integer"),
            )),
        },
        Datatype::Date {
            min_inclusive,
            max_inclusive,
        } => match value.parse::<NaiveDate>() {
            Ok(v) => {
                if let Some(min) = min_inclusive {
                    if v < *min {
                        diags.push(Diagnostic::new(
                            Code::RecBounds,
                            path,
                            format!("{v} is before minInclusive {min}"),
                        ));
                    }
                }
                if let Some(max) = max_inclusive {
                    if v > *max {
                        diags.push(Diagnostic::new(
                            Code::RecBounds,
                            path,
                            format!("{v} is after maxInclusive {max}"),
                        ));
                    }
                }
            }
            Err(_) => diags.push(Diagnostic::new(
                Code::RecDatatype,
                path,
                format!("{value:?} is not an ISO 8601 date"),
            )),
        },
    }
}

fn explain_content(
    content: &[&PatternNode],
    el: roxmltree::Node<'_, '_>,
    path: &str,
    diags: &mut Vec<Diagnostic>,
) {
    let children = rec_children(el);
    let child_path = |i: usize| -> String {
        let name = children[i].tag_name().name();
        let same: Vec<usize> = children
            .iter()
            .enumerate()
            .filter(|(_, c)| c.tag_name().name() == name)
            .map(|(k, _)| k)
            .collect();
        let idx = same.iter().position(|&k| k == i).unwrap();
        sibling_path(path, name, idx, same.len())
    };
    match content {
        [] => {
            for (i, _) in children.iter().enumerate() {
                diags.push(Diagnostic::new(
                    Code::RecExtra,
                    child_path(i),
                    "no child elements are allowed here",
                ));
            }
            if has_stray_text(el) {
                diags.push(Diagnostic::new(Code::RecExtra, path, "no text content is allowed here"));
            }
        }
        [PatternNode::Text] => {
            for (i, _) in children.iter().enumerate() {
                diags.push(Diagnostic::new(
                    Code::RecExtra,
                    child_path(i),
                    "text-only content expected",
                ));
            }
        }
        [PatternNode::Data(dt)] => {
            for (i, _) in children.iter().enumerate() {
                diags.push(Diagnostic::new(
                    Code::RecExtra,
                    child_path(i),
                    "typed text content expected",
                ));
            }
            if children.is_empty() {
                explain_data(dt, &rec_text(el), path, diags);
            }
        }
        [PatternNode::Literal { text }] => {
            for (i, _) in children.iter().enumerate() {
                diags.push(Diagnostic::new(
                    Code::RecExtra,
                    child_path(i),
                    "fixed text content expected",
                ));
            }
            if children.is_empty() && rec_text(el).trim() != text.as_str() {
                diags.push(Diagnostic::new(
                    Code::RecDatatype,
                    path,
                    format!("expected fixed text {text:?}, found {:?}", rec_text(el).trim()),
                ));
            }
        }
        particles => {
            if has_stray_text(el) {
                diags.push(Diagnostic::new(
                    Code::RecExtra,
                    path,
                    "text content is not allowed between elements here",
                ));
            }
            let groups = group_particles(particles);
            explain_seq(&groups, &children, path, &child_path, diags);
        }
    }
}

fn group_label(g: &Group<'_>) -> String {
    fn particle_label(p: &PatternNode) -> String {
        match p {
            PatternNode::Element { name, .. } => format!("<{name}>"),
            PatternNode::Choice { alternatives } => alternatives
                .iter()
                .map(particle_label)
                .collect::<Vec<_>>()
                .join(" | "),
            PatternNode::Optional { inner }
            | PatternNode::OneOrMore { inner }
            | PatternNode::ZeroOrMore { inner } => particle_label(inner),
            other => kind_name(other).to_string(),
        }
    }
    match g {
        Group::One(p) | Group::Optional(p) | Group::OneOrMore(p) | Group::ZeroOrMore(p) => {
            particle_label(p)
        }
        Group::Choice(alts) => alts.iter().map(particle_label).collect::<Vec<_>>().join(" | "),
        Group::LiteralRun(alts) => alts
            .iter()
            .map(|p| particle_label(p))
            .collect::<Vec<_>>()
            .join(" | "),
    }
}

/// Greedy left-to-right pass that names the first offending position.
fn explain_seq(
    groups: &[Group<'_>],
    children: &[roxmltree::Node<'_, '_>],
    path: &str,
    child_path: &dyn Fn(usize) -> String,
    diags: &mut Vec<Diagnostic>,
) {
    let mut ci = 0;
    for group in groups {
        match group {
            Group::One(p) => {
                if ci >= children.len() {
                    diags.push(Diagnostic::new(
                        Code::RecElement,
                        path,
                        format!("missing {}", group_label(group)),
                    ));
                    return;
                }
                if !particle_matches(p, children[ci]) {
                    if let PatternNode::Element { .. } = p {
                        explain_element(p, children[ci], &child_path(ci), diags);
                    } else {
                        diags.push(Diagnostic::new(
                            Code::RecElement,
                            child_path(ci),
                            format!("does not match {}", group_label(group)),
                        ));
                    }
                    return;
                }
                ci += 1;
            }
            Group::Optional(p) => {
                if ci < children.len() && particle_matches(p, children[ci]) {
                    ci += 1;
                }
            }
            Group::ZeroOrMore(p) => {
                while ci < children.len() && particle_matches(p, children[ci]) {
                    ci += 1;
                }
            }
            Group::OneOrMore(p) => {
                if ci >= children.len() || !particle_matches(p, children[ci]) {
                    if ci < children.len() {
                        if let PatternNode::Element { .. } = p {
                            explain_element(p, children[ci], &child_path(ci), diags);
                            return;
                        }
                    }
                    diags.push(Diagnostic::new(
                        Code::RecElement,
                        path,
                        format!("expected at least one {}", group_label(group)),
                    ));
                    return;
                }
                while ci < children.len() && particle_matches(p, children[ci]) {
                    ci += 1;
                }
            }
            Group::Choice(alts) => {
                if ci >= children.len() || !alts.iter().any(|a| particle_matches(a, children[ci])) {
                    diags.push(Diagnostic::new(
                        Code::RecElement,
                        if ci < children.len() { child_path(ci) } else { path.to_string() },
                        format!("expected one of {}", group_label(group)),
                    ));
                    return;
                }
                ci += 1;
            }
            Group::LiteralRun(alts) => {
                if ci >= children.len() {
                    diags.push(Diagnostic::new(
                        Code::RecElement,
                        path,
                        format!("expected exactly one of {}", group_label(group)),
                    ));
                    return;
                }
                let child = children[ci];
                let by_name = alts.iter().find(|p| {
                    matches!(p, PatternNode::Element { name, .. } if name.as_str() == child.tag_name().name())
                });
                match by_name {
                    None => {
                        diags.push(Diagnostic::new(
                            Code::RecElement,
                            child_path(ci),
                            format!("expected one of {}", group_label(group)),
                        ));
                        return;
                    }
                    Some(p) => {
                        if !element_matches(p, child) {
                            explain_element(p, child, &child_path(ci), diags);
                            return;
                        }
                    }
                }
                ci += 1;
            }
        }
    }
    while ci < children.len() {
        diags.push(Diagnostic::new(
            Code::RecExtra,
            child_path(ci),
            "element is not allowed by the pattern",
        ));
        ci += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SHORT_SUMMARY: &str = r#"<element xmlns="http://relaxng.org/ns/structure/1.0" name="summary">
        <data type="string"><param name="maxLength">50</param></data>
    </element>"#;

    const SELECT_YES_NO: &str = r#"<element xmlns="http://relaxng.org/ns/structure/1.0" name="select">
        <element name="yes">Yes</element>
        <element name="no">No</element>
    </element>"#;

    #[test]
    fn compiles_bounded_string() {
        let p = compile_pattern(SHORT_SUMMARY).unwrap();
        assert_eq!(
            p,
            PatternNode::Element {
                name: "summary".into(),
                children: vec![PatternNode::Data(Datatype::Str {
                    min_length: None,
                    max_length: Some(50),
                })],
            }
        );
    }

    #[test]
    fn compiles_yes_no_selector() {
        let p = compile_pattern(SELECT_YES_NO).unwrap();
        assert_eq!(
            p,
            PatternNode::Element {
                name: "select".into(),
                children: vec![
                    PatternNode::Element {
                        name: "yes".into(),
                        children: vec![PatternNode::Literal { text: "Yes".into() }],
                    },
                    PatternNode::Element {
                        name: "no".into(),
                        children: vec![PatternNode::Literal { text: "No".into() }],
                    },
                ],
            }
        );
    }

    #[test]
    fn interleave_is_unsupported() {
        let err = compile_pattern("<element name=\"x\"><interleave/></element>").unwrap_err();
        assert_eq!(err.code, Code::PatternUnsupported);
    }

    #[test]
    fn bad_param_pairing_is_rejected() {
        let err = compile_pattern(
            "<element name=\"x\"><data type=\"string\"><param name=\"minInclusive\">1</param></data></element>",
        )
        .unwrap_err();
        assert_eq!(err.code, Code::PatternParam);
    }

    #[test]
    fn summary_record_within_bounds_is_clean() {
        let p = compile_pattern(SHORT_SUMMARY).unwrap();
        let report = validate_record(&p, "<summary>stable, tired in evenings</summary>");
        assert!(report.is_clean(), "{:?}", report.diagnostics);
    }

    #[test]
    fn summary_record_over_bounds_fails() {
        let p = compile_pattern(SHORT_SUMMARY).unwrap();
        let long = "x".repeat(51);
        let report = validate_record(&p, &format!("<summary>{long}</summary>"));
        assert_eq!(report.codes(), vec![Code::RecBounds]);
    }

    #[test]
    fn integer_bounds_are_inclusive() {
        let p = PatternNode::Element {
            name: "n".into(),
            children: vec![PatternNode::Data(Datatype::Int {
                min_inclusive: Some(1),
                max_inclusive: Some(10),
            })],
        };
        assert!(validate_record(&p, "<n>1</n>").is_clean());
        assert!(validate_record(&p, "<n>10</n>").is_clean());
        assert_eq!(validate_record(&p, "<n>0</n>").codes(), vec![Code::RecBounds]);
        assert_eq!(validate_record(&p, "<n>11</n>").codes(), vec![Code::RecBounds]);
        assert_eq!(validate_record(&p, "<n>ten</n>").codes(), vec![Code::RecDatatype]);
    }

    #[test]
    fn literal_run_is_an_exclusive_choice() {
        let p = compile_pattern(SELECT_YES_NO).unwrap();
        assert!(validate_record(&p, "<select><yes>Yes</yes></select>").is_clean());
        assert!(validate_record(&p, "<select><no>No</no></select>").is_clean());
        // both present: the run admits exactly one
        assert!(!validate_record(&p, "<select><yes>Yes</yes><no>No</no></select>").is_clean());
        // wrong fixed text
        assert!(!validate_record(&p, "<select><yes>nope</yes></select>").is_clean());
        // neither present
        assert!(!validate_record(&p, "<select/>").is_clean());
    }

    #[test]
    fn extra_attribute_is_flagged() {
        let p = compile_pattern(SHORT_SUMMARY).unwrap();
        let report = validate_record(&p, "<summary bogus=\"1\">ok</summary>");
        assert_eq!(report.codes(), vec![Code::RecExtra]);
    }

    #[test]
    fn canonical_emission_round_trips() {
        for xml in [SHORT_SUMMARY, SELECT_YES_NO] {
            let p = compile_pattern(xml).unwrap();
            let emitted = pattern_to_xml(&p, 0);
            let back = compile_pattern(&emitted).unwrap();
            assert_eq!(p, back, "emitted:\n{emitted}");
        }
    }

    #[test]
    fn date_datatype_checks_bounds() {
        let p = PatternNode::Element {
            name: "d".into(),
            children: vec![PatternNode::Data(Datatype::Date {
                min_inclusive: Some(NaiveDate::from_ymd_opt(2013, 1, 1).unwrap()),
                max_inclusive: None,
            })],
        };
        assert!(validate_record(&p, "<d>2013-04-01</d>").is_clean());
        assert_eq!(validate_record(&p, "<d>2012-12-31</d>").codes(), vec![Code::RecBounds]);
        assert_eq!(validate_record(&p, "<d>yesterday</d>").codes(), vec![Code::RecDatatype]);
    }
}
