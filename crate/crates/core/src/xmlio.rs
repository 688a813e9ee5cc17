//! XML reading and writing.
//!
//! Parsing comes in two modes. Lenient mode auto-repairs the catalogued
//! mismatches between the format's grammars and its canonical examples,
//! each with a warning; strict mode turns each of them into an error.
//! Well-formedness violations are errors in both modes. The repair
//! catalog:
//!
//! * missing `theme` on `<definition>` — stored absent (`W-THEME-MISSING`)
//! * `<label name="…">` instead of `text` (`W-LABEL-ATTR`)
//! * singular composite spellings `<sequential-task>`/`<parallel-task>`
//!   (`W-COMPOSITE-NAME`)
//! * `source` attributes on guideline elements whose grammar omits them
//!   (`W-SOURCE-ATTR`); the value is stored and participates in source
//!   inheritance
//! * unknown attributes and elements are skipped (`W-UNKNOWN-ATTR`,
//!   `W-UNKNOWN-ELEMENT`)
//!
//! Two equivalences are accepted silently in both modes because the
//! format's own canonical examples rely on them: hint text may live in
//! element content instead of the `text` attribute, and documentation
//! items may be spelled `<documentation>` or `<documentations>`.
//!
//! Serialization produces one canonical form: two-space indentation,
//! attributes in alphabetical order, lowercase enum values, `<label
//! text="…">`, plural composite names, an empty `custom` section omitted
//! and an absent definition theme written as `theme=""`. Text is stored
//! whitespace-normalized except inside input bodies, which are preserved
//! verbatim when they cannot be compiled.

use std::collections::HashMap;

use chrono::NaiveDate;

use crate::diag::{Code, Diagnostic};
use crate::inputschema::{self, pattern_to_xml, RNG_NS};
use crate::model::*;
use crate::path::sibling_path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseMode {
    Strict,
    Lenient,
}

/// Outcome of a parse: a document when no errors occurred, plus all
/// diagnostics. `document` is `Some` exactly when no diagnostic has error
/// severity.
#[derive(Debug, Clone)]
pub struct ParseResult {
    pub document: Option<GuidelineDocument>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseResult {
    pub fn error_count(&self) -> usize {
        self.diagnostics.iter().filter(|d| d.is_error()).count()
    }
}

/// Parse raw bytes; non-UTF-8 input is malformed by definition.
pub fn parse_bytes(bytes: &[u8], mode: ParseMode) -> ParseResult {
    match std::str::from_utf8(bytes) {
        Ok(text) => parse_document(text, mode),
        Err(e) => ParseResult {
            document: None,
            diagnostics: vec![Diagnostic::new(
                Code::XmlMalformed,
                "/",
                format!("input is not valid UTF-8: {e}"),
            )],
        },
    }
}

pub fn parse_document(text: &str, mode: ParseMode) -> ParseResult {
    let mut parser = Parser {
        mode,
        diags: Vec::new(),
        src: text,
    };
    let document = parser.run();
    let has_error = parser.diags.iter().any(Diagnostic::is_error);
    ParseResult {
        document: if has_error { None } else { document },
        diagnostics: parser.diags,
    }
}

/// Collapse internal whitespace runs and trim; attribute values and hint
/// content are stored in this form.
fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn declared_encoding(text: &str) -> Option<String> {
    let head = text.trim_start();
    if !head.starts_with("<?xml") {
        return None;
    }
    let end = head.find("?>")?;
    let decl = &head[..end];
    let pos = decl.find("encoding")?;
    let rest = &decl[pos + "encoding".len()..];
    let rest = rest.trim_start().strip_prefix('=')?.trim_start();
    let quote = rest.chars().next()?;
    if quote != '"' && quote != '\'' {
        return None;
    }
    let rest = &rest[1..];
    let close = rest.find(quote)?;
    Some(rest[..close].to_string())
}

struct Parser<'a> {
    mode: ParseMode,
    diags: Vec<Diagnostic>,
    src: &'a str,
}

type XmlNode<'a, 'input> = roxmltree::Node<'a, 'input>;

impl<'a> Parser<'a> {
    fn run(&mut self) -> Option<GuidelineDocument> {
        if let Some(enc) = declared_encoding(self.src) {
            if !enc.eq_ignore_ascii_case("utf-8") && !enc.eq_ignore_ascii_case("utf8") {
                self.error(Code::XmlMalformed, "/", format!("unsupported encoding {enc:?}"));
                return None;
            }
        }
        let opts = roxmltree::ParsingOptions {
            allow_dtd: false,
            ..Default::default()
        };
        let xml = match roxmltree::Document::parse_with_options(self.src, opts) {
            Ok(doc) => doc,
            Err(e) => {
                self.error(Code::XmlMalformed, "/", format!("not well-formed XML: {e}"));
                return None;
            }
        };
        let root = xml.root_element();
        if root.tag_name().name() != "nnn" {
            self.error(
                Code::MissingSection,
                "/",
                format!("expected <nnn> root element, found <{}>", root.tag_name().name()),
            );
            return None;
        }
        let mut meta = None;
        let mut custom = None;
        let mut body = None;
        let (mut meta_seen, mut custom_seen, mut body_seen) = (false, false, false);
        for (child, _path) in child_paths(root, "") {
            match child.tag_name().name() {
                "meta" => {
                    if meta_seen {
                        self.error(Code::DupSection, "/meta", "more than one meta section");
                    } else {
                        meta_seen = true;
                        meta = self.parse_meta(child);
                    }
                }
                "custom" => {
                    if custom_seen {
                        self.error(Code::DupSection, "/custom", "more than one custom section");
                    } else {
                        custom_seen = true;
                        custom = Some(self.parse_custom(child));
                    }
                }
                "guideline" => {
                    if body_seen {
                        self.error(Code::DupSection, "/guideline", "more than one guideline section");
                    } else {
                        body_seen = true;
                        body = Some(self.parse_guideline(child));
                    }
                }
                other => self.unknown_element("", other),
            }
        }
        if !meta_seen {
            self.error(Code::MissingSection, "/", "missing <meta> section");
        }
        if !body_seen {
            self.error(Code::MissingSection, "/", "missing <guideline> section");
        }
        Some(GuidelineDocument {
            meta: meta?,
            custom: custom.unwrap_or_default(),
            body: body?,
        })
    }

    // -- diagnostics ---------------------------------------------------

    fn error(&mut self, code: Code, path: impl Into<String>, message: impl Into<String>) {
        self.diags.push(Diagnostic::new(code, path, message));
    }

    /// Catalogued mismatch: warning in lenient mode, error in strict mode.
    fn mode_diag(
        &mut self,
        lenient: Code,
        strict: Code,
        path: impl Into<String>,
        message: impl Into<String>,
    ) {
        let code = match self.mode {
            ParseMode::Lenient => lenient,
            ParseMode::Strict => strict,
        };
        self.diags.push(Diagnostic::new(code, path, message));
    }

    fn unknown_element(&mut self, parent_path: &str, name: &str) {
        self.mode_diag(
            Code::UnknownElementSkipped,
            Code::UnknownElement,
            format!("{parent_path}/{name}"),
            format!("element <{name}> is not part of the format"),
        );
    }

    // -- attributes ----------------------------------------------------

    fn req_attr(&mut self, node: XmlNode, path: &str, name: &str) -> Option<String> {
        match node.attribute(name) {
            Some(v) => Some(normalize_ws(v)),
            None => {
                self.error(
                    Code::AttrMissing,
                    path,
                    format!("missing required attribute {name:?}"),
                );
                None
            }
        }
    }

    fn opt_attr(&self, node: XmlNode, name: &str) -> Option<String> {
        node.attribute(name).map(normalize_ws).filter(|v| !v.is_empty())
    }

    fn opt_int_attr(&mut self, node: XmlNode, path: &str, name: &str) -> Option<i64> {
        let raw = node.attribute(name)?;
        match raw.trim().parse::<i64>() {
            Ok(v) => Some(v),
            Err(_) => {
                self.error(
                    Code::BadInt,
                    path,
                    format!("attribute {name:?} value {raw:?} is not a base-10 integer"),
                );
                None
            }
        }
    }

    fn req_int_attr(&mut self, node: XmlNode, path: &str, name: &str) -> Option<i64> {
        if node.attribute(name).is_none() {
            self.error(
                Code::AttrMissing,
                path,
                format!("missing required attribute {name:?}"),
            );
            return None;
        }
        self.opt_int_attr(node, path, name)
    }

    /// `source` is allowed on every guideline element by the prose rule
    /// even though the listing grammars omit it.
    fn take_source(&mut self, node: XmlNode, path: &str) -> Option<String> {
        let value = self.opt_attr(node, "source");
        if node.attribute("source").is_some() {
            self.mode_diag(
                Code::SourceAttr,
                Code::AttrUnknown,
                path,
                "source attribute is not declared by the element grammar",
            );
        }
        value
    }

    fn check_unknown_attrs(&mut self, node: XmlNode, path: &str, known: &[&str]) {
        for attr in node.attributes() {
            let name = attr.name();
            if !known.contains(&name) {
                self.mode_diag(
                    Code::UnknownAttr,
                    Code::AttrUnknown,
                    path,
                    format!("attribute {name:?} is not part of the format"),
                );
            }
        }
    }

    // -- meta ------------------------------------------------------------

    fn parse_meta(&mut self, node: XmlNode) -> Option<Meta> {
        let mut title = None;
        let mut definition = None;
        let mut version_id = None;
        let mut status = None;
        let mut institution = None;
        let mut author = None;
        let mut validator = None;
        let mut implementer = None;
        let mut date = None;
        let mut seen: Vec<String> = Vec::new();
        for (child, path) in child_paths(node, "/meta") {
            let name = child.tag_name().name();
            match name {
                "title" | "definition" | "version" | "validation" | "institution" | "author"
                | "validator" | "implementer" | "date" => {
                    if seen.iter().any(|s| s == name) {
                        self.error(Code::DupSection, &path, format!("element <{name}> occurs more than once"));
                        continue;
                    }
                    seen.push(name.to_string());
                }
                other => {
                    self.unknown_element("/meta", other);
                    continue;
                }
            }
            match name {
                "title" => {
                    title = self.req_attr(child, &path, "text");
                    self.check_unknown_attrs(child, &path, &["text"]);
                }
                "definition" => {
                    let text = self.req_attr(child, &path, "text");
                    let theme = match child.attribute("theme") {
                        Some(v) => {
                            let v = normalize_ws(v);
                            (!v.is_empty()).then_some(v)
                        }
                        None => {
                            self.mode_diag(
                                Code::ThemeMissing,
                                Code::AttrMissing,
                                &path,
                                "definition is missing the required theme attribute",
                            );
                            None
                        }
                    };
                    self.check_unknown_attrs(child, &path, &["text", "theme"]);
                    let mut hints = Vec::new();
                    for (sub, sub_path) in child_paths(child, &path) {
                        match sub.tag_name().name() {
                            "hints" => hints.extend(self.parse_hints(sub, &sub_path)),
                            other => self.unknown_element(&path, other),
                        }
                    }
                    definition = text.map(|text| Definition { text, theme, hints });
                }
                "version" => {
                    version_id = self.req_attr(child, &path, "id");
                    self.check_unknown_attrs(child, &path, &["id"]);
                }
                "validation" => {
                    if let Some(raw) = self.req_attr(child, &path, "status") {
                        match ValidationStatus::parse(&raw) {
                            Some(v) => status = Some(v),
                            None => self.error(
                                Code::BadEnum,
                                &path,
                                format!("validation status {raw:?} is not one of research, implementing, testing, running, expired"),
                            ),
                        }
                    }
                    self.check_unknown_attrs(child, &path, &["status"]);
                }
                "institution" | "author" | "validator" | "implementer" => {
                    let value = self.req_attr(child, &path, "name");
                    self.check_unknown_attrs(child, &path, &["name"]);
                    match name {
                        "institution" => institution = value,
                        "author" => author = value,
                        "validator" => validator = value,
                        _ => implementer = value,
                    }
                }
                "date" => {
                    if let Some(raw) = self.req_attr(child, &path, "text") {
                        match raw.parse::<NaiveDate>() {
                            Ok(d) => date = Some(d),
                            Err(_) => self.error(
                                Code::BadDate,
                                &path,
                                format!("date {raw:?} is not an ISO 8601 calendar date"),
                            ),
                        }
                    }
                    self.check_unknown_attrs(child, &path, &["text"]);
                }
                _ => unreachable!(),
            }
        }
        // distinguish an absent element from one that was present but
        // failed to parse; only absence is an E-ELEMENT-MISSING
        for required in ["title", "definition", "version", "validation", "date"] {
            if !seen.iter().any(|s| s == required) {
                self.error(
                    Code::ElementMissing,
                    "/meta",
                    format!("missing required element <{required}>"),
                );
            }
        }
        Some(Meta {
            title: title?,
            definition: definition?,
            version_id: version_id?,
            validation_status: status?,
            institution,
            author,
            validator,
            implementer,
            date: date?,
        })
    }

    // -- custom ----------------------------------------------------------

    fn parse_custom(&mut self, node: XmlNode) -> Custom {
        let mut custom = Custom::default();
        self.check_unknown_attrs(node, "/custom", &[]);
        for (child, path) in child_paths(node, "/custom") {
            match child.tag_name().name() {
                "recommended" => {
                    let id = self.req_attr(child, &path, "id");
                    let score = self.req_int_attr(child, &path, "score");
                    self.check_unknown_attrs(child, &path, &["id", "score"]);
                    if let (Some(task_id), Some(score)) = (id, score) {
                        custom.recommended.push(Recommended { task_id, score });
                    }
                }
                "mandatory" => {
                    let id = self.req_attr(child, &path, "id");
                    self.check_unknown_attrs(child, &path, &["id"]);
                    if let Some(task_id) = id {
                        custom.mandatory.push(Mandatory { task_id });
                    }
                }
                other => self.unknown_element("/custom", other),
            }
        }
        custom
    }

    // -- guideline body ----------------------------------------------------

    fn parse_guideline(&mut self, node: XmlNode) -> GuidelineBody {
        let mut body = GuidelineBody {
            source: self.take_source(node, "/guideline"),
            ..GuidelineBody::default()
        };
        self.check_unknown_attrs(node, "/guideline", &["source"]);
        let mut seen: Vec<&'static str> = Vec::new();
        for (child, path) in child_paths(node, "/guideline") {
            let name = child.tag_name().name();
            let canonical: &'static str = match name {
                "factors" => "factors",
                "symptoms" => "symptoms",
                "outcomes" => "outcomes",
                "tasks" => "tasks",
                "documentations" => "documentations",
                other => {
                    self.unknown_element("/guideline", other);
                    continue;
                }
            };
            if seen.contains(&canonical) {
                self.error(Code::DupSection, &path, format!("section <{name}> occurs more than once"));
                continue;
            }
            seen.push(canonical);
            match canonical {
                "factors" => {
                    body.factors.source = self.take_source(child, &path);
                    self.check_unknown_attrs(child, &path, &["source"]);
                    for (item, item_path) in child_paths(child, &path) {
                        match item.tag_name().name() {
                            "factor" => {
                                let f = self.parse_factor(item, &item_path);
                                body.factors.items.push(f);
                            }
                            other => self.unknown_element(&path, other),
                        }
                    }
                    self.require_items(&path, "factor", !body.factors.items.is_empty());
                }
                "symptoms" => {
                    body.symptoms.source = self.take_source(child, &path);
                    self.check_unknown_attrs(child, &path, &["source"]);
                    for (item, item_path) in child_paths(child, &path) {
                        match item.tag_name().name() {
                            "symptom" => {
                                let s = self.parse_symptom(item, &item_path);
                                body.symptoms.items.push(s);
                            }
                            other => self.unknown_element(&path, other),
                        }
                    }
                    self.require_items(&path, "symptom", !body.symptoms.items.is_empty());
                }
                "outcomes" => body.outcomes = self.parse_outcomes(child, &path),
                "tasks" => body.tasks = self.parse_tasks(child, &path),
                "documentations" => body.documentations = self.parse_documentations(child, &path),
                _ => unreachable!(),
            }
        }
        body
    }

    /// Strict mode enforces the grammars' oneOrMore item requirement;
    /// lenient mode leaves emptiness to semantic validation.
    fn require_items(&mut self, path: &str, item: &str, present: bool) {
        if !present && self.mode == ParseMode::Strict {
            self.error(
                Code::ElementMissing,
                path,
                format!("section must contain at least one <{item}>"),
            );
        }
    }

    fn parse_stdbody(
        &mut self,
        node: XmlNode,
        path: &str,
    ) -> (Option<String>, Option<String>, Option<String>, Option<String>) {
        let text = self.req_attr(node, path, "text");
        let category = self.opt_attr(node, "category");
        let subcategory = self.opt_attr(node, "subcategory");
        let source = self.take_source(node, path);
        (text, category, subcategory, source)
    }

    fn parse_factor(&mut self, node: XmlNode, path: &str) -> Factor {
        let (text, category, subcategory, source) = self.parse_stdbody(node, path);
        let factor_type = match node.attribute("type") {
            None => FactorType::default(),
            Some(raw) => match FactorType::parse(normalize_ws(raw).as_str()) {
                Some(t) => t,
                None => {
                    self.error(
                        Code::BadEnum,
                        path,
                        format!("factor type {raw:?} is not one of related, risk"),
                    );
                    FactorType::default()
                }
            },
        };
        self.check_unknown_attrs(node, path, &["text", "category", "subcategory", "type", "source"]);
        let mut factor = Factor {
            text: text.unwrap_or_default(),
            category,
            subcategory,
            factor_type,
            hints: Vec::new(),
            examples: Vec::new(),
            source,
            children: Vec::new(),
        };
        for (child, child_path) in child_paths(node, path) {
            match child.tag_name().name() {
                "factors" => {
                    // the nested wrapper has no model slot of its own; its
                    // source becomes the default for children without one
                    let wrapper_source = self.take_source(child, &child_path);
                    self.check_unknown_attrs(child, &child_path, &["source"]);
                    for (item, item_path) in child_paths(child, &child_path) {
                        match item.tag_name().name() {
                            "factor" => {
                                let mut f = self.parse_factor(item, &item_path);
                                if f.source.is_none() {
                                    f.source = wrapper_source.clone();
                                }
                                factor.children.push(f);
                            }
                            other => self.unknown_element(&child_path, other),
                        }
                    }
                }
                "hints" => factor.hints.extend(self.parse_hints(child, &child_path)),
                "examples" => factor.examples.extend(self.parse_examples(child, &child_path)),
                other => self.unknown_element(path, other),
            }
        }
        factor
    }

    fn parse_symptom(&mut self, node: XmlNode, path: &str) -> Symptom {
        let (text, category, subcategory, source) = self.parse_stdbody(node, path);
        self.check_unknown_attrs(node, path, &["text", "category", "subcategory", "source"]);
        let mut symptom = Symptom {
            text: text.unwrap_or_default(),
            category,
            subcategory,
            hints: Vec::new(),
            examples: Vec::new(),
            source,
        };
        for (child, child_path) in child_paths(node, path) {
            match child.tag_name().name() {
                "hints" => symptom.hints.extend(self.parse_hints(child, &child_path)),
                "examples" => symptom.examples.extend(self.parse_examples(child, &child_path)),
                other => self.unknown_element(path, other),
            }
        }
        symptom
    }

    fn parse_outcomes(&mut self, node: XmlNode, path: &str) -> OutcomeSection {
        let mut section = OutcomeSection {
            source: self.take_source(node, path),
            ..OutcomeSection::default()
        };
        self.check_unknown_attrs(node, path, &["source"]);
        let mut saw_labels = false;
        for (child, child_path) in child_paths(node, path) {
            match child.tag_name().name() {
                "labels" => {
                    saw_labels = true;
                    section.noc_labels.extend(self.parse_labels(child, &child_path));
                }
                "outcome" => {
                    let goal = self
                        .req_attr(child, &child_path, "goal")
                        .and_then(|raw| match OutcomeGoal::parse(&raw) {
                            Some(g) => Some(g),
                            None => {
                                self.error(
                                    Code::BadEnum,
                                    &child_path,
                                    format!("outcome goal {raw:?} is not one of achieve, maintain, prevent"),
                                );
                                None
                            }
                        });
                    let id = self.req_attr(child, &child_path, "id");
                    let text = self.req_attr(child, &child_path, "text");
                    let source = self.take_source(child, &child_path);
                    self.check_unknown_attrs(child, &child_path, &["goal", "id", "text", "source"]);
                    let mut outcome = Outcome {
                        id: id.unwrap_or_default(),
                        goal: goal.unwrap_or(OutcomeGoal::Achieve),
                        text: text.unwrap_or_default(),
                        hints: Vec::new(),
                        examples: Vec::new(),
                        inputs: Vec::new(),
                        source,
                    };
                    self.parse_hei_children(child, &child_path, &mut outcome.hints, &mut outcome.examples, &mut outcome.inputs);
                    section.items.push(outcome);
                }
                other => self.unknown_element(path, other),
            }
        }
        if !saw_labels && self.mode == ParseMode::Strict {
            self.error(Code::ElementMissing, path, "missing required element <labels>");
        }
        self.require_items(path, "outcome", !section.items.is_empty());
        section
    }

    fn parse_tasks(&mut self, node: XmlNode, path: &str) -> TasksSection {
        let mut section = TasksSection {
            source: self.take_source(node, path),
            ..TasksSection::default()
        };
        self.check_unknown_attrs(node, path, &["source"]);
        let mut saw_labels = false;
        for (child, child_path) in child_paths(node, path) {
            match child.tag_name().name() {
                "labels" => {
                    saw_labels = true;
                    section.nic_labels.extend(self.parse_labels(child, &child_path));
                }
                _ => {
                    if let Some(task) = self.parse_task_node(child, &child_path) {
                        section.roots.push(task);
                    }
                }
            }
        }
        if !saw_labels && self.mode == ParseMode::Strict {
            self.error(Code::ElementMissing, path, "missing required element <labels>");
        }
        self.require_items(path, "task", !section.roots.is_empty());
        section
    }

    fn parse_task_node(&mut self, node: XmlNode, path: &str) -> Option<TaskNode> {
        let name = node.tag_name().name();
        let mode = match name {
            "task" => return Some(TaskNode::Atomic(self.parse_task(node, path))),
            "sequential-tasks" => CompositionMode::Sequential,
            "parallel-tasks" => CompositionMode::Parallel,
            "sequential-task" | "parallel-task" => {
                let mode = if name.starts_with("sequential") {
                    CompositionMode::Sequential
                } else {
                    CompositionMode::Parallel
                };
                self.mode_diag(
                    Code::CompositeName,
                    Code::UnknownElement,
                    path,
                    format!("singular composite spelling <{name}>; canonical name is <{}>", mode.element_name()),
                );
                mode
            }
            other => {
                let parent = path.rsplit_once('/').map(|(p, _)| p).unwrap_or("");
                self.unknown_element(parent, other);
                return None;
            }
        };
        Some(TaskNode::Composite(self.parse_composite(mode, node, path)))
    }

    fn parse_composite(&mut self, mode: CompositionMode, node: XmlNode, path: &str) -> CompositeTask {
        let name = self.opt_attr(node, "name");
        let text = self.opt_attr(node, "text");
        let source = self.take_source(node, path);
        self.check_unknown_attrs(node, path, &["name", "text", "source"]);
        let mut children = Vec::new();
        for (child, child_path) in child_paths(node, path) {
            if let Some(task) = self.parse_task_node(child, &child_path) {
                children.push(task);
            }
        }
        CompositeTask {
            mode,
            name,
            text,
            source,
            children,
        }
    }

    fn parse_task(&mut self, node: XmlNode, path: &str) -> AtomicTask {
        let id = self.req_attr(node, path, "id");
        let text = self.req_attr(node, path, "text");
        let predicted_effort = self.opt_int_attr(node, path, "predictedeffort");
        let score = self.opt_int_attr(node, path, "score");
        let source = self.take_source(node, path);
        self.check_unknown_attrs(node, path, &["id", "text", "predictedeffort", "score", "source"]);
        let mut task = AtomicTask {
            id: id.unwrap_or_default(),
            text: text.unwrap_or_default(),
            predicted_effort,
            score,
            hints: Vec::new(),
            examples: Vec::new(),
            inputs: Vec::new(),
            source,
        };
        self.parse_hei_children(node, path, &mut task.hints, &mut task.examples, &mut task.inputs);
        task
    }

    fn parse_documentations(&mut self, node: XmlNode, path: &str) -> Section<Documentation> {
        let mut section = Section::<Documentation> {
            source: self.take_source(node, path),
            items: Vec::new(),
        };
        self.check_unknown_attrs(node, path, &["source"]);
        for (child, child_path) in child_paths(node, path) {
            match child.tag_name().name() {
                // the published grammar reuses the section name for items;
                // the singular spelling is canonical
                "documentation" | "documentations" => {
                    let id = self.req_attr(child, &child_path, "id");
                    let text = self.req_attr(child, &child_path, "text");
                    let source = self.take_source(child, &child_path);
                    self.check_unknown_attrs(child, &child_path, &["id", "text", "source"]);
                    let mut item = Documentation {
                        id: id.unwrap_or_default(),
                        text: text.unwrap_or_default(),
                        hints: Vec::new(),
                        examples: Vec::new(),
                        inputs: Vec::new(),
                        source,
                    };
                    self.parse_hei_children(child, &child_path, &mut item.hints, &mut item.examples, &mut item.inputs);
                    section.items.push(item);
                }
                other => self.unknown_element(path, other),
            }
        }
        self.require_items(path, "documentation", !section.items.is_empty());
        section
    }

    /// hints / examples / inputs, shared by tasks, outcomes and
    /// documentation items.
    fn parse_hei_children(
        &mut self,
        node: XmlNode,
        path: &str,
        hints: &mut Vec<Hint>,
        examples: &mut Vec<Example>,
        inputs: &mut Vec<InputSpec>,
    ) {
        for (child, child_path) in child_paths(node, path) {
            match child.tag_name().name() {
                "hints" => hints.extend(self.parse_hints(child, &child_path)),
                "examples" => examples.extend(self.parse_examples(child, &child_path)),
                "inputs" => inputs.extend(self.parse_inputs(child, &child_path)),
                other => self.unknown_element(path, other),
            }
        }
    }

    fn parse_labels(&mut self, node: XmlNode, path: &str) -> Vec<String> {
        self.check_unknown_attrs(node, path, &[]);
        let mut labels = Vec::new();
        for (child, child_path) in child_paths(node, path) {
            match child.tag_name().name() {
                "label" => {
                    let mut known: &[&str] = &["text"];
                    let text = match self.opt_attr(child, "text") {
                        Some(t) => Some(t),
                        None => match self.opt_attr(child, "name") {
                            Some(n) => {
                                known = &["text", "name"];
                                self.mode_diag(
                                    Code::LabelAttr,
                                    Code::AttrMissing,
                                    &child_path,
                                    "label uses attribute \"name\" where the grammar requires \"text\"",
                                );
                                Some(n)
                            }
                            None => {
                                self.error(
                                    Code::AttrMissing,
                                    &child_path,
                                    "missing required attribute \"text\"",
                                );
                                None
                            }
                        },
                    };
                    self.check_unknown_attrs(child, &child_path, known);
                    if let Some(text) = text {
                        labels.push(text);
                    }
                }
                other => self.unknown_element(path, other),
            }
        }
        labels
    }

    fn parse_hints(&mut self, node: XmlNode, path: &str) -> Vec<Hint> {
        self.check_unknown_attrs(node, path, &[]);
        let mut hints = Vec::new();
        for (child, child_path) in child_paths(node, path) {
            match child.tag_name().name() {
                "hint" => {
                    let from = self.opt_attr(child, "from");
                    let score = self.opt_int_attr(child, &child_path, "score");
                    // hint text may be carried in the attribute or, as in
                    // the canonical examples, as element content
                    let text = match self.opt_attr(child, "text") {
                        Some(t) => Some(t),
                        None => {
                            let content = normalize_ws(&collect_text(child));
                            if content.is_empty() {
                                self.error(
                                    Code::AttrMissing,
                                    &child_path,
                                    "hint has neither a text attribute nor text content",
                                );
                                None
                            } else {
                                Some(content)
                            }
                        }
                    };
                    self.check_unknown_attrs(child, &child_path, &["from", "score", "text"]);
                    if let Some(text) = text {
                        hints.push(Hint { from, text, score });
                    }
                }
                other => self.unknown_element(path, other),
            }
        }
        hints
    }

    fn parse_examples(&mut self, node: XmlNode, path: &str) -> Vec<Example> {
        self.check_unknown_attrs(node, path, &[]);
        let mut examples = Vec::new();
        for (child, child_path) in child_paths(node, path) {
            match child.tag_name().name() {
                "example" => {
                    let text = self.req_attr(child, &child_path, "text");
                    let score = self.opt_int_attr(child, &child_path, "score");
                    self.check_unknown_attrs(child, &child_path, &["text", "score"]);
                    let mut example = Example {
                        text: text.unwrap_or_default(),
                        score,
                        children: Vec::new(),
                    };
                    for (sub, sub_path) in child_paths(child, &child_path) {
                        match sub.tag_name().name() {
                            "examples" => example.children.extend(self.parse_examples(sub, &sub_path)),
                            other => self.unknown_element(&child_path, other),
                        }
                    }
                    examples.push(example);
                }
                other => self.unknown_element(path, other),
            }
        }
        examples
    }

    fn parse_inputs(&mut self, node: XmlNode, path: &str) -> Vec<InputSpec> {
        self.check_unknown_attrs(node, path, &[]);
        let mut inputs = Vec::new();
        for (child, child_path) in child_paths(node, path) {
            match child.tag_name().name() {
                "input" => {
                    let label = self.req_attr(child, &child_path, "label");
                    self.check_unknown_attrs(child, &child_path, &["label"]);
                    let elements: Vec<XmlNode> =
                        child.children().filter(|c| c.is_element()).collect();
                    let body = if elements.len() == 1 {
                        match inputschema::compile_node(elements[0], "") {
                            Ok(pattern) => InputBody::Pattern(pattern),
                            Err(why) => {
                                self.diags.push(Diagnostic::new(
                                    Code::OpaqueInput,
                                    &child_path,
                                    format!("input body stored opaquely: {}", why.message),
                                ));
                                InputBody::Opaque(self.inner_xml(child))
                            }
                        }
                    } else {
                        let why = if elements.is_empty() {
                            "input body is empty".to_string()
                        } else {
                            format!("input body has {} top-level elements", elements.len())
                        };
                        self.diags.push(Diagnostic::new(
                            Code::OpaqueInput,
                            &child_path,
                            format!("input body stored opaquely: {why}"),
                        ));
                        InputBody::Opaque(self.inner_xml(child))
                    };
                    if let Some(label) = label {
                        inputs.push(InputSpec { label, body });
                    }
                }
                other => self.unknown_element(path, other),
            }
        }
        inputs
    }

    /// Verbatim inner XML of an element, for opaque input bodies.
    fn inner_xml(&self, node: XmlNode) -> String {
        let first = node.first_child();
        let last = node.last_child();
        match (first, last) {
            (Some(f), Some(l)) => self.src[f.range().start..l.range().end].to_string(),
            _ => String::new(),
        }
    }
}

fn collect_text(node: XmlNode) -> String {
    let mut out = String::new();
    for child in node.children() {
        if let Some(t) = child.text() {
            out.push_str(t);
        }
    }
    out
}

/// Element children of `parent` paired with their document paths;
/// ordinals appear when a name occurs more than once.
fn child_paths<'a, 'input>(
    parent: XmlNode<'a, 'input>,
    parent_path: &str,
) -> Vec<(XmlNode<'a, 'input>, String)> {
    let kids: Vec<XmlNode> = parent.children().filter(|c| c.is_element()).collect();
    let mut totals: HashMap<&str, usize> = HashMap::new();
    for kid in &kids {
        *totals.entry(kid.tag_name().name()).or_default() += 1;
    }
    let mut running: HashMap<&str, usize> = HashMap::new();
    kids.into_iter()
        .map(|kid| {
            let name = kid.tag_name().name();
            let idx = running.entry(name).or_default();
            let path = sibling_path(parent_path, name, *idx, totals[name]);
            *idx += 1;
            (kid, path)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// serialization
// ---------------------------------------------------------------------------

/// Render a document in the canonical form. Parsing the result strictly
/// yields an equal document and no diagnostics, provided the document
/// satisfies the structural rules.
pub fn serialize_document(doc: &GuidelineDocument) -> String {
    let mut w = Writer::default();
    w.raw("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    w.open("nnn", &[]);
    write_meta(&mut w, &doc.meta);
    write_custom(&mut w, &doc.custom);
    write_body(&mut w, &doc.body);
    w.close("nnn");
    w.out
}

#[derive(Default)]
struct Writer {
    out: String,
    depth: usize,
}

impl Writer {
    fn raw(&mut self, s: &str) {
        self.out.push_str(s);
    }

    fn pad(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    fn render_tag(name: &str, attrs: &[(&str, String)]) -> String {
        let mut sorted: Vec<&(&str, String)> = attrs.iter().collect();
        sorted.sort_by_key(|(k, _)| *k);
        let mut tag = format!("<{name}");
        for (k, v) in sorted {
            tag.push_str(&format!(" {k}=\"{}\"", esc_attr(v)));
        }
        tag
    }

    fn open(&mut self, name: &str, attrs: &[(&str, String)]) {
        self.pad();
        self.out.push_str(&Self::render_tag(name, attrs));
        self.out.push_str(">\n");
        self.depth += 1;
    }

    fn close(&mut self, name: &str) {
        self.depth -= 1;
        self.pad();
        self.out.push_str(&format!("</{name}>\n"));
    }

    fn leaf(&mut self, name: &str, attrs: &[(&str, String)]) {
        self.pad();
        self.out.push_str(&Self::render_tag(name, attrs));
        self.out.push_str("/>\n");
    }
}

fn esc_attr(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn attr(name: &'static str, value: &str) -> (&'static str, String) {
    (name, value.to_string())
}

fn opt_attr_pair(name: &'static str, value: &Option<String>) -> Option<(&'static str, String)> {
    value.as_ref().map(|v| (name, v.clone()))
}

fn write_meta(w: &mut Writer, meta: &Meta) {
    w.open("meta", &[]);
    w.leaf("title", &[attr("text", &meta.title)]);
    // absent theme is written as the empty string so the canonical form
    // satisfies the grammar; parsing folds it back to absent
    let def_attrs = vec![
        attr("text", &meta.definition.text),
        attr("theme", meta.definition.theme.as_deref().unwrap_or("")),
    ];
    if meta.definition.hints.is_empty() {
        w.leaf("definition", &def_attrs);
    } else {
        w.open("definition", &def_attrs);
        write_hints(w, &meta.definition.hints);
        w.close("definition");
    }
    w.leaf("version", &[attr("id", &meta.version_id)]);
    w.leaf("validation", &[attr("status", meta.validation_status.as_str())]);
    for (name, value) in [
        ("institution", &meta.institution),
        ("author", &meta.author),
        ("validator", &meta.validator),
        ("implementer", &meta.implementer),
    ] {
        if let Some(v) = value {
            w.leaf(name, &[attr("name", v)]);
        }
    }
    w.leaf("date", &[attr("text", &meta.date.format("%Y-%m-%d").to_string())]);
    w.close("meta");
}

fn write_custom(w: &mut Writer, custom: &Custom) {
    if custom.is_empty() {
        return;
    }
    w.open("custom", &[]);
    for r in &custom.recommended {
        w.leaf(
            "recommended",
            &[attr("id", &r.task_id), attr("score", &r.score.to_string())],
        );
    }
    for m in &custom.mandatory {
        w.leaf("mandatory", &[attr("id", &m.task_id)]);
    }
    w.close("custom");
}

fn write_body(w: &mut Writer, body: &GuidelineBody) {
    let attrs: Vec<_> = opt_attr_pair("source", &body.source).into_iter().collect();
    w.open("guideline", &attrs);
    if !body.factors.items.is_empty() || body.factors.source.is_some() {
        let attrs: Vec<_> = opt_attr_pair("source", &body.factors.source).into_iter().collect();
        if body.factors.items.is_empty() {
            w.leaf("factors", &attrs);
        } else {
            w.open("factors", &attrs);
            for f in &body.factors.items {
                write_factor(w, f);
            }
            w.close("factors");
        }
    }
    if !body.symptoms.items.is_empty() || body.symptoms.source.is_some() {
        let attrs: Vec<_> = opt_attr_pair("source", &body.symptoms.source).into_iter().collect();
        if body.symptoms.items.is_empty() {
            w.leaf("symptoms", &attrs);
        } else {
            w.open("symptoms", &attrs);
            for s in &body.symptoms.items {
                write_symptom(w, s);
            }
            w.close("symptoms");
        }
    }
    let o = &body.outcomes;
    if !o.items.is_empty() || !o.noc_labels.is_empty() || o.source.is_some() {
        let attrs: Vec<_> = opt_attr_pair("source", &o.source).into_iter().collect();
        w.open("outcomes", &attrs);
        write_labels(w, &o.noc_labels);
        for outcome in &o.items {
            write_outcome(w, outcome);
        }
        w.close("outcomes");
    }
    let t = &body.tasks;
    if !t.roots.is_empty() || !t.nic_labels.is_empty() || t.source.is_some() {
        let attrs: Vec<_> = opt_attr_pair("source", &t.source).into_iter().collect();
        w.open("tasks", &attrs);
        write_labels(w, &t.nic_labels);
        for node in &t.roots {
            write_task_node(w, node);
        }
        w.close("tasks");
    }
    let d = &body.documentations;
    if !d.items.is_empty() || d.source.is_some() {
        let attrs: Vec<_> = opt_attr_pair("source", &d.source).into_iter().collect();
        if d.items.is_empty() {
            w.leaf("documentations", &attrs);
        } else {
            w.open("documentations", &attrs);
            for item in &d.items {
                write_documentation(w, item);
            }
            w.close("documentations");
        }
    }
    w.close("guideline");
}

fn write_labels(w: &mut Writer, labels: &[String]) {
    if labels.is_empty() {
        return;
    }
    w.open("labels", &[]);
    for label in labels {
        w.leaf("label", &[attr("text", label)]);
    }
    w.close("labels");
}

fn write_factor(w: &mut Writer, f: &Factor) {
    let mut attrs = vec![attr("text", &f.text)];
    attrs.extend(opt_attr_pair("category", &f.category));
    attrs.extend(opt_attr_pair("subcategory", &f.subcategory));
    if f.factor_type == FactorType::Risk {
        attrs.push(attr("type", "risk"));
    }
    attrs.extend(opt_attr_pair("source", &f.source));
    if f.children.is_empty() && f.hints.is_empty() && f.examples.is_empty() {
        w.leaf("factor", &attrs);
        return;
    }
    w.open("factor", &attrs);
    if !f.children.is_empty() {
        w.open("factors", &[]);
        for child in &f.children {
            write_factor(w, child);
        }
        w.close("factors");
    }
    write_hints(w, &f.hints);
    write_examples(w, &f.examples);
    w.close("factor");
}

fn write_symptom(w: &mut Writer, s: &Symptom) {
    let mut attrs = vec![attr("text", &s.text)];
    attrs.extend(opt_attr_pair("category", &s.category));
    attrs.extend(opt_attr_pair("subcategory", &s.subcategory));
    attrs.extend(opt_attr_pair("source", &s.source));
    if s.hints.is_empty() && s.examples.is_empty() {
        w.leaf("symptom", &attrs);
        return;
    }
    w.open("symptom", &attrs);
    write_hints(w, &s.hints);
    write_examples(w, &s.examples);
    w.close("symptom");
}

fn write_outcome(w: &mut Writer, o: &Outcome) {
    let mut attrs = vec![
        attr("goal", o.goal.as_str()),
        attr("id", &o.id),
        attr("text", &o.text),
    ];
    attrs.extend(opt_attr_pair("source", &o.source));
    if o.hints.is_empty() && o.examples.is_empty() && o.inputs.is_empty() {
        w.leaf("outcome", &attrs);
        return;
    }
    w.open("outcome", &attrs);
    write_hints(w, &o.hints);
    write_examples(w, &o.examples);
    write_inputs(w, &o.inputs);
    w.close("outcome");
}

fn write_task_node(w: &mut Writer, node: &TaskNode) {
    match node {
        TaskNode::Atomic(t) => write_task(w, t),
        TaskNode::Composite(c) => {
            let mut attrs = Vec::new();
            attrs.extend(opt_attr_pair("name", &c.name));
            attrs.extend(opt_attr_pair("text", &c.text));
            attrs.extend(opt_attr_pair("source", &c.source));
            let element = c.mode.element_name();
            if c.children.is_empty() {
                w.leaf(element, &attrs);
                return;
            }
            w.open(element, &attrs);
            for child in &c.children {
                write_task_node(w, child);
            }
            w.close(element);
        }
    }
}

fn write_task(w: &mut Writer, t: &AtomicTask) {
    let mut attrs = vec![attr("id", &t.id), attr("text", &t.text)];
    if let Some(e) = t.predicted_effort {
        attrs.push(attr("predictedeffort", &e.to_string()));
    }
    if let Some(s) = t.score {
        attrs.push(attr("score", &s.to_string()));
    }
    attrs.extend(opt_attr_pair("source", &t.source));
    if t.hints.is_empty() && t.examples.is_empty() && t.inputs.is_empty() {
        w.leaf("task", &attrs);
        return;
    }
    w.open("task", &attrs);
    write_hints(w, &t.hints);
    write_examples(w, &t.examples);
    write_inputs(w, &t.inputs);
    w.close("task");
}

fn write_documentation(w: &mut Writer, d: &Documentation) {
    let mut attrs = vec![attr("id", &d.id), attr("text", &d.text)];
    attrs.extend(opt_attr_pair("source", &d.source));
    if d.hints.is_empty() && d.examples.is_empty() && d.inputs.is_empty() {
        w.leaf("documentation", &attrs);
        return;
    }
    w.open("documentation", &attrs);
    write_hints(w, &d.hints);
    write_examples(w, &d.examples);
    write_inputs(w, &d.inputs);
    w.close("documentation");
}

fn write_hints(w: &mut Writer, hints: &[Hint]) {
    if hints.is_empty() {
        return;
    }
    w.open("hints", &[]);
    for h in hints {
        let mut attrs = vec![attr("text", &h.text)];
        attrs.extend(opt_attr_pair("from", &h.from));
        if let Some(s) = h.score {
            attrs.push(attr("score", &s.to_string()));
        }
        w.leaf("hint", &attrs);
    }
    w.close("hints");
}

fn write_examples(w: &mut Writer, examples: &[Example]) {
    if examples.is_empty() {
        return;
    }
    w.open("examples", &[]);
    for e in examples {
        let mut attrs = vec![attr("text", &e.text)];
        if let Some(s) = e.score {
            attrs.push(attr("score", &s.to_string()));
        }
        if e.children.is_empty() {
            w.leaf("example", &attrs);
        } else {
            w.open("example", &attrs);
            write_examples(w, &e.children);
            w.close("example");
        }
    }
    w.close("examples");
}

fn write_inputs(w: &mut Writer, inputs: &[InputSpec]) {
    if inputs.is_empty() {
        return;
    }
    w.open("inputs", &[]);
    for input in inputs {
        let attrs = [attr("label", &input.label), attr("xmlns", RNG_NS)];
        match &input.body {
            InputBody::Pattern(pattern) => {
                w.open("input", &attrs);
                let depth = w.depth;
                w.raw(&pattern_to_xml(pattern, depth));
                w.close("input");
            }
            InputBody::Opaque(raw_body) => {
                // verbatim: no whitespace added around the stored body
                w.pad();
                w.out.push_str(&Writer::render_tag("input", &attrs));
                w.out.push('>');
                w.out.push_str(raw_body);
                w.out.push_str("</input>\n");
            }
        }
    }
    w.close("inputs");
}

#[cfg(test)]
mod tests {
    use super::*;

    const META_FRAGMENT: &str = r#"<nnn>
      <meta>
        <title text="fatigue"/>
        <definition text="An overwhelming, sustained sense of exhaustion and decreased capacity for physical and mental work at usual level"/>
        <version id="1.0"/>
        <validation status="implementing"/>
        <institution name="University of Vienna"/>
        <author name="Georg Kaes"/>
        <validator name="Stefanie Rinderle-Ma"/>
        <implementer name="Juergen Mangler"/>
        <date text="2013-04-01"/>
      </meta>
      <guideline/>
    </nnn>"#;

    #[test]
    fn meta_fields_parse_leniently() {
        let result = parse_document(META_FRAGMENT, ParseMode::Lenient);
        let doc = result.document.expect("document");
        assert_eq!(doc.meta.title, "fatigue");
        assert_eq!(doc.meta.version_id, "1.0");
        assert_eq!(doc.meta.validation_status, ValidationStatus::Implementing);
        assert_eq!(doc.meta.institution.as_deref(), Some("University of Vienna"));
        assert_eq!(doc.meta.date, NaiveDate::from_ymd_opt(2013, 4, 1).unwrap());
        let codes: Vec<Code> = result.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::ThemeMissing]);
    }

    #[test]
    fn missing_theme_is_a_strict_error_at_the_definition() {
        let result = parse_document(META_FRAGMENT, ParseMode::Strict);
        assert!(result.document.is_none());
        let attr_missing: Vec<&Diagnostic> = result
            .diagnostics
            .iter()
            .filter(|d| d.code == Code::AttrMissing)
            .collect();
        assert_eq!(attr_missing.len(), 1);
        assert_eq!(attr_missing[0].path, "/meta/definition");
    }

    #[test]
    fn label_name_attribute_is_repaired_with_a_warning() {
        let xml = r#"<nnn>
          <meta>
            <title text="t"/><definition text="d" theme="x"/><version id="1"/>
            <validation status="research"/><date text="2013-04-01"/>
          </meta>
          <guideline>
            <tasks>
              <labels><label name="Energy Management"/></labels>
              <task id="0" text="Evaluate medication"/>
            </tasks>
          </guideline>
        </nnn>"#;
        let result = parse_document(xml, ParseMode::Lenient);
        let doc = result.document.expect("document");
        assert_eq!(doc.body.tasks.nic_labels, vec!["Energy Management"]);
        let codes: Vec<Code> = result.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::LabelAttr]);
        assert_eq!(result.diagnostics[0].path, "/guideline/tasks/labels/label");

        let strict = parse_document(xml, ParseMode::Strict);
        assert!(strict.document.is_none());
        assert!(strict.diagnostics.iter().any(|d| d.code == Code::AttrMissing));
    }

    #[test]
    fn bad_validation_status_is_an_enum_error() {
        let xml = META_FRAGMENT.replace("implementing", "finished");
        let result = parse_document(&xml, ParseMode::Lenient);
        assert!(result.document.is_none());
        assert!(result.diagnostics.iter().any(|d| d.code == Code::BadEnum));
    }

    #[test]
    fn singular_composite_names_are_accepted_leniently() {
        let xml = r#"<nnn>
          <meta>
            <title text="t"/><definition text="d" theme=""/><version id="1"/>
            <validation status="research"/><date text="2013-04-01"/>
          </meta>
          <guideline>
            <tasks>
              <sequential-task>
                <task id="a" text="first"/>
                <task id="b" text="second"/>
              </sequential-task>
            </tasks>
          </guideline>
        </nnn>"#;
        let result = parse_document(xml, ParseMode::Lenient);
        let doc = result.document.expect("document");
        let codes: Vec<Code> = result.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::CompositeName]);
        match &doc.body.tasks.roots[0] {
            TaskNode::Composite(c) => {
                assert_eq!(c.mode, CompositionMode::Sequential);
                assert_eq!(c.children.len(), 2);
            }
            _ => panic!("expected composite"),
        }
        assert!(parse_document(xml, ParseMode::Strict).document.is_none());
    }

    #[test]
    fn dtd_is_rejected() {
        let xml = "<!DOCTYPE nnn [<!ENTITY x \"y\">]><nnn/>";
        let result = parse_document(xml, ParseMode::Lenient);
        assert!(result.document.is_none());
        assert_eq!(result.diagnostics[0].code, Code::XmlMalformed);
    }

    #[test]
    fn non_utf8_encoding_declaration_is_rejected() {
        let xml = "<?xml version=\"1.0\" encoding=\"ISO-8859-1\"?><nnn/>";
        let result = parse_document(xml, ParseMode::Lenient);
        assert!(result.document.is_none());
        assert_eq!(result.diagnostics[0].code, Code::XmlMalformed);
    }

    #[test]
    fn empty_custom_section_is_omitted_on_serialization() {
        let result = parse_document(META_FRAGMENT, ParseMode::Lenient);
        let doc = result.document.unwrap();
        let xml = serialize_document(&doc);
        assert!(!xml.contains("<custom"));
        // round-trip oracle: omission preserves equality
        let back = parse_document(&xml, ParseMode::Strict);
        assert_eq!(back.diagnostics, vec![]);
        assert_eq!(back.document.unwrap(), doc);
    }

    #[test]
    fn hints_round_trip_as_attribute_form() {
        let xml = r#"<nnn>
          <meta>
            <title text="t"/><definition text="d" theme=""/><version id="1"/>
            <validation status="research"/><date text="2013-04-01"/>
          </meta>
          <guideline>
            <tasks>
              <task id="0" text="rest">
                <hints><hint>Content-form   hint text.</hint></hints>
              </task>
            </tasks>
          </guideline>
        </nnn>"#;
        let result = parse_document(xml, ParseMode::Lenient);
        assert_eq!(result.diagnostics, vec![]);
        let doc = result.document.unwrap();
        let task = doc.find_task("0").unwrap();
        assert_eq!(task.hints[0].text, "Content-form hint text.");
        let serialized = serialize_document(&doc);
        assert!(serialized.contains("<hint text=\"Content-form hint text.\"/>"));
        let back = parse_document(&serialized, ParseMode::Strict);
        assert_eq!(back.diagnostics, vec![]);
        assert_eq!(back.document.unwrap(), doc);
    }

    #[test]
    fn opaque_input_bodies_survive_round_trips_verbatim() {
        let xml = r#"<nnn>
          <meta>
            <title text="t"/><definition text="d" theme=""/><version id="1"/>
            <validation status="research"/><date text="2013-04-01"/>
          </meta>
          <guideline>
            <tasks>
              <task id="0" text="rest">
                <inputs>
                  <input label="weird" xmlns="http://relaxng.org/ns/structure/1.0"><interleave><text/></interleave></input>
                </inputs>
              </task>
            </tasks>
          </guideline>
        </nnn>"#;
        let result = parse_document(xml, ParseMode::Lenient);
        let doc = result.document.expect("document despite opaque body");
        let codes: Vec<Code> = result.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::OpaqueInput]);
        let body = match &doc.find_task("0").unwrap().inputs[0].body {
            InputBody::Opaque(raw_body) => raw_body.clone(),
            _ => panic!("expected opaque"),
        };
        assert_eq!(body, "<interleave><text/></interleave>");
        let serialized = serialize_document(&doc);
        let back = parse_document(&serialized, ParseMode::Lenient);
        let doc2 = back.document.unwrap();
        assert_eq!(doc2, doc);
    }

    #[test]
    fn unknown_elements_are_skipped_with_a_warning() {
        let xml = r#"<nnn>
          <meta>
            <title text="t"/><definition text="d" theme=""/><version id="1"/>
            <validation status="research"/><date text="2013-04-01"/>
          </meta>
          <guideline>
            <symptoms>
              <symptom text="tired"><causes/></symptom>
            </symptoms>
          </guideline>
        </nnn>"#;
        let lenient = parse_document(xml, ParseMode::Lenient);
        assert!(lenient.document.is_some());
        let codes: Vec<Code> = lenient.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(codes, vec![Code::UnknownElementSkipped]);
        let strict = parse_document(xml, ParseMode::Strict);
        assert!(strict.diagnostics.iter().any(|d| d.code == Code::UnknownElement));
    }

    #[test]
    fn parse_bytes_handles_arbitrary_garbage() {
        for bytes in [&b"\xff\xfe\x00"[..], b"", b"<nnn", b"plain text"] {
            let result = parse_bytes(bytes, ParseMode::Lenient);
            assert!(result.document.is_none());
            assert!(result.diagnostics.iter().any(|d| d.is_error()));
        }
    }
}
