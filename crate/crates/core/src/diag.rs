//! Diagnostics: severities, the frozen code catalog, and reports.
//!
//! Every validation, parse, pattern and export failure in this crate is
//! reported as a [`Diagnostic`] carrying a stable code from the catalog
//! below. Codes are part of the external contract: tools and tests key on
//! them, never on message wording.

use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

/// How bad a diagnostic is. Only `Error` affects exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Severity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// The frozen diagnostic catalog.
///
/// Naming convention: `E-*` codes default to error severity, `W-*` to
/// warning, `I-*` to info. The only severity override in the tool is the
/// `--refs-warn` CLI flag, which demotes `E-DANGLING-REF` diagnostics to
/// warnings without changing their code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    // -- parse: document shape --
    /// Input is not well-formed XML, declares a non-UTF-8 encoding, or
    /// contains a DTD (entity processing is disabled).
    XmlMalformed,
    /// The `<nnn>` root, `<meta>` section or `<guideline>` section is absent.
    MissingSection,
    /// A section that may occur at most once occurs again.
    DupSection,
    /// A required child element is absent.
    ElementMissing,
    /// A required attribute is absent.
    AttrMissing,
    /// An enum-valued attribute holds a value outside its enumeration.
    BadEnum,
    /// The meta date does not parse as an ISO 8601 calendar date.
    BadDate,
    /// An integer-typed attribute does not parse as a base-10 integer.
    BadInt,
    /// Strict mode: an attribute the grammar does not declare.
    AttrUnknown,
    /// Strict mode: an element the grammar does not declare.
    UnknownElement,
    // -- parse: lenient repairs and skips --
    /// Lenient repair: `<definition>` without the `theme` attribute.
    ThemeMissing,
    /// Lenient repair: `<label>` carries `name` instead of `text`.
    LabelAttr,
    /// Lenient repair: singular composite spelling (`<sequential-task>`).
    CompositeName,
    /// Lenient repair: `source` attribute accepted where the element grammar
    /// omits it.
    SourceAttr,
    /// Lenient skip: unknown attribute ignored.
    UnknownAttr,
    /// Lenient skip: unknown element ignored.
    UnknownElementSkipped,
    /// Input body outside the supported pattern subset; stored opaquely and
    /// unusable for record validation.
    OpaqueInput,
    // -- structural validation --
    /// Score outside the 1..=10 range.
    ScoreRange,
    /// Factor nesting deeper than one level.
    FactorDepth,
    /// Example nesting deeper than one level.
    ExampleDepth,
    /// `subcategory` present without `category`.
    SubcatWithoutCategory,
    /// Composite task with no children.
    EmptyComposite,
    /// Negative `predictedeffort`.
    EffortRange,
    // -- semantic validation --
    /// Duplicate id within one id scope.
    DupId,
    /// Custom section references a task id that does not exist.
    DanglingRef,
    /// Task is both mandatory and recommended.
    MandAndRec,
    /// Guideline body section with no items.
    EmptySection,
    /// Repeated custom entry for the same task id; later entries are ignored.
    DupCustom,
    /// Same id used in more than one id scope.
    IdCrossScope,
    // -- input schema --
    /// Pattern construct outside the supported subset.
    PatternUnsupported,
    /// Invalid param/datatype pairing or unparseable param value.
    PatternParam,
    /// Record element or attribute missing or misnamed.
    RecElement,
    /// Record text not valid for the expected datatype or fixed value.
    RecDatatype,
    /// Record value violates length or inclusive bounds.
    RecBounds,
    /// Record carries elements or attributes the pattern does not allow.
    RecExtra,
    // -- queries, export, store --
    /// Document path addresses nothing.
    BadPath,
    /// Export refused: the document contains no tasks.
    ExportEmpty,
    /// Content emitted through a workaround mapping; fidelity reduced.
    ExportFidelity,
    /// Parallel branches were linearized into a sequential chain.
    Linearized,
    /// Filesystem failure.
    Io,
}

impl Code {
    /// Every code in the catalog, in catalog order.
    pub const ALL: &'static [Code] = &[
        Code::XmlMalformed,
        Code::MissingSection,
        Code::DupSection,
        Code::ElementMissing,
        Code::AttrMissing,
        Code::BadEnum,
        Code::BadDate,
        Code::BadInt,
        Code::AttrUnknown,
        Code::UnknownElement,
        Code::ThemeMissing,
        Code::LabelAttr,
        Code::CompositeName,
        Code::SourceAttr,
        Code::UnknownAttr,
        Code::UnknownElementSkipped,
        Code::OpaqueInput,
        Code::ScoreRange,
        Code::FactorDepth,
        Code::ExampleDepth,
        Code::SubcatWithoutCategory,
        Code::EmptyComposite,
        Code::EffortRange,
        Code::DupId,
        Code::DanglingRef,
        Code::MandAndRec,
        Code::EmptySection,
        Code::DupCustom,
        Code::IdCrossScope,
        Code::PatternUnsupported,
        Code::PatternParam,
        Code::RecElement,
        Code::RecDatatype,
        Code::RecBounds,
        Code::RecExtra,
        Code::BadPath,
        Code::ExportEmpty,
        Code::ExportFidelity,
        Code::Linearized,
        Code::Io,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Code::XmlMalformed => "E-XML-MALFORMED",
            Code::MissingSection => "E-MISSING-SECTION",
            Code::DupSection => "E-DUP-SECTION",
            Code::ElementMissing => "E-ELEMENT-MISSING",
            Code::AttrMissing => "E-ATTR-MISSING",
            Code::BadEnum => "E-ENUM",
            Code::BadDate => "E-DATE",
            Code::BadInt => "E-INT",
            Code::AttrUnknown => "E-ATTR-UNKNOWN",
            Code::UnknownElement => "E-UNKNOWN-ELEMENT",
            Code::ThemeMissing => "W-THEME-MISSING",
            Code::LabelAttr => "W-LABEL-ATTR",
            Code::CompositeName => "W-COMPOSITE-NAME",
            Code::SourceAttr => "W-SOURCE-ATTR",
            Code::UnknownAttr => "W-UNKNOWN-ATTR",
            Code::UnknownElementSkipped => "W-UNKNOWN-ELEMENT",
            Code::OpaqueInput => "W-OPAQUE-INPUT",
            Code::ScoreRange => "E-SCORE-RANGE",
            Code::FactorDepth => "E-FACTOR-DEPTH",
            Code::ExampleDepth => "E-EXAMPLE-DEPTH",
            Code::SubcatWithoutCategory => "E-SUBCAT",
            Code::EmptyComposite => "E-EMPTY-COMPOSITE",
            Code::EffortRange => "E-EFFORT-RANGE",
            Code::DupId => "E-DUP-ID",
            Code::DanglingRef => "E-DANGLING-REF",
            Code::MandAndRec => "W-MAND-AND-REC",
            Code::EmptySection => "W-EMPTY-SECTION",
            Code::DupCustom => "W-DUP-CUSTOM",
            Code::IdCrossScope => "W-ID-CROSS-SCOPE",
            Code::PatternUnsupported => "E-PATTERN-UNSUPPORTED",
            Code::PatternParam => "E-PATTERN-PARAM",
            Code::RecElement => "E-REC-ELEMENT",
            Code::RecDatatype => "E-REC-DATATYPE",
            Code::RecBounds => "E-REC-BOUNDS",
            Code::RecExtra => "E-REC-EXTRA",
            Code::BadPath => "E-BAD-PATH",
            Code::ExportEmpty => "E-EXPORT-EMPTY",
            Code::ExportFidelity => "W-EXPORT-FIDELITY",
            Code::Linearized => "I-LINEARIZED",
            Code::Io => "E-IO",
        }
    }

    /// Severity implied by the code prefix.
    pub fn default_severity(self) -> Severity {
        match self.as_str().as_bytes()[0] {
            b'W' => Severity::Warning,
            b'I' => Severity::Info,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// One finding: severity, stable code, document path and a human message.
///
/// Paths are slash-separated element names with 1-based sibling ordinals
/// where an element has same-named siblings, e.g.
/// `/guideline/factors/factor[3]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    /// Build a diagnostic with the code's default severity.
    pub fn new(code: Code, path: impl Into<String>, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: code.default_severity(),
            code,
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} at {}: {}",
            self.severity, self.code, self.path, self.message
        )
    }
}

impl std::error::Error for Diagnostic {}

impl Serialize for Diagnostic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Diagnostic", 4)?;
        s.serialize_field("severity", &self.severity)?;
        s.serialize_field("code", &self.code)?;
        s.serialize_field("path", &self.path)?;
        s.serialize_field("message", &self.message)?;
        s.end()
    }
}

/// A list of diagnostics with pre-computed severity tallies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
    pub error_count: usize,
    pub warning_count: usize,
}

impl ValidationReport {
    pub fn new(diagnostics: Vec<Diagnostic>) -> Self {
        let error_count = diagnostics.iter().filter(|d| d.is_error()).count();
        let warning_count = diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Warning)
            .count();
        ValidationReport {
            diagnostics,
            error_count,
            warning_count,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn codes(&self) -> Vec<Code> {
        self.diagnostics.iter().map(|d| d.code).collect()
    }
}

/// Sort diagnostics by path, then code; the order every report uses.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| a.path.cmp(&b.path).then_with(|| a.code.cmp(&b.code)));
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_is_complete_and_distinct() {
        let mut seen = std::collections::BTreeSet::new();
        for code in Code::ALL {
            assert!(seen.insert(code.as_str()), "duplicate code {code}");
        }
        assert_eq!(Code::ALL.len(), 40);
    }

    #[test]
    fn severity_follows_prefix() {
        assert_eq!(Code::ScoreRange.default_severity(), Severity::Error);
        assert_eq!(Code::ThemeMissing.default_severity(), Severity::Warning);
        assert_eq!(Code::Linearized.default_severity(), Severity::Info);
    }

    #[test]
    fn report_counts_match_tallies() {
        let report = ValidationReport::new(vec![
            Diagnostic::new(Code::ScoreRange, "/custom/recommended", "score 11"),
            Diagnostic::new(Code::EmptySection, "/guideline/factors", "empty"),
        ]);
        assert_eq!(report.error_count, 1);
        assert_eq!(report.warning_count, 1);
    }

    #[test]
    fn json_shape_is_fixed() {
        let d = Diagnostic::new(Code::ScoreRange, "/custom/recommended[1]", "score 11 out of range");
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["severity"], "error");
        assert_eq!(v["code"], "E-SCORE-RANGE");
        assert_eq!(v["path"], "/custom/recommended[1]");
        assert!(v["message"].is_string());
    }
}
