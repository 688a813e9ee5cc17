//! The in-memory document model.
//!
//! Holds every element and attribute of the guideline formalization. The
//! model is immutable after construction and deliberately looser than the
//! validation rules: scores are raw integers, factor and example trees may
//! be arbitrarily deep, composites may be empty. [`crate::validate`] turns
//! those looseness points into diagnostics so that broken documents can be
//! represented, reported on and tested.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::inputschema::PatternNode;

/// Root aggregate: one meta section, an optional custom section and one
/// guideline body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuidelineDocument {
    pub meta: Meta,
    pub custom: Custom,
    pub body: GuidelineBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Meta {
    pub title: String,
    pub definition: Definition,
    pub version_id: String,
    pub validation_status: ValidationStatus,
    pub institution: Option<String>,
    pub author: Option<String>,
    pub validator: Option<String>,
    pub implementer: Option<String>,
    pub date: NaiveDate,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Definition {
    pub text: String,
    pub theme: Option<String>,
    pub hints: Vec<Hint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ValidationStatus {
    Research,
    Implementing,
    Testing,
    Running,
    Expired,
}

impl ValidationStatus {
    pub const ALL: &'static [ValidationStatus] = &[
        ValidationStatus::Research,
        ValidationStatus::Implementing,
        ValidationStatus::Testing,
        ValidationStatus::Running,
        ValidationStatus::Expired,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ValidationStatus::Research => "research",
            ValidationStatus::Implementing => "implementing",
            ValidationStatus::Testing => "testing",
            ValidationStatus::Running => "running",
            ValidationStatus::Expired => "expired",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|v| v.as_str() == s)
    }
}

impl Serialize for ValidationStatus {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for ValidationStatus {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        ValidationStatus::parse(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown validation status {s:?}")))
    }
}

/// Institution-specific task preferences. Scores are stored raw; range
/// checking is a structural-validation concern.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Custom {
    pub recommended: Vec<Recommended>,
    pub mandatory: Vec<Mandatory>,
}

impl Custom {
    pub fn is_empty(&self) -> bool {
        self.recommended.is_empty() && self.mandatory.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recommended {
    pub task_id: String,
    pub score: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mandatory {
    pub task_id: String,
}

/// A preference score, guaranteed in 1..=10.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Score(u8);

impl Score {
    pub const MIN: i64 = 1;
    pub const MAX: i64 = 10;

    pub fn new(value: i64) -> Option<Score> {
        (Self::MIN..=Self::MAX).contains(&value).then(|| Score(value as u8))
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn in_range(value: i64) -> bool {
        (Self::MIN..=Self::MAX).contains(&value)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hint {
    pub from: Option<String>,
    pub text: String,
    pub score: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub text: String,
    pub score: Option<i64>,
    pub children: Vec<Example>,
}

/// A typed documentation input attached to a task, outcome or
/// documentation item.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSpec {
    pub label: String,
    pub body: InputBody,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputBody {
    /// Compiled pattern from the supported schema subset.
    Pattern(PatternNode),
    /// Raw XML kept verbatim; outside the subset, cannot validate records.
    Opaque(String),
}

impl InputSpec {
    pub fn pattern(&self) -> Option<&PatternNode> {
        match &self.body {
            InputBody::Pattern(p) => Some(p),
            InputBody::Opaque(_) => None,
        }
    }
}

/// The care-specific knowledge: factors, symptoms, outcomes, tasks and
/// documentation emphases. `source` on the body or a section is inherited
/// by elements below it.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GuidelineBody {
    pub factors: Section<Factor>,
    pub symptoms: Section<Symptom>,
    pub outcomes: OutcomeSection,
    pub tasks: TasksSection,
    pub documentations: Section<Documentation>,
    pub source: Option<String>,
}

/// A plain body section: optional source plus its items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Section<T> {
    pub source: Option<String>,
    pub items: Vec<T>,
}

impl<T> Default for Section<T> {
    fn default() -> Self {
        Section {
            source: None,
            items: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OutcomeSection {
    pub source: Option<String>,
    pub noc_labels: Vec<String>,
    pub items: Vec<Outcome>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TasksSection {
    pub source: Option<String>,
    pub nic_labels: Vec<String>,
    /// Top-level nodes. A flat list acts as children of an implicit
    /// parallel root: no ordering between them unless composed.
    pub roots: Vec<TaskNode>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factor {
    pub text: String,
    pub category: Option<String>,
    pub subcategory: Option<String>,
    /// Absent in the source defaults to `Related`.
    pub factor_type: FactorType,
    pub hints: Vec<Hint>,
    pub examples: Vec<Example>,
    pub source: Option<String>,
    pub children: Vec<Factor>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FactorType {
    #[default]
    Related,
    Risk,
}

impl FactorType {
    pub fn as_str(self) -> &'static str {
        match self {
            FactorType::Related => "related",
            FactorType::Risk => "risk",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "related" => Some(FactorType::Related),
            "risk" => Some(FactorType::Risk),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symptom {
    pub text: String,
    pub category: Option<String>,
    pub subcategory: Option<String>,
    pub hints: Vec<Hint>,
    pub examples: Vec<Example>,
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub id: String,
    pub goal: OutcomeGoal,
    pub text: String,
    pub hints: Vec<Hint>,
    pub examples: Vec<Example>,
    pub inputs: Vec<InputSpec>,
    pub source: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutcomeGoal {
    Achieve,
    Maintain,
    Prevent,
}

impl OutcomeGoal {
    pub const ALL: &'static [OutcomeGoal] = &[
        OutcomeGoal::Achieve,
        OutcomeGoal::Maintain,
        OutcomeGoal::Prevent,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OutcomeGoal::Achieve => "achieve",
            OutcomeGoal::Maintain => "maintain",
            OutcomeGoal::Prevent => "prevent",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|v| v.as_str() == s)
    }
}

/// Either an atomic task or a sequential/parallel composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TaskNode {
    Atomic(AtomicTask),
    Composite(CompositeTask),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomicTask {
    pub id: String,
    pub text: String,
    /// Non-negative when valid; the unit is not fixed by the format
    /// (minutes suggested).
    pub predicted_effort: Option<i64>,
    pub score: Option<i64>,
    pub hints: Vec<Hint>,
    pub examples: Vec<Example>,
    pub inputs: Vec<InputSpec>,
    pub source: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositeTask {
    pub mode: CompositionMode,
    pub name: Option<String>,
    pub text: Option<String>,
    pub source: Option<String>,
    pub children: Vec<TaskNode>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompositionMode {
    Sequential,
    Parallel,
}

impl CompositionMode {
    /// Canonical element name.
    pub fn element_name(self) -> &'static str {
        match self {
            CompositionMode::Sequential => "sequential-tasks",
            CompositionMode::Parallel => "parallel-tasks",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Documentation {
    pub id: String,
    pub text: String,
    pub hints: Vec<Hint>,
    pub examples: Vec<Example>,
    pub inputs: Vec<InputSpec>,
    pub source: Option<String>,
}

impl GuidelineDocument {
    /// Look up the unique atomic task with the given id. Absence is a
    /// valid result; duplicate ids (a validation error) resolve to the
    /// first occurrence in document order.
    pub fn find_task(&self, id: &str) -> Option<&AtomicTask> {
        self.all_atomic_tasks().into_iter().find(|t| t.id == id)
    }

    /// Depth-first, left-to-right flattening of the task tree.
    pub fn all_atomic_tasks(&self) -> Vec<&AtomicTask> {
        let mut out = Vec::new();
        for root in &self.body.tasks.roots {
            collect_atomics(root, &mut out);
        }
        out
    }
}

fn collect_atomics<'a>(node: &'a TaskNode, out: &mut Vec<&'a AtomicTask>) {
    match node {
        TaskNode::Atomic(task) => out.push(task),
        TaskNode::Composite(c) => {
            for child in &c.children {
                collect_atomics(child, out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn atomic(id: &str, text: &str) -> TaskNode {
        TaskNode::Atomic(AtomicTask {
            id: id.into(),
            text: text.into(),
            predicted_effort: None,
            score: None,
            hints: vec![],
            examples: vec![],
            inputs: vec![],
            source: None,
        })
    }

    fn doc_with_roots(roots: Vec<TaskNode>) -> GuidelineDocument {
        GuidelineDocument {
            meta: Meta {
                title: "t".into(),
                definition: Definition {
                    text: "d".into(),
                    theme: None,
                    hints: vec![],
                },
                version_id: "1".into(),
                validation_status: ValidationStatus::Research,
                institution: None,
                author: None,
                validator: None,
                implementer: None,
                date: NaiveDate::from_ymd_opt(2013, 4, 1).unwrap(),
            },
            custom: Custom::default(),
            body: GuidelineBody {
                tasks: TasksSection {
                    source: None,
                    nic_labels: vec![],
                    roots,
                },
                ..GuidelineBody::default()
            },
        }
    }

    #[test]
    fn find_task_absent_in_empty_section() {
        let doc = doc_with_roots(vec![]);
        assert!(doc.find_task("0").is_none());
        assert!(doc.all_atomic_tasks().is_empty());
    }

    #[test]
    fn single_atomic_task_flattens_to_itself() {
        let doc = doc_with_roots(vec![atomic("7", "only")]);
        let tasks = doc.all_atomic_tasks();
        assert_eq!(tasks.len(), 1);
        assert_eq!(tasks[0].id, "7");
        assert_eq!(doc.find_task("7").unwrap().text, "only");
    }

    #[test]
    fn flattening_is_document_order() {
        // sequential(A, parallel(B, C)) flattens to [A, B, C]
        let doc = doc_with_roots(vec![TaskNode::Composite(CompositeTask {
            mode: CompositionMode::Sequential,
            name: None,
            text: None,
            source: None,
            children: vec![
                atomic("A", "a"),
                TaskNode::Composite(CompositeTask {
                    mode: CompositionMode::Parallel,
                    name: None,
                    text: None,
                    source: None,
                    children: vec![atomic("B", "b"), atomic("C", "c")],
                }),
            ],
        })]);
        let ids: Vec<&str> = doc.all_atomic_tasks().iter().map(|t| t.id.as_str()).collect();
        assert_eq!(ids, ["A", "B", "C"]);
    }

    #[test]
    fn score_bounds() {
        assert!(Score::new(0).is_none());
        assert!(Score::new(1).is_some());
        assert!(Score::new(10).is_some());
        assert!(Score::new(11).is_none());
        assert_eq!(Score::new(7).unwrap().value(), 7);
    }
}
