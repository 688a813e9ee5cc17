//! Pre-order traversal of a document with canonical paths.

use crate::model::*;
use crate::path::sibling_path;

/// One visited element.
#[derive(Debug, Clone, Copy)]
pub enum Node<'a> {
    Title(&'a str),
    Definition(&'a Definition),
    Hint(&'a Hint),
    Recommended(&'a Recommended),
    Mandatory(&'a Mandatory),
    Guideline(&'a GuidelineBody),
    FactorsSection(&'a Section<Factor>),
    Factor(&'a Factor),
    SymptomsSection(&'a Section<Symptom>),
    Symptom(&'a Symptom),
    OutcomesSection(&'a OutcomeSection),
    Outcome(&'a Outcome),
    TasksSection(&'a TasksSection),
    Task(&'a AtomicTask),
    Composite(&'a CompositeTask),
    DocumentationsSection(&'a Section<Documentation>),
    Documentation(&'a Documentation),
    Example(&'a Example),
    Input(&'a InputSpec),
    Label(&'a str),
}

impl<'a> Node<'a> {
    /// The element's own source attribute, where the model carries one.
    pub fn source(&self) -> Option<&'a str> {
        match self {
            Node::Guideline(b) => b.source.as_deref(),
            Node::FactorsSection(s) => s.source.as_deref(),
            Node::Factor(f) => f.source.as_deref(),
            Node::SymptomsSection(s) => s.source.as_deref(),
            Node::Symptom(s) => s.source.as_deref(),
            Node::OutcomesSection(s) => s.source.as_deref(),
            Node::Outcome(o) => o.source.as_deref(),
            Node::TasksSection(s) => s.source.as_deref(),
            Node::Task(t) => t.source.as_deref(),
            Node::Composite(c) => c.source.as_deref(),
            Node::DocumentationsSection(s) => s.source.as_deref(),
            Node::Documentation(d) => d.source.as_deref(),
            _ => None,
        }
    }
}

pub fn walk<'a>(doc: &'a GuidelineDocument, visit: &mut dyn FnMut(&str, Node<'a>)) {
    visit("/meta/title", Node::Title(&doc.meta.title));
    visit("/meta/definition", Node::Definition(&doc.meta.definition));
    walk_hints("/meta/definition", &doc.meta.definition.hints, visit);

    let rec_total = doc.custom.recommended.len();
    for (i, r) in doc.custom.recommended.iter().enumerate() {
        visit(&sibling_path("/custom", "recommended", i, rec_total), Node::Recommended(r));
    }
    let man_total = doc.custom.mandatory.len();
    for (i, m) in doc.custom.mandatory.iter().enumerate() {
        visit(&sibling_path("/custom", "mandatory", i, man_total), Node::Mandatory(m));
    }

    let body = &doc.body;
    visit("/guideline", Node::Guideline(body));

    visit("/guideline/factors", Node::FactorsSection(&body.factors));
    let total = body.factors.items.len();
    for (i, f) in body.factors.items.iter().enumerate() {
        walk_factor(&sibling_path("/guideline/factors", "factor", i, total), f, visit);
    }

    visit("/guideline/symptoms", Node::SymptomsSection(&body.symptoms));
    let total = body.symptoms.items.len();
    for (i, s) in body.symptoms.items.iter().enumerate() {
        let path = sibling_path("/guideline/symptoms", "symptom", i, total);
        visit(&path, Node::Symptom(s));
        walk_hints(&path, &s.hints, visit);
        walk_examples(&path, &s.examples, visit);
    }

    visit("/guideline/outcomes", Node::OutcomesSection(&body.outcomes));
    walk_labels("/guideline/outcomes", &body.outcomes.noc_labels, visit);
    let total = body.outcomes.items.len();
    for (i, o) in body.outcomes.items.iter().enumerate() {
        let path = sibling_path("/guideline/outcomes", "outcome", i, total);
        visit(&path, Node::Outcome(o));
        walk_hints(&path, &o.hints, visit);
        walk_examples(&path, &o.examples, visit);
        walk_inputs(&path, &o.inputs, visit);
    }

    visit("/guideline/tasks", Node::TasksSection(&body.tasks));
    walk_labels("/guideline/tasks", &body.tasks.nic_labels, visit);
    for (node, path) in task_node_paths("/guideline/tasks", &body.tasks.roots) {
        walk_task_node(&path, node, visit);
    }

    visit("/guideline/documentations", Node::DocumentationsSection(&body.documentations));
    let total = body.documentations.items.len();
    for (i, d) in body.documentations.items.iter().enumerate() {
        let path = sibling_path("/guideline/documentations", "documentation", i, total);
        visit(&path, Node::Documentation(d));
        walk_hints(&path, &d.hints, visit);
        walk_examples(&path, &d.examples, visit);
        walk_inputs(&path, &d.inputs, visit);
    }
}

/// Paths for a list of task nodes, with per-name ordinals.
pub fn task_node_paths<'a>(
    parent: &str,
    children: &'a [TaskNode],
) -> Vec<(&'a TaskNode, String)> {
    let name_of = |n: &TaskNode| match n {
        TaskNode::Atomic(_) => "task",
        TaskNode::Composite(c) => c.mode.element_name(),
    };
    let mut out = Vec::new();
    for (i, child) in children.iter().enumerate() {
        let name = name_of(child);
        let total = children.iter().filter(|c| name_of(c) == name).count();
        let idx = children[..i].iter().filter(|c| name_of(c) == name).count();
        out.push((child, sibling_path(parent, name, idx, total)));
    }
    out
}

fn walk_task_node<'a>(path: &str, node: &'a TaskNode, visit: &mut dyn FnMut(&str, Node<'a>)) {
    match node {
        TaskNode::Atomic(t) => {
            visit(path, Node::Task(t));
            walk_hints(path, &t.hints, visit);
            walk_examples(path, &t.examples, visit);
            walk_inputs(path, &t.inputs, visit);
        }
        TaskNode::Composite(c) => {
            visit(path, Node::Composite(c));
            for (child, child_path) in task_node_paths(path, &c.children) {
                walk_task_node(&child_path, child, visit);
            }
        }
    }
}

fn walk_factor<'a>(path: &str, f: &'a Factor, visit: &mut dyn FnMut(&str, Node<'a>)) {
    visit(path, Node::Factor(f));
    let total = f.children.len();
    for (i, child) in f.children.iter().enumerate() {
        let child_path = sibling_path(&format!("{path}/factors"), "factor", i, total);
        walk_factor(&child_path, child, visit);
    }
    walk_hints(path, &f.hints, visit);
    walk_examples(path, &f.examples, visit);
}

fn walk_hints<'a>(parent: &str, hints: &'a [Hint], visit: &mut dyn FnMut(&str, Node<'a>)) {
    let total = hints.len();
    for (i, h) in hints.iter().enumerate() {
        visit(&sibling_path(&format!("{parent}/hints"), "hint", i, total), Node::Hint(h));
    }
}

fn walk_examples<'a>(parent: &str, examples: &'a [Example], visit: &mut dyn FnMut(&str, Node<'a>)) {
    let total = examples.len();
    for (i, e) in examples.iter().enumerate() {
        let path = sibling_path(&format!("{parent}/examples"), "example", i, total);
        visit(&path, Node::Example(e));
        walk_examples(&path, &e.children, visit);
    }
}

fn walk_inputs<'a>(parent: &str, inputs: &'a [InputSpec], visit: &mut dyn FnMut(&str, Node<'a>)) {
    let total = inputs.len();
    for (i, input) in inputs.iter().enumerate() {
        visit(&sibling_path(&format!("{parent}/inputs"), "input", i, total), Node::Input(input));
    }
}

fn walk_labels<'a>(parent: &str, labels: &'a [String], visit: &mut dyn FnMut(&str, Node<'a>)) {
    let total = labels.len();
    for (i, label) in labels.iter().enumerate() {
        visit(&sibling_path(&format!("{parent}/labels"), "label", i, total), Node::Label(label));
    }
}

/// Atomic tasks with their canonical paths, in document order.
pub fn atomic_tasks_with_paths(doc: &GuidelineDocument) -> Vec<(String, &AtomicTask)> {
    let mut out = Vec::new();
    walk(doc, &mut |path, node| {
        if let Node::Task(t) = node {
            out.push((path.to_string(), t));
        }
    });
    out
}
