//! Validation reports shared by every checker in the crate.

use std::fmt;

use serde::{Deserialize, Serialize};

/// One failed instance of a law.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objects: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub morphisms: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub elements: Vec<String>,
    pub expected: String,
    pub actual: String,
}

impl Violation {
    pub fn new(condition: impl Into<String>) -> Self {
        Violation {
            condition: condition.into(),
            objects: Vec::new(),
            morphisms: Vec::new(),
            elements: Vec::new(),
            expected: String::new(),
            actual: String::new(),
        }
    }

    pub fn object(mut self, label: impl Into<String>) -> Self {
        self.objects.push(label.into());
        self
    }

    pub fn morphism(mut self, label: impl Into<String>) -> Self {
        self.morphisms.push(label.into());
        self
    }

    pub fn element(mut self, label: impl Into<String>) -> Self {
        self.elements.push(label.into());
        self
    }

    pub fn expected(mut self, v: impl Into<String>) -> Self {
        self.expected = v.into();
        self
    }

    pub fn actual(mut self, v: impl Into<String>) -> Self {
        self.actual = v.into();
        self
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.condition)?;
        if !self.objects.is_empty() {
            write!(f, " objects={:?}", self.objects)?;
        }
        if !self.morphisms.is_empty() {
            write!(f, " morphisms={:?}", self.morphisms)?;
        }
        if !self.elements.is_empty() {
            write!(f, " elements={:?}", self.elements)?;
        }
        write!(f, " expected {} got {}", self.expected, self.actual)
    }
}

/// An ordered list of violations plus free-form notes (skipped checks,
/// auxiliary facts). A report with no violations means the law holds.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub violations: Vec<Violation>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn extend(&mut self, other: Report) {
        self.violations.extend(other.violations);
        self.notes.extend(other.notes);
    }

    /// Violations whose condition name matches exactly.
    pub fn with_condition<'a>(&'a self, condition: &'a str) -> impl Iterator<Item = &'a Violation> {
        self.violations.iter().filter(move |v| v.condition == condition)
    }

    pub fn has_condition(&self, condition: &str) -> bool {
        self.with_condition(condition).next().is_some()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            write!(f, "ok")?;
        }
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}
