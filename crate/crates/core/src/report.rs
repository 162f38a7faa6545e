//! Validation reports.
//!
//! Verifiers never fail; they return a report listing every violated
//! instance. A report is empty exactly when the checked property holds.
//! Violations are kept sorted, so reports print identically no matter how
//! the sweep that produced them was scheduled.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Violation {
    /// Short stable name of the broken rule, e.g. `associativity`.
    pub check: String,
    /// Human-readable witness naming the offending identifiers.
    pub witness: String,
}

impl Violation {
    pub fn new(check: impl Into<String>, witness: impl Into<String>) -> Self {
        Violation {
            check: check.into(),
            witness: witness.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.check, self.witness)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    violations: Vec<Violation>,
    /// Informational lines; they never make a report non-empty.
    notes: Vec<String>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort();
        violations.dedup();
        ValidationReport {
            violations,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, check: impl Into<String>, witness: impl Into<String>) {
        let v = Violation::new(check, witness);
        let at = self.violations.partition_point(|x| *x < v);
        if self.violations.get(at) != Some(&v) {
            self.violations.insert(at, v);
        }
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn extend(&mut self, other: ValidationReport) {
        let mut all = std::mem::take(&mut self.violations);
        all.extend(other.violations);
        all.sort();
        all.dedup();
        self.violations = all;
        self.notes.extend(other.notes);
    }

    /// Merge another report, prefixing its checks with `scope.`
    pub fn extend_scoped(&mut self, scope: &str, other: ValidationReport) {
        let scoped = other
            .violations
            .into_iter()
            .map(|v| Violation::new(format!("{scope}.{}", v.check), v.witness))
            .collect();
        self.extend(ValidationReport {
            violations: scoped,
            notes: other.notes,
        });
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn notes(&self) -> &[String] {
        &self.notes
    }

    /// True if some violation's check name equals `check` or starts with `check.`
    pub fn has_check(&self, check: &str) -> bool {
        self.violations.iter().any(|v| {
            v.check == check
                || v.check
                    .strip_prefix(check)
                    .is_some_and(|rest| rest.starts_with('.'))
        })
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        for n in &self.notes {
            writeln!(f, "  note: {n}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_keeps_sorted_and_unique() {
        let mut r = ValidationReport::new();
        r.push("b", "2");
        r.push("a", "1");
        r.push("b", "2");
        assert_eq!(r.len(), 2);
        assert_eq!(r.violations()[0].check, "a");
    }

    #[test]
    fn notes_do_not_count() {
        let mut r = ValidationReport::new();
        r.note("antecedent failed");
        assert!(r.is_empty());
    }

    #[test]
    fn scoped_checks_match_prefix() {
        let mut inner = ValidationReport::new();
        inner.push("naturality", "f");
        let mut r = ValidationReport::new();
        r.extend_scoped("unit", inner);
        assert!(r.has_check("unit"));
        assert!(r.has_check("unit.naturality"));
        assert!(!r.has_check("uni"));
    }
}
