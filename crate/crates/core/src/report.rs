//! Named residual checks gathered by the verification suites.

use std::fmt;

/// Whether a check should come out below tolerance or above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expectation {
    Holds,
    /// The identity is known not to hold for this input, so a residual above
    /// tolerance is the correct outcome.
    Differs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub expectation: Expectation,
}

impl Check {
    pub fn passes(&self, tol: f64) -> bool {
        match self.expectation {
            Expectation::Holds => self.residual < tol,
            Expectation::Differs => self.residual >= tol,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ReportCard {
    pub checks: Vec<Check>,
}

impl ReportCard {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, residual: f64) {
        self.push_with(name, residual, Expectation::Holds);
    }

    pub fn push_with(&mut self, name: impl Into<String>, residual: f64, expectation: Expectation) {
        // NaN must never pass a tolerance test.
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        self.checks.push(Check { name: name.into(), residual, expectation });
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Merges `other` by name, keeping the least favourable residual.
    pub fn absorb(&mut self, other: &ReportCard) {
        for c in &other.checks {
            match self.checks.iter_mut().find(|x| x.name == c.name) {
                Some(x) => {
                    x.residual = match x.expectation {
                        Expectation::Holds => x.residual.max(c.residual),
                        Expectation::Differs => x.residual.min(c.residual),
                    }
                }
                None => self.checks.push(c.clone()),
            }
        }
    }

    /// Largest residual among checks expected to hold.
    pub fn max_residual(&self) -> f64 {
        self.checks.iter().filter(|c| c.expectation == Expectation::Holds).map(|c| c.residual).fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.checks.iter().all(|c| c.passes(tol))
    }

    pub fn failures(&self, tol: f64) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(move |c| !c.passes(tol))
    }
}

impl fmt::Display for ReportCard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.expectation == Expectation::Differs { " (expected to differ)" } else { "" };
            writeln!(f, "{:<48} {:.3e}{tag}", c.name, c.residual)?;
        }
        Ok(())
    }
}
