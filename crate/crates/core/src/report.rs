//! Uniform pass/fail records for the operator-identity checks.

use std::fmt;

/// The outcome of checking one operator identity on a truncated space.
#[derive(Clone, Debug)]
pub struct CheckRecord {
    /// Machine-readable name of the check, e.g. `adjoint_inner_product`.
    pub name: String,
    /// The identity being verified, in plain notation.
    pub identity: String,
    /// Dimension of the subspace the identity was tested on.
    pub subspace_dim: usize,
    /// Largest entrywise deviation observed.
    pub max_deviation: f64,
    pub pass: bool,
    /// On failure, a description of where the worst deviation occurred.
    pub witness: Option<String>,
}

impl CheckRecord {
    pub fn new(
        name: impl Into<String>,
        identity: impl Into<String>,
        subspace_dim: usize,
        max_deviation: f64,
        tol: f64,
        witness: Option<String>,
    ) -> Self {
        let pass = max_deviation <= tol;
        CheckRecord {
            name: name.into(),
            identity: identity.into(),
            subspace_dim,
            max_deviation,
            pass,
            witness: if pass { None } else { witness },
        }
    }
}

impl fmt::Display for CheckRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<32} dim={:<5} dev={:.3e}  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.subspace_dim,
            self.max_deviation,
            self.identity,
        )?;
        if let Some(w) = &self.witness {
            write!(f, "  [{w}]")?;
        }
        Ok(())
    }
}

/// A batch of check records.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub records: Vec<CheckRecord>,
}

impl Report {
    pub fn push(&mut self, r: CheckRecord) {
        self.records.push(r);
    }

    pub fn pass_all(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}
