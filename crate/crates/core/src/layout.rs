//! Labeled tensor factorizations of a Hilbert space.
//!
//! Composite indices are row-major over the ordered subsystem list: the last
//! subsystem varies fastest. For a layout `[(A, 2), (B, 3)]` the basis vector
//! `|a⟩⊗|b⟩` has composite index `3a + b`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubsystemLayout {
    parts: Vec<Subsystem>,
}

impl SubsystemLayout {
    pub fn new<I, S>(parts: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut out: Vec<Subsystem> = Vec::new();
        for (label, dim) in parts {
            let label = label.into();
            if dim == 0 {
                return Err(Error::ZeroDimension(label));
            }
            if out.iter().any(|s| s.label == label) {
                return Err(Error::DuplicateLabel(label));
            }
            out.push(Subsystem { label, dim });
        }
        if out.is_empty() {
            return Err(Error::Selection("a layout needs at least one subsystem".into()));
        }
        Ok(Self { parts: out })
    }

    pub fn single(label: impl Into<String>, dim: usize) -> Result<Self> {
        Self::new([(label.into(), dim)])
    }

    /// Layout with labels `A`, `B`, `C`, ... for the given dimensions.
    pub fn lettered(dims: &[usize]) -> Result<Self> {
        if dims.len() > 26 {
            return Err(Error::Selection("at most 26 lettered subsystems".into()));
        }
        Self::new(
            dims.iter()
                .enumerate()
                .map(|(i, &d)| (char::from(b'A' + i as u8).to_string(), d)),
        )
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.parts.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.parts.iter().map(|s| s.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.parts.iter().map(|s| s.dim).product()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.parts.iter().position(|s| s.label == label)
    }

    pub fn contains(&self, label: &str) -> bool {
        self.position(label).is_some()
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.position(label)
            .map(|p| self.parts[p].dim)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn concat(&self, other: &SubsystemLayout) -> Result<Self> {
        Self::new(
            self.parts
                .iter()
                .chain(&other.parts)
                .map(|s| (s.label.clone(), s.dim)),
        )
    }

    /// Positions of `labels`, in the order given. Unknown or repeated labels are errors.
    pub fn positions(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(labels.len());
        for &label in labels {
            let p = self
                .position(label)
                .ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
            if out.contains(&p) {
                return Err(Error::Selection(format!("label `{label}` listed twice")));
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Sub-layout made of the subsystems at `positions`, in that order.
    pub fn restrict(&self, positions: &[usize]) -> Self {
        Self {
            parts: positions.iter().map(|&p| self.parts[p].clone()).collect(),
        }
    }

    pub fn complement(&self, positions: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|p| !positions.contains(p)).collect()
    }

    /// A label not present in the layout, `base` if possible.
    pub fn fresh_label(&self, base: &str) -> String {
        if !self.contains(base) {
            return base.to_string();
        }
        (1..)
            .map(|i| format!("{base}{i}"))
            .find(|l| !self.contains(l))
            .expect("unbounded search")
    }

    /// Index table for a split of the subsystems into two ordered groups.
    ///
    /// Returns `(d1, d2, table)` where `table[i * d2 + j]` is the composite index
    /// whose digits on `first` encode `i` (row-major in the order of `first`) and
    /// whose digits on `second` encode `j`. The groups must partition the layout.
    pub(crate) fn split_table(&self, first: &[usize], second: &[usize]) -> (usize, usize, Vec<usize>) {
        debug_assert_eq!(first.len() + second.len(), self.len());
        let dims = self.dims();
        let d1: usize = first.iter().map(|&p| dims[p]).product();
        let d2: usize = second.iter().map(|&p| dims[p]).product();
        let total = d1 * d2;
        let mut table = vec![0; total];
        let mut digits = vec![0usize; dims.len()];
        for f in 0..total {
            let mut rem = f;
            for p in (0..dims.len()).rev() {
                digits[p] = rem % dims[p];
                rem /= dims[p];
            }
            let i = first.iter().fold(0, |acc, &p| acc * dims[p] + digits[p]);
            let j = second.iter().fold(0, |acc, &p| acc * dims[p] + digits[p]);
            table[i * d2 + j] = f;
        }
        (d1, d2, table)
    }
}

impl std::fmt::Display for SubsystemLayout {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.parts.iter().map(|s| format!("{}:{}", s.label, s.dim)).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}
