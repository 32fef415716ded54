//! Density matrices and pure states on labeled multipartite spaces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::linalg::{self, CMat, CVec, C64, ZERO};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    Hermitian,
    UnitTrace,
    PositiveSemidefinite,
}

/// A violated invariant and how far off it is.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Defect {
    pub invariant: Invariant,
    pub magnitude: f64,
}

/// Outcome of [`DensityMatrix::validate`].
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Validity {
    pub defects: Vec<Defect>,
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        self.defects.is_empty()
    }

    pub fn defect(&self, invariant: Invariant) -> Option<f64> {
        self.defects.iter().find(|d| d.invariant == invariant).map(|d| d.magnitude)
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidState(self.defects))
        }
    }
}

/// A square complex matrix on a [`SubsystemLayout`].
///
/// Construction only checks shapes. Physical validity (Hermitian, unit trace,
/// positive semidefinite) is reported by [`validate`](Self::validate) and
/// enforced by the entropy functions at the point where they diagonalize.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    layout: SubsystemLayout,
    matrix: CMat,
}

impl DensityMatrix {
    pub fn new(layout: SubsystemLayout, matrix: CMat) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix on layout {layout} of total dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { layout, matrix })
    }

    pub fn from_diagonal(layout: SubsystemLayout, diag: &[f64]) -> Result<Self> {
        let m = CMat::from_diagonal(&CVec::from_iterator(diag.len(), diag.iter().map(|&x| C64::new(x, 0.0))));
        Self::new(layout, m)
    }

    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let d = layout.total_dim();
        let matrix = CMat::identity(d, d).unscale(d as f64);
        Self { layout, matrix }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &CMat {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMat {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> C64 {
        linalg::trace(&self.matrix)
    }

    /// Same matrix on a different layout of equal total dimension.
    pub fn relabel(&self, layout: SubsystemLayout) -> Result<Self> {
        Self::new(layout, self.matrix.clone())
    }

    pub fn validate(&self) -> Validity {
        let mut defects = Vec::new();
        let herm = linalg::max_abs(&(&self.matrix - self.matrix.adjoint()));
        if herm > tol::HERMITICITY {
            defects.push(Defect { invariant: Invariant::Hermitian, magnitude: herm });
        }
        let tr = (self.trace() - C64::new(1.0, 0.0)).norm();
        if tr > tol::TRACE {
            defects.push(Defect { invariant: Invariant::UnitTrace, magnitude: tr });
        }
        let min = linalg::eigh(&self.matrix).values.last().copied().unwrap_or(0.0);
        if min < -tol::PSD {
            defects.push(Defect { invariant: Invariant::PositiveSemidefinite, magnitude: -min });
        }
        Validity { defects }
    }

    /// Kronecker product with concatenated layout.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Self { layout, matrix: self.matrix.kronecker(&other.matrix) })
    }

    /// Reduced state on the subsystems in `keep`, listed in their original relative order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Selection("partial trace needs at least one kept subsystem".into()));
        }
        let mut positions = self.layout.positions(keep)?;
        positions.sort_unstable();
        Ok(self.reduce_positions(&positions))
    }

    pub(crate) fn reduce_positions(&self, keep: &[usize]) -> Self {
        let traced = self.layout.complement(keep);
        let (k, t, table) = self.layout.split_table(keep, &traced);
        let m = &self.matrix;
        let out = CMat::from_fn(k, k, |i, j| {
            (0..t).fold(ZERO, |acc, s| acc + m[(table[i * t + s], table[j * t + s])])
        });
        Self { layout: self.layout.restrict(keep), matrix: out }
    }

    /// Reorders the tensor factors so that the layout reads `order`.
    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        let positions = self.layout.positions(order)?;
        if positions.len() != self.layout.len() {
            return Err(Error::Selection("permutation must list every subsystem".into()));
        }
        Ok(self.permute_positions(&positions))
    }

    pub(crate) fn permute_positions(&self, order: &[usize]) -> Self {
        if order.iter().enumerate().all(|(i, &p)| i == p) {
            return self.clone();
        }
        let (_, _, table) = self.layout.split_table(order, &[]);
        let m = &self.matrix;
        let d = self.dim();
        Self {
            layout: self.layout.restrict(order),
            matrix: CMat::from_fn(d, d, |i, j| m[(table[i], table[j])]),
        }
    }

    /// `U ρ U†` for an operator on the full space.
    pub fn conjugate(&self, op: &CMat) -> Result<Self> {
        if op.nrows() != self.dim() || op.ncols() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on dimension {}",
                op.nrows(),
                op.ncols(),
                self.dim()
            )));
        }
        Ok(Self { layout: self.layout.clone(), matrix: op * &self.matrix * op.adjoint() })
    }

    /// `(I ⊗ op ⊗ I) ρ (I ⊗ op ⊗ I)†` with `op` acting on subsystem `label`.
    pub fn conjugate_local(&self, label: &str, op: &CMat) -> Result<Self> {
        let pos = self.layout.position(label).ok_or_else(|| Error::UnknownLabel(label.to_string()))?;
        let d = self.layout.subsystems()[pos].dim;
        if op.nrows() != d || op.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} operator on subsystem `{label}` of dimension {d}",
                op.nrows(),
                op.ncols()
            )));
        }
        let dims = self.layout.dims();
        let n = self.dim();
        // Left multiply every column, then right multiply by applying to every row of the adjoint.
        let mut left = CMat::zeros(n, n);
        for c in 0..n {
            let col = self.matrix.column(c).into_owned();
            left.set_column(c, &linalg::apply_on_axis(&col, &dims, pos, op));
        }
        let mut out = CMat::zeros(n, n);
        let left_adj = left.adjoint();
        for c in 0..n {
            let col = left_adj.column(c).into_owned();
            out.set_column(c, &linalg::apply_on_axis(&col, &dims, pos, op));
        }
        Ok(Self { layout: self.layout.clone(), matrix: out.adjoint() })
    }

    /// `α ρ + (1 - α) σ`.
    pub fn mix(&self, other: &DensityMatrix, alpha: f64) -> Result<Self> {
        if self.layout.dims() != other.layout.dims() {
            return Err(Error::DimensionMismatch(format!("mixing {} with {}", self.layout, other.layout)));
        }
        Ok(Self {
            layout: self.layout.clone(),
            matrix: self.matrix.scale(alpha) + other.matrix.scale(1.0 - alpha),
        })
    }

    pub(crate) fn scaled(&self, factor: f64) -> Self {
        Self { layout: self.layout.clone(), matrix: self.matrix.scale(factor) }
    }
}

/// A normalized state vector on a [`SubsystemLayout`].
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    layout: SubsystemLayout,
    amplitudes: CVec,
}

impl PureState {
    /// Checks shape and unit norm.
    pub fn new(layout: SubsystemLayout, amplitudes: CVec) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes on layout {layout}",
                amplitudes.len()
            )));
        }
        let defect = (amplitudes.norm_squared() - 1.0).abs();
        if defect > tol::TRACE {
            return Err(Error::InvalidState(vec![Defect { invariant: Invariant::UnitTrace, magnitude: defect }]));
        }
        Ok(Self { layout, amplitudes })
    }

    /// Rescales a nonzero vector to unit norm.
    pub fn normalized(layout: SubsystemLayout, amplitudes: CVec) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        Self::new(layout, amplitudes.unscale(norm))
    }

    /// Product basis state `|i_1⟩⊗…⊗|i_k⟩`.
    pub fn basis(layout: SubsystemLayout, digits: &[usize]) -> Result<Self> {
        let dims = layout.dims();
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(&i, &d)| i >= d) {
            return Err(Error::DimensionMismatch(format!("basis digits {digits:?} on {layout}")));
        }
        let index = digits.iter().zip(&dims).fold(0, |acc, (&i, &d)| acc * d + i);
        let mut v = CVec::zeros(layout.total_dim());
        v[index] = C64::new(1.0, 0.0);
        Ok(Self { layout, amplitudes: v })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &CVec {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(Self { layout, amplitudes: self.amplitudes.kronecker(&other.amplitudes) })
    }

    pub fn as_density(&self) -> DensityMatrix {
        DensityMatrix {
            layout: self.layout.clone(),
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
        }
    }
}
