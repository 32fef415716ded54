//! Finite-rank approximations `ρ ↦ (P ρ P) / Tr(P ρ P)` built from increasing
//! families of projectors, and the quantities used to watch conditional
//! entropy converge as the ranks grow.
//!
//! A [`ProjectorSequence`] fixes an orthonormal basis of one subsystem; the
//! projector of rank `n` is the span of its first `n` vectors, so the family
//! is nested by construction and reaches the identity at full rank.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{self, clean_eigh};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::linalg::{self, CMat};
use crate::state::DensityMatrix;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisChoice {
    /// Computational (Fock number) basis.
    Computational,
    /// Eigenbasis of the subsystem's marginal, largest eigenvalue first.
    MarginalEigenbasis,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorSequence {
    subsystem: String,
    ranks: Vec<usize>,
    basis: CMat,
}

fn check_ranks(ranks: &[usize], dim: usize) -> Result<()> {
    if ranks.is_empty() {
        return Err(Error::Selection("projector sequence needs at least one rank".into()));
    }
    if let Some(&r) = ranks.iter().find(|&&r| r == 0 || r > dim) {
        return Err(Error::RankOutOfRange { rank: r, dim });
    }
    if ranks.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Selection(format!("ranks {ranks:?} are not strictly increasing")));
    }
    Ok(())
}

impl ProjectorSequence {
    pub fn from_basis(subsystem: impl Into<String>, basis: CMat, ranks: Vec<usize>) -> Result<Self> {
        let dim = basis.nrows();
        if basis.ncols() != dim {
            return Err(Error::DimensionMismatch(format!("{}x{} basis matrix", dim, basis.ncols())));
        }
        let defect = linalg::max_abs(&(basis.adjoint() * &basis - CMat::identity(dim, dim)));
        if defect > tol::HERMITICITY {
            return Err(Error::Domain(format!("basis is not orthonormal (defect {defect:.3e})")));
        }
        check_ranks(&ranks, dim)?;
        Ok(Self { subsystem: subsystem.into(), ranks, basis })
    }

    pub fn computational(subsystem: impl Into<String>, dim: usize, ranks: Vec<usize>) -> Result<Self> {
        Self::from_basis(subsystem, CMat::identity(dim, dim), ranks)
    }

    /// Computational basis with every rank `1..=dim` available.
    pub fn full(subsystem: impl Into<String>, dim: usize) -> Result<Self> {
        Self::computational(subsystem, dim, (1..=dim).collect())
    }

    /// Basis of eigenvectors of `marginal`, in descending eigenvalue order.
    pub fn marginal_eigenbasis(subsystem: impl Into<String>, marginal: &DensityMatrix, ranks: Vec<usize>) -> Result<Self> {
        let e = clean_eigh(marginal)?;
        Self::from_basis(subsystem, e.vectors, ranks)
    }

    pub fn subsystem(&self) -> &str {
        &self.subsystem
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    pub fn dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    /// `Σ_{i<rank} |b_i⟩⟨b_i|`; `rank` must be one of the sequence's ranks.
    pub fn projector(&self, rank: usize) -> Result<CMat> {
        if !self.ranks.contains(&rank) {
            return Err(Error::Selection(format!(
                "rank {rank} is not in the sequence for `{}` ({:?})",
                self.subsystem, self.ranks
            )));
        }
        if rank == self.dim() {
            return Ok(CMat::identity(rank, rank));
        }
        let b = self.basis.columns(0, rank);
        Ok(b * b.adjoint())
    }
}

/// One normalized truncation `ρ^{(ranks)} = λ⁻¹ P ρ P`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncationStep {
    pub ranks: BTreeMap<String, usize>,
    pub lambda: f64,
    pub state: DensityMatrix,
}

/// Sandwiches `ρ` between the given projectors (identity on subsystems not
/// listed) and renormalizes. Full-rank projectors leave `ρ` untouched.
pub fn truncate_normalize(rho: &DensityMatrix, projectors: &[(&ProjectorSequence, usize)]) -> Result<TruncationStep> {
    let mut ranks = BTreeMap::new();
    let mut m = rho.clone();
    let mut projected = false;
    for (seq, rank) in projectors {
        let dim = rho.layout().dim_of(seq.subsystem())?;
        if dim != seq.dim() {
            return Err(Error::DimensionMismatch(format!(
                "projectors of dimension {} on subsystem `{}` of dimension {dim}",
                seq.dim(),
                seq.subsystem()
            )));
        }
        if ranks.insert(seq.subsystem().to_string(), *rank).is_some() {
            return Err(Error::Selection(format!("subsystem `{}` projected twice", seq.subsystem())));
        }
        let p = seq.projector(*rank)?;
        if *rank < dim {
            m = m.conjugate_local(seq.subsystem(), &p)?;
            projected = true;
        }
    }
    let lambda = m.trace().re;
    if lambda <= tol::TRUNCATION_WEIGHT {
        return Err(Error::DegenerateTruncation { lambda, threshold: tol::TRUNCATION_WEIGHT });
    }
    let state = if projected { m.scaled(1.0 / lambda) } else { m };
    Ok(TruncationStep { ranks, lambda, state })
}

/// The pair `H_nk`, `H̃_nk` and the two marginal terms whose sum is their difference.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ProofDiagnostics {
    pub lambda: f64,
    /// `Tr P_n ρ_A P_n`.
    pub mu: f64,
    /// `Tr P_k ρ_B P_k`.
    pub eta: f64,
    /// `H(ρ^{nk} ‖ ρ_A^{nk} ⊗ ρ_B^{nk})`.
    pub h_nk: ExtendedReal,
    /// `H(ρ^{nk} ‖ μ⁻¹ P ρ_A P ⊗ η⁻¹ P ρ_B P)`.
    pub h_tilde_nk: ExtendedReal,
    /// `H(ρ_A^{nk} ‖ μ⁻¹ P ρ_A P)`.
    pub term_target: ExtendedReal,
    /// `H(ρ_B^{nk} ‖ η⁻¹ P ρ_B P)`.
    pub term_given: ExtendedReal,
}

impl ProofDiagnostics {
    /// `H̃_nk - H_nk` when both are finite.
    pub fn difference(&self) -> Option<f64> {
        Some(self.h_tilde_nk.finite()? - self.h_nk.finite()?)
    }

    /// `term_target + term_given` when both are finite.
    pub fn marginal_sum(&self) -> Option<f64> {
        Some(self.term_target.finite()? + self.term_given.finite()?)
    }
}

/// Checks that `rho` lives on exactly the two subsystems of the sequences and
/// returns their positions in the layout.
fn bipartite_positions(rho: &DensityMatrix, a: &ProjectorSequence, b: &ProjectorSequence) -> Result<(usize, usize)> {
    let layout = rho.layout();
    let pa = layout.position(a.subsystem()).ok_or_else(|| Error::UnknownLabel(a.subsystem().into()))?;
    let pb = layout.position(b.subsystem()).ok_or_else(|| Error::UnknownLabel(b.subsystem().into()))?;
    if layout.len() != 2 || pa == pb {
        return Err(Error::Selection(format!(
            "expected a state on exactly `{}` and `{}`, got layout {layout}",
            a.subsystem(),
            b.subsystem()
        )));
    }
    Ok((pa, pb))
}

fn reference_marginal(rho: &DensityMatrix, seq: &ProjectorSequence, rank: usize) -> Result<(f64, DensityMatrix)> {
    let marginal = rho.partial_trace(&[seq.subsystem()])?;
    let projected = if rank < seq.dim() {
        marginal.conjugate_local(seq.subsystem(), &seq.projector(rank)?)?
    } else {
        marginal
    };
    let weight = projected.trace().re;
    if weight <= tol::TRUNCATION_WEIGHT {
        return Err(Error::DegenerateTruncation { lambda: weight, threshold: tol::TRUNCATION_WEIGHT });
    }
    Ok((weight, projected.scaled(1.0 / weight)))
}

fn diagnostics_for_step(
    rho: &DensityMatrix,
    step: &TruncationStep,
    (a, n): (&ProjectorSequence, usize),
    (b, k): (&ProjectorSequence, usize),
) -> Result<ProofDiagnostics> {
    let (pa, pb) = bipartite_positions(rho, a, b)?;
    let joint = step.state.permute_positions(&[pa, pb]);
    let a_nk = joint.reduce_positions(&[0]);
    let b_nk = joint.reduce_positions(&[1]);
    let (mu, ref_a) = reference_marginal(rho, a, n)?;
    let (eta, ref_b) = reference_marginal(rho, b, k)?;
    Ok(ProofDiagnostics {
        lambda: step.lambda,
        mu,
        eta,
        h_nk: entropy::relative_entropy_to_marginals(&joint, &[&a_nk, &b_nk])?.value,
        h_tilde_nk: entropy::relative_entropy_to_marginals(&joint, &[&ref_a, &ref_b])?.value,
        term_target: entropy::relative_entropy_implied(&a_nk, &ref_a)?,
        term_given: entropy::relative_entropy_implied(&b_nk, &ref_b)?,
    })
}

/// `H_nk`, `H̃_nk` and the marginal terms for ranks `n` on `a` and `k` on `b`.
pub fn proof_diagnostics(
    rho: &DensityMatrix,
    (a, n): (&ProjectorSequence, usize),
    (b, k): (&ProjectorSequence, usize),
) -> Result<ProofDiagnostics> {
    bipartite_positions(rho, a, b)?;
    let step = truncate_normalize(rho, &[(a, n), (b, k)])?;
    diagnostics_for_step(rho, &step, (a, n), (b, k))
}

/// Conditional entropy `H(target | given)` along a schedule of rank pairs.
///
/// Ranks advance independently per subsystem; the schedule lists `(n, k)`
/// pairs explicitly.
#[derive(Clone, Debug)]
pub struct SweepPlan {
    pub target: ProjectorSequence,
    pub given: ProjectorSequence,
    pub schedule: Vec<(usize, usize)>,
    pub diagnostics: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    pub schedule_index: usize,
    pub rank_target: usize,
    pub rank_given: usize,
    pub lambda: f64,
    /// `None` when the truncation was degenerate and the step skipped.
    pub conditional_entropy: Option<ExtendedReal>,
    pub diagnostics: Option<ProofDiagnostics>,
}

pub fn conditional_entropy_sweep(rho: &DensityMatrix, plan: &SweepPlan) -> Result<Vec<SweepRow>> {
    if plan.schedule.is_empty() {
        return Err(Error::Selection("empty rank schedule".into()));
    }
    bipartite_positions(rho, &plan.target, &plan.given)?;
    let target = [plan.target.subsystem()];
    let given = [plan.given.subsystem()];
    plan.schedule
        .par_iter()
        .enumerate()
        .map(|(index, &(n, k))| {
            let mut row = SweepRow {
                schedule_index: index,
                rank_target: n,
                rank_given: k,
                lambda: 0.0,
                conditional_entropy: None,
                diagnostics: None,
            };
            let step = match truncate_normalize(rho, &[(&plan.target, n), (&plan.given, k)]) {
                Ok(step) => step,
                Err(Error::DegenerateTruncation { lambda, .. }) => {
                    row.lambda = lambda;
                    return Ok(row);
                }
                Err(e) => return Err(e),
            };
            row.lambda = step.lambda;
            row.conditional_entropy = Some(entropy::conditional_entropy(&step.state, &target, &given)?);
            if plan.diagnostics {
                row.diagnostics = Some(diagnostics_for_step(rho, &step, (&plan.target, n), (&plan.given, k))?);
            }
            Ok(row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::layout::SubsystemLayout;
    use crate::linalg::max_abs;
    use crate::random;
    use crate::state::PureState;

    #[test]
    fn projectors_are_nested() {
        let l = SubsystemLayout::single("A", 5).unwrap();
        let rho = random::random_density_matrix(&l, 5, 3).unwrap();
        let seq = ProjectorSequence::marginal_eigenbasis("A", &rho, vec![1, 2, 3, 4, 5]).unwrap();
        for m in 1..=5 {
            for n in m..=5 {
                let (pm, pn) = (seq.projector(m).unwrap(), seq.projector(n).unwrap());
                assert!(max_abs(&(&pm * &pn - &pm)) < 1e-12);
            }
        }
        assert_eq!(seq.projector(5).unwrap(), CMat::identity(5, 5));
        assert!(ProjectorSequence::computational("A", 3, vec![2, 2]).is_err());
        assert!(ProjectorSequence::computational("A", 3, vec![4]).is_err());
    }

    #[test]
    fn full_rank_is_identity() {
        let l = SubsystemLayout::new([("A", 2), ("B", 3)]).unwrap();
        let rho = random::random_density_matrix(&l, 6, 1).unwrap();
        let (a, b) = (ProjectorSequence::full("A", 2).unwrap(), ProjectorSequence::full("B", 3).unwrap());
        let step = truncate_normalize(&rho, &[(&a, 2), (&b, 3)]).unwrap();
        assert_eq!(step.state, rho);
        assert!((step.lambda - 1.0).abs() < 1e-10);
    }

    #[test]
    fn bell_truncated_to_vacuum() {
        let bell = catalog::bell(2).unwrap().as_density();
        let (a, b) = (ProjectorSequence::full("A", 2).unwrap(), ProjectorSequence::full("B", 2).unwrap());
        let step = truncate_normalize(&bell, &[(&a, 1), (&b, 1)]).unwrap();
        assert!((step.lambda - 0.5).abs() < 1e-15);
        let expect = PureState::basis(bell.layout().clone(), &[0, 0]).unwrap().as_density();
        assert!(max_abs(&(step.state.matrix() - expect.matrix())) < 1e-15);
    }

    #[test]
    fn degenerate_truncation_is_an_error() {
        let l = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let rho = PureState::basis(l, &[1, 1]).unwrap().as_density();
        let a = ProjectorSequence::full("A", 2).unwrap();
        assert!(matches!(
            truncate_normalize(&rho, &[(&a, 1)]),
            Err(Error::DegenerateTruncation { .. })
        ));
    }

    #[test]
    fn one_sided_truncation_leaves_other_factor() {
        let l = SubsystemLayout::new([("A", 2), ("B", 3)]).unwrap();
        let rho = random::random_density_matrix(&l, 6, 12).unwrap();
        let b = ProjectorSequence::full("B", 3).unwrap();
        let step = truncate_normalize(&rho, &[(&b, 2)]).unwrap();
        assert_eq!(step.ranks.len(), 1);
        let p = CMat::identity(2, 2).kronecker(&b.projector(2).unwrap());
        let expect = &p * rho.matrix() * &p;
        assert!(max_abs(&(step.state.matrix().scale(step.lambda) - expect)) < 1e-14);
    }

    #[test]
    fn tmsv_weights_follow_geometric_series() {
        // λ_nk = Σ_{m<min(n,k)} q^m / Σ_{m<N} q^m, q = tanh² r.
        let r = catalog::squeezing_for_mean_photon(1.0);
        let cutoff = 12;
        let rho = catalog::tmsv(r, cutoff).unwrap().as_density();
        let (a, b) = (ProjectorSequence::full("A", cutoff).unwrap(), ProjectorSequence::full("B", cutoff).unwrap());
        let q: f64 = 0.5;
        let z: f64 = (0..cutoff).map(|m| q.powi(m as i32)).sum();
        for (n, k) in [(1, 1), (3, 5), (7, 4), (12, 12)] {
            let step = truncate_normalize(&rho, &[(&a, n), (&b, k)]).unwrap();
            let expect: f64 = (0..n.min(k)).map(|m| q.powi(m as i32)).sum::<f64>() / z;
            assert!((step.lambda - expect).abs() < 1e-14, "({n},{k})");
            // Cutoff-free form (1 - q) Σ q^m differs by the tail mass only.
            let infinite: f64 = (1.0 - q) * (0..n.min(k)).map(|m| q.powi(m as i32)).sum::<f64>();
            assert!((step.lambda - infinite).abs() <= catalog::thermal_tail_mass(1.0, cutoff));
        }
    }

    #[test]
    fn diagnostics_at_full_rank() {
        let l = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let rho = random::random_density_matrix(&l, 4, 5).unwrap();
        let (a, b) = (ProjectorSequence::full("A", 2).unwrap(), ProjectorSequence::full("B", 2).unwrap());
        let d = proof_diagnostics(&rho, (&a, 2), (&b, 2)).unwrap();
        let mi = entropy::mutual_information(&rho, &["A"], &["B"]).unwrap();
        assert!((d.h_nk.finite().unwrap() - mi).abs() < 1e-10);
        assert!(d.difference().unwrap().abs() < 1e-10);
    }

    #[test]
    fn diagnostics_on_product_states() {
        let a_state = catalog::thermal_fock_labeled("A", 0.7, 6).unwrap();
        let b_state = catalog::thermal_fock_labeled("B", 1.3, 6).unwrap();
        let rho = a_state.tensor(&b_state).unwrap();
        let (a, b) = (ProjectorSequence::full("A", 6).unwrap(), ProjectorSequence::full("B", 6).unwrap());
        for (n, k) in [(2, 3), (4, 4), (6, 1)] {
            let d = proof_diagnostics(&rho, (&a, n), (&b, k)).unwrap();
            assert!(d.h_nk.finite().unwrap().abs() < 1e-10);
            assert!((d.h_tilde_nk.finite().unwrap() - d.marginal_sum().unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn sweep_reaches_untruncated_value() {
        let l = SubsystemLayout::new([("A", 4), ("B", 4)]).unwrap();
        let rho = random::random_density_matrix(&l, 16, 21).unwrap();
        let ranks = vec![1, 2, 3, 4];
        let plan = SweepPlan {
            target: ProjectorSequence::marginal_eigenbasis("A", &rho.partial_trace(&["A"]).unwrap(), ranks.clone()).unwrap(),
            given: ProjectorSequence::marginal_eigenbasis("B", &rho.partial_trace(&["B"]).unwrap(), ranks).unwrap(),
            schedule: (1..=4).map(|n| (n, n)).collect(),
            diagnostics: true,
        };
        let rows = conditional_entropy_sweep(&rho, &plan).unwrap();
        let direct = entropy::conditional_entropy(&rho, &["A"], &["B"]).unwrap().finite().unwrap();
        let last = rows.last().unwrap().conditional_entropy.unwrap().finite().unwrap();
        assert!((last - direct).abs() < 1e-10);
        for row in &rows {
            let d = row.diagnostics.unwrap();
            assert!((d.difference().unwrap() - d.marginal_sum().unwrap()).abs() < 1e-8);
        }
        assert!(rows.windows(2).all(|w| w[0].lambda <= w[1].lambda + 1e-10));
    }

    #[test]
    fn sweep_records_skipped_steps() {
        let l = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let rho = PureState::basis(l, &[1, 1]).unwrap().as_density();
        let plan = SweepPlan {
            target: ProjectorSequence::full("A", 2).unwrap(),
            given: ProjectorSequence::full("B", 2).unwrap(),
            schedule: vec![(1, 1), (2, 2)],
            diagnostics: false,
        };
        let rows = conditional_entropy_sweep(&rho, &plan).unwrap();
        assert_eq!(rows[0].conditional_entropy, None);
        assert_eq!(rows[0].lambda, 0.0);
        assert!(rows[1].conditional_entropy.is_some());
    }
}
