//! Seeded random states, unitaries and isometries.
//!
//! Every generator is a ChaCha20 stream seeded with [`rng`]; a given seed
//! yields bit-identical output on every platform. Mixed states follow the
//! induced (Ginibre) measure `GG†/Tr GG†`, pure states and isometries the Haar
//! measure.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::linalg::{self, CMat, CVec, C64};
use crate::state::{DensityMatrix, PureState};

pub type TrialRng = ChaCha20Rng;

pub fn rng(seed: u64) -> TrialRng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Seed of trial `index` in a run with master seed `master`.
pub fn trial_seed(master: u64, index: u64) -> u64 {
    master ^ index
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn ginibre<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    let mut m = CMat::zeros(rows, cols);
    // Fill row by row so the stream order does not depend on storage order.
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = gaussian(rng);
        }
    }
    m
}

pub fn random_density_matrix_with<R: Rng + ?Sized>(
    rng: &mut R,
    layout: &SubsystemLayout,
    rank: usize,
) -> Result<DensityMatrix> {
    let dim = layout.total_dim();
    if rank == 0 || rank > dim {
        return Err(Error::RankOutOfRange { rank, dim });
    }
    let g = ginibre(rng, dim, rank);
    let w = &g * g.adjoint();
    let tr = linalg::trace(&w).re;
    let w = linalg::hermitian_part(&w).unscale(tr);
    DensityMatrix::new(layout.clone(), w)
}

pub fn random_density_matrix(layout: &SubsystemLayout, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_density_matrix_with(&mut rng(seed), layout, rank)
}

/// Full-rank random state, the default input for inequality checks.
pub fn random_full_rank<R: Rng + ?Sized>(rng: &mut R, layout: &SubsystemLayout) -> Result<DensityMatrix> {
    random_density_matrix_with(rng, layout, layout.total_dim())
}

pub fn random_pure_state_with<R: Rng + ?Sized>(rng: &mut R, layout: &SubsystemLayout) -> Result<PureState> {
    let dim = layout.total_dim();
    let mut v = CVec::from_iterator(dim, (0..dim).map(|_| gaussian(rng)));
    let norm = v.norm();
    v.unscale_mut(norm);
    // Global phase: first nonzero component real positive.
    if let Some(i) = v.iter().position(|z| z.norm() > 0.0) {
        let z = v[i];
        let phase = z.conj() / z.norm();
        v.iter_mut().for_each(|x| *x *= phase);
        v[i] = C64::new(z.norm(), 0.0);
    }
    PureState::normalized(layout.clone(), v)
}

pub fn random_pure_state(layout: &SubsystemLayout, seed: u64) -> Result<PureState> {
    random_pure_state_with(&mut rng(seed), layout)
}

/// Haar-random isometry `rows × cols` (`rows ≥ cols`): QR of a Ginibre matrix
/// with the diagonal of `R` made positive.
pub fn random_isometry<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> Result<CMat> {
    if rows < cols || cols == 0 {
        return Err(Error::DimensionMismatch(format!("isometry from dimension {cols} into {rows}")));
    }
    let g = ginibre(rng, rows, cols);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..cols {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
        }
    }
    Ok(q)
}

pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Result<CMat> {
    random_isometry(rng, dim, dim)
}
