//! Kraus channels, Stinespring dilations, complementary channels and the
//! information quantities built from them.
//!
//! The Stinespring isometry of `Φ(ρ) = Σ_j K_j ρ K_j†` is
//! `V = Σ_j K_j ⊗ |j⟩_E`, with the environment appended as the last tensor
//! factor: `V[(b · env + j), a] = (K_j)[b, a]`. The complementary channel
//! `ρ ↦ Tr_B V ρ V†` then has Kraus operators `(K̃_e)[j, a] = (K_j)[e, a]`.

use crate::entropy::{self, clean_eigh};
use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::linalg::{self, CMat, CVec, ONE};
use crate::random;
use crate::state::{DensityMatrix, PureState};
use crate::tol;

/// A completely positive trace-preserving map in Kraus form.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMat>,
    output: SubsystemLayout,
}

impl KrausChannel {
    /// Checks shapes and `Σ K†K = I` entrywise within `1e-10`.
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let (dim_out, dim_in) = first.shape();
        if dim_in == 0 || dim_out == 0 {
            return Err(Error::InvalidChannel("empty Kraus operator".into()));
        }
        if let Some(k) = kraus.iter().find(|k| k.shape() != (dim_out, dim_in)) {
            return Err(Error::InvalidChannel(format!(
                "Kraus operators of shapes {dim_out}x{dim_in} and {}x{}",
                k.nrows(),
                k.ncols()
            )));
        }
        let sum = kraus.iter().fold(CMat::zeros(dim_in, dim_in), |acc, k| acc + k.adjoint() * k);
        let defect = linalg::max_abs(&(sum - CMat::identity(dim_in, dim_in)));
        if defect > tol::TRACE_PRESERVATION {
            return Err(Error::InvalidChannel(format!("Σ K†K deviates from identity by {defect:.3e}")));
        }
        let output = SubsystemLayout::single("B", dim_out)?;
        Ok(Self { dim_in, dim_out, kraus, output })
    }

    /// Replaces the layout attached to output states.
    pub fn with_output_layout(mut self, layout: SubsystemLayout) -> Result<Self> {
        if layout.total_dim() != self.dim_out {
            return Err(Error::DimensionMismatch(format!(
                "output layout {layout} for a channel with output dimension {}",
                self.dim_out
            )));
        }
        self.output = layout;
        Ok(self)
    }

    pub fn identity(dim: usize) -> Result<Self> {
        Self::new(vec![CMat::identity(dim, dim)])
    }

    /// Complete dephasing in the computational basis, `K_i = |i⟩⟨i|`.
    pub fn dephasing(dim: usize) -> Result<Self> {
        Self::new(
            (0..dim)
                .map(|i| {
                    let mut k = CMat::zeros(dim, dim);
                    k[(i, i)] = ONE;
                    k
                })
                .collect(),
        )
    }

    /// `ρ ↦ Tr(ρ) ω`, Kraus operators `√ω_i |f_i⟩⟨a|` from the eigen-decomposition of `ω`.
    pub fn replacement(dim_in: usize, output_state: &DensityMatrix) -> Result<Self> {
        let e = clean_eigh(output_state)?;
        let d = output_state.dim();
        let mut kraus = Vec::new();
        for (k, &p) in e.values.iter().enumerate().filter(|(_, &p)| p > 0.0) {
            let v = e.vectors.column(k).scale(p.sqrt());
            for a in 0..dim_in {
                let mut op = CMat::zeros(d, dim_in);
                op.set_column(a, &v);
                kraus.push(op);
            }
        }
        Self::new(kraus)?.with_output_layout(output_state.layout().clone())
    }

    /// The partial trace `Tr_rest` from `layout` to the subsystems in `keep`,
    /// with Kraus operators `I_keep ⊗ ⟨t|_rest`.
    pub fn partial_trace(layout: &SubsystemLayout, keep: &[&str]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::Selection("partial trace needs at least one kept subsystem".into()));
        }
        let mut positions = layout.positions(keep)?;
        positions.sort_unstable();
        let traced = layout.complement(&positions);
        let (k, t, table) = layout.split_table(&positions, &traced);
        let d = layout.total_dim();
        let kraus = (0..t)
            .map(|s| {
                let mut op = CMat::zeros(k, d);
                for i in 0..k {
                    op[(i, table[i * t + s])] = ONE;
                }
                op
            })
            .collect();
        Self::new(kraus)?.with_output_layout(layout.restrict(&positions))
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    /// Number of Kraus operators, the dimension of the Stinespring environment.
    pub fn env_dim(&self) -> usize {
        self.kraus.len()
    }

    pub fn kraus(&self) -> &[CMat] {
        &self.kraus
    }

    pub fn output_layout(&self) -> &SubsystemLayout {
        &self.output
    }

    fn check_input(&self, rho: &DensityMatrix) -> Result<()> {
        if rho.dim() != self.dim_in {
            return Err(Error::DimensionMismatch(format!(
                "state of dimension {} into a channel with input dimension {}",
                rho.dim(),
                self.dim_in
            )));
        }
        Ok(())
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        self.check_input(rho)?;
        let m = rho.matrix();
        let out = self
            .kraus
            .iter()
            .fold(CMat::zeros(self.dim_out, self.dim_out), |acc, k| acc + k * m * k.adjoint());
        DensityMatrix::new(self.output.clone(), out)
    }

    pub fn stinespring(&self) -> CMat {
        let env = self.env_dim();
        CMat::from_fn(self.dim_out * env, self.dim_in, |row, a| self.kraus[row % env][(row / env, a)])
    }

    pub fn complementary(&self) -> KrausChannel {
        let env = self.env_dim();
        let kraus = (0..self.dim_out)
            .map(|e| CMat::from_fn(env, self.dim_in, |j, a| self.kraus[j][(e, a)]))
            .collect();
        KrausChannel {
            dim_in: self.dim_in,
            dim_out: env,
            kraus,
            output: SubsystemLayout::single("E", env).expect("env_dim ≥ 1"),
        }
    }

    /// `(Φ ⊗ Id_R)(|ψ⟩⟨ψ|)` for `ψ` on input ⊗ R with `r` reference levels,
    /// returned on the layout `[B, R]`.
    fn apply_with_reference(&self, psi: &CVec, r: usize) -> DensityMatrix {
        // ψ as a dim_in × r matrix, input index major.
        let psi_mat = CMat::from_fn(self.dim_in, r, |a, i| psi[a * r + i]);
        let d = self.dim_out * r;
        let mut out = CMat::zeros(d, d);
        for k in &self.kraus {
            let m = k * &psi_mat;
            let v = CVec::from_fn(d, |idx, _| m[(idx / r, idx % r)]);
            out += &v * v.adjoint();
        }
        let layout = SubsystemLayout::new([("B", self.dim_out), ("R", r)]).expect("distinct labels");
        DensityMatrix::new(layout, out).expect("shape by construction")
    }
}

/// `Σ_i √p_i |e_i⟩ ⊗ |i⟩_R` over the support of `ρ` (eigenvalues above
/// `τ_supp`), so `R` has dimension `rank ρ`. The reference label is `R` unless
/// that is taken.
pub fn purify(rho: &DensityMatrix) -> Result<PureState> {
    let e = clean_eigh(rho)?;
    let support: Vec<usize> = (0..e.values.len())
        .filter(|&i| e.values[i] > tol::SUPPORT_EIGENVALUE)
        .collect();
    let r = support.len().max(1);
    let d = rho.dim();
    let mut psi = CVec::zeros(d * r);
    for (col, &i) in support.iter().enumerate() {
        let amp = e.values[i].sqrt();
        for a in 0..d {
            psi[a * r + col] = e.vectors[(a, i)] * amp;
        }
    }
    let label = rho.layout().fresh_label("R");
    let layout = rho.layout().concat(&SubsystemLayout::single(label, r)?)?;
    PureState::normalized(layout, psi)
}

/// `I(ρ_A, Φ) = H(ρ_BR ‖ ρ_B ⊗ ρ_R)` with `R` purifying `ρ_A`.
pub fn channel_mutual_information(rho: &DensityMatrix, channel: &KrausChannel) -> Result<f64> {
    channel.check_input(rho)?;
    let psi = purify(rho)?;
    let r = psi.dim() / rho.dim();
    let joint = channel.apply_with_reference(psi.amplitudes(), r);
    let out = joint.partial_trace(&["B"])?;
    let reference = joint.partial_trace(&["R"])?;
    Ok(entropy::relative_entropy_to_marginals(&joint, &[&out, &reference])?.value.to_f64())
}

/// `I_c(ρ_A, Φ) = I(ρ_A, Φ) - H(ρ_A)`.
pub fn coherent_information(rho: &DensityMatrix, channel: &KrausChannel) -> Result<f64> {
    Ok(channel_mutual_information(rho, channel)? - entropy::von_neumann_entropy(rho)?)
}

/// `H(C|A)` of a pure state on `A ⊗ B ⊗ C` through coherent information:
/// `-I_c(ρ_AB, Tr_B)`, where `Tr_B` maps `AB` onto `A` and `B` is every
/// subsystem outside `target ∪ given`.
pub fn conditional_entropy_via_coherent_info(rho: &DensityMatrix, target: &[&str], given: &[&str]) -> Result<f64> {
    let layout = rho.layout();
    let t = layout.positions(target)?;
    let g = layout.positions(given)?;
    if t.is_empty() || g.is_empty() || t.iter().any(|p| g.contains(p)) {
        return Err(Error::Selection("target and given must be nonempty and disjoint".into()));
    }
    let mut keep = layout.complement(&t);
    if keep.len() == g.len() {
        return Err(Error::Selection(format!(
            "a third subsystem outside {target:?} and {given:?} is required"
        )));
    }
    let largest = clean_eigh(rho)?.values[0];
    if largest < 1.0 - tol::PURITY {
        return Err(Error::NotPure(largest));
    }
    keep.sort_unstable();
    let rho_ab = rho.reduce_positions(&keep);
    let channel = KrausChannel::partial_trace(rho_ab.layout(), given)?;
    Ok(-coherent_information(&rho_ab, &channel)?)
}

/// Kraus operators sliced from a Haar-random isometry `dim_in → dim_out · env_dim`
/// (`K_j[b, a] = V[b · env_dim + j, a]`).
pub fn random_channel(dim_in: usize, dim_out: usize, env_dim: usize, seed: u64) -> Result<KrausChannel> {
    if dim_in == 0 || dim_out == 0 || env_dim == 0 || env_dim * dim_out < dim_in {
        return Err(Error::DimensionMismatch(format!(
            "random channel needs env_dim · dim_out ≥ dim_in ≥ 1, got {env_dim} · {dim_out} vs {dim_in}"
        )));
    }
    let v = random::random_isometry(&mut random::rng(seed), dim_out * env_dim, dim_in)?;
    let kraus = (0..env_dim)
        .map(|j| CMat::from_fn(dim_out, dim_in, |b, a| v[(b * env_dim + j, a)]))
        .collect();
    KrausChannel::new(kraus)
}
