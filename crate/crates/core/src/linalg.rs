//! Dense complex matrix helpers and the Hermitian eigensolver front end.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order.
///
/// Each eigenvector has its largest-magnitude component rotated to be real and
/// positive, so results are reproducible for nondegenerate spectra.
#[derive(Clone, Debug)]
pub struct Eigh {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(m: &CMat) -> C64 {
    m.diagonal().iter().sum()
}

/// Diagonalizes the Hermitian part of `m`.
///
/// Rows and columns that are identically zero are split off before calling the
/// solver: they contribute exact zero eigenvalues with basis eigenvectors. This
/// keeps truncated states embedded in a large ambient space cheap to handle.
pub fn eigh(m: &CMat) -> Eigh {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "eigh needs a square matrix");
    let h = hermitian_part(m);
    let active: Vec<usize> = (0..n)
        .filter(|&i| h.row(i).iter().any(|z| *z != ZERO))
        .collect();

    let mut pairs: Vec<(f64, CVec)> = Vec::with_capacity(n);
    if !active.is_empty() {
        let sub = CMat::from_fn(active.len(), active.len(), |i, j| h[(active[i], active[j])]);
        let eig = SymmetricEigen::new(sub);
        for (k, &value) in eig.eigenvalues.iter().enumerate() {
            let mut v = CVec::zeros(n);
            for (i, &row) in active.iter().enumerate() {
                v[row] = eig.eigenvectors[(i, k)];
            }
            pairs.push((value, v));
        }
    }
    for i in (0..n).filter(|i| !active.contains(i)) {
        let mut v = CVec::zeros(n);
        v[i] = ONE;
        pairs.push((0.0, v));
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));

    let mut vectors = CMat::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (k, (value, mut v)) in pairs.into_iter().enumerate() {
        fix_phase(&mut v);
        vectors.set_column(k, &v);
        values.push(value);
    }
    Eigh { values, vectors }
}

/// Rotates `v` so its largest-magnitude component (first one on ties) is real positive.
pub fn fix_phase(v: &mut CVec) {
    let mut best = 0;
    let mut best_norm = -1.0;
    for (i, z) in v.iter().enumerate() {
        let r = z.norm();
        if r > best_norm {
            best_norm = r;
            best = i;
        }
    }
    if best_norm > 0.0 {
        let phase = v[best].conj() / best_norm;
        v.iter_mut().for_each(|z| *z *= phase);
    }
}

/// Spectral norm of a matrix whose columns are few, via the Gram matrix.
pub(crate) fn spectral_norm(m: &CMat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    eigh(&gram).values.first().copied().unwrap_or(0.0).max(0.0).sqrt()
}

/// Applies `op` (a `d × d` matrix) to tensor axis `axis` of a row-major vector
/// whose axes have dimensions `dims`.
pub(crate) fn apply_on_axis(v: &CVec, dims: &[usize], axis: usize, op: &CMat) -> CVec {
    let d = dims[axis];
    let left: usize = dims[..axis].iter().product();
    let right: usize = dims[axis + 1..].iter().product();
    let out_d = op.nrows();
    let mut out = CVec::zeros(left * out_d * right);
    for l in 0..left {
        for a in 0..out_d {
            for x in 0..d {
                let c = op[(a, x)];
                if c == ZERO {
                    continue;
                }
                let src = (l * d + x) * right;
                let dst = (l * out_d + a) * right;
                for r in 0..right {
                    out[dst + r] += c * v[src + r];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_hermitian(n: usize, seed: u64) -> CMat {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = CMat::from_fn(n, n, |_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        hermitian_part(&m)
    }

    #[test]
    fn reconstructs_hermitian_matrix() {
        for seed in 0..5 {
            let h = random_hermitian(7, seed);
            let e = eigh(&h);
            let d = CMat::from_diagonal(&CVec::from_iterator(7, e.values.iter().map(|&x| C64::new(x, 0.0))));
            let back = &e.vectors * d * e.vectors.adjoint();
            assert!(max_abs(&(back - &h)) < 1e-12);
            let unit = e.vectors.adjoint() * &e.vectors;
            assert!(max_abs(&(unit - CMat::identity(7, 7))) < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn zero_block_is_split_off() {
        let mut h = CMat::zeros(5, 5);
        h[(1, 1)] = C64::new(0.25, 0.0);
        h[(3, 3)] = C64::new(0.75, 0.0);
        h[(1, 3)] = C64::new(0.1, 0.2);
        h[(3, 1)] = C64::new(0.1, -0.2);
        let e = eigh(&h);
        assert_eq!(e.values[2..], [0.0, 0.0, 0.0]);
        let d = CMat::from_diagonal(&CVec::from_iterator(5, e.values.iter().map(|&x| C64::new(x, 0.0))));
        assert!(max_abs(&(&e.vectors * d * e.vectors.adjoint() - &h)) < 1e-14);
    }

    #[test]
    fn axis_application_matches_kronecker() {
        let a = random_hermitian(2, 11);
        let v = CVec::from_fn(12, |i, _| C64::new(i as f64, 1.0 - i as f64));
        let full = CMat::identity(3, 3).kronecker(&a).kronecker(&CMat::identity(2, 2)) * &v;
        let axis = apply_on_axis(&v, &[3, 2, 2], 1, &a);
        assert!((full - axis).norm() < 1e-12);
    }
}
