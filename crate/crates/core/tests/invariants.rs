use proptest::prelude::*;
use qcondent::channels::{self, KrausChannel};
use qcondent::entropy::{
    conditional_entropy, conditional_entropy_standard, mutual_information, relative_entropy, von_neumann_entropy,
};
use qcondent::linalg::max_abs;
use qcondent::random::{random_density_matrix, random_unitary, rng};
use qcondent::{DensityMatrix, SubsystemLayout};

fn state(dims: &[usize], rank: usize, seed: u64) -> DensityMatrix {
    let layout = SubsystemLayout::lettered(dims).unwrap();
    let rank = rank.clamp(1, layout.total_dim());
    random_density_matrix(&layout, rank, seed).unwrap()
}

fn close(a: &DensityMatrix, b: &DensityMatrix, tol: f64) -> bool {
    a.layout() == b.layout() && max_abs(&(a.matrix() - b.matrix())) <= tol
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partial_trace_of_tensor_recovers_factors(da in 1usize..4, db in 1usize..4, r in 1usize..10, seed: u64) {
        let a = state(&[da], r, seed);
        let b = state(&[db], r, seed ^ 1).relabel(SubsystemLayout::single("B", db).unwrap()).unwrap();
        let ab = a.tensor(&b).unwrap();
        prop_assert!(close(&ab.partial_trace(&["A"]).unwrap(), &a, 1e-12));
        prop_assert!(close(&ab.partial_trace(&["B"]).unwrap(), &b, 1e-12));
    }

    #[test]
    fn partial_traces_compose(dims in prop::collection::vec(1usize..4, 3), seed: u64) {
        let rho = state(&dims, 27, seed);
        let direct = rho.partial_trace(&["A"]).unwrap();
        let staged = rho.partial_trace(&["A", "C"]).unwrap().partial_trace(&["A"]).unwrap();
        prop_assert!(close(&direct, &staged, 1e-12));
        prop_assert!((rho.partial_trace(&["B"]).unwrap().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tensor_is_associative(d in prop::collection::vec(1usize..3, 3), seed: u64) {
        let s = |label: &str, dim: usize, k: u64| {
            state(&[dim], dim, seed ^ k).relabel(SubsystemLayout::single(label, dim).unwrap()).unwrap()
        };
        let (a, b, c) = (s("A", d[0], 0), s("B", d[1], 1), s("C", d[2], 2));
        let left = a.tensor(&b).unwrap().tensor(&c).unwrap();
        let right = a.tensor(&b.tensor(&c).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-15));
    }

    #[test]
    fn channels_preserve_trace_and_positivity(din in 1usize..4, dout in 1usize..4, env in 1usize..4, seed: u64) {
        prop_assume!(dout * env >= din);
        let ch = channels::random_channel(din, dout, env, seed).unwrap();
        let rho = state(&[din], din, seed ^ 7);
        let out = ch.apply(&rho).unwrap();
        prop_assert!(out.validate().is_valid(), "{:?}", out.validate());
        let comp = ch.complementary().apply(&rho).unwrap();
        prop_assert!((comp.trace().re - 1.0).abs() < 1e-10);
        // Output and environment of a pure input share a spectrum.
        let pure = state(&[din], 1, seed ^ 9);
        let hb = von_neumann_entropy(&ch.apply(&pure).unwrap()).unwrap();
        let he = von_neumann_entropy(&ch.complementary().apply(&pure).unwrap()).unwrap();
        prop_assert!((hb - he).abs() < 1e-9);
    }

    #[test]
    fn relative_entropy_is_nonnegative(d in 1usize..5, r1 in 1usize..5, r2 in 1usize..5, seed: u64) {
        let rho = state(&[d], r1, seed);
        let sigma = state(&[d], r2, seed ^ 3);
        let h = relative_entropy(&rho, &sigma).unwrap();
        prop_assert!(h.to_f64() >= -1e-10);
        prop_assert!(relative_entropy(&rho, &rho).unwrap().to_f64().abs() < 1e-9);
    }

    #[test]
    fn relative_entropy_decreases_under_partial_trace(dims in prop::collection::vec(1usize..4, 2), seed: u64) {
        let rho = state(&dims, 9, seed);
        let sigma = state(&dims, 9, seed ^ 5);
        let full = relative_entropy(&rho, &sigma).unwrap().to_f64();
        let reduced = relative_entropy(&rho.partial_trace(&["A"]).unwrap(), &sigma.partial_trace(&["A"]).unwrap())
            .unwrap()
            .to_f64();
        prop_assert!(reduced <= full + 1e-9);
    }

    #[test]
    fn entropies_are_unitarily_invariant(da in 1usize..4, dc in 1usize..4, seed: u64) {
        let rho = state(&[da, dc], da * dc, seed);
        let mut g = rng(seed ^ 11);
        let global = random_unitary(&mut g, da * dc).unwrap();
        let h = von_neumann_entropy(&rho).unwrap();
        prop_assert!((von_neumann_entropy(&rho.conjugate(&global).unwrap()).unwrap() - h).abs() < 1e-9);
        let ua = random_unitary(&mut g, da).unwrap();
        let uc = random_unitary(&mut g, dc).unwrap();
        let local = rho.conjugate_local("A", &ua).unwrap().conjugate_local("B", &uc).unwrap();
        let before = conditional_entropy(&rho, &["B"], &["A"]).unwrap().to_f64();
        let after = conditional_entropy(&local, &["B"], &["A"]).unwrap().to_f64();
        prop_assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn full_rank_formulas_agree(da in 1usize..4, dc in 1usize..4, seed: u64) {
        let rho = state(&[da, dc], da * dc, seed);
        let other = conditional_entropy(&rho, &["B"], &["A"]).unwrap().to_f64();
        let standard = conditional_entropy_standard(&rho, &["B"], &["A"]).unwrap();
        prop_assert!((other - standard).abs() < 1e-8);
        let hb = von_neumann_entropy(&rho.partial_trace(&["B"]).unwrap()).unwrap();
        prop_assert!(other.abs() <= hb + 1e-8);
        prop_assert!(mutual_information(&rho, &["A"], &["B"]).unwrap() >= -1e-10);
    }

    #[test]
    fn identity_channel_coherent_information_is_entropy(d in 1usize..4, r in 1usize..4, seed: u64) {
        let rho = state(&[d], r, seed);
        let ic = channels::coherent_information(&rho, &KrausChannel::identity(d).unwrap()).unwrap();
        prop_assert!((ic - von_neumann_entropy(&rho).unwrap()).abs() < 1e-9);
    }
}
