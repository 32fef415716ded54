//! Named test states with analytic reference values.
//!
//! Bosonic states are represented in a Fock basis cut off at `N` levels and
//! renormalized; every entry records the discarded probability (`tail_mass`)
//! so comparisons against the cutoff-free references can scale their
//! tolerances accordingly.
//!
//! Entries are addressable by strings of the form `name:key=value[,key=value...]`:
//!
//! | name | keys (defaults) | layout |
//! |------|-----------------|--------|
//! | `bell` | `d` (2) | `A`, `B` |
//! | `thermal` | `nbar`, `cutoff` (40) | `A` |
//! | `tmsv` | `r` or `nbar`, `cutoff` (30) | `A`, `B` |
//! | `thermal_product` | `nbar_a`, `nbar_b`, `cutoff` (30) | `A`, `B` |
//! | `werner` | `p` | `A`, `B` |
//! | `ghz` | none | `A`, `B`, `C` |
//! | `classical` | `d` (2) | `A`, `B` |
//! | `random` | `dims` (`3x3`), `rank` (full), `seed` (0) | `A`, `B`, ... |
//! | `random_pure` | `dims` (`2x2x2`), `seed` (0) | `A`, `B`, ... |

use std::collections::BTreeMap;
use std::f64::consts::LN_2;

use serde::Serialize;

use crate::entropy::shannon_entropy;
use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::linalg::{CMat, CVec, C64};
use crate::random;
use crate::state::{DensityMatrix, PureState};

/// Entropy of a thermal state with mean photon number `nbar`:
/// `(n̄+1) ln(n̄+1) - n̄ ln n̄`, with `g(0) = 0`.
pub fn g_function(nbar: f64) -> Result<f64> {
    if nbar < 0.0 || nbar.is_nan() {
        return Err(Error::Domain(format!("mean photon number {nbar} is negative")));
    }
    if nbar == 0.0 {
        return Ok(0.0);
    }
    Ok((nbar + 1.0) * nbar.ln_1p() - nbar * nbar.ln())
}

fn check_cutoff(cutoff: usize) -> Result<()> {
    if cutoff == 0 {
        return Err(Error::Domain("cutoff must be at least 1".into()));
    }
    Ok(())
}

fn thermal_weights(nbar: f64, cutoff: usize) -> Vec<f64> {
    let q = nbar / (nbar + 1.0);
    let raw: Vec<f64> = (0..cutoff).map(|k| q.powi(k as i32)).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / z).collect()
}

/// Probability outside the first `cutoff` Fock levels of a thermal state, `(n̄/(n̄+1))^N`.
pub fn thermal_tail_mass(nbar: f64, cutoff: usize) -> f64 {
    (nbar / (nbar + 1.0)).powi(cutoff as i32)
}

/// Thermal state truncated to `cutoff` Fock levels and renormalized.
pub fn thermal_fock(nbar: f64, cutoff: usize) -> Result<DensityMatrix> {
    thermal_fock_labeled("A", nbar, cutoff)
}

pub fn thermal_fock_labeled(label: &str, nbar: f64, cutoff: usize) -> Result<DensityMatrix> {
    if nbar.is_nan() || nbar <= 0.0 || !nbar.is_finite() {
        return Err(Error::Domain(format!("mean photon number must be positive, got {nbar}")));
    }
    check_cutoff(cutoff)?;
    DensityMatrix::from_diagonal(SubsystemLayout::single(label, cutoff)?, &thermal_weights(nbar, cutoff))
}

/// Two-mode squeezed vacuum `Σ_{n<N} c_n |n,n⟩` with `c_n ∝ tanhⁿ r`,
/// renormalized. Each mode's marginal is a truncated thermal state with
/// `n̄ = sinh² r`.
pub fn tmsv(r: f64, cutoff: usize) -> Result<PureState> {
    if r.is_nan() || r <= 0.0 || !r.is_finite() {
        return Err(Error::Domain(format!("squeezing must be positive, got {r}")));
    }
    check_cutoff(cutoff)?;
    let t = r.tanh();
    let mut v = CVec::zeros(cutoff * cutoff);
    for n in 0..cutoff {
        v[n * cutoff + n] = C64::new(t.powi(n as i32), 0.0);
    }
    PureState::normalized(SubsystemLayout::new([("A", cutoff), ("B", cutoff)])?, v)
}

/// Squeezing parameter with `sinh² r = nbar`.
pub fn squeezing_for_mean_photon(nbar: f64) -> f64 {
    nbar.sqrt().asinh()
}

/// Maximally entangled `(1/√d) Σ |ii⟩` on `A ⊗ B`.
pub fn bell(d: usize) -> Result<PureState> {
    if d < 2 {
        return Err(Error::Domain(format!("Bell state needs d ≥ 2, got {d}")));
    }
    let mut v = CVec::zeros(d * d);
    for i in 0..d {
        v[i * d + i] = C64::new(1.0, 0.0);
    }
    PureState::normalized(SubsystemLayout::new([("A", d), ("B", d)])?, v)
}

/// `(|000⟩ + |111⟩)/√2` on `A ⊗ B ⊗ C`.
pub fn ghz() -> Result<PureState> {
    let mut v = CVec::zeros(8);
    v[0] = C64::new(1.0, 0.0);
    v[7] = C64::new(1.0, 0.0);
    PureState::normalized(SubsystemLayout::lettered(&[2, 2, 2])?, v)
}

/// `p |Ψ⁻⟩⟨Ψ⁻| + (1 - p) I/4`.
pub fn werner(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("Werner parameter {p} outside [0, 1]")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let singlet = CVec::from_vec(vec![
        C64::new(0.0, 0.0),
        C64::new(s, 0.0),
        C64::new(-s, 0.0),
        C64::new(0.0, 0.0),
    ]);
    let m = (&singlet * singlet.adjoint()).scale(p) + CMat::identity(4, 4).scale((1.0 - p) / 4.0);
    DensityMatrix::new(SubsystemLayout::lettered(&[2, 2])?, m)
}

/// `(1/d) Σ |ii⟩⟨ii|` on `A ⊗ B`.
pub fn classical_correlated(d: usize) -> Result<DensityMatrix> {
    if d < 1 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    let mut diag = vec![0.0; d * d];
    for i in 0..d {
        diag[i * d + i] = 1.0 / d as f64;
    }
    DensityMatrix::from_diagonal(SubsystemLayout::lettered(&[d, d])?, &diag)
}

#[derive(Clone, Debug, PartialEq)]
pub enum CatalogState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl CatalogState {
    pub fn density(&self) -> DensityMatrix {
        match self {
            CatalogState::Pure(p) => p.as_density(),
            CatalogState::Mixed(m) => m.clone(),
        }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        match self {
            CatalogState::Pure(p) => p.layout(),
            CatalogState::Mixed(m) => m.layout(),
        }
    }
}

/// An analytic value the entry's state should reproduce up to its tail mass.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reference {
    pub quantity: String,
    pub value: f64,
    pub formula: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CatalogEntry {
    pub name: String,
    pub parameters: BTreeMap<String, String>,
    pub state: CatalogState,
    pub references: Vec<Reference>,
    pub tail_mass: f64,
}

impl CatalogEntry {
    pub fn reference(&self, quantity: &str) -> Option<f64> {
        self.references.iter().find(|r| r.quantity == quantity).map(|r| r.value)
    }
}

fn reference(quantity: &str, value: f64, formula: &str) -> Reference {
    Reference { quantity: quantity.into(), value, formula: formula.into() }
}

/// Key/value parameters of a catalog string, with typed accessors.
struct Params {
    spec: String,
    map: BTreeMap<String, String>,
}

impl Params {
    fn err(&self, msg: String) -> Error {
        Error::parse(format!("catalog spec `{}`", self.spec), msg)
    }

    fn f64_opt(&self, key: &str) -> Result<Option<f64>> {
        self.map
            .get(key)
            .map(|v| v.parse::<f64>().map_err(|_| self.err(format!("`{key}` must be a number, got `{v}`"))))
            .transpose()
    }

    fn f64(&self, key: &str) -> Result<f64> {
        self.f64_opt(key)?.ok_or_else(|| self.err(format!("missing `{key}`")))
    }

    fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        self.map.get(key).map_or(Ok(default), |v| {
            v.parse::<usize>().map_err(|_| self.err(format!("`{key}` must be a nonnegative integer, got `{v}`")))
        })
    }

    fn u64_or(&self, key: &str, default: u64) -> Result<u64> {
        self.map.get(key).map_or(Ok(default), |v| {
            v.parse::<u64>().map_err(|_| self.err(format!("`{key}` must be a nonnegative integer, got `{v}`")))
        })
    }

    fn dims_or(&self, default: &[usize]) -> Result<Vec<usize>> {
        match self.map.get("dims") {
            None => Ok(default.to_vec()),
            Some(v) => v
                .split('x')
                .map(|d| d.parse::<usize>().map_err(|_| self.err(format!("bad `dims` value `{v}`, expected e.g. 3x3"))))
                .collect(),
        }
    }

    fn allow(&self, keys: &[&str]) -> Result<()> {
        match self.map.keys().find(|k| !keys.contains(&k.as_str())) {
            Some(k) => Err(self.err(format!("unknown key `{k}` (expected one of {keys:?})"))),
            None => Ok(()),
        }
    }
}

/// Splits `name:key=value,...` into the name and its parameters.
pub fn split_spec(spec: &str) -> Result<(String, BTreeMap<String, String>)> {
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let name = name.trim();
    if name.is_empty() {
        return Err(Error::parse(format!("catalog spec `{spec}`"), "missing name"));
    }
    let mut map = BTreeMap::new();
    for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Error::parse(format!("catalog spec `{spec}`"), format!("`{item}` is not key=value")))?;
        if map.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
            return Err(Error::parse(format!("catalog spec `{spec}`"), format!("key `{}` repeated", k.trim())));
        }
    }
    Ok((name.to_string(), map))
}

/// Names accepted by [`parse`].
pub const NAMES: &[&str] = &[
    "bell",
    "thermal",
    "tmsv",
    "thermal_product",
    "werner",
    "ghz",
    "classical",
    "random",
    "random_pure",
    "basis",
];

/// Builds the catalog entry named by `spec`.
pub fn parse(spec: &str) -> Result<CatalogEntry> {
    let (name, map) = split_spec(spec)?;
    let p = Params { spec: spec.to_string(), map: map.clone() };
    let mut tail_mass = 0.0;
    let (state, references) = match name.as_str() {
        "bell" => {
            p.allow(&["d"])?;
            let d = p.usize_or("d", 2)?;
            let ln_d = (d as f64).ln();
            (
                CatalogState::Pure(bell(d)?),
                vec![
                    reference("H(A)", ln_d, "ln d"),
                    reference("H(A|B)", -ln_d, "-ln d"),
                    reference("I(A:B)", 2.0 * ln_d, "2 ln d"),
                ],
            )
        }
        "thermal" => {
            p.allow(&["nbar", "cutoff"])?;
            let nbar = p.f64("nbar")?;
            let cutoff = p.usize_or("cutoff", 40)?;
            let state = thermal_fock(nbar, cutoff)?;
            tail_mass = thermal_tail_mass(nbar, cutoff);
            (CatalogState::Mixed(state), vec![reference("H(A)", g_function(nbar)?, "g(nbar)")])
        }
        "tmsv" => {
            p.allow(&["r", "nbar", "cutoff"])?;
            let cutoff = p.usize_or("cutoff", 30)?;
            let r = match (p.f64_opt("r")?, p.f64_opt("nbar")?) {
                (Some(r), None) => r,
                (None, Some(nbar)) => squeezing_for_mean_photon(nbar),
                _ => return Err(p.err("give exactly one of `r` and `nbar`".into())),
            };
            let nbar = r.sinh().powi(2);
            let g = g_function(nbar)?;
            tail_mass = thermal_tail_mass(nbar, cutoff);
            (
                CatalogState::Pure(tmsv(r, cutoff)?),
                vec![
                    reference("H(A)", g, "g(sinh^2 r)"),
                    reference("H(A|B)", -g, "-g(sinh^2 r)"),
                    reference("I(A:B)", 2.0 * g, "2 g(sinh^2 r)"),
                ],
            )
        }
        "thermal_product" => {
            p.allow(&["nbar_a", "nbar_b", "cutoff"])?;
            let (na, nb) = (p.f64("nbar_a")?, p.f64("nbar_b")?);
            let cutoff = p.usize_or("cutoff", 30)?;
            let state = thermal_fock_labeled("A", na, cutoff)?.tensor(&thermal_fock_labeled("B", nb, cutoff)?)?;
            tail_mass = 1.0 - (1.0 - thermal_tail_mass(na, cutoff)) * (1.0 - thermal_tail_mass(nb, cutoff));
            let ga = g_function(na)?;
            (
                CatalogState::Mixed(state),
                vec![
                    reference("H(A)", ga, "g(nbar_a)"),
                    reference("H(A|B)", ga, "g(nbar_a)"),
                    reference("I(A:B)", 0.0, "0"),
                ],
            )
        }
        "werner" => {
            p.allow(&["p"])?;
            let w = p.f64("p")?;
            let state = werner(w)?;
            let spectrum = [(1.0 + 3.0 * w) / 4.0, (1.0 - w) / 4.0, (1.0 - w) / 4.0, (1.0 - w) / 4.0];
            (
                CatalogState::Mixed(state),
                vec![reference(
                    "H(A|B)",
                    shannon_entropy(&spectrum) - LN_2,
                    "H((1+3p)/4, (1-p)/4 x3) - ln 2",
                )],
            )
        }
        "ghz" => {
            p.allow(&[])?;
            (
                CatalogState::Pure(ghz()?),
                vec![
                    reference("H(C|A)", 0.0, "ln 2 - ln 2"),
                    reference("H(A|B)", 0.0, "ln 2 - ln 2"),
                    reference("H(A|BC)", -LN_2, "0 - ln 2"),
                ],
            )
        }
        "classical" => {
            p.allow(&["d"])?;
            let d = p.usize_or("d", 2)?;
            (
                CatalogState::Mixed(classical_correlated(d)?),
                vec![reference("H(A)", (d as f64).ln(), "ln d"), reference("H(A|B)", 0.0, "ln d - ln d")],
            )
        }
        "random" => {
            p.allow(&["dims", "rank", "seed"])?;
            let layout = SubsystemLayout::lettered(&p.dims_or(&[3, 3])?)?;
            let rank = p.usize_or("rank", layout.total_dim())?;
            let seed = p.u64_or("seed", 0)?;
            (CatalogState::Mixed(random::random_density_matrix(&layout, rank, seed)?), vec![])
        }
        "random_pure" => {
            p.allow(&["dims", "seed"])?;
            let layout = SubsystemLayout::lettered(&p.dims_or(&[2, 2, 2])?)?;
            let seed = p.u64_or("seed", 0)?;
            (CatalogState::Pure(random::random_pure_state(&layout, seed)?), vec![])
        }
        "basis" => {
            p.allow(&["dims", "index"])?;
            let layout = SubsystemLayout::lettered(&p.dims_or(&[2])?)?;
            let index = p.usize_or("index", 0)?;
            let mut digits = vec![0; layout.len()];
            let mut rest = index;
            for (digit, d) in digits.iter_mut().zip(layout.dims()).rev() {
                *digit = rest % d;
                rest /= d;
            }
            if rest != 0 {
                return Err(p.err(format!("index {index} out of range for dims {}", layout)));
            }
            (CatalogState::Pure(PureState::basis(layout, &digits)?), vec![])
        }
        other => {
            return Err(Error::parse(
                format!("catalog spec `{spec}`"),
                format!("unknown state `{other}` (known: {})", NAMES.join(", ")),
            ))
        }
    };
    Ok(CatalogEntry { name, parameters: map, state, references, tail_mass })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{conditional_entropy, mutual_information, von_neumann_entropy};
    use crate::linalg::max_abs;

    #[test]
    fn g_values() {
        assert_eq!(g_function(0.0).unwrap(), 0.0);
        assert!((g_function(1.0).unwrap() - 2.0 * LN_2).abs() < 1e-15);
        assert!(g_function(-0.1).is_err());
    }

    #[test]
    fn thermal_entropy_approaches_g() {
        let h = von_neumann_entropy(&thermal_fock(1.0, 40).unwrap()).unwrap();
        assert!((h - 1.386294).abs() < 1e-6);
        assert!((h - g_function(1.0).unwrap()).abs() < 1e-8);
        assert!((thermal_tail_mass(1.0, 40) - 9.094947017729282e-13).abs() < 1e-25);
        let cold = thermal_fock(1e-12, 5).unwrap();
        assert!(von_neumann_entropy(&cold).unwrap() < 1e-9);
        assert!(thermal_fock(0.0, 5).is_err());
        assert!(thermal_fock(1.0, 0).is_err());
    }

    #[test]
    fn tmsv_marginal_is_thermal() {
        let r = squeezing_for_mean_photon(1.0);
        assert!((r.sinh().powi(2) - 1.0).abs() < 1e-14);
        assert!((r.tanh().powi(2) - 0.5).abs() < 1e-14);
        let psi = tmsv(r, 12).unwrap().as_density();
        let marginal = psi.partial_trace(&["A"]).unwrap();
        let thermal = thermal_fock(1.0, 12).unwrap();
        assert!(max_abs(&(marginal.matrix() - thermal.matrix())) < 1e-12);
    }

    #[test]
    fn tmsv_small_squeezing_is_vacuum_like() {
        let psi = tmsv(1e-9, 4).unwrap().as_density();
        let h = conditional_entropy(&psi, &["A"], &["B"]).unwrap().finite().unwrap();
        assert!(h.abs() < 1e-12);
    }

    #[test]
    fn bell_references() {
        for d in 2..5 {
            let e = parse(&format!("bell:d={d}")).unwrap();
            let rho = e.state.density();
            let ha = von_neumann_entropy(&rho.partial_trace(&["A"]).unwrap()).unwrap();
            assert!((ha - e.reference("H(A)").unwrap()).abs() < 1e-12);
            let hc = conditional_entropy(&rho, &["A"], &["B"]).unwrap().finite().unwrap();
            assert!((hc - e.reference("H(A|B)").unwrap()).abs() < 1e-12);
            let i = mutual_information(&rho, &["A"], &["B"]).unwrap();
            assert!((i - e.reference("I(A:B)").unwrap()).abs() < 1e-12);
        }
        assert!(bell(1).is_err());
    }

    #[test]
    fn werner_endpoints() {
        let singlet = werner(1.0).unwrap();
        let h = conditional_entropy(&singlet, &["A"], &["B"]).unwrap().finite().unwrap();
        assert!((h + LN_2).abs() < 1e-12);
        let noise = werner(0.0).unwrap();
        let h = conditional_entropy(&noise, &["A"], &["B"]).unwrap().finite().unwrap();
        assert!((h - LN_2).abs() < 1e-12);
        assert!(werner(1.5).is_err());
        let mid = parse("werner:p=0.4").unwrap();
        let h = conditional_entropy(&mid.state.density(), &["A"], &["B"]).unwrap().finite().unwrap();
        assert!((h - mid.reference("H(A|B)").unwrap()).abs() < 1e-12);
    }

    #[test]
    fn ghz_and_classical() {
        let g = ghz().unwrap().as_density();
        let ac = g.partial_trace(&["A", "C"]).unwrap();
        assert!(conditional_entropy(&ac, &["C"], &["A"]).unwrap().finite().unwrap().abs() < 1e-12);
        let cl = classical_correlated(3).unwrap();
        assert!(conditional_entropy(&cl, &["A"], &["B"]).unwrap().finite().unwrap().abs() < 1e-12);
    }

    #[test]
    fn every_catalog_state_is_valid() {
        for spec in [
            "bell",
            "bell:d=3",
            "thermal:nbar=0.5,cutoff=10",
            "tmsv:r=0.3,cutoff=8",
            "tmsv:nbar=1,cutoff=6",
            "thermal_product:nbar_a=1,nbar_b=2,cutoff=5",
            "werner:p=0.3",
            "ghz",
            "classical:d=3",
            "random:dims=2x3,rank=2,seed=4",
            "random_pure:dims=2x2x2,seed=9",
        ] {
            let e = parse(spec).unwrap();
            assert!(e.state.density().validate().is_valid(), "{spec}");
        }
    }

    #[test]
    fn grammar_errors() {
        assert!(matches!(parse("nope"), Err(Error::Parse { .. })));
        assert!(matches!(parse("bell:d"), Err(Error::Parse { .. })));
        assert!(matches!(parse("bell:q=2"), Err(Error::Parse { .. })));
        assert!(matches!(parse("tmsv:r=1,nbar=1"), Err(Error::Parse { .. })));
        assert!(matches!(parse("thermal:nbar=x"), Err(Error::Parse { .. })));
        assert!(matches!(parse("bell:d=2,d=3"), Err(Error::Parse { .. })));
    }
}
