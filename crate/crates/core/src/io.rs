//! File formats: states and channels as JSON, sweep tables as CSV, reports as
//! CSV or JSON.
//!
//! Complex entries are `[re, im]` pairs in row-major order. A state file has
//! `labels`, `dims` and either `data` (density matrix, `D²` entries) or
//! `amplitudes` (pure state, `D` entries). A channel file has `dim_in`,
//! `dim_out` and `kraus`, a list of `dim_out × dim_in` operators.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog;
use crate::channels::{self, KrausChannel};
use crate::error::{Error, Result};
use crate::harness::PropertyReport;
use crate::layout::SubsystemLayout;
use crate::linalg::{CMat, CVec, C64};
use crate::state::{DensityMatrix, PureState};
use crate::truncation::SweepRow;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    labels: Vec<String>,
    dims: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    data: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    amplitudes: Option<Vec<[f64; 2]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChannelFile {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<Vec<[f64; 2]>>,
}

fn from_json<T: for<'de> Deserialize<'de>>(context: &str, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        Error::parse(format!("{context}:{}:{}", e.line(), e.column()), e.to_string())
    })
}

fn complex(entries: &[[f64; 2]]) -> impl Iterator<Item = C64> + '_ {
    entries.iter().map(|&[re, im]| C64::new(re, im))
}

fn pairs<'a>(entries: impl Iterator<Item = &'a C64>) -> Vec<[f64; 2]> {
    entries.map(|z| [z.re, z.im]).collect()
}

fn expect_len(context: &str, field: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::parse(context, format!("{field}: expected {expected} entries, got {got}")));
    }
    Ok(())
}

/// Parses a state file. Density matrices are checked structurally only;
/// call [`DensityMatrix::validate`] for the physical invariants.
pub fn parse_state(context: &str, text: &str) -> Result<DensityMatrix> {
    let file: StateFile = from_json(context, text)?;
    if file.labels.len() != file.dims.len() {
        return Err(Error::parse(
            context,
            format!("labels: {} labels for {} dims", file.labels.len(), file.dims.len()),
        ));
    }
    let layout = SubsystemLayout::new(file.labels.iter().map(String::as_str).zip(file.dims.iter().copied()))?;
    let d = layout.total_dim();
    match (file.data, file.amplitudes) {
        (Some(data), None) => {
            expect_len(context, "data", data.len(), d * d)?;
            DensityMatrix::new(layout, CMat::from_row_iterator(d, d, complex(&data)))
        }
        (None, Some(amps)) => {
            expect_len(context, "amplitudes", amps.len(), d)?;
            Ok(PureState::new(layout, CVec::from_iterator(d, complex(&amps)))?.as_density())
        }
        _ => Err(Error::parse(context, "exactly one of `data` or `amplitudes` is required")),
    }
}

pub fn read_state(path: &Path) -> Result<DensityMatrix> {
    parse_state(&path.display().to_string(), &std::fs::read_to_string(path)?)
}

pub fn state_to_json(rho: &DensityMatrix) -> String {
    let layout = rho.layout();
    let file = StateFile {
        labels: layout.labels().into_iter().map(String::from).collect(),
        dims: layout.dims(),
        data: Some(pairs(rho.matrix().transpose().iter())),
        amplitudes: None,
    };
    serde_json::to_string_pretty(&file).expect("state serializes")
}

pub fn pure_state_to_json(psi: &PureState) -> String {
    let layout = psi.layout();
    let file = StateFile {
        labels: layout.labels().into_iter().map(String::from).collect(),
        dims: layout.dims(),
        data: None,
        amplitudes: Some(pairs(psi.amplitudes().iter())),
    };
    serde_json::to_string_pretty(&file).expect("state serializes")
}

pub fn write_state(path: &Path, rho: &DensityMatrix) -> Result<()> {
    std::fs::write(path, state_to_json(rho))?;
    Ok(())
}

pub fn parse_channel(context: &str, text: &str) -> Result<KrausChannel> {
    let file: ChannelFile = from_json(context, text)?;
    if file.kraus.is_empty() {
        return Err(Error::parse(context, "kraus: at least one operator is required"));
    }
    let mut ops = Vec::with_capacity(file.kraus.len());
    for (i, k) in file.kraus.iter().enumerate() {
        expect_len(context, &format!("kraus[{i}]"), k.len(), file.dim_in * file.dim_out)?;
        ops.push(CMat::from_row_iterator(file.dim_out, file.dim_in, complex(k)));
    }
    KrausChannel::new(ops)
}

pub fn read_channel(path: &Path) -> Result<KrausChannel> {
    parse_channel(&path.display().to_string(), &std::fs::read_to_string(path)?)
}

pub fn channel_to_json(channel: &KrausChannel) -> String {
    let file = ChannelFile {
        dim_in: channel.dim_in(),
        dim_out: channel.dim_out(),
        kraus: channel.kraus().iter().map(|k| pairs(k.transpose().iter())).collect(),
    };
    serde_json::to_string_pretty(&file).expect("channel serializes")
}

/// A state from an existing file, otherwise from a catalog spec.
pub fn resolve_state(arg: &str) -> Result<DensityMatrix> {
    let path = Path::new(arg);
    if path.is_file() {
        read_state(path)
    } else {
        Ok(catalog::parse(arg)?.state.density())
    }
}

/// A channel from an existing file, otherwise from a spec:
/// `identity:d=3`, `dephasing:d=2`, `random:in=3,out=3,env=3,seed=1`.
pub fn resolve_channel(arg: &str) -> Result<KrausChannel> {
    let path = Path::new(arg);
    if path.is_file() {
        return read_channel(path);
    }
    let (name, params) = catalog::split_spec(arg)?;
    let get = |key: &str, default: Option<u64>| -> Result<u64> {
        match params.get(key) {
            Some(v) => v
                .parse()
                .map_err(|_| Error::parse(arg, format!("{key}: expected a nonnegative integer, got `{v}`"))),
            None => default.ok_or_else(|| Error::parse(arg, format!("missing parameter `{key}`"))),
        }
    };
    let allowed: &[&str] = match name.as_str() {
        "identity" | "dephasing" => &["d"],
        "random" => &["in", "out", "env", "seed"],
        _ => return Err(Error::parse(arg, format!("unknown channel `{name}` (identity, dephasing, random)"))),
    };
    if let Some(k) = params.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::parse(arg, format!("unknown parameter `{k}` for `{name}`")));
    }
    match name.as_str() {
        "identity" => KrausChannel::identity(get("d", None)? as usize),
        "dephasing" => KrausChannel::dephasing(get("d", None)? as usize),
        _ => {
            let din = get("in", None)? as usize;
            let dout = get("out", Some(din as u64))? as usize;
            let env = get("env", Some(din as u64))? as usize;
            channels::random_channel(din, dout, env, get("seed", Some(0))?)
        }
    }
}

fn opt<T: std::fmt::Display>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Sweep table with one row per schedule entry. Skipped steps leave the
/// entropy column empty; diagnostic columns are empty when not computed.
pub fn write_sweep_csv<W: Write>(out: W, target: &str, given: &str, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| Error::Io(e.into());
    w.write_record([
        "schedule_index".to_string(),
        format!("rank_{target}"),
        format!("rank_{given}"),
        "lambda".into(),
        "cond_entropy_nats".into(),
        "h_nk".into(),
        "h_tilde_nk".into(),
        "diff".into(),
    ])
    .map_err(to_io)?;
    for r in rows {
        let d = r.diagnostics.as_ref();
        w.write_record([
            r.schedule_index.to_string(),
            r.rank_target.to_string(),
            r.rank_given.to_string(),
            r.lambda.to_string(),
            opt(r.conditional_entropy),
            opt(d.map(|d| d.h_nk)),
            opt(d.map(|d| d.h_tilde_nk)),
            opt(d.and_then(|d| d.difference())),
        ])
        .map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

/// JSON companion of the sweep CSV.
#[derive(Clone, Debug, Serialize)]
pub struct SweepDocument {
    pub state: String,
    pub target: String,
    pub given: String,
    pub basis: crate::truncation::BasisChoice,
    pub schedule: Vec<(usize, usize)>,
    pub seed: u64,
    /// Analytic value of the untruncated quantity, when the catalog knows it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<f64>,
    pub rows: Vec<SweepRow>,
}

pub fn write_reports_csv<W: Write>(out: W, reports: &[PropertyReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let to_io = |e: csv::Error| Error::Io(e.into());
    w.write_record(["property", "verdict", "trials", "seed", "tolerance", "worst_margin", "worst_seed", "worst_trial"])
        .map_err(to_io)?;
    for r in reports {
        w.write_record([
            r.property.clone(),
            if r.passed() { "pass" } else { "fail" }.to_string(),
            r.trials.to_string(),
            r.seed.to_string(),
            r.tolerance.to_string(),
            r.worst_margin.to_string(),
            opt(r.worst_seed),
            r.worst_trial.clone(),
        ])
        .map_err(to_io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_roundtrip() {
        let rho = catalog::werner(0.3).unwrap();
        let back = parse_state("mem", &state_to_json(&rho)).unwrap();
        assert_eq!(back, rho);
    }

    #[test]
    fn pure_file() {
        let text = r#"{"labels": ["A"], "dims": [2], "amplitudes": [[0.6, 0], [0, 0.8]]}"#;
        let rho = parse_state("mem", text).unwrap();
        assert!((rho.matrix()[(0, 1)].im + 0.48).abs() < 1e-15);
    }

    #[test]
    fn parse_errors_have_context() {
        let e = parse_state("s.json", "{\"labels\": [\"A\"],\n \"dims\": [2], \"data\": [[1,0]").unwrap_err();
        assert!(e.to_string().contains("s.json:2:"), "{e}");
        let e = parse_state("s.json", r#"{"labels": ["A"], "dims": [2], "data": [[1,0]]}"#).unwrap_err();
        assert!(e.to_string().contains("data: expected 4 entries"), "{e}");
        let e = parse_state("s.json", r#"{"labels": ["A", "B"], "dims": [2], "data": []}"#).unwrap_err();
        assert!(e.is_structural());
    }

    #[test]
    fn channel_roundtrip_and_specs() {
        let ch = channels::random_channel(2, 3, 2, 4).unwrap();
        let back = parse_channel("mem", &channel_to_json(&ch)).unwrap();
        assert_eq!(back.kraus(), ch.kraus());
        assert_eq!(resolve_channel("identity:d=3").unwrap().dim_in(), 3);
        assert_eq!(resolve_channel("random:in=2,out=3,env=2,seed=4").unwrap().kraus(), ch.kraus());
        assert!(resolve_channel("unitary:d=2").is_err());
        assert!(resolve_channel("identity:n=2").is_err());
    }

    #[test]
    fn resolve_prefers_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bell");
        let rho = catalog::classical_correlated(2).unwrap();
        write_state(&path, &rho).unwrap();
        assert_eq!(resolve_state(path.to_str().unwrap()).unwrap(), rho);
        assert_eq!(resolve_state("bell").unwrap(), catalog::bell(2).unwrap().as_density());
    }
}
