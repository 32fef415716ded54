use rand::Rng;
use rayon::prelude::*;

use super::report::{PropertyReport, TrialRecord, Verdict};
use super::{CheckConfig, Property};
use crate::catalog;
use crate::channels::{self, KrausChannel};
use crate::entropy::{self, conditional_entropy, reduced_conditional_entropy, von_neumann_entropy};
use crate::error::Result;
use crate::extended::ExtendedReal;
use crate::layout::SubsystemLayout;
use crate::random::{self, TrialRng};
use crate::state::{DensityMatrix, PureState};
use crate::tol;

/// Allowed increase between consecutive continuity deviations.
const MONOTONE_NOISE: f64 = 1e-12;

type Margins = Vec<Option<f64>>;

struct Sample {
    trial: String,
    seed: Option<u64>,
    margins: Margins,
    error: Option<String>,
}

struct Relation {
    name: &'static str,
    tolerance: f64,
    inequality: bool,
}

fn sample(trial: String, seed: Option<u64>, outcome: Result<Margins>, relations: usize) -> Sample {
    match outcome {
        Ok(margins) => Sample { trial, seed, margins, error: None },
        Err(e) => Sample {
            error: Some(format!("{trial}: {e}")),
            trial,
            seed,
            margins: vec![Some(f64::NEG_INFINITY); relations],
        },
    }
}

fn random_samples<F>(config: &CheckConfig, relations: usize, f: F) -> Vec<Sample>
where
    F: Fn(&mut TrialRng) -> Result<Margins> + Sync,
{
    (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let seed = random::trial_seed(config.seed, i as u64);
            sample(format!("trial {i}"), Some(seed), f(&mut random::rng(seed)), relations)
        })
        .collect()
}

fn assemble(config: &CheckConfig, relations: &[Relation], samples: &[Sample]) -> Vec<PropertyReport> {
    let errors: Vec<String> = samples.iter().filter_map(|s| s.error.clone()).collect();
    relations
        .iter()
        .enumerate()
        .map(|(k, rel)| {
            let mut worst = f64::INFINITY;
            let mut worst_at: Option<&Sample> = None;
            let mut saturated = Vec::new();
            let mut saturated_random = 0usize;
            let mut records = Vec::new();
            for s in samples {
                let Some(m) = s.margins.get(k).copied().flatten() else { continue };
                let m = if m.is_nan() { f64::NEG_INFINITY } else { m };
                if worst_at.is_none() || m < worst {
                    worst = m;
                    worst_at = Some(s);
                }
                if rel.inequality && m.abs() <= tol::SATURATION {
                    match s.seed {
                        None => saturated.push(s.trial.clone()),
                        Some(_) => saturated_random += 1,
                    }
                }
                if config.records {
                    records.push(TrialRecord { trial: s.trial.clone(), seed: s.seed, margin: m });
                }
            }
            if saturated_random > 0 {
                saturated.push(format!("{saturated_random} random trials"));
            }
            let verdict = if worst >= -rel.tolerance && errors.is_empty() { Verdict::Pass } else { Verdict::Fail };
            PropertyReport {
                property: rel.name.to_string(),
                trials: config.trials,
                fixed_trials: samples.iter().filter(|s| s.trial.starts_with("fixed:")).count(),
                seed: config.seed,
                tolerance: rel.tolerance,
                worst_margin: worst,
                worst_seed: worst_at.and_then(|s| s.seed),
                worst_trial: worst_at.map(|s| s.trial.clone()).unwrap_or_default(),
                verdict,
                saturated,
                errors: errors.clone(),
                records: config.records.then_some(records),
                config: config.clone(),
            }
        })
        .collect()
}

fn run_relations<F>(config: &CheckConfig, relations: &[Relation], fixed: Vec<(&str, Result<Margins>)>, f: F) -> Vec<PropertyReport>
where
    F: Fn(&mut TrialRng) -> Result<Margins> + Sync,
{
    let mut samples: Vec<Sample> = fixed
        .into_iter()
        .map(|(name, outcome)| sample(format!("fixed:{name}"), None, outcome, relations.len()))
        .collect();
    samples.extend(random_samples(config, relations.len(), f));
    assemble(config, relations, &samples)
}

pub(super) fn run(config: &CheckConfig) -> Vec<PropertyReport> {
    let d = &config.dims;
    let one = |name| [Relation { name, tolerance: config.tolerance, inequality: false }];
    let ineq = |name| [Relation { name, tolerance: config.tolerance, inequality: true }];
    match config.property {
        Property::Duality => {
            let layout = layout_or_panic(SubsystemLayout::lettered(d));
            let fixed = vec![("product", PureState::basis(layout.clone(), &[0, 0, 0]).and_then(|p| duality(&p)))];
            run_relations(config, &one("duality"), fixed, |rng| {
                duality(&random::random_pure_state_with(rng, &layout)?)
            })
        }
        Property::Bound => {
            let layout = layout_or_panic(SubsystemLayout::new([("A", d[0]), ("C", d[1])]));
            let fixed = vec![("bell", bell_ac().and_then(|r| bound(&r))), ("product", product_ac(d).and_then(|r| bound(&r)))];
            run_relations(config, &ineq("bound"), fixed, |rng| bound(&random::random_full_rank(rng, &layout)?))
        }
        Property::Monotonicity => {
            let layout = layout_or_panic(SubsystemLayout::lettered(d));
            let fixed = vec![("ghz", catalog::ghz().and_then(|g| monotonicity(&g.as_density())))];
            run_relations(config, &ineq("monotonicity"), fixed, |rng| {
                monotonicity(&random::random_full_rank(rng, &layout)?)
            })
        }
        Property::Concavity => {
            let layout = layout_or_panic(SubsystemLayout::lettered(d));
            let pair = || -> Result<(DensityMatrix, DensityMatrix)> {
                let mut rng = random::rng(config.seed);
                Ok((random::random_full_rank(&mut rng, &layout)?, random::random_full_rank(&mut rng, &layout)?))
            };
            let fixed = vec![
                ("alpha=0", pair().and_then(|(a, b)| concavity(&a, &b, 0.0))),
                ("alpha=1", pair().and_then(|(a, b)| concavity(&a, &b, 1.0))),
                ("equal", pair().and_then(|(a, _)| concavity(&a, &a, 0.5))),
            ];
            run_relations(config, &ineq("concavity"), fixed, |rng| {
                let r1 = random::random_full_rank(rng, &layout)?;
                let r2 = random::random_full_rank(rng, &layout)?;
                concavity(&r1, &r2, rng.random::<f64>())
            })
        }
        Property::Subadditivity => {
            let layout = layout_or_panic(SubsystemLayout::lettered(d));
            let relations = [
                Relation { name: "subadditivity", tolerance: config.tolerance, inequality: true },
                Relation { name: "subadditivity_intermediate", tolerance: config.tolerance, inequality: true },
                Relation { name: "chain_rule", tolerance: config.tolerance, inequality: false },
            ];
            let fixed = vec![("product", product_ac_bd(d, config.seed).and_then(|r| subadditivity(&r)))];
            run_relations(config, &relations, fixed, |rng| subadditivity(&random::random_full_rank(rng, &layout)?))
        }
        Property::CoherentDuality => {
            let (din, dout, env) = (d[0], d[1], d[2]);
            let layout = layout_or_panic(SubsystemLayout::single("A", din));
            let relations = [
                Relation { name: "coherent_duality", tolerance: config.tolerance, inequality: false },
                Relation { name: "coherent_bounds", tolerance: config.tolerance, inequality: true },
            ];
            let mut fixed_rng = random::rng(config.seed);
            let fixed_rho = random::random_full_rank(&mut fixed_rng, &layout);
            let fixed_pure = random::random_pure_state_with(&mut fixed_rng, &layout).map(|p| p.as_density());
            let fixed_channel = channels::random_channel(din, dout, env, config.seed);
            let fixed = vec![
                ("identity", fixed_rho.and_then(|r| coherent(&r, &KrausChannel::identity(din)?))),
                ("pure", fixed_pure.and_then(|r| coherent(&r, &fixed_channel?))),
            ];
            run_relations(config, &relations, fixed, |rng| {
                let rho = random::random_full_rank(rng, &layout)?;
                let channel = channels::random_channel(din, dout, env, rng.random::<u64>())?;
                coherent(&rho, &channel)
            })
        }
        Property::Formulas => {
            let layout = layout_or_panic(SubsystemLayout::new([("A", d[0]), ("C", d[1])]));
            let fixed = vec![("bell", bell_ac().and_then(|r| formulas(&r))), ("product", product_ac(d).and_then(|r| formulas(&r)))];
            run_relations(config, &one("formulas"), fixed, |rng| formulas(&random::random_full_rank(rng, &layout)?))
        }
        Property::CoherentRoute => {
            let layout = layout_or_panic(SubsystemLayout::lettered(d));
            let fixed = vec![
                ("ghz", catalog::ghz().and_then(|g| coherent_route(&g.as_density()))),
                ("product", PureState::basis(layout.clone(), &[0, 0, 0]).and_then(|p| coherent_route(&p.as_density()))),
            ];
            run_relations(config, &one("coherent_route"), fixed, |rng| {
                coherent_route(&random::random_pure_state_with(rng, &layout)?.as_density())
            })
        }
        Property::Continuity => continuity(config),
    }
}

// Dimensions are validated before `run`, so layout construction cannot fail.
fn layout_or_panic(layout: Result<SubsystemLayout>) -> SubsystemLayout {
    layout.expect("dimensions validated")
}

fn finite_sum(a: ExtendedReal, b: ExtendedReal) -> Result<f64> {
    Ok(a.checked_add(b)?.to_f64())
}

fn duality(psi: &PureState) -> Result<Margins> {
    let rho = psi.as_density();
    let a = reduced_conditional_entropy(&rho, &["C"], &["A"])?;
    let b = reduced_conditional_entropy(&rho, &["C"], &["B"])?;
    Ok(vec![Some(-finite_sum(a, b)?.abs())])
}

fn bell_ac() -> Result<DensityMatrix> {
    catalog::bell(2)?.as_density().relabel(SubsystemLayout::new([("A", 2), ("C", 2)])?)
}

fn product_ac(d: &[usize]) -> Result<DensityMatrix> {
    let a = DensityMatrix::maximally_mixed(SubsystemLayout::single("A", d[0])?);
    let weights: Vec<f64> = (1..=d[1]).map(|i| i as f64).collect();
    let total: f64 = weights.iter().sum();
    let c = DensityMatrix::from_diagonal(
        SubsystemLayout::single("C", d[1])?,
        &weights.iter().map(|w| w / total).collect::<Vec<_>>(),
    )?;
    a.tensor(&c)
}

fn product_ac_bd(d: &[usize], seed: u64) -> Result<DensityMatrix> {
    let mut rng = random::rng(seed);
    let ac = random::random_full_rank(&mut rng, &SubsystemLayout::new([("A", d[0]), ("C", d[2])])?)?;
    let bd = random::random_full_rank(&mut rng, &SubsystemLayout::new([("B", d[1]), ("D", d[3])])?)?;
    ac.tensor(&bd)?.permute(&["A", "B", "C", "D"])
}

fn bound(rho: &DensityMatrix) -> Result<Margins> {
    let hc = von_neumann_entropy(&rho.partial_trace(&["C"])?)?;
    let hca = conditional_entropy(rho, &["C"], &["A"])?.to_f64();
    Ok(vec![Some(hc - hca.abs())])
}

fn monotonicity(rho: &DensityMatrix) -> Result<Margins> {
    let ab = reduced_conditional_entropy(rho, &["A"], &["B"])?;
    let abc = conditional_entropy(rho, &["A"], &["B", "C"])?;
    Ok(vec![Some(ab.checked_sub(abc)?.to_f64())])
}

fn concavity(r1: &DensityMatrix, r2: &DensityMatrix, alpha: f64) -> Result<Margins> {
    let h = |r: &DensityMatrix| conditional_entropy(r, &["A"], &["B"]).map(ExtendedReal::to_f64);
    let mix = r1.mix(r2, alpha)?;
    Ok(vec![Some(h(&mix)? - alpha * h(r1)? - (1.0 - alpha) * h(r2)?)])
}

fn subadditivity(rho: &DensityMatrix) -> Result<Margins> {
    let h = |t: &[&str], g: &[&str]| reduced_conditional_entropy(rho, t, g).map(ExtendedReal::to_f64);
    let ab_cd = h(&["A", "B"], &["C", "D"])?;
    let a_c = h(&["A"], &["C"])?;
    let b_d = h(&["B"], &["D"])?;
    let a_cd = h(&["A"], &["C", "D"])?;
    let b_cd = h(&["B"], &["C", "D"])?;
    let a_bcd = h(&["A"], &["B", "C", "D"])?;
    Ok(vec![
        Some(a_c + b_d - ab_cd),
        Some(a_cd + b_cd - ab_cd),
        Some(-(ab_cd - a_cd - b_cd + (a_cd - a_bcd)).abs()),
    ])
}

fn coherent(rho: &DensityMatrix, channel: &KrausChannel) -> Result<Margins> {
    let h = von_neumann_entropy(rho)?;
    let ic = channels::coherent_information(rho, channel)?;
    let ic_comp = channels::coherent_information(rho, &channel.complementary())?;
    Ok(vec![Some(-(ic + ic_comp).abs()), Some((h - ic.abs()).min(h - ic_comp.abs()))])
}

fn formulas(rho: &DensityMatrix) -> Result<Margins> {
    let other = conditional_entropy(rho, &["C"], &["A"])?.to_f64();
    let standard = entropy::conditional_entropy_standard(rho, &["C"], &["A"])?;
    Ok(vec![Some(-(other - standard).abs())])
}

fn coherent_route(rho: &DensityMatrix) -> Result<Margins> {
    let mut worst = f64::INFINITY;
    for given in ["A", "B"] {
        let via = channels::conditional_entropy_via_coherent_info(rho, &["C"], &[given])?;
        let direct = reduced_conditional_entropy(rho, &["C"], &[given])?.to_f64();
        worst = worst.min(-(via - direct).abs());
    }
    Ok(vec![Some(worst)])
}

/// `|H(target|given)(ρ_n) - H(target|given)(ρ₀)|` for `ρ_n = (1 - 2⁻ⁿ) ρ₀ + 2⁻ⁿ σ`.
pub fn continuity_deviations(
    base: &DensityMatrix,
    sigma: &DensityMatrix,
    target: &[&str],
    given: &[&str],
    exponents: &[u32],
) -> Result<Vec<f64>> {
    let h0 = conditional_entropy(base, target, given)?;
    exponents
        .iter()
        .map(|&n| {
            let eps = (-(n as f64)).exp2();
            let h = conditional_entropy(&base.mix(sigma, 1.0 - eps)?, target, given)?;
            let d = h.checked_sub(h0).map(|x| x.to_f64().abs()).unwrap_or(f64::INFINITY);
            Ok(d)
        })
        .collect()
}

fn continuity(config: &CheckConfig) -> Vec<PropertyReport> {
    let relations = [
        Relation { name: "continuity", tolerance: config.tolerance, inequality: false },
        Relation { name: "continuity_monotone", tolerance: MONOTONE_NOISE, inequality: false },
    ];
    let n_max = config.trials as u32;
    let exponents: Vec<u32> = (1..=n_max).collect();
    let deviations = (|| {
        let d = config.dims[0];
        let base = catalog::bell(d)?.as_density().relabel(SubsystemLayout::new([("A", d), ("C", d)])?)?;
        let sigma = DensityMatrix::maximally_mixed(base.layout().clone());
        continuity_deviations(&base, &sigma, &["C"], &["A"], &exponents)
    })();
    let samples: Vec<Sample> = match deviations {
        Ok(devs) => devs
            .iter()
            .enumerate()
            .map(|(i, &dev)| Sample {
                trial: format!("n={}", exponents[i]),
                seed: None,
                margins: vec![
                    (i + 1 == devs.len()).then_some(-dev),
                    (i > 0).then(|| devs[i - 1] - dev),
                ],
                error: None,
            })
            .collect(),
        Err(e) => vec![sample("schedule".into(), None, Err(e), relations.len())],
    };
    assemble(config, &relations, &samples)
}
