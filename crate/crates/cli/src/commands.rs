use std::collections::BTreeMap;
use std::path::Path;

use anyhow::Context;
use conjcomb_core::antisym::{antisymmetrizer, WedgeIndex};
use conjcomb_core::conjugation::{
    single_use_nogo_witness, verify_conjugation as run_verification, VerificationReport,
};
use conjcomb_core::io::{AntisymDump, StateJson};
use conjcomb_core::measures::{cg_ratio, evaluate, Measure};
use conjcomb_core::nogo::{nogo_report, NogoReport};
use conjcomb_core::random::{random_state, rng_from_seed};
use conjcomb_core::tensor::StateVector;
use conjcomb_core::twirl::{exact_twirl, monte_carlo_twirl, random_unitary_choi, FactorPairing};
use serde::Serialize;

use crate::output::{csv_table, emit, fmt_num, fmt_opt, to_json};
use crate::{Failure, Format, Pairing, RunConfig};

const MAX_MC_DIM: usize = 4;

fn write(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    emit(text, cfg.output.as_deref()).map_err(Failure::Runtime)
}

fn dim_in(cfg: &RunConfig, lo: usize, hi: usize) -> Result<usize, Failure> {
    if cfg.dim < lo || cfg.dim > hi {
        return Err(Failure::Usage(format!(
            "--dim must lie in {lo}..={hi}, got {}",
            cfg.dim
        )));
    }
    Ok(cfg.dim)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ConjugationOutput {
    #[serde(flatten)]
    report: VerificationReport,
    seed: u64,
    max_distance: f64,
    tolerance: f64,
    pass: bool,
}

pub fn verify_conjugation(cfg: &RunConfig, n: usize) -> Result<(), Failure> {
    let d = dim_in(cfg, 2, 6)?;
    if n < 1 || n >= d {
        return Err(Failure::Usage(format!("--n must lie in 1..{d}, got {n}")));
    }
    let report = run_verification(d, n, cfg.trials, cfg.seed)?;
    let pass = report.passes(cfg.tolerance);
    let max_distance = report
        .max_channel_distance
        .map_or(report.max_operator_distance, |c| {
            c.max(report.max_operator_distance)
        });
    let out = ConjugationOutput {
        report,
        seed: cfg.seed,
        max_distance,
        tolerance: cfg.tolerance,
        pass,
    };
    let text = match cfg.format {
        Format::Json => to_json(&out)?,
        Format::Csv => csv_table(
            &[
                "d",
                "n",
                "trials",
                "seed",
                "maxOperatorDistance",
                "maxChannelDistance",
                "maxDistance",
                "tolerance",
                "pass",
            ],
            &[vec![
                d.to_string(),
                n.to_string(),
                cfg.trials.to_string(),
                cfg.seed.to_string(),
                fmt_num(out.report.max_operator_distance),
                fmt_opt(out.report.max_channel_distance),
                fmt_num(max_distance),
                fmt_num(cfg.tolerance),
                pass.to_string(),
            ]],
        )?,
    };
    write(cfg, &text)?;
    if !pass {
        return Err(Failure::Check(format!(
            "max distance {max_distance:e} is not below {:e}",
            cfg.tolerance
        )));
    }
    Ok(())
}

/// A requested measure with its column name.
#[derive(Clone, Debug, PartialEq)]
struct Column {
    name: String,
    measure: Measure,
}

fn parse_measures(list: &str) -> Result<Vec<Column>, Failure> {
    let mut cols = Vec::new();
    for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let mut parts = token.split(':');
        let head = parts.next().unwrap_or_default();
        let args: Vec<usize> = parts
            .map(|p| p.parse::<usize>())
            .collect::<Result<_, _>>()
            .map_err(|_| Failure::Usage(format!("bad measure parameter in '{token}'")))?;
        let arity = |max: usize| {
            if args.len() > max {
                Err(Failure::Usage(format!("too many parameters in '{token}'")))
            } else {
                Ok(())
            }
        };
        let mut push = |measure: Measure| {
            let name = match measure {
                Measure::Concurrence2Qubit => "concurrence".to_string(),
                Measure::ConcurrenceG => "cg".to_string(),
                Measure::ConcurrenceGAlt { n } => format!("cg-alt:{n}"),
                Measure::GConcurrence => "g-concurrence".to_string(),
                Measure::MonotoneK { k } => format!("monotone:{k}"),
                Measure::FQuantity { n, m } => format!("f:{n}:{m}"),
                Measure::Rungta => "rungta".to_string(),
            };
            if !cols.iter().any(|c: &Column| c.name == name) {
                cols.push(Column { name, measure });
            }
        };
        match head {
            // the normalized measures; cg-alt and f are only proportional forms
            "all" => {
                arity(0)?;
                for m in [
                    Measure::Concurrence2Qubit,
                    Measure::ConcurrenceG,
                    Measure::GConcurrence,
                    Measure::MonotoneK { k: 2 },
                    Measure::Rungta,
                ] {
                    push(m);
                }
            }
            "concurrence" => {
                arity(0)?;
                push(Measure::Concurrence2Qubit)
            }
            "cg" => {
                arity(0)?;
                push(Measure::ConcurrenceG)
            }
            "cg-alt" => {
                arity(1)?;
                push(Measure::ConcurrenceGAlt {
                    n: args.first().copied().unwrap_or(1),
                })
            }
            "g-concurrence" => {
                arity(0)?;
                push(Measure::GConcurrence)
            }
            "monotone" => {
                arity(1)?;
                push(Measure::MonotoneK {
                    k: args.first().copied().unwrap_or(2),
                })
            }
            "f" => {
                if args.len() == 1 {
                    return Err(Failure::Usage(format!("'{token}' needs both n and m")));
                }
                arity(2)?;
                let (n, m) = if args.is_empty() {
                    (1, 1)
                } else {
                    (args[0], args[1])
                };
                push(Measure::FQuantity { n, m })
            }
            "rungta" => {
                arity(0)?;
                push(Measure::Rungta)
            }
            other => return Err(Failure::Usage(format!("unknown measure '{other}'"))),
        }
    }
    if cols.is_empty() {
        return Err(Failure::Usage("no measures requested".into()));
    }
    Ok(cols)
}

fn parse_row(line: &str) -> anyhow::Result<StateVector> {
    let j: StateJson = serde_json::from_str(line).context("not a {dims, re, im} object")?;
    if j.dims.len() != 2 {
        anyhow::bail!("expected a bipartite state, got dims {:?}", j.dims);
    }
    Ok(StateVector::try_from(&j)?)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ConcurrenceRow {
    line: usize,
    d: usize,
    /// `null` where a measure does not apply to the row.
    values: BTreeMap<String, Option<f64>>,
    ratio: Option<f64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RatioSummary {
    count: usize,
    mean: Option<f64>,
    std: Option<f64>,
    /// `d²` when every row shares one local dimension.
    expected: Option<f64>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ConcurrenceOutput {
    measures: Vec<String>,
    rows: Vec<ConcurrenceRow>,
    ratio_summary: RatioSummary,
}

fn summarize(rows: &[ConcurrenceRow]) -> RatioSummary {
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.ratio).collect();
    let count = ratios.len();
    let (mean, std) = if count == 0 {
        (None, None)
    } else {
        let mean = ratios.iter().sum::<f64>() / count as f64;
        let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / count as f64;
        (Some(mean), Some(var.sqrt()))
    };
    let d0 = rows.first().map(|r| r.d);
    let expected = d0
        .filter(|&d| rows.iter().all(|r| r.d == d))
        .map(|d| (d * d) as f64);
    RatioSummary {
        count,
        mean,
        std,
        expected,
    }
}

pub fn concurrence(cfg: &RunConfig, input: &Path, measures: &str) -> Result<(), Failure> {
    let cols = parse_measures(measures)?;
    let text = std::fs::read_to_string(input)
        .with_context(|| format!("reading {}", input.display()))
        .map_err(|e| Failure::Usage(format!("{e:#}")))?;
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let psi = match parse_row(line) {
            Ok(p) => p,
            Err(e) => {
                errors.push(format!("line {lineno}: {e:#}"));
                continue;
            }
        };
        let values = cols
            .iter()
            .map(|c| {
                (
                    c.name.clone(),
                    evaluate(&psi, c.measure).ok().map(|r| r.value),
                )
            })
            .collect();
        rows.push(ConcurrenceRow {
            line: lineno,
            d: psi.dims()[0].min(psi.dims()[1]),
            values,
            ratio: cg_ratio(&psi).ok().flatten(),
        });
    }
    if !errors.is_empty() {
        for e in &errors {
            eprintln!("{e}");
        }
        return Err(Failure::Check(format!(
            "{} malformed row(s) in {}",
            errors.len(),
            input.display()
        )));
    }
    let summary = summarize(&rows);
    let names: Vec<String> = cols.iter().map(|c| c.name.clone()).collect();
    let text = match cfg.format {
        Format::Json => to_json(&ConcurrenceOutput {
            measures: names,
            rows,
            ratio_summary: summary,
        })?,
        Format::Csv => {
            let mut header = vec!["line", "d"];
            header.extend(names.iter().map(String::as_str));
            header.push("ratio");
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    let mut rec = vec![r.line.to_string(), r.d.to_string()];
                    rec.extend(names.iter().map(|n| fmt_opt(r.values[n])));
                    rec.push(fmt_opt(r.ratio));
                    rec
                })
                .collect();
            let mut s = csv_table(&header, &table)?;
            s.push_str(&format!(
                "# ratio count={} mean={} std={} expected={}\n",
                summary.count,
                fmt_opt(summary.mean),
                fmt_opt(summary.std),
                fmt_opt(summary.expected)
            ));
            s
        }
    };
    write(cfg, &text)
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct NogoOutput {
    #[serde(flatten)]
    report: NogoReport,
    seed: u64,
    tolerance: f64,
    pass: bool,
}

pub fn nogo(cfg: &RunConfig, epsilon: f64, m: usize, l: usize) -> Result<(), Failure> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Failure::Usage(format!(
            "--epsilon must lie in (0, 1], got {epsilon}"
        )));
    }
    let d = dim_in(cfg, 2, 4)?;
    if m < 1 || d.checked_pow(m as u32).is_none_or(|x| x > 256) {
        return Err(Failure::Usage(format!(
            "--m must be >= 1 with dim^m <= 256, got {m}"
        )));
    }
    let psi = random_state(&[d], &mut rng_from_seed(cfg.seed))?;
    let report = nogo_report(epsilon, m, l, d, &psi)?;
    let pass = (report.success_weight - report.closed_form).abs() <= cfg.tolerance
        && report.fidelity >= report.closed_form - cfg.tolerance;
    let text = match cfg.format {
        Format::Json => to_json(&NogoOutput {
            report: report.clone(),
            seed: cfg.seed,
            tolerance: cfg.tolerance,
            pass,
        })?,
        Format::Csv => csv_table(
            &[
                "epsilon",
                "m",
                "l",
                "d",
                "successWeight",
                "closedForm",
                "fidelity",
                "bound",
                "crossingN",
                "seed",
                "pass",
            ],
            &[vec![
                fmt_num(epsilon),
                m.to_string(),
                l.to_string(),
                d.to_string(),
                fmt_num(report.success_weight),
                fmt_num(report.closed_form),
                fmt_num(report.fidelity),
                fmt_num(report.bound),
                report.crossing_n.to_string(),
                cfg.seed.to_string(),
                pass.to_string(),
            ]],
        )?,
    };
    write(cfg, &text)?;
    if !pass {
        return Err(Failure::Check(
            "simulated success weight departs from 1 − (1−ε)^l".into(),
        ));
    }
    Ok(())
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TwirlOutput {
    #[serde(flatten)]
    witness: conjcomb_core::conjugation::NogoWitness,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc_distance: Option<f64>,
}

pub fn twirl_witness(
    cfg: &RunConfig,
    mc_samples: Option<usize>,
    pairing: Pairing,
) -> Result<(), Failure> {
    let d = dim_in(cfg, 2, 8)?;
    let mc_distance = match mc_samples {
        None => None,
        Some(0) => return Err(Failure::Usage("--mc-samples must be at least 1".into())),
        Some(_) if d > MAX_MC_DIM => {
            return Err(Failure::Usage(format!(
                "--mc-samples needs --dim <= {MAX_MC_DIM}"
            )));
        }
        Some(samples) => {
            let pairing = match pairing {
                Pairing::Adjacent => FactorPairing::Adjacent,
                Pairing::Interleaved => FactorPairing::Interleaved,
            };
            let x = random_unitary_choi(d, &mut rng_from_seed(cfg.seed))?;
            let exact = exact_twirl(&x, d, pairing)?.reconstruct();
            let sampled = monte_carlo_twirl(&x, d, samples, cfg.seed.wrapping_add(1), pairing)?;
            Some(exact.max_abs_diff(&sampled))
        }
    };
    let witness = single_use_nogo_witness(d)?;
    let text = match cfg.format {
        Format::Json => to_json(&TwirlOutput {
            witness,
            mc_samples,
            mc_distance,
        })?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = witness
                .components
                .iter()
                .map(|c| {
                    vec![
                        d.to_string(),
                        c.label.clone(),
                        c.ranks[0].to_string(),
                        c.ranks[1].to_string(),
                        c.feasible.to_string(),
                        witness.feasible.to_string(),
                        fmt_opt(mc_distance),
                    ]
                })
                .collect();
            csv_table(
                &[
                    "d",
                    "component",
                    "rankLeft",
                    "rankRight",
                    "componentFeasible",
                    "feasible",
                    "mcDistance",
                ],
                &rows,
            )?
        }
    };
    write(cfg, &text)
}

pub fn antisym_dump(
    cfg: &RunConfig,
    n: usize,
    m: Option<usize>,
    indices: Option<Vec<usize>>,
) -> Result<(), Failure> {
    let d = dim_in(cfg, 2, 6)?;
    let dump = match indices {
        None => {
            if m.is_some_and(|m| m + n != d) {
                return Err(Failure::Usage(
                    "without --indices, n + m must equal --dim".into(),
                ));
            }
            AntisymDump::from(&antisymmetrizer(d, n)?)
        }
        Some(idx) => {
            let w = WedgeIndex::new(d, idx)?;
            let m = m.unwrap_or(w.len().saturating_sub(n));
            AntisymDump::indexed(d, n, m, &w)?
        }
    };
    let text = match cfg.format {
        Format::Json => to_json(&dump)?,
        Format::Csv => {
            let mx = &dump.matrix;
            let rows: Vec<Vec<String>> = (0..mx.rows * mx.cols)
                .filter(|&k| mx.re[k] != 0.0 || mx.im[k] != 0.0)
                .map(|k| {
                    vec![
                        (k / mx.cols).to_string(),
                        (k % mx.cols).to_string(),
                        fmt_num(mx.re[k]),
                        fmt_num(mx.im[k]),
                    ]
                })
                .collect();
            csv_table(&["row", "col", "re", "im"], &rows)?
        }
    };
    write(cfg, &text)
}
