//! Subcommand handlers: resolve inputs, run the core routines, and
//! shape report payloads.

use std::collections::BTreeMap;

use anyhow::Context;
use boundlab_core::bell::{BellBasis, SimplexState};
use boundlab_core::criteria::{classify_with, CriteriaChain};
use boundlab_core::linalg::{DenseState, HermitianOperator};
use boundlab_core::protocols::{
    choi_operator, choi_state, is_completely_positive, qfi as qfi_value, qfi_upper_bound,
    run_activation, ActivationVariant, QuantumChannel,
};
use boundlab_core::survey::{
    run_survey, slice_scan, BasisChoice, GridSpec, ScanFamily, SurveyConfig,
};
use boundlab_core::witnesses::{
    bell_violation_witness, build_mub_set, correlation_value, mirror_witness, mub_window_operator,
    mub_witness, separability_window, sic_correlation_value, sic_window_operator,
    unextendible_d4_triple, MUBSet, SICSet, WindowParams,
};
use boundlab_core::zoo::{catalog_get, CatalogState};
use boundlab_core::Error as CoreError;

use crate::report::{kv_csv, Output};
use crate::{
    ActivateArgs, ChoiArgs, ClassifyArgs, D4Variant, QfiArgs, ScanArgs, StateCommand,
    SurveyArgs, WindowKind, WitnessCommand,
};

fn parse_params(param: &Option<String>) -> anyhow::Result<BTreeMap<String, f64>> {
    let mut map = BTreeMap::new();
    let Some(text) = param else {
        return Ok(map);
    };
    for piece in text.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = piece
            .split_once('=')
            .ok_or_else(|| CoreError::Parse(format!("expected k=v, got \"{piece}\"")))?;
        let value: f64 = v
            .parse()
            .map_err(|_| CoreError::Parse(format!("parameter {k} is not a number: \"{v}\"")))?;
        map.insert(k.trim().to_string(), value);
    }
    Ok(map)
}

/// A state argument is a path when it points at an existing file,
/// otherwise a catalog name.
fn resolve_state(spec: &str, param: &Option<String>) -> anyhow::Result<CatalogState> {
    let path = std::path::Path::new(spec);
    if path.exists() {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading state file {}", path.display()))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CoreError::Parse(format!("malformed state file: {e}")))?;
        return match value.get("kind").and_then(|k| k.as_str()) {
            Some("dense") => Ok(CatalogState::Dense(DenseState::from_json_value(&value)?)),
            Some("simplex") => Ok(CatalogState::Simplex(SimplexState::from_json_value(
                &value,
            )?)),
            other => Err(CoreError::Parse(format!(
                "unknown state kind {other:?} (expected \"dense\" or \"simplex\")"
            ))
            .into()),
        };
    }
    let params = parse_params(param)?;
    Ok(catalog_get(spec, &params)?)
}

pub fn classify(args: &ClassifyArgs, output: &Output) -> anyhow::Result<()> {
    let state = resolve_state(&args.state, &args.param)?;
    let dense = state.to_dense();
    let chain = CriteriaChain {
        correlation_scan: args.scan,
        ..CriteriaChain::default()
    };
    let verdict = classify_with(&dense, state.simplex(), &chain)?;
    let json = format!(
        "{{\"state\":{},\"verdict\":{}}}",
        serde_json::to_string(&args.state)?,
        verdict.to_json()
    );
    let mut rows = vec![("class", verdict.class.to_string())];
    for e in &verdict.evidence {
        rows.push((
            "criterion",
            format!("{} fired={} score={:.12e}", e.id, e.fired, e.score),
        ));
    }
    let csv = kv_csv(
        &rows
            .iter()
            .map(|(k, v)| (*k, v.clone()))
            .collect::<Vec<_>>(),
    );
    output.emit(&format!("classify {}", args.state), &json, &csv)
}

fn mub_set_for(d: usize, m: usize, variant: D4Variant) -> anyhow::Result<MUBSet> {
    match (d, variant) {
        (4, D4Variant::Complete) => {
            let sel: Vec<usize> = (0..m.min(5)).collect();
            Ok(MUBSet::bundled_d4(&sel)?)
        }
        (4, D4Variant::Unextendible) => {
            if m != 3 {
                return Err(CoreError::InvalidParameter(
                    "the unextendible d = 4 set has exactly three bases".into(),
                )
                .into());
            }
            Ok(unextendible_d4_triple()?)
        }
        _ => Ok(build_mub_set(d, m)?),
    }
}

pub fn witness(which: &WitnessCommand, seed: u64, output: &Output) -> anyhow::Result<()> {
    match which {
        WitnessCommand::Mub(args) => {
            let mubs = mub_set_for(args.d, args.m, D4Variant::Complete)?;
            let w = mub_witness(&mubs, args.s, args.transposed)?;
            let mut fields = vec![
                ("kind".to_string(), "\"mub\"".to_string()),
                ("d".to_string(), args.d.to_string()),
                ("m".to_string(), args.m.to_string()),
                ("s".to_string(), args.s.to_string()),
                ("transposed".to_string(), args.transposed.to_string()),
                (
                    "separable_upper_bound".to_string(),
                    format!("{:.16e}", (args.d + args.m - 1) as f64 / args.d as f64),
                ),
                ("operator".to_string(), w.operator.to_json()),
            ];
            if let Some(eval) = &args.eval {
                let state = resolve_state(eval, &args.param)?;
                let dense = state.to_dense();
                let value = w.expectation(&dense)?;
                let corr = correlation_value(&dense, &mubs, args.s)?;
                fields.push(("expectation".to_string(), format!("{value:.16e}")));
                fields.push(("correlation".to_string(), format!("{corr:.16e}")));
                fields.push(("violated".to_string(), (value < 0.0).to_string()));
            }
            emit_object(output, &format!("witness mub d={} m={}", args.d, args.m), fields)
        }
        WitnessCommand::Sic(args) => {
            let sic = SICSet::bundled(args.d)?;
            let count = args.count.unwrap_or(args.d * args.d);
            let mut fields = vec![
                ("kind".to_string(), "\"sic\"".to_string()),
                ("d".to_string(), args.d.to_string()),
                ("count".to_string(), count.to_string()),
            ];
            if let Some(eval) = &args.eval {
                let state = resolve_state(eval, &args.param)?;
                let value = sic_correlation_value(&state.to_dense(), &sic, count)?;
                fields.push(("correlation".to_string(), format!("{value:.16e}")));
            }
            emit_object(output, &format!("witness sic d={} count={count}", args.d), fields)
        }
        WitnessCommand::Window(args) => {
            let op: HermitianOperator = match args.kind {
                WindowKind::Mub => {
                    let m = args.m.ok_or_else(|| {
                        CoreError::InvalidParameter("--m is required for MUB windows".into())
                    })?;
                    mub_window_operator(&mub_set_for(args.d, m, args.variant)?)?
                }
                WindowKind::Sic => {
                    let count = args.count.unwrap_or(args.d * args.d);
                    sic_window_operator(&SICSet::bundled(args.d)?, count)?
                }
            };
            let params = WindowParams {
                restarts: args.restarts,
                iterations: args.iterations,
                seed,
            };
            let w = separability_window(&op, &params)?;
            let fields = vec![
                ("L".to_string(), format!("{:.16e}", w.lower)),
                ("U".to_string(), format!("{:.16e}", w.upper)),
                ("restarts".to_string(), w.restarts.to_string()),
                ("converged".to_string(), w.converged.to_string()),
            ];
            emit_object(output, &format!("witness window d={}", args.d), fields)
        }
        WitnessCommand::Mirror(args) => {
            let mubs = mub_set_for(args.d, args.m, D4Variant::Complete)?;
            let w = mub_witness(&mubs, args.s, args.transposed)?;
            let params = WindowParams {
                seed,
                ..Default::default()
            };
            let win = separability_window(&w.operator, &params)?;
            let mirror = mirror_witness(&w, &win)?;
            let fields = vec![
                ("kind".to_string(), "\"mirror\"".to_string()),
                ("mu".to_string(), format!("{:.16e}", win.upper)),
                ("is_witness".to_string(), mirror.is_witness.to_string()),
                ("operator".to_string(), mirror.operator.to_json()),
            ];
            emit_object(output, &format!("witness mirror d={} m={}", args.d, args.m), fields)
        }
        WitnessCommand::Bell(args) => {
            let w = bell_violation_witness();
            let spec = args.eval.clone().unwrap_or_else(|| "rho_bound".into());
            let state = resolve_state(&spec, &args.param)?;
            let value = w.expectation(&state.to_dense())?;
            let fields = vec![
                ("kind".to_string(), "\"bell\"".to_string()),
                ("eval".to_string(), format!("\"{spec}\"")),
                ("value".to_string(), format!("{value:.16e}")),
                ("violated".to_string(), (value < 0.0).to_string()),
                ("operator".to_string(), w.operator.to_json()),
            ];
            emit_object(output, &format!("witness bell eval={spec}"), fields)
        }
    }
}

fn emit_object(
    output: &Output,
    request: &str,
    fields: Vec<(String, String)>,
) -> anyhow::Result<()> {
    let json = format!(
        "{{{}}}",
        fields
            .iter()
            .map(|(k, v)| format!("\"{k}\":{v}"))
            .collect::<Vec<_>>()
            .join(",")
    );
    let csv_rows: Vec<(&str, String)> = fields
        .iter()
        .filter(|(k, _)| k != "operator")
        .map(|(k, v)| (k.as_str(), v.clone()))
        .collect();
    output.emit(request, &json, &kv_csv(&csv_rows))
}

fn parse_chain(spec: &Option<String>) -> anyhow::Result<CriteriaChain> {
    let Some(text) = spec else {
        return Ok(CriteriaChain::survey_default());
    };
    let mut chain = CriteriaChain {
        realignment: false,
        quasi_pure: false,
        reduction: false,
        correlation_scan: false,
        esic: false,
    };
    for piece in text.split(',').filter(|p| !p.is_empty()) {
        match piece.trim() {
            "realignment" => chain.realignment = true,
            "quasi-pure" => chain.quasi_pure = true,
            "reduction" => chain.reduction = true,
            "correlation-scan" => chain.correlation_scan = true,
            "esic" => chain.esic = true,
            other => {
                return Err(CoreError::InvalidParameter(format!(
                    "unknown criterion \"{other}\""
                ))
                .into())
            }
        }
    }
    Ok(chain)
}

fn parse_basis_choice(spec: &str) -> anyhow::Result<BasisChoice> {
    if spec == "standard" {
        return Ok(BasisChoice::Standard);
    }
    if let Some(seed) = spec.strip_prefix("seeded:") {
        let seed: u64 = seed
            .parse()
            .map_err(|_| CoreError::Parse(format!("bad basis seed \"{seed}\"")))?;
        return Ok(BasisChoice::RandomGeneralized { seed });
    }
    Err(CoreError::Parse(format!("unknown basis \"{spec}\" (standard | seeded:<N>)")).into())
}

pub fn survey(args: &SurveyArgs, seed: u64, output: &Output) -> anyhow::Result<()> {
    let samples = args.n.unwrap_or(if args.d >= 4 { 20_000 } else { 100_000 });
    let config = SurveyConfig {
        d: args.d,
        samples,
        seed,
        basis: parse_basis_choice(&args.basis)?,
        chain: parse_chain(&args.chain)?,
    };
    let result = run_survey(&config)?;
    output.emit(
        &format!("survey d={} n={samples} seed={seed}", args.d),
        &result.to_json(),
        &result.to_csv(),
    )
}

fn parse_family(spec: &str) -> anyhow::Result<ScanFamily> {
    match spec {
        "A" => Ok(ScanFamily::ExperimentA),
        "B1" => Ok(ScanFamily::ExperimentB {
            gamma: -1.0 / 3.0_f64.sqrt(),
        }),
        "B2" => Ok(ScanFamily::ExperimentB { gamma: -0.83 }),
        other => {
            if let Some(gamma) = other.strip_prefix("B:") {
                let gamma: f64 = gamma
                    .parse()
                    .map_err(|_| CoreError::Parse(format!("bad gamma \"{gamma}\"")))?;
                Ok(ScanFamily::ExperimentB { gamma })
            } else {
                Err(
                    CoreError::Parse(format!("unknown family \"{other}\" (A | B1 | B2 | B:<g>)"))
                        .into(),
                )
            }
        }
    }
}

pub fn scan(args: &ScanArgs, output: &Output) -> anyhow::Result<()> {
    let family = parse_family(&args.family)?;
    let basis = match parse_basis_choice(&args.basis)? {
        BasisChoice::Standard => BellBasis::standard(3),
        BasisChoice::RandomGeneralized { seed } => BellBasis::random_generalized(3, seed),
    };
    let grid = GridSpec {
        x_min: args.x_min,
        x_max: args.x_max,
        nx: args.nx,
        y_min: args.y_min,
        y_max: args.y_max,
        ny: args.ny,
    };
    let result = slice_scan(&family, &grid, &basis, &CriteriaChain::survey_default())?;
    output.emit(
        &format!("scan family={}", args.family),
        &result.to_json(),
        &result.to_csv(),
    )
}

pub fn activate(args: &ActivateArgs, output: &Output) -> anyhow::Result<()> {
    let variant = match args.variant {
        crate::VariantArg::Standard => ActivationVariant::Standard,
        crate::VariantArg::Tilde => ActivationVariant::Tilde,
    };
    let trace = run_activation(args.f0, args.alpha, args.rounds, variant, args.cross_check)?;
    output.emit(
        &format!(
            "activate f0={} alpha={} rounds={}",
            args.f0, args.alpha, args.rounds
        ),
        &serde_json::to_string_pretty(&trace)?,
        &trace.to_csv(),
    )
}

pub fn state(which: &StateCommand, output: &Output) -> anyhow::Result<()> {
    match which {
        StateCommand::Get(args) => {
            let state = resolve_state(&args.name, &args.param)?;
            let json = state.to_json();
            let dims = match &state {
                CatalogState::Dense(s) => s.dims().to_vec(),
                CatalogState::Simplex(s) => vec![s.d(), s.d()],
            };
            let csv = kv_csv(&[
                ("name", args.name.clone()),
                ("dims", format!("{dims:?}")),
            ]);
            output.emit(&format!("state get {}", args.name), &json, &csv)
        }
        StateCommand::Validate(args) => {
            let text = std::fs::read_to_string(&args.path)
                .with_context(|| format!("reading {}", args.path.display()))?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CoreError::Parse(format!("malformed state file: {e}")))?;
            let (kind, dims) = match value.get("kind").and_then(|k| k.as_str()) {
                Some("dense") => {
                    let s = DenseState::from_json_value(&value)?;
                    ("dense", s.dims().to_vec())
                }
                Some("simplex") => {
                    let s = SimplexState::from_json_value(&value)?;
                    ("simplex", vec![s.d(), s.d()])
                }
                other => {
                    return Err(CoreError::Parse(format!(
                        "unknown state kind {other:?}"
                    ))
                    .into())
                }
            };
            let fields = vec![
                ("valid".to_string(), "true".to_string()),
                ("kind".to_string(), format!("\"{kind}\"")),
                ("dims".to_string(), format!("{dims:?}")),
            ];
            emit_object(output, &format!("state validate {}", args.path.display()), fields)
        }
    }
}

pub fn choi(args: &ChoiArgs, output: &Output) -> anyhow::Result<()> {
    let channel = match args.channel.as_str() {
        "identity" => QuantumChannel::identity(args.d),
        "depolarizing" => {
            let p = args.p.ok_or_else(|| {
                CoreError::InvalidParameter("depolarizing channel needs --p".into())
            })?;
            QuantumChannel::depolarizing(args.d, p)?
        }
        "transpose" => QuantumChannel::transpose_map(args.d),
        other => {
            return Err(CoreError::InvalidParameter(format!(
                "unknown channel \"{other}\" (identity | depolarizing | transpose)"
            ))
            .into())
        }
    };
    let cp = is_completely_positive(&channel)?;
    let payload = if args.state_form {
        choi_state(&channel)?.to_json()
    } else {
        choi_operator(&channel)?.to_json()
    };
    let fields = vec![
        ("channel".to_string(), format!("\"{}\"", args.channel)),
        ("completely_positive".to_string(), cp.to_string()),
        ("operator".to_string(), payload),
    ];
    emit_object(
        output,
        &format!("choi channel={} d={}", args.channel, args.d),
        fields,
    )
}

pub fn qfi(args: &QfiArgs, output: &Output) -> anyhow::Result<()> {
    let state = resolve_state(&args.state, &args.param)?.to_dense();
    let text = std::fs::read_to_string(&args.hamiltonian)
        .with_context(|| format!("reading {}", args.hamiltonian.display()))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CoreError::Parse(format!("malformed operator file: {e}")))?;
    let h = hermitian_from_json(&value)?;
    let f = qfi_value(&state, &h)?;
    let bound = qfi_upper_bound(&state, &h)?;
    let fields = vec![
        ("qfi".to_string(), format!("{f:.16e}")),
        ("upper_bound".to_string(), format!("{bound:.16e}")),
    ];
    emit_object(output, &format!("qfi state={}", args.state), fields)
}

fn hermitian_from_json(v: &serde_json::Value) -> anyhow::Result<HermitianOperator> {
    use num_complex::Complex64 as C64;
    if !matches!(
        v.get("kind").and_then(|k| k.as_str()),
        Some("hermitian") | Some("dense")
    ) {
        return Err(CoreError::Parse("expected kind \"hermitian\"".into()).into());
    }
    let dims: Vec<usize> = v
        .get("dims")
        .and_then(|d| d.as_array())
        .ok_or_else(|| CoreError::Parse("missing dims".into()))?
        .iter()
        .map(|x| x.as_u64().map(|u| u as usize))
        .collect::<Option<_>>()
        .ok_or_else(|| CoreError::Parse("dims must be integers".into()))?;
    let side: usize = dims.iter().product();
    let entries = v
        .get("entries")
        .and_then(|e| e.as_array())
        .ok_or_else(|| CoreError::Parse("missing entries".into()))?;
    if entries.len() != side * side {
        return Err(CoreError::Parse("wrong number of entries".into()).into());
    }
    let mut m = ndarray::Array2::zeros((side, side));
    for (idx, pair) in entries.iter().enumerate() {
        let p = pair
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| CoreError::Parse("entries are [re,im] pairs".into()))?;
        m[[idx / side, idx % side]] = C64::new(
            p[0].as_f64()
                .ok_or_else(|| CoreError::Parse("bad entry".into()))?,
            p[1].as_f64()
                .ok_or_else(|| CoreError::Parse("bad entry".into()))?,
        );
    }
    Ok(HermitianOperator::new(dims, m)?)
}
