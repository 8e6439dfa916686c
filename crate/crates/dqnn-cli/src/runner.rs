//! Command implementations: training runs, evaluation, codeword
//! extraction and the decoder-baseline table.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result, anyhow, bail};

use dqnn_core::channels::CaseLabel;
use dqnn_core::codes::{dominant_ket, extract_codeword};
use dqnn_core::eval::{CorruptionMode, EvalScenario, conditional_fidelity, mesh_fidelity};
use dqnn_core::network::{NetworkParams, NetworkSpec};
use dqnn_core::training::{TrainRecord, init_params, run_session};
use dqnn_core::{Error as CoreError, PureState};

use crate::config::{EvalSpec, ExperimentConfig};
use crate::formats;

/// Error classes mapped to process exit codes: config 2, numeric 3, io 4.
#[derive(Debug)]
pub enum CliError {
    Config(anyhow::Error),
    Numeric(anyhow::Error),
    Io(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Config(e) => format!("config error: {e:#}"),
            CliError::Numeric(e) => format!("numeric failure: {e:#}"),
            CliError::Io(e) => format!("io error: {e:#}"),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io<T>(r: Result<T>) -> CliResult<T> {
    r.map_err(CliError::Io)
}

fn cfg<T>(r: Result<T>) -> CliResult<T> {
    r.map_err(CliError::Config)
}

fn read_file(path: &Path) -> CliResult<String> {
    io(fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    io(fs::write(path, contents).with_context(|| format!("writing {}", path.display())))
}

/// Resolves the output directory: an explicit root wins, then the
/// DQNN_OUT_ROOT environment override, then the configured path as is.
pub fn resolve_out_dir(configured: &str, root: Option<&Path>) -> PathBuf {
    match root {
        Some(root) => root.join(configured),
        None => match std::env::var_os("DQNN_OUT_ROOT") {
            Some(root) => PathBuf::from(root).join(configured),
            None => PathBuf::from(configured),
        },
    }
}

fn load_checkpoint(path: &Path) -> CliResult<(NetworkSpec, NetworkParams)> {
    let text = read_file(path)?;
    cfg(formats::decode_checkpoint(&text))
}

/// Derived, recorded seeds for the independent random streams of a run.
fn data_seed(master: u64, session: usize) -> u64 {
    master.wrapping_add(1000 + session as u64)
}

fn validation_seed(master: u64) -> u64 {
    master.wrapping_add(2000)
}

pub struct TrainOutcome {
    pub out_dir: PathBuf,
    pub record: TrainRecord,
    pub final_val_cost: f64,
}

pub fn cmd_train(
    config_path: &Path,
    seed_override: Option<u64>,
    out_root: Option<&Path>,
) -> CliResult<TrainOutcome> {
    let text = read_file(config_path)?;
    let config = cfg(ExperimentConfig::parse(&text))?;
    let seed = seed_override.unwrap_or(config.seed);

    let spec = cfg(config.build_network())?;
    let sessions = cfg(config.build_sessions())?;
    let scheme = cfg(config.init_scheme())?;

    let out_dir = resolve_out_dir(&config.output.dir, out_root);
    io(fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display())))?;

    let val = cfg(config.build_validation_set(validation_seed(seed)))?;
    write_file(&out_dir.join("validation_set.txt"), &formats::dataset_text(&val))?;

    let mut params = init_params(&spec, scheme, seed);
    let mut record = TrainRecord::default();
    let start = Instant::now();
    let mut clock = move || start.elapsed().as_millis() as u64;

    let mut train = cfg(config.build_train_set(&config.sessions[0], data_seed(seed, 0)))?;
    write_file(&out_dir.join("train_set_session0.txt"), &formats::dataset_text(&train))?;

    for (i, session_cfg) in sessions.iter().enumerate() {
        if i > 0 && config.sessions[i].dataset.is_some() {
            train = cfg(config.build_train_set(&config.sessions[i], data_seed(seed, i)))?;
            write_file(
                &out_dir.join(format!("train_set_session{i}.txt")),
                &formats::dataset_text(&train),
            )?;
        }
        let offset = record.epochs.last().map(|e| e.epoch).unwrap_or(0);
        let session_seed = seed.wrapping_add(1 + i as u64);
        let result = run_session(
            &spec,
            params.clone(),
            &train,
            &val,
            session_cfg,
            session_seed,
            i,
            offset,
            &mut clock,
        );
        match result {
            Ok((next, session_record)) => {
                params = next;
                record.epochs.extend(session_record.epochs);
                let ckpt = cfg(formats::encode_checkpoint(&spec, &params))?;
                write_file(&out_dir.join(format!("checkpoint_session{i}.txt")), &ckpt)?;
            }
            Err(err @ CoreError::NonFiniteCost { .. }) => {
                // keep the last good checkpoint, persist the record so far
                write_file(&out_dir.join("record.csv"), &formats::train_record_csv(&record))?;
                return Err(CliError::Numeric(anyhow!("{err} (session {i})")));
            }
            Err(err) => return Err(CliError::Config(anyhow!("{err}"))),
        }
    }

    let ckpt = cfg(formats::encode_checkpoint(&spec, &params))?;
    write_file(&out_dir.join("checkpoint.txt"), &ckpt)?;
    write_file(&out_dir.join("record.csv"), &formats::train_record_csv(&record))?;

    // Final deterministic mesh report over the configured scenario.
    let scenario = EvalScenario {
        code: cfg(config.code_kind())?,
        channel: cfg(config.build_channel())?,
        mode: CorruptionMode::DeterministicKraus,
    };
    let report = cfg(mesh_fidelity(&spec, &params, config.dataset.validation_mesh_n, &scenario)
        .map_err(|e| anyhow!("{e}")))?;
    let hash = formats::fnv1a64(ckpt.as_bytes());
    write_file(&out_dir.join("colormap_final.csv"), &formats::colormap_csv(&report))?;
    write_file(&out_dir.join("colormap_final.meta"), &formats::sidecar_text(&report, hash, seed))?;

    let final_val_cost = record.last_val_cost().unwrap_or(0.0);
    let mut summary = format!(
        "seed={seed}\nepochs={}\nfinal_val_cost={final_val_cost:.6}\nmesh_mean_fidelity={:.6}\nmesh_normalized_mean={:.6}\n",
        record.epochs.len(),
        report.mean_fidelity,
        report.normalized_mean,
    );
    for (i, s) in config.sessions.iter().enumerate() {
        let label = s.label.as_deref().unwrap_or("-");
        let ran = record.epochs.iter().filter(|e| e.session == i).count();
        summary.push_str(&format!("session{i}={label} epochs_ran={ran}\n"));
    }
    write_file(&out_dir.join("summary.txt"), &summary)?;

    Ok(TrainOutcome { out_dir, record, final_val_cost })
}

pub fn cmd_eval(ckpt_path: &Path, spec_path: &Path, out_dir: &Path) -> CliResult<String> {
    let (net, params) = load_checkpoint(ckpt_path)?;
    let eval_spec = cfg(EvalSpec::parse(&read_file(spec_path)?))?;
    let code = cfg(eval_spec.code_kind())?;
    let channel = cfg(eval_spec.build_channel())?;
    if net.channel_slot().is_none() && code.n_physical() != net.input_qubits() {
        return Err(CliError::Config(anyhow!(
            "code '{}' has {} qubits but the checkpoint expects {}",
            code.name(),
            code.n_physical(),
            net.input_qubits()
        )));
    }
    io(fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display())))?;

    let scenario = EvalScenario {
        code,
        channel,
        mode: cfg(eval_spec.corruption_mode())?,
    };
    let report = cfg(mesh_fidelity(&net, &params, eval_spec.mesh_n, &scenario)
        .map_err(|e| anyhow!("{e}")))?;
    let ckpt_text = read_file(ckpt_path)?;
    let hash = formats::fnv1a64(ckpt_text.as_bytes());
    write_file(&out_dir.join("colormap_overall.csv"), &formats::colormap_csv(&report))?;
    write_file(
        &out_dir.join("colormap_overall.meta"),
        &formats::sidecar_text(&report, hash, eval_spec.seed),
    )?;

    let mut summary = format!(
        "overall mean_fidelity={:.6} normalized_mean={:.6}\n",
        report.mean_fidelity, report.normalized_mean
    );
    if !eval_spec.cases.is_empty() {
        let cases: Vec<CaseLabel> = eval_spec
            .cases
            .iter()
            .map(|c| CaseLabel::parse(c).map_err(|e| anyhow!("{e}")))
            .collect::<Result<_>>()
            .map_err(CliError::Config)?;
        let cond = cfg(conditional_fidelity(&net, &params, eval_spec.mesh_n, &cases, &scenario)
            .map_err(|e| anyhow!("{e}")))?;
        for (case, rep) in &cond.per_case {
            write_file(
                &out_dir.join(format!("colormap_{case}.csv")),
                &formats::colormap_csv(rep),
            )?;
            write_file(
                &out_dir.join(format!("colormap_{case}.meta")),
                &formats::sidecar_text(rep, hash, eval_spec.seed),
            )?;
            summary.push_str(&format!(
                "case {case}: mean_fidelity={:.6} normalized_mean={:.6}\n",
                rep.mean_fidelity, rep.normalized_mean
            ));
        }
    }
    write_file(&out_dir.join("summary.txt"), &summary)?;
    Ok(summary)
}

fn ket_label(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| {
            if index >> (n_qubits - 1 - q) & 1 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

fn describe_state(state: &PureState) -> String {
    let n = state.n_qubits();
    let mut entries: Vec<(usize, dqnn_core::C64)> = state
        .amplitudes()
        .iter()
        .copied()
        .enumerate()
        .filter(|(_, a)| a.norm() > 1e-6)
        .collect();
    entries.sort_by(|a, b| b.1.norm().total_cmp(&a.1.norm()));
    entries
        .iter()
        .take(8)
        .map(|(i, a)| format!("({:+.4}{:+.4}i)|{}⟩", a.re, a.im, ket_label(*i, n)))
        .collect::<Vec<_>>()
        .join(" + ")
}

pub fn cmd_extract_codeword(ckpt_path: &Path, mesh_n: usize) -> CliResult<String> {
    let (net, params) = load_checkpoint(ckpt_path)?;
    if net.layer_in(1) != 1 {
        return Err(CliError::Config(anyhow!(
            "layer 1 takes {} qubits; codeword extraction needs a single-qubit encoding layer",
            net.layer_in(1)
        )));
    }
    let (c0, c1) = cfg(extract_codeword(&net, &params, 1).map_err(|e| anyhow!("{e}")))?;
    let overlap = c0.inner(&c1).norm();
    let (k0, a0) = dominant_ket(&c0);
    let (k1, a1) = dominant_ket(&c1);
    let n = c0.n_qubits();
    let mut out = String::new();
    out.push_str(&format!("|0⟩ -> {}\n", describe_state(&c0)));
    out.push_str(&format!("|1⟩ -> {}\n", describe_state(&c1)));
    out.push_str(&format!(
        "dominant kets: |{}⟩ ({:+.4}{:+.4}i, weight {:.4}) and |{}⟩ ({:+.4}{:+.4}i, weight {:.4})\n",
        ket_label(k0, n),
        a0.re,
        a0.im,
        a0.norm_sqr(),
        ket_label(k1, n),
        a1.re,
        a1.im,
        a1.norm_sqr(),
    ));
    out.push_str(&format!("overlap |<c0|c1>| = {overlap:.3e}\n"));

    // Conditional fidelities of the full pipeline, when the corruption
    // cases live inside the network.
    if let Some(slot) = net.channel_slot() {
        let cases: Vec<CaseLabel> = slot.channel.cases().to_vec();
        let scenario = EvalScenario {
            code: dqnn_core::codes::CodeKind::Qubit,
            channel: None,
            mode: CorruptionMode::DeterministicKraus,
        };
        let cond = cfg(conditional_fidelity(&net, &params, mesh_n, &cases, &scenario)
            .map_err(|e| anyhow!("{e}")))?;
        for (case, rep) in &cond.per_case {
            out.push_str(&format!(
                "case {case}: mean_fidelity={:.6} normalized_mean={:.6}\n",
                rep.mean_fidelity, rep.normalized_mean
            ));
        }
    }
    Ok(out)
}

pub fn cmd_oracle(
    ps: &[f64],
    ckpt: Option<&Path>,
    mesh_n: usize,
    out_path: Option<&Path>,
) -> CliResult<String> {
    for &p in ps {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::Config(anyhow!("p={p} outside [0, 1]")));
        }
    }
    let csv = match ckpt {
        Some(path) => {
            let (net, params) = load_checkpoint(path)?;
            if net.input_qubits() != 3 || net.channel_slot().is_some() {
                return Err(CliError::Config(anyhow!(
                    "the oracle comparison needs a 3-qubit-input denoising checkpoint"
                )));
            }
            let rows =
                cfg(dqnn_core::eval::compare_to_oracle(&net, &params, mesh_n, ps)
                    .map_err(|e| anyhow!("{e}")))?;
            formats::oracle_csv(&rows)
        }
        None => cfg(formats::oracle_csv_baseline(ps))?,
    };
    if let Some(path) = out_path {
        write_file(path, &csv)?;
    }
    Ok(csv)
}

/// Parses a comma-separated probability list.
pub fn parse_p_list(arg: &str) -> Result<Vec<f64>> {
    arg.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad probability '{s}'"))
        })
        .collect::<Result<Vec<_>>>()
        .and_then(|ps| {
            if ps.is_empty() {
                bail!("empty probability list")
            } else {
                Ok(ps)
            }
        })
}
