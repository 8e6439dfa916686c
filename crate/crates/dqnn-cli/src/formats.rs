//! On-disk formats: network checkpoints, training-record CSV, colormap CSV
//! with its metadata sidecar, dataset files and the oracle table.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every f64 bit-exactly.

use std::fmt::Write as _;

use anyhow::{Context, Result, anyhow, bail};

use dqnn_core::C64;
use dqnn_core::channels::CaseLabel;
use dqnn_core::codes::{Dataset, DatasetKind, PairMeta, TrainingPair};
use dqnn_core::eval::{MeshReport, OracleRow};
use dqnn_core::network::{NetworkParams, NetworkSpec};
use dqnn_core::qcore::PureState;
use dqnn_core::training::TrainRecord;

use crate::config::{build_channel, channel_descriptor};

pub const CHECKPOINT_MAGIC: &str = "dqnn-checkpoint v1";
pub const DATASET_MAGIC: &str = "dqnn-dataset v1";

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse::<f64>().with_context(|| format!("bad float '{s}'"))
}

/// FNV-1a 64-bit hash, used to tag colormaps with the model they came from.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Serializes widths, bindings, channel slot and the flat coefficient
/// vector (layers ascending, perceptrons ascending, string-index order).
pub fn encode_checkpoint(spec: &NetworkSpec, params: &NetworkParams) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{CHECKPOINT_MAGIC}")?;
    let widths: Vec<String> = spec.widths().iter().map(|w| w.to_string()).collect();
    writeln!(out, "widths {}", widths.join(" "))?;
    for b in spec.bindings() {
        writeln!(out, "binding {} {}", b.source, b.bound)?;
    }
    if let Some(slot) = spec.channel_slot() {
        let (kind, value) = channel_descriptor(&slot.channel)
            .map_err(|e| anyhow!("{e}"))?;
        writeln!(out, "channel {kind} {} {}", fmt_f64(value), slot.after_layer)?;
    }
    let flat = params.to_flat();
    writeln!(out, "params {}", flat.len())?;
    for v in &flat {
        writeln!(out, "{}", fmt_f64(*v))?;
    }
    writeln!(out, "end")?;
    Ok(out)
}

pub fn decode_checkpoint(text: &str) -> Result<(NetworkSpec, NetworkParams)> {
    let mut lines = text.lines();
    let magic = lines.next().ok_or_else(|| anyhow!("empty checkpoint"))?;
    if magic.trim() != CHECKPOINT_MAGIC {
        bail!("not a checkpoint (bad magic '{magic}')");
    }
    let widths_line = lines.next().ok_or_else(|| anyhow!("missing widths"))?;
    let widths: Vec<usize> = widths_line
        .strip_prefix("widths ")
        .ok_or_else(|| anyhow!("expected widths line, got '{widths_line}'"))?
        .split_whitespace()
        .map(|w| w.parse::<usize>().context("bad width"))
        .collect::<Result<_>>()?;
    let mut spec = NetworkSpec::new(widths)?;

    let mut line = lines.next().ok_or_else(|| anyhow!("truncated checkpoint"))?;
    while let Some(rest) = line.strip_prefix("binding ") {
        let mut it = rest.split_whitespace();
        let source = it.next().ok_or_else(|| anyhow!("bad binding"))?.parse()?;
        let bound = it.next().ok_or_else(|| anyhow!("bad binding"))?.parse()?;
        spec = spec.with_binding(source, bound)?;
        line = lines.next().ok_or_else(|| anyhow!("truncated checkpoint"))?;
    }
    if let Some(rest) = line.strip_prefix("channel ") {
        let mut it = rest.split_whitespace();
        let kind = it.next().ok_or_else(|| anyhow!("bad channel line"))?;
        let value = parse_f64(it.next().ok_or_else(|| anyhow!("bad channel line"))?)?;
        let after_layer: usize =
            it.next().ok_or_else(|| anyhow!("bad channel line"))?.parse()?;
        let qubits = spec.widths()[after_layer];
        let channel = match kind {
            "amplitude_damping" => build_channel(kind, None, Some(value), qubits)?,
            _ => build_channel(kind, Some(value), None, qubits)?,
        };
        spec = spec.with_channel(after_layer, channel)?;
        line = lines.next().ok_or_else(|| anyhow!("truncated checkpoint"))?;
    }
    let count: usize = line
        .strip_prefix("params ")
        .ok_or_else(|| anyhow!("expected params line, got '{line}'"))?
        .parse()
        .context("bad parameter count")?;
    if count as u64 != spec.trainable_parameter_count() {
        bail!(
            "parameter count {count} does not match topology ({})",
            spec.trainable_parameter_count()
        );
    }
    let mut flat = Vec::with_capacity(count);
    for _ in 0..count {
        let v = lines.next().ok_or_else(|| anyhow!("truncated parameter list"))?;
        flat.push(parse_f64(v.trim())?);
    }
    match lines.next() {
        Some("end") => {}
        other => bail!("missing end marker, got {other:?}"),
    }
    let params = NetworkParams::from_flat(&spec, &flat)?;
    Ok((spec, params))
}

/// `epoch,session,train_cost,val_cost,wall_ms` rows.
pub fn train_record_csv(record: &TrainRecord) -> String {
    let mut out = String::from("epoch,session,train_cost,val_cost,wall_ms\n");
    for e in &record.epochs {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            e.epoch,
            e.session,
            fmt_f64(e.train_cost),
            fmt_f64(e.val_cost),
            e.wall_ms
        );
    }
    out
}

/// `theta,phi,fidelity` rows in row-major grid order.
pub fn colormap_csv(report: &MeshReport) -> String {
    let mut out = String::from("theta,phi,fidelity\n");
    for i in 0..report.n {
        for j in 0..report.n {
            let _ = writeln!(
                out,
                "{},{},{}",
                fmt_f64(report.theta(i)),
                fmt_f64(report.phi(j)),
                fmt_f64(report.cell(i, j))
            );
        }
    }
    out
}

pub fn parse_colormap_csv(text: &str) -> Result<Vec<(f64, f64, f64)>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            continue;
        }
        let mut it = line.split(',');
        let theta = parse_f64(it.next().ok_or_else(|| anyhow!("row {i}: missing theta"))?)?;
        let phi = parse_f64(it.next().ok_or_else(|| anyhow!("row {i}: missing phi"))?)?;
        let f = parse_f64(it.next().ok_or_else(|| anyhow!("row {i}: missing fidelity"))?)?;
        rows.push((theta, phi, f));
    }
    Ok(rows)
}

/// Flat key=value sidecar describing how a colormap was produced.
pub fn sidecar_text(report: &MeshReport, model_hash: u64, seed: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "model_hash={model_hash:016x}");
    let _ = writeln!(out, "scenario={}", report.scenario);
    let _ = writeln!(out, "seed={seed}");
    let _ = writeln!(out, "mesh_n={}", report.n);
    let _ = writeln!(out, "mean_fidelity={}", fmt_f64(report.mean_fidelity));
    let _ = writeln!(out, "normalized_mean={}", fmt_f64(report.normalized_mean));
    out
}

/// One record per pair: label, angles, corruption case, seed, and both
/// amplitude lists.
pub fn dataset_text(ds: &Dataset) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{DATASET_MAGIC}");
    let kind = match ds.kind {
        DatasetKind::Train => "train",
        DatasetKind::Validation => "validation",
    };
    let _ = writeln!(out, "kind {kind}");
    let _ = writeln!(out, "config {}", ds.config);
    let _ = writeln!(out, "pairs {}", ds.len());
    for p in &ds.pairs {
        let _ = writeln!(
            out,
            "pair {} {} {} {} {}",
            p.meta.label,
            fmt_f64(p.meta.theta),
            fmt_f64(p.meta.phi),
            p.meta.case,
            p.meta.seed
        );
        let _ = writeln!(out, "input {}", amplitudes_text(&p.input));
        let _ = writeln!(out, "target {}", amplitudes_text(&p.target));
    }
    out
}

fn amplitudes_text(state: &PureState) -> String {
    state
        .amplitudes()
        .iter()
        .map(|a| format!("{} {}", fmt_f64(a.re), fmt_f64(a.im)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn parse_amplitudes(line: &str, tag: &str) -> Result<PureState> {
    let rest = line
        .strip_prefix(tag)
        .ok_or_else(|| anyhow!("expected '{tag}' line, got '{line}'"))?;
    let numbers: Vec<f64> = rest
        .split_whitespace()
        .map(parse_f64)
        .collect::<Result<_>>()?;
    if numbers.len() % 2 != 0 {
        bail!("odd amplitude component count");
    }
    let amps: Vec<C64> = numbers.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
    Ok(PureState::new(amps)?)
}

pub fn parse_dataset(text: &str) -> Result<Dataset> {
    let mut lines = text.lines();
    let magic = lines.next().ok_or_else(|| anyhow!("empty dataset"))?;
    if magic.trim() != DATASET_MAGIC {
        bail!("not a dataset file");
    }
    let kind_line = lines.next().ok_or_else(|| anyhow!("missing kind"))?;
    let kind = match kind_line.strip_prefix("kind ") {
        Some("train") => DatasetKind::Train,
        Some("validation") => DatasetKind::Validation,
        other => bail!("bad kind line {other:?}"),
    };
    let config = lines
        .next()
        .and_then(|l| l.strip_prefix("config "))
        .ok_or_else(|| anyhow!("missing config line"))?
        .to_string();
    let count: usize = lines
        .next()
        .and_then(|l| l.strip_prefix("pairs "))
        .ok_or_else(|| anyhow!("missing pairs line"))?
        .parse()?;
    let mut pairs = Vec::with_capacity(count);
    for _ in 0..count {
        let header = lines.next().ok_or_else(|| anyhow!("truncated dataset"))?;
        let rest = header
            .strip_prefix("pair ")
            .ok_or_else(|| anyhow!("expected pair header, got '{header}'"))?;
        let fields: Vec<&str> = rest.split_whitespace().collect();
        if fields.len() != 5 {
            bail!("bad pair header '{header}'");
        }
        let meta = PairMeta {
            label: fields[0].to_string(),
            theta: parse_f64(fields[1])?,
            phi: parse_f64(fields[2])?,
            case: CaseLabel::parse(fields[3]).map_err(|e| anyhow!("{e}"))?,
            seed: fields[4].parse()?,
        };
        let input = parse_amplitudes(
            lines.next().ok_or_else(|| anyhow!("truncated dataset"))?,
            "input ",
        )?;
        let target = parse_amplitudes(
            lines.next().ok_or_else(|| anyhow!("truncated dataset"))?,
            "target ",
        )?;
        pairs.push(TrainingPair { input, target, meta });
    }
    Ok(Dataset { pairs, kind, config })
}

/// `p,qae_mean_fidelity,oracle_success,failure_probability` rows.
pub fn oracle_csv(rows: &[OracleRow]) -> String {
    let mut out = String::from("p,qae_mean_fidelity,oracle_success,failure_probability\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_f64(r.p),
            fmt_f64(r.qae_mean_fidelity),
            fmt_f64(r.oracle_success),
            fmt_f64(r.failure_probability)
        );
    }
    out
}

/// Oracle-only table (no model column).
pub fn oracle_csv_baseline(ps: &[f64]) -> Result<String> {
    let mut out = String::from("p,oracle_success,failure_probability\n");
    for &p in ps {
        let failure = dqnn_core::codes::bitflip3_failure_enumerated(p)?;
        let _ = writeln!(out, "{},{},{}", fmt_f64(p), fmt_f64(1.0 - failure), fmt_f64(failure));
    }
    Ok(out)
}
