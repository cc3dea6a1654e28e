use std::io::Write;

use super::experiment::LearningCurve;
use super::score::Prf;

pub const RUN_COLUMNS: [&str; 11] = [
    "speaker",
    "granularity",
    "config-hash",
    "training_size",
    "run",
    "correct",
    "induced_filled",
    "oracle_filled",
    "P",
    "R",
    "F",
];

pub const SUMMARY_COLUMNS: [&str; 13] = [
    "speaker",
    "granularity",
    "decoder",
    "config-hash",
    "training_size",
    "runs",
    "failures",
    "correct",
    "induced_filled",
    "oracle_filled",
    "P",
    "R",
    "F",
];

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

fn prf_fields(p: Prf) -> [String; 3] {
    [fmt(p.precision), fmt(p.recall), fmt(p.f)]
}

/// One row per (training size, run).
pub fn write_runs_csv<W: Write>(out: W, curves: &[LearningCurve]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RUN_COLUMNS)?;
    for c in curves {
        let g = c.config.system.granularity.to_string();
        for p in &c.points {
            for r in &p.runs {
                let [pr, re, f] = prf_fields(r.counts.prf());
                w.write_record([
                    c.speaker.clone(),
                    g.clone(),
                    c.config_hash.clone(),
                    p.training_size.to_string(),
                    r.run.to_string(),
                    r.counts.correct.to_string(),
                    r.counts.induced_filled.to_string(),
                    r.counts.oracle_filled.to_string(),
                    pr,
                    re,
                    f,
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// One micro-averaged row per curve point.
pub fn write_summary_csv<W: Write>(out: W, curves: &[LearningCurve]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SUMMARY_COLUMNS)?;
    for c in curves {
        for p in &c.points {
            let [pr, re, f] = prf_fields(p.prf);
            w.write_record([
                c.speaker.clone(),
                c.config.system.granularity.to_string(),
                c.config.system.decoder.as_str().to_string(),
                c.config_hash.clone(),
                p.training_size.to_string(),
                p.runs.len().to_string(),
                p.runs.iter().map(|r| r.failures).sum::<usize>().to_string(),
                p.counts.correct.to_string(),
                p.counts.induced_filled.to_string(),
                p.counts.oracle_filled.to_string(),
                pr,
                re,
                f,
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Slot scores per oracle frame type and frame-type identification scores.
pub fn write_frame_type_csv<W: Write>(out: W, curves: &[LearningCurve]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "speaker",
        "config-hash",
        "training_size",
        "frame_type",
        "slot_P",
        "slot_R",
        "slot_F",
        "type_P",
        "type_R",
        "type_F",
    ])?;
    for c in curves {
        for p in &c.points {
            let mut types: Vec<&String> = p.runs.iter().flat_map(|r| r.frame_type_identification.keys()).collect();
            types.sort();
            types.dedup();
            for t in types {
                let [sp, sr, sf] = prf_fields(p.frame_type_prf(t));
                let [tp, tr, tf] = prf_fields(p.identification_prf(t));
                w.write_record([
                    c.speaker.clone(),
                    c.config_hash.clone(),
                    p.training_size.to_string(),
                    t.clone(),
                    sp,
                    sr,
                    sf,
                    tp,
                    tr,
                    tf,
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}
