use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use frameforge::corpus::{
    generate_synthetic, load_corpus, parse_record, segment, segment_words, split_entries, Corpus, PhonemeInventory,
    TemplateGrammar,
};
use frameforge::eval::{
    micro_average, run_learning_curve, score_missing, score_pair, write_frame_type_csv, write_runs_csv, write_summary_csv,
    ExperimentConfig, LearningCurve, SlotCounts, SUMMARY_COLUMNS,
};
use frameforge::seeds::derive_seed;
use frameforge::system::{train_system, SystemConfig, TrainedSystem};
use frameforge::{Frame, FrameSchema};
use serde_json::{json, Value};

use crate::config::{load_json, GridConfig};
use crate::manifest::{InputDigest, RunManifest};
use crate::{Cli, Command, CommonArgs};

/// Runs one invocation and returns its exit status.
pub fn run(cli: Cli) -> Result<i32> {
    if let Some(jobs) = cli.common.jobs {
        if jobs == 0 {
            bail!("--jobs must be positive");
        }
        // a second initialisation in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let common = &cli.common;
    match &cli.command {
        Command::Segment { input, granularity } => cmd_segment(common, input, *granularity),
        Command::Train { corpus, speaker, granularity, decoder, partitions } => {
            cmd_train(common, corpus, speaker, *granularity, *decoder, *partitions)
        }
        Command::Decode { model, input, explain } => cmd_decode(common, model, input, *explain),
        Command::Score { induced, oracle } => cmd_score(common, induced, oracle),
        Command::Experiment { corpus, force } => cmd_experiment(common, corpus, *force),
        Command::Generate { n, speaker, king_shift } => cmd_generate(common, *n, speaker, *king_shift),
    }
}

fn load_schema(common: &CommonArgs) -> Result<FrameSchema> {
    match &common.schema {
        Some(p) => FrameSchema::from_json_file(p).with_context(|| format!("loading schema {}", p.display())),
        None => Ok(FrameSchema::patience()),
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn open_lines(path: &Path) -> Result<io::Lines<BufReader<File>>> {
    let f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(BufReader::new(f).lines())
}

fn cmd_segment(common: &CommonArgs, input: &Path, granularity: frameforge::Granularity) -> Result<i32> {
    let schema = load_schema(common)?;
    let mut out = output(common.out.as_deref())?;
    for (i, line) in open_lines(input)?.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let entry = parse_record(&line, i + 1, &schema).with_context(|| input.display().to_string())?;
        let units = segment(&entry.utterance, granularity).with_context(|| format!("line {}", i + 1))?;
        writeln!(out, "{}", units.units.join(" "))?;
    }
    out.flush()?;
    Ok(0)
}

fn cmd_train(
    common: &CommonArgs,
    corpus_path: &Path,
    speaker: &str,
    granularity: Option<frameforge::Granularity>,
    decoder: Option<frameforge::system::DecoderKind>,
    partitions: Option<usize>,
) -> Result<i32> {
    let schema = load_schema(common)?;
    let mut config: SystemConfig = match &common.config {
        Some(p) => load_json(p)?,
        None => SystemConfig::default(),
    };
    if let Some(g) = granularity {
        config.granularity = g;
    }
    if let Some(d) = decoder {
        config.decoder = d;
    }
    let base_seed = common.seed.unwrap_or(0);
    let corpus = load_corpus(corpus_path, &schema).with_context(|| format!("loading {}", corpus_path.display()))?;
    let entries = corpus.entries(speaker)?;
    let (train, k) = match partitions {
        Some(k) => {
            let split = split_entries(entries, &Default::default())?;
            if k == 0 || k > split.max_partitions() {
                bail!("speaker {speaker} has {} training partitions, {k} requested", split.max_partitions());
            }
            (split.training(entries, k), k)
        }
        None => (entries, 0),
    };
    let seed = derive_seed(base_seed, "system", speaker, k, 0);
    let system = train_system(train, &schema, &config, seed)?;
    let model_json = serde_json::to_string(&system)? + "\n";
    match &common.out {
        Some(path) => {
            std::fs::write(path, &model_json).with_context(|| format!("writing {}", path.display()))?;
            let mut manifest = RunManifest::new(
                "train",
                json!({ "system": config, "speaker": speaker, "partitions": partitions }),
                base_seed,
                vec![InputDigest::of_file(corpus_path)?],
            );
            manifest.write(&sibling(path, "manifest.json"))?;
        }
        None => io::stdout().lock().write_all(model_json.as_bytes())?,
    }
    if common.json && common.out.is_some() {
        let summary = json!({
            "speaker": speaker,
            "training_size": train.len(),
            "states": system.hmm.as_ref().map(|m| m.n_states()),
            "vocabulary": system.association.vocabulary.len(),
            "log_likelihood": system.trace.as_ref().and_then(|t| t.log_likelihood.last().copied()),
        });
        println!("{summary}");
    }
    Ok(0)
}

/// `model.json` -> `model.json.manifest.json`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".");
    name.push(suffix);
    path.with_file_name(name)
}

fn cmd_decode(common: &CommonArgs, model_path: &Path, input: &Path, explain: bool) -> Result<i32> {
    let text = std::fs::read_to_string(model_path).with_context(|| format!("reading {}", model_path.display()))?;
    let system: TrainedSystem = serde_json::from_str(&text).context("invalid model file")?;
    let mut out = output(common.out.as_deref())?;
    let mut failed = 0;
    for (i, line) in open_lines(input)?.enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let command = if trimmed.starts_with('{') {
            let entry = parse_record(trimmed, i + 1, &system.schema)?;
            segment(&entry.utterance, system.config.granularity)?
        } else {
            let words: Vec<&str> = trimmed.split_whitespace().collect();
            segment_words(&words, system.config.granularity, &PhonemeInventory::default())?
        };
        let value = if explain {
            match (system.explain_command(&command), system.decode_command(&command)) {
                (Ok(Some(r)), _) => Ok(json!({ "frame": r.frame, "path": r.path, "totals": r.totals })),
                (Ok(None), Ok(frame)) => Ok(json!({ "frame": frame })),
                (Err(e), _) | (_, Err(e)) => Err(e),
            }
        } else {
            system.decode_command(&command).map(|f| json!(f))
        };
        match value {
            Ok(v) => writeln!(out, "{v}")?,
            Err(e) => {
                eprintln!("error: line {}: {e}", i + 1);
                writeln!(out, "null")?;
                failed += 1;
            }
        }
    }
    out.flush()?;
    Ok(if failed > 0 { 1 } else { 0 })
}

/// A frame from a frame line, an explained decode line or a corpus record.
fn frame_from_line(line: &str, prefer: &str) -> Result<Frame> {
    let v: Value = serde_json::from_str(line)?;
    let inner = v.get(prefer).or_else(|| v.get("frame")).cloned().unwrap_or(v);
    Ok(serde_json::from_value(inner)?)
}

/// Frames of a file, one per non-empty line; `null` marks a failed decode.
fn read_frames(path: &Path, prefer: &str, schema: &FrameSchema) -> Result<Vec<Option<Frame>>> {
    let mut frames = Vec::new();
    for (i, line) in open_lines(path)?.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        if line.trim() == "null" {
            frames.push(None);
            continue;
        }
        let frame = frame_from_line(&line, prefer).with_context(|| format!("{} line {}", path.display(), i + 1))?;
        frame.validate(schema).with_context(|| format!("{} line {}", path.display(), i + 1))?;
        frames.push(Some(frame));
    }
    Ok(frames)
}

fn cmd_score(common: &CommonArgs, induced: &Path, oracle: &Path) -> Result<i32> {
    let schema = load_schema(common)?;
    let induced = read_frames(induced, "frame", &schema)?;
    let oracle = read_frames(oracle, "oracle_frame", &schema)?;
    if induced.len() != oracle.len() {
        bail!("{} induced frames but {} oracle frames", induced.len(), oracle.len());
    }
    let oracle: Vec<Frame> = oracle
        .into_iter()
        .enumerate()
        .map(|(i, f)| f.with_context(|| format!("oracle frame {} is null", i + 1)))
        .collect::<Result<_>>()?;
    let counts: Vec<SlotCounts> = induced
        .iter()
        .zip(&oracle)
        .map(|(i, o)| match i {
            Some(i) => score_pair(i, o),
            None => score_missing(o),
        })
        .collect();
    let total: SlotCounts = counts.iter().sum();
    let prf = micro_average(&counts);
    let mut out = output(common.out.as_deref())?;
    if common.json {
        let v = json!({
            "instances": counts.len(),
            "correct": total.correct,
            "induced_filled": total.induced_filled,
            "oracle_filled": total.oracle_filled,
            "precision": prf.precision,
            "recall": prf.recall,
            "f": prf.f,
        });
        writeln!(out, "{v}")?;
    } else {
        writeln!(
            out,
            "instances={} correct={} induced_filled={} oracle_filled={} P={:.4} R={:.4} F={:.4}",
            counts.len(),
            total.correct,
            total.induced_filled,
            total.oracle_filled,
            prf.precision,
            prf.recall,
            prf.f
        )?;
    }
    out.flush()?;
    Ok(0)
}

const CELL_FILES: [&str; 3] = ["runs.csv", "summary.csv", "frame_types.csv"];

fn write_cell(dir: &Path, curves: &[LearningCurve]) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_runs_csv(File::create(dir.join(CELL_FILES[0]))?, curves)?;
    write_summary_csv(File::create(dir.join(CELL_FILES[1]))?, curves)?;
    write_frame_type_csv(File::create(dir.join(CELL_FILES[2]))?, curves)?;
    Ok(())
}

fn cell_complete(dir: &Path, digest: &str) -> bool {
    CELL_FILES.iter().all(|f| dir.join(f).is_file())
        && RunManifest::read(&dir.join("manifest.json")).is_ok_and(|m| m.digest == digest)
}

fn run_cell(corpus: &Corpus, speakers: &[String], schema: &FrameSchema, cell: &ExperimentConfig) -> Result<Vec<LearningCurve>> {
    speakers
        .iter()
        .map(|s| run_learning_curve(corpus, s, schema, cell).map_err(|e| anyhow!("speaker {s}: {e}")))
        .collect()
}

fn cmd_experiment(common: &CommonArgs, corpus_path: &Path, force: bool) -> Result<i32> {
    let schema = load_schema(common)?;
    let mut grid: GridConfig = match &common.config {
        Some(p) => load_json(p)?,
        None => GridConfig::default(),
    };
    if let Some(seed) = common.seed {
        grid.seed = seed;
    }
    grid.validate()?;
    let out_dir = common.out.clone().ok_or_else(|| anyhow!("experiment needs --out DIR"))?;
    std::fs::create_dir_all(&out_dir)?;
    let corpus = load_corpus(corpus_path, &schema).with_context(|| format!("loading {}", corpus_path.display()))?;
    let speakers: Vec<String> = match &grid.speakers {
        Some(s) => s.clone(),
        None => corpus.speakers().map(str::to_string).collect(),
    };
    for s in &speakers {
        corpus.entries(s)?;
    }
    let mut inputs = vec![InputDigest::of_file(corpus_path)?];
    if let Some(p) = &common.schema {
        inputs.push(InputDigest::of_file(p)?);
    }

    let cells = grid.cells();
    let mut failures: Vec<(String, String)> = Vec::new();
    let mut summary_rows: Vec<String> = Vec::new();
    let mut reused = 0;
    for cell in &cells {
        let hash = cell.config_hash();
        let dir = out_dir.join(&hash);
        let mut manifest = RunManifest::new(
            "experiment-cell",
            json!({ "cell": cell, "speakers": speakers, "schema": schema }),
            cell.seed,
            inputs.clone(),
        );
        if !force && cell_complete(&dir, &manifest.digest) {
            reused += 1;
        } else {
            // an old manifest must not vouch for partially rewritten files
            let _ = std::fs::remove_file(dir.join("manifest.json"));
            match run_cell(&corpus, &speakers, &schema, cell) {
                Ok(curves) => {
                    write_cell(&dir, &curves)?;
                    manifest.write(&dir.join("manifest.json"))?;
                }
                Err(e) => {
                    eprintln!("error: cell {hash}: {e:#}");
                    failures.push((hash, format!("{e:#}")));
                    continue;
                }
            }
        }
        let text = std::fs::read_to_string(dir.join("summary.csv"))?;
        summary_rows.extend(text.lines().skip(1).map(str::to_string));
    }

    let mut summary = SUMMARY_COLUMNS.join(",") + "\n";
    for row in &summary_rows {
        summary.push_str(row);
        summary.push('\n');
    }
    std::fs::write(out_dir.join("summary.csv"), summary)?;
    let failure_text: String = failures.iter().map(|(h, e)| format!("{h}\t{e}\n")).collect();
    std::fs::write(out_dir.join("failures.tsv"), failure_text)?;
    let mut manifest = RunManifest::new(
        "experiment",
        json!({ "grid": grid, "speakers": speakers, "cells": cells.iter().map(|c| c.config_hash()).collect::<Vec<_>>() }),
        grid.seed,
        inputs,
    );
    manifest.write(&out_dir.join("manifest.json"))?;

    let report = json!({
        "cells": cells.len(),
        "computed": cells.len() - reused - failures.len(),
        "reused": reused,
        "failed": failures.iter().map(|(h, _)| h).collect::<Vec<_>>(),
    });
    if common.json {
        println!("{report}");
    } else {
        log::info!("{report}");
    }
    if failures.is_empty() {
        Ok(0)
    } else {
        eprintln!("error: {} of {} cells failed; see failures.tsv", failures.len(), cells.len());
        Ok(1)
    }
}

fn cmd_generate(common: &CommonArgs, n: usize, speaker: &str, king_shift: Option<usize>) -> Result<i32> {
    let schema = load_schema(common)?;
    let mut grammar = TemplateGrammar::patience();
    if let Some(at) = king_shift {
        grammar = grammar.with_king_shift(at);
    }
    let corpus = generate_synthetic(&schema, &grammar, n, common.seed.unwrap_or(0), speaker)?;
    let mut out = output(common.out.as_deref())?;
    corpus.write_jsonl(&mut out)?;
    out.flush()?;
    Ok(0)
}
