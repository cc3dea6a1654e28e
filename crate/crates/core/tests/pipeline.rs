use std::fs::File;
use std::io::BufWriter;

use frameforge::corpus::{generate_synthetic, load_corpus, split_entries, SplitConfig, TemplateGrammar};
use frameforge::eval::{micro_average, score_missing, score_pair, SlotCounts};
use frameforge::hmm::SharingConfig;
use frameforge::system::{train_system, DecoderKind, SystemConfig, TrainedSystem};
use frameforge::{CorpusEntry, FrameSchema};

fn synthetic(n: usize, seed: u64) -> frameforge::Corpus {
    generate_synthetic(&FrameSchema::patience(), &TemplateGrammar::patience(), n, seed, "syn").unwrap()
}

fn score(system: &TrainedSystem, test: &[CorpusEntry]) -> f64 {
    let counts: Vec<SlotCounts> = test
        .iter()
        .map(|e| match system.decode_utterance(&e.utterance) {
            Ok(f) => score_pair(&f, &e.oracle_frame),
            Err(_) => score_missing(&e.oracle_frame),
        })
        .collect();
    micro_average(&counts).f
}

#[test]
fn corpus_file_round_trip() {
    let corpus = synthetic(40, 3);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corpus.jsonl");
    corpus.write_jsonl(BufWriter::new(File::create(&path).unwrap())).unwrap();
    let loaded = load_corpus(&path, &FrameSchema::patience()).unwrap();
    assert_eq!(loaded, corpus);
}

#[test]
fn trained_system_decodes_held_out_commands() {
    let schema = FrameSchema::patience();
    let corpus = synthetic(175, 4);
    let entries = corpus.entries("syn").unwrap();
    let split = split_entries(entries, &SplitConfig::default()).unwrap();
    let test = split.test_set(entries);
    let train = split.training(entries, split.max_partitions());

    let system = train_system(train, &schema, &SystemConfig::default(), 1).unwrap();
    let trace = system.trace.as_ref().unwrap();
    assert_eq!(trace.iterations(), SystemConfig::default().hmm_iterations);
    assert!(score(&system, test) > 0.8);

    let json = serde_json::to_string(&system).unwrap();
    let restored: TrainedSystem = serde_json::from_str(&json).unwrap();
    for e in test {
        assert_eq!(
            restored.decode_utterance(&e.utterance).ok(),
            system.decode_utterance(&e.utterance).ok()
        );
    }
}

#[test]
fn nmf_baseline_trains_without_hmm() {
    let schema = FrameSchema::patience();
    let corpus = synthetic(100, 5);
    let entries = corpus.entries("syn").unwrap();
    let config = SystemConfig {
        decoder: DecoderKind::NmfBaseline,
        sharing: SharingConfig::none(),
        ..SystemConfig::default()
    };
    let system = train_system(&entries[..75], &schema, &config, 2).unwrap();
    assert!(system.hmm.is_none());
    assert!(system.nmf_objective.windows(2).all(|w| w[1] <= w[0] + 1e-9));
    assert!(score(&system, &entries[75..]) > 0.0);
}

#[test]
fn same_seed_same_model() {
    let schema = FrameSchema::patience();
    let corpus = synthetic(60, 6);
    let entries = corpus.entries("syn").unwrap();
    let a = train_system(entries, &schema, &SystemConfig::default(), 9).unwrap();
    let b = train_system(entries, &schema, &SystemConfig::default(), 9).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
}
