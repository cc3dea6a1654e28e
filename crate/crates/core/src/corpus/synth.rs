//! Synthetic Patience-style command corpora.
//!
//! A [`TemplateGrammar`] picks a frame type, a command template and a game
//! move, then realizes the template with surface words. The automatic frame
//! lists every property of the move; the oracle frame lists only the slots
//! the generated words mention.

use std::collections::{BTreeMap, BTreeSet};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::data::{Corpus, CorpusEntry, Utterance};
use super::frame::Frame;
use super::schema::FrameSchema;
use super::CorpusError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MoveKind {
    /// A card goes onto the next-higher card of the other colour.
    CardOnCard,
    /// A card goes onto a foundation stack.
    ToFoundation,
    /// A king goes onto an empty column.
    KingToEmptyColumn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FromArea {
    Column,
    Hand,
}

/// One command pattern. Tokens are literal words, `{SLOT}` (the slot's
/// value word) or `{SLOT:color}` (a colour word, ambiguous between suits).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Template {
    pub frame_type: String,
    pub weight: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub move_kind: Option<MoveKind>,
    pub tokens: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token<'a> {
    Word(&'a str),
    Slot(&'a str),
    Color(&'a str),
    /// A word naming the slot's area without picking a value.
    Area(&'a str, &'a str),
}

fn parse_token(token: &str) -> Token<'_> {
    match token.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
        Some(inner) => match (inner.split_once(':'), inner.split_once('=')) {
            (Some((slot, "color")), _) => Token::Color(slot),
            (_, Some((slot, word))) => Token::Area(slot, word),
            _ => Token::Slot(inner),
        },
        None => Token::Word(token),
    }
}

impl Template {
    fn new(frame_type: &str, weight: f64, kind: Option<MoveKind>, text: &str) -> Self {
        Template {
            frame_type: frame_type.to_string(),
            weight,
            move_kind: kind,
            tokens: text.split_whitespace().map(str::to_string).collect(),
        }
    }

    /// Slots this template mentions, in token order.
    pub fn mentioned_slots(&self) -> Vec<&str> {
        self.tokens
            .iter()
            .filter_map(|t| match parse_token(t) {
                Token::Slot(s) | Token::Color(s) | Token::Area(s, _) => Some(s),
                Token::Word(_) => None,
            })
            .collect()
    }

    fn from_area(&self) -> Option<FromArea> {
        let slots = self.mentioned_slots();
        if slots.contains(&"FH") {
            Some(FromArea::Hand)
        } else if slots.contains(&"FC") {
            Some(FromArea::Column)
        } else {
            None
        }
    }
}

/// Replaces one value word by another from a given utterance index on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynonymShift {
    pub class: String,
    pub value: String,
    pub before: String,
    pub after: String,
    /// Zero-based utterance index at which `after` takes over.
    pub at: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateGrammar {
    pub frame_weights: BTreeMap<String, f64>,
    pub templates: Vec<Template>,
    /// Realization class of each slot (e.g. `FS` → `suit`).
    pub slot_classes: BTreeMap<String, String>,
    /// class → value → synonymous surface words.
    pub realizations: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    /// Colour word → suits it can denote.
    pub colors: BTreeMap<String, Vec<String>>,
    pub interjections: Vec<String>,
    pub interjection_prob: f64,
    /// Probability that a move whose template names no source starts from the hand.
    pub hand_prob: f64,
    /// Word → phonemic transcription. Unlisted words are transcribed as spelled.
    pub pronunciations: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synonym_shift: Option<SynonymShift>,
}

fn words(pairs: &[(&str, &str)]) -> BTreeMap<String, Vec<String>> {
    pairs
        .iter()
        .map(|(v, w)| (v.to_string(), w.split('|').map(str::to_string).collect()))
        .collect()
}

impl TemplateGrammar {
    /// Dutch Patience commands in the style of a vocally guided card game.
    pub fn patience() -> Self {
        use MoveKind::*;
        let templates = vec![
            Template::new("movecard", 3.0, Some(CardOnCard), "{FS} {FV} op {TS} {TV}"),
            Template::new("movecard", 2.0, Some(CardOnCard), "leg de {FS} {FV} op de {TS:color} {TV}"),
            Template::new("movecard", 1.0, Some(CardOnCard), "{FS} {FV} op de {TV}"),
            Template::new("movecard", 1.0, Some(CardOnCard), "de {FS} {FV} uit de {FH} op {TS} {TV}"),
            Template::new("movecard", 2.0, Some(ToFoundation), "{FS} {FV} naar {TF=boven}"),
            Template::new("movecard", 1.0, Some(ToFoundation), "{FV} naar stapel {TF}"),
            Template::new("movecard", 1.0, Some(CardOnCard), "kolom {FC} naar kolom {TC}"),
            Template::new("movecard", 1.0, Some(KingToEmptyColumn), "{FS} {FV} naar kolom {TC}"),
            Template::new("dealcard", 3.0, None, "nieuwe kaarten omdraaien"),
            Template::new("dealcard", 1.0, None, "kaarten omdraaien"),
            Template::new("dealcard", 1.0, None, "volgende"),
        ];
        let slot_classes = [
            ("FS", "suit"),
            ("TS", "suit"),
            ("FV", "rank"),
            ("TV", "rank"),
            ("FF", "number"),
            ("TF", "number"),
            ("FC", "number"),
            ("TC", "number"),
            ("FH", "hand"),
        ]
        .iter()
        .map(|(s, c)| (s.to_string(), c.to_string()))
        .collect();
        let mut realizations = BTreeMap::new();
        realizations.insert(
            "suit".to_string(),
            words(&[("h", "harten"), ("d", "ruiten"), ("s", "schoppen"), ("c", "klaveren")]),
        );
        realizations.insert(
            "rank".to_string(),
            words(&[
                ("1", "aas"),
                ("2", "twee"),
                ("3", "drie"),
                ("4", "vier"),
                ("5", "vijf"),
                ("6", "zes"),
                ("7", "zeven"),
                ("8", "acht"),
                ("9", "negen"),
                ("10", "tien"),
                ("11", "boer"),
                ("12", "vrouw"),
                ("13", "koning"),
            ]),
        );
        realizations.insert(
            "number".to_string(),
            words(&[
                ("1", "een"),
                ("2", "twee"),
                ("3", "drie"),
                ("4", "vier"),
                ("5", "vijf"),
                ("6", "zes"),
                ("7", "zeven"),
            ]),
        );
        realizations.insert("hand".to_string(), words(&[("1", "hand")]));
        let colors = [("rode", vec!["h", "d"]), ("zwarte", vec!["s", "c"])]
            .into_iter()
            .map(|(w, s)| (w.to_string(), s.into_iter().map(String::from).collect()))
            .collect();
        let pronunciations = [
            ("harten", "hArt@n"),
            ("ruiten", "rYt@n"),
            ("schoppen", "sxOp@n"),
            ("klaveren", "klav@r@n"),
            ("aas", "as"),
            ("een", "en"),
            ("twee", "twe"),
            ("drie", "dri"),
            ("vier", "vir"),
            ("vijf", "vEf"),
            ("zes", "zEs"),
            ("zeven", "zev@n"),
            ("acht", "Axt"),
            ("negen", "nex@n"),
            ("tien", "tin"),
            ("boer", "bur"),
            ("vrouw", "vrQ"),
            ("koning", "konIN"),
            ("heer", "her"),
            ("op", "Op"),
            ("de", "d@"),
            ("uit", "Yt"),
            ("hand", "hAnt"),
            ("leg", "lEx"),
            ("naar", "nar"),
            ("boven", "bov@n"),
            ("stapel", "stap@l"),
            ("kolom", "kolOm"),
            ("rode", "rod@"),
            ("zwarte", "zwArt@"),
            ("nieuwe", "niw@"),
            ("kaarten", "kart@n"),
            ("omdraaien", "Omdraj@n"),
            ("volgende", "vOlG@nd@"),
            ("uh", "@"),
            ("ja", "ja"),
            ("nee", "ne"),
        ]
        .iter()
        .map(|(w, p)| (w.to_string(), p.to_string()))
        .collect();
        TemplateGrammar {
            frame_weights: [("movecard".to_string(), 0.9), ("dealcard".to_string(), 0.1)]
                .into_iter()
                .collect(),
            templates,
            slot_classes,
            realizations,
            colors,
            interjections: vec!["uh".into(), "ja".into(), "nee".into()],
            interjection_prob: 0.1,
            hand_prob: 0.3,
            pronunciations,
            synonym_shift: None,
        }
    }

    /// The king is called `koning` before utterance `at` and `heer` from then on.
    pub fn with_king_shift(mut self, at: usize) -> Self {
        self.synonym_shift = Some(SynonymShift {
            class: "rank".into(),
            value: "13".into(),
            before: "koning".into(),
            after: "heer".into(),
            at,
        });
        self
    }

    pub fn validate(&self, schema: &FrameSchema) -> Result<(), CorpusError> {
        let bad = |msg: String| CorpusError::InvalidGrammar(msg);
        for (ft, w) in &self.frame_weights {
            if schema.frame_type(ft).is_none() {
                return Err(bad(format!("weight for unknown frame type {ft}")));
            }
            if !(*w >= 0.0 && w.is_finite()) {
                return Err(bad(format!("frame weight for {ft} must be non-negative")));
            }
        }
        for t in &self.templates {
            let ft = schema
                .frame_type(&t.frame_type)
                .ok_or_else(|| bad(format!("template for unknown frame type {}", t.frame_type)))?;
            if !(t.weight > 0.0 && t.weight.is_finite()) {
                return Err(bad(format!("template {:?} needs a positive weight", t.tokens)));
            }
            if !ft.is_slotless() && t.move_kind.is_none() {
                return Err(bad(format!("template {:?} needs a move kind", t.tokens)));
            }
            let provided = t.move_kind.map(provided_slots).unwrap_or_default();
            for slot in t.mentioned_slots() {
                if ft.slot(slot).is_none() {
                    return Err(CorpusError::SchemaViolation {
                        slot: slot.to_string(),
                        value: None,
                        reason: format!("template references unknown slot of {}", ft.name),
                    });
                }
                if !provided.contains(slot) && slot != "FC" && slot != "FH" {
                    return Err(bad(format!(
                        "template {:?} mentions {slot}, which its move does not fill",
                        t.tokens
                    )));
                }
                if !self.slot_classes.contains_key(slot) {
                    return Err(bad(format!("slot {slot} has no realization class")));
                }
            }
        }
        for (ft, w) in &self.frame_weights {
            if *w > 0.0 && !self.templates.iter().any(|t| &t.frame_type == ft) {
                return Err(bad(format!("frame type {ft} has weight but no templates")));
            }
        }
        Ok(())
    }

    fn realize_value(&self, class: &str, value: &str, index: usize, rng: &mut ChaCha8Rng) -> String {
        if let Some(shift) = &self.synonym_shift {
            if shift.class == class && shift.value == value {
                return if index < shift.at {
                    shift.before.clone()
                } else {
                    shift.after.clone()
                };
            }
        }
        self.realizations
            .get(class)
            .and_then(|m| m.get(value))
            .and_then(|ws| ws.choose(rng))
            .cloned()
            .unwrap_or_else(|| value.to_string())
    }

    fn pronounce(&self, word: &str) -> String {
        self.pronunciations
            .get(word)
            .cloned()
            .unwrap_or_else(|| word.to_lowercase())
    }
}

fn provided_slots(kind: MoveKind) -> BTreeSet<&'static str> {
    match kind {
        MoveKind::CardOnCard => ["FS", "FV", "TS", "TV", "TC"].into(),
        MoveKind::ToFoundation => ["FS", "FV", "TF"].into(),
        MoveKind::KingToEmptyColumn => ["FS", "FV", "TC"].into(),
    }
}

const SUITS: [&str; 4] = ["h", "d", "s", "c"];

fn is_red(suit: &str) -> bool {
    suit == "h" || suit == "d"
}

/// Draws a move of the given kind and returns its automatic frame.
fn draw_move(kind: MoveKind, from: FromArea, rng: &mut ChaCha8Rng) -> Frame {
    let mut frame = Frame::new("movecard");
    let suit = *SUITS.choose(rng).expect("suits");
    frame.insert("FS", suit);
    let mut target_column = None;
    match kind {
        MoveKind::CardOnCard => {
            let value: u32 = rng.random_range(2..=12);
            frame.insert("FV", &value.to_string());
            let targets: Vec<&str> = SUITS.iter().copied().filter(|s| is_red(s) != is_red(suit)).collect();
            frame.insert("TS", targets.choose(rng).expect("suits"));
            frame.insert("TV", &(value + 1).to_string());
            let tc: u32 = rng.random_range(1..=7);
            frame.insert("TC", &tc.to_string());
            target_column = Some(tc);
        }
        MoveKind::ToFoundation => {
            let value: u32 = rng.random_range(1..=13);
            frame.insert("FV", &value.to_string());
            frame.insert("TF", &rng.random_range(1..=4u32).to_string());
            if value > 1 {
                frame.insert("TS", suit);
                frame.insert("TV", &(value - 1).to_string());
            }
        }
        MoveKind::KingToEmptyColumn => {
            frame.insert("FV", "13");
            let tc: u32 = rng.random_range(1..=7);
            frame.insert("TC", &tc.to_string());
            target_column = Some(tc);
        }
    }
    match from {
        FromArea::Hand => frame.insert("FH", "1"),
        FromArea::Column => {
            let fc = loop {
                let c: u32 = rng.random_range(1..=7);
                if Some(c) != target_column {
                    break c;
                }
            };
            frame.insert("FC", &fc.to_string());
        }
    }
    frame
}

/// Generates `n` entries for one speaker. Deterministic given `seed`.
pub fn generate_synthetic(
    schema: &FrameSchema,
    grammar: &TemplateGrammar,
    n: usize,
    seed: u64,
    speaker: &str,
) -> Result<Corpus, CorpusError> {
    if n < 1 {
        return Err(CorpusError::InvalidGrammar(
            "at least one utterance must be generated".to_string(),
        ));
    }
    grammar.validate(schema)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame_types: Vec<(&String, f64)> = grammar
        .frame_weights
        .iter()
        .map(|(ft, w)| (ft, *w))
        .filter(|(_, w)| *w > 0.0)
        .collect();
    let type_dist = WeightedIndex::new(frame_types.iter().map(|(_, w)| *w))
        .map_err(|e| CorpusError::InvalidGrammar(e.to_string()))?;
    let per_type: BTreeMap<&String, (Vec<&Template>, WeightedIndex<f64>)> = frame_types
        .iter()
        .map(|(ft, _)| {
            let ts: Vec<&Template> = grammar.templates.iter().filter(|t| &t.frame_type == *ft).collect();
            let dist = WeightedIndex::new(ts.iter().map(|t| t.weight)).expect("validated weights");
            (*ft, (ts, dist))
        })
        .collect();

    let mut entries = Vec::with_capacity(n);
    for index in 0..n {
        let ft = frame_types[type_dist.sample(&mut rng)].0;
        let (templates, dist) = &per_type[ft];
        let template = templates[dist.sample(&mut rng)];

        let automatic = match template.move_kind {
            Some(kind) => {
                let from = template.from_area().unwrap_or_else(|| {
                    if rng.random_bool(grammar.hand_prob) {
                        FromArea::Hand
                    } else {
                        FromArea::Column
                    }
                });
                draw_move(kind, from, &mut rng)
            }
            None => Frame::new(ft),
        };

        let mut oracle = Frame::new(ft);
        let mut ortho: Vec<String> = Vec::new();
        for token in &template.tokens {
            match parse_token(token) {
                Token::Word(w) => ortho.push(w.to_string()),
                Token::Slot(slot) => {
                    let value = single_value(&automatic, slot)?;
                    let class = &grammar.slot_classes[slot];
                    ortho.push(grammar.realize_value(class, value, index, &mut rng));
                    oracle.insert(slot, value);
                }
                Token::Area(slot, word) => {
                    ortho.push(word.to_string());
                    let def = schema.slot(ft, slot).ok_or_else(|| CorpusError::SchemaViolation {
                        slot: slot.to_string(),
                        value: None,
                        reason: format!("not a slot of {ft}"),
                    })?;
                    for v in &def.values {
                        oracle.insert(slot, v);
                    }
                }
                Token::Color(slot) => {
                    let value = single_value(&automatic, slot)?;
                    let (word, suits) = grammar
                        .colors
                        .iter()
                        .find(|(_, suits)| suits.iter().any(|s| s == value))
                        .ok_or_else(|| {
                            CorpusError::InvalidGrammar(format!("no colour word covers {value}"))
                        })?;
                    ortho.push(word.clone());
                    for s in suits {
                        oracle.insert(slot, s);
                    }
                }
            }
        }
        if !grammar.interjections.is_empty() && rng.random_bool(grammar.interjection_prob) {
            let word = grammar.interjections.choose(&mut rng).expect("non-empty").clone();
            let at = rng.random_range(0..=ortho.len());
            ortho.insert(at, word);
        }
        let phonemic = ortho.iter().map(|w| grammar.pronounce(w)).collect();
        automatic.validate(schema)?;
        oracle.validate(schema)?;
        entries.push(CorpusEntry {
            utterance: Utterance {
                id: format!("{speaker}-{:05}", index + 1),
                speaker: speaker.to_string(),
                ordinal: index as u64 + 1,
                orthographic: ortho,
                phonemic,
            },
            automatic_frame: automatic,
            oracle_frame: oracle,
        });
    }
    Corpus::from_entries(entries)
}

fn single_value<'a>(frame: &'a Frame, slot: &str) -> Result<&'a str, CorpusError> {
    frame
        .get(slot)
        .and_then(|vs| vs.iter().next())
        .map(String::as_str)
        .ok_or_else(|| {
            CorpusError::InvalidGrammar(format!("template mentions {slot}, which the move does not fill"))
        })
}
