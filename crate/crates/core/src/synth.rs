//! Seeded synthetic MEDS datasets.
//!
//! The generator draws from `ChaCha8Rng::seed_from_u64(seed)` (rand_chacha
//! 0.3) in a fixed order, so a seed pins the output bytes. Events of a
//! subject are contiguous; untimed events come first, then timed events in
//! ascending order.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::meds::{
    CodeRecord, DatasetMetadataRecord, EventRecord, EventShard, LabelRecord, LabelValue,
    MedsDataset, SplitAssignment, Timestamp,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LabelKind {
    Boolean,
    Integer,
    Float,
    Categorical,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub n_subjects: usize,
    pub events_per_subject: RangeInclusive<usize>,
    pub p_time: f64,
    pub p_numeric: f64,
    pub p_text: f64,
    pub n_codes: usize,
    /// Longest parent chain in the code table; 0 gives a flat vocabulary.
    pub code_hierarchy_depth: usize,
    pub split_fractions: BTreeMap<String, f64>,
    pub n_labels_per_subject: RangeInclusive<usize>,
    pub label_kind: LabelKind,
    /// Subjects are dealt contiguously into this many event shards.
    pub n_shards: usize,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SynthConfigError {
    #[error("{name} = {value} is not a probability")]
    Probability { name: &'static str, value: f64 },
    #[error("split fractions sum to {0}, expected 1")]
    SplitFractions(f64),
    #[error("split fraction for `{0}` is negative")]
    NegativeFraction(String),
    #[error("empty range for {0}")]
    EmptyRange(&'static str),
    #[error("n_codes must be positive")]
    NoCodes,
    #[error("n_shards must be positive")]
    NoShards,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            n_subjects: 100,
            events_per_subject: 5..=30,
            p_time: 0.8,
            p_numeric: 0.3,
            p_text: 0.1,
            n_codes: 50,
            code_hierarchy_depth: 2,
            split_fractions: BTreeMap::from([
                ("train".into(), 0.8),
                ("tuning".into(), 0.1),
                ("held_out".into(), 0.1),
            ]),
            n_labels_per_subject: 0..=2,
            label_kind: LabelKind::Boolean,
            n_shards: 1,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthConfigError> {
        for (name, value) in [("p_time", self.p_time), ("p_numeric", self.p_numeric), ("p_text", self.p_text)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(SynthConfigError::Probability { name, value });
            }
        }
        if let Some((name, _)) = self.split_fractions.iter().find(|(_, f)| **f < 0.0) {
            return Err(SynthConfigError::NegativeFraction(name.clone()));
        }
        if !self.split_fractions.is_empty() {
            let sum: f64 = self.split_fractions.values().sum();
            if (sum - 1.0).abs() > 1e-9 {
                return Err(SynthConfigError::SplitFractions(sum));
            }
        }
        if self.events_per_subject.is_empty() {
            return Err(SynthConfigError::EmptyRange("events_per_subject"));
        }
        if self.n_labels_per_subject.is_empty() {
            return Err(SynthConfigError::EmptyRange("n_labels_per_subject"));
        }
        if self.n_codes == 0 {
            return Err(SynthConfigError::NoCodes);
        }
        if self.n_shards == 0 {
            return Err(SynthConfigError::NoShards);
        }
        Ok(())
    }

    /// A random but valid configuration with at most `max_events` events,
    /// covering every presence mix and label kind across seeds.
    pub fn random(seed: u64, max_events: usize) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_c0de);
        let max_per_subject = rng.gen_range(1..=40usize);
        let n_subjects = rng.gen_range(1..=(max_events / max_per_subject).clamp(1, 200));
        let mut split_fractions = BTreeMap::new();
        match rng.gen_range(0..3) {
            0 => {}
            1 => {
                split_fractions.insert("train".into(), 1.0);
            }
            _ => {
                let a: f64 = rng.gen_range(0.0..1.0);
                split_fractions.insert("train".into(), a);
                split_fractions.insert("held_out".into(), 1.0 - a);
            }
        }
        let pick = |rng: &mut ChaCha8Rng| *[0.0, 1.0, rng.gen_range(0.0..1.0)].choose(rng).unwrap();
        SynthConfig {
            seed,
            n_subjects,
            events_per_subject: rng.gen_range(0..=max_per_subject)..=max_per_subject,
            p_time: pick(&mut rng),
            p_numeric: pick(&mut rng),
            p_text: pick(&mut rng),
            n_codes: rng.gen_range(1..=60),
            code_hierarchy_depth: rng.gen_range(0..=3),
            split_fractions,
            n_labels_per_subject: 0..=rng.gen_range(0..=3),
            label_kind: *[LabelKind::Boolean, LabelKind::Integer, LabelKind::Float, LabelKind::Categorical]
                .choose(&mut rng)
                .unwrap(),
            n_shards: rng.gen_range(1..=4),
        }
    }
}

const TEXTS: &[&str] = &[
    "positive",
    "negative",
    "ischemic \"core\"",
    "line one\nline two",
    "tab\there",
    "café – ∆",
    "back\\slash",
];

const CATEGORIES: &[&str] = &["home", "rehabilitation", "deceased", "transfer"];

fn code_name(i: usize) -> String {
    format!("SYN//{i:04}")
}

/// Code table where each code's parent is an earlier code whose own chain
/// is shorter than `depth`.
fn code_table(rng: &mut ChaCha8Rng, n: usize, depth: usize) -> Vec<CodeRecord> {
    let mut levels: Vec<usize> = Vec::with_capacity(n);
    let mut codes = Vec::with_capacity(n);
    for i in 0..n {
        let candidates: Vec<usize> = (0..i).filter(|&j| levels[j] < depth).collect();
        let mut c = CodeRecord::new(code_name(i));
        let level = match candidates.choose(rng) {
            Some(&p) if rng.gen_bool(0.7) => {
                c.parent_codes.push(code_name(p));
                levels[p] + 1
            }
            _ => 0,
        };
        levels.push(level);
        if rng.gen_bool(0.5) {
            c.description = Some(format!("synthetic concept {i}"));
        }
        codes.push(c);
    }
    codes
}

fn metadata(rng: &mut ChaCha8Rng, seed: u64) -> DatasetMetadataRecord {
    let created = Timestamp::from_micros(1_700_000_000_000_000 + (seed % 100_000) as i64 * 1_000_000);
    let mut m = DatasetMetadataRecord::new(format!("synth-{seed}"), "0.3.3", created);
    if rng.gen_bool(0.5) {
        m.dataset_version = Some(format!("1.{}", rng.gen_range(0..10)));
    }
    if rng.gen_bool(0.5) {
        m.license = Some(["CC-BY-4.0", "ODbL-1.0", "PhysioNet Credentialed 1.5.0"].choose(rng).unwrap().to_string());
    }
    for i in 0..rng.gen_range(0..=2) {
        m.location_uris.push(format!("https://data.example.org/synth-{seed}/part-{i}.tar.gz"));
    }
    if !m.location_uris.is_empty() {
        for i in 0..rng.gen_range(0..=2) {
            m.description_uris.push(format!("https://docs.example.org/synth-{seed}/{i}"));
        }
    }
    if rng.gen_bool(0.5) {
        m.etl_name = Some("synth".into());
        if rng.gen_bool(0.5) {
            m.etl_version = Some(env!("CARGO_PKG_VERSION").into());
        }
    }
    m
}

fn label_value(rng: &mut ChaCha8Rng, kind: LabelKind) -> LabelValue {
    match kind {
        LabelKind::Boolean => LabelValue::Boolean(rng.gen()),
        LabelKind::Integer => LabelValue::Integer(rng.gen_range(-5..=90)),
        LabelKind::Float => LabelValue::Float(rng.gen_range(0.0..1.0)),
        LabelKind::Categorical => LabelValue::Categorical(CATEGORIES.choose(rng).unwrap().to_string()),
    }
}

/// Generate a dataset. Identical configs give identical datasets.
pub fn generate(cfg: &SynthConfig) -> Result<MedsDataset, SynthConfigError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut ds = MedsDataset::new(metadata(&mut rng, cfg.seed));
    ds.codes = code_table(&mut rng, cfg.n_codes, cfg.code_hierarchy_depth);

    let splits: Vec<(&String, f64)> = cfg.split_fractions.iter().map(|(k, v)| (k, *v)).collect();
    let per_shard = cfg.n_subjects.div_ceil(cfg.n_shards).max(1);
    ds.shards = (0..cfg.n_shards)
        .map(|i| EventShard {
            name: format!("train/{i}.parquet"),
            events: Vec::new(),
        })
        .collect();

    for s in 0..cfg.n_subjects {
        let subject = (1_000_000 + s).to_string();
        let start = 946_684_800_000_000i64 + rng.gen_range(0..20 * 365 * 86_400i64) * 1_000_000;
        let n = rng.gen_range(cfg.events_per_subject.clone());
        let mut untimed = Vec::new();
        let mut timed = Vec::new();
        let mut t = start;
        for _ in 0..n {
            let mut e = EventRecord::new(&subject, code_name(rng.gen_range(0..cfg.n_codes)));
            if rng.gen_bool(cfg.p_time) {
                t += rng.gen_range(0..86_400_000_000i64);
                e.time = Some(Timestamp::from_micros(t));
            }
            if rng.gen_bool(cfg.p_numeric) {
                e.numeric_value = Some(rng.gen_range(-50.0..500.0));
            }
            if rng.gen_bool(cfg.p_text) {
                e.text_value = Some(TEXTS.choose(&mut rng).unwrap().to_string());
            }
            if e.time.is_some() {
                timed.push(e);
            } else {
                untimed.push(e);
            }
        }
        let shard = &mut ds.shards[(s / per_shard).min(cfg.n_shards - 1)];
        shard.events.extend(untimed);
        shard.events.extend(timed);

        if !splits.is_empty() {
            let x: f64 = rng.gen_range(0.0..1.0);
            let mut acc = 0.0;
            let mut chosen = splits[splits.len() - 1].0;
            for (name, f) in &splits {
                acc += f;
                if x < acc {
                    chosen = name;
                    break;
                }
            }
            ds.splits.push(SplitAssignment::new(&subject, chosen.as_str()));
        }

        for _ in 0..rng.gen_range(cfg.n_labels_per_subject.clone()) {
            let pt = Timestamp::from_micros(start + rng.gen_range(0..30 * 86_400_000_000i64));
            ds.labels.push(LabelRecord::new(&subject, pt, label_value(&mut rng, cfg.label_kind)));
        }
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_run() {
        let cfg = SynthConfig {
            seed: 1,
            n_subjects: 2,
            events_per_subject: 1..=1,
            ..SynthConfig::default()
        };
        let a = generate(&cfg).unwrap();
        assert_eq!(a.event_count(), 2);
        assert_eq!(a, generate(&cfg).unwrap());
    }

    #[test]
    fn seeds_differ() {
        let a = generate(&SynthConfig { seed: 1, ..Default::default() }).unwrap();
        let b = generate(&SynthConfig { seed: 2, ..Default::default() }).unwrap();
        assert_ne!(a, b);
    }

    #[test]
    fn invalid_configs() {
        let bad = SynthConfig { p_time: 1.5, ..Default::default() };
        assert!(matches!(bad.validate(), Err(SynthConfigError::Probability { name: "p_time", .. })));
        let mut bad = SynthConfig::default();
        bad.split_fractions.insert("extra".into(), 0.1);
        assert!(matches!(bad.validate(), Err(SynthConfigError::SplitFractions(_))));
        #[allow(clippy::reversed_empty_ranges)]
        let bad = SynthConfig { events_per_subject: 3..=2, ..Default::default() };
        assert_eq!(bad.validate(), Err(SynthConfigError::EmptyRange("events_per_subject")));
    }

    #[test]
    fn subjects_contiguous_and_time_sorted() {
        let ds = generate(&SynthConfig { n_shards: 3, ..Default::default() }).unwrap();
        let mut seen = std::collections::HashSet::new();
        let mut prev: Option<&EventRecord> = None;
        for (_, _, e) in ds.events() {
            if prev.map(|p| p.subject_id != e.subject_id).unwrap_or(true) {
                assert!(seen.insert(e.subject_id.clone()), "subject {} split", e.subject_id);
            } else if let (Some(a), Some(b)) = (prev.unwrap().time, e.time) {
                assert!(a <= b);
            } else {
                assert!(!(prev.unwrap().time.is_some() && e.time.is_none()));
            }
            prev = Some(e);
        }
    }

    #[test]
    fn random_configs_are_valid() {
        for seed in 0..200 {
            let cfg = SynthConfig::random(seed, 5_000);
            cfg.validate().unwrap();
            let max = cfg.n_subjects * cfg.events_per_subject.end();
            assert!(max <= 5_000 || cfg.n_subjects == 1, "{cfg:?}");
        }
    }
}
