mod common;

use meds_graph::mapping::{convert, MappingContext};
use meds_graph::meds::{load_dataset, write_dataset, EventRecord, EventShard, LabelRecord, LabelValue};
use meds_graph::roundtrip::{canonicalize, cmp_events, fidelity, invert, InvertError, Table};
use meds_graph::synth::{generate, SynthConfig};
use proptest::prelude::*;

use common::{small_fixture, ts};

#[test]
fn three_event_fixture_inverts_to_canonical_form() {
    let ds = small_fixture();
    let ctx = MappingContext::for_dataset("fx");
    let back = invert(&convert(&ds, &ctx).unwrap().graph, &ctx).unwrap();
    assert_eq!(back, canonicalize(&ds));
    // B is referenced only by an event, so the canonical code table gains a bare row.
    assert_eq!(back.codes.iter().map(|c| c.code.as_str()).collect::<Vec<_>>(), ["A", "B"]);
}

#[test]
fn canonical_event_order() {
    let mut ds = small_fixture();
    ds.shards[0].events.push(EventRecord::new("1", "A"));
    ds.shards.push(EventShard { name: "1.parquet".into(), events: vec![EventRecord::new("0", "Z")] });
    let c = canonicalize(&ds);
    assert_eq!(c.shards.len(), 1);
    let ev = &c.shards[0].events;
    assert!(ev.windows(2).all(|w| cmp_events(&w[0], &w[1]).is_le()));
    assert_eq!(ev[0].subject_id, "0");
    // Untimed events of subject 1 precede the timed one.
    assert_eq!(ev[1].time, None);
    assert_eq!(ev[3].time, Some(ts("2020-01-01T10:00:00Z")));
    assert_eq!(canonicalize(&c), c);
}

#[test]
fn provenance_toggle_does_not_affect_inversion() {
    let ds = generate(&SynthConfig { seed: 9, ..Default::default() }).unwrap();
    let ctx = MappingContext::for_dataset(&ds.metadata.dataset_name).with_event_provenance(false);
    let back = invert(&convert(&ds, &ctx).unwrap().graph, &ctx).unwrap();
    assert!(fidelity(&ds, &back).is_exact());
}

#[test]
fn through_parquet_and_back() {
    let dir = tempfile::tempdir().unwrap();
    let ds = generate(&SynthConfig { seed: 4, n_shards: 3, label_kind: meds_graph::synth::LabelKind::Float, ..Default::default() }).unwrap();
    write_dataset(&ds, dir.path()).unwrap();
    let loaded = load_dataset(dir.path()).unwrap();
    let ctx = MappingContext::for_dataset(&loaded.metadata.dataset_name);
    let back = invert(&convert(&loaded, &ctx).unwrap().graph, &ctx).unwrap();
    let report = fidelity(&ds, &back);
    assert!(report.is_exact(), "{:?}", report.diffs);
}

#[test]
fn missing_text_value_is_a_single_named_diff() {
    let ds = generate(&SynthConfig { seed: 12, p_text: 0.5, ..Default::default() }).unwrap();
    let mut lossy = canonicalize(&ds);
    let e = lossy.shards[0].events.iter_mut().find(|e| e.text_value.is_some()).unwrap();
    let key = format!("{}|{}|{}", e.subject_id, e.time.map(|t| t.to_string()).unwrap_or_default(), e.code);
    e.text_value = None;
    let r = fidelity(&ds, &lossy);
    assert!(!r.events_equal && r.codes_equal && r.metadata_equal && r.splits_equal && r.labels_equal);
    // Key collisions within one (subject, time, code) group could shift the
    // pairing, so only require the first diff to name the edited field.
    assert_eq!(r.diffs[0].table, Table::Events);
    assert!(r.diffs[0].key.starts_with(&key), "{:?}", r.diffs);
    assert!(r.diffs.iter().any(|d| d.field == "text_value"));
}

#[test]
fn metadata_and_label_diffs() {
    let ds = small_fixture();
    let mut other = ds.clone();
    other.metadata.license = Some("CC0-1.0".into());
    other.labels.push(LabelRecord::new("1", ts("2020-01-05"), LabelValue::Integer(1)));
    let r = fidelity(&ds, &other);
    assert!(!r.metadata_equal && !r.labels_equal && r.events_equal);
    assert_eq!(r.diffs.len(), 2);
    let m = r.diffs.iter().find(|d| d.table == Table::Metadata).unwrap();
    assert_eq!((m.field.as_str(), m.expected.as_deref(), m.actual.as_deref()), ("license", None, Some("CC0-1.0")));
    // Flags all true iff no diffs.
    let clean = fidelity(&ds, &ds);
    assert!(clean.diffs.is_empty() && clean.events_equal && clean.labels_equal);
}

#[test]
fn report_serializes() {
    let r = fidelity(&small_fixture(), &small_fixture());
    let v: serde_json::Value = serde_json::to_value(&r).unwrap();
    assert_eq!(v["diffs"], serde_json::json!([]));
    assert_eq!(v["events_equal"], true);
}

#[test]
fn foreign_graph_is_rejected() {
    let ds = small_fixture();
    let ctx = MappingContext::for_dataset("fx");
    let g = convert(&ds, &ctx).unwrap().graph;
    let mut doubled = g.clone();
    doubled.merge(&convert(&ds, &MappingContext::for_dataset("fy")).unwrap().graph);
    assert!(matches!(invert(&doubled, &ctx), Err(InvertError::AmbiguousMetadata(2))));
    assert!(matches!(invert(&meds_graph::rdf::Graph::new(), &ctx), Err(InvertError::AmbiguousMetadata(0))));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn invert_after_convert_is_canonicalize(seed in any::<u64>()) {
        let ds = generate(&SynthConfig::random(seed, 1_000)).unwrap();
        let ctx = MappingContext::for_dataset(&ds.metadata.dataset_name);
        let back = invert(&convert(&ds, &ctx).unwrap().graph, &ctx).unwrap();
        prop_assert_eq!(&back, &canonicalize(&ds));
        prop_assert!(fidelity(&ds, &back).is_exact());
    }
}
