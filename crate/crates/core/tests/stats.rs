mod common;

use std::collections::BTreeSet;

use meds_graph::mapping::{convert, MappingContext};
use meds_graph::meds::{DatasetMetadataRecord, EventRecord, EventShard, MedsDataset};
use meds_graph::rdf::{to_ntriples_string, Graph, Triple};
use meds_graph::stats::{compute_stats, stats_json};
use meds_graph::synth::{generate, SynthConfig};

use common::{node_inventory, small_fixture, ts};

#[test]
fn one_all_optional_event() {
    let mut ds = MedsDataset::new(DatasetMetadataRecord::new("one", "0.3.3", ts("2025-01-01")));
    ds.shards.push(EventShard {
        name: "0".into(),
        events: vec![EventRecord::new("1", "A").with_time(ts("2020-01-01")).with_numeric(1.0).with_text("x")],
    });
    let ctx = MappingContext::for_dataset("one");
    let d = compute_stats(&convert(&ds, &ctx).unwrap().graph, &ctx.vocab).event_triples.unwrap();
    assert_eq!((d.count, d.min, d.max, d.median), (1, 8, 8, 8));
    assert_eq!((d.mean, d.std), (8.0, 0.0));
}

/// Distinct-term counts taken from an independent N-Triples parse.
#[test]
fn counts_match_independent_parse() {
    for seed in 0..10 {
        let ds = generate(&SynthConfig::random(seed, 800)).unwrap();
        let ctx = MappingContext::for_dataset(&ds.metadata.dataset_name);
        let g = convert(&ds, &ctx).unwrap().graph;
        let text = to_ntriples_string(&g);
        let parsed: Vec<oxrdf::Triple> = oxttl::NTriplesParser::new().for_slice(&text).map(Result::unwrap).collect();

        let (mut s, mut p, mut o, mut iris, mut lits) =
            (BTreeSet::new(), BTreeSet::new(), BTreeSet::new(), BTreeSet::new(), BTreeSet::new());
        for t in &parsed {
            s.insert(t.subject.to_string());
            p.insert(t.predicate.to_string());
            o.insert(t.object.to_string());
            iris.insert(t.subject.to_string());
            iris.insert(t.predicate.to_string());
            match &t.object {
                oxrdf::Term::NamedNode(n) => {
                    iris.insert(n.to_string());
                }
                other => {
                    lits.insert(other.to_string());
                }
            }
        }
        let st = compute_stats(&g, &ctx.vocab);
        assert_eq!(st.triple_count, parsed.len());
        assert_eq!(st.distinct_subjects, s.len());
        assert_eq!(st.distinct_predicates, p.len());
        assert_eq!(st.distinct_objects, o.len());
        assert_eq!(st.distinct_iris, iris.len());
        assert_eq!(st.distinct_literals, lits.len());
        assert_eq!(st.distinct_subjects, node_inventory(&ds));
        assert_eq!(st.blank_node_count, 0);
        assert!(st.distinct_iris >= st.distinct_subjects && st.triple_count >= st.distinct_subjects);
        if let Some(d) = st.event_triples {
            assert!(d.min as f64 <= d.mean && d.mean <= d.max as f64 && d.std >= 0.0);
            assert_eq!(d.count, ds.event_count());
        }
    }
}

#[test]
fn class_counts() {
    let ds = small_fixture();
    let ctx = MappingContext::for_dataset("fx");
    let st = compute_stats(&convert(&ds, &ctx).unwrap().graph, &ctx.vocab);
    let count = |iri: &meds_graph::rdf::Iri| st.per_class_instance_counts.get(iri.as_str()).copied();
    assert_eq!(count(&ctx.vocab.event), Some(3));
    assert_eq!(count(&ctx.vocab.subject), Some(2));
    assert_eq!(count(&ctx.vocab.code), Some(2));
    assert_eq!(count(&ctx.vocab.dataset_metadata), Some(1));
    assert_eq!(count(&ctx.vocab.subject_split), Some(1));
    assert_eq!(count(&ctx.vocab.subject_label), None);
}

#[test]
fn json_is_stable_and_order_free() {
    let ds = generate(&SynthConfig::default()).unwrap();
    let ctx = MappingContext::for_dataset(&ds.metadata.dataset_name);
    let g = convert(&ds, &ctx).unwrap().graph;
    let mut triples: Vec<Triple> = g.iter().map(|t| t.to_owned()).collect();
    triples.reverse();
    let r: Graph = triples.into_iter().collect();
    let a = stats_json(&compute_stats(&g, &ctx.vocab));
    assert_eq!(a, stats_json(&compute_stats(&g, &ctx.vocab)));
    assert_eq!(a, stats_json(&compute_stats(&r, &ctx.vocab)));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
    assert_eq!(keys[0], "triple_count");
    assert_eq!(v["conventions"]["std"], "population");
}

/// Mean triples per event is 5 + pt + pn + px; check within 3 standard errors.
#[test]
fn mean_tracks_field_probabilities() {
    for (i, (pt, pn, px)) in [(0.31, 0.0, 0.0), (0.5, 0.5, 0.5), (0.9, 0.2, 0.05), (1.0, 1.0, 1.0)].into_iter().enumerate() {
        let cfg = SynthConfig {
            seed: 100 + i as u64,
            n_subjects: 400,
            events_per_subject: 25..=25,
            p_time: pt,
            p_numeric: pn,
            p_text: px,
            ..SynthConfig::default()
        };
        let ds = generate(&cfg).unwrap();
        assert_eq!(ds.event_count(), 10_000);
        let ctx = MappingContext::for_dataset(&ds.metadata.dataset_name);
        let d = compute_stats(&convert(&ds, &ctx).unwrap().graph, &ctx.vocab).event_triples.unwrap();
        let expected = 5.0 + pt + pn + px;
        let var: f64 = [pt, pn, px].iter().map(|p| p * (1.0 - p)).sum();
        let se = (var / 10_000.0).sqrt();
        assert!((d.mean - expected).abs() <= 3.0 * se + 1e-12, "{pt},{pn},{px}: {} vs {expected}", d.mean);
    }
}
