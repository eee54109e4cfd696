//! Graph statistics: distinct term counts, class inventories, and the
//! per-event triple distribution.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;

use crate::rdf::{Graph, Term, Vocabulary};

/// Summary of the number of triples describing each `meds:Event` node.
/// `std` is the population standard deviation; `median` is the lower middle
/// element for even counts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Distribution {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub min: usize,
    pub max: usize,
    pub median: usize,
}

impl Distribution {
    pub fn from_samples(samples: &mut [usize]) -> Option<Self> {
        if samples.is_empty() {
            return None;
        }
        samples.sort_unstable();
        let n = samples.len();
        let mean = samples.iter().sum::<usize>() as f64 / n as f64;
        let var = samples
            .iter()
            .map(|&x| (x as f64 - mean).powi(2))
            .sum::<f64>()
            / n as f64;
        Some(Distribution {
            count: n,
            mean,
            std: var.sqrt(),
            min: samples[0],
            max: samples[n - 1],
            median: samples[(n - 1) / 2],
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphStats {
    pub triple_count: usize,
    pub distinct_subjects: usize,
    pub distinct_predicates: usize,
    /// IRIs and literals in object position.
    pub distinct_objects: usize,
    /// IRIs in any position.
    pub distinct_iris: usize,
    pub distinct_literals: usize,
    pub blank_node_count: usize,
    pub per_class_instance_counts: BTreeMap<String, usize>,
    pub event_triples: Option<Distribution>,
}

pub fn compute_stats(graph: &Graph, vocab: &Vocabulary) -> GraphStats {
    let mut subjects = HashSet::new();
    let mut predicates = HashSet::new();
    let mut objects = HashSet::new();
    let mut iris = HashSet::new();
    let mut literals = HashSet::new();
    let mut classes: BTreeMap<String, usize> = BTreeMap::new();
    for t in graph.iter() {
        subjects.insert(t.subject);
        predicates.insert(t.predicate);
        iris.insert(t.subject);
        iris.insert(t.predicate);
        objects.insert(t.object);
        match t.object {
            Term::Iri(o) => {
                iris.insert(o);
                if t.predicate == &vocab.rdf_type {
                    *classes.entry(o.as_str().to_string()).or_default() += 1;
                }
            }
            Term::Literal(l) => {
                literals.insert(l);
            }
        }
    }
    let mut per_event: Vec<usize> = graph
        .subjects(&vocab.rdf_type, &Term::Iri(vocab.event.clone()))
        .map(|e| graph.triples_with_subject(e).count())
        .collect();
    GraphStats {
        triple_count: graph.len(),
        distinct_subjects: subjects.len(),
        distinct_predicates: predicates.len(),
        distinct_objects: objects.len(),
        distinct_iris: iris.len(),
        distinct_literals: literals.len(),
        // Terms cannot be blank nodes.
        blank_node_count: 0,
        per_class_instance_counts: classes,
        event_triples: Distribution::from_samples(&mut per_event),
    }
}

#[derive(Serialize)]
struct Report<'a> {
    #[serde(flatten)]
    stats: &'a GraphStats,
    conventions: Conventions,
}

#[derive(Serialize)]
struct Conventions {
    std: &'static str,
    median: &'static str,
    distinct_iris: &'static str,
    distinct_objects: &'static str,
}

/// Pretty JSON with a fixed key order; byte-identical for equal stats.
pub fn emit_stats_report<W: Write>(stats: &GraphStats, mut out: W) -> io::Result<()> {
    let report = Report {
        stats,
        conventions: Conventions {
            std: "population",
            median: "lower middle element for even counts",
            distinct_iris: "IRIs in subject, predicate or object position",
            distinct_objects: "IRIs and literals in object position",
        },
    };
    serde_json::to_writer_pretty(&mut out, &report)?;
    out.write_all(b"\n")
}

pub fn stats_json(stats: &GraphStats) -> String {
    let mut buf = Vec::new();
    emit_stats_report(stats, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("JSON is UTF-8")
}

/// Plain-text table for terminals.
pub fn render_stats_table(stats: &GraphStats) -> String {
    let mut s = String::new();
    let rows = [
        ("triples", stats.triple_count),
        ("distinct subjects", stats.distinct_subjects),
        ("distinct predicates", stats.distinct_predicates),
        ("distinct objects", stats.distinct_objects),
        ("distinct IRIs", stats.distinct_iris),
        ("distinct literals", stats.distinct_literals),
        ("blank nodes", stats.blank_node_count),
    ];
    for (k, v) in rows {
        let _ = writeln!(s, "{k:<24}{v:>12}");
    }
    for (class, n) in &stats.per_class_instance_counts {
        let _ = writeln!(s, "  {class:<58}{n:>12}");
    }
    if let Some(d) = &stats.event_triples {
        let _ = writeln!(
            s,
            "triples/event           mean {:.2}  std {:.2}  median {}  min {}  max {}",
            d.mean, d.std, d.median, d.min, d.max
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_graph() {
        let s = compute_stats(&Graph::new(), &Vocabulary::default());
        assert_eq!(s.triple_count, 0);
        assert_eq!(s.distinct_iris, 0);
        assert!(s.event_triples.is_none());
        assert!(stats_json(&s).contains("\"triple_count\": 0"));
    }

    #[test]
    fn distribution_summary() {
        let d = Distribution::from_samples(&mut [5, 6, 5, 6]).unwrap();
        assert_eq!((d.min, d.max, d.median), (5, 6, 5));
        assert_eq!(d.mean, 5.5);
        assert_eq!(d.std, 0.5);
        let d = Distribution::from_samples(&mut [8]).unwrap();
        assert_eq!((d.mean, d.std, d.median), (8.0, 0.0, 8));
        assert!(Distribution::from_samples(&mut []).is_none());
    }
}
