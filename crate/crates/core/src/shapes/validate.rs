use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::rdf::{Graph, Iri, Term};
use crate::rdf::vocab::RDF_NS;

use super::model::{ConstraintKind, NodeShape, ObjectConstraint, ShapeSuite};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    #[serde(serialize_with = "iri_str")]
    pub focus: Iri,
    /// Class of the shape that raised it; for split-membership, the predicate.
    #[serde(serialize_with = "iri_str")]
    pub target_class: Iri,
    pub kind: ConstraintKind,
    #[serde(serialize_with = "opt_iri_str")]
    pub path: Option<Iri>,
    pub message: String,
}

fn iri_str<S: serde::Serializer>(iri: &Iri, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(iri.as_str())
}

fn opt_iri_str<S: serde::Serializer>(iri: &Option<Iri>, s: S) -> Result<S::Ok, S::Error> {
    match iri {
        Some(i) => s.serialize_str(i.as_str()),
        None => s.serialize_none(),
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}> [{}] {}", self.focus, self.kind, self.message)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub conforms: bool,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort();
        ValidationReport {
            conforms: violations.is_empty(),
            violations,
        }
    }

    pub fn count(&self, kind: ConstraintKind) -> usize {
        self.violations.iter().filter(|v| v.kind == kind).count()
    }
}

/// Check every node typed with a targeted class against its shape.
/// Violations are sorted, so the report does not depend on graph build order.
pub fn validate(graph: &Graph, suite: &ShapeSuite) -> ValidationReport {
    let rdf_type = Iri::new(format!("{RDF_NS}type")).expect("rdf:type is absolute");
    let mut violations: Vec<Violation> = suite
        .shapes
        .iter()
        .flat_map(|shape| {
            let class = Term::Iri(shape.target_class.clone());
            let focus: Vec<&Iri> = graph.subjects(&rdf_type, &class).collect();
            focus
                .into_par_iter()
                .flat_map_iter(|node| check_node(graph, &rdf_type, shape, node))
                .collect::<Vec<_>>()
        })
        .collect();
    for predicate in &suite.split_membership {
        violations.extend(check_split_membership(graph, predicate));
    }
    ValidationReport::from_violations(violations)
}

fn check_node(graph: &Graph, rdf_type: &Iri, shape: &NodeShape, node: &Iri) -> Vec<Violation> {
    let mut out = Vec::new();
    let violation = |kind, path: Option<&Iri>, message: String| Violation {
        focus: node.clone(),
        target_class: shape.target_class.clone(),
        kind,
        path: path.cloned(),
        message,
    };
    for c in &shape.constraints {
        let objects: Vec<&Term> = graph.objects(node, &c.path).collect();
        let n = objects.len();
        if n < c.min_count {
            out.push(violation(
                ConstraintKind::MinCount,
                Some(&c.path),
                format!("<{}>: observed {n} < min {}", c.path, c.min_count),
            ));
        }
        if let Some(max) = c.max_count {
            if n > max {
                out.push(violation(
                    ConstraintKind::MaxCount,
                    Some(&c.path),
                    format!("<{}>: observed {n} > max {max}", c.path),
                ));
            }
        }
        match &c.object {
            None => {}
            Some(ObjectConstraint::Datatype(dt)) => {
                for o in &objects {
                    let ok = o
                        .as_literal()
                        .is_some_and(|l| l.datatype() == *dt && dt.accepts(l.lexical()));
                    if !ok {
                        out.push(violation(
                            ConstraintKind::Datatype,
                            Some(&c.path),
                            format!("<{}>: {} is not a valid xsd:{}", c.path, crate::rdf::term_to_ntriples(o), dt.local_name()),
                        ));
                    }
                }
            }
            Some(ObjectConstraint::Class(class)) => {
                for o in &objects {
                    let ok = o.as_iri().is_some_and(|i| graph.has_type(i, rdf_type, class));
                    if !ok {
                        out.push(violation(
                            ConstraintKind::Class,
                            Some(&c.path),
                            format!("<{}>: {} is not typed <{class}>", c.path, crate::rdf::term_to_ntriples(o)),
                        ));
                    }
                }
            }
        }
    }
    for g in &shape.exclusive_groups {
        let total: usize = g.paths.iter().map(|p| graph.objects(node, p).count()).sum();
        if total < g.min_total || total > g.max_total {
            out.push(violation(
                ConstraintKind::ExclusiveGroup,
                None,
                format!(
                    "{} values across {{{}}}, expected {}..={}",
                    total,
                    g.paths.iter().map(|p| format!("<{p}>")).collect::<Vec<_>>().join(", "),
                    g.min_total,
                    g.max_total
                ),
            ));
        }
    }
    out
}

fn split_table(iri: &Iri) -> &str {
    let s = iri.as_str();
    s.rfind(['/', '#']).map_or(s, |i| &s[..i])
}

fn check_split_membership(graph: &Graph, predicate: &Iri) -> Vec<Violation> {
    let mut groups: HashMap<(&Iri, &str), Vec<&Iri>> = HashMap::new();
    for t in graph.triples_with_predicate(predicate) {
        if let Some(split) = t.object.as_iri() {
            groups.entry((t.subject, split_table(split))).or_default().push(split);
        }
    }
    groups
        .into_iter()
        .filter(|(_, splits)| splits.len() > 1)
        .map(|((node, table), mut splits)| {
            splits.sort();
            Violation {
                focus: node.clone(),
                target_class: predicate.clone(),
                kind: ConstraintKind::SplitMembership,
                path: Some(predicate.clone()),
                message: format!(
                    "assigned to {} splits of table <{table}>: {}",
                    splits.len(),
                    splits.iter().map(|s| format!("<{s}>")).collect::<Vec<_>>().join(", ")
                ),
            }
        })
        .collect()
}
