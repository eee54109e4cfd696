//! Turtle writer. Statements are grouped per subject in canonical order.

use std::io::{self, Write};

use super::graph::Graph;
use super::ntriples::{escape_string_into, term_to_ntriples};
use super::term::{Datatype, Iri, Term, XSD_NS};
use super::vocab::RDF_NS;

struct Prefixes<'a> {
    entries: &'a [(String, String)],
    xsd: Option<&'a str>,
}

impl<'a> Prefixes<'a> {
    fn new(entries: &'a [(String, String)]) -> Self {
        let xsd = entries
            .iter()
            .find(|(_, ns)| ns == XSD_NS)
            .map(|(p, _)| p.as_str());
        Prefixes { entries, xsd }
    }

    /// Longest matching namespace whose remainder is a plain local name.
    fn compact(&self, iri: &str) -> Option<String> {
        self.entries
            .iter()
            .filter_map(|(prefix, ns)| {
                let local = iri.strip_prefix(ns.as_str())?;
                is_simple_local(local).then_some((ns.len(), prefix, local))
            })
            .max_by_key(|(len, _, _)| *len)
            .map(|(_, prefix, local)| format!("{prefix}:{local}"))
    }

    fn iri(&self, out: &mut String, iri: &Iri) {
        match self.compact(iri.as_str()) {
            Some(pname) => out.push_str(&pname),
            None => {
                out.push('<');
                out.push_str(iri.as_str());
                out.push('>');
            }
        }
    }

    fn object(&self, out: &mut String, term: &Term) {
        match term {
            Term::Iri(iri) => self.iri(out, iri),
            Term::Literal(lit) => {
                out.push('"');
                escape_string_into(out, lit.lexical());
                out.push('"');
                if lit.datatype() != Datatype::String {
                    out.push_str("^^");
                    match self.xsd {
                        Some(p) => {
                            out.push_str(p);
                            out.push(':');
                            out.push_str(lit.datatype().local_name());
                        }
                        None => {
                            out.push('<');
                            out.push_str(&lit.datatype().iri());
                            out.push('>');
                        }
                    }
                }
            }
        }
    }
}

/// Conservative subset of PN_LOCAL that needs no escaping.
fn is_simple_local(local: &str) -> bool {
    let mut chars = local.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub fn serialize_turtle<W: Write>(
    graph: &Graph,
    prefixes: &[(String, String)],
    mut out: W,
) -> io::Result<()> {
    let px = Prefixes::new(prefixes);
    for (prefix, ns) in prefixes {
        writeln!(out, "@prefix {prefix}: <{ns}> .")?;
    }
    if graph.is_empty() {
        return Ok(());
    }
    let rdf_type = format!("{RDF_NS}type");
    let rank = graph.term_ranks(term_to_ntriples);
    let mut buf = String::new();
    let mut current: Option<(&Iri, &Iri)> = None;
    for t in graph.iter_ranked(&rank) {
        match current {
            Some((s, p)) if s == t.subject && p == t.predicate => buf.push_str(" ,\n        "),
            Some((s, _)) if s == t.subject => {
                buf.push_str(" ;\n    ");
                write_predicate(&px, &mut buf, t.predicate, &rdf_type);
                buf.push(' ');
            }
            prev => {
                if prev.is_some() {
                    buf.push_str(" .\n");
                }
                buf.push('\n');
                px.iri(&mut buf, t.subject);
                buf.push(' ');
                write_predicate(&px, &mut buf, t.predicate, &rdf_type);
                buf.push(' ');
            }
        }
        px.object(&mut buf, t.object);
        current = Some((t.subject, t.predicate));
        if buf.len() > 1 << 16 {
            out.write_all(buf.as_bytes())?;
            buf.clear();
        }
    }
    buf.push_str(" .\n");
    out.write_all(buf.as_bytes())
}

fn write_predicate(px: &Prefixes<'_>, buf: &mut String, predicate: &Iri, rdf_type: &str) {
    if predicate.as_str() == rdf_type {
        buf.push('a');
    } else {
        px.iri(buf, predicate);
    }
}

pub fn to_turtle_string(graph: &Graph, prefixes: &[(String, String)]) -> String {
    let mut buf = Vec::new();
    serialize_turtle(graph, prefixes, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serializer emits UTF-8")
}
