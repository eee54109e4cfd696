//! Minimal RDF data model: named terms, an indexed triple set, and writers.

mod graph;
mod ntriples;
mod term;
mod turtle;
pub mod vocab;

pub use graph::{Graph, TripleRef};
pub use ntriples::{
    parse_line, parse_ntriples, parse_ntriples_str, serialize_ntriples_canonical,
    term_to_ntriples, to_ntriples_string, NTriplesError,
};
pub use term::{
    format_xsd_double, parse_xsd_double, Datatype, Iri, Literal, Term, TermError, Triple, XSD_NS,
};
pub use turtle::{serialize_turtle, to_turtle_string};
pub use vocab::Vocabulary;
