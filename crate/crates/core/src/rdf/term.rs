//! RDF terms: absolute IRIs and typed literals.
//!
//! There is no blank-node variant. Every node this crate produces is named,
//! so a graph built from these terms cannot contain anonymous resources.

use std::fmt;

use crate::meds::Timestamp;

pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum TermError {
    #[error("IRI `{0}` is not absolute (missing scheme)")]
    RelativeIri(String),
    #[error("IRI `{iri}` contains forbidden character {ch:?}")]
    ForbiddenIriChar { iri: String, ch: char },
    #[error("unsupported literal datatype <{0}>")]
    UnsupportedDatatype(String),
}

/// An absolute IRI, stored without angle brackets.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Iri(Box<str>);

impl Iri {
    pub fn new(iri: impl Into<String>) -> Result<Self, TermError> {
        let iri = iri.into();
        if let Some(ch) = iri.chars().find(|c| is_forbidden_iri_char(*c)) {
            return Err(TermError::ForbiddenIriChar { iri, ch });
        }
        if !has_scheme(&iri) {
            return Err(TermError::RelativeIri(iri));
        }
        Ok(Iri(iri.into_boxed_str()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.0)
    }
}

impl fmt::Display for Iri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

fn is_forbidden_iri_char(c: char) -> bool {
    matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\') || c <= ' '
}

/// `scheme ":"` where scheme is `ALPHA *( ALPHA / DIGIT / "+" / "-" / "." )`.
pub(crate) fn has_scheme(s: &str) -> bool {
    let Some(colon) = s.find(':') else {
        return false;
    };
    let scheme = &s[..colon];
    let mut chars = scheme.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'))
}

/// The literal datatypes the MEDS mapping emits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Datatype {
    String,
    DateTime,
    Double,
    Boolean,
    Integer,
}

impl Datatype {
    pub const ALL: [Datatype; 5] = [
        Datatype::String,
        Datatype::DateTime,
        Datatype::Double,
        Datatype::Boolean,
        Datatype::Integer,
    ];

    pub fn local_name(self) -> &'static str {
        match self {
            Datatype::String => "string",
            Datatype::DateTime => "dateTime",
            Datatype::Double => "double",
            Datatype::Boolean => "boolean",
            Datatype::Integer => "integer",
        }
    }

    pub fn iri(self) -> String {
        format!("{XSD_NS}{}", self.local_name())
    }

    pub fn from_iri(iri: &str) -> Result<Self, TermError> {
        iri.strip_prefix(XSD_NS)
            .and_then(|local| Datatype::ALL.into_iter().find(|d| d.local_name() == local))
            .ok_or_else(|| TermError::UnsupportedDatatype(iri.to_string()))
    }

    /// Whether `lexical` is in the lexical space of this datatype.
    pub fn accepts(self, lexical: &str) -> bool {
        match self {
            Datatype::String => true,
            Datatype::DateTime => Timestamp::parse(lexical).is_ok(),
            Datatype::Double => parse_xsd_double(lexical).is_some(),
            Datatype::Boolean => matches!(lexical, "true" | "false" | "1" | "0"),
            Datatype::Integer => {
                let digits = lexical.strip_prefix(['+', '-']).unwrap_or(lexical);
                !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
            }
        }
    }
}

/// Literal equality is lexical-form plus datatype, not value-space equality.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    lexical: Box<str>,
    datatype: Datatype,
}

impl Literal {
    pub fn new(lexical: impl Into<String>, datatype: Datatype) -> Self {
        Literal {
            lexical: lexical.into().into_boxed_str(),
            datatype,
        }
    }

    pub fn string(s: impl Into<String>) -> Self {
        Self::new(s, Datatype::String)
    }

    pub fn double(v: f64) -> Self {
        Self::new(format_xsd_double(v), Datatype::Double)
    }

    pub fn integer(v: i64) -> Self {
        Self::new(v.to_string(), Datatype::Integer)
    }

    pub fn boolean(v: bool) -> Self {
        Self::new(if v { "true" } else { "false" }, Datatype::Boolean)
    }

    pub fn date_time(t: Timestamp) -> Self {
        Self::new(t.to_string(), Datatype::DateTime)
    }

    pub fn lexical(&self) -> &str {
        &self.lexical
    }

    pub fn datatype(&self) -> Datatype {
        self.datatype
    }
}

/// Shortest decimal form that parses back to the same `f64`.
pub fn format_xsd_double(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "INF" } else { "-INF" }.into()
    } else {
        // Debug keeps a `.0` on integral values and switches to exponent
        // notation at the extremes; both are valid xsd:double lexical forms.
        format!("{v:?}")
    }
}

pub fn parse_xsd_double(s: &str) -> Option<f64> {
    match s {
        "NaN" => Some(f64::NAN),
        "INF" | "+INF" => Some(f64::INFINITY),
        "-INF" => Some(f64::NEG_INFINITY),
        // Rust accepts "inf"/"infinity"/"nan" which xsd does not.
        _ if s.bytes().any(|b| b.is_ascii_alphabetic() && b != b'e' && b != b'E') => None,
        _ => s.parse().ok(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Iri(Iri),
    Literal(Literal),
}

impl Term {
    pub fn as_iri(&self) -> Option<&Iri> {
        match self {
            Term::Iri(iri) => Some(iri),
            Term::Literal(_) => None,
        }
    }

    pub fn as_literal(&self) -> Option<&Literal> {
        match self {
            Term::Literal(lit) => Some(lit),
            Term::Iri(_) => None,
        }
    }

    pub fn is_iri(&self) -> bool {
        matches!(self, Term::Iri(_))
    }
}

impl From<Iri> for Term {
    fn from(iri: Iri) -> Self {
        Term::Iri(iri)
    }
}

impl From<&Iri> for Term {
    fn from(iri: &Iri) -> Self {
        Term::Iri(iri.clone())
    }
}

impl From<Literal> for Term {
    fn from(lit: Literal) -> Self {
        Term::Literal(lit)
    }
}

/// A statement whose subject and predicate are IRIs by construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: Iri,
    pub predicate: Iri,
    pub object: Term,
}

impl Triple {
    pub fn new(subject: &Iri, predicate: &Iri, object: impl Into<Term>) -> Self {
        Triple {
            subject: subject.clone(),
            predicate: predicate.clone(),
            object: object.into(),
        }
    }
}
