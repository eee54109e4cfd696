//! Canonical N-Triples writer and a strict line-oriented reader.
//!
//! Canonical output: one statement per line, LF endings, lines ordered by the
//! code-point order of the serialized subject, then predicate, then object.
//! `xsd:string` literals are written without an explicit datatype.

use std::io::{self, BufRead, Write};

use super::graph::Graph;
use super::term::{Datatype, Iri, Literal, Term, TermError, Triple};

#[derive(Debug, thiserror::Error)]
pub enum NTriplesError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: blank nodes are not supported")]
    BlankNodeUnsupported { line: usize },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub(crate) fn escape_string_into(out: &mut String, s: &str) {
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            '\u{8}' => out.push_str("\\b"),
            '\u{c}' => out.push_str("\\f"),
            c if c < ' ' || c == '\u{7f}' => out.push_str(&format!("\\u{:04X}", c as u32)),
            c => out.push(c),
        }
    }
}

pub(crate) fn write_term_into(out: &mut String, term: &Term) {
    match term {
        Term::Iri(iri) => {
            out.push('<');
            out.push_str(iri.as_str());
            out.push('>');
        }
        Term::Literal(lit) => {
            out.push('"');
            escape_string_into(out, lit.lexical());
            out.push('"');
            if lit.datatype() != Datatype::String {
                out.push_str("^^<");
                out.push_str(&lit.datatype().iri());
                out.push('>');
            }
        }
    }
}

/// The N-Triples form of a single term.
pub fn term_to_ntriples(term: &Term) -> String {
    let mut s = String::new();
    write_term_into(&mut s, term);
    s
}

/// Write the graph as canonical N-Triples. Output depends only on the triple set.
pub fn serialize_ntriples_canonical<W: Write>(graph: &Graph, mut out: W) -> io::Result<()> {
    let rank = graph.term_ranks(term_to_ntriples);
    let mut line = String::new();
    for t in graph.iter_ranked(&rank) {
        line.clear();
        line.push('<');
        line.push_str(t.subject.as_str());
        line.push_str("> <");
        line.push_str(t.predicate.as_str());
        line.push_str("> ");
        write_term_into(&mut line, t.object);
        line.push_str(" .\n");
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn to_ntriples_string(graph: &Graph) -> String {
    let mut buf = Vec::new();
    serialize_ntriples_canonical(graph, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("serializer emits UTF-8")
}

pub fn parse_ntriples<R: BufRead>(input: R) -> Result<Graph, NTriplesError> {
    let mut graph = Graph::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        if let Some(triple) = parse_line(&line, idx + 1)? {
            graph.insert(triple);
        }
    }
    Ok(graph)
}

pub fn parse_ntriples_str(input: &str) -> Result<Graph, NTriplesError> {
    parse_ntriples(input.as_bytes())
}

/// Parse a single N-Triples statement; `None` for blank or comment lines.
pub fn parse_line(line: &str, line_no: usize) -> Result<Option<Triple>, NTriplesError> {
    let mut cur = Cursor {
        rest: line,
        line: line_no,
    };
    cur.skip_ws();
    if cur.rest.is_empty() || cur.rest.starts_with('#') {
        return Ok(None);
    }
    let subject = cur.iri_position("subject")?;
    cur.skip_ws();
    let predicate = cur.iri_position("predicate")?;
    cur.skip_ws();
    let object = cur.object()?;
    cur.skip_ws();
    if !cur.eat('.') {
        return Err(cur.syntax("expected `.` after object"));
    }
    cur.skip_ws();
    if !(cur.rest.is_empty() || cur.rest.starts_with('#')) {
        return Err(cur.syntax("unexpected trailing content"));
    }
    Ok(Some(Triple {
        subject,
        predicate,
        object,
    }))
}

struct Cursor<'a> {
    rest: &'a str,
    line: usize,
}

impl Cursor<'_> {
    fn syntax(&self, message: impl Into<String>) -> NTriplesError {
        NTriplesError::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn term_err(&self, e: TermError) -> NTriplesError {
        self.syntax(e.to_string())
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t']);
    }

    fn eat(&mut self, c: char) -> bool {
        if let Some(r) = self.rest.strip_prefix(c) {
            self.rest = r;
            true
        } else {
            false
        }
    }

    fn next_char(&mut self) -> Option<char> {
        let c = self.rest.chars().next()?;
        self.rest = &self.rest[c.len_utf8()..];
        Some(c)
    }

    fn iri_position(&mut self, what: &str) -> Result<Iri, NTriplesError> {
        if self.rest.starts_with("_:") {
            return Err(NTriplesError::BlankNodeUnsupported { line: self.line });
        }
        if !self.rest.starts_with('<') {
            return Err(self.syntax(format!("expected IRI in {what} position")));
        }
        self.iriref()
    }

    fn iriref(&mut self) -> Result<Iri, NTriplesError> {
        self.eat('<');
        let mut out = String::new();
        loop {
            match self.next_char() {
                None => return Err(self.syntax("unterminated IRI")),
                Some('>') => break,
                Some('\\') => out.push(self.uchar()?),
                Some(c) => out.push(c),
            }
        }
        Iri::new(out).map_err(|e| self.term_err(e))
    }

    fn uchar(&mut self) -> Result<char, NTriplesError> {
        let width = match self.next_char() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.syntax("invalid escape in IRI")),
        };
        self.hex_char(width)
    }

    fn hex_char(&mut self, width: usize) -> Result<char, NTriplesError> {
        if self.rest.len() < width || !self.rest.is_char_boundary(width) {
            return Err(self.syntax("truncated unicode escape"));
        }
        let (hex, rest) = self.rest.split_at(width);
        let code = u32::from_str_radix(hex, 16).map_err(|_| self.syntax("bad hex digits"))?;
        self.rest = rest;
        char::from_u32(code).ok_or_else(|| self.syntax("escape is not a scalar value"))
    }

    fn object(&mut self) -> Result<Term, NTriplesError> {
        if self.rest.starts_with("_:") {
            return Err(NTriplesError::BlankNodeUnsupported { line: self.line });
        }
        if self.rest.starts_with('<') {
            return Ok(Term::Iri(self.iriref()?));
        }
        if !self.eat('"') {
            return Err(self.syntax("expected IRI or literal in object position"));
        }
        let mut lexical = String::new();
        loop {
            match self.next_char() {
                None => return Err(self.syntax("unterminated string literal")),
                Some('"') => break,
                Some('\\') => {
                    let c = match self.next_char() {
                        Some('t') => '\t',
                        Some('b') => '\u{8}',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') => self.hex_char(4)?,
                        Some('U') => self.hex_char(8)?,
                        _ => return Err(self.syntax("invalid string escape")),
                    };
                    lexical.push(c);
                }
                Some(c) => lexical.push(c),
            }
        }
        if self.rest.starts_with('@') {
            return Err(self.syntax("language-tagged literals are not supported"));
        }
        let datatype = if self.rest.starts_with("^^") {
            self.rest = &self.rest[2..];
            if !self.rest.starts_with('<') {
                return Err(self.syntax("expected datatype IRI after ^^"));
            }
            let dt = self.iriref()?;
            Datatype::from_iri(dt.as_str()).map_err(|e| self.term_err(e))?
        } else {
            Datatype::String
        };
        Ok(Term::Literal(Literal::new(lexical, datatype)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iri(s: &str) -> Iri {
        Iri::new(format!("http://example.org/{s}")).unwrap()
    }

    #[test]
    fn empty_graph_serializes_to_nothing() {
        assert_eq!(to_ntriples_string(&Graph::new()), "");
        assert!(parse_ntriples_str("").unwrap().is_empty());
    }

    #[test]
    fn literal_forms() {
        let mut g = Graph::new();
        g.insert(Triple::new(&iri("s"), &iri("p"), Literal::string("a \"q\"\n\\")));
        g.insert(Triple::new(&iri("s"), &iri("p"), Literal::double(1.5)));
        let out = to_ntriples_string(&g);
        assert_eq!(
            out,
            "<http://example.org/s> <http://example.org/p> \"1.5\"^^<http://www.w3.org/2001/XMLSchema#double> .\n\
             <http://example.org/s> <http://example.org/p> \"a \\\"q\\\"\\n\\\\\" .\n"
        );
        assert_eq!(parse_ntriples_str(&out).unwrap(), g);
    }

    #[test]
    fn explicit_string_datatype_is_accepted() {
        let g = parse_ntriples_str(
            "<http://x/s> <http://x/p> \"v\"^^<http://www.w3.org/2001/XMLSchema#string> .",
        )
        .unwrap();
        assert_eq!(g.iter().next().unwrap().object, &Term::Literal(Literal::string("v")));
    }

    #[test]
    fn blank_nodes_are_rejected() {
        for input in ["_:b0 <http://x/p> <http://x/o> .", "<http://x/s> <http://x/p> _:b0 ."] {
            assert!(matches!(
                parse_ntriples_str(input),
                Err(NTriplesError::BlankNodeUnsupported { line: 1 })
            ));
        }
    }

    #[test]
    fn syntax_errors_carry_line_numbers() {
        let input = "<http://x/s> <http://x/p> <http://x/o> .\n\n<http://x/s> <http://x/p> \"open .\n";
        match parse_ntriples_str(input) {
            Err(NTriplesError::Syntax { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(parse_ntriples_str("<http://x/s> <http://x/p> <http://x/o>").is_err());
        assert!(parse_ntriples_str("<http://x/s> <http://x/p> \"x\"@en .").is_err());
        assert!(parse_ntriples_str("<rel> <http://x/p> <http://x/o> .").is_err());
    }

    #[test]
    fn comments_and_unicode_escapes() {
        let g = parse_ntriples_str(
            "# header\n<http://x/\\u00E9> <http://x/p> \"caf\\u00E9\" . # trailing\n",
        )
        .unwrap();
        let t = g.iter().next().unwrap();
        assert_eq!(t.subject.as_str(), "http://x/é");
        assert_eq!(t.object, &Term::Literal(Literal::string("café")));
    }

    #[test]
    fn control_characters_round_trip() {
        let mut g = Graph::new();
        g.insert(Triple::new(&iri("s"), &iri("p"), Literal::string("\u{1}\t\u{7f}")));
        let out = to_ntriples_string(&g);
        assert!(out.contains("\\u0001\\t\\u007F"));
        assert_eq!(parse_ntriples_str(&out).unwrap(), g);
    }
}
