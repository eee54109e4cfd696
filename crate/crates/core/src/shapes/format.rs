//! Line-oriented shape-file format.
//!
//! ```text
//! file   := { line "\n" }
//! line   := prefix | shape | prop | group | split | comment | blank
//! prefix := "prefix" NAME ":" "<" IRI ">"
//! shape  := "shape" iri
//! prop   := "prop" iri [ "min=" N ] [ "max=" ( N | "*" ) ] [ "datatype=" iri | "class=" iri ]
//! group  := "group" ( "exactly=" N | "min=" N "max=" N ) "{" iri { "," iri } "}"
//! split  := "split-membership" iri
//! iri    := "<" IRI ">" | NAME ":" LOCAL
//! comment:= "#" ...
//! ```
//!
//! `prop` and `group` lines attach to the closest preceding `shape`.
//! Indentation is cosmetic. `min` defaults to 0 and `max` to `*`.
//! The `xsd:` prefix is predeclared.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::rdf::{Datatype, Iri, XSD_NS};

use super::model::{ExclusiveGroup, NodeShape, ObjectConstraint, PropertyConstraint, ShapeSuite};

#[derive(Debug, thiserror::Error)]
pub enum ShapeFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{}: {source}", path.display())]
    Io {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
}

pub fn load_suite(path: &Path) -> Result<ShapeSuite, ShapeFileError> {
    let text = fs::read_to_string(path).map_err(|source| ShapeFileError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_suite(&text)
}

struct Parser {
    prefixes: HashMap<String, String>,
    line: usize,
}

impl Parser {
    fn err(&self, message: impl Into<String>) -> ShapeFileError {
        ShapeFileError::Syntax {
            line: self.line,
            message: message.into(),
        }
    }

    fn iri(&self, token: &str) -> Result<Iri, ShapeFileError> {
        let full = if let Some(inner) = token.strip_prefix('<') {
            inner
                .strip_suffix('>')
                .ok_or_else(|| self.err(format!("unterminated IRI `{token}`")))?
                .to_string()
        } else if let Some((prefix, local)) = token.split_once(':') {
            let ns = self
                .prefixes
                .get(prefix)
                .ok_or_else(|| self.err(format!("undeclared prefix `{prefix}:`")))?;
            format!("{ns}{local}")
        } else {
            return Err(self.err(format!("expected an IRI, found `{token}`")));
        };
        Iri::new(full).map_err(|e| self.err(e.to_string()))
    }

    fn count(&self, key: &str, value: &str) -> Result<usize, ShapeFileError> {
        value
            .parse()
            .map_err(|_| self.err(format!("`{key}` expects a non-negative integer, found `{value}`")))
    }
}

pub fn parse_suite(text: &str) -> Result<ShapeSuite, ShapeFileError> {
    let mut p = Parser {
        prefixes: HashMap::from([("xsd".to_string(), XSD_NS.to_string())]),
        line: 0,
    };
    // (shape, line where it was opened)
    let mut shapes: Vec<(NodeShape, usize)> = Vec::new();
    let mut split_membership = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        p.line = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "prefix" => {
                let (name, ns) = rest
                    .split_once(char::is_whitespace)
                    .ok_or_else(|| p.err("expected `prefix NAME: <IRI>`"))?;
                let name = name
                    .strip_suffix(':')
                    .ok_or_else(|| p.err("prefix name must end with `:`"))?;
                let ns = p.iri(ns.trim())?;
                p.prefixes.insert(name.to_string(), ns.as_str().to_string());
            }
            "shape" => {
                let class = p.iri(rest)?;
                let shape = NodeShape::new(class, vec![], vec![]).expect("empty shape is valid");
                shapes.push((shape, p.line));
            }
            "prop" => {
                let mut tokens = rest.split_whitespace();
                let path = p.iri(tokens.next().ok_or_else(|| p.err("`prop` needs a path"))?)?;
                let (mut min, mut max, mut object) = (0, None, None);
                for tok in tokens {
                    let (key, value) = tok
                        .split_once('=')
                        .ok_or_else(|| p.err(format!("expected key=value, found `{tok}`")))?;
                    match key {
                        "min" => min = p.count(key, value)?,
                        "max" if value == "*" => max = None,
                        "max" => max = Some(p.count(key, value)?),
                        "datatype" | "class" if object.is_some() => {
                            return Err(p.err("datatype and class are mutually exclusive"));
                        }
                        "datatype" => {
                            let iri = p.iri(value)?;
                            let dt = Datatype::from_iri(iri.as_str()).map_err(|e| p.err(e.to_string()))?;
                            object = Some(ObjectConstraint::Datatype(dt));
                        }
                        "class" => object = Some(ObjectConstraint::Class(p.iri(value)?)),
                        _ => return Err(p.err(format!("unknown property key `{key}`"))),
                    }
                }
                let mut c = PropertyConstraint::new(path, min, max).map_err(|e| p.err(e.to_string()))?;
                c.object = object;
                let (shape, _) = shapes.last_mut().ok_or_else(|| p.err("`prop` outside a shape"))?;
                if shape.constraints.iter().any(|x| x.path == c.path) {
                    return Err(p.err(format!("path <{}> constrained twice", c.path)));
                }
                shape.constraints.push(c);
            }
            "group" => {
                let open = rest.find('{').ok_or_else(|| p.err("group needs `{...}`"))?;
                let close = rest.rfind('}').filter(|c| *c > open).ok_or_else(|| p.err("unclosed `{`"))?;
                if !rest[close + 1..].trim().is_empty() {
                    return Err(p.err("unexpected content after `}`"));
                }
                let (mut min, mut max) = (None, None);
                for tok in rest[..open].split_whitespace() {
                    match tok.split_once('=') {
                        Some(("exactly", v)) => {
                            let n = p.count("exactly", v)?;
                            (min, max) = (Some(n), Some(n));
                        }
                        Some(("min", v)) => min = Some(p.count("min", v)?),
                        Some(("max", v)) => max = Some(p.count("max", v)?),
                        _ => return Err(p.err(format!("unexpected `{tok}` in group"))),
                    }
                }
                let (min, max) = min.zip(max).ok_or_else(|| p.err("group needs exactly=N or min=N max=N"))?;
                let paths = rest[open + 1..close]
                    .split(',')
                    .map(|t| p.iri(t.trim()))
                    .collect::<Result<Vec<_>, _>>()?;
                let group = ExclusiveGroup::new(paths, min, max).map_err(|e| p.err(e.to_string()))?;
                let (shape, _) = shapes.last_mut().ok_or_else(|| p.err("`group` outside a shape"))?;
                shape.exclusive_groups.push(group);
            }
            "split-membership" => split_membership.push(p.iri(rest)?),
            other => return Err(p.err(format!("unknown directive `{other}`"))),
        }
    }

    let mut seen: HashMap<Iri, usize> = HashMap::new();
    for (shape, line) in &shapes {
        if let Some(first) = seen.insert(shape.target_class.clone(), *line) {
            return Err(ShapeFileError::Syntax {
                line: *line,
                message: format!("class <{}> already has a shape (line {first})", shape.target_class),
            });
        }
    }
    Ok(ShapeSuite::new(shapes.into_iter().map(|(s, _)| s).collect(), split_membership)
        .expect("duplicate targets rejected above"))
}

/// Render a suite in the shape-file format, compacting IRIs with `prefixes`.
pub fn write_suite(suite: &ShapeSuite, prefixes: &[(String, String)]) -> String {
    let name = |iri: &Iri| -> String {
        prefixes
            .iter()
            .filter(|(_, ns)| {
                iri.as_str()
                    .strip_prefix(ns.as_str())
                    .is_some_and(|l| !l.is_empty() && l.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-'))
            })
            .max_by_key(|(_, ns)| ns.len())
            .map(|(p, ns)| format!("{p}:{}", &iri.as_str()[ns.len()..]))
            .unwrap_or_else(|| format!("<{iri}>"))
    };
    let mut out = String::new();
    for (p, ns) in prefixes {
        out.push_str(&format!("prefix {p}: <{ns}>\n"));
    }
    for shape in &suite.shapes {
        out.push_str(&format!("\nshape {}\n", name(&shape.target_class)));
        for c in &shape.constraints {
            out.push_str(&format!("  prop {} min={}", name(&c.path), c.min_count));
            match c.max_count {
                Some(m) => out.push_str(&format!(" max={m}")),
                None => out.push_str(" max=*"),
            }
            match &c.object {
                Some(ObjectConstraint::Datatype(dt)) => {
                    out.push_str(&format!(" datatype=xsd:{}", dt.local_name()))
                }
                Some(ObjectConstraint::Class(cls)) => out.push_str(&format!(" class={}", name(cls))),
                None => {}
            }
            out.push('\n');
        }
        for g in &shape.exclusive_groups {
            let bounds = if g.min_total == g.max_total {
                format!("exactly={}", g.min_total)
            } else {
                format!("min={} max={}", g.min_total, g.max_total)
            };
            let paths: Vec<_> = g.paths.iter().map(&name).collect();
            out.push_str(&format!("  group {bounds} {{{}}}\n", paths.join(", ")));
        }
    }
    if !suite.split_membership.is_empty() {
        out.push('\n');
    }
    for p in &suite.split_membership {
        out.push_str(&format!("split-membership {}\n", name(p)));
    }
    out
}
