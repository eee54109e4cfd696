use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::Path;

use rayon::prelude::*;

use crate::meds::{
    load_events_streaming, load_tables, CodeRecord, DatasetMetadataRecord, EventRecord,
    IngestError, LabelRecord, MedsDataset, SplitAssignment,
};
use crate::rdf::{Graph, Iri};

use super::context::{MappingContext, Strictness};
use super::records::{
    code_node, map_code, map_code_unchecked, map_dataset_metadata, map_event, map_label,
    map_label_lenient, map_split, map_subject, MappingError,
};

/// Events are mapped in parallel in windows of this many rows.
const EVENT_WINDOW: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecordLocation {
    Metadata,
    Event { shard: String, row: usize },
    Code { index: usize },
    Split { index: usize },
    Label { index: usize },
}

impl fmt::Display for RecordLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordLocation::Metadata => write!(f, "dataset metadata"),
            RecordLocation::Event { shard, row } => write!(f, "event {shard}#{row}"),
            RecordLocation::Code { index } => write!(f, "code row {index}"),
            RecordLocation::Split { index } => write!(f, "split row {index}"),
            RecordLocation::Label { index } => write!(f, "label row {index}"),
        }
    }
}

/// A record that could not be mapped cleanly, with the node it would describe.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{location}: {error}")]
pub struct RecordError {
    pub location: RecordLocation,
    pub focus: Iri,
    pub error: MappingError,
}

#[derive(Debug, thiserror::Error)]
pub enum ConvertError {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Record(#[from] RecordError),
}

/// A converted graph plus the record problems tolerated in collect mode.
#[derive(Debug)]
pub struct Conversion {
    pub graph: Graph,
    pub errors: Vec<RecordError>,
}

/// Incremental graph construction. Record order does not affect the result.
pub struct GraphBuilder<'a> {
    ctx: &'a MappingContext,
    graph: Graph,
    errors: Vec<RecordError>,
    seen_subjects: HashSet<String>,
    seen_codes: HashSet<String>,
    label_ordinals: HashMap<String, usize>,
    codes_added: usize,
    splits_added: usize,
    labels_added: usize,
}

impl<'a> GraphBuilder<'a> {
    pub fn new(ctx: &'a MappingContext, metadata: &DatasetMetadataRecord) -> Result<Self, RecordError> {
        let mut b = GraphBuilder {
            ctx,
            graph: Graph::new(),
            errors: Vec::new(),
            seen_subjects: HashSet::new(),
            seen_codes: HashSet::new(),
            label_ordinals: HashMap::new(),
            codes_added: 0,
            splits_added: 0,
            labels_added: 0,
        };
        match map_dataset_metadata(metadata, ctx) {
            Ok(triples) => b.graph.extend(triples),
            Err(error) => {
                b.fail(RecordLocation::Metadata, ctx.dataset_iri(), error)?;
                let triples = map_dataset_metadata(&sanitize_metadata(metadata), ctx)
                    .expect("sanitized metadata maps cleanly");
                b.graph.extend(triples);
            }
        }
        Ok(b)
    }

    fn fail(&mut self, location: RecordLocation, focus: Iri, error: MappingError) -> Result<(), RecordError> {
        let err = RecordError { location, focus, error };
        match self.ctx.strictness {
            Strictness::FailFast => Err(err),
            Strictness::Collect => {
                self.errors.push(err);
                Ok(())
            }
        }
    }

    fn ensure_subject(&mut self, id: &str) {
        if !self.seen_subjects.contains(id) {
            self.graph.extend(map_subject(id, self.ctx));
            self.seen_subjects.insert(id.to_string());
        }
    }

    fn ensure_code(&mut self, code: &str) {
        if !self.seen_codes.contains(code) {
            self.graph.extend(code_node(code, self.ctx));
            self.seen_codes.insert(code.to_string());
        }
    }

    pub fn add_code(&mut self, c: &CodeRecord) -> Result<(), RecordError> {
        let index = self.codes_added;
        self.codes_added += 1;
        let triples = match map_code(c, self.ctx) {
            Ok(t) => t,
            Err(error) => {
                self.fail(RecordLocation::Code { index }, self.ctx.code_iri(&c.code), error)?;
                map_code_unchecked(c, self.ctx)
            }
        };
        self.graph.extend(triples);
        self.ensure_code(&c.code);
        for p in &c.parent_codes {
            self.ensure_code(p);
        }
        Ok(())
    }

    pub fn add_split(&mut self, a: &SplitAssignment) {
        self.splits_added += 1;
        self.graph.extend(map_split(a, self.ctx));
        self.ensure_subject(&a.subject_id);
    }

    pub fn add_label(&mut self, l: &LabelRecord) -> Result<(), RecordError> {
        let index = self.labels_added;
        self.labels_added += 1;
        let ordinal = self.label_ordinals.entry(l.subject_id.clone()).or_default();
        let this = *ordinal;
        *ordinal += 1;
        let triples = match map_label(l, this, self.ctx) {
            Ok(t) => t,
            Err(error) => {
                self.fail(
                    RecordLocation::Label { index },
                    self.ctx.label_iri(&l.subject_id, this),
                    error,
                )?;
                map_label_lenient(l, this, self.ctx)
            }
        };
        self.graph.extend(triples);
        self.ensure_subject(&l.subject_id);
        Ok(())
    }

    pub fn add_event(&mut self, shard: &str, row: usize, e: &EventRecord) {
        self.graph.extend(map_event(e, shard, row, self.ctx));
        self.ensure_subject(&e.subject_id);
        self.ensure_code(&e.code);
    }

    /// Map a window of events in parallel, then insert in input order.
    pub fn add_events<S: AsRef<str> + Sync>(&mut self, events: &[(S, usize, &EventRecord)]) {
        let ctx = self.ctx;
        let mapped: Vec<_> = events
            .par_iter()
            .map(|(shard, row, e)| map_event(e, shard.as_ref(), *row, ctx))
            .collect();
        for triples in mapped {
            self.graph.extend(triples);
        }
        for (_, _, e) in events {
            self.ensure_subject(&e.subject_id);
            self.ensure_code(&e.code);
        }
    }

    pub fn finish(self) -> Conversion {
        Conversion {
            graph: self.graph,
            errors: self.errors,
        }
    }
}

/// Drop the parts of a metadata record that cannot be mapped.
fn sanitize_metadata(m: &DatasetMetadataRecord) -> DatasetMetadataRecord {
    let mut m = m.clone();
    let absolute = |u: &String| Iri::new(u.as_str()).is_ok();
    m.location_uris.retain(absolute);
    m.description_uris.retain(absolute);
    if m.location_uris.is_empty() {
        m.description_uris.clear();
    }
    if m.etl_name.is_none() {
        m.etl_version = None;
    }
    m
}

/// Map a whole in-memory dataset.
pub fn convert(ds: &MedsDataset, ctx: &MappingContext) -> Result<Conversion, RecordError> {
    let mut b = GraphBuilder::new(ctx, &ds.metadata)?;
    add_tables(&mut b, ds)?;
    let all: Vec<_> = ds.events().collect();
    for window in all.chunks(EVENT_WINDOW) {
        b.add_events(window);
    }
    Ok(b.finish())
}

fn add_tables(b: &mut GraphBuilder<'_>, ds: &MedsDataset) -> Result<(), RecordError> {
    for c in &ds.codes {
        b.add_code(c)?;
    }
    for s in &ds.splits {
        b.add_split(s);
    }
    for l in &ds.labels {
        b.add_label(l)?;
    }
    Ok(())
}

/// Map a MEDS root while streaming its event shards from disk.
pub fn convert_root(root: &Path, ctx: &MappingContext) -> Result<Conversion, ConvertError> {
    let tables = load_tables(root)?;
    let mut b = GraphBuilder::new(ctx, &tables.metadata)?;
    add_tables(&mut b, &tables)?;
    let mut window = Vec::with_capacity(EVENT_WINDOW);
    for item in load_events_streaming(root)? {
        window.push(item?);
        if window.len() == EVENT_WINDOW {
            flush(&mut b, &mut window);
        }
    }
    flush(&mut b, &mut window);
    Ok(b.finish())
}

fn flush(b: &mut GraphBuilder<'_>, window: &mut Vec<(String, usize, EventRecord)>) {
    let refs: Vec<_> = window.iter().map(|(s, r, e)| (s.as_str(), *r, e)).collect();
    b.add_events(&refs);
    window.clear();
}
