//! Graph-to-MEDS inversion and table-level fidelity comparison.
//!
//! The graph does not record shard boundaries or row order, so both sides
//! are compared in a canonical form: one event shard sorted by
//! (subject_id, time with absent first, code, numeric_value, text_value), the
//! code table closed over every referenced code, and every other table
//! sorted. Description URIs are compared as a sorted set because they all
//! attach to the first distribution node.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::mapping::MappingContext;
use crate::meds::{
    CodeRecord, DatasetMetadataRecord, EventRecord, EventShard, LabelRecord, LabelValue,
    MedsDataset, SplitAssignment, Timestamp,
};
use crate::rdf::{format_xsd_double, parse_xsd_double, Datatype, Graph, Iri, Term};
use crate::shapes::{builtin_meds_suite, validate, ValidationReport};

/// Shard name used for canonical and reconstructed datasets.
pub const CANONICAL_SHARD: &str = "events.parquet";

#[derive(Debug, thiserror::Error)]
pub enum InvertError {
    #[error("graph does not conform to the MEDS-OWL shapes ({} violations)", .0.violations.len())]
    NonConformingGraph(Box<ValidationReport>),
    #[error("expected exactly one meds:DatasetMetadata node, found {0}")]
    AmbiguousMetadata(usize),
    #[error("<{node}>: {message}")]
    Malformed { node: Iri, message: String },
}

struct Reader<'a> {
    graph: &'a Graph,
    ctx: &'a MappingContext,
}

impl<'a> Reader<'a> {
    fn malformed(&self, node: &Iri, message: impl Into<String>) -> InvertError {
        InvertError::Malformed {
            node: node.clone(),
            message: message.into(),
        }
    }

    fn instances(&self, class: &Iri) -> Vec<&'a Iri> {
        self.graph
            .subjects(&self.ctx.vocab.rdf_type, &Term::Iri(class.clone()))
            .collect()
    }

    fn one(&self, node: &Iri, pred: &Iri) -> Option<&'a Term> {
        self.graph.objects(node, pred).next()
    }

    fn literal(&self, node: &Iri, pred: &Iri) -> Option<&'a str> {
        self.one(node, pred).and_then(Term::as_literal).map(|l| l.lexical())
    }

    fn required_literal(&self, node: &Iri, pred: &Iri) -> Result<&'a str, InvertError> {
        self.literal(node, pred)
            .ok_or_else(|| self.malformed(node, format!("missing <{pred}>")))
    }

    fn timestamp(&self, node: &Iri, pred: &Iri) -> Result<Option<Timestamp>, InvertError> {
        self.literal(node, pred)
            .map(|s| Timestamp::parse(s).map_err(|e| self.malformed(node, e.to_string())))
            .transpose()
    }

    fn double(&self, node: &Iri, lexical: &str) -> Result<f64, InvertError> {
        parse_xsd_double(lexical).ok_or_else(|| self.malformed(node, format!("bad xsd:double `{lexical}`")))
    }

    fn iri_object(&self, node: &Iri, pred: &Iri) -> Option<&'a Iri> {
        self.one(node, pred).and_then(Term::as_iri)
    }

    fn subject_id(&self, node: &Iri, via: &Iri) -> Result<String, InvertError> {
        let s = self
            .iri_object(node, via)
            .ok_or_else(|| self.malformed(node, format!("missing <{via}>")))?;
        Ok(self.required_literal(s, &self.ctx.vocab.subject_id)?.to_string())
    }
}

/// Rebuild MEDS tables from a graph produced by [`crate::mapping::convert`].
/// The graph is validated against the built-in suite first.
pub fn invert(graph: &Graph, ctx: &MappingContext) -> Result<MedsDataset, InvertError> {
    let r = Reader { graph, ctx };
    let v = &ctx.vocab;
    let datasets = r.instances(&v.dataset_metadata);
    if datasets.len() != 1 {
        return Err(InvertError::AmbiguousMetadata(datasets.len()));
    }
    let report = validate(graph, &builtin_meds_suite(v));
    if !report.conforms {
        return Err(InvertError::NonConformingGraph(Box::new(report)));
    }
    let metadata = invert_metadata(&r, datasets[0])?;

    let mut events = Vec::new();
    for e in r.instances(&v.event) {
        events.push(EventRecord {
            subject_id: r.subject_id(e, &v.has_subject)?,
            code: r.required_literal(e, &v.code_string)?.to_string(),
            time: r.timestamp(e, &v.time)?,
            numeric_value: r.literal(e, &v.numeric_value).map(|s| r.double(e, s)).transpose()?,
            text_value: r.literal(e, &v.text_value).map(str::to_string),
        });
    }

    let mut codes = Vec::new();
    for c in r.instances(&v.code) {
        let mut parent_codes = Vec::new();
        for p in graph.objects(c, &v.parent_code) {
            let p = p.as_iri().ok_or_else(|| r.malformed(c, "literal parent code"))?;
            parent_codes.push(r.required_literal(p, &v.code_string)?.to_string());
        }
        codes.push(CodeRecord {
            code: r.required_literal(c, &v.code_string)?.to_string(),
            description: r.literal(c, &v.code_description).map(str::to_string),
            parent_codes,
        });
    }

    let mut splits = Vec::new();
    for t in graph.triples_with_predicate(&v.assigned_split) {
        let set = t.object.as_iri().ok_or_else(|| r.malformed(t.subject, "literal split"))?;
        let split = ctx
            .split_name_of(set)
            .ok_or_else(|| r.malformed(set, "split IRI outside this dataset"))?;
        splits.push(SplitAssignment {
            subject_id: r.required_literal(t.subject, &v.subject_id)?.to_string(),
            split,
        });
    }

    let mut labels = Vec::new();
    for l in r.instances(&v.subject_label) {
        let prediction_time = r
            .timestamp(l, &v.prediction_time)?
            .ok_or_else(|| r.malformed(l, "missing prediction time"))?;
        let value = if let Some(b) = r.literal(l, &v.boolean_value) {
            LabelValue::Boolean(matches!(b, "true" | "1"))
        } else if let Some(i) = r.literal(l, &v.integer_value) {
            LabelValue::Integer(i.parse().map_err(|_| r.malformed(l, format!("bad integer `{i}`")))?)
        } else if let Some(f) = r.literal(l, &v.float_value) {
            LabelValue::Float(r.double(l, f)?)
        } else {
            LabelValue::Categorical(r.required_literal(l, &v.categorical_value)?.to_string())
        };
        labels.push(LabelRecord::new(r.subject_id(l, &v.has_subject)?, prediction_time, value));
    }

    Ok(canonicalize(&MedsDataset {
        metadata,
        shards: vec![EventShard {
            name: CANONICAL_SHARD.into(),
            events,
        }],
        codes,
        splits,
        labels,
    }))
}

fn invert_metadata(r: &Reader<'_>, ds: &Iri) -> Result<DatasetMetadataRecord, InvertError> {
    let v = &r.ctx.vocab;
    let created_at = r
        .timestamp(ds, &v.dct_created)?
        .ok_or_else(|| r.malformed(ds, "missing dct:created"))?;
    let mut m = DatasetMetadataRecord::new(
        r.required_literal(ds, &v.dct_title)?,
        r.required_literal(ds, &v.meds_version)?,
        created_at,
    );
    m.dataset_version = r.literal(ds, &v.dct_has_version).map(str::to_string);
    m.license = r
        .iri_object(ds, &v.dct_license)
        .map(|li| r.ctx.license_of(li).unwrap_or_else(|| li.as_str().to_string()));

    let mut dists: Vec<&Iri> = r
        .graph
        .objects(ds, &v.dcat_distribution)
        .filter_map(Term::as_iri)
        .collect();
    dists.sort_by_key(|d| (r.ctx.distribution_ordinal_of(d), d.as_str()));
    for d in dists {
        if let Some(url) = r.iri_object(d, &v.dcat_download_url) {
            m.location_uris.push(url.as_str().to_string());
        }
        m.description_uris.extend(
            r.graph
                .objects(d, &v.dcat_access_url)
                .filter_map(Term::as_iri)
                .map(|u| u.as_str().to_string()),
        );
    }
    if let Some(etl) = r.iri_object(ds, &v.prov_was_generated_by) {
        m.etl_name = r.literal(etl, &v.rdfs_label).map(str::to_string);
        m.etl_version = r.literal(etl, &v.dct_has_version).map(str::to_string);
    }
    Ok(m)
}

fn cmp_opt_f64(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (None, None) => Ordering::Equal,
        (None, Some(_)) => Ordering::Less,
        (Some(_), None) => Ordering::Greater,
        (Some(x), Some(y)) => x.total_cmp(&y),
    }
}

/// Canonical event order: subject, time (absent first), code, numeric, text.
pub fn cmp_events(a: &EventRecord, b: &EventRecord) -> Ordering {
    a.subject_id
        .cmp(&b.subject_id)
        .then_with(|| a.time.cmp(&b.time))
        .then_with(|| a.code.cmp(&b.code))
        .then_with(|| cmp_opt_f64(a.numeric_value, b.numeric_value))
        .then_with(|| a.text_value.cmp(&b.text_value))
}

fn label_value_key(l: &LabelRecord) -> String {
    l.values()
        .iter()
        .map(|v| match v {
            LabelValue::Boolean(b) => format!("b:{b}"),
            LabelValue::Integer(i) => format!("i:{i}"),
            LabelValue::Float(f) => format!("f:{}", format_xsd_double(*f)),
            LabelValue::Categorical(c) => format!("c:{c}"),
        })
        .collect::<Vec<_>>()
        .join("|")
}

/// The normal form both sides of a fidelity check are reduced to.
pub fn canonicalize(ds: &MedsDataset) -> MedsDataset {
    let mut events: Vec<EventRecord> = ds.events().map(|(_, _, e)| e.clone()).collect();
    events.sort_by(cmp_events);

    let mut codes: BTreeMap<String, CodeRecord> = BTreeMap::new();
    for c in &ds.codes {
        let entry = codes.entry(c.code.clone()).or_insert_with(|| CodeRecord::new(c.code.clone()));
        if entry.description.is_none() {
            entry.description = c.description.clone();
        }
        entry.parent_codes.extend(c.parent_codes.iter().cloned());
    }
    let referenced: Vec<String> = ds
        .events()
        .map(|(_, _, e)| e.code.clone())
        .chain(ds.codes.iter().flat_map(|c| c.parent_codes.iter().cloned()))
        .collect();
    for code in referenced {
        codes.entry(code.clone()).or_insert_with(|| CodeRecord::new(code));
    }
    let codes = codes
        .into_values()
        .map(|mut c| {
            let parents: BTreeSet<String> = c.parent_codes.drain(..).collect();
            c.parent_codes = parents.into_iter().collect();
            c
        })
        .collect();

    let splits: BTreeSet<SplitAssignment> = ds.splits.iter().cloned().collect();

    let mut labels = ds.labels.clone();
    labels.sort_by(|a, b| {
        a.subject_id
            .cmp(&b.subject_id)
            .then_with(|| a.prediction_time.cmp(&b.prediction_time))
            .then_with(|| label_value_key(a).cmp(&label_value_key(b)))
    });

    let mut metadata = ds.metadata.clone();
    let desc: BTreeSet<String> = metadata.description_uris.drain(..).collect();
    metadata.description_uris = desc.into_iter().collect();

    MedsDataset {
        metadata,
        shards: vec![EventShard {
            name: CANONICAL_SHARD.into(),
            events,
        }],
        codes,
        splits: splits.into_iter().collect(),
        labels,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Table {
    Events,
    Codes,
    Metadata,
    Splits,
    Labels,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FieldDiff {
    pub table: Table,
    pub key: String,
    pub field: String,
    pub expected: Option<String>,
    pub actual: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FidelityReport {
    pub events_equal: bool,
    pub codes_equal: bool,
    pub metadata_equal: bool,
    pub splits_equal: bool,
    pub labels_equal: bool,
    pub diffs: Vec<FieldDiff>,
}

impl FidelityReport {
    pub fn is_exact(&self) -> bool {
        self.diffs.is_empty()
    }
}

struct Differ {
    diffs: Vec<FieldDiff>,
}

impl Differ {
    fn field(&mut self, table: Table, key: &str, field: &str, expected: Option<String>, actual: Option<String>) {
        if expected != actual {
            self.diffs.push(FieldDiff {
                table,
                key: key.to_string(),
                field: field.to_string(),
                expected,
                actual,
            });
        }
    }

    /// Align two key-sorted sequences on `key`, pairing rows positionally
    /// inside each key group and reporting unpaired rows as `row` diffs.
    fn aligned<T>(
        &mut self,
        table: Table,
        expected: &[T],
        actual: &[T],
        key: impl Fn(&T) -> String,
        fields: impl Fn(&mut Self, &str, &T, &T),
    ) {
        fn group<'t, T>(rows: &'t [T], key: &impl Fn(&T) -> String) -> BTreeMap<String, Vec<&'t T>> {
            let mut m: BTreeMap<String, Vec<&T>> = BTreeMap::new();
            for r in rows {
                m.entry(key(r)).or_default().push(r);
            }
            m
        }
        let (e, mut a) = (group(expected, &key), group(actual, &key));
        for (k, erows) in e {
            let arows = a.remove(&k).unwrap_or_default();
            for (i, er) in erows.iter().enumerate() {
                let row_key = format!("{k}#{i}");
                match arows.get(i) {
                    Some(ar) => fields(self, &row_key, er, ar),
                    None => self.field(table, &row_key, "row", Some("present".into()), None),
                }
            }
            for i in erows.len()..arows.len() {
                self.field(table, &format!("{k}#{i}"), "row", None, Some("present".into()));
            }
        }
        for (k, arows) in a {
            for i in 0..arows.len() {
                self.field(table, &format!("{k}#{i}"), "row", None, Some("present".into()));
            }
        }
    }
}

fn lex(v: Option<f64>) -> Option<String> {
    v.map(format_xsd_double)
}

/// Field-wise comparison after canonicalizing both datasets.
pub fn fidelity(original: &MedsDataset, reconstructed: &MedsDataset) -> FidelityReport {
    let (o, r) = (canonicalize(original), canonicalize(reconstructed));
    let mut d = Differ { diffs: Vec::new() };

    let (oe, re) = (&o.shards[0].events, &r.shards[0].events);
    d.aligned(
        Table::Events,
        oe,
        re,
        |e| format!("{}|{}|{}", e.subject_id, e.time.map(|t| t.to_string()).unwrap_or_default(), e.code),
        |d, k, a, b| {
            d.field(Table::Events, k, "numeric_value", lex(a.numeric_value), lex(b.numeric_value));
            d.field(Table::Events, k, "text_value", a.text_value.clone(), b.text_value.clone());
        },
    );
    let events_n = d.diffs.len();

    d.aligned(Table::Codes, &o.codes, &r.codes, |c| c.code.clone(), |d, k, a, b| {
        d.field(Table::Codes, k, "description", a.description.clone(), b.description.clone());
        d.field(Table::Codes, k, "parent_codes", Some(a.parent_codes.join(",")), Some(b.parent_codes.join(",")));
    });
    let codes_n = d.diffs.len();

    let (om, rm) = (&o.metadata, &r.metadata);
    let k = om.dataset_name.as_str();
    let join = |v: &Vec<String>| Some(v.join(" "));
    d.field(Table::Metadata, k, "dataset_name", Some(om.dataset_name.clone()), Some(rm.dataset_name.clone()));
    d.field(Table::Metadata, k, "dataset_version", om.dataset_version.clone(), rm.dataset_version.clone());
    d.field(Table::Metadata, k, "meds_version", Some(om.meds_version.clone()), Some(rm.meds_version.clone()));
    d.field(Table::Metadata, k, "created_at", Some(om.created_at.to_string()), Some(rm.created_at.to_string()));
    d.field(Table::Metadata, k, "license", om.license.clone(), rm.license.clone());
    d.field(Table::Metadata, k, "location_uri", join(&om.location_uris), join(&rm.location_uris));
    d.field(Table::Metadata, k, "description_uri", join(&om.description_uris), join(&rm.description_uris));
    d.field(Table::Metadata, k, "etl_name", om.etl_name.clone(), rm.etl_name.clone());
    d.field(Table::Metadata, k, "etl_version", om.etl_version.clone(), rm.etl_version.clone());
    let meta_n = d.diffs.len();

    d.aligned(
        Table::Splits,
        &o.splits,
        &r.splits,
        |s| format!("{}|{}", s.subject_id, s.split),
        |_, _, _, _| {},
    );
    let splits_n = d.diffs.len();

    d.aligned(
        Table::Labels,
        &o.labels,
        &r.labels,
        |l| format!("{}|{}", l.subject_id, l.prediction_time),
        |d, k, a, b| {
            d.field(Table::Labels, k, "value", Some(label_value_key(a)), Some(label_value_key(b)));
        },
    );

    FidelityReport {
        events_equal: events_n == 0,
        codes_equal: codes_n == events_n,
        metadata_equal: meta_n == codes_n,
        splits_equal: splits_n == meta_n,
        labels_equal: d.diffs.len() == splits_n,
        diffs: d.diffs,
    }
}

/// Whether `lexical` round-trips through the datatype's value space unchanged.
pub fn is_canonical_lexical(lexical: &str, dt: Datatype) -> bool {
    match dt {
        Datatype::Double => parse_xsd_double(lexical).is_some_and(|v| format_xsd_double(v) == lexical),
        Datatype::DateTime => Timestamp::parse(lexical).is_ok_and(|t| t.to_string() == lexical),
        _ => dt.accepts(lexical),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::convert;

    fn ts(s: &str) -> Timestamp {
        Timestamp::parse(s).unwrap()
    }

    fn fixture() -> MedsDataset {
        let mut ds = MedsDataset::new(DatasetMetadataRecord::new("fixture", "0.3.3", ts("2025-01-01")));
        ds.shards.push(EventShard {
            name: "0.parquet".into(),
            events: vec![
                EventRecord::new("2", "ATC:C08CA06").with_time(ts("2020-01-02")),
                EventRecord::new("1", "LAB:GLU").with_time(ts("2020-01-01")).with_numeric(5.4),
                EventRecord::new("1", "STATIC").with_text("female"),
            ],
        });
        ds.codes.push(CodeRecord::new("ATC:C08CA06").with_description("Nimodipine").with_parents(["ATC:C08CA"]));
        ds.splits.push(SplitAssignment::new("1", "train"));
        ds.labels.push(LabelRecord::new("1", ts("2020-01-05"), LabelValue::Categorical("rehabilitation".into())));
        ds
    }

    #[test]
    fn invert_convert_is_canonical_identity() {
        let ds = fixture();
        let ctx = MappingContext::for_dataset(&ds.metadata.dataset_name);
        let g = convert(&ds, &ctx).unwrap().graph;
        let back = invert(&g, &ctx).unwrap();
        assert_eq!(back, canonicalize(&ds));
        assert!(fidelity(&ds, &back).is_exact());
    }

    #[test]
    fn two_metadata_nodes_are_ambiguous() {
        let ds = fixture();
        let ctx = MappingContext::for_dataset("a");
        let mut g = convert(&ds, &ctx).unwrap().graph;
        let other = MappingContext::for_dataset("b");
        g.merge(&convert(&MedsDataset::new(ds.metadata.clone()), &other).unwrap().graph);
        assert!(matches!(invert(&g, &ctx), Err(InvertError::AmbiguousMetadata(2))));
    }

    #[test]
    fn non_conforming_graph_is_rejected() {
        let ds = fixture();
        let ctx = MappingContext::for_dataset("f");
        let mut g = convert(&ds, &ctx).unwrap().graph;
        let ev = ctx.event_iri("0.parquet", 0);
        let t = g.triples_with_subject(&ev).find(|t| t.predicate == &ctx.vocab.has_code).unwrap().to_owned();
        g.remove(&t);
        assert!(matches!(invert(&g, &ctx), Err(InvertError::NonConformingGraph(_))));
    }

    #[test]
    fn identical_datasets_have_no_diffs() {
        let r = fidelity(&fixture(), &fixture());
        assert!(r.events_equal && r.codes_equal && r.metadata_equal && r.splits_equal && r.labels_equal);
        assert!(r.diffs.is_empty());
    }

    #[test]
    fn missing_text_value_is_one_diff() {
        let ds = fixture();
        let mut lossy = ds.clone();
        lossy.shards[0].events[2].text_value = None;
        let r = fidelity(&ds, &lossy);
        assert_eq!(r.diffs.len(), 1, "{:?}", r.diffs);
        assert_eq!(r.diffs[0].table, Table::Events);
        assert_eq!(r.diffs[0].field, "text_value");
        assert_eq!(r.diffs[0].key, "1||STATIC#0");
        assert!(!r.events_equal && r.codes_equal && r.labels_equal);
    }

    #[test]
    fn extra_and_missing_rows() {
        let ds = fixture();
        let mut other = ds.clone();
        other.splits.push(SplitAssignment::new("2", "tuning"));
        other.labels.clear();
        let r = fidelity(&ds, &other);
        assert!(!r.splits_equal && !r.labels_equal && r.events_equal);
        assert_eq!(r.diffs.len(), 2);
    }

    #[test]
    fn canonical_code_table_is_closed() {
        let c = canonicalize(&fixture());
        let names: Vec<_> = c.codes.iter().map(|c| c.code.as_str()).collect();
        assert_eq!(names, vec!["ATC:C08CA", "ATC:C08CA06", "LAB:GLU", "STATIC"]);
    }
}
