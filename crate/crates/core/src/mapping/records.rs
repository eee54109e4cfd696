//! Per-record triple templates for events, subjects, codes, dataset
//! metadata, split assignments and labels.

use crate::meds::{
    CodeRecord, DatasetMetadataRecord, EventRecord, LabelRecord, LabelValue, LabelValueError,
    SplitAssignment,
};
use crate::rdf::{Iri, Literal, Triple};

use super::context::MappingContext;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MappingError {
    #[error("code `{0}` lists itself as a parent")]
    SelfParent(String),
    #[error("description_uri given but no location_uri to attach it to")]
    DanglingAccessUrl,
    #[error("`{0}` is not an absolute URI")]
    InvalidUri(String),
    #[error("etl_version given without etl_name")]
    EtlVersionWithoutName,
    #[error("{0}")]
    Label(#[from] LabelValueError),
}

pub fn map_event(e: &EventRecord, shard_name: &str, row_index: usize, ctx: &MappingContext) -> Vec<Triple> {
    let v = &ctx.vocab;
    let ev = ctx.event_iri(shard_name, row_index);
    let mut out = Vec::with_capacity(8);
    out.push(Triple::new(&ev, &v.rdf_type, &v.event));
    out.push(Triple::new(&ev, &v.has_subject, ctx.subject_iri(&e.subject_id)));
    out.push(Triple::new(&ev, &v.has_code, ctx.code_iri(&e.code)));
    out.push(Triple::new(&ev, &v.code_string, Literal::string(e.code.as_str())));
    if let Some(t) = e.time {
        out.push(Triple::new(&ev, &v.time, Literal::date_time(t)));
    }
    if let Some(x) = e.numeric_value {
        out.push(Triple::new(&ev, &v.numeric_value, Literal::double(x)));
    }
    if let Some(x) = &e.text_value {
        out.push(Triple::new(&ev, &v.text_value, Literal::string(x.as_str())));
    }
    if ctx.include_event_provenance {
        out.push(Triple::new(&ev, &v.prov_was_derived_from, ctx.dataset_iri()));
    }
    out
}

pub fn map_subject(subject_id: &str, ctx: &MappingContext) -> Vec<Triple> {
    let v = &ctx.vocab;
    let s = ctx.subject_iri(subject_id);
    vec![
        Triple::new(&s, &v.rdf_type, &v.subject),
        Triple::new(&s, &v.subject_id, Literal::string(subject_id)),
    ]
}

/// Type and code string for a code node; emitted for every code referenced
/// anywhere, including codes missing from the code table.
pub(crate) fn code_node(code: &str, ctx: &MappingContext) -> [Triple; 2] {
    let v = &ctx.vocab;
    let c = ctx.code_iri(code);
    [
        Triple::new(&c, &v.rdf_type, &v.code),
        Triple::new(&c, &v.code_string, Literal::string(code)),
    ]
}

pub fn map_code(c: &CodeRecord, ctx: &MappingContext) -> Result<Vec<Triple>, MappingError> {
    if c.parent_codes.iter().any(|p| p == &c.code) {
        return Err(MappingError::SelfParent(c.code.clone()));
    }
    Ok(map_code_unchecked(c, ctx))
}

pub(crate) fn map_code_unchecked(c: &CodeRecord, ctx: &MappingContext) -> Vec<Triple> {
    let v = &ctx.vocab;
    let node = ctx.code_iri(&c.code);
    let mut out = code_node(&c.code, ctx).to_vec();
    if let Some(d) = &c.description {
        out.push(Triple::new(&node, &v.code_description, Literal::string(d.as_str())));
    }
    for p in &c.parent_codes {
        let parent = ctx.code_iri(p);
        out.push(Triple::new(&parent, &v.rdf_type, &v.code));
        out.push(Triple::new(&node, &v.parent_code, parent));
    }
    out
}

fn uri(s: &str) -> Result<Iri, MappingError> {
    Iri::new(s).map_err(|_| MappingError::InvalidUri(s.to_string()))
}

pub fn map_dataset_metadata(
    m: &DatasetMetadataRecord,
    ctx: &MappingContext,
) -> Result<Vec<Triple>, MappingError> {
    if !m.description_uris.is_empty() && m.location_uris.is_empty() {
        return Err(MappingError::DanglingAccessUrl);
    }
    if m.etl_version.is_some() && m.etl_name.is_none() {
        return Err(MappingError::EtlVersionWithoutName);
    }
    let v = &ctx.vocab;
    let ds = ctx.dataset_iri();
    let mut out = vec![
        Triple::new(&ds, &v.rdf_type, &v.dataset_metadata),
        Triple::new(&ds, &v.dct_title, Literal::string(m.dataset_name.as_str())),
        Triple::new(&ds, &v.meds_version, Literal::string(m.meds_version.as_str())),
        Triple::new(&ds, &v.dct_created, Literal::date_time(m.created_at)),
    ];
    if let Some(ver) = &m.dataset_version {
        out.push(Triple::new(&ds, &v.dct_has_version, Literal::string(ver.as_str())));
    }
    if let Some(license) = &m.license {
        let li = ctx.license_iri(license);
        out.push(Triple::new(&li, &v.rdf_type, &v.dct_license_document));
        out.push(Triple::new(&ds, &v.dct_license, li));
    }
    for (i, loc) in m.location_uris.iter().enumerate() {
        let dist = ctx.distribution_iri(i);
        out.push(Triple::new(&ds, &v.dcat_distribution, &dist));
        out.push(Triple::new(&dist, &v.dcat_download_url, uri(loc)?));
    }
    // Access URLs hang off the first distribution.
    for desc in &m.description_uris {
        out.push(Triple::new(&ctx.distribution_iri(0), &v.dcat_access_url, uri(desc)?));
    }
    if let Some(name) = &m.etl_name {
        let etl = ctx.etl_iri();
        out.push(Triple::new(&etl, &v.rdf_type, &v.prov_activity));
        out.push(Triple::new(&etl, &v.rdfs_label, Literal::string(name.as_str())));
        out.push(Triple::new(&ds, &v.prov_was_generated_by, &etl));
        if let Some(ver) = &m.etl_version {
            out.push(Triple::new(&etl, &v.dct_has_version, Literal::string(ver.as_str())));
        }
    }
    Ok(out)
}

pub fn map_split(a: &SplitAssignment, ctx: &MappingContext) -> Vec<Triple> {
    let v = &ctx.vocab;
    let set = ctx.split_iri(&a.split);
    vec![
        Triple::new(&set, &v.rdf_type, &v.subject_split),
        Triple::new(&ctx.subject_iri(&a.subject_id), &v.assigned_split, set),
    ]
}

pub fn map_label(l: &LabelRecord, ordinal: usize, ctx: &MappingContext) -> Result<Vec<Triple>, MappingError> {
    l.value()?;
    Ok(map_label_lenient(l, ordinal, ctx))
}

/// Emits one value triple per populated value column, whether or not exactly
/// one is set. The validator's exclusive-group check catches the bad cases.
pub(crate) fn map_label_lenient(l: &LabelRecord, ordinal: usize, ctx: &MappingContext) -> Vec<Triple> {
    let v = &ctx.vocab;
    let node = ctx.label_iri(&l.subject_id, ordinal);
    let mut out = vec![
        Triple::new(&node, &v.rdf_type, &v.subject_label),
        Triple::new(&node, &v.has_subject, ctx.subject_iri(&l.subject_id)),
        Triple::new(&node, &v.prediction_time, Literal::date_time(l.prediction_time)),
    ];
    for value in l.values() {
        let (pred, lit) = match value {
            LabelValue::Boolean(b) => (&v.boolean_value, Literal::boolean(b)),
            LabelValue::Integer(i) => (&v.integer_value, Literal::integer(i)),
            LabelValue::Float(f) => (&v.float_value, Literal::double(f)),
            LabelValue::Categorical(c) => (&v.categorical_value, Literal::string(c)),
        };
        out.push(Triple::new(&node, pred, lit));
    }
    out
}
