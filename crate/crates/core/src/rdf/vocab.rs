//! IRI constants for MEDS-OWL and the imported W3C vocabularies.
//!
//! The MEDS-OWL namespace is configurable; everything else is fixed.

use super::term::{Iri, TermError, XSD_NS};

pub const RDF_NS: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
pub const RDFS_NS: &str = "http://www.w3.org/2000/01/rdf-schema#";
pub const DCT_NS: &str = "http://purl.org/dc/terms/";
pub const DCAT_NS: &str = "http://www.w3.org/ns/dcat#";
pub const PROV_NS: &str = "http://www.w3.org/ns/prov#";

/// Placeholder namespace for MEDS-OWL terms. Override it with
/// [`Vocabulary::with_meds_namespace`] to match a published ontology IRI.
pub const DEFAULT_MEDS_NS: &str = "https://example.org/meds-owl#";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    pub meds_ns: String,

    // meds classes
    pub subject: Iri,
    pub event: Iri,
    pub code: Iri,
    pub dataset_metadata: Iri,
    pub subject_split: Iri,
    pub subject_label: Iri,
    pub value_modality: Iri,

    // meds object properties
    pub has_subject: Iri,
    pub has_code: Iri,
    pub assigned_split: Iri,
    pub parent_code: Iri,

    // meds datatype properties
    pub subject_id: Iri,
    pub time: Iri,
    pub code_string: Iri,
    pub code_description: Iri,
    pub numeric_value: Iri,
    pub text_value: Iri,
    pub meds_version: Iri,
    pub prediction_time: Iri,
    pub boolean_value: Iri,
    pub integer_value: Iri,
    pub float_value: Iri,
    pub categorical_value: Iri,

    pub dct_title: Iri,
    pub dct_has_version: Iri,
    pub dct_created: Iri,
    pub dct_license: Iri,
    pub dct_license_document: Iri,

    pub dcat_distribution: Iri,
    pub dcat_download_url: Iri,
    pub dcat_access_url: Iri,

    pub prov_activity: Iri,
    pub prov_was_generated_by: Iri,
    pub prov_was_derived_from: Iri,

    pub rdfs_label: Iri,
    pub rdf_type: Iri,
}

fn term(ns: &str, local: &str) -> Iri {
    Iri::new(format!("{ns}{local}")).expect("vocabulary IRIs are absolute")
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::with_meds_namespace(DEFAULT_MEDS_NS).expect("default namespace is valid")
    }
}

impl Vocabulary {
    pub fn with_meds_namespace(ns: &str) -> Result<Self, TermError> {
        // Validate once so the per-term constructors cannot fail.
        Iri::new(ns)?;
        let m = |local| term(ns, local);
        Ok(Vocabulary {
            meds_ns: ns.to_string(),
            subject: m("Subject"),
            event: m("Event"),
            code: m("Code"),
            dataset_metadata: m("DatasetMetadata"),
            subject_split: m("SubjectSplit"),
            subject_label: m("SubjectLabel"),
            value_modality: m("ValueModality"),
            has_subject: m("hasSubject"),
            has_code: m("hasCode"),
            assigned_split: m("assignedSplit"),
            parent_code: m("parentCode"),
            subject_id: m("subjectId"),
            time: m("time"),
            code_string: m("codeString"),
            code_description: m("codeDescription"),
            numeric_value: m("numericValue"),
            text_value: m("textValue"),
            meds_version: m("medsVersion"),
            prediction_time: m("predictionTime"),
            boolean_value: m("booleanValue"),
            integer_value: m("integerValue"),
            float_value: m("floatValue"),
            categorical_value: m("categoricalValue"),
            dct_title: term(DCT_NS, "title"),
            dct_has_version: term(DCT_NS, "hasVersion"),
            dct_created: term(DCT_NS, "created"),
            dct_license: term(DCT_NS, "license"),
            dct_license_document: term(DCT_NS, "LicenseDocument"),
            dcat_distribution: term(DCAT_NS, "distribution"),
            dcat_download_url: term(DCAT_NS, "downloadURL"),
            dcat_access_url: term(DCAT_NS, "accessURL"),
            prov_activity: term(PROV_NS, "Activity"),
            prov_was_generated_by: term(PROV_NS, "wasGeneratedBy"),
            prov_was_derived_from: term(PROV_NS, "wasDerivedFrom"),
            rdfs_label: term(RDFS_NS, "label"),
            rdf_type: term(RDF_NS, "type"),
        })
    }

    /// Every constant, in declaration order.
    pub fn all_terms(&self) -> Vec<&Iri> {
        vec![
            &self.subject,
            &self.event,
            &self.code,
            &self.dataset_metadata,
            &self.subject_split,
            &self.subject_label,
            &self.value_modality,
            &self.has_subject,
            &self.has_code,
            &self.assigned_split,
            &self.parent_code,
            &self.subject_id,
            &self.time,
            &self.code_string,
            &self.code_description,
            &self.numeric_value,
            &self.text_value,
            &self.meds_version,
            &self.prediction_time,
            &self.boolean_value,
            &self.integer_value,
            &self.float_value,
            &self.categorical_value,
            &self.dct_title,
            &self.dct_has_version,
            &self.dct_created,
            &self.dct_license,
            &self.dct_license_document,
            &self.dcat_distribution,
            &self.dcat_download_url,
            &self.dcat_access_url,
            &self.prov_activity,
            &self.prov_was_generated_by,
            &self.prov_was_derived_from,
            &self.rdfs_label,
            &self.rdf_type,
        ]
    }

    /// Prefix map used for Turtle output, in a stable order.
    pub fn prefixes(&self) -> Vec<(String, String)> {
        [
            ("meds", self.meds_ns.as_str()),
            ("rdf", RDF_NS),
            ("rdfs", RDFS_NS),
            ("xsd", XSD_NS),
            ("dct", DCT_NS),
            ("dcat", DCAT_NS),
            ("prov", PROV_NS),
        ]
        .into_iter()
        .map(|(p, ns)| (p.to_string(), ns.to_string()))
        .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn constants_are_distinct() {
        let v = Vocabulary::default();
        let all = v.all_terms();
        let unique: HashSet<_> = all.iter().collect();
        assert_eq!(all.len(), unique.len());
        assert_eq!(all.len(), 36);
    }

    #[test]
    fn meds_namespace_is_configurable() {
        let v = Vocabulary::with_meds_namespace("urn:meds:").unwrap();
        assert_eq!(v.event.as_str(), "urn:meds:Event");
        assert_eq!(v.rdf_type.as_str(), format!("{RDF_NS}type"));
        assert!(Vocabulary::with_meds_namespace("no-scheme#").is_err());
    }
}
