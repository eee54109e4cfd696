use crate::rdf::{Datatype, Iri, Vocabulary};

use super::model::{ExclusiveGroup, NodeShape, PropertyConstraint, ShapeSuite};

fn prop(path: &Iri, min: usize, max: Option<usize>) -> PropertyConstraint {
    PropertyConstraint::new(path.clone(), min, max).expect("builtin bounds are ordered")
}

fn shape(class: &Iri, constraints: Vec<PropertyConstraint>, groups: Vec<ExclusiveGroup>) -> NodeShape {
    NodeShape::new(class.clone(), constraints, groups).expect("builtin paths are unique")
}

/// Cardinality, datatype and referential constraints of MEDS-OWL.
pub fn builtin_meds_suite(v: &Vocabulary) -> ShapeSuite {
    use Datatype::*;
    let one = Some(1);

    let event = shape(
        &v.event,
        vec![
            prop(&v.has_subject, 1, one).class(v.subject.clone()),
            prop(&v.has_code, 1, one).class(v.code.clone()),
            prop(&v.code_string, 1, one).datatype(String),
            prop(&v.time, 0, one).datatype(DateTime),
            prop(&v.numeric_value, 0, one).datatype(Double),
            prop(&v.text_value, 0, one).datatype(String),
            prop(&v.prov_was_derived_from, 0, one).class(v.dataset_metadata.clone()),
        ],
        vec![],
    );
    let subject = shape(
        &v.subject,
        vec![
            prop(&v.subject_id, 1, one).datatype(String),
            prop(&v.assigned_split, 0, None).class(v.subject_split.clone()),
        ],
        vec![],
    );
    let code = shape(
        &v.code,
        vec![
            prop(&v.code_string, 1, one).datatype(String),
            prop(&v.code_description, 0, one).datatype(String),
            prop(&v.parent_code, 0, None).class(v.code.clone()),
        ],
        vec![],
    );
    let dataset = shape(
        &v.dataset_metadata,
        vec![
            prop(&v.dct_title, 1, one).datatype(String),
            prop(&v.meds_version, 1, one).datatype(String),
            prop(&v.dct_created, 1, one).datatype(DateTime),
            prop(&v.dct_has_version, 0, one),
            prop(&v.dct_license, 0, one).class(v.dct_license_document.clone()),
            prop(&v.prov_was_generated_by, 0, one).class(v.prov_activity.clone()),
        ],
        vec![],
    );
    let values = [
        (&v.boolean_value, Boolean),
        (&v.integer_value, Integer),
        (&v.float_value, Double),
        (&v.categorical_value, String),
    ];
    let mut label_props = vec![
        prop(&v.has_subject, 1, one).class(v.subject.clone()),
        prop(&v.prediction_time, 1, one).datatype(DateTime),
    ];
    label_props.extend(values.iter().map(|(p, dt)| prop(p, 0, one).datatype(*dt)));
    let label = shape(
        &v.subject_label,
        label_props,
        vec![ExclusiveGroup::exactly(values.iter().map(|(p, _)| (*p).clone()).collect(), 1)
            .expect("four value paths")],
    );

    ShapeSuite::new(
        vec![event, subject, code, dataset, label],
        vec![v.assigned_split.clone()],
    )
    .expect("one shape per class")
}
