//! A SHACL-core subset: node shapes with cardinality, datatype and
//! class-of-object constraints, exclusive value groups, and a split-membership
//! rule, evaluated under a closed-world reading of the graph.

mod builtin;
mod format;
mod model;
mod validate;

pub use builtin::builtin_meds_suite;
pub use format::{load_suite, parse_suite, write_suite, ShapeFileError};
pub use model::{
    ConstraintKind, ExclusiveGroup, NodeShape, ObjectConstraint, PropertyConstraint, ShapeError,
    ShapeSuite,
};
pub use validate::{validate, ValidationReport, Violation};
