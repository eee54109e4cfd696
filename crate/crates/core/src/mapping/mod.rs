//! Table-driven transformation from MEDS records to MEDS-OWL triples.

mod context;
mod convert;
mod records;

pub use context::{slugify, MappingContext, Strictness, DEFAULT_BASE_IRI};
pub use convert::{
    convert, convert_root, Conversion, ConvertError, GraphBuilder, RecordError, RecordLocation,
};
pub use records::{
    map_code, map_dataset_metadata, map_event, map_label, map_split, map_subject, MappingError,
};
