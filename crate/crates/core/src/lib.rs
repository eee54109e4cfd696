pub mod cli;
pub mod mapping;
pub mod meds;
pub mod rdf;
pub mod roundtrip;
pub mod shapes;
pub mod stats;
pub mod synth;
