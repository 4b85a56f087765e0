//! Core of the sonowork sonification workbench.
//!
//! The crate is split along the workbench's processing stages:
//!
//! * [`ingest`] turns delimited text into numeric [`Table`]s, [`Series`] and [`EventList`]s.
//! * [`transform`] applies an ordered [`TransformSpec`] of pure math operations to a series.
//! * [`synth`] maps normalized values to pitch, renders notes and event pings, and encodes
//!   WAV audio and SVG plots.
//! * [`training`] generates stimulus blocks and runs the scored present/respond/feedback
//!   session machine.
//! * [`workbench`] wires the stages together the same way for every front end.
//!
//! Everything here is pure and deterministic: equal inputs produce byte-identical output.

pub mod ingest;
pub mod serde_nan;
pub mod synth;
pub mod training;
pub mod transform;
pub mod workbench;

pub use ingest::{parse_events, parse_table, select_series, IngestError, ParseOptions, Series, Table};
pub use synth::{AudioBuffer, EventList, SonifyConfig, SynthError};
pub use transform::{apply_pipeline, PipelineError, TransformError, TransformSpec, TransformStep};
