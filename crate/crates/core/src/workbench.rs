//! The shared table → series → audio/plot pipeline used by the CLI and the service.
//!
//! Both front ends go through these functions, so the same request yields
//! byte-identical WAV and SVG output whichever interface produced it.

use thiserror::Error;

use crate::ingest::{select_series, IngestError, Series, Table};
use crate::synth::{render_plot, sonify_series, write_wav, ConfigError, SonifyConfig, SynthError};
use crate::transform::{apply_pipeline, normalize, PipelineError, TransformSpec};

pub const PLOT_WIDTH: u32 = 800;
pub const PLOT_HEIGHT: u32 = 400;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkbenchError {
    #[error(transparent)]
    Select(#[from] IngestError),
    #[error(transparent)]
    Transform(#[from] PipelineError),
    #[error("invalid sound configuration: {0}")]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}

/// Selected series after the transform steps, without the final normalization.
pub fn transformed_series(
    table: &Table,
    x_col: Option<&str>,
    y_col: &str,
    spec: &TransformSpec,
) -> Result<Series, WorkbenchError> {
    let series = select_series(table, x_col, y_col)?;
    Ok(apply_pipeline(&series, spec)?)
}

/// Series ready for sonification: the transform steps followed by a normalize,
/// unless they already end with one. A failing final normalize is
/// reported as the step after the last one.
pub fn prepare_series(
    table: &Table,
    x_col: Option<&str>,
    y_col: &str,
    spec: &TransformSpec,
) -> Result<Series, WorkbenchError> {
    let series = transformed_series(table, x_col, y_col, spec)?;
    if spec.ends_with_normalize() {
        return Ok(series);
    }
    normalize(&series).map_err(|source| {
        WorkbenchError::Transform(PipelineError {
            step: spec.steps.len(),
            source,
        })
    })
}

/// The sonified series and its WAV encoding.
pub fn sonify_table(
    table: &Table,
    x_col: Option<&str>,
    y_col: &str,
    spec: &TransformSpec,
    config: &SonifyConfig,
) -> Result<(Series, Vec<u8>), WorkbenchError> {
    config.validate()?;
    let series = prepare_series(table, x_col, y_col, spec)?;
    let wav = write_wav(&sonify_series(&series, config)?);
    Ok((series, wav))
}

pub fn render_wav(
    table: &Table,
    x_col: Option<&str>,
    y_col: &str,
    spec: &TransformSpec,
    config: &SonifyConfig,
) -> Result<Vec<u8>, WorkbenchError> {
    sonify_table(table, x_col, y_col, spec, config).map(|(_, wav)| wav)
}

/// The plot shows the transformed values before the sonification normalize.
pub fn render_svg(
    table: &Table,
    x_col: Option<&str>,
    y_col: &str,
    spec: &TransformSpec,
) -> Result<Vec<u8>, WorkbenchError> {
    let series = transformed_series(table, x_col, y_col, spec)?;
    Ok(render_plot(&series, PLOT_WIDTH, PLOT_HEIGHT)?)
}
