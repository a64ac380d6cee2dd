//! Writing 2-D projections of type vectors.

use std::io::Write;
use std::path::Path;

use typeforge_core::{ProjectionJob, TsneOutput};

use crate::error::{Error, Result};
use crate::io::create_writer;

/// Separator between several root labels of one row.
pub const LABEL_SEPARATOR: char = '|';

/// Tab-separated `type`, `label`, `x`, `y` rows in job order.
pub fn write_projection<W: Write>(job: &ProjectionJob, out: &TsneOutput, mut w: W) -> std::io::Result<()> {
    writeln!(w, "type\tlabel\tx\ty")?;
    let sep = LABEL_SEPARATOR.to_string();
    for ((t, labels), [x, y]) in job.types.iter().zip(&job.labels).zip(&out.coords) {
        writeln!(w, "{t}\t{}\t{x}\t{y}", labels.join(&sep))?;
    }
    w.flush()
}

pub fn save_projection(job: &ProjectionJob, out: &TsneOutput, path: &Path) -> Result<()> {
    let w = create_writer(path)?;
    write_projection(job, out, w).map_err(|e| Error::io(path, e))
}
