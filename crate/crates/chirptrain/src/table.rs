//! Comma-separated table output with fixed 17-significant-digit floats.
//!
//! All result files share this writer so repeated runs of one configuration
//! are byte-identical.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::digitizer::PulseTrain;
use crate::dynamics::Trajectory;
use crate::error::Result;

/// Render a float with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write a header row plus data rows of already-rendered cells.
pub fn write_csv<P: AsRef<Path>>(path: P, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        writeln!(w, "{}", row.join(","))?;
    }
    w.flush()?;
    Ok(())
}

/// Trajectory table: time, populations of every level, then Re/Im amplitude
/// pairs per level.
pub fn write_trajectory_csv<P: AsRef<Path>>(path: P, traj: &Trajectory) -> Result<()> {
    let levels = traj.num_levels();
    let mut header = vec!["time".to_string()];
    for j in 0..levels {
        header.push(format!("p{j}"));
    }
    for j in 0..levels {
        header.push(format!("re_c{j}"));
        header.push(format!("im_c{j}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows: Vec<Vec<String>> = traj
        .times()
        .iter()
        .zip(traj.states())
        .map(|(&t, state)| {
            let mut row = Vec::with_capacity(1 + 3 * levels);
            row.push(fmt_float(t));
            for c in state {
                row.push(fmt_float(c.norm_sqr()));
            }
            for c in state {
                row.push(fmt_float(c.re));
                row.push(fmt_float(c.im));
            }
            row
        })
        .collect();
    write_csv(path, &header_refs, &rows)
}

/// Compiled-train table: one row per subpulse.
pub fn write_train_csv<P: AsRef<Path>>(path: P, train: &PulseTrain) -> Result<()> {
    let header = [
        "index",
        "peak_time",
        "peak_rabi",
        "detuning",
        "area",
        "free_phase",
    ];
    let rows: Vec<Vec<String>> = train
        .subpulses()
        .iter()
        .zip(train.integrals())
        .enumerate()
        .map(|(k, (sp, si))| {
            vec![
                k.to_string(),
                fmt_float(sp.peak_time),
                fmt_float(sp.peak_rabi),
                fmt_float(sp.detuning),
                fmt_float(si.area),
                fmt_float(si.free_phase),
            ]
        })
        .collect();
    write_csv(path, &header, &rows)
}
