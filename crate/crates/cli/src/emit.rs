//! Deterministic CSV and JSON writers.

use crate::scenario::{BellReport, FlatReport, OutputFormat, SweepCell};
use crate::CliError;
use photon_wigner::format_sig17;
use photon_wigner::wigner::WignerResult;
use serde::Serialize;
use std::io::Write;
use std::path::Path;

pub const PROFILE_HEADER: [&str; 10] =
    ["xi", "r", "theta", "phi", "n1", "n2", "n3", "psi_tilde", "psi_cumulative", "null_residual"];

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

fn write_rows<W: Write>(out: W, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<(), CliError> {
    let mut w = csv_writer(out);
    w.write_record(header).map_err(CliError::csv)?;
    for row in rows {
        w.write_record(&row).map_err(CliError::csv)?;
    }
    w.flush().map_err(CliError::write)
}

fn write_json<W: Write, T: Serialize>(mut out: W, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| CliError::write(e.into()))?;
    out.write_all(b"\n").map_err(CliError::write)
}

pub fn write_profile<W: Write>(result: &WignerResult, format: OutputFormat, out: W) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => write_json(out, result),
        OutputFormat::Csv => write_rows(
            out,
            &PROFILE_HEADER,
            result.samples.iter().map(|s| {
                [s.xi, s.r, s.theta, s.phi, s.n_local[0], s.n_local[1], s.n_local[2], s.psi_tilde, s.psi_cumulative, s.null_residual]
                    .iter()
                    .map(|&v| format_sig17(v))
                    .collect()
            }),
        ),
    }
}

pub fn write_sweep<W: Write>(cells: &[SweepCell], format: OutputFormat, out: W) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => write_json(out, &cells),
        OutputFormat::Csv => write_rows(
            out,
            &["b_ph", "l_obs", "psi_total", "psi_tilde_start", "max_abs_psi_tilde", "samples"],
            cells.iter().map(|c| {
                let mut row: Vec<String> = [c.b_ph, c.l_obs, c.psi_total, c.psi_tilde_start, c.max_abs_psi_tilde]
                    .iter()
                    .map(|&v| format_sig17(v))
                    .collect();
                row.push(c.samples.to_string());
                row
            }),
        ),
    }
}

pub fn write_flat<W: Write>(report: &FlatReport, format: OutputFormat, out: W) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => write_json(out, report),
        OutputFormat::Csv => {
            let case = serde_json::to_value(report.case).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
            let d = report.boost_direction;
            let k = report.k_hat;
            let mut row = vec![case];
            row.extend([d[0], d[1], d[2], report.rapidity, k[0], k[1], k[2], report.psi, report.aberration].map(format_sig17));
            write_rows(
                out,
                &["case", "boost_x", "boost_y", "boost_z", "rapidity", "k_x", "k_y", "k_z", "psi", "aberration"],
                std::iter::once(row),
            )
        }
    }
}

pub fn write_bell<W: Write>(report: &BellReport, format: OutputFormat, out: W) -> Result<(), CliError> {
    match format {
        OutputFormat::Json => write_json(out, report),
        OutputFormat::Csv => {
            let mut row = vec![report.lambda1.to_string(), report.lambda2.to_string(), report.sign.to_string()];
            row.extend(
                [report.psi1, report.psi2, report.relative_phase_re, report.relative_phase_im, report.phase_deviation]
                    .map(format_sig17),
            );
            write_rows(
                out,
                &["lambda1", "lambda2", "sign", "psi1", "psi2", "relative_phase_re", "relative_phase_im", "phase_deviation"],
                std::iter::once(row),
            )
        }
    }
}

/// Writes to `path`, or to stdout when no path is given.
pub fn to_destination(
    path: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> Result<(), CliError>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let file = std::fs::File::create(p).map_err(|e| CliError::io(p, e))?;
            let mut buf = std::io::BufWriter::new(file);
            write(&mut buf).and_then(|_| buf.flush().map_err(CliError::write)).map_err(|e| e.at(p))
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)
        }
    }
}

/// Writes a profile to a file.
pub fn emit_profile(result: &WignerResult, format: OutputFormat, path: &Path) -> Result<(), CliError> {
    to_destination(Some(path), |w| write_profile(result, format, w))
}
