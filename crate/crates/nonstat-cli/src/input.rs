// SPDX-License-Identifier: MIT OR Apache-2.0

//! Observed-series CSV input.
//!
//! Two layouts, distinguished by the header line:
//!
//! * `time,value` — time in any calendar unit, strictly increasing;
//! * `index,value` — consecutive integers (any starting point).
//!
//! Blank lines are skipped; every other line must have exactly two
//! comma-separated numeric fields. Errors carry 1-based line numbers
//! (the header is line 1).
//!
//! The library works on a design grid in (0, 1], so the file's time axis
//! is mapped affinely onto it: with the convention that observation i of
//! n sits at i/n, the origin is one average spacing before the first
//! time stamp and the span runs from there to the last one. For equally
//! spaced times (and always for the index layout) this reproduces the
//! uniform grid i/n exactly.

use nonstat::{Error, Result};

/// A parsed series plus the affine map back to the file's time axis:
/// `time = origin + g * span` for a grid point `g`.
#[derive(Debug, Clone)]
pub struct SeriesInput {
    pub values: Vec<f64>,
    /// Design grid in (0, 1], strictly increasing, same length as values.
    pub grid: Vec<f64>,
    pub origin: f64,
    pub span: f64,
}

impl SeriesInput {
    /// Map a design-grid point back to the file's time units.
    pub fn time_at(&self, g: f64) -> f64 {
        self.origin + g * self.span
    }
}

enum Layout {
    Time,
    Index,
}

/// Parse the documented CSV layout into values plus a design grid.
pub fn parse_series_csv(text: &str) -> Result<SeriesInput> {
    let mut lines = text.lines().enumerate();
    // The header is the first non-empty line.
    let (header_line_no, header) = loop {
        match lines.next() {
            None => return Err(Error::data("empty input: expected a header line")),
            Some((idx, raw)) => {
                let line = raw.trim_start_matches('\u{feff}').trim();
                if line.is_empty() {
                    continue;
                }
                break (idx + 1, line.to_ascii_lowercase().replace(' ', ""));
            }
        }
    };
    let layout = match header.as_str() {
        "time,value" => Layout::Time,
        "index,value" => Layout::Index,
        other => {
            return Err(Error::data(format!(
                "line {header_line_no}: unrecognized header `{other}`; \
                 expected `time,value` or `index,value`"
            )))
        }
    };

    let mut times: Vec<f64> = Vec::new();
    let mut values: Vec<f64> = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (first, second) = match (fields.next(), fields.next(), fields.next()) {
            (Some(a), Some(b), None) => (a.trim(), b.trim()),
            _ => {
                return Err(Error::data(format!(
                    "line {line_no}: expected exactly two comma-separated fields, got `{line}`"
                )))
            }
        };
        let t: f64 = first.parse().map_err(|_| {
            Error::data(format!(
                "line {line_no}: cannot parse `{first}` as a number in column 1"
            ))
        })?;
        let v: f64 = second.parse().map_err(|_| {
            Error::data(format!(
                "line {line_no}: cannot parse `{second}` as a number in column 2"
            ))
        })?;
        if !t.is_finite() {
            return Err(Error::data(format!("line {line_no}: non-finite time `{first}`")));
        }
        if !v.is_finite() {
            return Err(Error::data(format!("line {line_no}: non-finite value `{second}`")));
        }
        match layout {
            Layout::Time => {
                if let Some(&prev) = times.last() {
                    if t <= prev {
                        return Err(Error::data(format!(
                            "line {line_no}: time must be strictly increasing; \
                             {t} follows {prev}"
                        )));
                    }
                }
            }
            Layout::Index => {
                if t.fract() != 0.0 {
                    return Err(Error::data(format!(
                        "line {line_no}: index must be an integer; got `{first}`"
                    )));
                }
                if let Some(&prev) = times.last() {
                    if t != prev + 1.0 {
                        return Err(Error::data(format!(
                            "line {line_no}: index jumps from {prev} to {t}; \
                             the index layout requires consecutive integers"
                        )));
                    }
                }
            }
        }
        times.push(t);
        values.push(v);
    }

    let n = values.len();
    if n < 2 {
        return Err(Error::data(format!(
            "need at least 2 observations to orient the time axis; got {n}"
        )));
    }

    // Affine map onto (0, 1]: origin sits one average spacing before the
    // first observation so that the first grid point is strictly positive
    // and the last lands exactly at 1.
    let spacing = (times[n - 1] - times[0]) / (n as f64 - 1.0);
    let origin = times[0] - spacing;
    let span = times[n - 1] - origin;
    let grid: Vec<f64> = times
        .iter()
        .enumerate()
        .map(|(i, &t)| if i == n - 1 { 1.0 } else { (t - origin) / span })
        .collect();
    if grid[0] <= 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::data(
            "time stamps are too close together to separate on the design grid \
             at double precision",
        ));
    }
    Ok(SeriesInput { values, grid, origin, span })
}
