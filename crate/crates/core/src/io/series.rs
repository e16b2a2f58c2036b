use std::fmt::Write as _;
use std::path::Path;

use super::write_file;
use crate::error::{Error, Result};
use crate::monitor::NormSample;

/// One JSON object per line, keys in [`NormSample::COLUMNS`] order.
pub fn series_ndjson(samples: &[NormSample]) -> String {
    let mut out = String::new();
    for s in samples {
        out.push_str(&serde_json::to_string(s).expect("plain struct"));
        out.push('\n');
    }
    out
}

/// Header plus one row per sample; floats use the shortest decimal that
/// parses back to the same value.
pub fn series_csv(samples: &[NormSample]) -> String {
    let mut out = NormSample::COLUMNS.join(",");
    out.push('\n');
    for s in samples {
        let row: Vec<String> = s.values().iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

pub fn read_ndjson(text: &str) -> Result<Vec<NormSample>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1))))
        .collect()
}

pub fn read_csv(text: &str) -> Result<Vec<NormSample>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("missing CSV header".into()))?;
    if header != NormSample::COLUMNS.join(",") {
        return Err(Error::Parse(format!("unexpected CSV header '{header}'")));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let values: Vec<f64> = line
                .split(',')
                .map(|v| v.parse::<f64>().map_err(|e| Error::Parse(format!("row {}: '{v}': {e}", i + 1))))
                .collect::<Result<_>>()?;
            let values: [f64; 12] = values
                .try_into()
                .map_err(|v: Vec<f64>| Error::Parse(format!("row {}: expected 12 columns, got {}", i + 1, v.len())))?;
            Ok(NormSample::from_values(values))
        })
        .collect()
}

/// Writes both formats.
pub fn write_series(samples: &[NormSample], ndjson: &Path, csv: &Path) -> Result<()> {
    write_file(ndjson, series_ndjson(samples).as_bytes())?;
    write_file(csv, series_csv(samples).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn awkward() -> NormSample {
        NormSample::from_values([
            0.1,
            1.0 / 3.0,
            0.0,
            1e-300,
            f64::MIN_POSITIVE,
            123456789.123456789,
            2.0f64.sqrt(),
            5e-324,
            1.7976931348623157e308,
            0.30000000000000004,
            7.0,
            std::f64::consts::PI,
        ])
    }

    #[test]
    fn empty_series() {
        assert_eq!(series_ndjson(&[]), "");
        assert_eq!(series_csv(&[]), format!("{}\n", NormSample::COLUMNS.join(",")));
        assert!(read_csv(&series_csv(&[])).unwrap().is_empty());
    }

    #[test]
    fn zero_sample_row() {
        let s = NormSample { t: 0.5, ..Default::default() };
        let csv = series_csv(&[s]);
        assert_eq!(csv.lines().nth(1).unwrap(), "0.5,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0,0.0");
        assert!(series_ndjson(&[s]).starts_with("{\"t\":0.5,\"l2_u\":0.0,"));
    }

    #[test]
    fn round_trips_are_exact() {
        let samples = vec![awkward(), NormSample::default(), awkward()];
        let back_csv = read_csv(&series_csv(&samples)).unwrap();
        let back_json = read_ndjson(&series_ndjson(&samples)).unwrap();
        for back in [back_csv, back_json] {
            for (a, b) in samples.iter().zip(&back) {
                let bits = |s: &NormSample| s.values().map(f64::to_bits);
                assert_eq!(bits(a), bits(b));
            }
        }
    }

    #[test]
    fn malformed_input() {
        assert!(read_csv("a,b\n").is_err());
        let header = NormSample::COLUMNS.join(",");
        assert!(read_csv(&format!("{header}\n1,2\n")).is_err());
        assert!(read_ndjson("{\"t\": 1}\n").is_err());
    }
}
