use std::path::Path;

use crate::{Error, Result};

/// Attenuation between programmed and on-chip modulation amplitude.
#[derive(Clone, Debug, PartialEq)]
pub struct TransferTable {
    /// (drive frequency in GHz, factor in (0, 1]), strictly increasing in frequency.
    rows: Vec<(f64, f64)>,
}

impl TransferTable {
    pub fn new(rows: Vec<(f64, f64)>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::config("transfer", "at least two rows required"));
        }
        for (i, &(f, t)) in rows.iter().enumerate() {
            if !f.is_finite() || !(t > 0.0 && t <= 1.0) {
                return Err(Error::config(
                    "transfer",
                    format!("row {}: factors must lie in (0, 1] (got {t} at {f} GHz)", i + 1),
                ));
            }
            if i > 0 && !(f > rows[i - 1].0) {
                return Err(Error::config(
                    "transfer",
                    format!("row {}: frequencies must be strictly increasing", i + 1),
                ));
            }
        }
        Ok(TransferTable { rows })
    }

    /// Two-column CSV (frequency GHz, factor); a non-numeric first row is a header, '#' lines are comments.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let body: String = text
            .lines()
            .filter(|l| !l.trim_start().starts_with('#') && !l.trim().is_empty())
            .map(|l| format!("{l}\n"))
            .collect();
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_reader(body.as_bytes());
        let mut rows = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::config("transfer", e.to_string()))?;
            if record.len() != 2 {
                return Err(Error::config(
                    "transfer",
                    format!("row {}: expected 2 columns, got {}", i + 1, record.len()),
                ));
            }
            match (record[0].parse::<f64>(), record[1].parse::<f64>()) {
                (Ok(f), Ok(t)) => rows.push((f, t)),
                _ if i == 0 => continue,
                _ => {
                    return Err(Error::config(
                        "transfer",
                        format!("row {}: non-numeric entry", i + 1),
                    ))
                }
            }
        }
        Self::new(rows)
    }

    pub fn rows(&self) -> &[(f64, f64)] {
        &self.rows
    }

    /// Linearly interpolated factor; frequencies outside the table are rejected.
    pub fn factor(&self, omega_p: f64) -> Result<f64> {
        let (lo, hi) = (self.rows[0].0, self.rows[self.rows.len() - 1].0);
        if !(omega_p >= lo && omega_p <= hi) {
            return Err(Error::config(
                "transfer",
                format!("{omega_p} GHz lies outside the table range [{lo}, {hi}] GHz"),
            ));
        }
        let k = self.rows.partition_point(|&(f, _)| f <= omega_p).clamp(1, self.rows.len() - 1);
        let (f0, t0) = self.rows[k - 1];
        let (f1, t1) = self.rows[k];
        Ok(t0 + (t1 - t0) * (omega_p - f0) / (f1 - f0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_and_rejects_extrapolation() {
        let t = TransferTable::new(vec![(0.1, 1.0), (0.3, 0.6), (0.5, 0.5)]).unwrap();
        assert!((t.factor(0.2).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(t.factor(0.5).unwrap(), 0.5);
        assert_eq!(t.factor(0.1).unwrap(), 1.0);
        assert!(t.factor(0.51).unwrap_err().is_config());
    }

    #[test]
    fn invariants() {
        assert!(TransferTable::new(vec![(0.1, 1.0), (0.1, 0.9)]).is_err());
        assert!(TransferTable::new(vec![(0.1, 1.0), (0.2, 0.0)]).is_err());
        assert!(TransferTable::new(vec![(0.1, 1.2), (0.2, 0.9)]).is_err());
    }

    #[test]
    fn csv_with_header_and_comments() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        std::fs::write(&path, "# synthetic\nomega_p,factor\n0.05, 1.0\n0.4,0.7\n").unwrap();
        let t = TransferTable::from_csv(&path).unwrap();
        assert_eq!(t.rows(), &[(0.05, 1.0), (0.4, 0.7)]);
    }
}
