use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::experiments::{SummaryRow, SweepGrid};
use crate::{Error, Result};

/// Metadata key whose value is written as `# config|` lines.
pub(crate) const CONFIG_KEY: &str = "config";

/// `<dir>/<stem>.summary.csv` next to `path`.
pub fn summary_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.summary.csv"))
}

/// Write the grid as long-format CSV plus its summary table.
pub fn write_grid(grid: &SweepGrid, path: &Path) -> Result<()> {
    grid.check_shape()?;
    let mut head = String::new();
    for (k, v) in &grid.metadata {
        if k == CONFIG_KEY {
            continue;
        }
        writeln!(head, "# {k}={}", v.replace('\n', " ")).unwrap();
    }
    writeln!(head, "# shape={},{}", grid.x.len(), grid.y.len()).unwrap();
    if let Some(cfg) = grid.metadata.get(CONFIG_KEY) {
        for line in cfg.lines() {
            writeln!(head, "# config|{line}").unwrap();
        }
    }
    let mut body = csv::Writer::from_writer(head.into_bytes());
    let csv_err = |e: csv::Error| Error::Numeric(format!("CSV encoding failed: {e}"));
    body.write_record([&grid.x_name, &grid.y_name, &grid.z_name]).map_err(csv_err)?;
    for (i, x) in grid.x.iter().enumerate() {
        for (j, y) in grid.y.iter().enumerate() {
            body.write_record([x.to_string(), y.to_string(), grid.z[i][j].to_string()])
                .map_err(csv_err)?;
        }
    }
    let bytes = body.into_inner().map_err(|e| Error::Numeric(e.to_string()))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;

    let mut summary = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> =
        ["x", "value", "uncertainty", "reference", "flagged"].map(String::from).to_vec();
    header.extend(grid.summary_columns.iter().cloned());
    summary.write_record(&header).map_err(csv_err)?;
    for r in &grid.summary {
        let mut record = vec![
            r.x.to_string(),
            r.value.to_string(),
            r.uncertainty.to_string(),
            r.reference.map(|v| v.to_string()).unwrap_or_default(),
            r.flagged.to_string(),
        ];
        record.extend(r.extra.iter().map(f64::to_string));
        summary.write_record(&record).map_err(csv_err)?;
    }
    let spath = summary_path(path);
    let bytes = summary.into_inner().map_err(|e| Error::Numeric(e.to_string()))?;
    fs::write(&spath, bytes).map_err(|e| Error::io(&spath, e))
}

fn bad(path: &Path, what: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{}: {what}", path.display()))
}

fn number(path: &Path, s: &str) -> Result<f64> {
    s.parse().map_err(|_| bad(path, format!("not a number: {s:?}")))
}

/// Read a grid written by [`write_grid`], including its summary when present.
pub fn read_grid(path: &Path) -> Result<SweepGrid> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut grid = SweepGrid::default();
    let mut config = String::new();
    let mut shape = None;
    let mut body = String::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.strip_prefix(' ').unwrap_or(rest);
            if let Some(c) = rest.strip_prefix("config|") {
                config.push_str(c);
                config.push('\n');
            } else if let Some((k, v)) = rest.split_once('=') {
                if k == "shape" {
                    let (a, b) = v.split_once(',').ok_or_else(|| bad(path, "malformed shape"))?;
                    let dims: (usize, usize) = (
                        a.parse().map_err(|_| bad(path, "malformed shape"))?,
                        b.parse().map_err(|_| bad(path, "malformed shape"))?,
                    );
                    shape = Some(dims);
                } else {
                    grid.metadata.insert(k.into(), v.into());
                }
            }
        } else {
            body.push_str(line);
            body.push('\n');
        }
    }
    if !config.is_empty() {
        grid.metadata.insert(CONFIG_KEY.into(), config);
    }
    let (nx, ny) = shape.ok_or_else(|| bad(path, "missing shape line"))?;
    let mut reader = csv::Reader::from_reader(body.as_bytes());
    let headers = reader.headers().map_err(|e| bad(path, e))?.clone();
    if headers.len() != 3 {
        return Err(bad(path, "expected three columns"));
    }
    grid.x_name = headers[0].into();
    grid.y_name = headers[1].into();
    grid.z_name = headers[2].into();
    let mut values = Vec::with_capacity(nx * ny);
    for record in reader.records() {
        let r = record.map_err(|e| bad(path, e))?;
        values.push([number(path, &r[0])?, number(path, &r[1])?, number(path, &r[2])?]);
    }
    if values.len() != nx * ny {
        return Err(bad(path, format!("expected {} rows, found {}", nx * ny, values.len())));
    }
    grid.x = (0..nx).map(|i| values[i * ny][0]).collect();
    grid.y = (0..ny).map(|j| values[j][1]).collect();
    grid.z = (0..nx).map(|i| (0..ny).map(|j| values[i * ny + j][2]).collect()).collect();

    let spath = summary_path(path);
    if spath.exists() {
        let text = fs::read_to_string(&spath).map_err(|e| Error::io(&spath, e))?;
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| bad(&spath, e))?.clone();
        if headers.len() < 5 {
            return Err(bad(&spath, "expected at least five columns"));
        }
        grid.summary_columns = headers.iter().skip(5).map(String::from).collect();
        for record in reader.records() {
            let r = record.map_err(|e| bad(&spath, e))?;
            grid.summary.push(SummaryRow {
                x: number(&spath, &r[0])?,
                value: number(&spath, &r[1])?,
                uncertainty: number(&spath, &r[2])?,
                reference: if r[3].is_empty() { None } else { Some(number(&spath, &r[3])?) },
                flagged: r[4] == *"true",
                extra: r.iter().skip(5).map(|s| number(&spath, s)).collect::<Result<_>>()?,
            });
        }
    }
    Ok(grid)
}
