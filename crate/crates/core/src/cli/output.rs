//! CSV and JSON serialisation.

use serde::Serialize;

use crate::sweep::SweepResult;

use super::CliError;

/// Full-precision scientific notation (17 significant digits).
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

/// A header plus string cells, written as CSV.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(CliError::io)?;
        for r in &self.rows {
            w.write_record(r).map_err(CliError::io)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(value).map_err(CliError::io)?;
    s.push('\n');
    Ok(s)
}

/// Long-format table: `axis1,axis1_value[,axis2,axis2_value],metric,value,converged`.
pub fn sweep_table(result: &SweepResult) -> Table {
    let mut header = Vec::new();
    for k in 1..=result.spec.axes.len() {
        header.push(format!("axis{k}"));
        header.push(format!("axis{k}_value"));
    }
    header.extend(["metric", "value", "converged"].map(String::from));
    let mut t = Table::new(header);
    for row in &result.rows {
        let mut cells = Vec::with_capacity(t.header.len());
        for (axis, &x) in result.spec.axes.iter().zip(&row.values) {
            cells.push(axis.param.name().to_string());
            cells.push(num(x));
        }
        cells.push(result.spec.metric.name().to_string());
        cells.push(num(row.value));
        cells.push(row.converged.to_string());
        t.push(cells);
    }
    t
}

/// One record of a long-format sweep CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub axes: Vec<(String, f64)>,
    pub metric: String,
    pub value: f64,
    pub converged: bool,
}

/// Parses a sweep CSV produced by [`sweep_table`].
pub fn read_sweep_csv(text: &str) -> Result<Vec<CsvRow>, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let width = r.headers().map_err(CliError::io)?.len();
    if width != 5 && width != 7 {
        return Err(CliError::usage(format!(
            "unexpected sweep CSV width {width}"
        )));
    }
    let n_axes = (width - 3) / 2;
    let parse = |s: &str| {
        s.parse::<f64>()
            .map_err(|e| CliError::usage(format!("bad number `{s}`: {e}")))
    };
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(CliError::io)?;
        let mut axes = Vec::with_capacity(n_axes);
        for k in 0..n_axes {
            axes.push((rec[2 * k].to_string(), parse(&rec[2 * k + 1])?));
        }
        out.push(CsvRow {
            axes,
            metric: rec[width - 3].to_string(),
            value: parse(&rec[width - 2])?,
            converged: rec[width - 1] == *"true",
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [
            0.1,
            1.0 / 3.0,
            2.5653e-22,
            f64::MAX,
            f64::MIN_POSITIVE,
            -7.25,
            0.0,
        ] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
        assert!(num(f64::NAN).parse::<f64>().unwrap().is_nan());
    }

    #[test]
    fn table_quotes_when_needed() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["x,y".into(), "1".into()]);
        assert_eq!(t.to_csv().unwrap(), "a,b\n\"x,y\",1\n");
    }
}
