//! Result tables and their CSV / JSON renderings.

use serde::Serialize;

/// Significant digits in CSV output.
pub const SIG_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Self::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Self::Num(x) => Some(*x),
            Self::Int(n) => Some(*n as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Self::Num(x) => fmt_sig(*x),
            Self::Int(n) => n.to_string(),
            Self::Text(s) => s.clone(),
            Self::Bool(b) => b.to_string(),
        }
    }
}

/// Fixed-point decimal with [`SIG_DIGITS`] significant digits.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (SIG_DIGITS as i32 - 1 - magnitude).clamp(0, 30) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new digit, e.g. 9.9999999999996 -> 10.00...
    if s.trim_start_matches('-')
        .replace('.', "")
        .trim_start_matches('0')
        .len()
        > SIG_DIGITS
        && decimals > 0
    {
        let d = decimals - 1;
        return format!("{x:.d$}");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column, in row order.
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.column(name)?;
        self.rows.iter().map(|r| r[j].as_f64()).collect()
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))
                .expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    pub fn to_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(self).expect("tables serialize");
        out.push(b'\n');
        out
    }
}
