//! Tables and their CSV / JSON renderings.

use serde_json::{Map, Value};

use qring::model::{convert_units, Direction, QuantityKind, UnitScale};
use qring::spectrum::StateRecord;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// Shortest decimal that parses back to the same double.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) if s.contains([',', '"', '\n', '\r']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
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

    /// Prepends a column holding one value per row.
    pub fn with_leading(mut self, name: &str, values: &[Cell]) -> Self {
        self.columns.insert(0, name.to_owned());
        for (row, v) in self.rows.iter_mut().zip(values) {
            row.insert(0, v.clone());
        }
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

pub const SPECTRUM_COLUMNS: [&str; 9] = ["n", "m", "energy", "moment", "current", "rho_m", "M", "omega_m", "flags"];

pub fn scale(v: f64, kind: QuantityKind, units: &UnitScale) -> f64 {
    convert_units(v, kind, Direction::FromNatural, units)
}

pub fn spectrum_row(r: &StateRecord, units: &UnitScale) -> Vec<Cell> {
    vec![
        Cell::Int(r.qn.n.into()),
        Cell::Int(r.qn.m.into()),
        scale(r.energy, QuantityKind::Energy, units).into(),
        scale(r.moment, QuantityKind::Moment, units).into(),
        r.current.map(|c| scale(c, QuantityKind::Current, units)).into(),
        r.rho_m.map(|l| scale(l, QuantityKind::Length, units)).into(),
        r.big_m.into(),
        scale(r.omega_m, QuantityKind::Energy, units).into(),
        r.flags.labels().join(";").into(),
    ]
}

/// Header plus one line per state.
pub fn emit_csv(rows: &[StateRecord], units: &UnitScale) -> String {
    let mut t = Table::new(SPECTRUM_COLUMNS);
    for r in rows {
        t.push(spectrum_row(r, units));
    }
    t.to_csv()
}

#[cfg(test)]
mod tests {
    use super::*;
    use qring::model::{ModelParams, QuantumNumbers};
    use qring::spectrum::state_record;

    #[test]
    fn empty_table_is_header_only() {
        assert_eq!(emit_csv(&[], &UnitScale::natural()), "n,m,energy,moment,current,rho_m,M,omega_m,flags\n");
    }

    #[test]
    fn floats_round_trip() {
        for x in [5.125, -1.830_282_8, 1.0 / 3.0, 1e-300, 6.02e23, -0.0, 2.5e-5, 123_456_789.123_456_78] {
            assert_eq!(format_float(x).parse::<f64>().unwrap().to_bits(), x.to_bits(), "{x}");
        }
        assert_eq!(format_float(1e-7), "1e-7");
        assert_eq!(format_float(5.125), "5.125");
    }

    #[test]
    fn m_zero_row_has_empty_current() {
        let p = ModelParams::builder().radius(1.0).field(10.0).build().unwrap();
        let r = state_record(&p, QuantumNumbers::new(0, 0)).unwrap();
        let csv = emit_csv(&[r], &UnitScale::natural());
        let line = csv.lines().nth(1).unwrap();
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells[4], "");
        assert_eq!(cells[8], "M0");
    }

    #[test]
    fn text_cells_are_quoted() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["x,y".into(), "q\"".into()]);
        assert_eq!(t.to_csv(), "a,b\n\"x,y\",\"q\"\"\"\n");
    }

    #[test]
    fn leading_column() {
        let mut t = Table::new(["v"]);
        t.push(vec![1.0.into()]);
        t.push(vec![2.0.into()]);
        let t = t.with_leading("b", &[0.5.into(), 1.5.into()]);
        assert_eq!(t.to_csv(), "b,v\n0.5,1\n1.5,2\n");
    }
}
