//! Number formatting and CSV tables.

use std::io::Write;

/// `x` with 9 significant digits, like C's `%.9g`.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("exponent digits");
    if !(-5..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs())
    } else {
        trim_zeros(&format!("{x:.*}", (8 - exp) as usize)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    /// A number that is an angle in radians.
    Angle(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn render(&self, degrees: bool) -> String {
        match self {
            Cell::Num(x) => sig9(*x),
            Cell::Angle(x) if degrees => sig9(x.to_degrees()),
            Cell::Angle(x) => sig9(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Cell::Num(x) | Cell::Angle(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

/// A named CSV table with a header row.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&'static str]) -> Self {
        Self {
            name: name.into(),
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[k].value()).collect())
    }

    /// Comma-separated, header first, LF line endings.
    pub fn write_csv<W: Write>(&self, out: W, degrees: bool) -> csv::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.render(degrees)))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, degrees: bool) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, degrees)
            .expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }
}

/// Headline numbers of a run, in insertion order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Summary {
    pub entries: Vec<(String, Cell)>,
}

impl Summary {
    pub fn put(&mut self, key: &str, value: Cell) {
        self.entries.push((key.into(), value));
    }

    pub fn num(&mut self, key: &str, x: f64) {
        self.put(key, Cell::Num(x));
    }

    pub fn angle(&mut self, key: &str, x: f64) {
        self.put(key, Cell::Angle(x));
    }

    pub fn text(&mut self, key: &str, s: impl Into<String>) {
        self.put(key, Cell::Text(s.into()));
    }

    pub fn get(&self, key: &str) -> Option<&Cell> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    /// One `key=value` line per entry.
    pub fn render(&self, degrees: bool) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            s.push_str(k);
            s.push('=');
            s.push_str(&v.render(degrees));
            s.push('\n');
        }
        s
    }
}
