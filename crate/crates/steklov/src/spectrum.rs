//! Sorted eigenvalue multisets with per-entry provenance, and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

#[derive(Clone, Debug, PartialEq)]
pub struct SpecEntry<T: Real> {
    /// ladder index in ℤ for component sequences, rank in ℕ for merged ones
    pub index: i64,
    pub value: T,
    pub component: String,
}

/// Nondecreasing list of eigenvalues.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct SpectrumSeq<T: Real> {
    pub entries: Vec<SpecEntry<T>>,
}

#[derive(Serialize, Deserialize)]
struct Row {
    index: i64,
    value: f64,
    component: String,
}

impl<T: Real> SpectrumSeq<T> {
    /// sorts by value; ties keep their input order
    pub fn new(mut entries: Vec<SpecEntry<T>>) -> Result<Self> {
        if entries.iter().any(|e| !e.value.is_finite()) {
            return Err(Error::InvalidInput("spectrum contains a non-finite value".into()));
        }
        entries.sort_by(|a, b| a.value.partial_cmp(&b.value).unwrap());
        Ok(SpectrumSeq { entries })
    }

    /// ranks 1..N with a common label
    pub fn from_values(values: &[T], component: &str) -> Result<Self> {
        let mut s = Self::new(
            values.iter().map(|v| SpecEntry { index: 0, value: *v, component: component.to_string() }).collect(),
        )?;
        s.renumber();
        Ok(s)
    }

    pub fn renumber(&mut self) {
        for (i, e) in self.entries.iter_mut().enumerate() {
            e.index = i as i64 + 1;
        }
    }

    pub fn values(&self) -> Vec<T> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// entries with the given label, in order
    pub fn component(&self, label: &str) -> Self {
        SpectrumSeq { entries: self.entries.iter().filter(|e| e.component == label).cloned().collect() }
    }

    /// drop the `k` smallest values
    pub fn without_head(&self, k: usize) -> Self {
        SpectrumSeq { entries: self.entries.iter().skip(k).cloned().collect() }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        for e in &self.entries {
            // serialize as a row; f64 values are formatted with 12 significant digits
            wr.write_record([e.index.to_string(), fmt_sig(to_f64(e.value)), e.component.clone()])
                .map_err(|e| Error::Io(e.to_string()))?;
        }
        wr.flush().map_err(|e| Error::Io(e.to_string()))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = b"index,value,component\n".to_vec();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).unwrap()
    }

    /// header row `index,value,component` is required
    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let headers = rd.headers().map_err(|e| Error::Parse(e.to_string()))?.clone();
        if headers.iter().collect::<Vec<_>>() != ["index", "value", "component"] {
            return Err(Error::Parse(format!("expected header index,value,component, found {:?}", headers)));
        }
        let mut entries = Vec::new();
        for row in rd.deserialize::<Row>() {
            let row = row.map_err(|e| Error::Parse(e.to_string()))?;
            entries.push(SpecEntry { index: row.index, value: lit(row.value), component: row.component });
        }
        Self::new(entries)
    }

    pub fn from_csv_str(s: &str) -> Result<Self> {
        Self::read_csv(s.as_bytes())
    }
}

/// multiset union, sorted, ranked 1..N; labels are kept
pub fn merge_spectra<T: Real>(parts: &[SpectrumSeq<T>]) -> SpectrumSeq<T> {
    let all: Vec<SpecEntry<T>> = parts.iter().flat_map(|p| p.entries.iter().cloned()).collect();
    let mut s = SpectrumSeq::new(all).expect("inputs are finite");
    s.renumber();
    s
}

/// 12 significant digits, shortest decimal form
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let r: f64 = format!("{:.11e}", x).parse().unwrap();
    format!("{}", r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_examples() {
        let a = SpectrumSeq::from_values(&[1.0, 2.0, 3.0], "a").unwrap();
        let b = SpectrumSeq::from_values(&[1.5, 2.5], "b").unwrap();
        let m = merge_spectra(&[a.clone(), b]);
        assert_eq!(m.values(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
        assert_eq!(m.entries[1].component, "b");
        assert_eq!(m.entries[4].index, 5);
        let m = merge_spectra(&[a.clone(), a]);
        assert_eq!(m.values(), vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0]);
    }

    #[test]
    fn csv_round_trip() {
        let s = SpectrumSeq::from_values(&[0.1, 1.0 / 3.0, 15.3], "tanh").unwrap();
        let text = s.to_csv_string();
        assert!(text.starts_with("index,value,component\n1,0.1,tanh\n"));
        let back: SpectrumSeq<f64> = SpectrumSeq::from_csv_str(&text).unwrap();
        assert_eq!(back.len(), 3);
        assert!((back.values()[1] - 1.0 / 3.0).abs() < 1e-12);
        assert!(SpectrumSeq::<f64>::from_csv_str("1,2,3\n").is_err());
    }

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(15.3), "15.3");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(-2.5e-20), "-0.000000000000000000025");
    }
}
