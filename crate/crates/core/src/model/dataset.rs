use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::feature_set::FeatureSet;
use crate::num::Real;

/// Dense row-major `n x d` matrix of observations with column names.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset<T> {
    n: usize,
    d: usize,
    values: Vec<T>,
    names: Vec<String>,
}

impl<T: Real> Dataset<T> {
    pub fn new(names: Vec<String>, values: Vec<T>) -> Result<Self> {
        let d = names.len();
        if d == 0 {
            if !values.is_empty() {
                return Err(Error::Format("values given for zero columns".into()));
            }
            return Ok(Dataset {
                n: 0,
                d,
                values,
                names,
            });
        }
        if !values.len().is_multiple_of(d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: values.len() % d,
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::MissingValue {
                row: pos / d,
                column: names[pos % d].clone(),
            });
        }
        Ok(Dataset {
            n: values.len() / d,
            d,
            values,
            names,
        })
    }

    /// Columns named `x0, x1, ..` when `names` is empty.
    pub fn from_rows(names: Vec<String>, rows: &[Vec<T>]) -> Result<Self> {
        let d = if names.is_empty() {
            rows.first().map_or(0, Vec::len)
        } else {
            names.len()
        };
        let names = if names.is_empty() {
            (0..d).map(|k| format!("x{k}")).collect()
        } else {
            names
        };
        let mut values = Vec::with_capacity(rows.len() * d);
        for row in rows {
            if row.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Dataset::new(names, values)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    #[inline]
    pub fn get(&self, i: usize, k: usize) -> T {
        self.values[i * self.d + k]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        (0..self.n).map(move |i| self.row(i))
    }

    pub fn column(&self, k: usize) -> Vec<T> {
        (0..self.n).map(|i| self.get(i, k)).collect()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Rows `rows` of `self`, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut values = Vec::with_capacity(rows.len() * self.d);
        for &i in rows {
            values.extend_from_slice(self.row(i));
        }
        Dataset {
            n: rows.len(),
            d: self.d,
            values,
            names: self.names.clone(),
        }
    }

    /// Columns reordered to match `names`; every name must be present.
    pub fn select_columns(&self, names: &[String]) -> Result<Self> {
        let idx: Vec<usize> = names
            .iter()
            .map(|n| {
                self.column_index(n)
                    .ok_or_else(|| Error::UnknownFeature(n.clone()))
            })
            .collect::<Result<_>>()?;
        Ok(self.project(&idx))
    }

    /// Drops the columns in `drop`.
    pub fn without_columns(&self, drop: FeatureSet) -> Self {
        let keep: Vec<usize> = (0..self.d).filter(|&k| !drop.contains(k)).collect();
        self.project(&keep)
    }

    fn project(&self, idx: &[usize]) -> Self {
        let mut values = Vec::with_capacity(self.n * idx.len());
        for row in self.rows() {
            values.extend(idx.iter().map(|&k| row[k]));
        }
        Dataset {
            n: self.n,
            d: idx.len(),
            values,
            names: idx.iter().map(|&k| self.names[k].clone()).collect(),
        }
    }

    /// Reads a CSV with a header row. Empty or non-numeric cells are rejected.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let names: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
        let mut values = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            if record.len() != names.len() {
                return Err(Error::DimensionMismatch {
                    expected: names.len(),
                    found: record.len(),
                });
            }
            for (k, cell) in record.iter().enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| Error::MissingValue {
                    row,
                    column: names[k].clone(),
                })?;
                values.push(T::lit(v));
            }
        }
        Dataset::new(names, values)
    }

    pub fn write_csv<W: Write>(&self, writer: W, extra: Option<(&str, &[T])>) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.names.iter().map(String::as_str).collect();
        if let Some((name, _)) = extra {
            header.push(name);
        }
        w.write_record(&header)?;
        for (i, row) in self.rows().enumerate() {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            if let Some((_, col)) = extra {
                rec.push(col[i].to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn cast<U: Real>(&self) -> Dataset<U> {
        Dataset {
            n: self.n,
            d: self.d,
            values: self.values.iter().map(|v| U::lit(v.as_f64())).collect(),
            names: self.names.clone(),
        }
    }
}
