//! Field files.
//!
//! Every file describes one field on an `n1 × n2` grid, one record per site in
//! row-major order (`site = i1 * n2 + i2`). Values are written in Rust's
//! shortest round-trip notation, so reading a file back is bit-exact.
//!
//! CSV layout:
//!
//! ```text
//! # n1=4,n2=4,k=3,kind=phi
//! i1,i2,phi_0,phi_1,phi_2
//! 0,0,1.0,0.0,0.0
//! ...
//! ```
//!
//! JSON layout: `{"n1":4,"n2":4,"k":3,"kind":"phi","rows":[[...],...]}` where
//! each row holds the value columns only (no site indices).
//!
//! Value columns by kind: `phi_a` (`a < k`); `psi_a_c` (`a < k`, `c < 4`);
//! `chi_α_c` (`α ∈ {1,2}`, `c < 4`); `u`.

use crate::clifford::{Spinor, SpinorTangent};
use crate::error::{Error, Result};
use crate::fields::{ConformalMetric, GravitinoField, MapField, VectorSpinorField};
use crate::geometry::Grid;
use serde::{Deserialize, Serialize};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldKind {
    Phi,
    Psi,
    Chi,
    U,
}

impl FieldKind {
    pub fn name(self) -> &'static str {
        match self {
            FieldKind::Phi => "phi",
            FieldKind::Psi => "psi",
            FieldKind::Chi => "chi",
            FieldKind::U => "u",
        }
    }

    fn parse(s: &str) -> Result<FieldKind> {
        match s {
            "phi" => Ok(FieldKind::Phi),
            "psi" => Ok(FieldKind::Psi),
            "chi" => Ok(FieldKind::Chi),
            "u" => Ok(FieldKind::U),
            other => Err(Error::Parse(format!("unknown field kind {other:?}"))),
        }
    }
}

/// A field flattened to `sites × width` reals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldTable {
    pub n1: usize,
    pub n2: usize,
    pub k: usize,
    pub kind: FieldKind,
    pub rows: Vec<Vec<f64>>,
}

fn width(kind: FieldKind, k: usize) -> usize {
    match kind {
        FieldKind::Phi => k,
        FieldKind::Psi => 4 * k,
        FieldKind::Chi => 8,
        FieldKind::U => 1,
    }
}

impl FieldTable {
    pub fn width(&self) -> usize {
        width(self.kind, self.k)
    }

    pub fn columns(&self) -> Vec<String> {
        let mut cols = vec!["i1".to_string(), "i2".to_string()];
        match self.kind {
            FieldKind::Phi => cols.extend((0..self.k).map(|a| format!("phi_{a}"))),
            FieldKind::Psi => {
                for a in 0..self.k {
                    cols.extend((0..4).map(|c| format!("psi_{a}_{c}")));
                }
            }
            FieldKind::Chi => {
                for alpha in 1..=2 {
                    cols.extend((0..4).map(|c| format!("chi_{alpha}_{c}")));
                }
            }
            FieldKind::U => cols.push("u".into()),
        }
        cols
    }

    fn from_flat(grid: &Grid, k: usize, kind: FieldKind, flat: Vec<f64>) -> FieldTable {
        let w = width(kind, k);
        FieldTable {
            n1: grid.n1(),
            n2: grid.n2(),
            k,
            kind,
            rows: flat.chunks(w).map(<[f64]>::to_vec).collect(),
        }
    }

    pub fn from_map(grid: &Grid, phi: &MapField) -> FieldTable {
        Self::from_flat(grid, phi.k(), FieldKind::Phi, phi.data().to_vec())
    }

    pub fn from_spinors(grid: &Grid, psi: &VectorSpinorField) -> FieldTable {
        let flat = psi.data().iter().flat_map(|s| s.0).collect();
        Self::from_flat(grid, psi.k(), FieldKind::Psi, flat)
    }

    pub fn from_gravitino(grid: &Grid, chi: &GravitinoField) -> FieldTable {
        let flat = chi.data().iter().flat_map(|c| c.0.iter().flat_map(|s| s.0).collect::<Vec<_>>()).collect();
        Self::from_flat(grid, 0, FieldKind::Chi, flat)
    }

    pub fn from_conformal(grid: &Grid, u: &ConformalMetric) -> FieldTable {
        Self::from_flat(grid, 0, FieldKind::U, u.u().to_vec())
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.n1, self.n2)
    }

    fn expect(&self, kind: FieldKind) -> Result<Vec<f64>> {
        if self.kind != kind {
            return Err(Error::DimensionMismatch(format!(
                "expected a {} field, found {}",
                kind.name(),
                self.kind.name()
            )));
        }
        self.check_shape()?;
        Ok(self.rows.concat())
    }

    fn check_shape(&self) -> Result<()> {
        let w = self.width();
        if self.rows.len() != self.n1 * self.n2 {
            return Err(Error::DimensionMismatch(format!(
                "{} records for a {}x{} grid",
                self.rows.len(),
                self.n1,
                self.n2
            )));
        }
        if let Some(r) = self.rows.iter().find(|r| r.len() != w) {
            return Err(Error::DimensionMismatch(format!("record of width {}, expected {w}", r.len())));
        }
        if matches!(self.kind, FieldKind::Phi | FieldKind::Psi) && self.k == 0 {
            return Err(Error::DimensionMismatch("k must be positive".into()));
        }
        Ok(())
    }

    pub fn to_map(&self) -> Result<MapField> {
        MapField::new(self.k, self.expect(FieldKind::Phi)?)
    }

    pub fn to_spinors(&self) -> Result<VectorSpinorField> {
        let flat = self.expect(FieldKind::Psi)?;
        let data = flat.chunks(4).map(|c| Spinor([c[0], c[1], c[2], c[3]])).collect();
        VectorSpinorField::new(self.k, data)
    }

    pub fn to_gravitino(&self) -> Result<GravitinoField> {
        let flat = self.expect(FieldKind::Chi)?;
        let data = flat
            .chunks(8)
            .map(|c| SpinorTangent([Spinor([c[0], c[1], c[2], c[3]]), Spinor([c[4], c[5], c[6], c[7]])]))
            .collect();
        GravitinoField::new(data)
    }

    pub fn to_conformal(&self) -> Result<ConformalMetric> {
        ConformalMetric::new(self.expect(FieldKind::U)?)
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        self.check_shape()?;
        writeln!(out, "# n1={},n2={},k={},kind={}", self.n1, self.n2, self.k, self.kind.name())?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(self.columns()).map_err(csv_err)?;
        for (site, row) in self.rows.iter().enumerate() {
            let mut rec = vec![(site / self.n2).to_string(), (site % self.n2).to_string()];
            rec.extend(row.iter().map(|v| format!("{v:?}")));
            w.write_record(&rec).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(input: R) -> Result<FieldTable> {
        let mut input = BufReader::new(input);
        let mut header = String::new();
        input.read_line(&mut header)?;
        let (n1, n2, k, kind) = parse_header(&header)?;
        let mut table = FieldTable { n1, n2, k, kind, rows: Vec::new() };
        let mut r = csv::Reader::from_reader(input);
        let cols: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
        if cols != table.columns() {
            return Err(Error::Parse(format!("unexpected columns {cols:?}")));
        }
        for (site, rec) in r.records().enumerate() {
            let rec = rec.map_err(csv_err)?;
            let idx: Vec<usize> = (0..2)
                .map(|i| rec[i].parse().map_err(|_| Error::Parse(format!("bad site index {:?}", &rec[i]))))
                .collect::<Result<_>>()?;
            if n2 == 0 || idx != [site / n2, site % n2] {
                return Err(Error::Parse(format!("record {site} is out of row-major order")));
            }
            let row = rec
                .iter()
                .skip(2)
                .map(|s| s.parse::<f64>().map_err(|_| Error::Parse(format!("bad number {s:?}"))))
                .collect::<Result<Vec<f64>>>()?;
            table.rows.push(row);
        }
        table.check_shape()?;
        Ok(table)
    }

    pub fn to_json(&self) -> Result<String> {
        self.check_shape()?;
        if self.rows.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("JSON field files hold finite values only".into()));
        }
        serde_json::to_string(self).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<FieldTable> {
        let t: FieldTable = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        t.check_shape()?;
        Ok(t)
    }

    /// Writes CSV or JSON according to the file extension (`.json`, otherwise CSV).
    pub fn save(&self, path: &Path) -> Result<()> {
        if is_json(path) {
            std::fs::write(path, self.to_json()?)?;
            Ok(())
        } else {
            self.write_csv(std::fs::File::create(path)?)
        }
    }

    pub fn load(path: &Path) -> Result<FieldTable> {
        if is_json(path) {
            Self::from_json(&std::fs::read_to_string(path)?)
        } else {
            Self::read_csv(std::fs::File::open(path)?)
        }
    }
}

fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"))
}

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

fn parse_header(line: &str) -> Result<(usize, usize, usize, FieldKind)> {
    let body = line
        .trim()
        .strip_prefix('#')
        .ok_or_else(|| Error::Parse("field file must start with a '#' header".into()))?;
    let (mut n1, mut n2, mut k, mut kind) = (None, None, None, None);
    for item in body.trim().split(',') {
        let (key, val) = item
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("bad header entry {item:?}")))?;
        let num = || val.trim().parse::<usize>().map_err(|_| Error::Parse(format!("bad header value {val:?}")));
        match key.trim() {
            "n1" => n1 = Some(num()?),
            "n2" => n2 = Some(num()?),
            "k" => k = Some(num()?),
            "kind" => kind = Some(FieldKind::parse(val.trim())?),
            other => return Err(Error::Parse(format!("unknown header key {other:?}"))),
        }
    }
    match (n1, n2, k, kind) {
        (Some(a), Some(b), Some(c), Some(d)) => Ok((a, b, c, d)),
        _ => Err(Error::Parse("header needs n1, n2, k and kind".into())),
    }
}

/// Two-column CSV `r,value`.
pub fn write_profile_csv<W: Write>(out: W, value_name: &str, rows: &[(f64, f64)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["r", value_name]).map_err(csv_err)?;
    for (r, v) in rows {
        w.write_record([format!("{r:?}"), format!("{v:?}")]).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_profile_csv<R: Read>(input: R) -> Result<Vec<(f64, f64)>> {
    let mut r = csv::Reader::from_reader(input);
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let num = |i: usize| rec[i].parse::<f64>().map_err(|_| Error::Parse(format!("bad number {:?}", &rec[i])));
        rows.push((num(0)?, num(1)?));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip() {
        assert_eq!(parse_header("# n1=4,n2=6,k=3,kind=psi\n").unwrap(), (4, 6, 3, FieldKind::Psi));
        assert!(parse_header("n1=4").is_err());
        assert!(parse_header("# n1=4,n2=6,k=3,kind=xi").is_err());
    }

    #[test]
    fn csv_layout_is_documented_one() {
        let grid = Grid::new(4, 4).unwrap();
        let phi = MapField::constant(&grid, &[0.0, 0.0, 1.0]);
        let mut buf = Vec::new();
        FieldTable::from_map(&grid, &phi).write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("# n1=4,n2=4,k=3,kind=phi"));
        assert_eq!(lines.next(), Some("i1,i2,phi_0,phi_1,phi_2"));
        assert_eq!(lines.next(), Some("0,0,0.0,0.0,1.0"));
        assert_eq!(lines.count(), 15);
    }
}
