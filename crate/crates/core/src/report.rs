//! Verification reports: one row per (identity, x).

use std::io::Write;

use num_rational::BigRational;

use crate::error::Result;
use crate::exactnum::{fmt_rational, ConstLinear};

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub identity: String,
    pub x: BigRational,
    pub residual: ConstLinear,
    pub exact_zero: bool,
}

impl ReportRow {
    pub fn new(identity: impl Into<String>, x: BigRational, residual: ConstLinear) -> Self {
        let exact_zero = residual.is_zero();
        ReportRow {
            identity: identity.into(),
            x,
            residual,
            exact_zero,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerificationReport {
    rows: Vec<ReportRow>,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.rows.extend(other.rows);
    }

    pub fn rows(&self) -> &[ReportRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn all_zero(&self) -> bool {
        self.rows.iter().all(|r| r.exact_zero)
    }

    pub fn first_failure(&self) -> Option<&ReportRow> {
        self.rows.iter().find(|r| !r.exact_zero)
    }

    pub fn failures(&self) -> usize {
        self.rows.iter().filter(|r| !r.exact_zero).count()
    }

    /// CSV with header `identity,x,residual,exact_zero`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["identity", "x", "residual", "exact_zero"])?;
        for r in &self.rows {
            w.write_record([
                r.identity.clone(),
                fmt_rational(&r.x),
                r.residual.to_string(),
                r.exact_zero.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

impl FromIterator<ReportRow> for VerificationReport {
    fn from_iter<I: IntoIterator<Item = ReportRow>>(iter: I) -> Self {
        VerificationReport {
            rows: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::piecewise::rat;

    #[test]
    fn csv_and_failures() {
        let mut r = VerificationReport::new();
        r.push(ReportRow::new("theorem", rat(1, 3), ConstLinear::zero()));
        r.push(ReportRow::new("lemma1", rat(2, 1), ConstLinear::from_int(1)));
        assert!(!r.all_zero());
        assert_eq!(r.first_failure().unwrap().identity, "lemma1");
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("identity,x,residual,exact_zero"));
        assert_eq!(lines.next(), Some("theorem,1/3,0/1 + 0/1*A2 + 0/1*A1,true"));
        assert_eq!(lines.next(), Some("lemma1,2/1,1/1 + 0/1*A2 + 0/1*A1,false"));
    }
}
