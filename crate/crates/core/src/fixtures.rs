//! Reference tables embedded at build time (`fixtures/reference_tables.csv`).

use num_complex::Complex;
use serde::Deserialize;

use crate::map::Params;

const REFERENCE_CSV: &str = include_str!("../fixtures/reference_tables.csv");

#[derive(Debug, Deserialize)]
struct Record {
    table: String,
    row: usize,
    alpha_re: f64,
    alpha_im: f64,
    beta_re: f64,
    beta_im: f64,
    condition: bool,
    phi_re: Option<f64>,
    phi_im: Option<f64>,
    psi_re: Option<f64>,
    psi_im: Option<f64>,
    lyapunov: Option<f64>,
}

impl Record {
    fn params(&self) -> Params<f64> {
        Params::new(
            Complex::new(self.alpha_re, self.alpha_im),
            Complex::new(self.beta_re, self.beta_im),
        )
    }
}

/// A published period-two example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeriodTwoRow {
    pub row: usize,
    pub params: Params<f64>,
    /// Printed claim that `|b| > |1 + 4a|`.
    pub condition: bool,
    pub phi: Complex<f64>,
    pub psi: Complex<f64>,
}

/// A published chaotic example.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChaoticRow {
    pub row: usize,
    pub params: Params<f64>,
    /// Printed claim that `|b| < |1 + 4a|`.
    pub condition: bool,
    pub lyapunov: f64,
}

fn records() -> Vec<Record> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(REFERENCE_CSV.as_bytes())
        .deserialize()
        .collect::<Result<_, _>>()
        .expect("embedded reference table is well formed")
}

pub fn period_two_rows() -> Vec<PeriodTwoRow> {
    records()
        .into_iter()
        .filter(|r| r.table == "period_two")
        .map(|r| PeriodTwoRow {
            row: r.row,
            params: r.params(),
            condition: r.condition,
            phi: Complex::new(r.phi_re.unwrap(), r.phi_im.unwrap()),
            psi: Complex::new(r.psi_re.unwrap(), r.psi_im.unwrap()),
        })
        .collect()
}

pub fn chaotic_rows() -> Vec<ChaoticRow> {
    records()
        .into_iter()
        .filter(|r| r.table == "chaotic")
        .map(|r| ChaoticRow {
            row: r.row,
            params: r.params(),
            condition: r.condition,
            lyapunov: r.lyapunov.unwrap(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_sizes() {
        assert_eq!(period_two_rows().len(), 11);
        assert_eq!(chaotic_rows().len(), 10);
    }

    #[test]
    fn rows_are_numbered_in_order() {
        let rows: Vec<usize> = period_two_rows().iter().map(|r| r.row).collect();
        assert_eq!(rows, (1..=11).collect::<Vec<_>>());
        let fifth = period_two_rows()[4];
        assert_eq!(fifth.params.alpha, Complex::new(0.78287, 0.69378));
        assert_eq!(fifth.phi, Complex::new(0.00229, -0.36314));
        assert_eq!(chaotic_rows()[0].lyapunov, 1.3215);
    }
}
