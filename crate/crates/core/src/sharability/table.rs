//! Sharability thresholds -Psi for small m, n, alongside the published values.

use super::young::{max_h_eigenvalue_young, Rational};
use crate::error::Result;

fn r(n: i64, d: i64) -> Option<Rational> {
    Some(Rational::new(n, d))
}

const STAR: Option<Rational> = None;

/// Published thresholds for d = 2, 3, 4, indexed [n-1][m-1]; None marks
/// cells that were never computed there.
pub fn published_table(d: usize) -> Option<[[Option<Rational>; 5]; 5]> {
    let one = r(1, 1);
    match d {
        2 => Some([
            [one, r(1, 2), r(1, 3), r(1, 4), r(1, 5)],
            [r(1, 2), r(1, 2), r(1, 3), r(1, 4), r(1, 5)],
            [r(1, 3), r(1, 3), r(1, 3), r(1, 4), r(1, 5)],
            [r(1, 4), r(1, 4), r(1, 4), r(1, 4), r(1, 5)],
            [r(1, 5), r(1, 5), r(1, 5), r(1, 5), r(1, 5)],
        ]),
        3 => Some([
            [one, one, r(2, 3), r(1, 2), r(2, 5)],
            [one, r(1, 2), r(1, 2), r(1, 2), r(2, 5)],
            [r(2, 3), r(1, 2), r(1, 3), r(1, 3), r(1, 3)],
            [r(1, 2), r(1, 2), r(1, 3), r(1, 4), r(1, 4)],
            [r(2, 5), r(1, 3), r(1, 3), r(1, 4), STAR],
        ]),
        4 => Some([
            [one, one, one, r(3, 4), r(3, 5)],
            [one, one, r(2, 3), r(1, 2), r(1, 2)],
            [one, r(2, 3), r(5, 9), r(1, 2), STAR],
            [r(3, 4), r(1, 2), r(1, 2), STAR, STAR],
            [r(3, 5), r(1, 2), STAR, STAR, STAR],
        ]),
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableStatus {
    /// A published value exists for this cell.
    Published,
    /// No published value; the entry is computed only.
    Computed,
}

impl TableStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            TableStatus::Published => "published",
            TableStatus::Computed => "computed",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableCell {
    pub d: usize,
    pub n: usize,
    pub m: usize,
    pub threshold: Rational,
    pub status: TableStatus,
    pub published: Option<Rational>,
}

impl TableCell {
    /// Whether the computed threshold differs from a published one.
    pub fn disagrees(&self) -> bool {
        self.published.is_some_and(|p| p != self.threshold)
    }
}

/// Thresholds for 1 <= n, m <= max, rows n then columns m.
pub fn sharing_table(d: usize, max: usize) -> Result<Vec<TableCell>> {
    let published = published_table(d);
    let mut out = Vec::with_capacity(max * max);
    for n in 1..=max {
        for m in 1..=max {
            let threshold = max_h_eigenvalue_young(d, m, n)?;
            let p = published.and_then(|t| if n <= 5 && m <= 5 { t[n - 1][m - 1] } else { None });
            let status = if p.is_some() { TableStatus::Published } else { TableStatus::Computed };
            out.push(TableCell { d, n, m, threshold, status, published: p });
        }
    }
    Ok(out)
}
