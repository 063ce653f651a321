//! Young diagrams, Casimir eigenvalues and the Littlewood-Richardson rule.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// Exact rational number, always reduced with a positive denominator.
pub type Rational = Ratio<i64>;

/// A partition drawn as rows of boxes, longest row first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct YoungDiagram {
    rows: Vec<usize>,
}

impl YoungDiagram {
    pub fn new(rows: Vec<usize>) -> Result<Self> {
        if rows.contains(&0) {
            return Err(Error::ParameterOutOfRange("Young diagram rows must be positive".into()));
        }
        if rows.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::ParameterOutOfRange(format!("rows {rows:?} are not weakly decreasing")));
        }
        Ok(Self { rows })
    }

    /// Drops trailing zero rows; the caller guarantees monotonicity.
    fn from_rows_unchecked(mut rows: Vec<usize>) -> Self {
        while rows.last() == Some(&0) {
            rows.pop();
        }
        debug_assert!(rows.windows(2).all(|w| w[0] >= w[1]));
        Self { rows }
    }

    pub fn single_row(n: usize) -> Self {
        Self::from_rows_unchecked(vec![n])
    }

    pub fn single_column(n: usize) -> Self {
        Self::from_rows_unchecked(vec![1; n])
    }

    pub fn rows(&self) -> &[usize] {
        &self.rows
    }

    /// Column heights (the conjugate partition).
    pub fn columns(&self) -> Vec<usize> {
        let width = self.rows.first().copied().unwrap_or(0);
        (0..width).map(|j| self.rows.iter().filter(|&&r| r > j).count()).collect()
    }

    pub fn boxes(&self) -> usize {
        self.rows.iter().sum()
    }

    pub fn height(&self) -> usize {
        self.rows.len()
    }

    /// Sum of squared column heights.
    pub fn a(&self) -> i64 {
        self.columns().iter().map(|&c| (c * c) as i64).sum()
    }

    /// Sum of squared row lengths.
    pub fn b(&self) -> i64 {
        self.rows.iter().map(|&r| (r * r) as i64).sum()
    }

    /// Sum over boxes of (column - row), i.e. (B - A) / 2.
    pub fn content(&self) -> i64 {
        (self.b() - self.a()) / 2
    }
}

impl fmt::Debug for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Quadratic Casimir of the U(d) irrep labelled by `y`:
/// N (d - N/d) + B - A.
pub fn casimir_eigenvalue(y: &YoungDiagram, d: usize) -> Result<Rational> {
    if y.height() > d {
        return Err(Error::HeightExceedsDimension { height: y.height(), d });
    }
    let n = y.boxes() as i64;
    let d = d as i64;
    Ok(Rational::new(n * d * d - n * n, d) + Rational::from_integer(y.b() - y.a()))
}

/// All partitions of `boxes` with at most `max_height` rows, in decreasing
/// lexicographic order of their row lists.
pub fn enumerate_diagrams(boxes: usize, max_height: usize) -> Vec<YoungDiagram> {
    fn rec(left: usize, cap: usize, rows_left: usize, cur: &mut Vec<usize>, out: &mut Vec<YoungDiagram>) {
        if left == 0 {
            out.push(YoungDiagram { rows: cur.clone() });
            return;
        }
        if rows_left == 0 {
            return;
        }
        for r in (1..=cap.min(left)).rev() {
            // the remaining rows can hold at most r each
            if r * rows_left < left {
                break;
            }
            cur.push(r);
            rec(left - r, r, rows_left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if boxes == 0 {
        return out;
    }
    rec(boxes, boxes, max_height, &mut Vec::new(), &mut out);
    out
}

/// Shapes with positive Littlewood-Richardson coefficient in yl (x) yr,
/// keeping only those with at most d rows. Sorted in decreasing
/// lexicographic order.
///
/// The boxes of yr are added row by row: the k-th row of yr becomes a
/// horizontal strip labelled k, and the filling is accepted when its reverse
/// reading word (rows top to bottom, each read right to left) is a lattice
/// word.
pub fn lr_decompose(yl: &YoungDiagram, yr: &YoungDiagram, d: usize) -> Vec<YoungDiagram> {
    let mut found = BTreeSet::new();
    // labels[i] lists the labels added to row i, left to right
    let mut labels: Vec<Vec<usize>> = vec![Vec::new(); yl.height() + yr.boxes()];
    let mut shape = yl.rows.clone();
    shape.resize(yl.height() + yr.boxes(), 0);
    add_strip(&mut shape, &mut labels, 0, &yr.rows, d, &mut found);
    found.into_iter().rev().collect()
}

fn add_strip(
    shape: &mut Vec<usize>,
    labels: &mut Vec<Vec<usize>>,
    label: usize,
    content: &[usize],
    d: usize,
    found: &mut BTreeSet<YoungDiagram>,
) {
    if label == content.len() {
        if is_lattice(labels, content.len()) {
            let y = YoungDiagram::from_rows_unchecked(shape.clone());
            if y.height() <= d {
                found.insert(y);
            }
        }
        return;
    }
    // A horizontal strip adds at most old[i-1] - old[i] boxes to row i > 0.
    let old = shape.clone();
    distribute(shape, labels, &old, 0, content[label], label, content, d, found);
}

#[allow(clippy::too_many_arguments)]
fn distribute(
    shape: &mut Vec<usize>,
    labels: &mut Vec<Vec<usize>>,
    old: &[usize],
    row: usize,
    left: usize,
    label: usize,
    content: &[usize],
    d: usize,
    found: &mut BTreeSet<YoungDiagram>,
) {
    if left == 0 {
        // prune early when the lattice condition already fails
        if is_lattice(labels, label + 1) {
            add_strip(shape, labels, label + 1, content, d, found);
        }
        return;
    }
    if row >= shape.len() || row >= d {
        return;
    }
    let room = if row == 0 { left } else { old[row - 1] - old[row] };
    for k in (0..=room.min(left)).rev() {
        shape[row] += k;
        labels[row].extend(std::iter::repeat(label).take(k));
        distribute(shape, labels, old, row + 1, left - k, label, content, d, found);
        let len = labels[row].len();
        labels[row].truncate(len - k);
        shape[row] -= k;
    }
}

fn is_lattice(labels: &[Vec<usize>], n_labels: usize) -> bool {
    let mut count = vec![0usize; n_labels.max(1)];
    for row in labels {
        for &l in row.iter().rev() {
            count[l] += 1;
            if l > 0 && count[l] > count[l - 1] {
                return false;
            }
        }
    }
    true
}

/// Eigenvalue of H_{m,n} on the block labelled by (yl, yr, ylr).
pub fn block_eigenvalue(yl: &YoungDiagram, yr: &YoungDiagram, ylr: &YoungDiagram) -> Rational {
    let m = yl.boxes() as i64;
    let n = yr.boxes() as i64;
    let num = ylr.a() - yl.a() - yr.a() - ylr.b() + yl.b() + yr.b();
    Rational::new(num, 2 * m * n)
}

/// The maximizing block of H_{m,n}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct YoungOptimum {
    pub value: Rational,
    pub left: YoungDiagram,
    pub right: YoungDiagram,
    pub combined: YoungDiagram,
}

/// Largest eigenvalue of H_{m,n} on (C^d)^(m+n), maximized over all blocks.
pub fn max_h_eigenvalue_young(d: usize, m: usize, n: usize) -> Result<Rational> {
    Ok(max_h_block(d, m, n)?.value)
}

pub fn max_h_block(d: usize, m: usize, n: usize) -> Result<YoungOptimum> {
    if d < 2 || m == 0 || n == 0 {
        return Err(Error::ParameterOutOfRange(format!("need d >= 2 and m, n >= 1, got d={d} m={m} n={n}")));
    }
    let mut best: Option<YoungOptimum> = None;
    for yl in enumerate_diagrams(m, d) {
        for yr in enumerate_diagrams(n, d) {
            for ylr in lr_decompose(&yl, &yr, d) {
                let value = block_eigenvalue(&yl, &yr, &ylr);
                if best.as_ref().map_or(true, |b| value > b.value) {
                    best = Some(YoungOptimum { value, left: yl.clone(), right: yr.clone(), combined: ylr });
                }
            }
        }
    }
    Ok(best.expect("at least one block exists"))
}
