//! Elimination lists: construction, text serialization, validity checking,
//! the no-reverse normalizer, and the total-weight formula.
//!
//! A list is *valid* when (a) for every elimination, both participating rows
//! already have all their tiles in earlier columns zeroed out, and (b) the
//! pivot tile has not itself been zeroed out earlier. A valid list covers each
//! sub-diagonal tile exactly once.

use std::fmt::Write as _;

use crate::error::QrError;
use crate::grid::{Elimination, GridShape};

/// An ordered elimination list over a tile grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EliminationList {
    shape: GridShape,
    items: Vec<Elimination>,
}

/// Why a list failed validation. `index` is the 0-based position in the list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// Elimination indices out of range for the shape.
    OutOfRange { index: usize, item: Elimination },
    /// Tile (row, col) is zeroed by more than one elimination.
    DuplicateTile { index: usize, item: Elimination },
    /// A sub-diagonal tile is never zeroed.
    MissingTile { row: usize, col: usize },
    /// Condition (a): `row` still has a non-zero tile in column `pending_col`
    /// < item.col when the elimination is applied.
    RowNotReady { index: usize, item: Elimination, row: usize, pending_col: usize },
    /// Condition (b): the pivot tile (item.piv, item.col) was already zeroed.
    PivotAlreadyZeroed { index: usize, item: Elimination },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::OutOfRange { index, item } => {
                write!(f, "item {index}: {item} out of range")
            }
            Violation::DuplicateTile { index, item } => {
                write!(f, "item {index}: {item} zeroes an already-zeroed tile")
            }
            Violation::MissingTile { row, col } => {
                write!(f, "tile ({row}, {col}) is never zeroed")
            }
            Violation::RowNotReady { index, item, row, pending_col } => {
                write!(f, "item {index}: {item}: row {row} still full in column {pending_col}")
            }
            Violation::PivotAlreadyZeroed { index, item } => {
                write!(f, "item {index}: {item}: pivot tile already zeroed")
            }
        }
    }
}

/// Result of `validate`: empty `violations` means the list is valid.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl EliminationList {
    /// Build a list without validating the ordering conditions; only index
    /// ranges are checked. Use `validate` (or `new_valid`) for full checking.
    pub fn new(shape: GridShape, items: Vec<Elimination>) -> Result<Self, QrError> {
        for e in &items {
            e.check_bounds(shape)?;
        }
        Ok(EliminationList { shape, items })
    }

    /// Build a list and reject it unless it validates cleanly.
    pub fn new_valid(shape: GridShape, items: Vec<Elimination>) -> Result<Self, QrError> {
        let list = Self::new(shape, items)?;
        let report = list.validate();
        if report.is_ok() {
            Ok(list)
        } else {
            Err(QrError::InvalidList(
                report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
            ))
        }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn items(&self) -> &[Elimination] {
        &self.items
    }

    /// Check coverage and the two ordering conditions, reporting every
    /// violation rather than stopping at the first.
    pub fn validate(&self) -> ValidationReport {
        let (p, q) = (self.shape.p(), self.shape.q());
        let mut violations = Vec::new();
        // zeroed[(i-1)*q + (k-1)] for sub-diagonal tiles
        let mut zeroed = vec![false; p * q];
        let idx = |i: usize, k: usize| (i - 1) * q + (k - 1);

        for (n, e) in self.items.iter().enumerate() {
            if e.check_bounds(self.shape).is_err() {
                violations.push(Violation::OutOfRange { index: n, item: *e });
                continue;
            }
            // (a) both rows must be "ready": all their tiles left of column
            // e.col already zeroed.
            for &r in &[e.row, e.piv] {
                for c in 1..e.col {
                    if c < r && !zeroed[idx(r, c)] {
                        violations.push(Violation::RowNotReady {
                            index: n,
                            item: *e,
                            row: r,
                            pending_col: c,
                        });
                        break;
                    }
                }
            }
            // (b) the pivot tile must still be a potential annihilator.
            if e.piv > e.col && zeroed[idx(e.piv, e.col)] {
                violations.push(Violation::PivotAlreadyZeroed { index: n, item: *e });
            }
            if zeroed[idx(e.row, e.col)] {
                violations.push(Violation::DuplicateTile { index: n, item: *e });
            } else {
                zeroed[idx(e.row, e.col)] = true;
            }
        }
        for (i, k) in self.shape.subdiagonal() {
            if !zeroed[idx(i, k)] {
                violations.push(Violation::MissingTile { row: i, col: k });
            }
        }
        ValidationReport { violations }
    }

    /// Serialize to the line-oriented text format: header `p q`, then one
    /// `k i piv` line per item in list order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.shape.p(), self.shape.q());
        for e in &self.items {
            let _ = writeln!(out, "{} {} {}", e.col, e.row, e.piv);
        }
        out
    }

    /// Parse the text format produced by `to_text`. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn from_text(text: &str) -> Result<Self, QrError> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| QrError::Parse("empty list file".into()))?;
        let mut nums = header.split_whitespace();
        let parse = |s: Option<&str>, what: &str| -> Result<usize, QrError> {
            s.ok_or_else(|| QrError::Parse(format!("missing {what}")))?
                .parse::<usize>()
                .map_err(|e| QrError::Parse(format!("bad {what}: {e}")))
        };
        let p = parse(nums.next(), "p")?;
        let q = parse(nums.next(), "q")?;
        if nums.next().is_some() {
            return Err(QrError::Parse("header must be exactly `p q`".into()));
        }
        let shape = GridShape::new(p, q)?;
        let mut items = Vec::new();
        for line in lines {
            let mut nums = line.split_whitespace();
            let k = parse(nums.next(), "k")?;
            let i = parse(nums.next(), "i")?;
            let piv = parse(nums.next(), "piv")?;
            if nums.next().is_some() {
                return Err(QrError::Parse(format!("trailing tokens on line `{line}`")));
            }
            items.push(Elimination::new(i, piv, k));
        }
        EliminationList::new(shape, items)
    }

    /// Rewrite the list so that every elimination has `row > piv`, without
    /// changing the execution time of the corresponding task graph.
    ///
    /// In the first column containing a reverse elimination, let i0 be the
    /// largest row index involved in one (necessarily as a pivot), and let i1
    /// be the first row i0 reverse-eliminates; the roles of rows i0 and i1
    /// are exchanged from that point on, in this column and every later one.
    /// The exchanged list performs the same kernels on the same tiles up to
    /// swapping the labels of rows i0 and i1, so it stays valid in place and
    /// its task graph is isomorphic to the original -- the execution time is
    /// unchanged. Each exchange strictly decreases the largest reverse pivot
    /// of the column, so iterating terminates.
    pub fn normalize_no_reverse(&self) -> Result<EliminationList, QrError> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(QrError::InvalidList(
                report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
            ));
        }
        if self.items.iter().all(|e| !e.is_reverse()) {
            return Ok(self.clone());
        }
        let mut items = self.items.clone();
        for k in 1..=self.shape.q() {
            loop {
                // Largest pivot of a reverse elimination in column k.
                let Some(i0) = items
                    .iter()
                    .filter(|e| e.col == k && e.is_reverse())
                    .map(|e| e.piv)
                    .max()
                else {
                    break;
                };
                // First reverse elimination pivoted by i0; its row takes over
                // i0's role from that point on.
                let p1 = items
                    .iter()
                    .position(|e| e.col == k && e.piv == i0 && e.is_reverse())
                    .expect("i0 is a reverse pivot");
                let i1 = items[p1].row;
                items[p1] = Elimination::new(i0, i1, k);
                let swap = |r: &mut usize| {
                    if *r == i0 {
                        *r = i1;
                    } else if *r == i1 {
                        *r = i0;
                    }
                };
                for e in items.iter_mut().skip(p1 + 1).filter(|e| e.col >= k) {
                    swap(&mut e.row);
                    swap(&mut e.piv);
                }
            }
        }
        let out = EliminationList { shape: self.shape, items };
        debug_assert!(out.validate().is_ok());
        debug_assert!(out.items.iter().all(|e| !e.is_reverse()));
        Ok(out)
    }
}

/// Total weight of any complete factorization of `shape` in time-units:
/// 6pq^2 - 2q^3, independent of the elimination scheme and kernel family.
pub fn total_weight(shape: GridShape) -> u64 {
    let p = shape.p() as u64;
    let q = shape.q() as u64;
    6 * p * q * q - 2 * q * q * q
}

#[cfg(test)]
mod tests {
    use super::*;

    fn list(p: usize, q: usize, items: &[(usize, usize, usize)]) -> EliminationList {
        let shape = GridShape::new(p, q).unwrap();
        let items = items.iter().map(|&(i, piv, k)| Elimination::new(i, piv, k)).collect();
        EliminationList::new(shape, items).unwrap()
    }

    #[test]
    fn flat_tree_6x1_is_valid() {
        let l = list(6, 1, &[(2, 1, 1), (3, 1, 1), (4, 1, 1), (5, 1, 1), (6, 1, 1)]);
        assert!(l.validate().is_ok());
    }

    #[test]
    fn scrambled_6x1_is_valid() {
        let l = list(6, 1, &[(3, 1, 1), (6, 4, 1), (2, 1, 1), (5, 4, 1), (4, 1, 1)]);
        assert!(l.validate().is_ok());
    }

    #[test]
    fn row_not_ready_is_reported() {
        // elim(6,5,2) placed before rows 5 and 6 are finished in column 1.
        let l = list(
            6,
            2,
            &[
                (2, 1, 1),
                (3, 1, 1),
                (4, 1, 1),
                (6, 5, 2),
                (5, 4, 1),
                (6, 4, 1),
                (3, 2, 2),
                (4, 2, 2),
                (5, 2, 2),
            ],
        );
        let report = l.validate();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::RowNotReady { index: 3, .. })));
    }

    #[test]
    fn zeroed_pivot_is_reported() {
        let l = list(3, 1, &[(2, 1, 1), (3, 2, 1)]);
        let report = l.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(report.violations[0], Violation::PivotAlreadyZeroed { index: 1, .. }));
    }

    #[test]
    fn coverage_violations_are_reported() {
        let l = list(3, 1, &[(3, 1, 1), (3, 2, 1)]);
        let report = l.validate();
        assert!(report.violations.iter().any(|v| matches!(v, Violation::DuplicateTile { .. })));
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::MissingTile { row: 2, col: 1 })));
    }

    #[test]
    fn text_round_trip() {
        let l = list(6, 1, &[(3, 1, 1), (6, 4, 1), (2, 1, 1), (5, 4, 1), (4, 1, 1)]);
        let text = l.to_text();
        assert!(text.starts_with("6 1\n1 3 1\n"));
        let back = EliminationList::from_text(&text).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn normalize_is_identity_without_reverse() {
        let l = list(6, 1, &[(3, 1, 1), (6, 4, 1), (2, 1, 1), (5, 4, 1), (4, 1, 1)]);
        assert_eq!(l.normalize_no_reverse().unwrap(), l);
    }

    #[test]
    fn normalize_swaps_reverse_pair() {
        // Row 2 eliminated by the row below it, then row 3 by row 1.
        let l = list(3, 1, &[(2, 3, 1), (3, 1, 1)]);
        let n = l.normalize_no_reverse().unwrap();
        assert_eq!(
            n.items(),
            &[Elimination::new(3, 2, 1), Elimination::new(2, 1, 1)]
        );
        assert!(n.validate().is_ok());
    }

    #[test]
    fn normalize_rejects_invalid_input() {
        let l = list(3, 1, &[(2, 1, 1), (3, 2, 1)]);
        assert!(l.normalize_no_reverse().is_err());
    }

    #[test]
    fn total_weight_small() {
        assert_eq!(total_weight(GridShape::new(1, 1).unwrap()), 4);
        assert_eq!(total_weight(GridShape::new(15, 6).unwrap()), 2808);
        assert_eq!(total_weight(GridShape::new(40, 40).unwrap()), 256000);
    }
}
