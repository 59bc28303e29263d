//! Core domain types: tile grids, eliminations, kernels.
//!
//! All indices are 1-based to match the conventional presentation of tiled QR
//! algorithms (tile (i, k) is row i, column k; the tile (i, k) with i > k is
//! "sub-diagonal" and must be zeroed out by exactly one elimination).

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::QrError;

/// Tile-grid dimensions of the matrix being factored: p tile rows by q tile
/// columns, with p >= q >= 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridShape {
    p: usize,
    q: usize,
}

impl GridShape {
    pub fn new(p: usize, q: usize) -> Result<Self, QrError> {
        if q < 1 || p < q {
            return Err(QrError::InvalidShape { p, q });
        }
        Ok(GridShape { p, q })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> usize {
        self.q
    }

    /// Number of sub-diagonal tiles, i.e. the length of any complete
    /// elimination list for this shape.
    pub fn subdiagonal_tiles(&self) -> usize {
        // Columns k = 1..=q each own tiles (k+1..=p, k).
        (1..=self.q).map(|k| self.p - k).sum()
    }

    /// Iterate sub-diagonal tile positions (i, k) with i > k, column-major.
    pub fn subdiagonal(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (p, q) = (self.p, self.q);
        (1..=q).flat_map(move |k| (k + 1..=p).map(move |i| (i, k)))
    }
}

impl fmt::Display for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.p, self.q)
    }
}

/// One zeroing transformation elim(i, piv, k): rows `row` and `piv` are
/// combined to zero out tile (`row`, `col`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Elimination {
    pub row: usize,
    pub piv: usize,
    pub col: usize,
}

impl Elimination {
    pub fn new(row: usize, piv: usize, col: usize) -> Self {
        Elimination { row, piv, col }
    }

    /// Structural index-range checks against a shape: 1 <= col <= min(p,q),
    /// col <= piv <= p, col < row <= p, row != piv.
    pub fn check_bounds(&self, shape: GridShape) -> Result<(), QrError> {
        let ok = self.col >= 1
            && self.col <= shape.p().min(shape.q())
            && self.piv >= self.col
            && self.piv <= shape.p()
            && self.row > self.col
            && self.row <= shape.p()
            && self.row != self.piv;
        if ok {
            Ok(())
        } else {
            Err(QrError::InvalidElimination {
                row: self.row,
                piv: self.piv,
                col: self.col,
            })
        }
    }

    /// A reverse elimination uses a pivot *below* the row it zeroes.
    pub fn is_reverse(&self) -> bool {
        self.piv > self.row
    }
}

impl fmt::Display for Elimination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "elim({}, {}, {})", self.row, self.piv, self.col)
    }
}

/// The six tiled-QR kernels with their integer weights in units of
/// n_b^3 / 3 flops (Table 1 of the underlying algorithm catalog).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelKind {
    /// Triangularize a full tile.
    Geqrt,
    /// Zero a square tile under a triangle (TS panel kernel).
    Tsqrt,
    /// Zero a triangular tile under a triangle (TT panel kernel).
    Ttqrt,
    /// Trailing update after GEQRT.
    Unmqr,
    /// Trailing update after TSQRT.
    Tsmqr,
    /// Trailing update after TTQRT.
    Ttmqr,
}

impl KernelKind {
    pub fn weight(&self) -> u64 {
        match self {
            KernelKind::Geqrt => 4,
            KernelKind::Tsqrt => 6,
            KernelKind::Ttqrt => 2,
            KernelKind::Unmqr => 6,
            KernelKind::Tsmqr => 12,
            KernelKind::Ttmqr => 6,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            KernelKind::Geqrt => "GEQRT",
            KernelKind::Tsqrt => "TSQRT",
            KernelKind::Ttqrt => "TTQRT",
            KernelKind::Unmqr => "UNMQR",
            KernelKind::Tsmqr => "TSMQR",
            KernelKind::Ttmqr => "TTMQR",
        }
    }
}

/// Which kernel family an elimination list is executed with: TT ("triangle on
/// top of triangle", more parallelism) or TS ("triangle on top of square",
/// more locality).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelFamily {
    Tt,
    Ts,
}

impl KernelFamily {
    pub fn name(&self) -> &'static str {
        match self {
            KernelFamily::Tt => "tt",
            KernelFamily::Ts => "ts",
        }
    }
}

impl std::str::FromStr for KernelFamily {
    type Err = QrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tt" | "TT" => Ok(KernelFamily::Tt),
            "ts" | "TS" => Ok(KernelFamily::Ts),
            _ => Err(QrError::Parse(format!("unknown kernel family `{s}`"))),
        }
    }
}

/// One weighted kernel instance in an expanded task graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Task {
    pub kind: KernelKind,
    /// Row the kernel operates on (the modified/eliminated row).
    pub i: usize,
    /// Pivot row; present exactly for TSQRT/TTQRT/TSMQR/TTMQR.
    pub piv: Option<usize>,
    /// Panel column.
    pub k: usize,
    /// Update column (j > k); present exactly for UNMQR/TSMQR/TTMQR.
    pub j: Option<usize>,
    /// Position in the expansion's emission order.
    pub emit_index: usize,
}

impl Task {
    pub fn weight(&self) -> u64 {
        self.kind.weight()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_rejects_p_less_than_q() {
        assert!(GridShape::new(3, 4).is_err());
        assert!(GridShape::new(0, 0).is_err());
        assert!(GridShape::new(1, 1).is_ok());
    }

    #[test]
    fn kernel_weights_match_catalog() {
        assert_eq!(KernelKind::Geqrt.weight(), 4);
        assert_eq!(KernelKind::Tsqrt.weight(), 6);
        assert_eq!(KernelKind::Ttqrt.weight(), 2);
        assert_eq!(KernelKind::Unmqr.weight(), 6);
        assert_eq!(KernelKind::Tsmqr.weight(), 12);
        assert_eq!(KernelKind::Ttmqr.weight(), 6);
    }

    #[test]
    fn subdiagonal_count() {
        let s = GridShape::new(15, 6).unwrap();
        assert_eq!(s.subdiagonal_tiles(), 69);
        assert_eq!(s.subdiagonal().count(), 69);
    }

    #[test]
    fn elimination_bounds() {
        let s = GridShape::new(6, 3).unwrap();
        assert!(Elimination::new(4, 2, 2).check_bounds(s).is_ok());
        // pivot above the panel column
        assert!(Elimination::new(4, 1, 2).check_bounds(s).is_err());
        // on-diagonal "elimination"
        assert!(Elimination::new(2, 1, 2).check_bounds(s).is_err());
        assert!(Elimination::new(4, 4, 2).check_bounds(s).is_err());
    }
}
