//! Per-tile zeroing-time matrices (the content of the time-step tables).

use crate::error::QrError;
use crate::grid::GridShape;

/// Time-step at which each sub-diagonal tile is zeroed out. Coarse schedules
/// use unit steps; tiled schedules use weighted time-units. Cells on or above
/// the diagonal are absent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimestepMatrix {
    shape: GridShape,
    cells: Vec<Option<u64>>,
}

impl TimestepMatrix {
    pub fn empty(shape: GridShape) -> Self {
        let cells = vec![None; shape.p() * shape.q()];
        TimestepMatrix { shape, cells }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    fn idx(&self, i: usize, k: usize) -> usize {
        debug_assert!(i >= 1 && i <= self.shape.p() && k >= 1 && k <= self.shape.q());
        (i - 1) * self.shape.q() + (k - 1)
    }

    pub fn set(&mut self, i: usize, k: usize, step: u64) {
        debug_assert!(i > k, "only sub-diagonal tiles have zeroing steps");
        let at = self.idx(i, k);
        self.cells[at] = Some(step);
    }

    pub fn get(&self, i: usize, k: usize) -> Option<u64> {
        self.cells[self.idx(i, k)]
    }

    /// Largest entry; 0 for a matrix with no sub-diagonal tiles.
    pub fn max_step(&self) -> u64 {
        self.cells.iter().flatten().copied().max().unwrap_or(0)
    }

    /// Largest entry within column k.
    pub fn column_max(&self, k: usize) -> u64 {
        (k + 1..=self.shape.p()).filter_map(|i| self.get(i, k)).max().unwrap_or(0)
    }

    /// CSV: p rows by q columns, empty cells on/above the diagonal.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 1..=self.shape.p() {
            let row: Vec<String> = (1..=self.shape.q())
                .map(|k| match self.get(i, k) {
                    Some(v) if i > k => v.to_string(),
                    _ => String::new(),
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    /// Parse the CSV form produced by `to_csv`; used for golden fixtures.
    /// Lines starting with `#` are ignored.
    pub fn from_csv(shape: GridShape, text: &str) -> Result<Self, QrError> {
        let mut m = TimestepMatrix::empty(shape);
        let mut rows = 0;
        for (i, line) in text.lines().filter(|l| !l.starts_with('#')).enumerate() {
            let i = i + 1;
            rows += 1;
            for (k, cell) in line.split(',').enumerate() {
                let k = k + 1;
                let cell = cell.trim();
                if cell.is_empty() {
                    continue;
                }
                if i > shape.p() || k > shape.q() || i <= k {
                    return Err(QrError::Parse(format!("unexpected cell at ({i}, {k})")));
                }
                let v = cell
                    .parse::<u64>()
                    .map_err(|e| QrError::Parse(format!("bad cell at ({i}, {k}): {e}")))?;
                m.set(i, k, v);
            }
        }
        if rows != shape.p() {
            return Err(QrError::Parse(format!("expected {} rows, found {rows}", shape.p())));
        }
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip() {
        let shape = GridShape::new(3, 2).unwrap();
        let mut m = TimestepMatrix::empty(shape);
        m.set(2, 1, 1);
        m.set(3, 1, 2);
        m.set(3, 2, 3);
        let csv = m.to_csv();
        assert_eq!(csv, ",\n1,\n2,3\n");
        assert_eq!(TimestepMatrix::from_csv(shape, &csv).unwrap(), m);
        assert_eq!(m.max_step(), 3);
        assert_eq!(m.column_max(1), 2);
    }
}
