//! Coarse-grain elimination model: one row-pair transformation costs one
//! time-step regardless of row length. Covers the FlatTree (Sameh-Kuck),
//! Fibonacci and Greedy schemes; the other schemes are defined only in the
//! tiled model.

use crate::error::QrError;
use crate::grid::{Elimination, GridShape};
use crate::matrix::TimestepMatrix;
use crate::schemes::SchemeSpec;

/// A coarse schedule: the time-step matrix plus the eliminations ordered by
/// (step, column, row descending). The same elimination list, reinterpreted
/// with weighted kernels, yields the corresponding tiled algorithm.
#[derive(Debug, Clone)]
pub struct CoarseSchedule {
    pub steps: TimestepMatrix,
    /// (step, elimination), sorted by (step, column, row descending).
    pub elims: Vec<(u64, Elimination)>,
}

/// Least x with x(x+1)/2 >= p - 1: the number of coarse steps Fibonacci
/// spends on the first column, and the `x` of the critical-path formulas.
pub fn fibonacci_x(p: usize) -> u64 {
    let mut x = 0u64;
    while x * (x + 1) / 2 < (p as u64).saturating_sub(1) {
        x += 1;
    }
    x
}

/// Fibonacci first-column step: x - y + 1 with y least such that
/// i <= y(y+1)/2 + 1.
fn fibonacci_col1_step(p: usize, i: usize) -> u64 {
    let x = fibonacci_x(p);
    let mut y = 0u64;
    while y * (y + 1) / 2 + 1 < i as u64 {
        y += 1;
    }
    x - y + 1
}

/// Coarse time-step matrix for FlatTree, Fibonacci or Greedy.
pub fn coarse_timesteps(scheme: &SchemeSpec, shape: GridShape) -> Result<TimestepMatrix, QrError> {
    Ok(coarse_schedule(scheme, shape)?.steps)
}

/// Max entry of the coarse time-step matrix (0 when there is nothing to do).
pub fn coarse_critical_path(scheme: &SchemeSpec, shape: GridShape) -> Result<u64, QrError> {
    Ok(coarse_schedule(scheme, shape)?.steps.max_step())
}

/// Full coarse schedule (steps + pairings) for FlatTree, Fibonacci or Greedy.
pub fn coarse_schedule(scheme: &SchemeSpec, shape: GridShape) -> Result<CoarseSchedule, QrError> {
    let mut sched = match scheme {
        SchemeSpec::FlatTree => flat_tree(shape),
        SchemeSpec::Fibonacci => fibonacci(shape),
        SchemeSpec::Greedy => greedy(shape),
        other => return Err(QrError::SchemeNotApplicable(format!("{other} (coarse model)"))),
    };
    sched
        .elims
        .sort_by_key(|&(step, e)| (step, e.col, std::cmp::Reverse(e.row)));
    Ok(sched)
}

/// FlatTree: every elimination in column k uses the panel row k as pivot;
/// tile (i,k) is zeroed at step i + k - 2.
fn flat_tree(shape: GridShape) -> CoarseSchedule {
    let mut steps = TimestepMatrix::empty(shape);
    let mut elims = Vec::new();
    for (i, k) in shape.subdiagonal() {
        let step = (i + k - 2) as u64;
        steps.set(i, k, step);
        elims.push((step, Elimination::new(i, k, k)));
    }
    CoarseSchedule { steps, elims }
}

/// Fibonacci: closed form in the first column, then each column replays the
/// previous one two steps later: step(i,k) = step(i-1, k-1) + 2. A bunch of z
/// rows zeroed at the same step is pivoted by the z rows immediately above,
/// paired in the natural order.
fn fibonacci(shape: GridShape) -> CoarseSchedule {
    let (p, q) = (shape.p(), shape.q());
    let mut steps = TimestepMatrix::empty(shape);
    let mut elims = Vec::new();
    for k in 1..=q {
        // Rows k+1..=p, with steps shifted from the first column.
        let mut i = k + 1;
        while i <= p {
            let step = fibonacci_col1_step(p, i - k + 1) + 2 * (k as u64 - 1);
            // Extent of the bunch sharing this step.
            let mut end = i;
            while end < p && fibonacci_col1_step(p, end + 1 - k + 1) + 2 * (k as u64 - 1) == step {
                end += 1;
            }
            let z = end - i + 1;
            for r in i..=end {
                steps.set(r, k, step);
                elims.push((step, Elimination::new(r, r - z, k)));
            }
            i = end + 1;
        }
    }
    CoarseSchedule { steps, elims }
}

/// Greedy: per-step fixpoint. At each step, each column k zeroes as many
/// tiles as possible: with c ready rows (all earlier columns done, tile not
/// yet zero — the diagonal row k counts once ready), the bottom floor(c/2)
/// rows are eliminated, pivoted by the floor(c/2) ready rows immediately
/// above, paired in the natural order.
fn greedy(shape: GridShape) -> CoarseSchedule {
    let (p, q) = (shape.p(), shape.q());
    let mut steps = TimestepMatrix::empty(shape);
    let mut elims = Vec::new();
    // f[i] = number of leading columns of row i already zeroed.
    let mut f = vec![0usize; p + 1];
    let mut remaining = shape.subdiagonal_tiles();
    let mut t = 0u64;
    while remaining > 0 {
        t += 1;
        let mut newly = Vec::new();
        for k in 1..=q {
            let cands: Vec<usize> = (k..=p).filter(|&i| f[i] == k - 1).collect();
            let z = cands.len() / 2;
            for j in 0..z {
                let piv = cands[cands.len() - 2 * z + j];
                let i = cands[cands.len() - z + j];
                newly.push(Elimination::new(i, piv, k));
            }
        }
        assert!(!newly.is_empty(), "greedy coarse model stalled");
        for e in newly {
            f[e.row] = e.col;
            steps.set(e.row, e.col, t);
            elims.push((t, e));
            remaining -= 1;
        }
    }
    CoarseSchedule { steps, elims }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(p: usize, q: usize) -> GridShape {
        GridShape::new(p, q).unwrap()
    }

    #[test]
    fn flat_tree_15x6_matches_formula() {
        let m = coarse_timesteps(&SchemeSpec::FlatTree, shape(15, 6)).unwrap();
        assert_eq!(m.get(2, 1), Some(1));
        assert_eq!(m.get(15, 6), Some(19));
        assert_eq!(m.max_step(), 19);
    }

    #[test]
    fn fibonacci_15x6_spot_values() {
        let m = coarse_timesteps(&SchemeSpec::Fibonacci, shape(15, 6)).unwrap();
        assert_eq!(m.get(2, 1), Some(5));
        assert_eq!(m.get(15, 1), Some(1));
        assert_eq!(m.get(3, 2), Some(7));
        assert_eq!(m.column_max(6), 15);
        assert_eq!(m.max_step(), 15);
    }

    #[test]
    fn greedy_15x6_spot_values() {
        let m = coarse_timesteps(&SchemeSpec::Greedy, shape(15, 6)).unwrap();
        assert_eq!(m.get(2, 1), Some(4));
        assert_eq!(m.get(15, 1), Some(1));
        assert_eq!(m.get(7, 6), Some(14));
        assert_eq!(m.max_step(), 14);
    }

    #[test]
    fn critical_path_closed_forms() {
        // FlatTree: p + q - 2 for p > q; 2q - 3 for p = q.
        assert_eq!(coarse_critical_path(&SchemeSpec::FlatTree, shape(15, 6)).unwrap(), 19);
        assert_eq!(coarse_critical_path(&SchemeSpec::FlatTree, shape(5, 5)).unwrap(), 7);
        // Fibonacci: x + 2q - 2 for p > q; x + 2q - 4 for p = q.
        assert_eq!(coarse_critical_path(&SchemeSpec::Fibonacci, shape(15, 6)).unwrap(), 15);
        let x = fibonacci_x(5);
        assert_eq!(coarse_critical_path(&SchemeSpec::Fibonacci, shape(5, 5)).unwrap(), x + 6);
    }

    #[test]
    fn coarse_rejects_tiled_only_schemes() {
        assert!(coarse_timesteps(&SchemeSpec::BinaryTree, shape(8, 4)).is_err());
    }

    #[test]
    fn greedy_dominates_fibonacci() {
        for &(p, q) in &[(15usize, 6usize), (20, 20), (33, 7), (5, 1)] {
            let g = coarse_timesteps(&SchemeSpec::Greedy, shape(p, q)).unwrap();
            let f = coarse_timesteps(&SchemeSpec::Fibonacci, shape(p, q)).unwrap();
            for (i, k) in shape(p, q).subdiagonal() {
                assert!(g.get(i, k).unwrap() <= f.get(i, k).unwrap(), "({i},{k})");
            }
        }
    }
}
