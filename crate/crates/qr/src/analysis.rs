//! Closed-form critical paths, upper/lower bounds, the slowed-schedule
//! feasibility check behind the Fibonacci/Greedy upper bounds, and structural
//! verification that a list really factorizes the matrix.

use crate::coarse::coarse_timesteps;
use crate::error::QrError;
use crate::graph::{expand, expand_unchecked};
use crate::grid::{GridShape, KernelFamily, KernelKind};
use crate::list::EliminationList;
use crate::schemes::{generate_list, SchemeSpec};
use crate::sim::simulate;

/// Schemes with a known closed-form critical path.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormulaScheme {
    FlatTreeTt,
    FlatTreeTs,
    BinaryTreeTt,
}

/// Closed-form critical path, where one is known:
/// FlatTree TT: 2p+2 (q = 1), 22p-24 (p = q > 1), 6p+16q-22 (p > q > 1);
/// FlatTree TS: 6p-2, 30p-34, 12p+18q-32 on the same branches;
/// BinaryTree TT: (10 + 6 log2 p)q - 4 log2 p - 6 for powers of two q < p.
pub fn cp_formula(scheme: FormulaScheme, shape: GridShape) -> Option<u64> {
    let p = shape.p() as u64;
    let q = shape.q() as u64;
    match scheme {
        FormulaScheme::FlatTreeTt => Some(if q == 1 {
            2 * p + 2
        } else if p == q {
            22 * p - 24
        } else {
            6 * p + 16 * q - 22
        }),
        FormulaScheme::FlatTreeTs => Some(if q == 1 {
            6 * p - 2
        } else if p == q {
            30 * p - 34
        } else {
            12 * p + 18 * q - 32
        }),
        FormulaScheme::BinaryTreeTt => {
            if p.is_power_of_two() && q.is_power_of_two() && q < p {
                let log_p = p.trailing_zeros() as u64;
                Some((10 + 6 * log_p) * q - 4 * log_p - 6)
            } else {
                None
            }
        }
    }
}

/// Least integer at least sqrt(n).
pub fn ceil_sqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// Least integer at least log2(n), n >= 1.
pub fn ceil_log2(n: u64) -> u64 {
    n.next_power_of_two().trailing_zeros() as u64
}

/// Critical-path upper bound: 22q + 6*ceil(sqrt(2p)) for Fibonacci,
/// 22q + 6*ceil(log2 p) for Greedy.
pub fn cp_upper_bound(scheme: &SchemeSpec, shape: GridShape) -> Result<u64, QrError> {
    let p = shape.p() as u64;
    let q = shape.q() as u64;
    match scheme {
        SchemeSpec::Fibonacci => Ok(22 * q + 6 * ceil_sqrt(2 * p)),
        SchemeSpec::Greedy => Ok(22 * q + 6 * ceil_log2(p)),
        other => Err(QrError::SchemeNotApplicable(format!("{other} (upper bound)"))),
    }
}

/// Lower bound 22q - 30 on the optimal critical path of any p x q
/// factorization with p >= q >= 2.
pub fn cp_lower_bound(q: usize) -> Result<u64, QrError> {
    if q < 2 {
        return Err(QrError::InvalidArgument("lower bound requires q >= 2".into()));
    }
    Ok(22 * q as u64 - 30)
}

/// Outcome of the slowed-schedule verification.
#[derive(Debug, Clone)]
pub struct SlowedReport {
    pub scheme: SchemeSpec,
    pub shape: (usize, usize),
    /// Whether every zeroing deadline is reachable.
    pub feasible: bool,
    /// Makespan of the slowed execution (all zeroings pinned to deadlines).
    pub slowed_makespan: u64,
    /// Makespan of the ordinary as-soon-as-possible execution.
    pub actual_makespan: u64,
    /// 6x + 22(q-1), with x the coarse first-column completion step.
    pub bound: u64,
    /// First deadline violation, if infeasible.
    pub violation: Option<String>,
}

/// Verify the slowed execution underlying the Fibonacci/Greedy bounds.
///
/// The zeroing of tile (i,k) is pinned to the deadline
/// 6*coarse(2,1) + 22(k-1) - 6*(C_k - coarse(i,k)),
/// where coarse(i,k) are the scheme's coarse time-steps and C_k is the step
/// at which column k completes (the reading of "coarse(k,k)" consistent with
/// the first-column case, where the deadline reduces to 6*coarse(i,1)). The
/// check propagates earliest finish times through the TT task graph with
/// every zeroing delayed to its deadline, reports any unreachable deadline,
/// and compares both the slowed and the ordinary makespan against
/// 6x + 22(q-1).
pub fn slowed_schedule_check(scheme: &SchemeSpec, shape: GridShape) -> Result<SlowedReport, QrError> {
    if !matches!(scheme, SchemeSpec::Fibonacci | SchemeSpec::Greedy) {
        return Err(QrError::SchemeNotApplicable(format!("{scheme} (slowed schedule)")));
    }
    let coarse = coarse_timesteps(scheme, shape)?;
    let q = shape.q();
    let x = coarse.column_max(1);
    let bound = 6 * x + 22 * (q as u64 - 1);

    let list = generate_list(scheme, shape)?;
    let graph = expand(&list, KernelFamily::Tt)?;
    let actual_makespan = simulate(&graph, None)?.makespan;

    let col_completion: Vec<u64> = (0..=q).map(|k| if k == 0 { 0 } else { coarse.column_max(k) }).collect();
    let deadline = |i: usize, k: usize| -> u64 {
        6 * coarse.get(2, 1).unwrap_or(0) + 22 * (k as u64 - 1)
            - 6 * (col_completion[k] - coarse.get(i, k).unwrap())
    };

    let mut finish = vec![0u64; graph.tasks.len()];
    let mut feasible = true;
    let mut violation = None;
    for (n, t) in graph.tasks.iter().enumerate() {
        let start = graph.preds[n].iter().map(|&u| finish[u as usize]).max().unwrap_or(0);
        let earliest = start + t.weight();
        finish[n] = if t.kind == KernelKind::Ttqrt {
            let d = deadline(t.i, t.k);
            if earliest > d && feasible {
                feasible = false;
                violation = Some(format!(
                    "TTQRT({}, {}, {}) cannot finish by its deadline {d} (earliest {earliest})",
                    t.i,
                    t.piv.unwrap(),
                    t.k
                ));
            }
            earliest.max(d)
        } else {
            earliest
        };
    }
    let slowed_makespan = finish.iter().copied().max().unwrap_or(0);
    Ok(SlowedReport {
        scheme: *scheme,
        shape: (shape.p(), shape.q()),
        feasible: feasible && slowed_makespan <= bound && actual_makespan <= bound,
        slowed_makespan,
        actual_makespan,
        bound,
        violation,
    })
}

/// Symbolic tile state during a factorization replay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TileState {
    Full,
    Triangle,
    Zero,
}

/// Terminal tile-state grid of a replayed factorization.
#[derive(Debug, Clone)]
pub struct TileGrid {
    shape: GridShape,
    states: Vec<TileState>,
}

impl TileGrid {
    fn idx(&self, i: usize, k: usize) -> usize {
        (i - 1) * self.shape.q() + (k - 1)
    }

    pub fn get(&self, i: usize, k: usize) -> TileState {
        self.states[self.idx(i, k)]
    }

    /// Tiles not in the terminal pattern of a complete factorization:
    /// sub-diagonal Zero, diagonal Triangle, super-diagonal Full.
    pub fn terminal_violations(&self) -> Vec<(usize, usize, TileState)> {
        let mut out = Vec::new();
        for i in 1..=self.shape.p() {
            for k in 1..=self.shape.q() {
                let want = match i.cmp(&k) {
                    std::cmp::Ordering::Greater => TileState::Zero,
                    std::cmp::Ordering::Equal => TileState::Triangle,
                    std::cmp::Ordering::Less => TileState::Full,
                };
                if self.get(i, k) != want {
                    out.push((i, k, self.get(i, k)));
                }
            }
        }
        out
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal_violations().is_empty()
    }
}

/// Replay the kernel state effects of a list (TT family): GEQRT turns a Full
/// tile into a Triangle, TTQRT zeroes a Triangle under a Triangle, TSQRT a
/// Full square under a Triangle. A kernel applied to an incompatible state
/// signals an expansion/ordering bug; an incomplete list shows up as a
/// non-terminal grid.
pub fn structural_factorization_check(list: &EliminationList) -> Result<TileGrid, QrError> {
    let shape = list.shape();
    let graph = expand_unchecked(shape, list.items(), KernelFamily::Tt);
    let mut grid = TileGrid {
        shape,
        states: vec![TileState::Full; shape.p() * shape.q()],
    };
    for t in &graph.tasks {
        match t.kind {
            KernelKind::Geqrt => {
                let c = grid.idx(t.i, t.k);
                if grid.states[c] != TileState::Full {
                    return Err(QrError::InvalidList(format!(
                        "GEQRT({}, {}) applied to a {:?} tile",
                        t.i, t.k, grid.states[c]
                    )));
                }
                grid.states[c] = TileState::Triangle;
            }
            KernelKind::Ttqrt | KernelKind::Tsqrt => {
                let piv = t.piv.unwrap();
                let cp = grid.idx(piv, t.k);
                let ci = grid.idx(t.i, t.k);
                let want = if t.kind == KernelKind::Ttqrt { TileState::Triangle } else { TileState::Full };
                if grid.states[cp] != TileState::Triangle || grid.states[ci] != want {
                    return Err(QrError::InvalidList(format!(
                        "{}({}, {}, {}) applied to ({:?} over {:?})",
                        t.kind.name(),
                        t.i,
                        piv,
                        t.k,
                        grid.states[ci],
                        grid.states[cp]
                    )));
                }
                grid.states[ci] = TileState::Zero;
            }
            // Updates modify values, not symbolic states.
            KernelKind::Unmqr | KernelKind::Tsmqr | KernelKind::Ttmqr => {}
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Elimination;
    use crate::sim::critical_path;

    fn shape(p: usize, q: usize) -> GridShape {
        GridShape::new(p, q).unwrap()
    }

    #[test]
    fn formula_spot_values() {
        assert_eq!(cp_formula(FormulaScheme::FlatTreeTt, shape(15, 1)), Some(32));
        assert_eq!(cp_formula(FormulaScheme::FlatTreeTs, shape(5, 5)), Some(116));
        assert_eq!(cp_formula(FormulaScheme::BinaryTreeTt, shape(16, 8)), Some(250));
        assert_eq!(cp_formula(FormulaScheme::BinaryTreeTt, shape(12, 4)), None);
        assert_eq!(cp_formula(FormulaScheme::BinaryTreeTt, shape(16, 16)), None);
    }

    #[test]
    fn upper_bounds_spot_values() {
        assert_eq!(cp_upper_bound(&SchemeSpec::Greedy, shape(15, 6)).unwrap(), 156);
        assert_eq!(cp_upper_bound(&SchemeSpec::Fibonacci, shape(15, 6)).unwrap(), 168);
        assert_eq!(cp_upper_bound(&SchemeSpec::Greedy, shape(2, 1)).unwrap(), 28);
        assert_eq!(
            critical_path(&SchemeSpec::Greedy, shape(2, 1), KernelFamily::Tt).unwrap(),
            6
        );
    }

    #[test]
    fn lower_bound_formula() {
        assert!(cp_lower_bound(1).is_err());
        assert_eq!(cp_lower_bound(2).unwrap(), 14);
        assert_eq!(cp_lower_bound(6).unwrap(), 102);
        assert_eq!(cp_lower_bound(40).unwrap(), 850);
    }

    #[test]
    fn slowed_schedule_examples() {
        let r = slowed_schedule_check(&SchemeSpec::Fibonacci, shape(15, 6)).unwrap();
        assert!(r.feasible, "{:?}", r.violation);
        assert_eq!(r.bound, 140);
        assert_eq!(r.actual_makespan, 136);
        let r = slowed_schedule_check(&SchemeSpec::Greedy, shape(15, 6)).unwrap();
        assert!(r.feasible, "{:?}", r.violation);
        assert_eq!(r.bound, 134);
        assert_eq!(r.actual_makespan, 128);
        let r = slowed_schedule_check(&SchemeSpec::Greedy, shape(2, 2)).unwrap();
        assert!(r.feasible, "{:?}", r.violation);
        assert_eq!(r.bound, 28);
    }

    #[test]
    fn structural_check_terminal_patterns() {
        for s in [
            SchemeSpec::FlatTree,
            SchemeSpec::Fibonacci,
            SchemeSpec::Greedy,
            SchemeSpec::BinaryTree,
            SchemeSpec::PlasmaTree { bs: 2 },
        ] {
            let list = generate_list(&s, shape(6, 3)).unwrap();
            let grid = structural_factorization_check(&list).unwrap();
            assert!(grid.is_terminal(), "{s}");
        }
        let list = generate_list(&SchemeSpec::FlatTree, shape(1, 1)).unwrap();
        let grid = structural_factorization_check(&list).unwrap();
        assert_eq!(grid.get(1, 1), TileState::Triangle);
    }

    #[test]
    fn structural_check_names_missing_tile() {
        let full = generate_list(&SchemeSpec::Greedy, shape(6, 3)).unwrap();
        let mut items = full.items().to_vec();
        let dropped = items.pop().unwrap();
        let truncated = EliminationList::new(shape(6, 3), items).unwrap();
        let grid = structural_factorization_check(&truncated).unwrap();
        assert!(!grid.is_terminal());
        assert!(grid
            .terminal_violations()
            .iter()
            .any(|&(i, k, _)| i == dropped.row && k == dropped.col));
    }

    #[test]
    fn structural_check_rejects_bad_ordering() {
        // elim(3,1,1) then elim(2,3,1): pivot row 3 is already zero, so the
        // replay hits a TTQRT on a Zero tile.
        let items = vec![Elimination::new(3, 1, 1), Elimination::new(2, 3, 1)];
        let list = EliminationList::new(shape(3, 1), items).unwrap();
        assert!(structural_factorization_check(&list).is_err());
    }
}
