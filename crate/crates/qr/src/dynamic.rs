//! Simulation-coupled elimination policies: ASAP and Grasap.
//!
//! ASAP runs the event-driven simulation and the pairing policy jointly: at
//! every kernel-completion event, each column pairs its ready rows — with 2s
//! rows ready, the row closest to the diagonal pairs with row s+1, the second
//! with row s+2, and so on; with an odd count the row closest to the diagonal
//! waits. A row is ready in a column once its factor kernel there has
//! finished (TT) or its tile is up to date (TS), and rows stay unavailable
//! while engaged in a running zeroing kernel.
//!
//! Grasap(kswitch) forces the static Greedy pairings on columns 1..=q-kswitch
//! and applies the ASAP rule on the last kswitch columns; Grasap(0) is Greedy
//! and Grasap(q) is ASAP.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::QrError;
use crate::graph::{GraphBuilder, TaskGraph};
use crate::grid::{Elimination, GridShape, KernelFamily};
use crate::list::EliminationList;
use crate::schemes::{generate_list, SchemeSpec};
use crate::sim::{simulate, Schedule};

/// Outcome of running a dynamic policy: the realized elimination list, the
/// task graph in emission order, and its unbounded-processor schedule.
#[derive(Debug, Clone)]
pub struct DynamicRun {
    pub list: EliminationList,
    pub graph: TaskGraph,
    pub schedule: Schedule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum EvKind {
    /// Row became ready in its current column.
    Ready { row: usize },
    /// Zeroing kernel of elim(row, piv, col) finished.
    ZeroDone { row: usize, piv: usize, col: usize },
}

/// Run ASAP or Grasap on a shape and return the realized list and schedule.
pub fn generate_dynamic(
    policy: &SchemeSpec,
    shape: GridShape,
    family: KernelFamily,
) -> Result<DynamicRun, QrError> {
    let q = shape.q();
    let kswitch = match policy {
        SchemeSpec::Asap => q,
        SchemeSpec::Grasap { kswitch } => {
            if *kswitch > q {
                return Err(QrError::InvalidArgument(format!(
                    "grasap kswitch={kswitch} exceeds q={q}"
                )));
            }
            *kswitch
        }
        other => return Err(QrError::SchemeNotApplicable(format!("{other} (dynamic policy)"))),
    };
    // Columns 1..=forced_cols replay the static Greedy pairings.
    let forced_cols = q - kswitch;
    let greedy_items: Vec<Elimination> = if forced_cols > 0 {
        generate_list(&SchemeSpec::Greedy, shape)?.items().to_vec()
    } else {
        Vec::new()
    };
    // Per forced column: (elimination, started) in static list order.
    let mut forced: Vec<Vec<(Elimination, bool)>> = vec![Vec::new(); forced_cols + 1];
    for &e in greedy_items.iter().filter(|e| e.col <= forced_cols) {
        forced[e.col].push((e, false));
    }

    let p = shape.p();
    let mut b = GraphBuilder::new(shape, family);
    let mut start: Vec<u64> = Vec::new();
    let mut finish: Vec<u64> = Vec::new();
    // col_of[r] = column row r currently lives in (0 = retired).
    let mut col_of = vec![0usize; p + 1];
    let mut avail = vec![false; p + 1];
    let mut busy = vec![false; p + 1];
    let mut events: BinaryHeap<Reverse<(u64, u64, EvKind)>> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut dyn_items: Vec<Elimination> = Vec::new();
    let mut decided = 0usize;
    let total = shape.subdiagonal_tiles();

    // Compute times for tasks emitted since the last call; with unbounded
    // processors a task's start is fixed at emission.
    let sync = |b: &GraphBuilder, start: &mut Vec<u64>, finish: &mut Vec<u64>| {
        for n in finish.len()..b.num_tasks() {
            let s = b.task_preds()[n].iter().map(|&u| finish[u as usize]).max().unwrap_or(0);
            start.push(s);
            finish.push(s + b.tasks()[n].weight());
        }
    };

    // Row r starts working on column k: emit its factor kernel (TT) and
    // schedule the readiness event.
    macro_rules! enter {
        ($r:expr, $k:expr) => {{
            let (r, k) = ($r, $k);
            col_of[r] = k;
            avail[r] = false;
            if family == KernelFamily::Tt {
                b.ensure_panel(r, k);
                sync(&b, &mut start, &mut finish);
            }
            let ready_at = b.last_writer_at(r, k).map(|w| finish[w as usize]).unwrap_or(0);
            seq += 1;
            events.push(Reverse((ready_at, seq, EvKind::Ready { row: r })));
        }};
    }

    for r in 1..=p {
        enter!(r, 1);
    }

    while decided < total {
        let Some(&Reverse((t, _, _))) = events.peek() else {
            unreachable!("dynamic policy stalled with eliminations pending");
        };
        // Apply every event at this instant before re-evaluating columns.
        while let Some(&Reverse((t2, _, kind))) = events.peek() {
            if t2 != t {
                break;
            }
            events.pop();
            match kind {
                EvKind::Ready { row } => avail[row] = true,
                EvKind::ZeroDone { row, piv, col } => {
                    busy[piv] = false;
                    avail[piv] = true;
                    busy[row] = false;
                    if col + 1 <= q {
                        enter!(row, col + 1);
                    } else {
                        col_of[row] = 0;
                    }
                }
            }
        }

        for k in 1..=q {
            // Ready rows of column k, closest to the diagonal first.
            let ready_rows =
                |col_of: &[usize], avail: &[bool], busy: &[bool]| -> Vec<usize> {
                    (k..=p).filter(|&r| col_of[r] == k && avail[r] && !busy[r]).collect()
                };
            let mut pairs: Vec<(usize, usize)> = Vec::new();
            if k <= forced_cols {
                // Static Greedy pairings, respecting list order per row: an
                // unstartable item blocks both its rows so later items cannot
                // overtake a chained predecessor.
                let mut blocked = vec![false; p + 1];
                for r in 1..=p {
                    blocked[r] = !(col_of[r] == k && avail[r] && !busy[r]);
                }
                for (e, started) in forced[k].iter_mut() {
                    if *started {
                        continue;
                    }
                    if !blocked[e.row] && !blocked[e.piv] {
                        *started = true;
                        pairs.push((e.row, e.piv));
                    }
                    blocked[e.row] = true;
                    blocked[e.piv] = true;
                }
            } else {
                let rows = ready_rows(&col_of, &avail, &busy);
                let rest = if rows.len() % 2 == 0 { &rows[..] } else { &rows[1..] };
                let s = rest.len() / 2;
                for i in 0..s {
                    pairs.push((rest[s + i], rest[i]));
                }
            }
            for (row, piv) in pairs {
                let e = Elimination::new(row, piv, k);
                b.emit_elimination(e);
                sync(&b, &mut start, &mut finish);
                let z = b.zeroings().last().expect("zeroing just emitted").1;
                busy[row] = true;
                busy[piv] = true;
                avail[row] = false;
                avail[piv] = false;
                decided += 1;
                if k > forced_cols {
                    dyn_items.push(e);
                }
                seq += 1;
                events.push(Reverse((
                    finish[z as usize],
                    seq,
                    EvKind::ZeroDone { row, piv, col: k },
                )));
            }
        }
    }

    b.finish_diagonal();
    let graph = b.build();
    let schedule = simulate(&graph, None)?;

    // Realized list: forced columns in static Greedy order, then the
    // dynamically decided eliminations in decision order. Every per-row
    // predecessor of a dynamic item lies in an earlier column, so the
    // concatenation is valid.
    let mut items: Vec<Elimination> =
        greedy_items.into_iter().filter(|e| e.col <= forced_cols).collect();
    items.extend(dyn_items);
    let list = EliminationList::new_valid(shape, items)?;
    Ok(DynamicRun { list, graph, schedule })
}
