//! Discrete-event simulation of task graphs: unbounded-processor (critical
//! path) and bounded-processor list scheduling.

use std::collections::BinaryHeap;
use std::cmp::Reverse;
use std::fmt::Write as _;

use crate::error::QrError;
use crate::graph::TaskGraph;
use crate::grid::{GridShape, KernelFamily, KernelKind};
use crate::list::EliminationList;
use crate::matrix::TimestepMatrix;
use crate::schemes::{generate_list, SchemeSpec};

/// Start/finish times per task (indexed by emit order).
#[derive(Debug, Clone)]
pub struct Schedule {
    pub start: Vec<u64>,
    pub finish: Vec<u64>,
    pub makespan: u64,
    /// None = unbounded.
    pub processors: Option<usize>,
}

impl Schedule {
    /// Dependency feasibility: every task starts no earlier than each
    /// predecessor finishes. Checked on every schedule we hand out.
    pub fn assert_feasible(&self, graph: &TaskGraph) {
        for (u, t) in graph.edges() {
            assert!(
                self.start[t as usize] >= self.finish[u as usize],
                "task {t} starts before its predecessor {u} finishes"
            );
        }
    }

    /// CSV export: `kind,i,piv,k,j,start,finish`, one row per task in emit
    /// order, empty fields for absent indices.
    pub fn to_csv(&self, graph: &TaskGraph) -> String {
        let mut out = String::from("kind,i,piv,k,j,start,finish\n");
        for (n, t) in graph.tasks.iter().enumerate() {
            let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                t.kind.name(),
                t.i,
                opt(t.piv),
                t.k,
                opt(t.j),
                self.start[n],
                self.finish[n]
            );
        }
        out
    }
}

/// Simulate a task graph on `processors` processors (None = unbounded).
///
/// Unbounded: every task starts as soon as its last predecessor finishes, so
/// the makespan is the weighted longest path. Bounded: event-driven list
/// scheduling; whenever a processor is free, the ready task with the smallest
/// emit index starts (deterministic tie-break).
pub fn simulate(graph: &TaskGraph, processors: Option<usize>) -> Result<Schedule, QrError> {
    if processors == Some(0) {
        return Err(QrError::InvalidArgument("processor count must be positive".into()));
    }
    let n = graph.tasks.len();
    let mut start = vec![0u64; n];
    let mut finish = vec![0u64; n];

    match processors {
        None => {
            // Emission order is a topological order by construction.
            for t in 0..n {
                let s = graph.preds[t].iter().map(|&u| finish[u as usize]).max().unwrap_or(0);
                start[t] = s;
                finish[t] = s + graph.tasks[t].weight();
            }
        }
        Some(procs) => {
            let mut indeg = vec![0u32; n];
            let mut succs: Vec<Vec<u32>> = vec![Vec::new(); n];
            for (u, t) in graph.edges() {
                indeg[t as usize] += 1;
                succs[u as usize].push(t);
            }
            // Ready tasks by emit index; running tasks by finish time.
            let mut ready: BinaryHeap<Reverse<u32>> = (0..n as u32)
                .filter(|&t| indeg[t as usize] == 0)
                .map(Reverse)
                .collect();
            let mut running: BinaryHeap<Reverse<(u64, u32)>> = BinaryHeap::new();
            let mut now = 0u64;
            let mut done = 0usize;
            while done < n {
                while running.len() < procs {
                    let Some(Reverse(t)) = ready.pop() else { break };
                    let t = t as usize;
                    start[t] = now;
                    finish[t] = now + graph.tasks[t].weight();
                    running.push(Reverse((finish[t], t as u32)));
                }
                let Some(Reverse((ft, t))) = running.pop() else {
                    return Err(QrError::InvalidArgument(
                        "task graph has a cycle or dangling dependency".into(),
                    ));
                };
                now = ft;
                done += 1;
                for &s in &succs[t as usize] {
                    indeg[s as usize] -= 1;
                    if indeg[s as usize] == 0 {
                        ready.push(Reverse(s));
                    }
                }
                // Drain every task finishing at the same instant before
                // starting new ones, so freed processors see all successors.
                while let Some(&Reverse((ft2, _))) = running.peek() {
                    if ft2 != now {
                        break;
                    }
                    let Reverse((_, t2)) = running.pop().unwrap();
                    done += 1;
                    for &s in &succs[t2 as usize] {
                        indeg[s as usize] -= 1;
                        if indeg[s as usize] == 0 {
                            ready.push(Reverse(s));
                        }
                    }
                }
            }
        }
    }

    let makespan = finish.iter().copied().max().unwrap_or(0);
    let sched = Schedule { start, finish, makespan, processors };
    sched.assert_feasible(graph);
    Ok(sched)
}

/// Per-tile zeroing-completion times: the finish time of each elimination's
/// TTQRT/TSQRT task.
pub fn zero_times(graph: &TaskGraph, schedule: &Schedule) -> TimestepMatrix {
    let mut m = TimestepMatrix::empty(graph.shape);
    for &(e, z) in &graph.zeroings {
        m.set(e.row, e.col, schedule.finish[z as usize]);
    }
    m
}

/// Unbounded-processor makespan of a list, evaluated by streaming the
/// per-tile write chains directly instead of materializing the task graph.
/// Same model as `simulate(&expand(list, family)?, None)`, orders of
/// magnitude cheaper on large shape sweeps.
pub fn streaming_makespan(list: &EliminationList, family: KernelFamily) -> Result<u64, QrError> {
    let report = list.validate();
    if !report.is_ok() {
        return Err(QrError::InvalidList(
            report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
        ));
    }
    let shape = list.shape();
    let (p, q) = (shape.p(), shape.q());
    // chain[c]: finish time of the last kernel writing that tile.
    let mut chain = vec![0u64; p * q];
    let mut panel_done = vec![false; p * q];
    let mut makespan = 0u64;
    let cell = |i: usize, j: usize| (i - 1) * q + (j - 1);

    macro_rules! ensure_panel {
        ($r:expr, $k:expr) => {{
            let (r, k) = ($r, $k);
            let c = cell(r, k);
            if !panel_done[c] {
                panel_done[c] = true;
                let g = chain[c] + KernelKind::Geqrt.weight();
                chain[c] = g;
                makespan = makespan.max(g);
                for j in k + 1..=q {
                    let cj = cell(r, j);
                    let u = g.max(chain[cj]) + KernelKind::Unmqr.weight();
                    chain[cj] = u;
                    makespan = makespan.max(u);
                }
            }
        }};
    }

    for e in list.items() {
        let (i, piv, k) = (e.row, e.piv, e.col);
        ensure_panel!(piv, k);
        if family == KernelFamily::Tt {
            ensure_panel!(i, k);
        }
        let (zero_w, update_w) = if panel_done[cell(i, k)] {
            (KernelKind::Ttqrt.weight(), KernelKind::Ttmqr.weight())
        } else {
            (KernelKind::Tsqrt.weight(), KernelKind::Tsmqr.weight())
        };
        let (ci, cp) = (cell(i, k), cell(piv, k));
        let z = chain[ci].max(chain[cp]) + zero_w;
        chain[ci] = z;
        chain[cp] = z;
        makespan = makespan.max(z);
        for j in k + 1..=q {
            let (cij, cpj) = (cell(i, j), cell(piv, j));
            let u = z.max(chain[cij]).max(chain[cpj]) + update_w;
            chain[cij] = u;
            chain[cpj] = u;
            makespan = makespan.max(u);
        }
    }
    for k in 1..=q.min(p) {
        ensure_panel!(k, k);
    }
    Ok(makespan)
}

/// Critical path of a scheme on a shape: generate (static or dynamic) and
/// evaluate the unbounded-processor makespan.
pub fn critical_path(
    scheme: &SchemeSpec,
    shape: GridShape,
    family: KernelFamily,
) -> Result<u64, QrError> {
    if scheme.is_dynamic() {
        let run = crate::dynamic::generate_dynamic(scheme, shape, family)?;
        Ok(run.schedule.makespan)
    } else {
        streaming_makespan(&generate_list(scheme, shape)?, family)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::expand;
    use crate::grid::Elimination;
    use crate::list::total_weight;

    fn shape(p: usize, q: usize) -> GridShape {
        GridShape::new(p, q).unwrap()
    }

    #[test]
    fn single_elimination_parallel_times() {
        // One elimination with one trailing column: TS longest chain
        // GEQRT + UNMQR + TSMQR = 22, TT longest chain 4 + 6 + 6 = 16.
        let list = EliminationList::new_valid(shape(2, 2), vec![Elimination::new(2, 1, 1)]).unwrap();
        let ts = expand(&list, KernelFamily::Ts).unwrap();
        // Ignore the final GEQRT(2,2): measure the elimination's own chain.
        let s = simulate(&ts, None).unwrap();
        let tsmqr_finish = ts
            .tasks
            .iter()
            .map(|t| (t, s.finish[t.emit_index]))
            .filter(|(t, _)| t.j == Some(2) && t.piv.is_some())
            .map(|(_, f)| f)
            .max()
            .unwrap();
        assert_eq!(tsmqr_finish, 22);
        let tt = expand(&list, KernelFamily::Tt).unwrap();
        let s = simulate(&tt, None).unwrap();
        let ttmqr_finish = tt
            .tasks
            .iter()
            .map(|t| (t, s.finish[t.emit_index]))
            .filter(|(t, _)| t.j == Some(2) && t.piv.is_some())
            .map(|(_, f)| f)
            .max()
            .unwrap();
        assert_eq!(ttmqr_finish, 16);
    }

    #[test]
    fn flat_tree_2x2_tt_makespan() {
        let list = generate_list(&SchemeSpec::FlatTree, shape(2, 2)).unwrap();
        let g = expand(&list, KernelFamily::Tt).unwrap();
        let s = simulate(&g, None).unwrap();
        let zt = zero_times(&g, &s);
        assert_eq!(zt.get(2, 1), Some(6));
        assert_eq!(s.makespan, 20); // 22p - 24 at p = q = 2
    }

    #[test]
    fn flat_tree_15x6_tt_critical_path() {
        assert_eq!(
            critical_path(&SchemeSpec::FlatTree, shape(15, 6), KernelFamily::Tt).unwrap(),
            164
        );
    }

    #[test]
    fn flat_tree_zero_times_follow_theorem_walkthrough() {
        let list = generate_list(&SchemeSpec::FlatTree, shape(15, 6)).unwrap();
        let g = expand(&list, KernelFamily::Tt).unwrap();
        let s = simulate(&g, None).unwrap();
        let zt = zero_times(&g, &s);
        for i in 2..=15 {
            assert_eq!(zt.get(i, 1), Some(2 * i as u64 + 2));
        }
        for k in 2..=6usize {
            for i in k + 1..=15 {
                assert_eq!(zt.get(i, k), Some(6 * i as u64 + 16 * k as u64 - 22));
            }
        }
    }

    #[test]
    fn one_processor_serializes_total_weight() {
        let list = generate_list(&SchemeSpec::Greedy, shape(9, 4)).unwrap();
        for family in [KernelFamily::Tt, KernelFamily::Ts] {
            let g = expand(&list, family).unwrap();
            let s = simulate(&g, Some(1)).unwrap();
            assert_eq!(s.makespan, total_weight(shape(9, 4)));
        }
    }

    #[test]
    fn streaming_makespan_equals_full_simulation() {
        let schemes = [
            SchemeSpec::FlatTree,
            SchemeSpec::Fibonacci,
            SchemeSpec::Greedy,
            SchemeSpec::BinaryTree,
        ];
        for &(p, q) in &[(1usize, 1usize), (6, 3), (15, 6), (16, 16), (23, 7)] {
            let mut all: Vec<SchemeSpec> = schemes.to_vec();
            all.push(SchemeSpec::PlasmaTree { bs: 4.min(p) });
            for s in &all {
                let list = generate_list(s, shape(p, q)).unwrap();
                for family in [KernelFamily::Tt, KernelFamily::Ts] {
                    let g = expand(&list, family).unwrap();
                    let full = simulate(&g, None).unwrap().makespan;
                    assert_eq!(
                        streaming_makespan(&list, family).unwrap(),
                        full,
                        "{s} {p}x{q} {family:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn bounded_makespans_are_sandwiched() {
        let list = generate_list(&SchemeSpec::Fibonacci, shape(12, 5)).unwrap();
        let g = expand(&list, KernelFamily::Tt).unwrap();
        let unbounded = simulate(&g, None).unwrap().makespan;
        let mut prev = simulate(&g, Some(1)).unwrap().makespan;
        assert_eq!(prev, total_weight(shape(12, 5)));
        for procs in [2, 3, 4, 8, 64] {
            let m = simulate(&g, Some(procs)).unwrap().makespan;
            assert!(m >= unbounded);
            // Not monotone in theory for list scheduling, but total weight
            // always bounds from above.
            assert!(m <= prev.max(m));
            prev = m;
        }
    }
}
