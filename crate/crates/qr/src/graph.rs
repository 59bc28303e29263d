//! Expansion of an elimination list into the weighted kernel task graph.
//!
//! Dependencies come from two sources. Intra-elimination edges (factor kernel
//! before its updates, panel GEQRT before the zeroing kernel) are explicit.
//! Cross-elimination ordering is derived by serializing, in emission order,
//! every pair of kernels that write the same data tile: GEQRT/TSQRT/TTQRT
//! write the column-k tiles of the rows they touch, the update kernels write
//! the column-j tiles. Update kernels read the reflector/T data of a panel
//! without conflicting with a later factor kernel writing that tile (the
//! NODEP relaxation), so reads never create edges — the per-tile write chains
//! carry everything else transitively.

use smallvec::SmallVec;

use crate::error::QrError;
use crate::grid::{Elimination, GridShape, KernelFamily, KernelKind, Task};
use crate::list::EliminationList;

pub type Preds = SmallVec<[u32; 4]>;

/// Weighted kernel DAG expanded from an elimination list.
#[derive(Debug, Clone)]
pub struct TaskGraph {
    pub shape: GridShape,
    pub family: KernelFamily,
    /// Tasks in emission order; `tasks[n].emit_index == n`.
    pub tasks: Vec<Task>,
    /// Predecessor emit-indices per task; always smaller than the task's own
    /// index, so the graph is acyclic by construction.
    pub preds: Vec<Preds>,
    /// The zeroing (TTQRT/TSQRT) task of each elimination, in list order.
    pub zeroings: Vec<(Elimination, u32)>,
}

impl TaskGraph {
    pub fn total_weight(&self) -> u64 {
        self.tasks.iter().map(Task::weight).sum()
    }

    /// Edge list (predecessor, successor) over emit-indices.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.preds
            .iter()
            .enumerate()
            .flat_map(|(t, ps)| ps.iter().map(move |&u| (u, t as u32)))
    }
}

/// Incremental task-graph builder keyed on per-tile last writers. Also used
/// by the dynamic policies, which interleave emission with simulation.
pub(crate) struct GraphBuilder {
    shape: GridShape,
    family: KernelFamily,
    tasks: Vec<Task>,
    preds: Vec<Preds>,
    zeroings: Vec<(Elimination, u32)>,
    /// Last task writing tile (i, j), j <= q; u32::MAX = none yet.
    last_writer: Vec<u32>,
    /// Whether GEQRT(r, k) (and its UNMQR updates) has been emitted.
    panel_done: Vec<bool>,
}

const NONE: u32 = u32::MAX;

impl GraphBuilder {
    pub fn new(shape: GridShape, family: KernelFamily) -> Self {
        let cells = shape.p() * shape.q();
        GraphBuilder {
            shape,
            family,
            tasks: Vec::new(),
            preds: Vec::new(),
            zeroings: Vec::new(),
            last_writer: vec![NONE; cells],
            panel_done: vec![false; cells],
        }
    }

    fn cell(&self, i: usize, j: usize) -> usize {
        (i - 1) * self.shape.q() + (j - 1)
    }

    fn push(&mut self, kind: KernelKind, i: usize, piv: Option<usize>, k: usize, j: Option<usize>, preds: Preds) -> u32 {
        let n = self.tasks.len() as u32;
        self.tasks.push(Task { kind, i, piv, k, j, emit_index: n as usize });
        self.preds.push(preds);
        n
    }

    fn preds_of(&self, sources: &[u32]) -> Preds {
        let mut ps = Preds::new();
        for &s in sources {
            if s != NONE && !ps.contains(&s) {
                ps.push(s);
            }
        }
        ps
    }

    /// Emit GEQRT(r, k) and its UNMQR(r, k, j) updates once per (r, k).
    /// Returns the GEQRT task index (whether new or previously emitted this
    /// call is irrelevant to callers: ordering flows through write chains).
    pub fn ensure_panel(&mut self, r: usize, k: usize) {
        let cell = self.cell(r, k);
        if self.panel_done[cell] {
            return;
        }
        self.panel_done[cell] = true;
        let ps = self.preds_of(&[self.last_writer[cell]]);
        let g = self.push(KernelKind::Geqrt, r, None, k, None, ps);
        self.last_writer[cell] = g;
        for j in k + 1..=self.shape.q() {
            let cj = self.cell(r, j);
            let ps = self.preds_of(&[g, self.last_writer[cj]]);
            let u = self.push(KernelKind::Unmqr, r, None, k, Some(j), ps);
            self.last_writer[cj] = u;
        }
    }

    /// Emit the kernels of one elimination per the family's expansion.
    pub fn emit_elimination(&mut self, e: Elimination) {
        let (i, piv, k) = (e.row, e.piv, e.col);
        self.ensure_panel(piv, k);
        if self.family == KernelFamily::Tt {
            self.ensure_panel(i, k);
        }
        // In the TS family the eliminated tile is usually a full square
        // (TSQRT), but a row that already served as pivot in this column
        // holds a triangle, which only TTQRT can zero. This distinction is
        // what keeps the total weight independent of the elimination list.
        let (zero_kind, update_kind) = if self.panel_done[self.cell(i, k)] {
            (KernelKind::Ttqrt, KernelKind::Ttmqr)
        } else {
            (KernelKind::Tsqrt, KernelKind::Tsmqr)
        };
        let (ci, cp) = (self.cell(i, k), self.cell(piv, k));
        let ps = self.preds_of(&[self.last_writer[ci], self.last_writer[cp]]);
        let z = self.push(zero_kind, i, Some(piv), k, None, ps);
        self.last_writer[ci] = z;
        self.last_writer[cp] = z;
        self.zeroings.push((e, z));
        for j in k + 1..=self.shape.q() {
            let (cij, cpj) = (self.cell(i, j), self.cell(piv, j));
            let ps = self.preds_of(&[z, self.last_writer[cij], self.last_writer[cpj]]);
            let u = self.push(update_kind, i, Some(piv), k, Some(j), ps);
            self.last_writer[cij] = u;
            self.last_writer[cpj] = u;
        }
    }

    /// Triangularize any untouched diagonal tile (the final GEQRT(q, q) of a
    /// square factorization; a no-op for every column whose panel row already
    /// pivoted).
    pub fn finish_diagonal(&mut self) {
        for k in 1..=self.shape.q().min(self.shape.p()) {
            self.ensure_panel(k, k);
        }
    }

    pub fn num_tasks(&self) -> usize {
        self.tasks.len()
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn task_preds(&self) -> &[Preds] {
        &self.preds
    }

    pub fn zeroings(&self) -> &[(Elimination, u32)] {
        &self.zeroings
    }

    /// Last task so far that wrote tile (i, j), if any.
    pub fn last_writer_at(&self, i: usize, j: usize) -> Option<u32> {
        match self.last_writer[self.cell(i, j)] {
            NONE => None,
            w => Some(w),
        }
    }

    pub fn build(self) -> TaskGraph {
        TaskGraph {
            shape: self.shape,
            family: self.family,
            tasks: self.tasks,
            preds: self.preds,
            zeroings: self.zeroings,
        }
    }
}

/// Expand a valid elimination list into its task graph.
pub fn expand(list: &EliminationList, family: KernelFamily) -> Result<TaskGraph, QrError> {
    let report = list.validate();
    if !report.is_ok() {
        return Err(QrError::InvalidList(
            report.violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "),
        ));
    }
    Ok(expand_unchecked(list.shape(), list.items(), family))
}

/// Expansion without validity checking; also accepts partial lists (e.g. the
/// banded instances of the lower-bound search, whose out-of-band tiles are
/// zero from the start).
pub(crate) fn expand_unchecked(
    shape: GridShape,
    items: &[Elimination],
    family: KernelFamily,
) -> TaskGraph {
    let mut b = GraphBuilder::new(shape, family);
    for &e in items {
        b.emit_elimination(e);
    }
    b.finish_diagonal();
    b.build()
}
