//! Elimination-scheme generators producing tiled elimination lists.
//!
//! Static schemes (FlatTree, Fibonacci, Greedy, BinaryTree, PlasmaTree) are
//! generated here; the simulation-coupled policies (ASAP, Grasap) live in
//! `dynamic`.

use std::fmt;

use crate::coarse::coarse_schedule;
use crate::error::QrError;
use crate::grid::{Elimination, GridShape};
use crate::list::EliminationList;

/// An elimination scheme, with its tuning parameter where applicable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeSpec {
    /// Sameh-Kuck: the panel row pivots every elimination of its column.
    FlatTree,
    Fibonacci,
    Greedy,
    /// Binary reduction tree over the rows of each column.
    BinaryTree,
    /// Flat trees inside contiguous domains of `bs` rows, merged by a binary
    /// tree (1 <= bs <= p).
    PlasmaTree { bs: usize },
    /// Dynamic: start an elimination as soon as two rows are ready.
    Asap,
    /// Dynamic: Greedy pairings for columns 1..=q-kswitch, ASAP for the last
    /// kswitch columns.
    Grasap { kswitch: usize },
}

impl fmt::Display for SchemeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SchemeSpec::FlatTree => write!(f, "flattree"),
            SchemeSpec::Fibonacci => write!(f, "fibonacci"),
            SchemeSpec::Greedy => write!(f, "greedy"),
            SchemeSpec::BinaryTree => write!(f, "binarytree"),
            SchemeSpec::PlasmaTree { bs } => write!(f, "plasmatree(bs={bs})"),
            SchemeSpec::Asap => write!(f, "asap"),
            SchemeSpec::Grasap { kswitch } => write!(f, "grasap(k={kswitch})"),
        }
    }
}

impl SchemeSpec {
    pub fn is_dynamic(&self) -> bool {
        matches!(self, SchemeSpec::Asap | SchemeSpec::Grasap { .. })
    }
}

/// Generate the elimination list of a static scheme.
pub fn generate_list(scheme: &SchemeSpec, shape: GridShape) -> Result<EliminationList, QrError> {
    let items = match scheme {
        SchemeSpec::FlatTree => flat_tree_items(shape),
        SchemeSpec::Fibonacci | SchemeSpec::Greedy => {
            coarse_schedule(scheme, shape)?.elims.into_iter().map(|(_, e)| e).collect()
        }
        SchemeSpec::BinaryTree => {
            let mut items = Vec::new();
            for k in 1..=shape.q() {
                let rows: Vec<usize> = (k..=shape.p()).collect();
                binary_merge(&rows, k, &mut items);
            }
            items
        }
        SchemeSpec::PlasmaTree { bs } => plasma_tree_items(shape, *bs)?,
        other => return Err(QrError::SchemeNotApplicable(format!("{other} (static generator)"))),
    };
    let list = EliminationList::new(shape, items)?;
    debug_assert!(list.validate().is_ok(), "{scheme} generated an invalid list");
    Ok(list)
}

fn flat_tree_items(shape: GridShape) -> Vec<Elimination> {
    shape.subdiagonal().map(|(i, k)| Elimination::new(i, k, k)).collect()
}

/// Binary-tree reduction over `rows` (ascending) in column k: each round
/// pairs consecutive survivors from the top, the lower row of each pair being
/// eliminated by the upper; with an odd number of survivors the bottom one
/// sits out. Appends the eliminations round by round.
fn binary_merge(rows: &[usize], k: usize, out: &mut Vec<Elimination>) {
    let mut survivors = rows.to_vec();
    while survivors.len() > 1 {
        let mut next = Vec::with_capacity(survivors.len().div_ceil(2));
        let mut it = survivors.chunks_exact(2);
        for pair in &mut it {
            out.push(Elimination::new(pair[1], pair[0], k));
            next.push(pair[0]);
        }
        next.extend_from_slice(it.remainder());
        survivors = next;
    }
}

/// PlasmaTree: in column k the active rows k..p are split into domains of
/// `bs` consecutive rows starting at the diagonal ({k..k+bs-1}, {k+bs..},
/// ...), so the partial domain at the very bottom shrinks as columns progress
/// until a domain disappears. Each domain's first row is its local panel;
/// rows below it are eliminated flat-tree style, then the domain panels are
/// merged by a binary tree.
fn plasma_tree_items(shape: GridShape, bs: usize) -> Result<Vec<Elimination>, QrError> {
    if bs < 1 || bs > shape.p() {
        return Err(QrError::InvalidArgument(format!(
            "plasmatree domain size bs={bs} must be within 1..={}",
            shape.p()
        )));
    }
    let (p, q) = (shape.p(), shape.q());
    let mut items = Vec::new();
    for k in 1..=q {
        let mut panels = Vec::new();
        let mut panel = k;
        while panel <= p {
            let hi = (panel + bs - 1).min(p);
            panels.push(panel);
            for r in panel + 1..=hi {
                items.push(Elimination::new(r, panel, k));
            }
            panel = hi + 1;
        }
        binary_merge(&panels, k, &mut items);
    }
    Ok(items)
}
