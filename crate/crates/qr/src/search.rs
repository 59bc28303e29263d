//! Exhaustive optimal-schedule search on banded square instances.
//!
//! The lower-bound argument for general shapes reduces to a q x q matrix with
//! only three non-zero sub-diagonals. On such an instance every column offers
//! only a handful of row pairings, so the minimal TT critical path can be
//! found by trying all per-column pairing orders, column by column. Pairings
//! are restricted to non-reverse eliminations (a reverse elimination can
//! always be rewritten away at no cost), and the timing state carried between
//! columns is just the last-write finish time of every tile in the four-row
//! window — identical states are memoized.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::QrError;
use crate::graph::expand_unchecked;
use crate::grid::{Elimination, GridShape, KernelFamily};
use crate::list::EliminationList;
use crate::sim::simulate;

/// Square q x q tile grid in which tile (i,k) is initially zero for i > k+3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandedInstance {
    q: usize,
}

pub const BAND: usize = 3;

impl BandedInstance {
    pub fn new(q: usize) -> Result<Self, QrError> {
        if q < 2 {
            return Err(QrError::InvalidArgument("banded instance needs q >= 2".into()));
        }
        Ok(BandedInstance { q })
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn initially_zero(&self, i: usize, k: usize) -> bool {
        i > k + BAND
    }

    /// Sub-diagonal tiles that actually need zeroing.
    pub fn tiles(&self) -> Vec<(usize, usize)> {
        let shape = GridShape::new(self.q, self.q).unwrap();
        shape.subdiagonal().filter(|&(i, k)| !self.initially_zero(i, k)).collect()
    }
}

/// Search result. `certified` is false when the node budget ran out, in which
/// case `optimum` is only the best makespan found.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub q: usize,
    pub optimum: u64,
    pub witness: EliminationList,
    pub nodes_explored: u64,
    pub certified: bool,
}

impl SearchOutcome {
    pub fn summary_json(&self) -> String {
        format!(
            "{{\"q\": {}, \"optimum\": {}, \"nodes_explored\": {}, \"certified\": {}}}",
            self.q, self.optimum, self.nodes_explored, self.certified
        )
    }
}

/// Timing state: last-write finish time per tile, plus the makespan of
/// everything emitted so far.
#[derive(Clone)]
struct State {
    q: usize,
    chain: Vec<u64>,
}

impl State {
    fn new(q: usize) -> Self {
        State { q, chain: vec![0; q * q] }
    }

    fn get(&self, i: usize, j: usize) -> u64 {
        self.chain[(i - 1) * self.q + (j - 1)]
    }

    fn set(&mut self, i: usize, j: usize, v: u64) {
        self.chain[(i - 1) * self.q + (j - 1)] = v;
    }
}

struct Searcher {
    q: usize,
    budget: u64,
    nodes: u64,
    exhausted: bool,
    /// (column, window chain times) -> exact (best completion makespan,
    /// witness suffix); only populated while the budget holds.
    memo: HashMap<(usize, Vec<u64>), (u64, Vec<Elimination>)>,
}

const INFEASIBLE: u64 = u64::MAX;

impl Searcher {
    /// Emit GEQRT(r,k) + UNMQR(r,k,j) for every row of column k's window,
    /// then the chosen eliminations; returns all (local makespan, state,
    /// eliminations) alternatives for this column, in lexicographic order of
    /// the elimination sequence.
    fn column_alternatives(&self, k: usize, state: &State) -> Vec<(u64, State, Vec<Elimination>)> {
        let q = self.q;
        let hi = (k + BAND).min(q);
        let mut s = state.clone();
        let mut m = 0u64;
        for r in k..=hi {
            let g = s.get(r, k) + 4;
            s.set(r, k, g);
            m = m.max(g);
            for j in k + 1..=q {
                let u = g.max(s.get(r, j)) + 6;
                s.set(r, j, u);
                m = m.max(u);
            }
        }
        let mut out = Vec::new();
        let mut seq = Vec::new();
        let remaining: Vec<usize> = (k + 1..=hi).collect();
        let alive: Vec<usize> = (k..=hi).collect();
        self.enumerate_orders(k, &remaining, &alive, &s, m, &mut seq, &mut out);
        if remaining.is_empty() {
            // Last column: only the diagonal GEQRT, already emitted above.
            out.push((m, s, Vec::new()));
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn enumerate_orders(
        &self,
        k: usize,
        remaining: &[usize],
        alive: &[usize],
        state: &State,
        m: u64,
        seq: &mut Vec<Elimination>,
        out: &mut Vec<(u64, State, Vec<Elimination>)>,
    ) {
        if remaining.is_empty() {
            out.push((m, state.clone(), seq.clone()));
            return;
        }
        let q = self.q;
        for &e in remaining {
            for &v in alive.iter().filter(|&&v| v < e) {
                let mut s = state.clone();
                let mut m2 = m;
                let z = s.get(e, k).max(s.get(v, k)) + 2;
                s.set(e, k, z);
                s.set(v, k, z);
                m2 = m2.max(z);
                for j in k + 1..=q {
                    let u = z.max(s.get(e, j)).max(s.get(v, j)) + 6;
                    s.set(e, j, u);
                    s.set(v, j, u);
                    m2 = m2.max(u);
                }
                seq.push(Elimination::new(e, v, k));
                let rem: Vec<usize> = remaining.iter().copied().filter(|&r| r != e).collect();
                let al: Vec<usize> = alive.iter().copied().filter(|&r| r != e).collect();
                self.enumerate_orders(k, &rem, &al, &s, m2, seq, out);
                seq.pop();
            }
        }
    }

    /// Minimal completion makespan from column k given the timing state, with
    /// the witness suffix achieving it (first-found among equals, children
    /// explored in lexicographic order).
    fn solve(&mut self, k: usize, state: &State) -> (u64, Vec<Elimination>) {
        // Key on the window that can still matter: rows k..=min(k+3, q).
        let lo = k;
        let hi = (k + BAND).min(self.q);
        let key_rows: Vec<u64> = (lo..=hi)
            .flat_map(|r| (k..=self.q).map(move |j| (r, j)))
            .map(|(r, j)| state.get(r, j))
            .collect();
        let key = (k, key_rows);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        let mut best = (INFEASIBLE, Vec::new());
        let complete_before = !self.exhausted;
        for (m, s, elims) in self.column_alternatives(k, state) {
            self.nodes += 1;
            if self.nodes > self.budget {
                self.exhausted = true;
            }
            if self.exhausted && best.0 != INFEASIBLE {
                break;
            }
            let (tail_val, tail) = if k == self.q {
                (0, Vec::new())
            } else {
                self.solve(k + 1, &s)
            };
            if tail_val == INFEASIBLE {
                continue;
            }
            let val = m.max(tail_val);
            if val < best.0 {
                let mut witness = elims;
                witness.extend(tail);
                best = (val, witness);
            }
        }
        if complete_before && !self.exhausted {
            self.memo.insert(key, best.clone());
        }
        best
    }
}

/// Exact minimum TT makespan over all valid elimination lists of the banded
/// instance, with a witness list. `budget` limits the number of explored
/// column alternatives (default 50 million); if it runs out the best-found
/// value is returned with `certified` unset.
pub fn optimal_banded_search(
    instance: BandedInstance,
    budget: Option<u64>,
) -> Result<SearchOutcome, QrError> {
    let q = instance.q();
    let mut searcher = Searcher {
        q,
        budget: budget.unwrap_or(50_000_000),
        nodes: 0,
        exhausted: false,
        memo: HashMap::new(),
    };
    let (optimum, items) = searcher.solve(1, &State::new(q));
    if optimum == INFEASIBLE {
        return Err(QrError::InvalidArgument("search budget too small to find any schedule".into()));
    }
    let shape = GridShape::new(q, q)?;
    let witness = EliminationList::new(shape, items)?;
    // Cross-check the witness against the reference simulator.
    let graph = expand_unchecked(shape, witness.items(), KernelFamily::Tt);
    let sim = simulate(&graph, None)?.makespan;
    assert_eq!(sim, optimum, "search timing disagrees with the simulator");
    Ok(SearchOutcome {
        q,
        optimum,
        witness,
        nodes_explored: searcher.nodes,
        certified: !searcher.exhausted,
    })
}

/// Brute-force oracle: minimum makespan over every valid elimination list of
/// the banded instance, including reverse eliminations and all interleavings.
/// Only tractable for tiny q; used to validate the search.
pub fn exhaustive_banded_minimum(instance: BandedInstance) -> u64 {
    let q = instance.q();
    let shape = GridShape::new(q, q).unwrap();
    let tiles = instance.tiles();
    let mut zeroed: HashMap<(usize, usize), bool> = HashMap::new();
    for i in 1..=q {
        for k in 1..=q {
            if i > k {
                zeroed.insert((i, k), instance.initially_zero(i, k));
            }
        }
    }
    let mut best = u64::MAX;
    let mut items = Vec::new();
    fn rec(
        shape: GridShape,
        tiles: &[(usize, usize)],
        zeroed: &mut HashMap<(usize, usize), bool>,
        items: &mut Vec<Elimination>,
        best: &mut u64,
    ) {
        if items.len() == tiles.len() {
            let graph = expand_unchecked(shape, items, KernelFamily::Tt);
            let m = simulate(&graph, None).unwrap().makespan;
            *best = (*best).min(m);
            return;
        }
        let q = shape.q();
        fn ready(zeroed: &HashMap<(usize, usize), bool>, r: usize, k: usize) -> bool {
            (1..k.min(r)).all(|c| *zeroed.get(&(r, c)).unwrap_or(&true))
        }
        for &(i, k) in tiles {
            if zeroed[&(i, k)] || !ready(zeroed, i, k) {
                continue;
            }
            for piv in k..=q {
                if piv == i
                    || (piv > k && *zeroed.get(&(piv, k)).unwrap_or(&true))
                    || !ready(zeroed, piv, k)
                {
                    continue;
                }
                zeroed.insert((i, k), true);
                items.push(Elimination::new(i, piv, k));
                rec(shape, tiles, zeroed, items, best);
                items.pop();
                zeroed.insert((i, k), false);
            }
        }
    }
    rec(shape, &tiles, &mut zeroed, &mut items, &mut best);
    best
}

/// Render a search outcome: witness in list text format plus the JSON
/// summary, for the CLI.
pub fn render_outcome(outcome: &SearchOutcome) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", outcome.summary_json());
    out.push_str(&outcome.witness.to_text());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn search_matches_oracle_q2_q3() {
        for q in [2usize, 3] {
            let inst = BandedInstance::new(q).unwrap();
            let oracle = exhaustive_banded_minimum(inst);
            let got = optimal_banded_search(inst, None).unwrap();
            assert!(got.certified);
            assert_eq!(got.optimum, oracle, "q={q}");
            assert!(got.optimum >= 22 * q as u64 - 30);
        }
    }

    #[test]
    fn search_certifies_q4() {
        let inst = BandedInstance::new(4).unwrap();
        let got = optimal_banded_search(inst, None).unwrap();
        assert!(got.certified);
        assert!(got.optimum >= 22 * 4 - 30);
        // q = 4 is a full square, so the named schemes bound it from above.
        let greedy = crate::sim::critical_path(
            &crate::schemes::SchemeSpec::Greedy,
            GridShape::new(4, 4).unwrap(),
            KernelFamily::Tt,
        )
        .unwrap();
        assert!(got.optimum <= greedy);
    }

    #[test]
    fn budget_exhaustion_returns_uncertified() {
        let inst = BandedInstance::new(5).unwrap();
        let got = optimal_banded_search(inst, Some(10)).unwrap();
        assert!(!got.certified);
        assert!(got.optimum < INFEASIBLE);
        let full = optimal_banded_search(inst, None).unwrap();
        assert!(full.certified);
        assert!(full.optimum <= got.optimum);
    }

    #[test]
    fn witness_round_trips() {
        let got = optimal_banded_search(BandedInstance::new(3).unwrap(), None).unwrap();
        let text = got.witness.to_text();
        let back = EliminationList::from_text(&text).unwrap();
        assert_eq!(back, got.witness);
    }
}
