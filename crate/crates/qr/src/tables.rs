//! Reproduction of the reference time-step tables and scheme comparisons.
//!
//! The expected values are embedded CSV fixtures; each reproduction
//! regenerates the table from the simulator and reports every cell that
//! disagrees. An empty mismatch list means the table is reproduced exactly.

use std::fmt;

use crate::coarse::coarse_timesteps;
use crate::dynamic::generate_dynamic;
use crate::error::QrError;
use crate::graph::expand;
use crate::grid::{GridShape, KernelFamily};
use crate::matrix::TimestepMatrix;
use crate::schemes::{generate_list, SchemeSpec};
use crate::sim::{critical_path, simulate, zero_times};

const T2_FLATTREE: &str = include_str!("../fixtures/table2_flattree.csv");
const T2_FIBONACCI: &str = include_str!("../fixtures/table2_fibonacci.csv");
const T2_GREEDY: &str = include_str!("../fixtures/table2_greedy.csv");
const T3_FLATTREE: &str = include_str!("../fixtures/table3_flattree.csv");
const T3_FIBONACCI: &str = include_str!("../fixtures/table3_fibonacci.csv");
const T3_GREEDY: &str = include_str!("../fixtures/table3_greedy.csv");
const T3_BINARYTREE: &str = include_str!("../fixtures/table3_binarytree.csv");
const T3_PLASMATREE5: &str = include_str!("../fixtures/table3_plasmatree_bs5.csv");
const T4_GREEDY: &str = include_str!("../fixtures/table4_greedy.csv");
const T4_ASAP: &str = include_str!("../fixtures/table4_asap.csv");
const T4_GRASAP1: &str = include_str!("../fixtures/table4_grasap1.csv");
const T5B: &str = include_str!("../fixtures/table5b.csv");
const T6: &str = include_str!("../fixtures/table6.csv");

/// The reproducible tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableId {
    /// Coarse-grain time-steps, 15x6: FlatTree, Fibonacci, Greedy.
    T2,
    /// Tiled (TT) time-steps, 15x6: the five static schemes.
    T3,
    /// Tiled time-steps, 15x3: Greedy, ASAP, Grasap(1).
    T4,
    /// Greedy vs ASAP critical paths on large shapes.
    T5b,
    /// Greedy vs best-BS PlasmaTree vs Fibonacci, p=40, q=1..=40.
    T6,
}

impl TableId {
    pub fn parse(s: &str) -> Result<Self, QrError> {
        match s.to_ascii_lowercase().as_str() {
            "t2" => Ok(TableId::T2),
            "t3" => Ok(TableId::T3),
            "t4" => Ok(TableId::T4),
            "t5b" => Ok(TableId::T5b),
            "t6" => Ok(TableId::T6),
            other => Err(QrError::InvalidArgument(format!(
                "unknown table {other} (expected t2, t3, t4, t5b or t6)"
            ))),
        }
    }
}

impl fmt::Display for TableId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TableId::T2 => "t2",
            TableId::T3 => "t3",
            TableId::T4 => "t4",
            TableId::T5b => "t5b",
            TableId::T6 => "t6",
        };
        f.write_str(s)
    }
}

/// Result of regenerating a table: the regenerated content and every cell
/// that differs from the fixture.
#[derive(Debug, Clone)]
pub struct TableReport {
    pub id: TableId,
    pub rendered: String,
    pub mismatches: Vec<String>,
}

impl TableReport {
    pub fn is_ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Zeroing-time matrix of a scheme under the tiled TT model.
pub fn tiled_zero_times(scheme: &SchemeSpec, shape: GridShape) -> Result<TimestepMatrix, QrError> {
    let family = KernelFamily::Tt;
    if scheme.is_dynamic() {
        let run = generate_dynamic(scheme, shape, family)?;
        Ok(zero_times(&run.graph, &run.schedule))
    } else {
        let list = generate_list(scheme, shape)?;
        let graph = expand(&list, family)?;
        let sched = simulate(&graph, None)?;
        Ok(zero_times(&graph, &sched))
    }
}

fn diff_matrix(
    label: &str,
    got: &TimestepMatrix,
    fixture: &str,
    shape: GridShape,
    mismatches: &mut Vec<String>,
) -> Result<(), QrError> {
    let expect = TimestepMatrix::from_csv(shape, fixture)?;
    for k in 1..=shape.q() {
        for i in k + 1..=shape.p() {
            let (g, e) = (got.get(i, k), expect.get(i, k));
            if g != e {
                mismatches.push(format!(
                    "{label} tile ({i},{k}): regenerated {g:?}, fixture {e:?}"
                ));
            }
        }
    }
    Ok(())
}

/// One row of the scheme comparison: Greedy against PlasmaTree (best BS over
/// 1..=p, ties to the smallest BS) and Fibonacci, with overhead other/greedy
/// and gain 1 - greedy/other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonRow {
    pub shape: GridShape,
    pub greedy: u64,
    pub plasmatree: u64,
    pub bs: usize,
    pub pt_overhead: f64,
    pub pt_gain: f64,
    pub fibonacci: u64,
    pub fib_overhead: f64,
    pub fib_gain: f64,
}

pub fn compare_row(shape: GridShape) -> Result<ComparisonRow, QrError> {
    let family = KernelFamily::Tt;
    let greedy = critical_path(&SchemeSpec::Greedy, shape, family)?;
    let fibonacci = critical_path(&SchemeSpec::Fibonacci, shape, family)?;
    let mut best = (u64::MAX, 0usize);
    for bs in 1..=shape.p() {
        let cp = critical_path(&SchemeSpec::PlasmaTree { bs }, shape, family)?;
        if cp < best.0 {
            best = (cp, bs);
        }
    }
    let (plasmatree, bs) = best;
    let ratio = |other: u64| other as f64 / greedy as f64;
    let gain = |other: u64| 1.0 - greedy as f64 / other as f64;
    Ok(ComparisonRow {
        shape,
        greedy,
        plasmatree,
        bs,
        pt_overhead: ratio(plasmatree),
        pt_gain: gain(plasmatree),
        fibonacci,
        fib_overhead: ratio(fibonacci),
        fib_gain: gain(fibonacci),
    })
}

impl ComparisonRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{:.4},{:.4},{},{:.4},{:.4}",
            self.shape.p(),
            self.shape.q(),
            self.greedy,
            self.plasmatree,
            self.bs,
            self.pt_overhead,
            self.pt_gain,
            self.fibonacci,
            self.fib_overhead,
            self.fib_gain
        )
    }
}

pub const COMPARISON_HEADER: &str =
    "p,q,greedy,plasmatree,bs,pt_overhead,pt_gain,fibonacci,fib_overhead,fib_gain";

/// Regenerate a table and diff it against its fixture.
pub fn reproduce(id: TableId) -> Result<TableReport, QrError> {
    let mut rendered = String::new();
    let mut mismatches = Vec::new();
    match id {
        TableId::T2 => {
            let shape = GridShape::new(15, 6)?;
            let cases = [
                (SchemeSpec::FlatTree, T2_FLATTREE),
                (SchemeSpec::Fibonacci, T2_FIBONACCI),
                (SchemeSpec::Greedy, T2_GREEDY),
            ];
            for (scheme, fixture) in cases {
                let got = coarse_timesteps(&scheme, shape)?;
                rendered.push_str(&format!("# coarse {scheme} 15x6\n"));
                rendered.push_str(&got.to_csv());
                diff_matrix(&format!("coarse {scheme}"), &got, fixture, shape, &mut mismatches)?;
            }
        }
        TableId::T3 => {
            let shape = GridShape::new(15, 6)?;
            let cases = [
                (SchemeSpec::FlatTree, T3_FLATTREE),
                (SchemeSpec::Fibonacci, T3_FIBONACCI),
                (SchemeSpec::Greedy, T3_GREEDY),
                (SchemeSpec::BinaryTree, T3_BINARYTREE),
                (SchemeSpec::PlasmaTree { bs: 5 }, T3_PLASMATREE5),
            ];
            for (scheme, fixture) in cases {
                let got = tiled_zero_times(&scheme, shape)?;
                rendered.push_str(&format!("# tiled {scheme} 15x6\n"));
                rendered.push_str(&got.to_csv());
                diff_matrix(&format!("tiled {scheme}"), &got, fixture, shape, &mut mismatches)?;
            }
        }
        TableId::T4 => {
            let shape = GridShape::new(15, 3)?;
            let cases = [
                (SchemeSpec::Greedy, T4_GREEDY),
                (SchemeSpec::Asap, T4_ASAP),
                (SchemeSpec::Grasap { kswitch: 1 }, T4_GRASAP1),
            ];
            for (scheme, fixture) in cases {
                let got = tiled_zero_times(&scheme, shape)?;
                rendered.push_str(&format!("# tiled {scheme} 15x3\n"));
                rendered.push_str(&got.to_csv());
                diff_matrix(&format!("tiled {scheme}"), &got, fixture, shape, &mut mismatches)?;
            }
        }
        TableId::T5b => {
            rendered.push_str("p,q,greedy,asap\n");
            for line in T5B.lines().skip(1) {
                let f: Vec<u64> = line.split(',').map(|v| v.parse().unwrap()).collect();
                let shape = GridShape::new(f[0] as usize, f[1] as usize)?;
                let greedy = critical_path(&SchemeSpec::Greedy, shape, KernelFamily::Tt)?;
                let asap = critical_path(&SchemeSpec::Asap, shape, KernelFamily::Tt)?;
                rendered.push_str(&format!("{},{},{},{}\n", f[0], f[1], greedy, asap));
                if greedy != f[2] {
                    mismatches.push(format!(
                        "greedy ({},{}): regenerated {greedy}, fixture {}",
                        f[0], f[1], f[2]
                    ));
                }
                if asap != f[3] {
                    mismatches.push(format!(
                        "asap ({},{}): regenerated {asap}, fixture {}",
                        f[0], f[1], f[3]
                    ));
                }
            }
        }
        TableId::T6 => {
            rendered.push_str(COMPARISON_HEADER);
            rendered.push('\n');
            for line in T6.lines().skip(1) {
                let f: Vec<&str> = line.split(',').collect();
                let (p, q): (usize, usize) = (f[0].parse().unwrap(), f[1].parse().unwrap());
                let row = compare_row(GridShape::new(p, q)?)?;
                let got = row.to_csv_line();
                rendered.push_str(&got);
                rendered.push('\n');
                // The BS column (field 4) is informational: several domain
                // sizes can tie for the best critical path, and only the
                // critical-path and ratio columns are checked.
                let got_f: Vec<&str> = got.split(',').collect();
                for (idx, name) in [
                    (2, "greedy"),
                    (3, "plasmatree"),
                    (5, "pt_overhead"),
                    (6, "pt_gain"),
                    (7, "fibonacci"),
                    (8, "fib_overhead"),
                    (9, "fib_gain"),
                ] {
                    if got_f[idx] != f[idx] {
                        mismatches.push(format!(
                            "{name} (p={p},q={q}): regenerated {}, fixture {}",
                            got_f[idx], f[idx]
                        ));
                    }
                }
            }
        }
    }
    Ok(TableReport { id, rendered, mismatches })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coarse_table_reproduced() {
        let r = reproduce(TableId::T2).unwrap();
        assert!(r.is_ok(), "{:?}", r.mismatches);
    }

    #[test]
    fn tiled_table_reproduced() {
        let r = reproduce(TableId::T3).unwrap();
        assert!(r.is_ok(), "{:?}", r.mismatches);
    }

    #[test]
    fn dynamic_table_reproduced() {
        // Known single-cell erratum: the printed Grasap(1) value for tile
        // (7,3) is 56, but the stated ASAP pairing rule forces rows 6 and 7
        // (both idle with factors done at time 50) to pair immediately,
        // zeroing (7,3) at 52. Every other cell of all three matrices must
        // match; no consistent event rule reproduces the printed 56 without
        // breaking the cells at (14,3), (10,3) or (5,3).
        let r = reproduce(TableId::T4).unwrap();
        assert_eq!(
            r.mismatches,
            vec!["tiled grasap(k=1) tile (7,3): regenerated Some(52), fixture Some(56)".to_string()]
        );
    }

    #[test]
    fn critical_path_table_reproduced() {
        // Known single-cell erratum: the printed ASAP value at (128,64) is
        // 1748, but the table's own doubling pattern forces 1734 -- in every
        // other row doubling q adds 16q (minus 2 on reaching the square
        // case): 966 + 256 = 1222, 1222 + 512 = 1734, 1734 + 1024 - 2 = 2756,
        // which is exactly the printed (128,128) value. 1748 fits no such
        // chain. All other 19 cells must match.
        let r = reproduce(TableId::T5b).unwrap();
        assert_eq!(
            r.mismatches,
            vec!["asap (128,64): regenerated 1734, fixture 1748".to_string()]
        );
    }

    #[test]
    fn comparison_spot_rows() {
        let row = compare_row(GridShape::new(40, 6).unwrap()).unwrap();
        assert_eq!((row.greedy, row.plasmatree, row.fibonacci), (148, 198, 160));
        assert_eq!(row.bs, 10);
        assert!((row.pt_overhead - 1.3378).abs() < 5e-5);
        assert!((row.fib_overhead - 1.0811).abs() < 5e-5);
        let row1 = compare_row(GridShape::new(40, 1).unwrap()).unwrap();
        assert_eq!((row1.greedy, row1.plasmatree, row1.bs, row1.fibonacci), (16, 16, 1, 22));
    }
}
