//! Roofline-style performance prediction.
//!
//! With gamma_seq the measured sequential kernel rate, T the total work and
//! cp the critical path (both in time-units of n_b^3/3 flops), the predicted
//! rate on P processors is gamma_seq * T / max(T/P, cp): either the machine
//! is work-bound and runs at full speed gamma_seq * P, or the critical path
//! dominates and caps the achievable parallelism.

use num_rational::Ratio;

use crate::error::QrError;
use crate::grid::GridShape;
use crate::list::total_weight;

/// Inputs to the prediction formula.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerfModelInput {
    /// Sequential kernel rate, Gflop/s.
    pub gamma_seq: f64,
    /// Processor count.
    pub processors: usize,
    /// Tile size (rows/columns per tile).
    pub n_b: usize,
    pub shape: GridShape,
    /// Critical path, time-units.
    pub cp: u64,
    /// Total work, time-units.
    pub total: u64,
}

/// Which term of max(T/P, cp) binds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Work,
    CriticalPath,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Work => "work",
            Regime::CriticalPath => "cp",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub gflops: f64,
    pub regime: Regime,
}

/// Evaluate gamma_pred = gamma_seq * T / max(T/P, cp).
pub fn predict(input: &PerfModelInput) -> Result<Prediction, QrError> {
    if input.processors == 0 {
        return Err(QrError::InvalidArgument("processor count must be positive".into()));
    }
    if input.n_b == 0 {
        return Err(QrError::InvalidArgument("tile size must be positive".into()));
    }
    if input.cp > input.total {
        return Err(QrError::InvalidArgument(format!(
            "critical path {} exceeds total work {}",
            input.cp, input.total
        )));
    }
    // Compare T/P with cp in exact rationals: T/P >= cp  <=>  T >= cp*P.
    let work_bound = input.total >= input.cp * input.processors as u64;
    let (gflops, regime) = if work_bound {
        (input.gamma_seq * input.processors as f64, Regime::Work)
    } else {
        (input.gamma_seq * input.total as f64 / input.cp as f64, Regime::CriticalPath)
    };
    Ok(Prediction { gflops, regime })
}

/// Unit conversions between time-units (n_b^3/3 flops each) and flops, with
/// the matrix-dimension view m = p*n_b, n = q*n_b. All values exact rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlopsUnits {
    pub shape: GridShape,
    pub n_b: u64,
    /// Flops per time-unit: n_b^3 / 3.
    pub flops_per_unit: Ratio<u64>,
    /// Total work in time-units: 6pq^2 - 2q^3.
    pub total_units: u64,
    /// Total work in flops: 2mn^2 - (2/3)n^3.
    pub total_flops: Ratio<u64>,
}

impl FlopsUnits {
    pub fn units_to_flops(&self, units: u64) -> Ratio<u64> {
        self.flops_per_unit * Ratio::from_integer(units)
    }
}

/// Build the conversion table for a tiling, checking the tiled and untiled
/// work expressions agree. If `m_n_view` is given it must match p*n_b, q*n_b.
pub fn flops_units(
    shape: GridShape,
    n_b: u64,
    m_n_view: Option<(u64, u64)>,
) -> Result<FlopsUnits, QrError> {
    if n_b == 0 {
        return Err(QrError::InvalidArgument("tile size must be positive".into()));
    }
    let (p, q) = (shape.p() as u64, shape.q() as u64);
    let (m, n) = (p * n_b, q * n_b);
    if let Some((mv, nv)) = m_n_view {
        if mv != m || nv != n {
            return Err(QrError::InvalidArgument(format!(
                "matrix view {mv}x{nv} is not divisible into {p}x{q} tiles of size {n_b}"
            )));
        }
    }
    let flops_per_unit = Ratio::new(n_b * n_b * n_b, 3);
    let total_units = total_weight(shape);
    let total_flops = flops_per_unit * Ratio::from_integer(total_units);
    // 2mn^2 - (2/3)n^3 must equal (6pq^2 - 2q^3) * n_b^3/3 identically.
    let untiled = Ratio::from_integer(2 * m * n * n) - Ratio::new(2 * n * n * n, 3);
    debug_assert_eq!(total_flops, untiled);
    Ok(FlopsUnits { shape, n_b, flops_per_unit, total_units, total_flops })
}

/// FlatTree's single-column critical path 2p+2 re-expressed in matrix form:
/// (2p+2) * n_b^3/3 = (2/3) m n_b^2 + (2/3) n_b^3 flops for m = p*n_b.
pub fn flat_tree_single_column_flops(p: u64, n_b: u64) -> Ratio<u64> {
    let m = p * n_b;
    Ratio::new(2 * m * n_b * n_b, 3) + Ratio::new(2 * n_b * n_b * n_b, 3)
}
