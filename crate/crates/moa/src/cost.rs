//! Hardware shapes and cache-budget block planning.
//!
//! A [`HardwareShape`] is a declarative description of one accelerator's
//! memory hierarchy: the per-SM L1 working budget, the full L1 (with shared
//! memory), L2, global memory, and SM count. Block selection fits three
//! working blocks — one each for A, B, and C — into the L1 budget and takes
//! the largest power-of-two square that fits. Two V100 presets ship with
//! the crate and load from JSON like any user-provided shape.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Memory and execution-unit description of one device.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HardwareShape {
    pub name: String,
    /// Per-SM working budget the three blocks must fit in.
    pub l1_budget_bytes: u64,
    /// Full L1 including shared memory.
    pub l1_full_bytes: u64,
    pub l2_bytes: u64,
    pub global_bytes: u64,
    pub sm_count: u64,
}

/// JSON for the 16 GiB V100: 32 KiB per-SM budget, 128 KiB L1 with shared
/// memory, 6 MiB L2, 80 SMs.
pub const V100_16G_JSON: &str = include_str!("../presets/v100-16g.json");
/// JSON for the 32 GiB V100.
pub const V100_32G_JSON: &str = include_str!("../presets/v100-32g.json");

impl HardwareShape {
    pub fn v100_16g() -> Self {
        serde_json::from_str(V100_16G_JSON).expect("bundled preset parses")
    }

    pub fn v100_32g() -> Self {
        serde_json::from_str(V100_32G_JSON).expect("bundled preset parses")
    }

    /// Bundled preset by name, if one matches.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "v100-16g" => Some(Self::v100_16g()),
            "v100-32g" => Some(Self::v100_32g()),
            _ => None,
        }
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let hw: HardwareShape =
            serde_json::from_str(json).map_err(|e| Error::Config(e.to_string()))?;
        hw.check()?;
        Ok(hw)
    }

    /// Sizes must be positive and nested: budget <= full L1 <= L2 <= global.
    pub fn check(&self) -> Result<()> {
        let bad = |reason: String| {
            Err(Error::BadHardwareShape {
                name: self.name.clone(),
                reason,
            })
        };
        if self.l1_budget_bytes == 0
            || self.l1_full_bytes == 0
            || self.l2_bytes == 0
            || self.global_bytes == 0
            || self.sm_count == 0
        {
            return bad("all sizes and counts must be positive".into());
        }
        if self.l1_budget_bytes > self.l1_full_bytes {
            return bad(format!(
                "l1_budget_bytes {} exceeds l1_full_bytes {}",
                self.l1_budget_bytes, self.l1_full_bytes
            ));
        }
        if self.l1_full_bytes > self.l2_bytes {
            return bad(format!(
                "l1_full_bytes {} exceeds l2_bytes {}",
                self.l1_full_bytes, self.l2_bytes
            ));
        }
        if self.l2_bytes > self.global_bytes {
            return bad(format!(
                "l2_bytes {} exceeds global_bytes {}",
                self.l2_bytes, self.global_bytes
            ));
        }
        Ok(())
    }

    /// Global-memory share per GPU when a node hosts `divisor` of them.
    pub fn per_gpu_budget(&self, divisor: u64) -> u64 {
        self.global_bytes.checked_div(divisor).unwrap_or(0)
    }
}

/// Chosen block extents and the working-set arithmetic behind them.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPlan {
    pub block_rows: u64,
    pub block_cols: u64,
    pub elem_bytes: u64,
    /// Blocks resident at once: one each for A, B, and C.
    pub blocks_per_sm: u64,
    pub bytes_per_block: u64,
    pub total_bytes: u64,
}

impl BlockPlan {
    pub fn component_count(&self) -> u64 {
        self.block_rows * self.block_cols
    }
}

const RESIDENT_BLOCKS: u64 = 3;

/// Largest power-of-two square block whose three copies (A, B, C) fit the
/// L1 budget: max b = 2^k with `3 * b^2 * elem_bytes <= l1_budget_bytes`.
pub fn select_block(hw: &HardwareShape, elem_bytes: u64) -> Result<BlockPlan> {
    hw.check()?;
    let budget = hw.l1_budget_bytes;
    if RESIDENT_BLOCKS * elem_bytes > budget {
        return Err(Error::BudgetTooSmall {
            budget,
            required: RESIDENT_BLOCKS * elem_bytes,
            what: "three 1x1 blocks",
        });
    }
    let mut side: u64 = 1;
    while RESIDENT_BLOCKS * (side * 2) * (side * 2) * elem_bytes <= budget {
        side *= 2;
    }
    let bytes_per_block = side * side * elem_bytes;
    Ok(BlockPlan {
        block_rows: side,
        block_cols: side,
        elem_bytes,
        blocks_per_sm: RESIDENT_BLOCKS,
        bytes_per_block,
        total_bytes: RESIDENT_BLOCKS * bytes_per_block,
    })
}

/// All factor pairs `(rows, cols)` with `rows * cols == component_count`,
/// rows descending. For a power-of-two count only power-of-two factors
/// exist, matching the planner's power-of-two sides.
pub fn enumerate_block_shapes(component_count: u64) -> Vec<(u64, u64)> {
    let mut shapes: Vec<(u64, u64)> = (1..=component_count)
        .filter(|r| component_count.is_multiple_of(*r))
        .map(|r| (r, component_count / r))
        .collect();
    shapes.sort_by_key(|&(r, _)| std::cmp::Reverse(r));
    shapes
}

/// Largest square matrix side N whose working set of `n_matrices` N x N
/// element buffers fits `budget_bytes`: `floor(sqrt(budget / (n * elem)))`.
/// Read as the matrix size where the optimal block size steps up, under
/// the hypothesis that each device works from its share of global memory.
pub fn predict_switch_threshold(
    budget_bytes: u64,
    elem_bytes: u64,
    n_matrices: u64,
) -> Result<u64> {
    let per_component = n_matrices * elem_bytes;
    if budget_bytes == 0 || per_component == 0 || budget_bytes < per_component {
        return Err(Error::BudgetTooSmall {
            budget: budget_bytes,
            required: per_component.max(1),
            what: "one component per matrix",
        });
    }
    let components = budget_bytes / per_component;
    let mut n = (components as f64).sqrt() as u64;
    // Land exactly on floor(sqrt()) regardless of float rounding.
    while (n + 1) * (n + 1) <= components {
        n += 1;
    }
    while n * n > components {
        n -= 1;
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    const KIB: u64 = 1024;
    const GIB: u64 = 1024 * 1024 * 1024;

    #[test]
    fn presets_match_published_device_numbers() {
        let hw = HardwareShape::v100_16g();
        assert_eq!(hw.l1_budget_bytes, 32 * KIB);
        assert_eq!(hw.l1_full_bytes, 128 * KIB);
        assert_eq!(hw.l2_bytes, 6 * 1024 * KIB);
        assert_eq!(hw.global_bytes, 16 * GIB);
        assert_eq!(hw.sm_count, 80);
        assert_eq!(HardwareShape::v100_32g().global_bytes, 32 * GIB);
        assert!(hw.check().is_ok());
    }

    #[test]
    fn shape_round_trips_through_json() {
        let hw = HardwareShape::v100_16g();
        let json = serde_json::to_string(&hw).unwrap();
        assert_eq!(HardwareShape::from_json(&json).unwrap(), hw);
    }

    #[test]
    fn from_json_reports_offending_key() {
        let err = HardwareShape::from_json(r#"{"name": "x", "l1_budget_bytes": 1}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("l1_full_bytes"), "unexpected message: {msg}");
    }

    #[test]
    fn check_rejects_inverted_hierarchy() {
        let mut hw = HardwareShape::v100_16g();
        hw.l2_bytes = hw.global_bytes * 2;
        assert!(matches!(hw.check(), Err(Error::BadHardwareShape { .. })));
        let mut hw = HardwareShape::v100_16g();
        hw.sm_count = 0;
        assert!(hw.check().is_err());
    }

    #[test]
    fn select_block_reproduces_device_block_sizes() {
        // 32 KiB budget, doubles: 32x32 blocks of 8 KiB; 24 KiB total.
        let hw = HardwareShape::v100_16g();
        let plan = select_block(&hw, 8).unwrap();
        assert_eq!(plan.block_rows, 32);
        assert_eq!(plan.block_cols, 32);
        assert_eq!(plan.bytes_per_block, 8192);
        assert_eq!(plan.total_bytes, 24576);

        // Full 128 KiB L1 with shared memory: 64x64 doubles.
        let mut wide = hw.clone();
        wide.l1_budget_bytes = wide.l1_full_bytes;
        let plan = select_block(&wide, 8).unwrap();
        assert_eq!(plan.block_rows, 64);
        assert_eq!(plan.total_bytes, 98304);
    }

    #[test]
    fn select_block_minimal_and_infeasible_budgets() {
        let mut hw = HardwareShape::v100_16g();
        hw.l1_budget_bytes = 24;
        let plan = select_block(&hw, 8).unwrap();
        assert_eq!(plan.block_rows, 1);
        assert_eq!(plan.total_bytes, 24);

        hw.l1_budget_bytes = 23;
        assert!(matches!(
            select_block(&hw, 8),
            Err(Error::BudgetTooSmall { .. })
        ));
    }

    #[test]
    fn select_block_is_maximal() {
        for budget in [24u64, 100, 32 * KIB, 128 * KIB, 999_999] {
            let mut hw = HardwareShape::v100_16g();
            hw.l1_budget_bytes = budget;
            hw.l1_full_bytes = hw.l1_full_bytes.max(budget);
            hw.l2_bytes = hw.l2_bytes.max(budget);
            for elem in [4u64, 8] {
                if 3 * elem > budget {
                    continue;
                }
                let plan = select_block(&hw, elem).unwrap();
                let b = plan.block_rows;
                assert!(3 * b * b * elem <= budget);
                assert!(3 * (2 * b) * (2 * b) * elem > budget);
                assert!(b.is_power_of_two());
            }
        }
    }

    #[test]
    fn enumerate_power_of_two_shapes() {
        let shapes = enumerate_block_shapes(1024);
        assert_eq!(shapes.len(), 11);
        for &(r, c) in &shapes {
            assert_eq!(r * c, 1024);
            assert!(r.is_power_of_two() && c.is_power_of_two());
        }
        assert!(shapes.contains(&(32, 32)));
        assert!(shapes.contains(&(16, 64)));
        assert!(shapes.contains(&(8, 128)));
        // Rows descending.
        assert_eq!(shapes.first(), Some(&(1024, 1)));
        assert_eq!(shapes.last(), Some(&(1, 1024)));
    }

    #[test]
    fn enumerate_trivial_and_general_counts() {
        assert_eq!(enumerate_block_shapes(1), vec![(1, 1)]);
        let twelve = enumerate_block_shapes(12);
        assert_eq!(
            twelve,
            vec![(12, 1), (6, 2), (4, 3), (3, 4), (2, 6), (1, 12)]
        );
    }

    #[test]
    fn switch_threshold_at_two_gib() {
        // floor(sqrt(2^31 / 24)) for three double matrices.
        let n = predict_switch_threshold(2 * GIB, 8, 3).unwrap();
        assert_eq!(n, 9459);
        // The per-GPU share of the 16 GiB preset across 8 devices is the
        // same 2 GiB budget.
        let hw = HardwareShape::v100_16g();
        assert_eq!(hw.per_gpu_budget(8), 2 * GIB);
    }

    #[test]
    fn switch_threshold_edges_and_monotonicity() {
        assert_eq!(predict_switch_threshold(24, 8, 3).unwrap(), 1);
        assert!(matches!(
            predict_switch_threshold(0, 8, 3),
            Err(Error::BudgetTooSmall { .. })
        ));
        assert!(predict_switch_threshold(23, 8, 3).is_err());
        let mut last = 0;
        for budget in (24..10_000_000).step_by(99_991) {
            let n = predict_switch_threshold(budget, 8, 3).unwrap();
            assert!(n >= last);
            last = n;
        }
    }
}
