//! Picking block sizes from a declarative hardware shape.
//!
//! Run with `cargo run --example block_planning`.

use moa::cost::{enumerate_block_shapes, predict_switch_threshold, select_block, HardwareShape};

fn main() -> moa::Result<()> {
    // The bundled 16 GiB V100 description: 80 SMs, a 32 KiB per-SM working
    // budget, 128 KiB L1 once shared memory is counted.
    let hw = HardwareShape::v100_16g();
    println!(
        "{} — {} SMs, L1 budget {} B",
        hw.name, hw.sm_count, hw.l1_budget_bytes
    );

    // Three blocks (A, B, C) must sit in L1 at once. For doubles that
    // gives 32 x 32 blocks: 8 KiB each, 24 KiB total under a 32 KiB budget.
    let plan = select_block(&hw, 8)?;
    println!(
        "block {} x {}: {} B/block, {} B total",
        plan.block_rows, plan.block_cols, plan.bytes_per_block, plan.total_bytes
    );

    // Only the component count is pinned down; the same budget admits any
    // factor pair of 1024.
    let shapes = enumerate_block_shapes(plan.component_count());
    let printable: Vec<String> = shapes.iter().map(|(r, c)| format!("{r}x{c}")).collect();
    println!("equal-count shapes: {}", printable.join(" "));

    // With shared memory raising the budget to the full 128 KiB L1, the
    // block doubles to 64 x 64.
    let mut wide = hw.clone();
    wide.l1_budget_bytes = wide.l1_full_bytes;
    let plan = select_block(&wide, 8)?;
    println!(
        "shared-memory budget: block {} x {}",
        plan.block_rows, plan.block_cols
    );

    // Where does the optimum step up? Under the reading that each of 8
    // devices works from its share of global memory, three N x N double
    // matrices fit 2 GiB up to N = 9459.
    let budget = hw.per_gpu_budget(8);
    let n = predict_switch_threshold(budget, 8, 3)?;
    println!("switch threshold at {budget} B budget: N = {n}");

    // Any JSON with the same keys describes other hardware.
    let laptop = HardwareShape::from_json(
        r#"{
            "name": "laptop-l1",
            "l1_budget_bytes": 49152,
            "l1_full_bytes": 49152,
            "l2_bytes": 1310720,
            "global_bytes": 17179869184,
            "sm_count": 8
        }"#,
    )?;
    let plan = select_block(&laptop, 8)?;
    println!(
        "{}: block {} x {} ({} B total)",
        laptop.name, plan.block_rows, plan.block_cols, plan.total_bytes
    );
    Ok(())
}
