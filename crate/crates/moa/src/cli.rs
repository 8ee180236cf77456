//! The `moa` command line: `verify`, `bench`, `render`, `plan`.
//!
//! All logic lives in library functions so the subcommands stay thin and
//! testable; the binary in `main.rs` only forwards to [`main_from_env`].

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{gemm_moa, gemm_naive, pointwise, ScalarOp};
use crate::array::{iota, psi, rav, DenseArray};
use crate::bench::{bench_size, BenchRecord, CSV_HEADER};
use crate::cost::{enumerate_block_shapes, predict_switch_threshold, select_block, HardwareShape};
use crate::lift::{build_blocked, build_col_lifted, build_row_lifted};
use crate::onf::{build_gemm_nest, eval_nest, render_c, LoopNest, Pragmas};
use crate::shape::{gamma, gamma_inverse, Layout, Shape};

#[derive(Parser)]
#[command(
    name = "moa",
    version,
    about = "Array-calculus GEMM derivation, verification, and planning"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cross-check every kernel and transform against reference oracles
    Verify(VerifyArgs),
    /// Time the GEMM kernels over sizes and block shapes, writing CSV
    Bench(BenchArgs),
    /// Print derived C source for a kernel variant
    Render(RenderArgs),
    /// Select cache-fitting block sizes for a hardware shape
    Plan(PlanArgs),
}

#[derive(Args)]
struct VerifyArgs {
    /// Largest matrix extent in the exhaustive sweep
    #[arg(long, default_value_t = 6)]
    max_dim: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated square sizes, e.g. 256,512,1024
    #[arg(long, value_delimiter = ',', required = true)]
    sizes: Vec<usize>,
    /// Comma-separated block shapes, e.g. 32x32,64x64
    #[arg(long, value_delimiter = ',', value_parser = parse_block, required = true)]
    blocks: Vec<(usize, usize)>,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    /// Output CSV path
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Skip the oracle gate before timing
    #[arg(long)]
    skip_verify: bool,
    /// Also run the row-partitioned kernel on this many threads
    #[arg(long)]
    parallel: Option<usize>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum RenderVariant {
    /// Plain contiguous nest
    Ip,
    /// Rows of A split across processors
    IpRows,
    /// Columns of B split into groups
    IpCols,
    /// All three loops blocked
    Blocked,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(value_enum)]
    variant: RenderVariant,
    #[arg(long, default_value_t = 64)]
    m: i64,
    #[arg(long, default_value_t = 64)]
    n: i64,
    #[arg(long, default_value_t = 64)]
    p: i64,
    /// Row partitions (ip-rows)
    #[arg(long, default_value_t = 4)]
    np: i64,
    /// Column group width (ip-cols)
    #[arg(long, default_value_t = 8)]
    rsize: i64,
    #[arg(long, default_value_t = 32)]
    bi: i64,
    #[arg(long, default_value_t = 32)]
    bk: i64,
    #[arg(long, default_value_t = 32)]
    bj: i64,
    /// Emit an OpenACC pragma above the parallel loop
    #[arg(long)]
    pragmas: bool,
    /// Write to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum ElemKind {
    F32,
    F64,
}

impl ElemKind {
    pub fn bytes(self) -> u64 {
        match self {
            ElemKind::F32 => 4,
            ElemKind::F64 => 8,
        }
    }
}

#[derive(Args)]
struct PlanArgs {
    /// Bundled preset name (v100-16g, v100-32g) or path to a JSON file
    #[arg(long, default_value = "v100-16g")]
    hw: String,
    #[arg(long, value_enum, default_value_t = ElemKind::F64)]
    elem: ElemKind,
    /// Override the per-SM L1 budget in bytes
    #[arg(long)]
    l1_budget: Option<u64>,
    /// Devices sharing global memory when computing the switch threshold
    #[arg(long, default_value_t = 8)]
    gpu_share: u64,
    /// Matrices in the working set
    #[arg(long, default_value_t = 3)]
    matrices: u64,
}

fn parse_block(s: &str) -> Result<(usize, usize), String> {
    let (r, c) = s
        .split_once('x')
        .ok_or_else(|| format!("block `{s}` must look like 32x32"))?;
    let parse = |t: &str| {
        t.trim()
            .parse::<usize>()
            .map_err(|e| format!("block `{s}`: {e}"))
    };
    Ok((parse(r)?, parse(c)?))
}

/// Outcome of one verification run: named failures and the pass count.
#[derive(Debug, Default)]
pub struct VerifyReport {
    pub passed: usize,
    pub failures: Vec<String>,
}

impl VerifyReport {
    fn check(&mut self, outcome: Result<(), String>) {
        match outcome {
            Ok(()) => self.passed += 1,
            Err(msg) => self.failures.push(msg),
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        for f in &self.failures {
            writeln!(s, "FAIL {f}").unwrap();
        }
        writeln!(
            s,
            "verify: {} checks passed, {} failed",
            self.passed,
            self.failures.len()
        )
        .unwrap();
        s
    }
}

fn divisors(n: i64) -> Vec<i64> {
    (1..=n.max(1)).filter(|d| n % d == 0).collect()
}

/// Evaluate `nest` over the given integer matrices and compare against the
/// row-column reference; the label identifies the failing configuration.
pub fn check_nest_against_reference(
    label: &str,
    nest: &LoopNest,
    a: &DenseArray<i64>,
    b: &DenseArray<i64>,
) -> Result<(), String> {
    let m = a.shape().extents()[0];
    let p = b.shape().extents()[1];
    let expect = gemm_naive(a, b).map_err(|e| format!("{label}: {e}"))?;
    let mut c = vec![0i64; m * p];
    eval_nest(nest, a.data(), b.data(), &mut c).map_err(|e| format!("{label}: {e}"))?;
    if c != expect.data() {
        return Err(format!("{label}: result differs from reference"));
    }
    Ok(())
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DenseArray<i64> {
    let data = (0..rows * cols).map(|_| rng.gen_range(-9..=9)).collect();
    DenseArray::from_vec([rows, cols], data).unwrap()
}

fn random_shape(rng: &mut ChaCha8Rng, max_rank: usize, max_extent: usize) -> Shape {
    let rank = rng.gen_range(0..=max_rank);
    Shape::new(
        (0..rank)
            .map(|_| rng.gen_range(0..=max_extent))
            .collect::<Vec<_>>(),
    )
}

/// Exhaustive oracle sweep: every kernel and lifted/blocked nest against
/// the row-column reference for all extents up to `max_dim`, plus the psi
/// calculus suite on random shapes.
pub fn run_verify(max_dim: usize, seed: u64) -> VerifyReport {
    let mut report = VerifyReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    for m in 0..=max_dim as i64 {
        for n in 0..=max_dim as i64 {
            for p in 0..=max_dim as i64 {
                let a = random_matrix(&mut rng, m as usize, n as usize);
                let b = random_matrix(&mut rng, n as usize, p as usize);

                report.check(
                    gemm_moa(&a, &b)
                        .map_err(|e| format!("gemm_moa {m}x{n}x{p}: {e}"))
                        .and_then(|c| {
                            if c == gemm_naive(&a, &b).unwrap() {
                                Ok(())
                            } else {
                                Err(format!("gemm_moa {m}x{n}x{p}: differs from reference"))
                            }
                        }),
                );

                let nest = build_gemm_nest(m, n, p).unwrap();
                report.check(check_nest_against_reference(
                    &format!("ip {m}x{n}x{p}"),
                    &nest,
                    &a,
                    &b,
                ));

                // A zero-extent row loop admits no positive inner extent.
                if m > 0 {
                    for np in divisors(m) {
                        let nest = build_row_lifted(m, n, p, np).unwrap();
                        report.check(check_nest_against_reference(
                            &format!("ip_rows {m}x{n}x{p} np={np}"),
                            &nest,
                            &a,
                            &b,
                        ));
                    }
                }
                for rsize in divisors(p) {
                    let nest = build_col_lifted(m, n, p, rsize).unwrap();
                    report.check(check_nest_against_reference(
                        &format!("ip_cols {m}x{n}x{p} rsize={rsize}"),
                        &nest,
                        &a,
                        &b,
                    ));
                }
                for bi in divisors(m) {
                    for bk in divisors(n) {
                        for bj in divisors(p) {
                            let nest = build_blocked(m, n, p, bi, bk, bj).unwrap();
                            report.check(check_nest_against_reference(
                                &format!("blocked {m}x{n}x{p} block={bi}x{bk}x{bj}"),
                                &nest,
                                &a,
                                &b,
                            ));
                        }
                    }
                }
            }
        }
    }

    run_psi_suite(&mut report, &mut rng, 100);
    report
}

/// Psi identity, gamma bijection, indexing distribution, and the
/// rav/gamma bracket bridge over random shapes.
pub fn run_psi_suite(report: &mut VerifyReport, rng: &mut ChaCha8Rng, shapes: usize) {
    for _ in 0..shapes {
        let shape = random_shape(rng, 4, 5);
        let layout = if rng.gen_bool(0.5) {
            Layout::RowMajor
        } else {
            Layout::ColMajor
        };
        let count = shape.count();
        let data: Vec<i64> = (0..count).map(|_| rng.gen_range(-9..=9)).collect();
        let xi = DenseArray::with_layout(shape.clone(), layout, data).unwrap();

        // psi identity: indexing at every element of iota(shape) and
        // reassembling returns the array.
        let mut parts = Vec::with_capacity(count);
        let mut identity_ok = true;
        for idx in iota(&shape).index_rows() {
            match psi(&idx, &xi).and_then(|s| s.scalar_value()) {
                Ok(v) => parts.push(v),
                Err(_) => identity_ok = false,
            }
        }
        let identity_ok = identity_ok
            && DenseArray::from_vec(shape.clone(), parts)
                .map(|rebuilt| rebuilt == xi)
                .unwrap_or(false);
        report.check(if identity_ok {
            Ok(())
        } else {
            Err(format!("psi identity failed on shape {shape}"))
        });

        // gamma bijection over both layouts.
        for l in [Layout::RowMajor, Layout::ColMajor] {
            let mut seen = vec![false; count];
            let mut ok = true;
            for idx in iota(&shape).index_rows() {
                match gamma(&idx, &shape, l) {
                    Ok(off) if off < count && !seen[off] => {
                        seen[off] = true;
                        ok &= gamma_inverse(off, &shape, l)
                            .map(|i| i == idx)
                            .unwrap_or(false);
                    }
                    _ => ok = false,
                }
            }
            ok &= seen.iter().all(|&s| s);
            report.check(if ok {
                Ok(())
            } else {
                Err(format!("gamma bijection failed on shape {shape} ({l:?})"))
            });
        }

        // Indexing distributes over pointwise ops, and the bracket bridge
        // relates psi to rav + gamma.
        let other: Vec<i64> = (0..count).map(|_| rng.gen_range(-9..=9)).collect();
        let eta = DenseArray::with_layout(shape.clone(), layout, other).unwrap();
        let op = [
            ScalarOp::Add,
            ScalarOp::Mul,
            ScalarOp::Sub,
            ScalarOp::Max,
            ScalarOp::Min,
        ][rng.gen_range(0..5)];
        let combined = pointwise(op, &xi, &eta).unwrap();
        let raveled = rav(&xi);
        let mut dnf_ok = true;
        let mut bridge_ok = true;
        for idx in iota(&shape).index_rows() {
            let lhs = psi(&idx, &combined).unwrap().scalar_value().unwrap();
            let rhs = op.apply(
                psi(&idx, &xi).unwrap().scalar_value().unwrap(),
                psi(&idx, &eta).unwrap().scalar_value().unwrap(),
            );
            dnf_ok &= lhs == rhs;
            let off = gamma(&idx, &shape, layout).unwrap();
            bridge_ok &= psi(&idx, &xi).unwrap().scalar_value().unwrap() == raveled.data()[off];
        }
        report.check(if dnf_ok {
            Ok(())
        } else {
            Err(format!("indexing distribution failed on shape {shape}"))
        });
        report.check(if bridge_ok {
            Ok(())
        } else {
            Err(format!("bracket bridge failed on shape {shape}"))
        });
    }
}

/// Build the nest for a render variant.
#[allow(clippy::too_many_arguments)]
pub fn render_variant(
    variant: RenderVariant,
    m: i64,
    n: i64,
    p: i64,
    np: i64,
    rsize: i64,
    blocks: (i64, i64, i64),
    pragmas: bool,
) -> crate::error::Result<String> {
    let (nest, name, parallel_var) = match variant {
        RenderVariant::Ip => (build_gemm_nest(m, n, p)?, "ip", "i"),
        RenderVariant::IpRows => (build_row_lifted(m, n, p, np)?, "ip_rows", "k"),
        RenderVariant::IpCols => (build_col_lifted(m, n, p, rsize)?, "ip_cols", "i"),
        RenderVariant::Blocked => {
            let (bi, bk, bj) = blocks;
            (build_blocked(m, n, p, bi, bk, bj)?, "ip_blocked", "ib")
        }
    };
    let pragma_set = if pragmas {
        Pragmas::none().above(parallel_var, "#pragma acc parallel loop")
    } else {
        Pragmas::none()
    };
    render_c(&nest, name, &pragma_set)
}

/// Resolve `--hw`: bundled preset name first, then a JSON file path.
pub fn load_hardware(source: &str) -> anyhow::Result<HardwareShape> {
    if let Some(hw) = HardwareShape::preset(source) {
        return Ok(hw);
    }
    let text = std::fs::read_to_string(source)
        .with_context(|| format!("reading hardware shape `{source}`"))?;
    Ok(HardwareShape::from_json(&text)?)
}

/// Block plan plus threshold report, with the byte arithmetic spelled out.
pub fn plan_report(
    hw: &HardwareShape,
    elem_bytes: u64,
    gpu_share: u64,
    n_matrices: u64,
) -> crate::error::Result<String> {
    let plan = select_block(hw, elem_bytes)?;
    let mut out = String::new();
    writeln!(out, "hardware: {}", hw.name).unwrap();
    writeln!(out, "  sm_count: {}", hw.sm_count).unwrap();
    writeln!(out, "  l1_budget_bytes: {}", hw.l1_budget_bytes).unwrap();
    writeln!(out, "  l1_full_bytes: {}", hw.l1_full_bytes).unwrap();
    writeln!(out, "  l2_bytes: {}", hw.l2_bytes).unwrap();
    writeln!(out, "  global_bytes: {}", hw.global_bytes).unwrap();
    writeln!(out, "element bytes: {elem_bytes}").unwrap();
    writeln!(
        out,
        "selected block: {} x {} ({} components)",
        plan.block_rows,
        plan.block_cols,
        plan.component_count()
    )
    .unwrap();
    writeln!(
        out,
        "  bytes per block: {} * {} * {} = {}",
        plan.block_rows, plan.block_cols, plan.elem_bytes, plan.bytes_per_block
    )
    .unwrap();
    writeln!(out, "  resident blocks (A, B, C): {}", plan.blocks_per_sm).unwrap();
    writeln!(
        out,
        "  working set: {} * {} = {} <= {} (l1 budget)",
        plan.blocks_per_sm, plan.bytes_per_block, plan.total_bytes, hw.l1_budget_bytes
    )
    .unwrap();
    writeln!(
        out,
        "equal-count block shapes for {} components:",
        plan.component_count()
    )
    .unwrap();
    for (r, c) in enumerate_block_shapes(plan.component_count()) {
        writeln!(out, "  {r} x {c}").unwrap();
    }
    let budget = hw.per_gpu_budget(gpu_share);
    let threshold = predict_switch_threshold(budget, elem_bytes, n_matrices)?;
    writeln!(
        out,
        "switch threshold (global / {gpu_share} = {budget} bytes per device, {n_matrices} matrices):"
    )
    .unwrap();
    writeln!(
        out,
        "  N = floor(sqrt({budget} / {})) = {threshold}",
        n_matrices * elem_bytes
    )
    .unwrap();
    Ok(out)
}

fn run_bench(args: &BenchArgs) -> anyhow::Result<()> {
    for &n in &args.sizes {
        for &(r, c) in &args.blocks {
            if r == 0 || c == 0 || n % r != 0 || n % c != 0 {
                bail!("block {r}x{c} does not divide size {n}");
            }
        }
    }
    if !args.skip_verify {
        let gate = run_verify(4, args.seed);
        if !gate.ok() {
            print!("{}", gate.summary());
            bail!("oracle gate failed; refusing to time unverified kernels");
        }
        println!("oracle gate passed ({} checks)", gate.passed);
    }
    let trials = args.trials.max(3);
    let mut rows = Vec::new();
    println!("{CSV_HEADER}");
    for &n in &args.sizes {
        let records = bench_size(n, &args.blocks, trials, args.seed, args.parallel)?;
        for rec in &records {
            println!("{}", rec.csv_row());
        }
        rows.extend(records);
    }
    write_csv(&rows, &args.out)?;
    println!("wrote {} rows to {}", rows.len(), args.out.display());
    Ok(())
}

/// Write records under the fixed CSV schema.
pub fn write_csv(records: &[BenchRecord], path: &std::path::Path) -> anyhow::Result<()> {
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for rec in records {
        text.push_str(&rec.csv_row());
        text.push('\n');
    }
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Parse `args` (including the program name) and run; returns the process
/// exit code.
pub fn main_from(args: impl IntoIterator<Item = String>) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap prints help/version through the error path.
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}

pub fn main_from_env() -> i32 {
    main_from(std::env::args())
}

fn dispatch(cli: Cli) -> anyhow::Result<i32> {
    match cli.command {
        Command::Verify(args) => {
            let report = run_verify(args.max_dim, args.seed);
            print!("{}", report.summary());
            Ok(if report.ok() { 0 } else { 1 })
        }
        Command::Bench(args) => {
            run_bench(&args)?;
            Ok(0)
        }
        Command::Render(args) => {
            let text = render_variant(
                args.variant,
                args.m,
                args.n,
                args.p,
                args.np,
                args.rsize,
                (args.bi, args.bk, args.bj),
                args.pragmas,
            )?;
            match &args.out {
                Some(path) => std::fs::write(path, &text)
                    .with_context(|| format!("writing {}", path.display()))?,
                None => print!("{text}"),
            }
            Ok(0)
        }
        Command::Plan(args) => {
            let mut hw = load_hardware(&args.hw)?;
            if let Some(budget) = args.l1_budget {
                hw.l1_budget_bytes = budget;
                hw.l1_full_bytes = hw.l1_full_bytes.max(budget);
                hw.l2_bytes = hw.l2_bytes.max(budget);
                hw.global_bytes = hw.global_bytes.max(budget);
            }
            print!(
                "{}",
                plan_report(&hw, args.elem.bytes(), args.gpu_share, args.matrices)?
            );
            Ok(0)
        }
    }
}
