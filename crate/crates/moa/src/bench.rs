//! Native timing kernels and CSV emission.
//!
//! The interpreter in [`crate::onf`] is the correctness reference; these
//! kernels are the same loop structures written directly over `f64` slices
//! so wall-time measurements mean something. Every kernel preserves the
//! ascending contraction order per output component, so all of them produce
//! bitwise-identical results on the same inputs. Timing wraps the kernel
//! call only — allocation and initialization happen outside the clock — and
//! reports the median of the trials.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Textbook i-j-k product: one dot product of a row of `a` with a column of
/// `b` per output component. The column walk strides by `p`; this is the
/// access pattern the contiguous kernels avoid.
pub fn kernel_naive(a: &[f64], b: &[f64], c: &mut [f64], m: usize, n: usize, p: usize) {
    for i in 0..m {
        for j in 0..p {
            let mut acc = 0.0;
            for k in 0..n {
                acc += a[i * n + k] * b[k * p + j];
            }
            c[i * p + j] = acc;
        }
    }
}

/// Contiguous i-k-j product: for each row `i`, scale row `k` of `b` by
/// `a[i,k]` and accumulate into row `i` of `c`, `k` ascending. All three
/// buffers are walked along rows only.
pub fn kernel_moa(a: &[f64], b: &[f64], c: &mut [f64], m: usize, n: usize, p: usize) {
    for i in 0..m {
        let a_row = &a[i * n..(i + 1) * n];
        let c_row = &mut c[i * p..(i + 1) * p];
        for (k, &scale) in a_row.iter().enumerate() {
            let b_row = &b[k * p..(k + 1) * p];
            for (cv, &bv) in c_row.iter_mut().zip(b_row) {
                *cv += scale * bv;
            }
        }
    }
}

/// Blocked contiguous product with block extents `(bi, bk, bj)`: block
/// loops `(ib, sb, jb)` mirror the scalar `(i, sigma, j)` order, intra-block
/// loops keep row-contiguous access. Extents must divide the sizes.
#[allow(clippy::too_many_arguments)]
pub fn kernel_blocked(
    a: &[f64],
    b: &[f64],
    c: &mut [f64],
    m: usize,
    n: usize,
    p: usize,
    bi: usize,
    bk: usize,
    bj: usize,
) -> Result<()> {
    for (extent, divisor) in [(m, bi), (n, bk), (p, bj)] {
        if divisor == 0 || extent % divisor != 0 {
            return Err(Error::NotDivisible {
                extent: extent as i64,
                divisor: divisor as i64,
            });
        }
    }
    for ib in 0..m / bi {
        for sb in 0..n / bk {
            for jb in 0..p / bj {
                for ii in 0..bi {
                    let i = ib * bi + ii;
                    let c_row = &mut c[i * p + jb * bj..i * p + jb * bj + bj];
                    for si in 0..bk {
                        let k = sb * bk + si;
                        let scale = a[i * n + k];
                        let b_row = &b[k * p + jb * bj..k * p + jb * bj + bj];
                        for (cv, &bv) in c_row.iter_mut().zip(b_row) {
                            *cv += scale * bv;
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// Row-partitioned contiguous product executed on `threads` workers. Each
/// worker owns a disjoint band of output rows (the lifted outer index), so
/// results are bitwise identical to [`kernel_moa`].
pub fn kernel_moa_par(
    a: &[f64],
    b: &[f64],
    c: &mut [f64],
    m: usize,
    n: usize,
    p: usize,
    threads: usize,
) {
    let threads = threads.max(1).min(m.max(1));
    let rows_per = m.div_ceil(threads);
    std::thread::scope(|scope| {
        for (band, c_band) in c.chunks_mut(rows_per * p).enumerate() {
            let row0 = band * rows_per;
            scope.spawn(move || {
                let rows = c_band.len() / p.max(1);
                for local in 0..rows {
                    let i = row0 + local;
                    let c_row = &mut c_band[local * p..(local + 1) * p];
                    for k in 0..n {
                        let scale = a[i * n + k];
                        let b_row = &b[k * p..(k + 1) * p];
                        for (cv, &bv) in c_row.iter_mut().zip(b_row) {
                            *cv += scale * bv;
                        }
                    }
                }
            });
        }
    });
}

/// One timed configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub kernel: String,
    pub m: usize,
    pub n: usize,
    pub p: usize,
    /// Block extents for blocked kernels; empty CSV fields otherwise.
    pub block: Option<(usize, usize)>,
    pub trials: usize,
    /// Median seconds per trial.
    pub wall_seconds: f64,
    /// Sum of the output components, for cross-kernel drift detection.
    pub checksum: f64,
}

pub const CSV_HEADER: &str = "kernel,m,n,p,block_rows,block_cols,trials,wall_seconds,checksum";

impl BenchRecord {
    pub fn csv_row(&self) -> String {
        let (br, bc) = match self.block {
            Some((r, c)) => (r.to_string(), c.to_string()),
            None => (String::new(), String::new()),
        };
        format!(
            "{},{},{},{},{},{},{},{:.9},{}",
            self.kernel,
            self.m,
            self.n,
            self.p,
            br,
            bc,
            self.trials,
            self.wall_seconds,
            self.checksum
        )
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[mid]
    } else {
        0.5 * (xs[mid - 1] + xs[mid])
    }
}

/// Deterministic matrix pair for size `n`, uniform in [-1, 1).
pub fn seeded_inputs(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let b = (0..n * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    (a, b)
}

/// Time `run` over `trials` repetitions on a zeroed output buffer and
/// summarize. Only the kernel call is inside the clock.
pub fn time_kernel(
    kernel: &str,
    m: usize,
    n: usize,
    p: usize,
    block: Option<(usize, usize)>,
    trials: usize,
    mut run: impl FnMut(&mut [f64]),
) -> BenchRecord {
    let trials = trials.max(3);
    let mut c = vec![0.0f64; m * p];
    let mut times = Vec::with_capacity(trials);
    let mut checksum = 0.0;
    for _ in 0..trials {
        c.fill(0.0);
        let start = Instant::now();
        run(&mut c);
        times.push(start.elapsed().as_secs_f64());
        checksum = c.iter().sum();
    }
    BenchRecord {
        kernel: kernel.to_string(),
        m,
        n,
        p,
        block,
        trials,
        wall_seconds: median(times),
        checksum,
    }
}

/// Run the standard kernel set for one square size: naive, contiguous, one
/// blocked row per block shape (mapped to extents `(r, c, c)`), and the
/// parallel row-partitioned kernel when `threads` is set.
pub fn bench_size(
    n: usize,
    blocks: &[(usize, usize)],
    trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<BenchRecord>> {
    for &(r, c) in blocks {
        for b in [r, c] {
            if b == 0 || !n.is_multiple_of(b) {
                return Err(Error::NotDivisible {
                    extent: n as i64,
                    divisor: b as i64,
                });
            }
        }
    }
    let (a, b) = seeded_inputs(n, seed);
    let mut records = Vec::new();
    records.push(time_kernel("naive", n, n, n, None, trials, |c| {
        kernel_naive(&a, &b, c, n, n, n)
    }));
    records.push(time_kernel("moa", n, n, n, None, trials, |c| {
        kernel_moa(&a, &b, c, n, n, n)
    }));
    for &(br, bc) in blocks {
        records.push(time_kernel(
            "blocked",
            n,
            n,
            n,
            Some((br, bc)),
            trials,
            |c| kernel_blocked(&a, &b, c, n, n, n, br, bc, bc).expect("divisibility checked"),
        ));
    }
    if let Some(threads) = threads {
        records.push(time_kernel("moa_par", n, n, n, None, trials, |c| {
            kernel_moa_par(&a, &b, c, n, n, n, threads)
        }));
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::gemm_naive;
    use crate::array::DenseArray;
    use crate::lift::build_blocked;
    use crate::onf::eval_nest;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn kernels_agree_with_array_oracle() {
        let (m, n, p) = (6usize, 5usize, 8usize);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: Vec<f64> = (0..m * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b: Vec<f64> = (0..n * p).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let expect = gemm_naive(
            &DenseArray::from_vec([m, n], a.clone()).unwrap(),
            &DenseArray::from_vec([n, p], b.clone()).unwrap(),
        )
        .unwrap();

        let mut c = vec![0.0; m * p];
        kernel_naive(&a, &b, &mut c, m, n, p);
        assert_eq!(c, expect.data());

        let mut c2 = vec![0.0; m * p];
        kernel_moa(&a, &b, &mut c2, m, n, p);
        for (x, y) in c2.iter().zip(expect.data()) {
            assert!(close(*x, *y));
        }

        let mut c3 = vec![0.0; m * p];
        kernel_blocked(&a, &b, &mut c3, m, n, p, 3, 5, 4).unwrap();
        assert_eq!(c3, c2);

        let mut c4 = vec![0.0; m * p];
        kernel_moa_par(&a, &b, &mut c4, m, n, p, 3);
        assert_eq!(c4, c2);
    }

    #[test]
    fn blocked_kernel_matches_interpreted_nest_bitwise() {
        let (m, n, p) = (8usize, 8usize, 8usize);
        let (a, b) = seeded_inputs(8, 99);
        let mut native = vec![0.0; m * p];
        kernel_blocked(&a, &b, &mut native, m, n, p, 4, 2, 4).unwrap();
        let nest = build_blocked(8, 8, 8, 4, 2, 4).unwrap();
        let mut interpreted = vec![0.0; m * p];
        eval_nest(&nest, &a, &b, &mut interpreted).unwrap();
        assert_eq!(native, interpreted);
    }

    #[test]
    fn blocked_kernel_rejects_non_divisors() {
        let mut c = vec![0.0; 16];
        assert!(matches!(
            kernel_blocked(&[0.0; 16], &[0.0; 16], &mut c, 4, 4, 4, 3, 2, 2),
            Err(Error::NotDivisible { .. })
        ));
    }

    #[test]
    fn bench_rows_and_checksums() {
        let records = bench_size(8, &[(2, 2), (4, 4)], 3, 42, None).unwrap();
        assert_eq!(records.len(), 4);
        let sum0 = records[0].checksum;
        for r in &records {
            assert!(r.wall_seconds >= 0.0);
            assert!(r.trials >= 3);
            assert!(close(r.checksum, sum0));
        }
        assert!(matches!(
            bench_size(8, &[(3, 3)], 3, 42, None),
            Err(Error::NotDivisible { .. })
        ));
    }

    #[test]
    fn seeded_inputs_are_deterministic() {
        assert_eq!(seeded_inputs(4, 7), seeded_inputs(4, 7));
        assert_ne!(seeded_inputs(4, 7), seeded_inputs(4, 8));
    }

    #[test]
    fn csv_formatting() {
        let rec = BenchRecord {
            kernel: "blocked".into(),
            m: 8,
            n: 8,
            p: 8,
            block: Some((2, 4)),
            trials: 3,
            wall_seconds: 0.25,
            checksum: 1.5,
        };
        assert_eq!(rec.csv_row(), "blocked,8,8,8,2,4,3,0.250000000,1.5");
        let plain = BenchRecord {
            block: None,
            kernel: "naive".into(),
            ..rec
        };
        assert_eq!(plain.csv_row(), "naive,8,8,8,,,3,0.250000000,1.5");
        assert_eq!(
            CSV_HEADER,
            "kernel,m,n,p,block_rows,block_cols,trials,wall_seconds,checksum"
        );
    }

    #[test]
    fn median_of_odd_and_even_sets() {
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(vec![4.0, 1.0, 2.0, 3.0]), 2.5);
    }
}
