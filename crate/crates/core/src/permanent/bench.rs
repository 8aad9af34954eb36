//! Random sparse {0,1} test matrices and the engine timing harness.

use std::io::Write;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{perm_ryser, Engine, IntMatrix, MatrixView, RyserVariant};
use crate::{Error, Result};

const MAX_RESAMPLES: usize = 10_000;

/// A `{0,1}` matrix whose every column holds exactly `column_weight` ones at
/// uniformly random rows, resampled until its permanent is nonzero. The same
/// `(order, column_weight, seed)` always yields the same matrix.
pub fn random_benchmark_matrix(order: usize, column_weight: usize, seed: u64) -> Result<IntMatrix> {
    if order == 0 || column_weight == 0 || column_weight > order || order > super::MAX_DIM {
        return Err(Error::invalid(format!(
            "no order-{order} matrix with column weight {column_weight}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RESAMPLES {
        let mut m = IntMatrix::zeros(order, order);
        for c in 0..order {
            for r in sample(&mut rng, order, column_weight) {
                m.set(r, c, 1);
            }
        }
        if !perm_ryser(&MatrixView::full(&m)?, RyserVariant::NijenhuisWilf)?.is_zero() {
            return Ok(m);
        }
    }
    Err(Error::invalid(format!(
        "gave up after {MAX_RESAMPLES} draws without a nonzero permanent"
    )))
}

/// One timed permanent.
#[derive(Clone, Debug, PartialEq)]
pub struct BenchRecord {
    pub engine: Engine,
    pub order: usize,
    pub column_weight: usize,
    pub seed: u64,
    pub seconds: f64,
}

/// Seed of the `trial`-th matrix at one sweep point.
pub fn trial_seed(base: u64, order: usize, column_weight: usize, trial: usize) -> u64 {
    // splitmix64 finalizer over the packed coordinates
    let mut z = base
        ^ (order as u64) << 40
        ^ (column_weight as u64) << 20
        ^ trial as u64;
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Times every engine on `trials` shared random matrices per order. All
/// engines must agree on each matrix.
pub fn benchmark(
    engines: &[Engine],
    orders: &[usize],
    column_weight: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<BenchRecord>> {
    let mut records = Vec::new();
    for &order in orders {
        for trial in 0..trials {
            let s = trial_seed(seed, order, column_weight, trial);
            let m = random_benchmark_matrix(order, column_weight, s)?;
            let mut reference = None;
            for &engine in engines {
                let mut view = MatrixView::full(&m)?;
                let start = Instant::now();
                let value = engine.compute(&mut view)?;
                let seconds = start.elapsed().as_secs_f64();
                if *reference.get_or_insert(value) != value {
                    return Err(Error::invalid(format!(
                        "{engine} disagrees on order-{order} matrix with seed {s}"
                    )));
                }
                records.push(BenchRecord { engine, order, column_weight, seed: s, seconds });
            }
        }
    }
    Ok(records)
}

/// Mean seconds per (engine, order, weight), in first-seen order.
pub fn means(records: &[BenchRecord]) -> Vec<(Engine, usize, usize, f64)> {
    let mut keys: Vec<(Engine, usize, usize)> = Vec::new();
    for r in records {
        let k = (r.engine, r.order, r.column_weight);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    keys.into_iter()
        .map(|(e, o, w)| {
            let times: Vec<f64> = records
                .iter()
                .filter(|r| (r.engine, r.order, r.column_weight) == (e, o, w))
                .map(|r| r.seconds)
                .collect();
            (e, o, w, times.iter().sum::<f64>() / times.len() as f64)
        })
        .collect()
}

/// CSV with header `engine,order,column_weight,seed,seconds`: one row per
/// timed matrix, then one row per sweep point with `seed` set to `mean`.
pub fn write_bench_csv<W: Write>(mut out: W, records: &[BenchRecord]) -> std::io::Result<()> {
    writeln!(out, "engine,order,column_weight,seed,seconds")?;
    for r in records {
        writeln!(out, "{},{},{},{},{:.9}", r.engine, r.order, r.column_weight, r.seed, r.seconds)?;
    }
    for (e, o, w, mean) in means(records) {
        writeln!(out, "{e},{o},{w},mean,{mean:.9}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permanent::perm_brute;

    #[test]
    fn forced_shapes() {
        let m = random_benchmark_matrix(5, 5, 1).unwrap();
        assert_eq!(m, IntMatrix::filled(5, 5, 1));
        assert_eq!(perm_brute(&m.view().unwrap()).unwrap().get(), 120);
        let p = random_benchmark_matrix(2, 1, 3).unwrap();
        assert_eq!(perm_brute(&p.view().unwrap()).unwrap().get(), 1);
    }

    #[test]
    fn reproducible_with_nonzero_permanent() {
        let a = random_benchmark_matrix(8, 3, 42).unwrap();
        assert_eq!(a, random_benchmark_matrix(8, 3, 42).unwrap());
        for c in 0..8 {
            assert_eq!((0..8).map(|r| a.get(r, c)).sum::<u32>(), 3);
        }
        assert!(perm_brute(&a.view().unwrap()).unwrap().get() > 0);
    }

    #[test]
    fn infeasible_parameters() {
        assert!(random_benchmark_matrix(3, 4, 0).is_err());
        assert!(random_benchmark_matrix(0, 0, 0).is_err());
        assert!(random_benchmark_matrix(3, 0, 0).is_err());
    }

    #[test]
    fn csv_layout() {
        let recs = benchmark(&[Engine::Recursive, Engine::NijenhuisWilf], &[4, 5], 2, 2, 9).unwrap();
        assert_eq!(recs.len(), 8);
        let mut buf = Vec::new();
        write_bench_csv(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "engine,order,column_weight,seed,seconds");
        assert_eq!(lines.len(), 1 + 8 + 4);
        assert!(lines[9].starts_with("recursive,4,2,mean,"));
    }
}
