//! Multi-threaded restarts and oracle branches. Results do not depend on
//! the thread count.

use std::thread;

use hmp_core::annealer::select_best;
use hmp_core::exact_oracle::{enumeration_order, search_space_size, solve_exact_branch};
use hmp_core::{solve, Error, Instance, OracleLimits, OracleResult, SaParams, SaResult};

/// Runs restarts `0..restarts` (one ChaCha stream each) on up to `threads`
/// threads and keeps the best, ties going to the lower stream.
pub fn solve_parallel(
    instance: &Instance,
    params: &SaParams,
    restarts: u32,
    threads: usize,
) -> hmp_core::Result<SaResult> {
    let restarts = restarts.max(1) as usize;
    let threads = threads.clamp(1, restarts);
    let run = |k: usize| {
        let p = SaParams {
            stream: k as u64,
            ..params.clone()
        };
        solve(instance, &p)
    };
    let results: Vec<hmp_core::Result<SaResult>> = if threads == 1 {
        (0..restarts).map(run).collect()
    } else {
        let mut slots: Vec<Option<hmp_core::Result<SaResult>>> =
            (0..restarts).map(|_| None).collect();
        thread::scope(|s| {
            let handles: Vec<_> = (0..threads)
                .map(|tid| {
                    let run = &run;
                    s.spawn(move || {
                        (tid..restarts)
                            .step_by(threads)
                            .map(|k| (k, run(k)))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (k, r) in h.join().expect("restart thread panicked") {
                    slots[k] = Some(r);
                }
            }
        });
        slots
            .into_iter()
            .map(|r| r.expect("every restart ran"))
            .collect()
    };
    let results = results.into_iter().collect::<hmp_core::Result<Vec<_>>>()?;
    Ok(select_best(results).expect("at least one restart"))
}

/// Exact search with the first train's window split into contiguous day
/// ranges, one per thread, merged in day order.
pub fn solve_exact_parallel(
    instance: &Instance,
    limits: &OracleLimits,
    threads: usize,
) -> hmp_core::Result<OracleResult> {
    let product = search_space_size(instance);
    if product > limits.max_nodes {
        return Err(Error::SearchTooLarge {
            product,
            limit: limits.max_nodes,
        });
    }
    let first = enumeration_order(instance)[0];
    let days: Vec<i64> = instance.windows()[first].days().collect();
    let threads = threads.clamp(1, days.len());
    let chunk = days.len().div_ceil(threads);
    let parts: Vec<hmp_core::Result<Vec<OracleResult>>> = thread::scope(|s| {
        let handles: Vec<_> = days
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|&d| solve_exact_branch(instance, limits, d))
                        .collect::<hmp_core::Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("oracle thread panicked"))
            .collect()
    });
    let mut merged: Option<OracleResult> = None;
    for part in parts {
        for r in part? {
            merged = Some(match merged {
                None => r,
                Some(m) => m.merge(r),
            });
        }
    }
    Ok(merged.expect("windows are nonempty"))
}
