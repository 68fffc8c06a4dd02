use nhq_core::wigner::RowExecutor;
use nhq_core::C64;
use rayon::prelude::*;

/// Environment variable holding the worker count for the phase-space RHS.
pub const THREADS_ENV: &str = "NHQ_THREADS";

/// Evaluates rows on a dedicated rayon pool.
///
/// Every row is computed by the same code regardless of which worker picks
/// it up, so results are bit-identical to [`nhq_core::wigner::Sequential`].
pub struct RayonRows {
    pool: rayon::ThreadPool,
}

impl RayonRows {
    pub fn new(threads: usize) -> Result<Self, rayon::ThreadPoolBuildError> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl RowExecutor for RayonRows {
    fn for_each_row(
        &self,
        out: &mut [C64],
        row_len: usize,
        f: &(dyn Fn(usize, &mut [C64]) + Sync),
    ) {
        self.pool.install(|| {
            out.par_chunks_mut(row_len)
                .enumerate()
                .for_each(|(i, row)| f(i, row))
        });
    }
}

/// Worker count from [`THREADS_ENV`], defaulting to the available cores.
pub fn thread_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
