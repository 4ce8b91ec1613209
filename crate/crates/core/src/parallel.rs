use rayon::ThreadPoolBuilder;

/// Runs `op` on a dedicated pool of `workers` threads (at least one).
///
/// All callers split their output into disjoint slices whose contents depend
/// only on the slice index, so results do not depend on the worker count.
pub fn with_workers<R: Send>(workers: usize, op: impl FnOnce() -> R + Send) -> R {
    let pool = ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("failed to start worker pool");
    pool.install(op)
}

/// Machine parallelism, falling back to one worker.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
