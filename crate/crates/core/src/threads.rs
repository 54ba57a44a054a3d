//! Thread-count control through the `VCL_THREADS` environment variable.

/// Thread cap requested through `VCL_THREADS`, if set to a positive integer.
pub fn requested_threads() -> Option<usize> {
    std::env::var("VCL_THREADS").ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Run `f` on a pool capped by `VCL_THREADS`, or on the global pool.
pub fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    match requested_threads().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(f),
        None => f(),
    }
}
