//! Wall-time and peak-memory measurement.

use std::time::Instant;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Resources {
    pub wall_time_s: f64,
    /// Peak resident set size, when the platform exposes it.
    pub peak_memory_bytes: Option<u64>,
}

/// Resets the kernel's peak-RSS watermark for this process. Best effort.
pub fn reset_peak_rss() -> bool {
    std::fs::write("/proc/self/clear_refs", "5").is_ok()
}

/// Peak resident set size (`VmHWM`) of this process.
pub fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

/// Runs `f`, timing it with a monotonic clock and sampling peak RSS.
///
/// The watermark is process-wide; when concurrent work shares the process,
/// or the watermark cannot be reset, the figure is an upper bound for `f`.
pub fn measure_resources<T>(f: impl FnOnce() -> T) -> (T, Resources) {
    reset_peak_rss();
    let start = Instant::now();
    let out = f();
    let wall_time_s = start.elapsed().as_secs_f64();
    let peak_memory_bytes = peak_rss_bytes();
    (
        out,
        Resources {
            wall_time_s,
            peak_memory_bytes,
        },
    )
}
