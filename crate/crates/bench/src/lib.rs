//! Shared helpers for the benchmark suite (kept tiny on purpose).
