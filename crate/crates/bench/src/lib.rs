//! Benchmark-only crate; see `benches/`.

use safefault::bench::to_bench_string;
use safefault::netlist::Netlist;
use safefault::synthetic::{random_netlist, NetlistShape};

/// A deterministic mid-sized circuit for throughput measurements.
pub fn benchmark_netlist(gates: usize) -> Netlist {
    random_netlist(0xbe9c, NetlistShape { max_inputs: 16, max_gates: gates, with_dffs: true })
}

/// Its bench-format text, for parser benchmarks.
pub fn benchmark_netlist_text(gates: usize) -> String {
    to_bench_string(&benchmark_netlist(gates))
}
