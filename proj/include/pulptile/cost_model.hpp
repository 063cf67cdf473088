// cost_model.hpp — analytic cycle costs shared by the tiler objective and the
// simulator. All functions are pure and integer-valued.
#pragma once

#include <cmath>
#include <cstdint>

#include "pulptile/graph.hpp"
#include "pulptile/platform.hpp"

namespace pulptile {

inline std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

// One unit of scheduled work: a tile (or whole node) of a single op.
struct TileWorkload {
    OpKind op = OpKind::gemm;
    DType dtype = DType::int8; // compute dtype (first input)
    std::int64_t macs = 0;     // for MAC ops
    std::int64_t elements = 0; // output elements, for non-MAC ops
};

// Cycles/element for non-MAC ops on the core cluster. Declared model
// constants; the paper describes these layers as parallel-software only.
inline int op_cost_factor(OpKind op) {
    switch (op) {
    case OpKind::softmax: return 15;
    case OpKind::layernorm: return 8;
    case OpKind::add: return 1;
    case OpKind::requant: return 2;
    case OpKind::activation: return 2;
    default: return 1;
    }
}

// L2<->L1 transfer: startup latency plus pipelined beats.
inline std::int64_t dma_cycles(std::int64_t bytes, const ClusterConfig& cfg) {
    if (bytes < 0) throw Error(Stage::internal, "negative DMA byte count");
    if (bytes == 0) return 0;
    return cfg.dma_startup + ceil_div(bytes, cfg.dma_bw);
}

inline std::int64_t core_kernel_cycles(const TileWorkload& w, const CoreDescriptor& cores) {
    double denom = cores.count * cores.parallel_efficiency;
    if (op_is_mac(w.op)) {
        double per_core = cores.throughput(w.dtype); // throws if unsupported
        return (std::int64_t)std::ceil(double(w.macs) / (denom * per_core));
    }
    return (std::int64_t)std::ceil(double(w.elements) * op_cost_factor(w.op) / denom);
}

// gemm-systolic: steady-state throughput rows*cols MACs/cycle plus the
// pipeline fill of one C row circulating through cols CEs of latency L,
// plus per-job setup. conv-quantized: flat peak plus setup.
inline std::int64_t hwpe_job_cycles(const TileWorkload& w, const HwpeDescriptor& h) {
    if (!h.supports(w.dtype))
        throw Error(Stage::config, h.name + ": dtype " + std::string(dtype_name(w.dtype)) +
                                       " not supported");
    if (!op_is_mac(w.op))
        throw Error(Stage::config, h.name + ": op " + std::string(op_name(w.op)) +
                                       " not supported");
    if (h.kind == HwpeKind::gemm_systolic) {
        std::int64_t array = std::int64_t(h.rows) * h.cols;
        return ceil_div(w.macs, array) + std::int64_t(h.ce_latency) * h.cols + h.setup;
    }
    return ceil_div(w.macs, (std::int64_t)h.peak(w.dtype)) + h.setup;
}

// Engine-side busy time of one job, excluding the register-file programming
// (charged separately as HWPE_PROGRAM so multi-context overlap is visible).
inline std::int64_t hwpe_job_body_cycles(const TileWorkload& w, const HwpeDescriptor& h) {
    return hwpe_job_cycles(w, h) - h.setup;
}

// Peak throughput used by the coloring pass and the tiler's lower bound.
inline double core_peak_macs(const CoreDescriptor& cores, DType t) {
    return cores.supports(t) ? cores.count * cores.macs_per_cycle_per_core.at(t) : 0.0;
}

} // namespace pulptile
