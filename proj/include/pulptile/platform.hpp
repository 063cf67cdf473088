// platform.hpp — cluster description: memories, DMA, cores, HWPEs
#pragma once

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulptile/dtypes.hpp"
#include "pulptile/error.hpp"

namespace pulptile {

enum class IsaProfile { rv_base, xpulp, xpulpnn };

inline std::string_view isa_name(IsaProfile p) {
    switch (p) {
    case IsaProfile::rv_base: return "rv-base";
    case IsaProfile::xpulp: return "xpulp";
    case IsaProfile::xpulpnn: return "xpulpnn";
    }
    return "?";
}

inline std::optional<IsaProfile> isa_from_name(std::string_view s) {
    for (IsaProfile p : {IsaProfile::rv_base, IsaProfile::xpulp, IsaProfile::xpulpnn})
        if (isa_name(p) == s) return p;
    return std::nullopt;
}

// Default MACs/cycle/core tables. int32 runs at 1 everywhere (plain MAC);
// sub-byte SIMD widths only pay off with the nn extensions. These are
// declared model constants, overridable per config file.
inline std::map<DType, double> default_core_throughput(IsaProfile p) {
    switch (p) {
    case IsaProfile::rv_base:
        return {{DType::int2, 1}, {DType::int4, 1},    {DType::int8, 1},    {DType::int32, 1},
                {DType::fp16, 0.25}, {DType::bf16, 0.25}, {DType::fp8e4m3, 0.25},
                {DType::fp8e5m2, 0.25}};
    case IsaProfile::xpulp:
        return {{DType::int2, 4}, {DType::int4, 4}, {DType::int8, 4},    {DType::int32, 1},
                {DType::fp16, 1}, {DType::bf16, 1}, {DType::fp8e4m3, 1}, {DType::fp8e5m2, 1}};
    case IsaProfile::xpulpnn:
        return {{DType::int2, 16}, {DType::int4, 8}, {DType::int8, 4},    {DType::int32, 1},
                {DType::fp16, 1},  {DType::bf16, 1}, {DType::fp8e4m3, 1}, {DType::fp8e5m2, 1}};
    }
    return {};
}

struct CoreDescriptor {
    int count = 8;
    IsaProfile isa_profile = IsaProfile::xpulp;
    std::map<DType, double> macs_per_cycle_per_core; // filled from defaults if empty
    double parallel_efficiency = 0.8;

    double throughput(DType t) const {
        auto it = macs_per_cycle_per_core.find(t);
        if (it == macs_per_cycle_per_core.end() || it->second <= 0)
            throw Error(Stage::config, std::string("dtype ") + std::string(dtype_name(t)) +
                                           " not supported by core profile " +
                                           std::string(isa_name(isa_profile)));
        return it->second;
    }
    bool supports(DType t) const {
        auto it = macs_per_cycle_per_core.find(t);
        return it != macs_per_cycle_per_core.end() && it->second > 0;
    }
};

enum class HwpeKind { gemm_systolic, conv_quantized };

inline std::string_view hwpe_kind_name(HwpeKind k) {
    return k == HwpeKind::gemm_systolic ? "gemm-systolic" : "conv-quantized";
}

inline std::optional<HwpeKind> hwpe_kind_from_name(std::string_view s) {
    if (s == "gemm-systolic") return HwpeKind::gemm_systolic;
    if (s == "conv-quantized") return HwpeKind::conv_quantized;
    return std::nullopt;
}

struct HwpeDescriptor {
    std::string name = "hwpe0";
    HwpeKind kind = HwpeKind::gemm_systolic;
    int rows = 12;            // M
    int cols = 4;             // N
    int ce_latency = 4;       // L, pipeline latency of one computing element
    std::int64_t setup = 10;  // cycles per job: register-file program + trigger
    int contexts = 2;         // register-file contexts
    std::set<DType> supported_dtypes;
    bool requires_const_operand = false;
    std::map<DType, double> macs_per_cycle;

    double peak(DType t) const {
        auto it = macs_per_cycle.find(t);
        return it == macs_per_cycle.end() ? 0.0 : it->second;
    }
    bool supports(DType t) const { return supported_dtypes.count(t) > 0 && peak(t) > 0; }
};

struct ClusterConfig {
    std::string name = "custom";
    std::int64_t l1_bytes = 128 * 1024;
    std::int64_t l1_banks = 16;
    std::int64_t l2_bytes = 4 * 1024 * 1024;
    std::int64_t dma_bw = 8;       // bytes/cycle between L2 and L1
    std::int64_t dma_startup = 16; // cycles per transfer job
    std::int64_t hwpe_port_bytes = 32;
    CoreDescriptor cores;
    std::vector<HwpeDescriptor> hwpes;

    // Tiling-side knobs (fractions of L1), overridable per config file.
    double l1_residency_fraction = 0.25;
    std::int64_t l1_reserved_bytes = 8192; // stack/runtime reserve

    void validate() const {
        if (l1_bytes < (1 << 10) || l1_bytes > (1 << 24))
            throw Error(Stage::config, "l1_bytes outside plausible range [2^10, 2^24]");
        if (l1_banks < 1) throw Error(Stage::config, "l1_banks must be >= 1");
        if (l2_bytes < l1_bytes) throw Error(Stage::config, "l2_bytes smaller than l1_bytes");
        if (dma_bw < 1) throw Error(Stage::config, "dma_bw must be >= 1");
        if (dma_startup < 0) throw Error(Stage::config, "dma_startup must be >= 0");
        // banks are 32-bit: the wide port cannot exceed total bank width
        if (hwpe_port_bytes > l1_banks * 4)
            throw Error(Stage::config, "hwpe_port_bytes (" + std::to_string(hwpe_port_bytes) +
                                           ") exceeds total bank width (" +
                                           std::to_string(l1_banks * 4) + ")");
        if (cores.count < 1) throw Error(Stage::config, "core count must be >= 1");
        if (cores.parallel_efficiency <= 0 || cores.parallel_efficiency > 1)
            throw Error(Stage::config, "parallel_efficiency must be in (0,1]");
        if (l1_residency_fraction < 0 || l1_residency_fraction > 0.9)
            throw Error(Stage::config, "l1_residency_fraction must be in [0,0.9]");
        std::set<std::string> names{"cores", "dma", "ctrl"};
        for (auto& h : hwpes) {
            if (!names.insert(h.name).second)
                throw Error(Stage::config, "duplicate or reserved engine name '" + h.name + "'");
            if (h.rows < 1 || h.cols < 1)
                throw Error(Stage::config, h.name + ": array geometry must be >= 1x1");
            if (h.ce_latency < 1) throw Error(Stage::config, h.name + ": ce_latency must be >= 1");
            if (h.contexts < 1) throw Error(Stage::config, h.name + ": contexts must be >= 1");
            if (h.setup < 0) throw Error(Stage::config, h.name + ": setup must be >= 0");
            if (h.kind == HwpeKind::gemm_systolic)
                for (DType t : h.supported_dtypes)
                    if (dtype_is_float(t) && h.peak(t) != double(h.rows) * h.cols)
                        throw Error(Stage::config,
                                    h.name + ": gemm-systolic peak for " +
                                        std::string(dtype_name(t)) + " must equal rows*cols");
        }
    }
};

// -----------------------------------------------------------------------------
// Config loading
// -----------------------------------------------------------------------------

namespace detail {

inline std::map<DType, double> dtype_map_from_json(const nlohmann::ordered_json& j,
                                                   const std::string& ctx) {
    std::map<DType, double> m;
    for (auto& [key, val] : j.items()) {
        auto t = dtype_from_name(key);
        if (!t) throw Error(Stage::config, ctx + ": unknown dtype '" + key + "'");
        m[*t] = val.get<double>();
    }
    return m;
}

} // namespace detail

inline ClusterConfig cluster_config_from_json(const nlohmann::ordered_json& doc) {
    ClusterConfig c;
    auto get_i64 = [&](const char* key, std::int64_t& out) {
        if (doc.contains(key)) out = doc.at(key).get<std::int64_t>();
    };
    if (doc.contains("name")) c.name = doc.at("name").get<std::string>();
    get_i64("l1_bytes", c.l1_bytes);
    get_i64("l1_banks", c.l1_banks);
    get_i64("l2_bytes", c.l2_bytes);
    get_i64("dma_bw", c.dma_bw);
    get_i64("dma_startup", c.dma_startup);
    get_i64("hwpe_port_bytes", c.hwpe_port_bytes);
    get_i64("l1_reserved_bytes", c.l1_reserved_bytes);
    if (doc.contains("l1_residency_fraction"))
        c.l1_residency_fraction = doc.at("l1_residency_fraction").get<double>();

    if (doc.contains("cores")) {
        auto& jc = doc.at("cores");
        if (jc.contains("count")) c.cores.count = jc.at("count").get<int>();
        if (jc.contains("isa_profile")) {
            auto s = jc.at("isa_profile").get<std::string>();
            auto p = isa_from_name(s);
            if (!p) throw Error(Stage::config, "unknown isa_profile '" + s + "'");
            c.cores.isa_profile = *p;
        }
        if (jc.contains("parallel_efficiency"))
            c.cores.parallel_efficiency = jc.at("parallel_efficiency").get<double>();
        if (jc.contains("macs_per_cycle_per_core"))
            c.cores.macs_per_cycle_per_core =
                detail::dtype_map_from_json(jc.at("macs_per_cycle_per_core"), "cores");
    }
    if (c.cores.macs_per_cycle_per_core.empty())
        c.cores.macs_per_cycle_per_core = default_core_throughput(c.cores.isa_profile);

    if (doc.contains("hwpes")) {
        for (auto& jh : doc.at("hwpes")) {
            HwpeDescriptor h;
            h.name = jh.at("name").get<std::string>();
            auto ks = jh.at("kind").get<std::string>();
            auto k = hwpe_kind_from_name(ks);
            if (!k) throw Error(Stage::config, h.name + ": unknown hwpe kind '" + ks + "'");
            h.kind = *k;
            if (jh.contains("rows")) h.rows = jh.at("rows").get<int>();
            if (jh.contains("cols")) h.cols = jh.at("cols").get<int>();
            if (jh.contains("ce_latency")) h.ce_latency = jh.at("ce_latency").get<int>();
            if (jh.contains("setup")) h.setup = jh.at("setup").get<std::int64_t>();
            if (jh.contains("contexts")) h.contexts = jh.at("contexts").get<int>();
            if (jh.contains("requires_const_operand"))
                h.requires_const_operand = jh.at("requires_const_operand").get<bool>();
            if (jh.contains("supported_dtypes"))
                for (auto& s : jh.at("supported_dtypes")) {
                    auto t = dtype_from_name(s.get<std::string>());
                    if (!t)
                        throw Error(Stage::config,
                                    h.name + ": unknown dtype '" + s.get<std::string>() + "'");
                    h.supported_dtypes.insert(*t);
                }
            if (jh.contains("macs_per_cycle"))
                h.macs_per_cycle = detail::dtype_map_from_json(jh.at("macs_per_cycle"), h.name);
            // gemm-systolic peak is the array size unless stated
            if (h.macs_per_cycle.empty() && h.kind == HwpeKind::gemm_systolic)
                for (DType t : h.supported_dtypes)
                    h.macs_per_cycle[t] = double(h.rows) * h.cols;
            c.hwpes.push_back(std::move(h));
        }
    }

    c.validate();
    return c;
}

inline ClusterConfig load_cluster_config(const std::string& text) {
    nlohmann::ordered_json doc;
    try {
        doc = nlohmann::ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Stage::config,
                    "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return cluster_config_from_json(doc);
}

inline ClusterConfig load_cluster_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(Stage::config, "cannot open platform config '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return load_cluster_config(ss.str());
}

// Resolves a --platform argument: an existing file path wins, then
// $PULPTILE_PRESET_DIR/<name>.json, then the build-time preset directory.
inline ClusterConfig resolve_platform(const std::string& name_or_path) {
    namespace fs = std::filesystem;
    if (fs::exists(name_or_path) && fs::is_regular_file(name_or_path))
        return load_cluster_config_file(name_or_path);
    std::vector<std::string> dirs;
    if (const char* env = std::getenv("PULPTILE_PRESET_DIR")) dirs.push_back(env);
#ifdef PULPTILE_PRESET_DIR
    dirs.push_back(PULPTILE_PRESET_DIR);
#endif
    dirs.push_back("presets");
    for (auto& d : dirs) {
        fs::path p = fs::path(d) / (name_or_path + ".json");
        if (fs::exists(p)) return load_cluster_config_file(p.string());
    }
    throw Error(Stage::config, "platform '" + name_or_path +
                                   "' is neither a config file nor a known preset");
}

} // namespace pulptile
