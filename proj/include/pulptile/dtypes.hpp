// dtypes.hpp — element types used across the graph IR and platform model
#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace pulptile {

enum class DType { int2, int4, int8, int32, fp16, bf16, fp8e4m3, fp8e5m2 };

constexpr DType kAllDTypes[] = {DType::int2,  DType::int4, DType::int8,    DType::int32,
                                DType::fp16,  DType::bf16, DType::fp8e4m3, DType::fp8e5m2};

constexpr int dtype_bits(DType t) {
    switch (t) {
    case DType::int2: return 2;
    case DType::int4: return 4;
    case DType::int8: return 8;
    case DType::int32: return 32;
    case DType::fp16: return 16;
    case DType::bf16: return 16;
    case DType::fp8e4m3: return 8;
    case DType::fp8e5m2: return 8;
    }
    return 0;
}

constexpr bool dtype_is_float(DType t) {
    switch (t) {
    case DType::fp16:
    case DType::bf16:
    case DType::fp8e4m3:
    case DType::fp8e5m2: return true;
    default: return false;
    }
}

constexpr std::string_view dtype_name(DType t) {
    switch (t) {
    case DType::int2: return "int2";
    case DType::int4: return "int4";
    case DType::int8: return "int8";
    case DType::int32: return "int32";
    case DType::fp16: return "fp16";
    case DType::bf16: return "bf16";
    case DType::fp8e4m3: return "fp8e4m3";
    case DType::fp8e5m2: return "fp8e5m2";
    }
    return "?";
}

inline std::optional<DType> dtype_from_name(std::string_view s) {
    for (DType t : kAllDTypes)
        if (dtype_name(t) == s) return t;
    return std::nullopt;
}

// Bytes needed to store `elems` packed elements of type `t`.
constexpr std::int64_t packed_bytes(std::int64_t elems, DType t) {
    return (elems * dtype_bits(t) + 7) / 8;
}

} // namespace pulptile
