// graph.hpp — computational-graph IR: tensors, nodes, validation, shape
// inference, topological ordering, and per-node work accounting.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pulptile/dtypes.hpp"
#include "pulptile/error.hpp"

namespace pulptile {

// -----------------------------------------------------------------------------
// Tensors
// -----------------------------------------------------------------------------

enum class TensorKind { weight, activation, graph_input, graph_output };

inline std::string_view tensor_kind_name(TensorKind k) {
    switch (k) {
    case TensorKind::weight: return "weight";
    case TensorKind::activation: return "activation";
    case TensorKind::graph_input: return "graph-input";
    case TensorKind::graph_output: return "graph-output";
    }
    return "?";
}

inline std::optional<TensorKind> tensor_kind_from_name(std::string_view s) {
    for (TensorKind k : {TensorKind::weight, TensorKind::activation, TensorKind::graph_input,
                         TensorKind::graph_output})
        if (tensor_kind_name(k) == s) return k;
    return std::nullopt;
}

struct TensorSpec {
    std::string name;
    std::vector<std::int64_t> shape; // empty = unknown, filled by infer_shapes
    DType dtype = DType::int8;
    TensorKind kind = TensorKind::activation;

    bool shape_known() const { return !shape.empty(); }

    std::int64_t numel() const {
        std::int64_t n = 1;
        for (auto d : shape) n *= d;
        return shape.empty() ? 0 : n;
    }

    // byte size = ceil(product(shape) * bits / 8)
    std::int64_t bytes() const { return packed_bytes(numel(), dtype); }

    friend bool operator==(const TensorSpec&, const TensorSpec&) = default;
};

// -----------------------------------------------------------------------------
// Nodes
// -----------------------------------------------------------------------------

enum class OpKind {
    gemm,            // static weight matmul: X[m,k] x W[k,n] -> [m,n]
    conv2d,          // X[cin,h,w] * W[cout,cin,kh,kw] -> [cout,oh,ow]
    depthwise_conv2d,// X[c,h,w] * W[c,1,kh,kw] -> [c,oh,ow]
    matmul,          // dynamic x dynamic, optional per-head operand views
    softmax,         // rowwise over last dim
    layernorm,       // rowwise over last dim
    add,             // elementwise, two operands
    requant,         // elementwise dtype change
    activation,      // elementwise, attrs: func 0=relu 1=gelu
    transpose,       // 2-D transpose
    concat           // concatenate 2-D tensors along last dim
};

inline std::string_view op_name(OpKind k) {
    switch (k) {
    case OpKind::gemm: return "GEMM";
    case OpKind::conv2d: return "Conv2D";
    case OpKind::depthwise_conv2d: return "DepthwiseConv2D";
    case OpKind::matmul: return "MatMul";
    case OpKind::softmax: return "Softmax";
    case OpKind::layernorm: return "LayerNorm";
    case OpKind::add: return "Add";
    case OpKind::requant: return "Requant";
    case OpKind::activation: return "Activation";
    case OpKind::transpose: return "Transpose";
    case OpKind::concat: return "Concat";
    }
    return "?";
}

inline std::optional<OpKind> op_from_name(std::string_view s) {
    for (OpKind k : {OpKind::gemm, OpKind::conv2d, OpKind::depthwise_conv2d, OpKind::matmul,
                     OpKind::softmax, OpKind::layernorm, OpKind::add, OpKind::requant,
                     OpKind::activation, OpKind::transpose, OpKind::concat})
        if (op_name(k) == s) return k;
    return std::nullopt;
}

inline bool op_is_mac(OpKind k) {
    return k == OpKind::gemm || k == OpKind::conv2d || k == OpKind::depthwise_conv2d ||
           k == OpKind::matmul;
}

struct Node {
    std::string name;
    OpKind op = OpKind::gemm;
    std::map<std::string, std::int64_t> attrs; // op-specific integers
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;

    std::int64_t attr_or(const std::string& key, std::int64_t def) const {
        auto it = attrs.find(key);
        return it == attrs.end() ? def : it->second;
    }
    bool has_attr(const std::string& key) const { return attrs.count(key) > 0; }

    friend bool operator==(const Node&, const Node&) = default;
};

// -----------------------------------------------------------------------------
// Graph
// -----------------------------------------------------------------------------

struct Graph {
    std::vector<TensorSpec> tensors; // declaration order preserved
    std::vector<Node> nodes;         // declaration order preserved

    const TensorSpec* find_tensor(std::string_view name) const {
        for (auto& t : tensors)
            if (t.name == name) return &t;
        return nullptr;
    }
    TensorSpec* find_tensor(std::string_view name) {
        for (auto& t : tensors)
            if (t.name == name) return &t;
        return nullptr;
    }
    const TensorSpec& tensor(std::string_view name) const {
        if (auto* t = find_tensor(name)) return *t;
        throw Error(Stage::parse, "unknown tensor '" + std::string(name) + "'");
    }
    TensorSpec& tensor(std::string_view name) {
        if (auto* t = find_tensor(name)) return *t;
        throw Error(Stage::parse, "unknown tensor '" + std::string(name) + "'");
    }

    friend bool operator==(const Graph&, const Graph&) = default;
};

// Arity table: (min_inputs, max_inputs). Concat is variadic.
inline std::pair<int, int> op_arity(OpKind k) {
    switch (k) {
    case OpKind::gemm:
    case OpKind::conv2d:
    case OpKind::depthwise_conv2d:
    case OpKind::matmul:
    case OpKind::add: return {2, 2};
    case OpKind::concat: return {2, 1 << 20};
    default: return {1, 1};
    }
}

namespace detail {

inline std::unordered_map<std::string, std::vector<std::size_t>> consumer_map(const Graph& g) {
    std::unordered_map<std::string, std::vector<std::size_t>> consumers;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        for (auto& in : g.nodes[i].inputs) consumers[in].push_back(i);
    return consumers;
}

inline std::unordered_map<std::string, std::size_t> producer_map(const Graph& g) {
    std::unordered_map<std::string, std::size_t> producers;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        for (auto& out : g.nodes[i].outputs) {
            if (producers.count(out))
                throw Error(Stage::parse, "tensor '" + out + "' has more than one producer");
            producers[out] = i;
        }
    return producers;
}

} // namespace detail

// -----------------------------------------------------------------------------
// Validation
// -----------------------------------------------------------------------------

// Structural checks: unique names, references resolve, arity, attr ranges,
// single producer per non-input tensor, every graph output produced.
// Cycle detection happens in topo_order.
inline void validate_graph(const Graph& g) {
    std::set<std::string_view> tnames;
    for (auto& t : g.tensors) {
        if (t.name.empty()) throw Error(Stage::parse, "tensor with empty name");
        if (!tnames.insert(t.name).second)
            throw Error(Stage::parse, "duplicate tensor '" + t.name + "'");
        for (auto d : t.shape)
            if (d < 1)
                throw Error(Stage::parse, "tensor '" + t.name + "' has non-positive dimension");
        if ((t.kind == TensorKind::weight || t.kind == TensorKind::graph_input) &&
            !t.shape_known())
            throw Error(Stage::parse, "tensor '" + t.name + "' requires an explicit shape");
    }

    std::set<std::string_view> nnames;
    for (auto& n : g.nodes) {
        if (n.name.empty()) throw Error(Stage::parse, "node with empty name");
        if (!nnames.insert(n.name).second)
            throw Error(Stage::parse, "duplicate node '" + n.name + "'");
        auto [lo, hi] = op_arity(n.op);
        if ((int)n.inputs.size() < lo || (int)n.inputs.size() > hi)
            throw Error(Stage::parse, "node '" + n.name + "': " + std::string(op_name(n.op)) +
                                          " takes " + std::to_string(lo) +
                                          (hi == lo ? "" : "+") + " inputs, got " +
                                          std::to_string(n.inputs.size()));
        if (n.outputs.size() != 1)
            throw Error(Stage::parse, "node '" + n.name + "' must have exactly one output");
        for (auto& ref : n.inputs)
            if (!g.find_tensor(ref))
                throw Error(Stage::parse, "node '" + n.name + "' references undefined tensor '" +
                                              ref + "'");
        for (auto& ref : n.outputs)
            if (!g.find_tensor(ref))
                throw Error(Stage::parse, "node '" + n.name + "' references undefined tensor '" +
                                              ref + "'");
        if (n.attr_or("stride", 1) < 1)
            throw Error(Stage::parse, "node '" + n.name + "': stride must be >= 1");
        if (n.attr_or("kernel", 1) < 1)
            throw Error(Stage::parse, "node '" + n.name + "': kernel must be >= 1");
        if (n.attr_or("pad", 0) < 0)
            throw Error(Stage::parse, "node '" + n.name + "': pad must be >= 0");
        if (n.op == OpKind::matmul && n.has_attr("heads")) {
            std::int64_t heads = n.attr_or("heads", 1);
            std::int64_t head = n.attr_or("head", 0);
            if (heads < 1 || head < 0 || head >= heads)
                throw Error(Stage::parse, "node '" + n.name + "': head index out of range");
        }
    }

    auto producers = detail::producer_map(g); // throws on double definition
    for (auto& t : g.tensors) {
        bool produced = producers.count(t.name) > 0;
        if (t.kind == TensorKind::graph_output && !produced)
            throw Error(Stage::parse, "graph output '" + t.name + "' is never produced");
        if ((t.kind == TensorKind::graph_input || t.kind == TensorKind::weight) && produced)
            throw Error(Stage::parse, std::string(tensor_kind_name(t.kind)) + " '" + t.name +
                                          "' must not be produced by a node");
    }
}

// -----------------------------------------------------------------------------
// Topological order
// -----------------------------------------------------------------------------

// Kahn's algorithm; ties broken by node declaration order.
inline std::vector<std::size_t> topo_order(const Graph& g) {
    auto producers = detail::producer_map(g);
    std::vector<int> unmet(g.nodes.size(), 0);
    std::vector<std::vector<std::size_t>> succ(g.nodes.size());
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        for (auto& in : g.nodes[i].inputs) {
            auto it = producers.find(in);
            if (it != producers.end()) {
                succ[it->second].push_back(i);
                ++unmet[i];
            }
        }

    std::set<std::size_t> ready;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (unmet[i] == 0) ready.insert(i);

    std::vector<std::size_t> order;
    order.reserve(g.nodes.size());
    while (!ready.empty()) {
        std::size_t i = *ready.begin();
        ready.erase(ready.begin());
        order.push_back(i);
        for (auto s : succ[i])
            if (--unmet[s] == 0) ready.insert(s);
    }
    if (order.size() != g.nodes.size()) {
        std::string stuck;
        for (std::size_t i = 0; i < g.nodes.size(); ++i)
            if (unmet[i] > 0) stuck += (stuck.empty() ? "" : ", ") + g.nodes[i].name;
        throw Error(Stage::parse, "graph contains a cycle through: " + stuck);
    }
    return order;
}

// -----------------------------------------------------------------------------
// Shape inference
// -----------------------------------------------------------------------------

namespace detail {

// Effective matmul operand shapes after the optional per-head column views.
// slice_a/slice_b take the head-th column block of width cols/heads;
// transpose_b flips B after slicing.
struct MatmulDims {
    std::int64_t m, k, n;
};

inline MatmulDims matmul_dims(const Node& n, const std::vector<std::int64_t>& a,
                              const std::vector<std::int64_t>& b) {
    if (a.size() != 2 || b.size() != 2)
        throw Error(Stage::parse, "node '" + n.name + "': MatMul operands must be 2-D");
    std::int64_t heads = n.attr_or("heads", 1);
    auto sliced = [&](const std::vector<std::int64_t>& s, bool slice) {
        std::vector<std::int64_t> r = s;
        if (slice) {
            if (r[1] % heads != 0)
                throw Error(Stage::parse, "node '" + n.name +
                                              "': operand columns not divisible by heads");
            r[1] /= heads;
        }
        return r;
    };
    auto ae = sliced(a, n.attr_or("slice_a", 0) != 0);
    auto be = sliced(b, n.attr_or("slice_b", 0) != 0);
    if (n.attr_or("transpose_b", 0) != 0) std::swap(be[0], be[1]);
    if (ae[1] != be[0])
        throw Error(Stage::parse, "node '" + n.name + "': inner dimensions disagree (" +
                                      std::to_string(ae[1]) + " vs " + std::to_string(be[0]) +
                                      ")");
    return {ae[0], ae[1], be[1]};
}

inline std::vector<std::int64_t> conv_out_shape(const Node& n,
                                                const std::vector<std::int64_t>& x,
                                                const std::vector<std::int64_t>& w,
                                                bool depthwise) {
    if (x.size() != 3 || w.size() != 4)
        throw Error(Stage::parse, "node '" + n.name + "': Conv2D expects X[c,h,w], W[o,i,kh,kw]");
    std::int64_t stride = n.attr_or("stride", 1);
    std::int64_t pad = n.attr_or("pad", 0);
    std::int64_t kh = w[2], kw = w[3];
    if (n.has_attr("kernel") && (n.attrs.at("kernel") != kh || n.attrs.at("kernel") != kw))
        throw Error(Stage::parse, "node '" + n.name + "': kernel attr disagrees with weight");
    if (depthwise) {
        if (w[0] != x[0] || w[1] != 1)
            throw Error(Stage::parse, "node '" + n.name + "': depthwise weight must be [c,1,kh,kw]");
    } else if (w[1] != x[0]) {
        throw Error(Stage::parse, "node '" + n.name + "': weight input channels (" +
                                      std::to_string(w[1]) + ") != activation channels (" +
                                      std::to_string(x[0]) + ")");
    }
    std::int64_t oh = (x[1] + 2 * pad - kh) / stride + 1;
    std::int64_t ow = (x[2] + 2 * pad - kw) / stride + 1;
    if (oh < 1 || ow < 1)
        throw Error(Stage::parse, "node '" + n.name + "': kernel larger than padded input");
    return {depthwise ? x[0] : w[0], oh, ow};
}

} // namespace detail

// Computes the output shape of `n` from its (known) input shapes.
inline std::vector<std::int64_t> infer_node_shape(const Graph& g, const Node& n) {
    auto shape_of = [&](const std::string& name) -> const std::vector<std::int64_t>& {
        const TensorSpec& t = g.tensor(name);
        if (!t.shape_known())
            throw Error(Stage::parse,
                        "node '" + n.name + "': input '" + name + "' has no shape yet");
        return t.shape;
    };
    switch (n.op) {
    case OpKind::gemm: {
        auto& a = shape_of(n.inputs[0]);
        auto& w = shape_of(n.inputs[1]);
        if (a.size() != 2 || w.size() != 2)
            throw Error(Stage::parse, "node '" + n.name + "': GEMM operands must be 2-D");
        if (a[1] != w[0])
            throw Error(Stage::parse, "node '" + n.name + "': inner dimensions disagree (" +
                                          std::to_string(a[1]) + " vs " + std::to_string(w[0]) +
                                          ")");
        return {a[0], w[1]};
    }
    case OpKind::matmul: {
        auto d = detail::matmul_dims(n, shape_of(n.inputs[0]), shape_of(n.inputs[1]));
        return {d.m, d.n};
    }
    case OpKind::conv2d:
        return detail::conv_out_shape(n, shape_of(n.inputs[0]), shape_of(n.inputs[1]), false);
    case OpKind::depthwise_conv2d:
        return detail::conv_out_shape(n, shape_of(n.inputs[0]), shape_of(n.inputs[1]), true);
    case OpKind::add: {
        auto& a = shape_of(n.inputs[0]);
        auto& b = shape_of(n.inputs[1]);
        if (a != b)
            throw Error(Stage::parse, "node '" + n.name + "': Add operands differ in shape");
        return a;
    }
    case OpKind::softmax:
    case OpKind::layernorm:
    case OpKind::requant:
    case OpKind::activation: return shape_of(n.inputs[0]);
    case OpKind::transpose: {
        auto& a = shape_of(n.inputs[0]);
        if (a.size() != 2)
            throw Error(Stage::parse, "node '" + n.name + "': Transpose expects a 2-D tensor");
        return {a[1], a[0]};
    }
    case OpKind::concat: {
        auto& first = shape_of(n.inputs[0]);
        if (first.size() != 2)
            throw Error(Stage::parse, "node '" + n.name + "': Concat expects 2-D tensors");
        std::int64_t rows = first[0], cols = 0;
        for (auto& in : n.inputs) {
            auto& s = shape_of(in);
            if (s.size() != 2 || s[0] != rows)
                throw Error(Stage::parse, "node '" + n.name + "': Concat rows disagree");
            cols += s[1];
        }
        return {rows, cols};
    }
    }
    throw Error(Stage::internal, "unhandled op in infer_node_shape");
}

// Fills in missing activation shapes in topological order and checks shapes
// that are already present. Idempotent.
inline Graph infer_shapes(Graph g) {
    validate_graph(g);
    for (auto i : topo_order(g)) {
        const Node& n = g.nodes[i];
        auto out = infer_node_shape(g, n);
        TensorSpec& t = g.tensor(n.outputs[0]);
        if (t.shape_known()) {
            if (t.shape != out)
                throw Error(Stage::parse, "node '" + n.name + "': declared output shape of '" +
                                              t.name + "' disagrees with inferred shape");
        } else {
            t.shape = out;
        }
    }
    return g;
}

// -----------------------------------------------------------------------------
// Work accounting
// -----------------------------------------------------------------------------

// Multiply-accumulate count of one node (0 for non-linear ops).
inline std::int64_t node_macs(const Graph& g, const Node& n) {
    switch (n.op) {
    case OpKind::gemm: {
        auto& a = g.tensor(n.inputs[0]).shape;
        auto& w = g.tensor(n.inputs[1]).shape;
        return a[0] * a[1] * w[1];
    }
    case OpKind::matmul: {
        auto d = detail::matmul_dims(n, g.tensor(n.inputs[0]).shape, g.tensor(n.inputs[1]).shape);
        return d.m * d.k * d.n;
    }
    case OpKind::conv2d: {
        auto& w = g.tensor(n.inputs[1]).shape;
        auto& y = g.tensor(n.outputs[0]).shape;
        return y[0] * y[1] * y[2] * w[1] * w[2] * w[3];
    }
    case OpKind::depthwise_conv2d: {
        auto& w = g.tensor(n.inputs[1]).shape;
        auto& y = g.tensor(n.outputs[0]).shape;
        return y[0] * y[1] * y[2] * w[2] * w[3];
    }
    default: return 0;
    }
}

inline std::int64_t node_out_elements(const Graph& g, const Node& n) {
    return g.tensor(n.outputs[0]).numel();
}

inline std::int64_t graph_macs(const Graph& g) {
    std::int64_t total = 0;
    for (auto& n : g.nodes) total += node_macs(g, n);
    return total;
}

} // namespace pulptile
