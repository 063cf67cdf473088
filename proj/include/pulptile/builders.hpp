// builders.hpp — programmatic workload generators (transformer encoder, CNN)
#pragma once

#include <string>
#include <vector>

#include "pulptile/graph.hpp"

namespace pulptile {

struct TransformerParams {
    int layers = 8;
    int d_m = 64;  // hidden size
    int h = 16;    // attention heads
    int d_ff = 256;
    int s = 32;    // sequence length

    void validate() const {
        if (layers < 1 || d_m < 1 || h < 1 || d_ff < 1 || s < 1)
            throw Error(Stage::parse, "transformer parameters must all be >= 1");
        if (d_m % h != 0)
            throw Error(Stage::parse, "hidden size must be divisible by head count");
    }
};

// int8 post-LN encoder. Per layer: Q/K/V/output projection GEMMs (constant
// [d_m,d_m] weights), per-head dynamic MatMuls for QK^T and attn*V with a
// Softmax between them, head concat, two feed-forward GEMMs with a GELU, two
// residual Adds, two LayerNorms. Every GEMM/MatMul output is int32 and is
// followed by an explicit Requant back to int8.
inline Graph build_transformer_encoder(const TransformerParams& p) {
    p.validate();
    Graph g;
    const int dh = p.d_m / p.h;

    auto add_tensor = [&](std::string name, std::vector<std::int64_t> shape, DType dt,
                          TensorKind kind) {
        g.tensors.push_back({std::move(name), std::move(shape), dt, kind});
        return g.tensors.back().name;
    };
    auto add_node = [&](std::string name, OpKind op, std::vector<std::string> ins,
                        std::string out, std::map<std::string, std::int64_t> attrs = {}) {
        g.nodes.push_back({std::move(name), op, std::move(attrs), std::move(ins), {std::move(out)}});
    };
    // linear op + its requant; returns the int8 result tensor
    auto linear = [&](const std::string& prefix, OpKind op, const std::string& a,
                      const std::string& b, std::vector<std::int64_t> out_shape,
                      std::map<std::string, std::int64_t> attrs = {}) {
        auto raw = add_tensor(prefix + ".acc", out_shape, DType::int32, TensorKind::activation);
        add_node(prefix, op, {a, b}, raw, std::move(attrs));
        auto q = add_tensor(prefix + ".out", std::move(out_shape), DType::int8,
                            TensorKind::activation);
        add_node(prefix + ".rq", OpKind::requant, {raw}, q);
        return q;
    };

    std::string x = add_tensor("x", {p.s, p.d_m}, DType::int8, TensorKind::graph_input);

    for (int l = 0; l < p.layers; ++l) {
        std::string lp = "l" + std::to_string(l);
        auto wq = add_tensor(lp + ".wq", {p.d_m, p.d_m}, DType::int8, TensorKind::weight);
        auto wk = add_tensor(lp + ".wk", {p.d_m, p.d_m}, DType::int8, TensorKind::weight);
        auto wv = add_tensor(lp + ".wv", {p.d_m, p.d_m}, DType::int8, TensorKind::weight);
        auto wo = add_tensor(lp + ".wo", {p.d_m, p.d_m}, DType::int8, TensorKind::weight);

        auto q = linear(lp + ".q_proj", OpKind::gemm, x, wq, {p.s, p.d_m});
        auto k = linear(lp + ".k_proj", OpKind::gemm, x, wk, {p.s, p.d_m});
        auto v = linear(lp + ".v_proj", OpKind::gemm, x, wv, {p.s, p.d_m});

        std::vector<std::string> heads;
        for (int hd = 0; hd < p.h; ++hd) {
            std::string hp = lp + ".h" + std::to_string(hd);
            // scores = Q_h x K_h^T, both operands dynamic
            auto scores = linear(hp + ".qk", OpKind::matmul, q, k, {p.s, p.s},
                                 {{"heads", p.h}, {"head", hd}, {"slice_a", 1}, {"slice_b", 1},
                                  {"transpose_b", 1}});
            auto probs =
                add_tensor(hp + ".probs", {p.s, p.s}, DType::int8, TensorKind::activation);
            add_node(hp + ".softmax", OpKind::softmax, {scores}, probs);
            heads.push_back(linear(hp + ".av", OpKind::matmul, probs, v, {p.s, dh},
                                   {{"heads", p.h}, {"head", hd}, {"slice_b", 1}}));
        }
        auto attn = add_tensor(lp + ".attn", {p.s, p.d_m}, DType::int8, TensorKind::activation);
        add_node(lp + ".concat", OpKind::concat, heads, attn);

        auto o = linear(lp + ".o_proj", OpKind::gemm, attn, wo, {p.s, p.d_m});
        auto r1 = add_tensor(lp + ".res1", {p.s, p.d_m}, DType::int8, TensorKind::activation);
        add_node(lp + ".add1", OpKind::add, {x, o}, r1);
        auto y1 = add_tensor(lp + ".ln1", {p.s, p.d_m}, DType::int8, TensorKind::activation);
        add_node(lp + ".norm1", OpKind::layernorm, {r1}, y1);

        auto w1 = add_tensor(lp + ".w_ff1", {p.d_m, p.d_ff}, DType::int8, TensorKind::weight);
        auto w2 = add_tensor(lp + ".w_ff2", {p.d_ff, p.d_m}, DType::int8, TensorKind::weight);
        auto f1q = linear(lp + ".ff1", OpKind::gemm, y1, w1, {p.s, p.d_ff});
        auto f1 = add_tensor(lp + ".ff1.act", {p.s, p.d_ff}, DType::int8, TensorKind::activation);
        add_node(lp + ".gelu", OpKind::activation, {f1q}, f1, {{"func", 1}});
        auto f2 = linear(lp + ".ff2", OpKind::gemm, f1, w2, {p.s, p.d_m});

        auto r2 = add_tensor(lp + ".res2", {p.s, p.d_m}, DType::int8, TensorKind::activation);
        add_node(lp + ".add2", OpKind::add, {y1, f2}, r2);
        bool last = (l == p.layers - 1);
        auto y2 = add_tensor(last ? "y" : lp + ".ln2", {p.s, p.d_m}, DType::int8,
                             last ? TensorKind::graph_output : TensorKind::activation);
        add_node(lp + ".norm2", OpKind::layernorm, {r2}, y2);
        x = y2;
    }

    validate_graph(g);
    return infer_shapes(std::move(g));
}

// Analytic GEMM/MatMul MAC total for an encoder; the generator's output must
// match this node-by-node (checked in tests and by the work audit).
inline std::int64_t encoder_mac_total(const TransformerParams& p) {
    std::int64_t s = p.s, dm = p.d_m, dff = p.d_ff;
    return std::int64_t(p.layers) * (4 * s * dm * dm + 2 * s * s * dm + 2 * s * dm * dff);
}

// -----------------------------------------------------------------------------
// CNN builder
// -----------------------------------------------------------------------------

struct ConvLayerSpec {
    int cout = 0;     // ignored for depthwise (= input channels)
    int kernel = 3;
    int stride = 1;
    int pad = 0;
    bool depthwise = false;
    bool relu = true;
};

// Conv2D(+Requant+ReLU) chains over an int8 [cin,h,w] input.
inline Graph build_cnn(int cin, int height, int width,
                       const std::vector<ConvLayerSpec>& layers) {
    if (layers.empty()) throw Error(Stage::parse, "empty layer list");
    if (cin < 1 || height < 1 || width < 1)
        throw Error(Stage::parse, "input dimensions must be >= 1");
    Graph g;
    g.tensors.push_back({"x", {cin, height, width}, DType::int8, TensorKind::graph_input});
    std::string cur = "x";
    std::int64_t c = cin;

    for (std::size_t i = 0; i < layers.size(); ++i) {
        const ConvLayerSpec& L = layers[i];
        if (L.kernel < 1 || L.stride < 1 || L.pad < 0 || (!L.depthwise && L.cout < 1))
            throw Error(Stage::parse, "layer " + std::to_string(i) + ": bad descriptor");
        std::string lp = "conv" + std::to_string(i);
        std::int64_t cout = L.depthwise ? c : L.cout;
        g.tensors.push_back({lp + ".w",
                             L.depthwise ? std::vector<std::int64_t>{c, 1, L.kernel, L.kernel}
                                         : std::vector<std::int64_t>{cout, c, L.kernel, L.kernel},
                             DType::int8, TensorKind::weight});
        g.tensors.push_back({lp + ".acc", {}, DType::int32, TensorKind::activation});
        g.nodes.push_back({lp, L.depthwise ? OpKind::depthwise_conv2d : OpKind::conv2d,
                           {{"kernel", L.kernel}, {"stride", L.stride}, {"pad", L.pad}},
                           {cur, lp + ".w"},
                           {lp + ".acc"}});
        bool last = (i + 1 == layers.size());
        std::string q = last && !L.relu ? "y" : lp + ".q";
        g.tensors.push_back({q, {}, DType::int8,
                             (last && !L.relu) ? TensorKind::graph_output : TensorKind::activation});
        g.nodes.push_back({lp + ".rq", OpKind::requant, {}, {lp + ".acc"}, {q}});
        cur = q;
        if (L.relu) {
            std::string r = last ? "y" : lp + ".relu";
            g.tensors.push_back(
                {r, {}, DType::int8, last ? TensorKind::graph_output : TensorKind::activation});
            g.nodes.push_back({lp + ".act", OpKind::activation, {{"func", 0}}, {cur}, {r}});
            cur = r;
        }
        c = cout;
    }
    validate_graph(g);
    return infer_shapes(std::move(g));
}

} // namespace pulptile
