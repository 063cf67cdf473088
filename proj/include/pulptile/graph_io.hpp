// graph_io.hpp — graph document (JSON) ingestion and emission
//
// Document schema: top-level {"tensors": [...], "nodes": [...]}.
//   tensor: {"name": str, "shape": [int...], "dtype": str, "kind": str}
//   node:   {"name": str, "op": str, "attrs": {str: int}, "inputs": [...],
//            "outputs": [...]}
// dtype strings: int2 int4 int8 int32 fp16 bf16 fp8e4m3 fp8e5m2.
// An empty "shape" on an activation/output marks it for shape inference.
#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "pulptile/graph.hpp"

namespace pulptile {

using ordered_json = nlohmann::ordered_json;

inline Graph graph_from_json(const ordered_json& doc) {
    Graph g;
    if (!doc.is_object() || !doc.contains("tensors") || !doc.contains("nodes"))
        throw Error(Stage::parse, "document must be an object with 'tensors' and 'nodes'");

    for (auto& jt : doc.at("tensors")) {
        TensorSpec t;
        t.name = jt.at("name").get<std::string>();
        if (jt.contains("shape")) {
            for (auto& d : jt.at("shape")) {
                if (!d.is_number_integer())
                    throw Error(Stage::parse, "tensor '" + t.name +
                                                  "': dynamic or non-integer dimensions are not "
                                                  "supported");
                t.shape.push_back(d.get<std::int64_t>());
            }
        }
        auto ds = jt.at("dtype").get<std::string>();
        auto dt = dtype_from_name(ds);
        if (!dt) throw Error(Stage::parse, "tensor '" + t.name + "': unknown dtype '" + ds + "'");
        t.dtype = *dt;
        auto ks = jt.at("kind").get<std::string>();
        auto k = tensor_kind_from_name(ks);
        if (!k) throw Error(Stage::parse, "tensor '" + t.name + "': unknown kind '" + ks + "'");
        t.kind = *k;
        g.tensors.push_back(std::move(t));
    }

    for (auto& jn : doc.at("nodes")) {
        Node n;
        n.name = jn.at("name").get<std::string>();
        auto os = jn.at("op").get<std::string>();
        auto op = op_from_name(os);
        if (!op) throw Error(Stage::parse, "node '" + n.name + "': unknown op '" + os + "'");
        n.op = *op;
        if (jn.contains("attrs"))
            for (auto& [key, val] : jn.at("attrs").items()) {
                if (!val.is_number_integer())
                    throw Error(Stage::parse, "node '" + n.name + "': attr '" + key +
                                                  "' must be an integer");
                n.attrs[key] = val.get<std::int64_t>();
            }
        for (auto& in : jn.at("inputs")) n.inputs.push_back(in.get<std::string>());
        for (auto& out : jn.at("outputs")) n.outputs.push_back(out.get<std::string>());
        g.nodes.push_back(std::move(n));
    }

    validate_graph(g);
    topo_order(g); // cycle check
    return g;
}

inline Graph parse_graph(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(Stage::parse,
                    "syntax error at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    return graph_from_json(doc);
}

inline Graph parse_graph_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(Stage::parse, "cannot open graph file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_graph(ss.str());
}

inline ordered_json graph_to_json(const Graph& g) {
    ordered_json doc;
    doc["tensors"] = ordered_json::array();
    for (auto& t : g.tensors) {
        ordered_json jt;
        jt["name"] = t.name;
        jt["shape"] = t.shape;
        jt["dtype"] = std::string(dtype_name(t.dtype));
        jt["kind"] = std::string(tensor_kind_name(t.kind));
        doc["tensors"].push_back(std::move(jt));
    }
    doc["nodes"] = ordered_json::array();
    for (auto& n : g.nodes) {
        ordered_json jn;
        jn["name"] = n.name;
        jn["op"] = std::string(op_name(n.op));
        jn["attrs"] = ordered_json::object();
        for (auto& [k, v] : n.attrs) jn["attrs"][k] = v;
        jn["inputs"] = n.inputs;
        jn["outputs"] = n.outputs;
        doc["nodes"].push_back(std::move(jn));
    }
    return doc;
}

inline std::string emit_graph(const Graph& g) { return graph_to_json(g).dump(2) + "\n"; }

} // namespace pulptile
