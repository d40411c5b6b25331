#pragma once

// Trace persistence: a single JSON document carrying the space, the marking
// order and the full recursion tree. Serialization is canonical (fixed key
// order, two-space indent, trailing newline), so write -> read -> write is
// byte-identical.

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "json.hpp"

#include "wks/adversary.hpp"

namespace wks {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline ordered_json node_to_json(const StrategyNode& node) {
    ordered_json j;
    j["level"] = node.level;
    j["pointset"] = node.pointset;
    if (node.level == 0) {
        j["leaf_request"] = node.leaf_request;
        return j;
    }
    j["chosen_sets"] = node.chosen_sets;
    ordered_json children = ordered_json::array();
    for (const StrategyNode& child : node.children) children.push_back(node_to_json(child));
    j["children"] = std::move(children);
    return j;
}

inline StrategyNode node_from_json(const ordered_json& j) {
    StrategyNode node;
    node.level = j.at("level").get<int>();
    node.pointset = j.at("pointset").get<std::vector<PointId>>();
    if (node.level == 0) {
        node.leaf_request = j.at("leaf_request").get<PointId>();
        return node;
    }
    node.chosen_sets = j.at("chosen_sets").get<std::vector<std::int32_t>>();
    for (const ordered_json& child : j.at("children")) {
        node.children.push_back(node_from_json(child));
    }
    return node;
}

}  // namespace detail

inline ordered_json trace_to_json(const Trace& trace) {
    ordered_json j;
    j["format"] = "wks-trace";
    j["version"] = 1;
    j["k"] = trace.k;
    j["beta"] = trace.beta;
    j["seed"] = trace.seed;
    j["space_size"] = trace.space.size();
    j["mark_order"] = trace.mark_order;
    ordered_json calls = ordered_json::array();
    for (const StrategyNode& call : trace.calls) calls.push_back(detail::node_to_json(call));
    j["calls"] = std::move(calls);
    return j;
}

inline std::string serialize_trace(const Trace& trace) {
    return trace_to_json(trace).dump(2) + "\n";
}

// Parses and fully validates; the flat request sequence is rebuilt from the
// tree. Malformed documents raise invalid_argument.
inline Trace parse_trace(const std::string& text) {
    Trace trace;
    try {
        ordered_json j = ordered_json::parse(text);
        if (j.at("format").get<std::string>() != "wks-trace") {
            throw std::invalid_argument("not a wks-trace document");
        }
        if (j.at("version").get<int>() != 1) {
            throw std::invalid_argument("unsupported wks-trace version");
        }
        trace.k = j.at("k").get<int>();
        trace.beta = j.at("beta").get<std::int64_t>();
        trace.seed = j.at("seed").get<std::uint64_t>();
        trace.space = UniformSpace(j.at("space_size").get<std::int32_t>());
        trace.mark_order = j.at("mark_order").get<std::vector<PointId>>();
        for (const ordered_json& call : j.at("calls")) {
            trace.calls.push_back(detail::node_from_json(call));
        }
    } catch (const std::invalid_argument&) {
        throw;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("trace parse error: ") + e.what());
    }
    trace.requests = flatten_requests(trace);
    validate_trace(trace);
    return trace;
}

inline void write_trace_file(const std::string& path, const Trace& trace) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace file: " + path);
    out << serialize_trace(trace);
    if (!out) throw std::runtime_error("write failed: " + path);
}

inline Trace read_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open trace file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_trace(buf.str());
}

}  // namespace wks
