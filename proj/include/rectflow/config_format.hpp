#pragma once

#include <json.hpp>
#include <sstream>
#include <string>

#include "rectflow/pipeline.hpp"

namespace rectflow {

struct ParsedConfig {
    PipelineConfig cfg;
    bool has_mode = false;
};

namespace detail {

inline PipelineMode parse_mode(const std::string& m) {
    if (m == "cut") return PipelineMode::Cut;
    if (m == "double") return PipelineMode::Double;
    if (m == "torus") return PipelineMode::Torus;
    throw std::invalid_argument("config: unknown mode '" + m + "'");
}

inline SubdivisionScheme parse_scheme(const std::string& s) {
    if (s == "edge-midpoint") return SubdivisionScheme::EdgeMidpoint;
    if (s == "barycentric") return SubdivisionScheme::Barycentric;
    throw std::invalid_argument("config: unknown subdivision scheme '" + s + "'");
}

inline ParsedConfig parse_config_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    ParsedConfig out;
    auto& cfg = out.cfg;
    for (const auto& [key, value] : j.items()) {
        if (key == "mode") {
            cfg.mode = parse_mode(value.get<std::string>());
            out.has_mode = true;
        } else if (key == "k") {
            cfg.k = value.get<double>();
        } else if (key == "conductance") {
            if (value.contains("default"))
                cfg.conductance.default_value = value["default"].get<double>();
            if (value.contains("overrides"))
                for (const auto& o : value["overrides"])
                    cfg.conductance.overrides.push_back(
                        {o.at(0).get<int>(), o.at(1).get<int>(), o.at(2).get<double>()});
            for (const auto& [k2, unused] : value.items())
                if (k2 != "default" && k2 != "overrides")
                    throw std::invalid_argument("config: unknown conductance key '" + k2 +
                                                "'");
        } else if (key == "e1") {
            cfg.e1_component = value.get<int>();
        } else if (key == "cycles") {
            for (const auto& c : value) cfg.cut.cycles.push_back(c.get<std::vector<int>>());
        } else if (key == "subdivide") {
            cfg.subdivision_scheme = parse_scheme(value.at("scheme").get<std::string>());
            cfg.subdivision_rounds = value.at("rounds").get<int>();
        } else if (key == "isomorphism") {
            for (const auto& p : value)
                cfg.isomorphism.push_back({p.at(0).get<int>(), p.at(1).get<int>()});
        } else if (key == "twist") {
            cfg.twist = value.get<double>();
        } else if (key == "tolerance") {
            cfg.tol = value.get<double>();
        } else if (key == "solver-tolerance") {
            cfg.solver.rel_tol = value.get<double>();
        } else if (key == "angle-tolerance") {
            cfg.angle_tol = value.get<double>();
        } else if (key == "paranoid") {
            cfg.paranoid = value.get<bool>();
        } else if (key == "corrupt-g") {
            cfg.corrupt_vertex = value.at(0).get<int>();
            cfg.corrupt_delta = value.at(1).get<double>();
        } else {
            throw std::invalid_argument("config: unknown key '" + key + "'");
        }
    }
    return out;
}

}  // namespace detail

/// Run configuration, accepted in two equivalent shapes: one directive per
/// line, or a JSON object (detected by a leading brace).
///
///   mode cut|double|torus
///   k <value>
///   conductance <value>            default for every edge
///   conductance <u> <v> <value>    per-edge override
///   e1 <boundary-component>
///   cycle <v0> <v1> ...            cut cycle or meridian (repeatable)
///   subdivide <scheme> <rounds>    edge-midpoint | barycentric
///   iso <a> <b>                    isomorphism vertex pair (repeatable)
///   twist <value>
///   tolerance <value>              identity checks (default 1e-9)
///   solver-tolerance <value>
///   angle-tolerance <value>
///   paranoid on|off
///   corrupt-g <vertex> <delta>     negative-control hook
inline ParsedConfig parse_config(const std::string& text) {
    for (char c : text) {
        if (std::isspace(static_cast<unsigned char>(c))) continue;
        if (c == '{') return detail::parse_config_json(text);
        break;
    }
    ParsedConfig out;
    auto& cfg = out.cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    bool seen_k = false, seen_twist = false, seen_mode = false;
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("config: line " + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        auto want = [&](auto& v, const std::string& what) {
            if (!(ls >> v)) fail("expected " + what);
        };
        if (tag == "mode") {
            if (seen_mode) fail("duplicate mode");
            std::string m;
            want(m, "a mode");
            cfg.mode = detail::parse_mode(m);
            out.has_mode = seen_mode = true;
        } else if (tag == "k") {
            if (seen_k) fail("duplicate k");
            want(cfg.k, "a value");
            seen_k = true;
        } else if (tag == "conductance") {
            double a;
            want(a, "a value");
            double b, c;
            if (ls >> b >> c)
                cfg.conductance.overrides.push_back(
                    {static_cast<int>(a), static_cast<int>(b), c});
            else
                cfg.conductance.default_value = a;
        } else if (tag == "e1") {
            want(cfg.e1_component, "a boundary component index");
        } else if (tag == "cycle") {
            std::vector<int> cyc;
            int v;
            while (ls >> v) cyc.push_back(v);
            if (cyc.empty()) fail("empty cycle");
            cfg.cut.cycles.push_back(std::move(cyc));
        } else if (tag == "subdivide") {
            std::string scheme;
            want(scheme, "a scheme");
            cfg.subdivision_scheme = detail::parse_scheme(scheme);
            want(cfg.subdivision_rounds, "a round count");
        } else if (tag == "iso") {
            int a, b;
            want(a, "a vertex");
            want(b, "a vertex");
            cfg.isomorphism.push_back({a, b});
        } else if (tag == "twist") {
            if (seen_twist) fail("duplicate twist");
            want(cfg.twist, "a value");
            seen_twist = true;
        } else if (tag == "tolerance") {
            want(cfg.tol, "a value");
        } else if (tag == "solver-tolerance") {
            want(cfg.solver.rel_tol, "a value");
        } else if (tag == "angle-tolerance") {
            want(cfg.angle_tol, "a value");
        } else if (tag == "paranoid") {
            std::string v;
            want(v, "on or off");
            if (v != "on" && v != "off") fail("expected on or off");
            cfg.paranoid = v == "on";
        } else if (tag == "corrupt-g") {
            want(cfg.corrupt_vertex, "a vertex");
            want(cfg.corrupt_delta, "a delta");
        } else {
            fail("unknown directive '" + tag + "'");
        }
    }
    if (cfg.k <= 0) throw std::invalid_argument("config: k must be positive");
    return out;
}

}  // namespace rectflow
