// Copyright (c) taxiverify contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "taxiverify/network.hpp"

namespace taxiverify {

// Self-describing JSON format:
// {"input_dim": int, "output_dim": int, "input_names": [...],
//  "input_lo": [...]|null, "input_hi": [...]|null,
//  "layers": [{"weights": [[...]], "bias": [...], "activation": "relu"|"identity"}]}
// Weights are row-major, one inner list per output neuron. Doubles are written
// with shortest round-trip precision, so save/load is bit-exact.

inline nlohmann::json to_json(const Network& net) {
    nlohmann::json j;
    j["input_dim"] = net.input_dim();
    j["output_dim"] = net.output_dim();
    j["input_names"] = net.input_names;
    if (net.input_lo) {
        j["input_lo"] = *net.input_lo;
        j["input_hi"] = *net.input_hi;
    } else {
        j["input_lo"] = nullptr;
        j["input_hi"] = nullptr;
    }
    j["layers"] = nlohmann::json::array();
    for (const auto& layer : net.layers) {
        nlohmann::json jl;
        auto rows = nlohmann::json::array();
        for (std::size_t i = 0; i < layer.weights.rows; ++i) {
            auto row = nlohmann::json::array();
            for (std::size_t k = 0; k < layer.weights.cols; ++k) row.push_back(layer.weights(i, k));
            rows.push_back(std::move(row));
        }
        jl["weights"] = std::move(rows);
        jl["bias"] = layer.bias;
        jl["activation"] = layer.activation == Activation::ReLU ? "relu" : "identity";
        j["layers"].push_back(std::move(jl));
    }
    return j;
}

inline Network network_from_json(const nlohmann::json& j) {
    Network net;
    if (!j.contains("layers") || !j["layers"].is_array() || j["layers"].empty())
        throw std::invalid_argument("network file: missing or empty \"layers\"");
    for (const auto& jl : j["layers"]) {
        Layer layer;
        if (!jl.contains("weights") || !jl["weights"].is_array() || jl["weights"].empty())
            throw std::invalid_argument("network file: layer missing \"weights\"");
        const auto& rows = jl["weights"];
        layer.weights = Mat(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != layer.weights.cols)
                throw std::invalid_argument("network file: ragged \"weights\" rows");
            for (std::size_t k = 0; k < layer.weights.cols; ++k)
                layer.weights(i, k) = rows[i][k].get<double>();
        }
        if (!jl.contains("bias")) throw std::invalid_argument("network file: layer missing \"bias\"");
        layer.bias = jl["bias"].get<Vec>();
        const std::string act = jl.value("activation", "");
        if (act == "relu")
            layer.activation = Activation::ReLU;
        else if (act == "identity")
            layer.activation = Activation::Identity;
        else
            throw std::invalid_argument("network file: bad \"activation\" value \"" + act + "\"");
        net.layers.push_back(std::move(layer));
    }
    if (j.contains("input_names") && !j["input_names"].is_null())
        net.input_names = j["input_names"].get<std::vector<std::string>>();
    if (j.contains("input_lo") && !j["input_lo"].is_null()) {
        net.input_lo = j["input_lo"].get<Vec>();
        if (!j.contains("input_hi") || j["input_hi"].is_null())
            throw std::invalid_argument("network file: \"input_lo\" given without \"input_hi\"");
        net.input_hi = j["input_hi"].get<Vec>();
    }
    if (j.contains("input_dim") && j["input_dim"].get<std::size_t>() != net.input_dim())
        throw std::invalid_argument("network file: declared \"input_dim\" does not match layers");
    if (j.contains("output_dim") && j["output_dim"].get<std::size_t>() != net.output_dim())
        throw std::invalid_argument("network file: declared \"output_dim\" does not match layers");
    net.validate();
    return net;
}

inline void save_network(const Network& net, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << to_json(net).dump(1) << "\n";
}

inline Network load_network(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open network file: " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("network file " + path + ": " + e.what());
    }
    return network_from_json(j);
}

}  // namespace taxiverify
