// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "mgcps/electrical.hpp"
#include "mgcps/topology.hpp"

namespace mgcps::testing {

inline constexpr std::size_t kNoPath = std::numeric_limits<std::size_t>::max();

// Expected coupled matrix of the six-unit fixture, row by row.
inline const std::vector<std::vector<int>>& fig6_matrix() {
    static const std::vector<std::vector<int>> m = {
        {1, 0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0}, {0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0},
        {0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0}, {0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0},
        {0, 0, 0, 0, 1, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0}, {0, 0, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1},
        {1, 1, 0, 0, 0, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0}, {0, 0, 1, 1, 0, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0},
        {0, 0, 0, 0, 1, 1, 1, 1, 1, 0, 0, 0, 0, 0, 0}, {1, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1},
        {0, 1, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1}, {0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1},
        {0, 0, 0, 1, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1}, {0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1},
        {0, 0, 0, 0, 0, 1, 0, 0, 0, 1, 1, 1, 1, 1, 1},
    };
    return m;
}

// Valid random spec: p physical units, p cores, t transmission nodes, random
// extra edges of any kind, shuffled declaration order.
inline TopologySpec random_spec(std::mt19937_64& rng) {
    std::uniform_int_distribution<std::size_t> units(1, 5);
    std::uniform_int_distribution<std::size_t> routers(0, 4);
    std::bernoulli_distribution coin(0.3);

    const std::size_t p = units(rng);
    const std::size_t t = routers(rng);
    TopologySpec spec;
    for (std::size_t i = 0; i < p; ++i) {
        spec.nodes.push_back({"u" + std::to_string(i), coin(rng) ? NodeKind::PhysicalPower : NodeKind::PhysicalLoad});
        spec.nodes.push_back({"a" + std::to_string(i), NodeKind::CyberCore});
    }
    for (std::size_t i = 0; i < t; ++i) spec.nodes.push_back({"r" + std::to_string(i), NodeKind::CyberTransmission});
    std::shuffle(spec.nodes.begin(), spec.nodes.end(), rng);

    std::vector<std::size_t> cores(p);
    for (std::size_t i = 0; i < p; ++i) cores[i] = i;
    std::shuffle(cores.begin(), cores.end(), rng);
    std::set<std::pair<std::string, std::string>> used;
    auto key = [](std::string a, std::string b) { return a < b ? std::pair{a, b} : std::pair{b, a}; };
    for (std::size_t i = 0; i < p; ++i) {
        const std::string u = "u" + std::to_string(i);
        const std::string a = "a" + std::to_string(cores[i]);
        spec.coupling.emplace_back(u, a);
        used.insert(key(u, a));
    }
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < spec.nodes.size(); ++j) {
            const auto& a = spec.nodes[i].name;
            const auto& b = spec.nodes[j].name;
            if (used.count(key(a, b)) || !coin(rng)) continue;
            used.insert(key(a, b));
            if (coin(rng)) {
                spec.edges.emplace_back(b, a);
            } else {
                spec.edges.emplace_back(a, b);
            }
        }
    }
    return spec;
}

// Normalized edge set (by declaration index) of a spec, coupling included.
inline std::set<std::pair<std::size_t, std::size_t>> spec_edge_set(const TopologySpec& spec) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < spec.nodes.size(); ++i) index[spec.nodes[i].name] = i;
    std::set<std::pair<std::size_t, std::size_t>> out;
    auto add = [&](const TopologySpec::NamePair& e) {
        const auto a = index.at(e.first);
        const auto b = index.at(e.second);
        out.emplace(std::min(a, b), std::max(a, b));
    };
    for (const auto& e : spec.edges) add(e);
    for (const auto& e : spec.coupling) add(e);
    return out;
}

// Plain BFS on an explicit 0/1 matrix restricted to `allowed` indices.
inline std::size_t bfs_distance(const std::vector<std::vector<int>>& m, const std::vector<bool>& allowed,
                                std::size_t from, std::size_t to) {
    std::vector<std::size_t> dist(m.size(), kNoPath);
    std::deque<std::size_t> q{from};
    dist[from] = 0;
    while (!q.empty()) {
        const auto n = q.front();
        q.pop_front();
        for (std::size_t k = 0; k < m.size(); ++k) {
            if (k == n || !allowed[k] || m[n][k] == 0 || dist[k] != kNoPath) continue;
            dist[k] = dist[n] + 1;
            q.push_back(k);
        }
    }
    return dist[to];
}

struct SequenceOracle {
    ThreePhase input;
    double pos_mag, pos_deg, neg_mag, neg_deg, zero_mag, zero_deg;
};

// Frozen values from direct complex evaluation of the three sequence sums.
inline const std::vector<SequenceOracle>& sequence_oracles() {
    static const std::vector<SequenceOracle> cases = {
        {{Phasor(1.0, 0.0), Phasor(0.8, -100.0), Phasor(1.1, 130.0)},
         0.9576212946199207, 9.307342745686103, 0.17318234559753834, -88.79319248059434,
         0.054491570575656394, 19.58691809882026},
        {{Phasor(401.0963, 0.0), Phasor(380.5, -118.2), Phasor(405.25, 123.7)},
         395.4752929074429, 1.8404402053304039, 15.040077755061926, -62.21213572331232,
         1.3317477703749363, 153.00576236068918},
        {{Phasor(0.8068, 117.0), Phasor(0.0, 0.0), Phasor(0.9, -10.0)},
         0.31508215259634836, 178.21618255889544, 0.5678753250552638, 113.30864475185658,
         0.25537475529496506, 47.24982486147423},
    };
    return cases;
}

// Absolute angle difference in degrees, wrapped to [0, 180].
inline double angle_gap(double a, double b) {
    double d = std::fmod(std::abs(a - b), 360.0);
    return d > 180.0 ? 360.0 - d : d;
}

}  // namespace mgcps::testing
