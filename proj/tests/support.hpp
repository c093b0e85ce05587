// Copyright 2026 The qubench Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

// Helpers shared by the unit tests and the acceptance binary.

#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "qubench/crn.hpp"
#include "qubench/mrna.hpp"
#include "qubench/qubo.hpp"
#include "qubench/random.hpp"

namespace qubench::testing {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline std::string data_path(const std::string& name) {
#ifdef QUBENCH_DATA_DIR
    return std::string(QUBENCH_DATA_DIR) + "/" + name;
#else
    return "data/" + name;
#endif
}

inline Bits to_bits(std::uint64_t code, std::size_t n) {
    Bits x(n);
    for (std::size_t k = 0; k < n; ++k) x[k] = (code >> k) & 1U;
    return x;
}

/// The two-variable model -2 x0 + 3 x1 + 4 x0 x1.
inline QuboModel toy_model() {
    QuboModel m(2);
    m.add_term(0, 0, -2);
    m.add_term(1, 1, 3);
    m.add_term(0, 1, 4);
    return m;
}

/// Plain exhaustive minimum over feasible assignments, evaluated term by
/// term; no Gray code, no incremental bookkeeping.
inline double naive_minimum(const QuboModel& model) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = model.num_vars();
    for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
        const auto x = to_bits(code, n);
        if (!check_feasible(model, x).feasible) continue;
        best = std::min(best, evaluate(model, x));
    }
    return best;
}

/// Random protein of length [min_len, max_len] whose codon count stays
/// within max_vars.
inline std::string random_protein(Rng& rng, std::size_t min_len, std::size_t max_len, std::size_t max_vars) {
    const auto table = mrna::standard_code_table();
    while (true) {
        const auto len = static_cast<std::size_t>(uniform_int(rng, static_cast<std::int64_t>(min_len),
                                                              static_cast<std::int64_t>(max_len)));
        std::string protein;
        std::size_t vars = 0;
        for (std::size_t p = 0; p < len; ++p) {
            const char aa = mrna::amino_acids[uniform_below(rng, mrna::amino_acids.size())];
            protein.push_back(aa);
            vars += table.codons(aa).size();
        }
        if (vars <= max_vars) return protein;
    }
}

inline mrna::CodonWeights random_weights(Rng& rng) {
    mrna::CodonWeights w;
    w.c_f = uniform_real(rng, 0.1, 2.0);
    w.c_gc = uniform_real(rng, 0.1, 4.0);
    w.c_r = uniform_real(rng, 0.0, 0.5);
    w.rho_target = uniform_real(rng, 0.3, 0.7);
    return w;
}

/// Random network with at most `max_reactions` reactions and bounds <= 3.
inline crn::ReactionNetwork random_tiny_network(Rng& rng, std::size_t max_reactions = 4) {
    const std::size_t num_species = 1 + uniform_below(rng, 3);
    std::vector<std::string> species;
    for (std::size_t s = 0; s < num_species; ++s) species.push_back("S" + std::to_string(s));
    const std::size_t num_reactions = 2 + uniform_below(rng, max_reactions - 1);
    std::vector<crn::Reaction> reactions;
    for (std::size_t r = 0; r < num_reactions; ++r) {
        crn::Reaction rx;
        rx.id = "r" + std::to_string(r);
        while (rx.stoich.empty()) {
            for (const auto& sp : species) {
                if (uniform01(rng) < 0.6) {
                    const auto v = uniform_int(rng, -2, 2);
                    if (v != 0) rx.stoich[sp] = v;
                }
            }
        }
        rx.lower = uniform01(rng) < 0.2 ? 1 : 0;
        rx.upper = uniform_int(rng, std::max<std::int64_t>(rx.lower, 1), 3);
        rx.unit_cost = static_cast<double>(uniform_int(rng, 0, 6));
        rx.fixed_cost = uniform01(rng) < 0.5 ? static_cast<double>(uniform_int(rng, 1, 6)) : 0.0;
        reactions.push_back(std::move(rx));
    }
    return crn::ReactionNetwork("tiny", species, reactions);
}

}  // namespace qubench::testing
