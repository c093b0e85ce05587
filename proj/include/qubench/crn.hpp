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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qubench/encodings.hpp"
#include "qubench/errors.hpp"
#include "qubench/linear_model.hpp"
#include "qubench/qubo.hpp"
#include "qubench/qubo_io.hpp"
#include "qubench/random.hpp"

namespace qubench::crn {

struct Reaction {
    std::string id;
    /// Signed stoichiometric coefficient per species: negative consumes,
    /// positive produces.
    std::map<std::string, std::int64_t> stoich;
    double unit_cost = 0.0;
    double fixed_cost = 0.0;
    std::int64_t lower = 0;
    std::int64_t upper = 0;
};

/// Bipartite species/reaction graph. Species and reactions are kept sorted
/// by id so every builder sees the same canonical variable order.
class ReactionNetwork {
 public:
    ReactionNetwork(std::string name, std::vector<std::string> species, std::vector<Reaction> reactions)
            : name_(std::move(name)), species_(std::move(species)), reactions_(std::move(reactions)) {
        std::sort(species_.begin(), species_.end());
        if (std::adjacent_find(species_.begin(), species_.end()) != species_.end()) {
            throw ValidationError("duplicate species id '" +
                                  *std::adjacent_find(species_.begin(), species_.end()) + "'");
        }
        if (reactions_.empty()) throw ValidationError("network '" + name_ + "' has no reactions");
        std::sort(reactions_.begin(), reactions_.end(),
                  [](const Reaction& a, const Reaction& b) { return a.id < b.id; });
        for (std::size_t r = 0; r < reactions_.size(); ++r) {
            auto& rx = reactions_[r];
            if (r > 0 && reactions_[r - 1].id == rx.id) throw ValidationError("duplicate reaction id '" + rx.id + "'");
            std::erase_if(rx.stoich, [](const auto& kv) { return kv.second == 0; });
            if (rx.stoich.empty()) throw ValidationError("reaction '" + rx.id + "' has no stoichiometry");
            for (const auto& [sp, v] : rx.stoich) {
                if (!std::binary_search(species_.begin(), species_.end(), sp)) {
                    throw ValidationError("reaction '" + rx.id + "' references undeclared species '" + sp + "'");
                }
            }
            if (rx.lower < 0 || rx.upper < 0) throw ValidationError("reaction '" + rx.id + "' has a negative bound");
            if (rx.lower > rx.upper) throw ValidationError("reaction '" + rx.id + "' has lower > upper");
            if (!(rx.unit_cost >= 0.0) || !(rx.fixed_cost >= 0.0)) {
                throw ValidationError("reaction '" + rx.id + "' has a negative cost");
            }
        }
    }

    const std::string& name() const noexcept { return name_; }
    const std::vector<std::string>& species() const noexcept { return species_; }
    const std::vector<Reaction>& reactions() const noexcept { return reactions_; }

    std::size_t species_index(std::string_view id) const {
        auto it = std::lower_bound(species_.begin(), species_.end(), id);
        if (it == species_.end() || *it != id) throw ValidationError("unknown species '" + std::string(id) + "'");
        return static_cast<std::size_t>(it - species_.begin());
    }

    std::size_t reaction_index(std::string_view id) const {
        auto it = std::lower_bound(reactions_.begin(), reactions_.end(), id,
                                   [](const Reaction& r, std::string_view key) { return r.id < key; });
        if (it == reactions_.end() || it->id != id) throw ValidationError("unknown reaction '" + std::string(id) + "'");
        return static_cast<std::size_t>(it - reactions_.begin());
    }

    /// Per species, the (reaction index, coefficient) pairs touching it.
    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> incidence() const {
        std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> out(species_.size());
        for (std::size_t r = 0; r < reactions_.size(); ++r) {
            for (const auto& [sp, v] : reactions_[r].stoich) out[species_index(sp)].emplace_back(r, v);
        }
        return out;
    }

 private:
    std::string name_;
    std::vector<std::string> species_;
    std::vector<Reaction> reactions_;
};

/// Parse `{name, species:[...], reactions:[{id, stoich:{sp:int}, unit_cost,
/// fixed_cost, bounds:[l,u]}]}`.
inline ReactionNetwork load_network(std::string_view text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("network JSON: ") + e.what());
    }
    try {
        std::vector<Reaction> reactions;
        for (const auto& r : doc.at("reactions")) {
            Reaction rx;
            rx.id = r.at("id").get<std::string>();
            for (const auto& [sp, v] : r.at("stoich").items()) rx.stoich[sp] = v.get<std::int64_t>();
            rx.unit_cost = r.at("unit_cost").get<double>();
            rx.fixed_cost = r.value("fixed_cost", 0.0);
            const auto& b = r.at("bounds");
            if (!b.is_array() || b.size() != 2) throw ParseError("reaction '" + rx.id + "': bounds must be [l, u]");
            rx.lower = b[0].get<std::int64_t>();
            rx.upper = b[1].get<std::int64_t>();
            reactions.push_back(std::move(rx));
        }
        return ReactionNetwork(doc.value("name", std::string("network")),
                               doc.at("species").get<std::vector<std::string>>(), std::move(reactions));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("network JSON: ") + e.what());
    }
}

inline nlohmann::json to_json(const ReactionNetwork& network) {
    nlohmann::json doc;
    doc["name"] = network.name();
    doc["species"] = network.species();
    doc["reactions"] = nlohmann::json::array();
    for (const auto& r : network.reactions()) {
        doc["reactions"].push_back({{"id", r.id},
                                    {"stoich", r.stoich},
                                    {"unit_cost", r.unit_cost},
                                    {"fixed_cost", r.fixed_cost},
                                    {"bounds", {r.lower, r.upper}}});
    }
    return doc;
}

/// Integer program: integer x_r in [l_r, u_r], binary y_r for reactions with
/// a fixed cost, objective sum c_unit x + c_fixed y, one mass-balance
/// equality per species and x_r <= u_r y_r linking.
struct CrnModel {
    ReactionNetwork network;
    lp::LinearModel linear;
    std::vector<std::size_t> x_var;
    std::vector<std::optional<std::size_t>> y_var;

    std::size_t num_indicators() const noexcept {
        return static_cast<std::size_t>(std::count_if(y_var.begin(), y_var.end(), [](const auto& y) { return y.has_value(); }));
    }

    /// Full variable vector for quantities x with y_r = p(x_r).
    std::vector<double> point(std::span<const std::int64_t> x) const {
        std::vector<double> values(linear.variables().size(), 0.0);
        for (std::size_t r = 0; r < x.size(); ++r) {
            values[x_var[r]] = static_cast<double>(x[r]);
            if (y_var[r]) values[*y_var[r]] = x[r] > 0 ? 1.0 : 0.0;
        }
        return values;
    }

    /// Objective with each indicator at its cheapest consistent value.
    double objective(std::span<const std::int64_t> x) const { return linear.objective_value(point(x)); }

    /// Per-species sum_r v_{s,r} x_r.
    std::vector<std::int64_t> balance_residual(std::span<const std::int64_t> x) const {
        std::vector<std::int64_t> residual(network.species().size(), 0);
        const auto& reactions = network.reactions();
        for (std::size_t r = 0; r < reactions.size(); ++r) {
            for (const auto& [sp, v] : reactions[r].stoich) residual[network.species_index(sp)] += v * x[r];
        }
        return residual;
    }
};

namespace detail {

inline std::string lp_name(std::string_view raw) {
    std::string out;
    for (char c : raw) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '(' || c == ')';
        out.push_back(ok ? c : '_');
    }
    return out;
}

}  // namespace detail

inline CrnModel build_ip(const ReactionNetwork& network) {
    CrnModel model{network, {}, {}, {}};
    const auto& reactions = network.reactions();
    for (const auto& r : reactions) {
        model.x_var.push_back(model.linear.add_variable("x_" + detail::lp_name(r.id), static_cast<double>(r.lower),
                                                        static_cast<double>(r.upper), lp::VarType::integer));
        model.linear.add_objective(model.x_var.back(), r.unit_cost);
    }
    for (std::size_t r = 0; r < reactions.size(); ++r) {
        if (reactions[r].fixed_cost > 0.0) {
            model.y_var.push_back(model.linear.add_variable("y_" + detail::lp_name(reactions[r].id), 0, 1,
                                                            lp::VarType::binary));
            model.linear.add_objective(*model.y_var.back(), reactions[r].fixed_cost);
        } else {
            model.y_var.emplace_back();
        }
    }
    const auto incidence = network.incidence();
    for (std::size_t s = 0; s < network.species().size(); ++s) {
        lp::LinearConstraint c{"balance_" + detail::lp_name(network.species()[s]), {}, Sense::eq, 0.0};
        for (const auto& [r, v] : incidence[s]) c.terms.emplace_back(model.x_var[r], static_cast<double>(v));
        model.linear.add_constraint(std::move(c));
    }
    for (std::size_t r = 0; r < reactions.size(); ++r) {
        if (!model.y_var[r]) continue;
        model.linear.add_constraint({"link_" + detail::lp_name(reactions[r].id),
                                     {{model.x_var[r], 1.0}, {*model.y_var[r], -static_cast<double>(reactions[r].upper)}},
                                     Sense::le,
                                     0.0});
    }
    return model;
}

/// Constrained QUBO for a network together with the bit layout needed to
/// read quantities back out of an assignment.
struct CrnQubo {
    QuboModel model;
    EncodingScheme scheme = EncodingScheme::unary;
    std::vector<IntegerEncoding> encodings;
    std::vector<std::optional<std::size_t>> indicator_bit;

    std::vector<std::int64_t> quantities(BitsView assignment) const {
        std::vector<std::int64_t> x;
        x.reserve(encodings.size());
        for (const auto& enc : encodings) x.push_back(decode_in(enc, assignment));
        return x;
    }
};

/// Binarize every x_r with the chosen encoding and state mass balance as
/// the `>= 0` / `<= 0` inequality pair per species. Cost terms are grouped
/// "unit_cost" and "fixed_cost".
inline CrnQubo build_qubo(const ReactionNetwork& network, EncodingScheme scheme) {
    const auto& reactions = network.reactions();
    CrnQubo out;
    out.scheme = scheme;
    std::size_t next = 0;
    for (const auto& r : reactions) {
        out.encodings.push_back(make_encoding(scheme, r.lower, r.upper, next));
        next += out.encodings.back().num_bits();
        if (r.fixed_cost > 0.0) {
            out.indicator_bit.push_back(next++);
        } else {
            out.indicator_bit.emplace_back();
        }
    }
    out.model = QuboModel(next);
    auto& q = out.model;
    q.group("unit_cost");
    q.group("fixed_cost");

    for (std::size_t r = 0; r < reactions.size(); ++r) {
        const auto& rx = reactions[r];
        const auto& enc = out.encodings[r];
        if (rx.unit_cost != 0.0) {
            q.add_offset(rx.unit_cost * static_cast<double>(rx.lower), "unit_cost");
            for (std::size_t k = 0; k < enc.num_bits(); ++k) {
                q.add_term(enc.bit_offset + k, enc.bit_offset + k, rx.unit_cost * static_cast<double>(enc.weights[k]),
                           "unit_cost");
            }
        }
        if (out.indicator_bit[r]) q.add_term(*out.indicator_bit[r], *out.indicator_bit[r], rx.fixed_cost, "fixed_cost");
    }

    const auto incidence = network.incidence();
    for (std::size_t s = 0; s < network.species().size(); ++s) {
        double constant = 0.0;
        std::vector<std::pair<std::size_t, double>> coeffs;
        for (const auto& [r, v] : incidence[s]) {
            const auto& enc = out.encodings[r];
            constant += static_cast<double>(v * enc.lower);
            for (std::size_t k = 0; k < enc.num_bits(); ++k) {
                coeffs.emplace_back(enc.bit_offset + k, static_cast<double>(v * enc.weights[k]));
            }
        }
        if (coeffs.empty() && constant == 0.0) continue;  // species never touched by a variable
        const auto& id = network.species()[s];
        q.add_constraint(Constraint::linear(coeffs, Sense::ge, -constant, "balance:" + id + ":ge"));
        q.add_constraint(Constraint::linear(coeffs, Sense::le, -constant, "balance:" + id + ":le"));
    }

    for (std::size_t r = 0; r < reactions.size(); ++r) {
        if (!out.indicator_bit[r]) continue;
        const auto& enc = out.encodings[r];
        std::vector<std::pair<std::size_t, double>> coeffs;
        for (std::size_t k = 0; k < enc.num_bits(); ++k) {
            coeffs.emplace_back(enc.bit_offset + k, static_cast<double>(enc.weights[k]));
        }
        coeffs.emplace_back(*out.indicator_bit[r], -static_cast<double>(reactions[r].upper));
        q.add_constraint(Constraint::linear(coeffs, Sense::le, -static_cast<double>(enc.lower),
                                            "link:" + reactions[r].id));
    }
    return out;
}

struct GeneratorParams {
    std::size_t num_species = 100;
    std::size_t reactions_per_species = 10;
    std::uint64_t seed = 1;
    std::pair<double, double> cost_range{1.0, 10.0};
    std::pair<std::int64_t, std::int64_t> bound_range{0, 10};
};

/// Random network in which every species is the product of
/// `reactions_per_species` reactions drawing one or two random reactants
/// (plus an occasional byproduct). Species s000 has a purchase reaction,
/// every species a waste sink, and a target sink forces one unit of the
/// last species. The first reaction of each species consumes a species of
/// lower index, so a feasible pathway always exists when the lower bound of
/// `bound_range` is 0. Costs are integers drawn uniformly from `cost_range`.
inline ReactionNetwork generate_artificial(const GeneratorParams& params) {
    if (params.num_species == 0 || params.reactions_per_species == 0) {
        throw ConfigurationError("generator needs at least one species and one reaction per species");
    }
    if (params.bound_range.first < 0 || params.bound_range.first > params.bound_range.second ||
        params.bound_range.second < 1) {
        throw ConfigurationError("bound range must satisfy 0 <= lower <= upper, upper >= 1");
    }
    Rng rng(params.seed);
    const auto lo_cost = static_cast<std::int64_t>(std::ceil(params.cost_range.first));
    const auto hi_cost = static_cast<std::int64_t>(std::floor(params.cost_range.second));
    if (lo_cost > hi_cost || lo_cost < 0) throw ConfigurationError("cost range must contain a non-negative integer");
    auto cost = [&] { return static_cast<double>(uniform_int(rng, lo_cost, hi_cost)); };

    const std::size_t n = params.num_species;
    const std::size_t width = std::to_string(n - 1).size();
    auto species_id = [&](std::size_t k) {
        std::string digits = std::to_string(k);
        return "s" + std::string(width - std::min(width, digits.size()), '0') + digits;
    };
    std::vector<std::string> species;
    for (std::size_t k = 0; k < n; ++k) species.push_back(species_id(k));

    const auto [lo, hi] = params.bound_range;
    std::vector<Reaction> reactions;
    reactions.push_back({"buy_" + species[0], {{species[0], 1}}, cost(), 0.0, lo, hi});
    auto other = [&](std::size_t exclude) {
        auto pick = static_cast<std::size_t>(uniform_below(rng, n - 1));
        return pick >= exclude ? pick + 1 : pick;
    };
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < params.reactions_per_species; ++m) {
            Reaction rx;
            rx.id = "r" + species_id(k).substr(1) + "_" + std::to_string(m);
            rx.stoich[species[k]] = 1;
            if (m == 0 && k > 0) {
                rx.stoich[species[uniform_below(rng, k)]] = -1;
            } else if (n > 1) {
                const std::size_t num_reactants = 1 + uniform_below(rng, 2);
                for (std::size_t t = 0; t < num_reactants; ++t) {
                    const auto sp = other(k);
                    if (!rx.stoich.contains(species[sp])) rx.stoich[species[sp]] = -uniform_int(rng, 1, 2);
                }
                if (uniform01(rng) < 0.5) {
                    const auto sp = other(k);
                    if (!rx.stoich.contains(species[sp])) rx.stoich[species[sp]] = 1;
                }
            }
            rx.unit_cost = cost();
            rx.fixed_cost = cost();
            rx.lower = lo;
            rx.upper = hi;
            reactions.push_back(std::move(rx));
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        reactions.push_back({"waste_" + species[k], {{species[k], -1}}, cost(), 0.0, lo, hi});
    }
    reactions.push_back({"target", {{species[n - 1], -1}}, 0.0, 0.0, 1, 1});
    return ReactionNetwork("artificial-" + std::to_string(n) + "x" + std::to_string(params.reactions_per_species) +
                                   "-seed" + std::to_string(params.seed),
                           std::move(species), std::move(reactions));
}

/// Reaction quantities keyed by reaction id.
using Solution = std::map<std::string, std::int64_t>;

inline Solution make_solution(const ReactionNetwork& network, std::span<const std::int64_t> x) {
    Solution out;
    for (std::size_t r = 0; r < network.reactions().size(); ++r) out[network.reactions()[r].id] = x[r];
    return out;
}

inline nlohmann::json to_json(const Solution& solution) { return nlohmann::json(solution); }

inline Solution solution_from_json(const nlohmann::json& doc) {
    try {
        return doc.get<Solution>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("solution JSON: ") + e.what());
    }
}

/// Graphviz DOT of the bipartite network: boxes are reactions (labelled
/// with bounds, or quantity when a solution is given), circles are species,
/// edges carry stoichiometric quantities. With a solution, reactions at zero
/// are dropped and edge labels are scaled by the quantity.
inline std::string export_dot(const ReactionNetwork& network, const std::optional<Solution>& solution = std::nullopt) {
    auto quote = [](std::string_view s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"' || c == '\\') out.push_back('\\');
            out.push_back(c);
        }
        return out + "\"";
    };
    std::ostringstream out;
    out << "digraph " << quote(network.name()) << " {\n  rankdir=LR;\n";
    for (const auto& sp : network.species()) {
        out << "  " << quote("s:" + sp) << " [shape=circle, label=" << quote(sp) << "];\n";
    }
    for (const auto& r : network.reactions()) {
        std::int64_t qty = 1;
        if (solution) {
            auto it = solution->find(r.id);
            qty = it == solution->end() ? 0 : it->second;
            if (qty == 0) continue;
        }
        const std::string label = solution ? r.id + "\\nx=" + std::to_string(qty)
                                           : r.id + "\\n[" + std::to_string(r.lower) + "," + std::to_string(r.upper) + "]";
        out << "  " << quote("r:" + r.id) << " [shape=box, label=\"" << label << "\"];\n";
        for (const auto& [sp, v] : r.stoich) {
            const auto amount = std::to_string((v < 0 ? -v : v) * qty);
            if (v < 0) {
                out << "  " << quote("s:" + sp) << " -> " << quote("r:" + r.id) << " [label=" << quote(amount) << "];\n";
            } else {
                out << "  " << quote("r:" + r.id) << " -> " << quote("s:" + sp) << " [label=" << quote(amount) << "];\n";
            }
        }
    }
    out << "}\n";
    return out.str();
}

}  // namespace qubench::crn
