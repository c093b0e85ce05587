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

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qubench/errors.hpp"
#include "qubench/qubo.hpp"
#include "qubench/qubo_io.hpp"

namespace qubench::metrics {

/// Number of binary variables.
inline std::size_t size(const QuboModel& model) noexcept { return model.num_vars(); }

namespace detail {

inline void require_variables(const QuboModel& model, std::string_view metric) {
    if (model.num_vars() == 0) {
        throw UndefinedMetric(std::string(metric) + " is undefined for a model with no variables");
    }
}

}  // namespace detail

/// Nonzero entries of Q over |x|^2. Off-diagonal couplings count as both
/// ordered pairs (i, j) and (j, i); diagonal entries count once.
inline double density(const QuboModel& model) {
    detail::require_variables(model, "density");
    double count = 0.0;
    model.for_each_entry([&](std::size_t i, std::size_t j, double) { count += (i == j) ? 1.0 : 2.0; });
    const double n = static_cast<double>(model.num_vars());
    return count / (n * n);
}

/// Fraction of ordered pairs (i, j) that are coupled, either through a
/// nonzero Q entry or through membership in a common constraint. A diagonal
/// pair (i, i) counts when Q_ii != 0 or i appears in any constraint.
inline double interconnectivity(const QuboModel& model) {
    detail::require_variables(model, "interconnectivity");
    const std::size_t n = model.num_vars();
    std::vector<std::vector<std::size_t>> supports;
    std::vector<std::vector<std::size_t>> member_of(n);
    for (const auto& c : model.constraints()) {
        supports.push_back(c.support());
        for (auto v : supports.back()) member_of[v].push_back(supports.size() - 1);
    }

    constexpr auto unmarked = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> stamp(n, unmarked);
    double count = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        auto mark = [&](std::size_t j) {
            if (stamp[j] != i) {
                stamp[j] = i;
                count += 1.0;
            }
        };
        for (const auto& [j, v] : model.row(i)) mark(j);
        for (auto p : member_of[i]) {
            for (auto j : supports[p]) mark(j);
        }
    }
    return count / (static_cast<double>(n) * static_cast<double>(n));
}

struct RankOneResult {
    bool is_rank_one = false;
    /// Recovered s (up to global sign), one entry per model variable.
    std::optional<std::vector<double>> s;
};

/// Whether the terms of `group` equal (sum_i s_i x_i)^2 for some real s:
/// diagonal entries s_i^2 and upper-triangular off-diagonal entries
/// 2 s_i s_j. Entries are verified to 1e-6 relative to the largest one.
inline RankOneResult detect_rank_one(const QuboModel& model, std::string_view group) {
    auto id = model.find_group(group);
    if (!id) throw UnknownGroup("unknown group '" + std::string(group) + "'");
    const std::size_t n = model.num_vars();

    std::vector<double> diag(n, 0.0);
    std::map<TermKey, double> off;
    double scale = 0.0;
    for (const auto& [key, value] : model.labeled_terms()) {
        if (key.group != *id) continue;
        scale = std::max(scale, std::abs(value));
        if (key.i == key.j) {
            diag[key.i] = value;
        } else {
            off.emplace(TermKey{key.i, key.j}, value);
        }
    }
    if (scale == 0.0) return {true, std::vector<double>(n, 0.0)};
    const double tol = 1e-6 * scale;

    std::optional<std::size_t> pivot;
    for (std::size_t i = 0; i < n; ++i) {
        if (diag[i] < -tol) return {false, std::nullopt};
        if (!pivot && diag[i] > tol) pivot = i;
    }
    if (!pivot) return {false, std::nullopt};

    std::vector<double> s(n, 0.0);
    const std::size_t p = *pivot;
    s[p] = std::sqrt(diag[p]);
    for (const auto& [key, value] : off) {
        if (key.i == p) s[key.j] = value / (2.0 * s[p]);
        if (key.j == p) s[key.i] = value / (2.0 * s[p]);
    }

    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(s[i] * s[i] - diag[i]) > tol) return {false, std::nullopt};
        if (s[i] != 0.0) support.push_back(i);
    }
    // Every stored off-diagonal entry must match, and every pair in the
    // support must be present (an absent entry is a zero).
    for (const auto& [key, value] : off) {
        if (std::abs(2.0 * s[key.i] * s[key.j] - value) > tol) return {false, std::nullopt};
    }
    for (std::size_t a = 0; a < support.size(); ++a) {
        for (std::size_t b = a + 1; b < support.size(); ++b) {
            const double expected = 2.0 * s[support[a]] * s[support[b]];
            if (std::abs(expected) > tol && !off.contains({support[a], support[b]})) {
                return {false, std::nullopt};
            }
        }
    }
    return {true, std::move(s)};
}

/// Share of Q's nonzero entries (counted as ordered pairs, like density)
/// that receive a contribution from a group detected as rank one. Zero for
/// models without quadratic couplings.
///
/// This entry-count ratio is an operationalization; there is no closed-form
/// definition to follow.
inline double rank1_dominance(const QuboModel& model) {
    double total = 0.0;
    bool quadratic = false;
    model.for_each_entry([&](std::size_t i, std::size_t j, double) {
        total += (i == j) ? 1.0 : 2.0;
        quadratic = quadratic || i != j;
    });
    if (!quadratic) return 0.0;

    std::vector<bool> flagged(model.num_groups(), false);
    for (std::size_t g = 1; g < model.num_groups(); ++g) {
        flagged[g] = detect_rank_one(model, model.group_name(static_cast<QuboModel::GroupId>(g))).is_rank_one;
    }
    std::set<TermKey> explained;
    for (const auto& [key, value] : model.labeled_terms()) {
        if (flagged[key.group] && model.coefficient(key.i, key.j) != 0.0) explained.insert({key.i, key.j});
    }
    double count = 0.0;
    for (const auto& key : explained) count += (key.i == key.j) ? 1.0 : 2.0;
    return count / total;
}

struct Rank1Group {
    std::string label;
    bool is_rank_one = false;
    std::vector<double> s;
};

struct StructureReport {
    std::size_t size = 0;
    double density = 0.0;
    double interconnectivity = 0.0;
    std::vector<Rank1Group> rank1_groups;
    double rank1_dominance = 0.0;
    std::map<Sense, std::size_t> constraint_type_counts;
    bool penalty_separated = false;
};

inline StructureReport analyze(const QuboModel& model) {
    StructureReport report;
    report.size = size(model);
    report.density = density(model);
    report.interconnectivity = interconnectivity(model);
    for (std::size_t g = 1; g < model.num_groups(); ++g) {
        const auto& name = model.group_name(static_cast<QuboModel::GroupId>(g));
        auto result = detect_rank_one(model, name);
        report.rank1_groups.push_back({name, result.is_rank_one, result.s.value_or(std::vector<double>{})});
    }
    report.rank1_dominance = rank1_dominance(model);
    for (auto sense : {Sense::le, Sense::ge, Sense::eq, Sense::one_hot}) report.constraint_type_counts[sense] = 0;
    for (const auto& c : model.constraints()) ++report.constraint_type_counts[c.sense()];
    report.penalty_separated = !model.constraints().empty();
    return report;
}

/// Flat `key: value` block.
inline std::string to_text(const StructureReport& report) {
    std::ostringstream out;
    out << "size: " << report.size << '\n'
        << "density: " << format_double(report.density) << '\n'
        << "interconnectivity: " << format_double(report.interconnectivity) << '\n'
        << "rank1_dominance: " << format_double(report.rank1_dominance) << '\n'
        << "rank1_dominance_definition: entry-count ratio of rank-one groups\n";
    for (const auto& g : report.rank1_groups) {
        out << "rank1_group." << g.label << ": " << (g.is_rank_one ? "true" : "false") << '\n';
    }
    for (const auto& [sense, count] : report.constraint_type_counts) {
        out << "constraints." << to_string(sense) << ": " << count << '\n';
    }
    out << "penalty_separated: " << (report.penalty_separated ? "true" : "false") << '\n';
    return out.str();
}

inline std::string csv_header() {
    return "instance,size,density,interconnectivity,rank1_dominance,le,ge,eq,onehot,penalty_separated,"
           "rank1_groups";
}

/// One CSV row; rank1_groups is `label:0|1` joined by ';'.
inline std::string to_csv_row(const StructureReport& report, std::string_view instance) {
    std::ostringstream out;
    out << instance << ',' << report.size << ',' << format_double(report.density) << ','
        << format_double(report.interconnectivity) << ',' << format_double(report.rank1_dominance);
    for (auto sense : {Sense::le, Sense::ge, Sense::eq, Sense::one_hot}) {
        auto it = report.constraint_type_counts.find(sense);
        out << ',' << (it == report.constraint_type_counts.end() ? 0 : it->second);
    }
    out << ',' << (report.penalty_separated ? 1 : 0) << ',';
    for (std::size_t g = 0; g < report.rank1_groups.size(); ++g) {
        if (g) out << ';';
        out << report.rank1_groups[g].label << ':' << (report.rank1_groups[g].is_rank_one ? 1 : 0);
    }
    return out.str();
}

}  // namespace qubench::metrics
