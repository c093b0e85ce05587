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

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "qubench/errors.hpp"
#include "qubench/qubo.hpp"

namespace qubench {

/// Group label carried by every term that embed_penalties adds.
inline constexpr std::string_view penalty_group = "penalty";

/// How the Lagrange multiplier mu is chosen when constraints are folded into
/// the cost. By default mu = factor * max_{i<=j} |Q_ij| of the objective.
struct MultiplierRule {
    double factor = 25.0;
    std::optional<double> fixed;

    double resolve(const QuboModel& model) const {
        return fixed ? *fixed : factor * model.max_abs_coefficient();
    }
};

namespace detail {

// mu * (sum_i a_i x_i - b)^2, expanded; the constant goes to the offset so the
// penalty vanishes exactly on feasible points.
inline void add_squared_residual(QuboModel& out, const Constraint& c, double sign, double mu) {
    std::vector<std::pair<std::size_t, double>> a;
    for (const auto& [key, value] : c.coeffs()) a.emplace_back(key.i, sign * value);
    const double b = sign * c.rhs();
    for (std::size_t p = 0; p < a.size(); ++p) {
        out.add_term(a[p].first, a[p].first, mu * (a[p].second * a[p].second - 2.0 * b * a[p].second),
                     penalty_group);
        for (std::size_t q = p + 1; q < a.size(); ++q) {
            out.add_term(a[p].first, a[q].first, 2.0 * mu * a[p].second * a[q].second, penalty_group);
        }
    }
    out.add_offset(mu * b * b, penalty_group);
}

// Embed sum a_k x_k <= rhs (already normalised to <=). Returns false when no
// exact quadratic penalty is known for the pattern.
inline bool add_less_equal(QuboModel& out, const Constraint& c, double sign, double mu) {
    const double rhs = sign * c.rhs();
    std::vector<std::tuple<std::size_t, std::size_t, double>> a;
    double max_lhs = 0.0;
    for (const auto& [key, value] : c.coeffs()) {
        a.emplace_back(key.i, key.j, sign * value);
        if (sign * value > 0) max_lhs += sign * value;
    }
    if (max_lhs <= rhs + feasibility_tolerance) return true;  // never violated

    // A single product term: c x_i x_j <= rhs with 0 <= rhs < c.
    if (a.size() == 1) {
        auto [i, j, v] = a.front();
        if (i != j && rhs >= 0 && v > rhs) {
            out.add_term(i, j, mu, penalty_group);
            return true;
        }
        return false;
    }
    if (!c.is_linear()) return false;

    // At most one of two variables: a_i, a_j <= rhs < a_i + a_j.
    if (a.size() == 2) {
        auto [i, ii, ai] = a[0];
        auto [j, jj, aj] = a[1];
        if (ai > 0 && aj > 0 && rhs >= 0 && ai <= rhs && aj <= rhs && ai + aj > rhs) {
            out.add_term(i, j, mu, penalty_group);
            return true;
        }
    }

    // Indicator implication: sum_k a_k q_k - b y <= rhs with a_k > 0, rhs <= 0
    // and b >= sum a_k - rhs, i.e. y = 1 always satisfies it and y = 0 forces
    // sum a_k q_k <= rhs. Penalty mu (1 - y)(sum a_k q_k - rhs).
    std::optional<std::size_t> indicator;
    double b = 0.0;
    double sum_positive = 0.0;
    for (auto [i, j, v] : a) {
        if (v < 0) {
            if (indicator) return false;
            indicator = i;
            b = -v;
        } else {
            sum_positive += v;
        }
    }
    if (!indicator || rhs > 0 || b + feasibility_tolerance < sum_positive - rhs) return false;
    const std::size_t y = *indicator;
    for (auto [k, kk, v] : a) {
        if (k == y) continue;
        out.add_term(k, k, mu * v, penalty_group);
        out.add_term(k, y, -mu * v, penalty_group);
    }
    out.add_term(y, y, mu * rhs, penalty_group);
    out.add_offset(-mu * rhs, penalty_group);
    return true;
}

using ConstraintSignature = std::pair<double, std::vector<std::tuple<std::size_t, std::size_t, double>>>;

inline ConstraintSignature signature(const Constraint& c) {
    ConstraintSignature sig{c.rhs(), {}};
    for (const auto& [key, value] : c.coeffs()) sig.second.emplace_back(key.i, key.j, value);
    return sig;
}

}  // namespace detail

/// Fold every constraint of `model` into its cost as a quadratic penalty
/// labeled "penalty", returning a constraint-free model.
///
/// Supported shapes: one-hot and linear equality constraints (squared
/// residual); a `>=`/`<=` pair with identical coefficients and right-hand
/// side (treated as one equality); and `<=`/`>=` constraints that are an
/// at-most-one-of-two, a single positive product, or an indicator
/// implication `sum a_k q_k <= b y`. Anything else throws
/// UnsupportedEmbedding.
inline QuboModel embed_penalties(const QuboModel& model, const MultiplierRule& rule = {}) {
    QuboModel out = model;
    out.clear_constraints();
    const auto& constraints = model.constraints();
    if (constraints.empty()) return out;

    const double mu = rule.resolve(model);
    if (!(mu > 0.0)) {
        throw ConfigurationError("penalty multiplier resolved to " + std::to_string(mu) +
                                 "; the objective has no nonzero coefficient to scale from");
    }
    out.group(penalty_group);

    // Pair up opposite inequalities that together state an equality.
    std::vector<bool> paired(constraints.size(), false);
    std::map<detail::ConstraintSignature, std::vector<std::size_t>> open_le;
    for (std::size_t p = 0; p < constraints.size(); ++p) {
        if (constraints[p].sense() == Sense::le) open_le[detail::signature(constraints[p])].push_back(p);
    }
    for (std::size_t p = 0; p < constraints.size(); ++p) {
        if (constraints[p].sense() != Sense::ge) continue;
        auto it = open_le.find(detail::signature(constraints[p]));
        if (it == open_le.end() || it->second.empty()) continue;
        paired[p] = true;
        paired[it->second.back()] = true;
        it->second.pop_back();
        if (!constraints[p].is_linear()) {
            throw UnsupportedEmbedding("quadratic equality '" + constraints[p].label() +
                                       "' has no quadratic penalty");
        }
        detail::add_squared_residual(out, constraints[p], 1.0, mu);
    }

    for (std::size_t p = 0; p < constraints.size(); ++p) {
        if (paired[p]) continue;
        const auto& c = constraints[p];
        bool ok = false;
        switch (c.sense()) {
            case Sense::one_hot:
            case Sense::eq:
                ok = c.is_linear();
                if (ok) detail::add_squared_residual(out, c, 1.0, mu);
                break;
            case Sense::le: ok = detail::add_less_equal(out, c, 1.0, mu); break;
            case Sense::ge: ok = detail::add_less_equal(out, c, -1.0, mu); break;
        }
        if (!ok) {
            throw UnsupportedEmbedding("constraint " + std::to_string(p) + " ('" + c.label() + "', " +
                                       std::string(to_string(c.sense())) +
                                       ") has no supported penalty form");
        }
    }
    return out;
}

}  // namespace qubench
