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
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qubench/errors.hpp"

namespace qubench {

using Bits = std::vector<std::uint8_t>;
using BitsView = std::span<const std::uint8_t>;

/// Residual tolerance used for every feasibility decision.
inline constexpr double feasibility_tolerance = 1e-9;

/// Upper-triangular index pair, i <= j.
struct TermKey {
    std::size_t i = 0;
    std::size_t j = 0;

    friend auto operator<=>(const TermKey&, const TermKey&) = default;
};

inline TermKey make_key(std::size_t a, std::size_t b) noexcept {
    return a <= b ? TermKey{a, b} : TermKey{b, a};
}

enum class Sense { le, ge, eq, one_hot };

inline std::string_view to_string(Sense sense) noexcept {
    switch (sense) {
        case Sense::le: return "<=";
        case Sense::ge: return ">=";
        case Sense::eq: return "=";
        case Sense::one_hot: return "onehot";
    }
    return "?";
}

inline Sense parse_sense(std::string_view token) {
    if (token == "<=") return Sense::le;
    if (token == ">=") return Sense::ge;
    if (token == "=" || token == "==") return Sense::eq;
    if (token == "onehot" || token == "one-hot") return Sense::one_hot;
    throw ParseError("unknown constraint sense '" + std::string(token) + "'");
}

/// A (possibly quadratic) constraint `sum C_ij x_i x_j  <sense>  rhs` over
/// binary variables. Diagonal entries are the linear part.
class Constraint {
 public:
    Constraint(Sense sense, double rhs, std::string label = {})
            : sense_(sense), rhs_(sense == Sense::one_hot ? 1.0 : rhs), label_(std::move(label)) {}

    /// Exactly one of `vars` equals 1.
    static Constraint one_hot(std::span<const std::size_t> vars, std::string label = {}) {
        Constraint c(Sense::one_hot, 1.0, std::move(label));
        for (auto v : vars) c.add(v, v, 1.0);
        return c;
    }

    static Constraint linear(std::span<const std::pair<std::size_t, double>> coeffs, Sense sense,
                             double rhs, std::string label = {}) {
        Constraint c(sense, rhs, std::move(label));
        for (const auto& [v, a] : coeffs) c.add(v, v, a);
        return c;
    }

    /// Accumulate `value` into C_ij. A resulting zero removes the entry.
    void add(std::size_t i, std::size_t j, double value) {
        const auto key = make_key(i, j);
        if (sense_ == Sense::one_hot) {
            if (key.i != key.j || value != 1.0 || coeffs_.contains(key)) {
                throw ValidationError("one-hot constraints take each variable once with coefficient 1");
            }
        }
        double& slot = coeffs_[key];
        slot += value;
        if (slot == 0.0) coeffs_.erase(key);
    }

    Sense sense() const noexcept { return sense_; }
    double rhs() const noexcept { return rhs_; }
    const std::string& label() const noexcept { return label_; }
    const std::map<TermKey, double>& coeffs() const noexcept { return coeffs_; }

    bool is_linear() const noexcept {
        return std::all_of(coeffs_.begin(), coeffs_.end(),
                           [](const auto& kv) { return kv.first.i == kv.first.j; });
    }

    /// Sorted variable indices with a nonzero coefficient.
    std::vector<std::size_t> support() const {
        std::vector<std::size_t> out;
        for (const auto& [key, value] : coeffs_) {
            out.push_back(key.i);
            out.push_back(key.j);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    double lhs(BitsView x) const {
        double total = 0.0;
        for (const auto& [key, value] : coeffs_) {
            if (x[key.i] && x[key.j]) total += value;
        }
        return total;
    }

    /// Magnitude by which `lhs` misses the constraint (0 when satisfied exactly).
    double violation(double lhs) const noexcept {
        switch (sense_) {
            case Sense::le: return std::max(0.0, lhs - rhs_);
            case Sense::ge: return std::max(0.0, rhs_ - lhs);
            case Sense::eq:
            case Sense::one_hot: return lhs > rhs_ ? lhs - rhs_ : rhs_ - lhs;
        }
        return 0.0;
    }

 private:
    Sense sense_;
    double rhs_;
    std::string label_;
    std::map<TermKey, double> coeffs_;
};

/// Sparse upper-triangular QUBO with labeled term groups, a constant offset
/// and optional attached constraints.
///
/// A coefficient Q_ij may receive contributions from several groups (for
/// example a diagonal entry holding both a codon-usage cost and a GC-content
/// term). Each stored (i, j, group) contribution is nonzero; the aggregate
/// Q_ij used for energies is the sum over groups and is kept in a symmetric
/// adjacency so that local fields cost O(degree).
class QuboModel {
 public:
    using GroupId = std::uint32_t;

    struct LabeledKey {
        std::size_t i = 0;
        std::size_t j = 0;
        GroupId group = 0;

        friend auto operator<=>(const LabeledKey&, const LabeledKey&) = default;
    };

    explicit QuboModel(std::size_t num_vars = 0) : adjacency_(num_vars) {
        group_names_.emplace_back();
        group_offsets_.push_back(0.0);
    }

    std::size_t num_vars() const noexcept { return adjacency_.size(); }

    /// Id of the named group, registering it when new. The empty name is the
    /// unlabeled group.
    GroupId group(std::string_view name) {
        if (auto id = find_group(name)) return *id;
        if (name.find_first_of(" \t\r\n") != std::string_view::npos) {
            throw ValidationError("group labels may not contain whitespace");
        }
        group_names_.emplace_back(name);
        group_offsets_.push_back(0.0);
        return static_cast<GroupId>(group_names_.size() - 1);
    }

    std::optional<GroupId> find_group(std::string_view name) const noexcept {
        for (std::size_t g = 0; g < group_names_.size(); ++g) {
            if (group_names_[g] == name) return static_cast<GroupId>(g);
        }
        return std::nullopt;
    }

    const std::string& group_name(GroupId id) const { return group_names_.at(id); }
    std::size_t num_groups() const noexcept { return group_names_.size(); }

    /// Accumulate into the (i, j) contribution of `group`.
    void add_term(std::size_t i, std::size_t j, double value, std::string_view group_label = {}) {
        const auto key = checked_key(i, j, group(group_label));
        auto it = terms_.find(key);
        set_labeled(key, (it == terms_.end() ? 0.0 : it->second) + value);
    }

    /// Replace the (i, j) contribution of `group`; zero deletes it.
    void set_term(std::size_t i, std::size_t j, double value, std::string_view group_label = {}) {
        set_labeled(checked_key(i, j, group(group_label)), value);
    }

    void erase_term(std::size_t i, std::size_t j, std::string_view group_label = {}) {
        auto id = find_group(group_label);
        if (!id) return;
        set_labeled(checked_key(i, j, *id), 0.0);
    }

    /// Aggregate Q_ij over all groups.
    double coefficient(std::size_t i, std::size_t j) const {
        check_index(i);
        check_index(j);
        const auto& row = adjacency_[i];
        auto it = row.find(j);
        return it == row.end() ? 0.0 : it->second;
    }

    double coefficient(std::size_t i, std::size_t j, std::string_view group_label) const {
        auto id = find_group(group_label);
        if (!id) return 0.0;
        auto it = terms_.find(checked_key(i, j, *id));
        return it == terms_.end() ? 0.0 : it->second;
    }

    void add_offset(double value, std::string_view group_label = {}) {
        group_offsets_[group(group_label)] += value;
    }

    double offset() const noexcept {
        double total = 0.0;
        for (double o : group_offsets_) total += o;
        return total;
    }

    double group_offset(GroupId id) const { return group_offsets_.at(id); }

    void add_constraint(Constraint constraint) {
        for (const auto& [key, value] : constraint.coeffs()) check_index(key.j);
        constraints_.push_back(std::move(constraint));
    }

    const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
    void clear_constraints() noexcept { constraints_.clear(); }

    /// Every stored (i, j, group) contribution in canonical order.
    const std::map<LabeledKey, double>& labeled_terms() const noexcept { return terms_; }

    /// Number of nonzero aggregate entries with i <= j.
    std::size_t num_entries() const noexcept { return num_entries_; }

    /// Symmetric aggregate neighbours of i; the diagonal is stored at key i.
    const std::map<std::size_t, double>& row(std::size_t i) const {
        check_index(i);
        return adjacency_[i];
    }

    /// Visit aggregate entries (i, j, Q_ij), i <= j, ordered by i then j.
    template <class Fn>
    void for_each_entry(Fn&& fn) const {
        for (std::size_t i = 0; i < adjacency_.size(); ++i) {
            for (auto it = adjacency_[i].lower_bound(i); it != adjacency_[i].end(); ++it) {
                fn(i, it->first, it->second);
            }
        }
    }

    /// Largest |Q_ij| over aggregate entries (0 for an empty model).
    double max_abs_coefficient() const noexcept {
        double best = 0.0;
        for_each_entry([&](std::size_t, std::size_t, double v) { best = std::max(best, std::abs(v)); });
        return best;
    }

    double max_abs_diagonal() const noexcept {
        double best = 0.0;
        for (std::size_t i = 0; i < adjacency_.size(); ++i) {
            auto it = adjacency_[i].find(i);
            if (it != adjacency_[i].end()) best = std::max(best, std::abs(it->second));
        }
        return best;
    }

    void check_index(std::size_t i) const {
        if (i >= adjacency_.size()) {
            throw IndexError("variable index " + std::to_string(i) + " out of range for " +
                             std::to_string(adjacency_.size()) + " variables");
        }
    }

 private:
    LabeledKey checked_key(std::size_t i, std::size_t j, GroupId g) const {
        check_index(i);
        check_index(j);
        auto key = make_key(i, j);
        return {key.i, key.j, g};
    }

    void set_labeled(const LabeledKey& key, double value) {
        if (value == 0.0) {
            terms_.erase(key);
        } else {
            terms_[key] = value;
        }
        refresh_aggregate(key.i, key.j);
    }

    void refresh_aggregate(std::size_t i, std::size_t j) {
        double sum = 0.0;
        for (auto it = terms_.lower_bound({i, j, 0}); it != terms_.end() && it->first.i == i &&
                                                      it->first.j == j;
             ++it) {
            sum += it->second;
        }
        auto& row = adjacency_[i];
        const bool present = row.contains(j);
        if (sum == 0.0) {
            if (present) {
                row.erase(j);
                adjacency_[j].erase(i);
                --num_entries_;
            }
            return;
        }
        if (!present) ++num_entries_;
        row[j] = sum;
        adjacency_[j][i] = sum;
    }

    std::vector<std::map<std::size_t, double>> adjacency_;
    std::map<LabeledKey, double> terms_;
    std::vector<std::string> group_names_;
    std::vector<double> group_offsets_;
    std::vector<Constraint> constraints_;
    std::size_t num_entries_ = 0;
};

namespace detail {

inline void check_length(std::size_t num_vars, BitsView x) {
    if (x.size() != num_vars) {
        throw DimensionError("assignment has " + std::to_string(x.size()) +
                             " bits, model has " + std::to_string(num_vars) + " variables");
    }
}

}  // namespace detail

/// offset + sum_i Q_ii x_i + sum_{i<j} Q_ij x_i x_j
inline double evaluate(const QuboModel& model, BitsView x) {
    detail::check_length(model.num_vars(), x);
    double energy = model.offset();
    model.for_each_entry([&](std::size_t i, std::size_t j, double v) {
        if (x[i] && x[j]) energy += v;
    });
    return energy;
}

/// h_i = Q_ii + sum_{j != i} Q_{min(i,j), max(i,j)} x_j
inline double local_field(const QuboModel& model, BitsView x, std::size_t i) {
    detail::check_length(model.num_vars(), x);
    double h = 0.0;
    for (const auto& [j, v] : model.row(i)) {
        if (j == i || x[j]) h += v;
    }
    return h;
}

/// Energy change from flipping bit i: (+1 if x_i = 0 else -1) * h_i.
inline double flip_delta(const QuboModel& model, BitsView x, std::size_t i) {
    const double h = local_field(model, x, i);
    return x[i] ? -h : h;
}

/// Energy contribution of a single labeled group, including its offset.
inline double evaluate_group(const QuboModel& model, BitsView x, std::string_view group_label) {
    detail::check_length(model.num_vars(), x);
    auto id = model.find_group(group_label);
    if (!id) throw UnknownGroup("unknown group '" + std::string(group_label) + "'");
    double energy = model.group_offset(*id);
    for (const auto& [key, value] : model.labeled_terms()) {
        if (key.group == *id && x[key.i] && x[key.j]) energy += value;
    }
    return energy;
}

struct ConstraintStatus {
    std::size_t index = 0;
    double lhs = 0.0;
    double violation = 0.0;
    bool satisfied = true;
};

struct FeasibilityReport {
    bool feasible = true;
    std::vector<ConstraintStatus> constraints;

    double total_violation() const noexcept {
        double total = 0.0;
        for (const auto& c : constraints) total += c.violation;
        return total;
    }
};

inline FeasibilityReport check_feasible(const QuboModel& model, BitsView x) {
    detail::check_length(model.num_vars(), x);
    FeasibilityReport report;
    const auto& constraints = model.constraints();
    report.constraints.reserve(constraints.size());
    for (std::size_t p = 0; p < constraints.size(); ++p) {
        ConstraintStatus status;
        status.index = p;
        status.lhs = constraints[p].lhs(x);
        status.violation = constraints[p].violation(status.lhs);
        status.satisfied = status.violation <= feasibility_tolerance;
        report.feasible = report.feasible && status.satisfied;
        report.constraints.push_back(status);
    }
    return report;
}

/// Flattened, immutable symmetric view of a quadratic form used by the
/// solvers. Constraints are not part of it.
class CompiledQubo {
 public:
    CompiledQubo() = default;

    explicit CompiledQubo(const QuboModel& model) : offset_(model.offset()) {
        const std::size_t n = model.num_vars();
        linear_.assign(n, 0.0);
        start_.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto& row = model.row(i);
            start_[i + 1] = start_[i] + row.size() - (row.contains(i) ? 1 : 0);
        }
        neighbor_.resize(start_[n]);
        weight_.resize(start_[n]);
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t pos = start_[i];
            for (const auto& [j, v] : model.row(i)) {
                if (j == i) {
                    linear_[i] = v;
                } else {
                    neighbor_[pos] = j;
                    weight_[pos] = v;
                    ++pos;
                }
            }
        }
    }

    /// Compile the coefficients of a constraint (its left-hand side).
    static CompiledQubo from_constraint(std::size_t num_vars, const Constraint& constraint) {
        QuboModel scratch(num_vars);
        for (const auto& [key, value] : constraint.coeffs()) scratch.add_term(key.i, key.j, value);
        return CompiledQubo(scratch);
    }

    std::size_t num_vars() const noexcept { return linear_.size(); }
    double offset() const noexcept { return offset_; }
    double linear(std::size_t i) const noexcept { return linear_[i]; }
    std::span<const std::size_t> neighbors(std::size_t i) const noexcept {
        return {neighbor_.data() + start_[i], start_[i + 1] - start_[i]};
    }
    std::span<const double> weights(std::size_t i) const noexcept {
        return {weight_.data() + start_[i], start_[i + 1] - start_[i]};
    }

    double energy(BitsView x) const {
        detail::check_length(num_vars(), x);
        double e = offset_;
        for (std::size_t i = 0; i < linear_.size(); ++i) {
            if (!x[i]) continue;
            e += linear_[i];
            for (std::size_t k = start_[i]; k < start_[i + 1]; ++k) {
                if (neighbor_[k] > i && x[neighbor_[k]]) e += weight_[k];
            }
        }
        return e;
    }

    double local_field(BitsView x, std::size_t i) const noexcept {
        double h = linear_[i];
        for (std::size_t k = start_[i]; k < start_[i + 1]; ++k) {
            if (x[neighbor_[k]]) h += weight_[k];
        }
        return h;
    }

    double flip_delta(BitsView x, std::size_t i) const noexcept {
        const double h = local_field(x, i);
        return x[i] ? -h : h;
    }

    /// Fill h with every local field of x.
    void local_fields(BitsView x, std::span<double> h) const noexcept {
        for (std::size_t i = 0; i < linear_.size(); ++i) h[i] = local_field(x, i);
    }

    /// Flip bit k of x and update the maintained local fields h.
    void apply_flip(std::span<std::uint8_t> x, std::span<double> h, std::size_t k) const noexcept {
        const double dx = x[k] ? -1.0 : 1.0;
        x[k] ^= 1U;
        for (std::size_t p = start_[k]; p < start_[k + 1]; ++p) h[neighbor_[p]] += dx * weight_[p];
    }

 private:
    double offset_ = 0.0;
    std::vector<double> linear_;
    std::vector<std::size_t> start_;
    std::vector<std::size_t> neighbor_;
    std::vector<double> weight_;
};

}  // namespace qubench
