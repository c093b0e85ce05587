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
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qubench/errors.hpp"
#include "qubench/qubo.hpp"
#include "qubench/qubo_io.hpp"

namespace qubench::lp {

enum class VarType { continuous, integer, binary };

struct Variable {
    std::string name;
    double lower = 0.0;
    double upper = 1.0;
    VarType type = VarType::binary;
};

struct LinearConstraint {
    std::string name;
    std::vector<std::pair<std::size_t, double>> terms;
    Sense sense = Sense::eq;  // le, ge or eq
    double rhs = 0.0;
};

/// A minimization MIP with a linear objective: enough structure to evaluate
/// candidate points and to write CPLEX-LP text for external solvers.
class LinearModel {
 public:
    std::size_t add_variable(std::string name, double lower, double upper, VarType type) {
        if (lower > upper) throw BoundsError("variable '" + name + "' has lower > upper");
        variables_.push_back({std::move(name), lower, upper, type});
        return variables_.size() - 1;
    }

    void add_objective(std::size_t var, double coeff) {
        check(var);
        if (coeff == 0.0) return;
        double& slot = objective_[var];
        slot += coeff;
        if (slot == 0.0) objective_.erase(var);
    }

    void add_objective_offset(double value) noexcept { objective_offset_ += value; }

    void add_constraint(LinearConstraint c) {
        if (c.sense == Sense::one_hot) throw ValidationError("linear models take <=, >= or = constraints");
        for (const auto& [var, coeff] : c.terms) check(var);
        constraints_.push_back(std::move(c));
    }

    const std::vector<Variable>& variables() const noexcept { return variables_; }
    const std::map<std::size_t, double>& objective() const noexcept { return objective_; }
    double objective_offset() const noexcept { return objective_offset_; }
    const std::vector<LinearConstraint>& constraints() const noexcept { return constraints_; }

    std::size_t count(VarType type) const noexcept {
        std::size_t n = 0;
        for (const auto& v : variables_) n += v.type == type ? 1 : 0;
        return n;
    }

    double objective_value(std::span<const double> values) const {
        check_length(values);
        double total = objective_offset_;
        for (const auto& [var, coeff] : objective_) total += coeff * values[var];
        return total;
    }

    /// Labels of violated constraints and bounds, empty when feasible.
    std::vector<std::string> violations(std::span<const double> values, double tol = feasibility_tolerance) const {
        check_length(values);
        std::vector<std::string> out;
        for (std::size_t v = 0; v < variables_.size(); ++v) {
            const auto& var = variables_[v];
            const bool integral = var.type != VarType::continuous;
            if (values[v] < var.lower - tol || values[v] > var.upper + tol ||
                (integral && std::abs(values[v] - std::round(values[v])) > tol)) {
                out.push_back("bounds:" + var.name);
            }
        }
        for (const auto& c : constraints_) {
            double lhs = 0.0;
            for (const auto& [var, coeff] : c.terms) lhs += coeff * values[var];
            const bool ok = c.sense == Sense::le   ? lhs <= c.rhs + tol
                            : c.sense == Sense::ge ? lhs >= c.rhs - tol
                                                   : std::abs(lhs - c.rhs) <= tol;
            if (!ok) out.push_back(c.name);
        }
        return out;
    }

 private:
    void check(std::size_t var) const {
        if (var >= variables_.size()) throw IndexError("linear model variable " + std::to_string(var));
    }
    void check_length(std::span<const double> values) const {
        if (values.size() != variables_.size()) {
            throw DimensionError("expected " + std::to_string(variables_.size()) + " values, got " +
                                 std::to_string(values.size()));
        }
    }

    std::vector<Variable> variables_;
    std::map<std::size_t, double> objective_;
    double objective_offset_ = 0.0;
    std::vector<LinearConstraint> constraints_;
};

namespace detail {

inline void write_terms(std::ostringstream& out, const std::vector<std::pair<std::size_t, double>>& terms,
                        const std::vector<Variable>& vars) {
    std::size_t on_line = 0;
    for (const auto& [var, coeff] : terms) {
        if (on_line == 8) {
            out << "\n   ";
            on_line = 0;
        }
        out << (coeff < 0 ? " - " : " + ") << format_double(std::abs(coeff)) << ' ' << vars[var].name;
        ++on_line;
    }
    if (terms.empty()) out << " 0 " << (vars.empty() ? "" : vars.front().name);
}

}  // namespace detail

/// CPLEX LP text. A nonzero objective constant is recorded as a comment,
/// since not every LP reader accepts constants in the objective.
inline std::string to_lp(const LinearModel& model, std::string_view comment = {}) {
    std::ostringstream out;
    if (!comment.empty()) out << "\\ " << comment << '\n';
    if (model.objective_offset() != 0.0) {
        out << "\\ objective constant: " << format_double(model.objective_offset()) << '\n';
    }
    const auto& vars = model.variables();
    out << "Minimize\n obj:";
    std::vector<std::pair<std::size_t, double>> obj(model.objective().begin(), model.objective().end());
    detail::write_terms(out, obj, vars);
    out << "\nSubject To\n";
    for (const auto& c : model.constraints()) {
        out << ' ' << c.name << ':';
        detail::write_terms(out, c.terms, vars);
        out << ' ' << (c.sense == Sense::le ? "<=" : c.sense == Sense::ge ? ">=" : "=") << ' '
            << format_double(c.rhs) << '\n';
    }
    out << "Bounds\n";
    for (const auto& v : vars) {
        if (v.type == VarType::binary) continue;
        out << ' ' << format_double(v.lower) << " <= " << v.name << " <= " << format_double(v.upper) << '\n';
    }
    auto section = [&](const char* title, VarType type) {
        if (model.count(type) == 0) return;
        out << title << '\n';
        std::size_t on_line = 0;
        for (const auto& v : vars) {
            if (v.type != type) continue;
            out << ' ' << v.name;
            if (++on_line == 10) {
                out << '\n';
                on_line = 0;
            }
        }
        if (on_line) out << '\n';
    };
    section("General", VarType::integer);
    section("Binaries", VarType::binary);
    out << "End\n";
    return out.str();
}

}  // namespace qubench::lp
