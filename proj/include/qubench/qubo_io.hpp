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
#include <charconv>
#include <istream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <tuple>
#include <vector>

#include "qubench/errors.hpp"
#include "qubench/qubo.hpp"

namespace qubench {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, end);
}

inline double parse_double(std::string_view token) {
    double value = 0.0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size()) {
        throw ParseError("expected a number, got '" + std::string(token) + "'");
    }
    return value;
}

inline std::size_t parse_index(std::string_view token) {
    std::size_t value = 0;
    auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size()) {
        throw ParseError("expected a non-negative integer, got '" + std::string(token) + "'");
    }
    return value;
}

/// Serialize a model in the line-oriented text format:
///
///     qubo <num_vars> <num_terms> <offset>
///     # offset <group> <value>          (one per labeled group offset)
///     <i> <j> <coeff> [group]           (ordered by i, j, group)
///     con <sense> <rhs> : <i> <j> <coeff> ... [# label]
inline std::string to_text(const QuboModel& model) {
    std::ostringstream out;
    out << "qubo " << model.num_vars() << ' ' << model.labeled_terms().size() << ' '
        << format_double(model.offset()) << '\n';

    std::vector<std::pair<std::string, double>> offsets;
    for (std::size_t g = 1; g < model.num_groups(); ++g) {
        const auto id = static_cast<QuboModel::GroupId>(g);
        if (model.group_offset(id) != 0.0) offsets.emplace_back(model.group_name(id), model.group_offset(id));
    }
    std::sort(offsets.begin(), offsets.end());
    for (const auto& [name, value] : offsets) out << "# offset " << name << ' ' << format_double(value) << '\n';

    std::vector<std::tuple<std::size_t, std::size_t, std::string, double>> rows;
    rows.reserve(model.labeled_terms().size());
    for (const auto& [key, value] : model.labeled_terms()) {
        rows.emplace_back(key.i, key.j, model.group_name(key.group), value);
    }
    std::sort(rows.begin(), rows.end());
    for (const auto& [i, j, group, value] : rows) {
        out << i << ' ' << j << ' ' << format_double(value);
        if (!group.empty()) out << ' ' << group;
        out << '\n';
    }

    for (const auto& c : model.constraints()) {
        out << "con " << to_string(c.sense()) << ' ' << format_double(c.rhs()) << " :";
        for (const auto& [key, value] : c.coeffs()) {
            out << ' ' << key.i << ' ' << key.j << ' ' << format_double(value);
        }
        if (!c.label().empty()) out << " # " << c.label();
        out << '\n';
    }
    return out.str();
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < line.size()) {
        pos = line.find_first_not_of(" \t\r", pos);
        if (pos == std::string_view::npos) break;
        auto end = line.find_first_of(" \t\r", pos);
        if (end == std::string_view::npos) end = line.size();
        tokens.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    return tokens;
}

}  // namespace detail

inline QuboModel from_text(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    auto fail = [&](const std::string& what) -> ParseError {
        return ParseError("line " + std::to_string(line_no) + ": " + what);
    };

    std::vector<std::string_view> tokens;
    bool have_header = false;
    QuboModel model;
    std::size_t expected_terms = 0;
    std::size_t seen_terms = 0;
    double total_offset = 0.0;
    double labeled_offset = 0.0;

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view(line);
        tokens = detail::split_ws(view);
        if (tokens.empty()) continue;
        if (tokens[0].starts_with('#')) {
            if (tokens.size() == 4 && tokens[0] == "#" && tokens[1] == "offset") {
                if (!have_header) throw fail("offset line before header");
                const double value = parse_double(tokens[3]);
                model.add_offset(value, tokens[2]);
                labeled_offset += value;
            }
            continue;
        }
        try {
            if (!have_header) {
                if (tokens.size() != 4 || tokens[0] != "qubo") {
                    throw fail("expected header 'qubo <num_vars> <num_terms> <offset>'");
                }
                model = QuboModel(parse_index(tokens[1]));
                expected_terms = parse_index(tokens[2]);
                total_offset = parse_double(tokens[3]);
                have_header = true;
                continue;
            }
            if (tokens[0] == "con") {
                if (tokens.size() < 4 || tokens[3] != ":") throw fail("malformed constraint line");
                std::string label;
                auto hash = view.find(" # ");
                std::size_t end = tokens.size();
                if (hash != std::string_view::npos) {
                    label = std::string(view.substr(hash + 3));
                    end = detail::split_ws(view.substr(0, hash)).size();
                }
                if ((end - 4) % 3 != 0) throw fail("constraint coefficients come in triples");
                Constraint c(parse_sense(tokens[1]), parse_double(tokens[2]), label);
                for (std::size_t k = 4; k < end; k += 3) {
                    c.add(parse_index(tokens[k]), parse_index(tokens[k + 1]), parse_double(tokens[k + 2]));
                }
                model.add_constraint(std::move(c));
                continue;
            }
            if (tokens.size() != 3 && tokens.size() != 4) throw fail("expected 'i j coeff [group]'");
            const auto i = parse_index(tokens[0]);
            const auto j = parse_index(tokens[1]);
            if (i > j) throw fail("term indices must satisfy i <= j");
            model.add_term(i, j, parse_double(tokens[2]), tokens.size() == 4 ? tokens[3] : std::string_view{});
            ++seen_terms;
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw fail(e.what());
        }
    }
    if (!have_header) throw ParseError("missing 'qubo' header");
    if (seen_terms != expected_terms) {
        throw ParseError("header declares " + std::to_string(expected_terms) + " terms, found " +
                         std::to_string(seen_terms));
    }
    if (total_offset - labeled_offset != 0.0) model.add_offset(total_offset - labeled_offset);
    return model;
}

inline QuboModel from_text(std::string_view text) {
    std::istringstream in{std::string(text)};
    return from_text(in);
}

}  // namespace qubench
