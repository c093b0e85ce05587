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
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qubench/errors.hpp"
#include "qubench/linear_model.hpp"
#include "qubench/penalty.hpp"
#include "qubench/qubo.hpp"
#include "qubench/qubo_io.hpp"

namespace qubench::mrna {

/// The twenty standard amino acids (one-letter codes).
inline constexpr std::string_view amino_acids = "ACDEFGHIKLMNPQRSTVWY";

inline bool is_amino_acid(char c) noexcept { return amino_acids.find(c) != std::string_view::npos; }

/// Upper-case a nucleotide string and map T to U. Throws on anything that is
/// not A, C, G, T or U.
inline std::string normalize_rna(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        if (c == 'T') c = 'U';
        if (c != 'A' && c != 'C' && c != 'G' && c != 'U') {
            throw ValidationError("invalid nucleotide '" + std::string(1, c) + "' in '" + std::string(raw) + "'");
        }
        out.push_back(c);
    }
    return out;
}

struct CodonUsage {
    std::string codon;
    double frequency = 1.0;
};

/// Amino acid -> synonymous codons with usage frequency in (0, 1].
class CodonTable {
 public:
    void add(char amino_acid, std::string_view codon, double frequency) {
        amino_acid = static_cast<char>(std::toupper(static_cast<unsigned char>(amino_acid)));
        if (!is_amino_acid(amino_acid)) {
            throw ValidationError("unknown amino acid '" + std::string(1, amino_acid) + "'");
        }
        auto rna = normalize_rna(codon);
        if (rna.size() != 3) throw ValidationError("codon '" + std::string(codon) + "' is not three nucleotides");
        if (!(frequency > 0.0 && frequency <= 1.0)) {
            throw ValidationError("codon " + rna + " has frequency outside (0, 1]");
        }
        auto& list = entries_[amino_acid];
        for (const auto& c : list) {
            if (c.codon == rna) throw ValidationError("codon " + rna + " listed twice for " + std::string(1, amino_acid));
        }
        list.push_back({std::move(rna), frequency});
    }

    bool contains(char amino_acid) const noexcept { return entries_.contains(amino_acid); }

    const std::vector<CodonUsage>& codons(char amino_acid) const {
        auto it = entries_.find(amino_acid);
        if (it == entries_.end()) throw ValidationError("no codons for amino acid '" + std::string(1, amino_acid) + "'");
        return it->second;
    }

    const std::map<char, std::vector<CodonUsage>>& entries() const noexcept { return entries_; }

 private:
    std::map<char, std::vector<CodonUsage>> entries_;
};

/// Standard genetic code without stop codons, each amino acid's codons at
/// uniform frequency 1/n_k.
inline CodonTable standard_code_table() {
    static const std::pair<char, std::vector<std::string_view>> code[] = {
            {'A', {"GCA", "GCC", "GCG", "GCU"}},
            {'C', {"UGC", "UGU"}},
            {'D', {"GAC", "GAU"}},
            {'E', {"GAA", "GAG"}},
            {'F', {"UUC", "UUU"}},
            {'G', {"GGA", "GGC", "GGG", "GGU"}},
            {'H', {"CAC", "CAU"}},
            {'I', {"AUA", "AUC", "AUU"}},
            {'K', {"AAA", "AAG"}},
            {'L', {"CUA", "CUC", "CUG", "CUU", "UUA", "UUG"}},
            {'M', {"AUG"}},
            {'N', {"AAC", "AAU"}},
            {'P', {"CCA", "CCC", "CCG", "CCU"}},
            {'Q', {"CAA", "CAG"}},
            {'R', {"AGA", "AGG", "CGA", "CGC", "CGG", "CGU"}},
            {'S', {"AGC", "AGU", "UCA", "UCC", "UCG", "UCU"}},
            {'T', {"ACA", "ACC", "ACG", "ACU"}},
            {'V', {"GUA", "GUC", "GUG", "GUU"}},
            {'W', {"UGG"}},
            {'Y', {"UAC", "UAU"}},
    };
    CodonTable table;
    for (const auto& [aa, codons] : code) {
        for (auto c : codons) table.add(aa, c, 1.0 / static_cast<double>(codons.size()));
    }
    return table;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> lines(std::string_view text) {
    std::vector<std::string_view> out;
    while (!text.empty()) {
        auto nl = text.find('\n');
        out.push_back(text.substr(0, nl));
        if (nl == std::string_view::npos) break;
        text.remove_prefix(nl + 1);
    }
    return out;
}

}  // namespace detail

/// CSV with header `codon,amino_acid,frequency`. DNA codons are stored in the
/// RNA alphabet; stop rows (`*`) are skipped.
inline CodonTable load_codon_table(std::string_view text) {
    CodonTable table;
    bool header = false;
    std::size_t line_no = 0;
    for (auto raw : detail::lines(text)) {
        ++line_no;
        auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string_view> fields;
        std::size_t pos = 0;
        while (true) {
            auto comma = line.find(',', pos);
            fields.push_back(detail::trim(line.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
            if (comma == std::string_view::npos) break;
            pos = comma + 1;
        }
        auto where = "codon table line " + std::to_string(line_no) + ": ";
        if (!header) {
            if (fields.size() != 3 || fields[0] != "codon" || fields[1] != "amino_acid" || fields[2] != "frequency") {
                throw ParseError(where + "expected header 'codon,amino_acid,frequency'");
            }
            header = true;
            continue;
        }
        if (fields.size() != 3) throw ParseError(where + "expected 3 fields");
        if (fields[1] == "*" || fields[1] == "Stop" || fields[1] == "STOP") continue;
        if (fields[1].size() != 1) throw ParseError(where + "amino acid must be a one-letter code");
        double freq = 0.0;
        try {
            freq = parse_double(fields[2]);
        } catch (const ParseError&) {
            throw ParseError(where + "bad frequency '" + std::string(fields[2]) + "'");
        }
        try {
            table.add(fields[1].front(), fields[0], freq);
        } catch (const ValidationError& e) {
            throw ParseError(where + e.what());
        }
    }
    if (!header) throw ParseError("codon table is empty");
    return table;
}

struct FastaRecord {
    std::string header;
    std::string sequence;
};

/// Protein FASTA. Sequences are upper-cased, whitespace is ignored and one
/// trailing stop '*' is dropped; any other non-amino-acid letter is an error.
inline std::vector<FastaRecord> load_fasta(std::string_view text) {
    std::vector<FastaRecord> records;
    for (auto raw : detail::lines(text)) {
        auto line = detail::trim(raw);
        if (line.empty() || line.front() == ';') continue;
        if (line.front() == '>') {
            records.push_back({std::string(detail::trim(line.substr(1))), {}});
            continue;
        }
        if (records.empty()) throw ParseError("FASTA sequence data before the first '>' header");
        for (char c : line) {
            if (std::isspace(static_cast<unsigned char>(c))) continue;
            records.back().sequence.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
        }
    }
    if (records.empty()) throw ParseError("FASTA contains no records");
    for (auto& rec : records) {
        if (!rec.sequence.empty() && rec.sequence.back() == '*') rec.sequence.pop_back();
        if (rec.sequence.empty()) throw ParseError("FASTA record '" + rec.header + "' has no sequence");
        for (std::size_t p = 0; p < rec.sequence.size(); ++p) {
            if (!is_amino_acid(rec.sequence[p])) {
                throw ParseError("FASTA record '" + rec.header + "', position " + std::to_string(p + 1) +
                                 ": unknown amino acid '" + std::string(1, rec.sequence[p]) + "'");
            }
        }
    }
    return records;
}

/// Denominator of the GC fraction: 3L nucleotides (matching the MIP and CP
/// formulations) or N codon variables (the literal QUBO expansion).
enum class GcNormalization { nucleotide, paper_faithful };

inline std::string_view to_string(GcNormalization g) noexcept {
    return g == GcNormalization::nucleotide ? "nucleotide" : "paper_faithful";
}

inline GcNormalization parse_gc_normalization(std::string_view name) {
    if (name == "nucleotide") return GcNormalization::nucleotide;
    if (name == "paper_faithful" || name == "codon") return GcNormalization::paper_faithful;
    throw ConfigurationError("unknown GC normalization '" + std::string(name) + "'");
}

struct CodonWeights {
    double c_f = 1.0;
    double c_gc = 1.0;
    double c_r = 1.0;
    double rho_target = 0.5;
    double epsilon_f = 1.0;
};

struct CodonProblem {
    std::string protein;
    CodonTable table = standard_code_table();
    CodonWeights weights;
    GcNormalization gc_normalization = GcNormalization::nucleotide;

    void validate() const {
        if (protein.empty()) throw ValidationError("protein sequence is empty");
        for (std::size_t p = 0; p < protein.size(); ++p) {
            if (!is_amino_acid(protein[p]) || !table.contains(protein[p])) {
                throw ValidationError("position " + std::to_string(p + 1) + ": unknown amino acid '" +
                                      std::string(1, protein[p]) + "'");
            }
        }
        const auto& w = weights;
        if (w.c_f < 0 || w.c_gc < 0 || w.c_r < 0) throw ValidationError("weights must be non-negative");
        if (!(w.rho_target >= 0.0 && w.rho_target <= 1.0)) throw ValidationError("GC target must lie in [0, 1]");
        if (!(w.epsilon_f >= 0.0)) throw ValidationError("log offset must be non-negative");
    }
};

/// Flat position-major indexing of every candidate codon.
struct CodonLayout {
    std::vector<std::size_t> position_start;  // L + 1 entries
    std::vector<std::size_t> position_of;
    std::vector<std::string> codon;
    std::vector<double> frequency;
    std::vector<int> gc_count;

    std::size_t length() const noexcept { return position_start.size() - 1; }
    std::size_t num_vars() const noexcept { return codon.size(); }
    std::size_t choices(std::size_t p) const noexcept { return position_start[p + 1] - position_start[p]; }
    std::size_t index(std::size_t p, std::size_t i) const noexcept { return position_start[p] + i; }

    /// kappa_ij: codons sit at neighbouring amino-acid positions.
    bool adjacent(std::size_t i, std::size_t j) const noexcept {
        const auto a = position_of[i];
        const auto b = position_of[j];
        return a + 1 == b || b + 1 == a;
    }
};

inline int gc_content(std::string_view codon) noexcept {
    return static_cast<int>(std::count_if(codon.begin(), codon.end(), [](char c) { return c == 'G' || c == 'C'; }));
}

inline CodonLayout layout(const CodonProblem& problem) {
    problem.validate();
    CodonLayout out;
    out.position_start.push_back(0);
    for (std::size_t p = 0; p < problem.protein.size(); ++p) {
        for (const auto& usage : problem.table.codons(problem.protein[p])) {
            out.position_of.push_back(p);
            out.codon.push_back(usage.codon);
            out.frequency.push_back(usage.frequency);
            out.gc_count.push_back(gc_content(usage.codon));
        }
        out.position_start.push_back(out.codon.size());
    }
    return out;
}

/// (longest single-nucleotide run in a+b)^2 - 1.
inline int repetition_penalty(std::string_view codon_a, std::string_view codon_b) {
    const auto joined = normalize_rna(codon_a) + normalize_rna(codon_b);
    if (joined.size() != 6) throw ValidationError("repetition penalty takes two three-nucleotide codons");
    int best = 1;
    int run = 1;
    for (std::size_t k = 1; k < joined.size(); ++k) {
        run = joined[k] == joined[k - 1] ? run + 1 : 1;
        best = std::max(best, run);
    }
    return best * best - 1;
}

/// c_f * log(1 / C + epsilon_f).
inline double usage_cost(const CodonWeights& w, double frequency) {
    return w.c_f * std::log(1.0 / frequency + w.epsilon_f);
}

inline double gc_denominator(const CodonProblem& problem, const CodonLayout& lay) {
    return problem.gc_normalization == GcNormalization::nucleotide ? 3.0 * static_cast<double>(lay.length())
                                                                   : static_cast<double>(lay.num_vars());
}

/// c_GC * (k / D - rho_T)^2 for a total GC count k.
inline double gc_cost(const CodonProblem& problem, const CodonLayout& lay, int total_gc) {
    const double frac = static_cast<double>(total_gc) / gc_denominator(problem, lay);
    const double diff = frac - problem.weights.rho_target;
    return problem.weights.c_gc * diff * diff;
}

/// Codon choice (index within the amino acid's list) per position.
using Selection = std::vector<std::size_t>;

/// Objective of a selection evaluated straight from its definition.
inline double selection_energy(const CodonProblem& problem, const CodonLayout& lay, const Selection& sel) {
    if (sel.size() != lay.length()) throw DimensionError("selection length does not match protein length");
    double energy = 0.0;
    int gc = 0;
    for (std::size_t p = 0; p < sel.size(); ++p) {
        if (sel[p] >= lay.choices(p)) throw IndexError("codon choice out of range at position " + std::to_string(p));
        const auto i = lay.index(p, sel[p]);
        energy += usage_cost(problem.weights, lay.frequency[i]);
        gc += lay.gc_count[i];
        if (p + 1 < sel.size()) {
            energy += problem.weights.c_r * repetition_penalty(lay.codon[i], lay.codon[lay.index(p + 1, sel[p + 1])]);
        }
    }
    return energy + gc_cost(problem, lay, gc);
}

inline Bits selection_to_bits(const CodonLayout& lay, const Selection& sel) {
    Bits bits(lay.num_vars(), 0);
    for (std::size_t p = 0; p < sel.size(); ++p) bits[lay.index(p, sel[p])] = 1;
    return bits;
}

/// Selection encoded by a one-hot-feasible assignment.
inline Selection bits_to_selection(const CodonLayout& lay, BitsView bits) {
    if (bits.size() != lay.num_vars()) throw DimensionError("assignment length does not match codon layout");
    Selection sel(lay.length());
    for (std::size_t p = 0; p < lay.length(); ++p) {
        std::size_t chosen = 0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < lay.choices(p); ++i) {
            if (bits[lay.index(p, i)]) {
                chosen = i;
                ++count;
            }
        }
        if (count != 1) throw ValidationError("position " + std::to_string(p) + " does not select exactly one codon");
        sel[p] = chosen;
    }
    return sel;
}

inline std::string selection_sequence(const CodonLayout& lay, const Selection& sel) {
    std::string out;
    for (std::size_t p = 0; p < sel.size(); ++p) out += lay.codon[lay.index(p, sel[p])];
    return out;
}

/// Constrained QUBO: groups "H_f" (codon usage), "H_GC" (the rank-one part
/// c_GC/D^2 (sum s_i q_i)^2), "H_GC_linear" (-2 rho_T c_GC/D sum s_i q_i and
/// the constant c_GC rho_T^2) and "H_R" (adjacent-position repeats), plus
/// one one-hot constraint per amino-acid position.
inline QuboModel build_qubo_constrained(const CodonProblem& problem) {
    const auto lay = layout(problem);
    const auto& w = problem.weights;
    const std::size_t n = lay.num_vars();
    QuboModel model(n);
    for (auto g : {"H_f", "H_GC", "H_GC_linear", "H_R"}) model.group(g);

    for (std::size_t i = 0; i < n; ++i) model.add_term(i, i, usage_cost(w, lay.frequency[i]), "H_f");

    if (w.c_gc != 0.0) {
        const double d = gc_denominator(problem, lay);
        const double quad = w.c_gc / (d * d);
        for (std::size_t i = 0; i < n; ++i) {
            const double si = lay.gc_count[i];
            if (si == 0.0) continue;
            model.add_term(i, i, quad * si * si, "H_GC");
            model.add_term(i, i, -2.0 * w.rho_target * w.c_gc / d * si, "H_GC_linear");
            for (std::size_t j = i + 1; j < n; ++j) {
                if (lay.gc_count[j] != 0) model.add_term(i, j, 2.0 * quad * si * lay.gc_count[j], "H_GC");
            }
        }
        model.add_offset(w.c_gc * w.rho_target * w.rho_target, "H_GC_linear");
    }

    if (w.c_r != 0.0) {
        for (std::size_t p = 0; p + 1 < lay.length(); ++p) {
            for (std::size_t a = 0; a < lay.choices(p); ++a) {
                for (std::size_t b = 0; b < lay.choices(p + 1); ++b) {
                    const auto i = lay.index(p, a);
                    const auto j = lay.index(p + 1, b);
                    const int r = repetition_penalty(lay.codon[i], lay.codon[j]);
                    if (r != 0) model.add_term(i, j, w.c_r * r, "H_R");
                }
            }
        }
    }

    for (std::size_t p = 0; p < lay.length(); ++p) {
        std::vector<std::size_t> vars;
        for (std::size_t i = 0; i < lay.choices(p); ++i) vars.push_back(lay.index(p, i));
        model.add_constraint(Constraint::one_hot(vars, "position " + std::to_string(p) + " (" +
                                                               std::string(1, problem.protein[p]) + ")"));
    }
    return model;
}

enum class EmbeddingVariant { one_hot_square, fox };

inline std::string_view to_string(EmbeddingVariant v) noexcept {
    return v == EmbeddingVariant::one_hot_square ? "one_hot_square" : "fox";
}

inline EmbeddingVariant parse_embedding_variant(std::string_view name) {
    if (name == "one_hot_square") return EmbeddingVariant::one_hot_square;
    if (name == "fox") return EmbeddingVariant::fox;
    throw ConfigurationError("unknown embedding variant '" + std::string(name) + "'");
}

/// Constraint-free QUBO for solvers without native constraints.
///
/// one_hot_square adds mu (sum_position q - 1)^2 per position with
/// mu = 25 max_{i<=j} |Q_ij|. fox subtracts eps = 1.01 max_i |Q_ii| from
/// every diagonal and adds tau = 50 max_i |Q_ii| to each same-position codon
/// pair; its constant eps * L is kept in the offset so the penalty is zero on
/// feasible selections.
inline QuboModel build_qubo_embedded(const CodonProblem& problem, EmbeddingVariant variant) {
    auto constrained = build_qubo_constrained(problem);
    if (variant == EmbeddingVariant::one_hot_square) return embed_penalties(constrained, MultiplierRule{25.0, {}});

    const double max_diag = constrained.max_abs_diagonal();
    if (!(max_diag > 0.0)) throw ConfigurationError("fox embedding needs a nonzero diagonal to scale from");
    const double eps = 1.01 * max_diag;
    const double tau = 50.0 * max_diag;
    QuboModel out = constrained;
    out.clear_constraints();
    out.group(penalty_group);
    for (const auto& c : constrained.constraints()) {
        const auto vars = c.support();
        for (std::size_t a = 0; a < vars.size(); ++a) {
            out.add_term(vars[a], vars[a], -eps, penalty_group);
            for (std::size_t b = a + 1; b < vars.size(); ++b) out.add_term(vars[a], vars[b], tau, penalty_group);
        }
        out.add_offset(eps, penalty_group);
    }
    return out;
}

/// Linearized MIP: x_{p,i} codon choices, z_{p,i,j} transitions between
/// adjacent positions, g_k selectors of the total GC count k = 0..3L.
struct MipModel {
    lp::LinearModel linear;
    std::vector<std::vector<std::size_t>> x_var;
    std::vector<std::vector<std::vector<std::size_t>>> z_var;
    std::vector<std::size_t> g_var;

    /// Variable vector of a selection with the implied z and g.
    std::vector<double> point(const CodonLayout& lay, const Selection& sel) const {
        std::vector<double> values(linear.variables().size(), 0.0);
        int gc = 0;
        for (std::size_t p = 0; p < sel.size(); ++p) {
            values[x_var[p][sel[p]]] = 1.0;
            gc += lay.gc_count[lay.index(p, sel[p])];
            if (p + 1 < sel.size()) values[z_var[p][sel[p]][sel[p + 1]]] = 1.0;
        }
        values[g_var[static_cast<std::size_t>(gc)]] = 1.0;
        return values;
    }
};

inline MipModel build_mip(const CodonProblem& problem) {
    const auto lay = layout(problem);
    const auto& w = problem.weights;
    const std::size_t len = lay.length();
    MipModel mip;
    auto& m = mip.linear;

    mip.x_var.resize(len);
    for (std::size_t p = 0; p < len; ++p) {
        for (std::size_t i = 0; i < lay.choices(p); ++i) {
            const auto v = m.add_variable("x_" + std::to_string(p) + "_" + std::to_string(i), 0, 1, lp::VarType::binary);
            m.add_objective(v, usage_cost(w, lay.frequency[lay.index(p, i)]));
            mip.x_var[p].push_back(v);
        }
    }
    mip.z_var.resize(len > 0 ? len - 1 : 0);
    for (std::size_t p = 0; p + 1 < len; ++p) {
        mip.z_var[p].resize(lay.choices(p));
        for (std::size_t i = 0; i < lay.choices(p); ++i) {
            for (std::size_t j = 0; j < lay.choices(p + 1); ++j) {
                const auto v = m.add_variable("z_" + std::to_string(p) + "_" + std::to_string(i) + "_" + std::to_string(j),
                                              0, 1, lp::VarType::binary);
                m.add_objective(v, w.c_r * repetition_penalty(lay.codon[lay.index(p, i)], lay.codon[lay.index(p + 1, j)]));
                mip.z_var[p][i].push_back(v);
            }
        }
    }
    for (std::size_t k = 0; k <= 3 * len; ++k) {
        const auto v = m.add_variable("g_" + std::to_string(k), 0, 1, lp::VarType::binary);
        m.add_objective(v, gc_cost(problem, lay, static_cast<int>(k)));
        mip.g_var.push_back(v);
    }

    for (std::size_t p = 0; p < len; ++p) {
        lp::LinearConstraint c{"onehot_" + std::to_string(p), {}, Sense::eq, 1.0};
        for (auto v : mip.x_var[p]) c.terms.emplace_back(v, 1.0);
        m.add_constraint(std::move(c));
    }
    lp::LinearConstraint gsum{"gc_select", {}, Sense::eq, 1.0};
    lp::LinearConstraint channel{"gc_count", {}, Sense::eq, 0.0};
    for (std::size_t p = 0; p < len; ++p) {
        for (std::size_t i = 0; i < lay.choices(p); ++i) {
            const int s = lay.gc_count[lay.index(p, i)];
            if (s != 0) channel.terms.emplace_back(mip.x_var[p][i], static_cast<double>(s));
        }
    }
    for (std::size_t k = 0; k <= 3 * len; ++k) {
        gsum.terms.emplace_back(mip.g_var[k], 1.0);
        if (k != 0) channel.terms.emplace_back(mip.g_var[k], -static_cast<double>(k));
    }
    m.add_constraint(std::move(gsum));
    m.add_constraint(std::move(channel));
    for (std::size_t p = 0; p + 1 < len; ++p) {
        lp::LinearConstraint c{"transition_" + std::to_string(p), {}, Sense::eq, 1.0};
        for (const auto& row : mip.z_var[p]) {
            for (auto v : row) c.terms.emplace_back(v, 1.0);
        }
        m.add_constraint(std::move(c));
        for (std::size_t i = 0; i < lay.choices(p); ++i) {
            for (std::size_t j = 0; j < lay.choices(p + 1); ++j) {
                const auto z = mip.z_var[p][i][j];
                const auto tag = std::to_string(p) + "_" + std::to_string(i) + "_" + std::to_string(j);
                m.add_constraint({"zx_" + tag, {{z, 1.0}, {mip.x_var[p][i], -1.0}}, Sense::le, 0.0});
                m.add_constraint({"zy_" + tag, {{z, 1.0}, {mip.x_var[p + 1][j], -1.0}}, Sense::le, 0.0});
            }
        }
    }
    return mip;
}

/// Integer-decision model: y_p in [0, m_p) indexes cost tables; h_k selects
/// the total GC count through a channeling constraint.
struct CpModel {
    std::vector<std::size_t> domains;
    std::vector<std::vector<double>> unary_cost;
    std::vector<std::vector<std::vector<double>>> pair_cost;  // position p -> [y_p][y_{p+1}]
    std::vector<std::vector<int>> gc_count;
    std::vector<double> gc_cost;                              // k = 0..3L

    double objective(const Selection& y) const {
        if (y.size() != domains.size()) throw DimensionError("CP assignment length mismatch");
        double total = 0.0;
        int gc = 0;
        for (std::size_t p = 0; p < y.size(); ++p) {
            if (y[p] >= domains[p]) throw IndexError("CP value outside domain at position " + std::to_string(p));
            total += unary_cost[p][y[p]];
            gc += gc_count[p][y[p]];
            if (p + 1 < y.size()) total += pair_cost[p][y[p]][y[p + 1]];
        }
        return total + gc_cost[static_cast<std::size_t>(gc)];
    }
};

inline CpModel build_cp(const CodonProblem& problem) {
    const auto lay = layout(problem);
    CpModel cp;
    const std::size_t len = lay.length();
    for (std::size_t p = 0; p < len; ++p) {
        cp.domains.push_back(lay.choices(p));
        std::vector<double> costs;
        std::vector<int> gcs;
        for (std::size_t i = 0; i < lay.choices(p); ++i) {
            costs.push_back(usage_cost(problem.weights, lay.frequency[lay.index(p, i)]));
            gcs.push_back(lay.gc_count[lay.index(p, i)]);
        }
        cp.unary_cost.push_back(std::move(costs));
        cp.gc_count.push_back(std::move(gcs));
    }
    for (std::size_t p = 0; p + 1 < len; ++p) {
        std::vector<std::vector<double>> table(lay.choices(p), std::vector<double>(lay.choices(p + 1)));
        for (std::size_t i = 0; i < lay.choices(p); ++i) {
            for (std::size_t j = 0; j < lay.choices(p + 1); ++j) {
                table[i][j] = problem.weights.c_r *
                              repetition_penalty(lay.codon[lay.index(p, i)], lay.codon[lay.index(p + 1, j)]);
            }
        }
        cp.pair_cost.push_back(std::move(table));
    }
    for (std::size_t k = 0; k <= 3 * len; ++k) cp.gc_cost.push_back(gc_cost(problem, lay, static_cast<int>(k)));
    return cp;
}

/// JSON export: domains, cost tables and the GC channel
/// `sum_p gc[p][y_p] = sum_k k h_k`, `sum_k h_k = 1`.
inline nlohmann::json to_json(const CpModel& cp) {
    nlohmann::json doc;
    doc["format"] = "qubench-cp-1";
    doc["domains"] = cp.domains;
    doc["unary_cost"] = cp.unary_cost;
    doc["pair_cost"] = cp.pair_cost;
    doc["gc_count"] = cp.gc_count;
    doc["gc_cost"] = cp.gc_cost;
    doc["constraints"] = nlohmann::json::array(
            {{{"type", "gc_channel"}, {"expr", "sum_p gc_count[p][y_p] == sum_k k * h_k"}},
             {{"type", "exactly_one"}, {"expr", "sum_k h_k == 1"}}});
    doc["objective"] = "sum_p unary_cost[p][y_p] + sum_k gc_cost[k] * h_k + sum_p pair_cost[p][y_p][y_{p+1}]";
    return doc;
}

}  // namespace qubench::mrna
