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

// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 when
// any criterion fails or exceeds its time budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "qubench/qubench.hpp"
#include "support.hpp"

using namespace qubench;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

/// Record a failed check; the first failure message is kept.
void expect(Outcome& o, bool cond, const std::string& what) {
    if (cond) return;
    if (o.ok) o.detail = what;
    o.ok = false;
}

bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

QuboModel random_model(Rng& rng, std::size_t n, double density) {
    QuboModel m(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            if (uniform01(rng) < density) m.add_term(i, j, static_cast<double>(uniform_int(rng, -6, 6)));
        }
    }
    return m;
}

// 1
Outcome toy_ground_truth(double& timed) {
    Outcome o;
    const auto model = testing::toy_model();
    const auto start = std::chrono::steady_clock::now();
    const auto r = solvers::brute_force(model);
    timed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    expect(o, r.energy == -2.0, "energy " + format_double(r.energy));
    expect(o, r.assignment == Bits{1, 0}, "argmin is not (1,0)");
    o.detail = o.ok ? "E=-2 at (1,0)" : o.detail;
    return o;
}

// 2
Outcome repetition_values() {
    Outcome o;
    const int a = mrna::repetition_penalty("AUA", "UCG");
    const int b = mrna::repetition_penalty("CGG", "GGG");
    expect(o, a == 0, "AUA/UCG gave " + std::to_string(a));
    expect(o, b == 24, "CGG/GGG gave " + std::to_string(b));
    if (o.ok) o.detail = "AUA/UCG=0 CGG/GGG=24";
    return o;
}

struct CodonCase {
    mrna::CodonProblem problem;
    double optimum = 0.0;
};

std::vector<CodonCase> codon_cases() {
    // Brute-force enumeration caps the one-hot layout at 20 codon variables.
    Rng rng(20240611);
    std::vector<CodonCase> cases;
    for (int k = 0; k < 50; ++k) {
        CodonCase c;
        c.problem.protein = testing::random_protein(rng, 3, 8, 20);
        c.problem.weights = testing::random_weights(rng);
        cases.push_back(std::move(c));
    }
    return cases;
}

// 3
Outcome formulation_equivalence(std::vector<CodonCase>& cases) {
    Outcome o;
    double worst = 0.0;
    for (auto& c : cases) {
        const double bf = solvers::brute_force(mrna::build_qubo_constrained(c.problem)).energy;
        const double mip = solvers::solve_mip_enumeration(c.problem).energy;
        const double cp = solvers::solve_cp_enumeration(c.problem).energy;
        const double dp = solvers::dp_codon_exact(c.problem).energy;
        for (double v : {mip, cp, dp}) worst = std::max(worst, std::abs(v - bf));
        expect(o, close(mip, bf, 1e-9) && close(cp, bf, 1e-9) && close(dp, bf, 1e-9),
               "disagreement on " + c.problem.protein);
        c.optimum = bf;
    }
    o.detail = (o.ok ? "" : o.detail + "; ") + "50 proteins, max gap " + format_double(worst);
    return o;
}

// 4
Outcome embedding_exactness(const std::vector<CodonCase>& cases) {
    Outcome o;
    double worst = 0.0;
    for (const auto& c : cases) {
        const auto embedded = mrna::build_qubo_embedded(c.problem, mrna::EmbeddingVariant::one_hot_square);
        const auto r = solvers::brute_force(embedded);
        const auto constrained = mrna::build_qubo_constrained(c.problem);
        const bool feasible = check_feasible(constrained, r.assignment).feasible;
        expect(o, feasible, "embedded argmin infeasible on " + c.problem.protein);
        if (!feasible) continue;
        const double stripped = evaluate(constrained, r.assignment);
        worst = std::max(worst, std::abs(stripped - c.optimum));
        expect(o, close(stripped, c.optimum, 1e-9), "stripped energy off on " + c.problem.protein);
    }
    o.detail = (o.ok ? "" : o.detail + "; ") + "max gap " + format_double(worst);
    return o;
}

// 5
Outcome encoding_coverage() {
    Outcome o;
    Rng rng(5);
    std::size_t pairs = 0;
    for (std::int64_t l = -8; l <= 8; ++l) {
        for (std::int64_t d = 0; d <= 64; ++d) {
            const std::int64_t u = l + d;
            for (auto scheme : {EncodingScheme::unary, EncodingScheme::log}) {
                const auto enc = make_encoding(scheme, l, u);
                const std::size_t nb = enc.num_bits();
                std::set<std::int64_t> image;
                if (nb <= 10) {
                    for (std::uint64_t code = 0; code < (std::uint64_t{1} << nb); ++code) {
                        image.insert(decode(enc, testing::to_bits(code, nb)));
                    }
                } else {
                    // Too many patterns: every prefix of ones plus 2^10 random patterns.
                    for (std::size_t ones = 0; ones <= nb; ++ones) {
                        Bits x(nb, 0);
                        for (std::size_t k = 0; k < ones; ++k) x[k] = 1;
                        image.insert(decode(enc, x));
                    }
                    for (int k = 0; k < 1024; ++k) {
                        Bits x(nb);
                        for (auto& b : x) b = static_cast<std::uint8_t>(uniform_below(rng, 2));
                        image.insert(decode(enc, x));
                    }
                }
                const bool exact = image.size() == static_cast<std::size_t>(d + 1) && *image.begin() == l &&
                                   *image.rbegin() == u;
                expect(o, exact, "image mismatch for " + std::string(to_string(scheme)) + " [" + std::to_string(l) +
                                     "," + std::to_string(u) + "]");
                if (scheme == EncodingScheme::log && d > 0) {
                    const auto expected = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(d)))) + 1;
                    expect(o, nb == expected, "log bit count for d=" + std::to_string(d));
                }
                if (scheme == EncodingScheme::unary) expect(o, nb == static_cast<std::size_t>(d), "unary bit count");
            }
            ++pairs;
        }
    }
    o.detail = (o.ok ? "" : o.detail + "; ") + std::to_string(pairs) + " bound pairs";
    return o;
}

// 6
Outcome crn_dual_oracle() {
    Outcome o;
    Rng rng(606);
    std::size_t feasible = 0;
    for (int k = 0; k < 25; ++k) {
        const auto net = testing::random_tiny_network(rng, 4);
        const auto ip = crn::build_ip(net);
        std::optional<double> exact;
        try {
            const auto r = solvers::solve_ip_exhaustive(ip);
            exact = r.energy;
            const auto res = ip.balance_residual(r.values);
            expect(o, std::all_of(res.begin(), res.end(), [](auto v) { return v == 0; }), "IP residual nonzero");
            ++feasible;
        } catch (const NoFeasibleSolution&) {
        }
        for (auto scheme : {EncodingScheme::unary, EncodingScheme::log}) {
            const auto q = crn::build_qubo(net, scheme);
            try {
                const auto r = solvers::brute_force(q.model);
                expect(o, exact.has_value(), "QUBO feasible where IP is not");
                if (exact) expect(o, close(r.energy, *exact, 1e-9), "optimum mismatch on network " + std::to_string(k));
                const auto x = q.quantities(r.assignment);
                const auto res = ip.balance_residual(x);
                expect(o, std::all_of(res.begin(), res.end(), [](auto v) { return v == 0; }), "QUBO residual nonzero");
                expect(o, close(ip.objective(x), r.energy, 1e-9), "QUBO energy differs from objective");
            } catch (const NoFeasibleSolution&) {
                expect(o, !exact.has_value(), "QUBO infeasible where IP is feasible");
            }
        }
    }
    o.detail = (o.ok ? "" : o.detail + "; ") + "25 networks, " + std::to_string(feasible) + " feasible";
    return o;
}

// 7
Outcome heuristic_quality() {
    Outcome o;
    std::vector<std::pair<std::string, QuboModel>> instances;
    instances.emplace_back("toy", testing::toy_model());
    Rng rng(707);
    instances.emplace_back("random12", random_model(rng, 12, 0.5));
    instances.emplace_back("random20", random_model(rng, 20, 0.3));
    mrna::CodonProblem lgw;
    lgw.protein = "LGW";
    instances.emplace_back("LGW", mrna::build_qubo_constrained(lgw));
    mrna::CodonProblem mkf;
    mkf.protein = "MKFYC";
    instances.emplace_back("MKFYC", mrna::build_qubo_constrained(mkf));

    std::string rates;
    for (const auto& [name, model] : instances) {
        const double opt = solvers::brute_force(model).energy;
        int sa = 0;
        int da = 0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto a = solvers::simulated_annealing(model, seed);
            sa += a.feasible && close(a.energy, opt, 1e-6);
            const auto b = solvers::da_sweep_solver(model, seed);
            da += b.feasible && close(b.energy, opt, 1e-6);
        }
        expect(o, sa >= 95, "SA " + std::to_string(sa) + "/100 on " + name);
        expect(o, da >= 95, "DA " + std::to_string(da) + "/100 on " + name);
        rates += " " + name + " " + std::to_string(sa) + "/" + std::to_string(da);
    }
    for (int k = 0; k < 50; ++k) {
        const auto m = random_model(rng, 40, 0.2);
        Bits x(40);
        for (auto& b : x) b = static_cast<std::uint8_t>(uniform_below(rng, 2));
        double last = evaluate(m, x);
        bool monotone = true;
        solvers::steepest_descent(m, x, 1'000'000, [&](double e) {
            monotone = monotone && e <= last;
            last = e;
        });
        expect(o, monotone, "steepest descent increased energy");
    }
    o.detail = (o.ok ? "" : o.detail + "; ") + "SA/DA hits:" + rates;
    return o;
}

// 8
Outcome metrics_hand_checks() {
    Outcome o;
    struct Case {
        QuboModel model;
        double density;
        double interconnectivity;
    };
    std::vector<Case> cases;
    cases.push_back({testing::toy_model(), 1.0, 1.0});
    QuboModel diag(4);
    for (std::size_t i = 0; i < 4; ++i) diag.add_term(i, i, 1.0 + static_cast<double>(i));
    cases.push_back({diag, 0.25, 0.25});
    QuboModel coupled(3);
    coupled.add_term(2, 2, 1.0);
    const std::vector<std::pair<std::size_t, double>> pair{{0, 1.0}, {1, 1.0}};
    coupled.add_constraint(Constraint::linear(pair, Sense::le, 1.0));
    cases.push_back({coupled, 1.0 / 9.0, 5.0 / 9.0});
    cases.push_back({QuboModel(3), 0.0, 0.0});
    QuboModel mixed(4);
    mixed.add_term(0, 1, 1.0);
    mixed.add_term(2, 2, 1.0);
    mixed.add_constraint(Constraint::one_hot(std::vector<std::size_t>{1, 2, 3}));
    cases.push_back({mixed, 3.0 / 16.0, 11.0 / 16.0});
    for (std::size_t k = 0; k < cases.size(); ++k) {
        expect(o, close(metrics::density(cases[k].model), cases[k].density, 1e-12),
               "density of model " + std::to_string(k + 1));
        expect(o, close(metrics::interconnectivity(cases[k].model), cases[k].interconnectivity, 1e-12),
               "interconnectivity of model " + std::to_string(k + 1));
    }

    Rng rng(808);
    for (int k = 0; k < 30; ++k) {
        mrna::CodonProblem p;
        p.protein = testing::random_protein(rng, 1, 12, 200);
        p.weights = testing::random_weights(rng);
        if (k % 2) p.gc_normalization = mrna::GcNormalization::paper_faithful;
        const auto q = mrna::build_qubo_constrained(p);
        expect(o, metrics::detect_rank_one(q, "H_GC").is_rank_one, "H_GC not rank one for " + p.protein);
        const auto fox = mrna::build_qubo_embedded(p, mrna::EmbeddingVariant::fox);
        expect(o, metrics::detect_rank_one(fox, "H_GC").is_rank_one, "embedded H_GC not rank one");
    }
    QuboModel counter(2);
    counter.add_term(0, 1, 1.0, "g");
    expect(o, !metrics::detect_rank_one(counter, "g").is_rank_one, "counterexample detected as rank one");
    if (o.ok) o.detail = "5 hand models, 60 H_GC groups, counterexample rejected";
    return o;
}

// 9
Outcome incremental_fields() {
    Outcome o;
    Rng rng(909);
    std::size_t sweeps = 0;
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const auto m = random_model(rng, 50, 0.2);
        solvers::DaOptions opts;
        opts.on_sweep = [&](std::size_t, BitsView x, std::span<const double> h) {
            for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(h[i] - local_field(m, x, i)));
            ++sweeps;
        };
        solvers::da_sweep_solver(m, static_cast<std::uint64_t>(k), opts);
    }
    expect(o, worst <= 1e-9, "field drift " + format_double(worst));
    o.detail = (o.ok ? "" : o.detail + "; ") + std::to_string(sweeps) + " sweeps, max drift " + format_double(worst);
    return o;
}

bench::BenchRecord record(std::string instance, double energy, double time, std::size_t n = 0) {
    bench::BenchRecord r;
    r.instance = std::move(instance);
    r.solver = "s";
    r.energy = energy;
    r.time_seconds = time;
    r.feasible = true;
    r.num_vars = n;
    return r;
}

// 10
Outcome aggregation() {
    Outcome o;
    const auto s = bench::summarize({record("a", 132, 1.0), record("b", 133, 3.0)}).at("s");
    expect(o, s.ac == 132.5 && s.atts == 2.0 && s.stts == 1.0 && s.mtts == 3.0, "summary of {1,3} / {132,133}");
    const auto one = bench::summarize({record("a", 4, 2.5)}).at("s");
    expect(o, one.stts == 0.0 && one.atts == 2.5 && one.mtts == 2.5, "single-record summary");
    const auto rep = bench::summarize({record("a", 10, 1.0), record("a", 8, 2.0), record("b", 5, 6.0)}).at("s");
    expect(o, rep.ac == 6.5 && rep.atts == 3.0 && rep.mtts == 6.0, "repeat summary");
    expect(o, close(rep.stts, std::sqrt(14.0 / 3.0), 1e-15), "repeat STTS");

    std::vector<bench::BenchRecord> line;
    for (std::size_t n = 10; n <= 100; n += 10) line.push_back(record("i" + std::to_string(n), 0, 0.003 * n + 0.25, n));
    const auto plot = bench::scaling_plot(line);
    const auto& fit = plot.series.at(0).linear;
    expect(o, fit.has_value(), "no linear fit");
    if (fit) {
        expect(o, std::abs(fit->slope - 0.003) <= 1e-6 * 0.003, "slope " + format_double(fit->slope));
        expect(o, std::abs(fit->intercept - 0.25) <= 1e-6 * 0.25, "intercept " + format_double(fit->intercept));
    }
    if (o.ok) o.detail = "hand summaries exact, slope/intercept recovered";
    return o;
}

// 11
Outcome dataset_echo() {
    Outcome o;
    std::string sizes;
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto net = crn::generate_artificial({100, 10, seed});
        const auto n = crn::build_qubo(net, EncodingScheme::unary).model.num_vars();
        expect(o, n >= 5000 && n <= 50000, "size " + std::to_string(n) + " for seed " + std::to_string(seed));
        sizes += " " + std::to_string(n);
    }
    o.detail = (o.ok ? "" : o.detail + "; ") + "unary sizes" + sizes;
    return o;
}

}  // namespace

int main() {
    std::vector<CodonCase> cases = codon_cases();
    struct Criterion {
        int id;
        const char* name;
        double budget;
        std::function<Outcome(double&)> run;
    };
    const std::vector<Criterion> criteria{
        {1, "toy QUBO ground truth", 1e-3, [](double& t) { return toy_ground_truth(t); }},
        {2, "repetition values", 1.0, [](double&) { return repetition_values(); }},
        {3, "formulation equivalence", 60.0, [&](double&) { return formulation_equivalence(cases); }},
        {4, "penalty embedding exactness", 60.0, [&](double&) { return embedding_exactness(cases); }},
        {5, "encoding coverage", 10.0, [](double&) { return encoding_coverage(); }},
        {6, "CRN dual oracle", 120.0, [](double&) { return crn_dual_oracle(); }},
        {7, "heuristic quality", 300.0, [](double&) { return heuristic_quality(); }},
        {8, "metrics hand checks", 5.0, [](double&) { return metrics_hand_checks(); }},
        {9, "incremental fields", 30.0, [](double&) { return incremental_fields(); }},
        {10, "aggregation arithmetic", 5.0, [](double&) { return aggregation(); }},
        {11, "dataset size echo", 60.0, [](double&) { return dataset_echo(); }},
    };

    int failures = 0;
    for (const auto& c : criteria) {
        double timed = -1.0;
        Outcome outcome;
        const auto start = std::chrono::steady_clock::now();
        try {
            outcome = c.run(timed);
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const double measured = timed >= 0.0 ? timed : wall;
        if (measured > c.budget) {
            outcome.ok = false;
            outcome.detail += "; over time budget";
        }
        failures += !outcome.ok;
        std::printf("%s %2d %-28s %10.4fs (limit %gs)  %s\n", outcome.ok ? "PASS" : "FAIL", c.id, c.name, measured,
                    c.budget, outcome.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
