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

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "qubench/bench.hpp"
#include "support.hpp"

using namespace qubench;
using namespace qubench::bench;
using Catch::Approx;

namespace {

BenchRecord record(std::string instance, std::string solver, double energy, double time, bool feasible = true) {
    BenchRecord r;
    r.instance = std::move(instance);
    r.solver = std::move(solver);
    r.energy = energy;
    r.time_seconds = time;
    r.feasible = feasible;
    return r;
}

BenchRecord point(std::string solver, std::size_t n, double time, bool reached = true) {
    BenchRecord r = record("i" + std::to_string(n), std::move(solver), 0.0, time);
    r.num_vars = n;
    r.optimal_known = 0.0;
    r.reached_optimal = reached;
    return r;
}

BenchInstance toy_instance() {
    return {"toy", [] { return testing::toy_model(); }, std::nullopt, -2.0};
}

BenchInstance constrained_instance() {
    return {"onehot",
            [] {
                QuboModel m(3);
                m.add_term(0, 0, 1);
                m.add_term(1, 1, -1);
                m.add_term(2, 2, 2);
                m.add_constraint(Constraint::one_hot(std::vector<std::size_t>{0, 1, 2}));
                return m;
            },
            std::nullopt, -1.0};
}

}  // namespace

TEST_CASE("run matrix layout and seeds") {
    const std::vector<BenchInstance> instances{toy_instance(), constrained_instance()};
    const std::vector<SolverSpec> specs{{"brute"}, {"sa"}};
    BenchConfig config;
    config.master_seed = 11;
    const auto records = run_matrix(instances, specs, config);
    REQUIRE(records.size() == 4);
    CHECK(records[0].instance == "toy");
    CHECK(records[0].solver == "brute");
    CHECK(records[1].solver == "sa");
    CHECK(records[2].instance == "onehot");
    for (const auto& r : records) {
        CHECK_FALSE(r.skipped);
        CHECK(r.reached_optimal);
        CHECK(r.time_seconds >= 0.0);
    }
    CHECK(records[3].num_vars == 3);

    config.repeats = 3;
    const auto repeated = run_matrix({toy_instance()}, {{"sa"}}, config);
    REQUIRE(repeated.size() == 3);
    std::set<std::uint64_t> seeds;
    for (const auto& r : repeated) seeds.insert(r.seed);
    CHECK(seeds.size() == 3);
    CHECK(repeated[1].seed == cell_seed(11, 0, 0, 1));

    config.workers = 4;
    const auto parallel = run_matrix({toy_instance()}, {{"sa"}}, config);
    for (std::size_t k = 0; k < 3; ++k) {
        CHECK(parallel[k].seed == repeated[k].seed);
        CHECK(parallel[k].energy == repeated[k].energy);
    }
}

TEST_CASE("run matrix skips") {
    BenchConfig config;
    SolverSpec raw{"sa"};
    raw.embed_constraints = false;
    SolverSpec tiny{"brute"};
    tiny.brute_cap = 2;
    const auto records = run_matrix({constrained_instance()}, {raw, {"dp"}, tiny, {"pt"}}, config);
    REQUIRE(records.size() == 4);
    CHECK(records[0].skipped);
    CHECK_THAT(records[0].reason, Catch::Matchers::ContainsSubstring("constraints"));
    CHECK(records[1].skipped);
    CHECK_THAT(records[1].reason, Catch::Matchers::ContainsSubstring("codon"));
    CHECK(records[2].skipped);
    CHECK_THAT(records[2].reason, Catch::Matchers::ContainsSubstring("cap"));
    CHECK_FALSE(records[3].skipped);
    CHECK(records[3].feasible);

    const BenchInstance empty{"empty",
                              [] {
                                  QuboModel m(1);
                                  m.add_constraint(Constraint::one_hot(std::vector<std::size_t>{}));
                                  return m;
                              },
                              std::nullopt, std::nullopt};
    const auto none = run_matrix({empty}, {{"brute"}}, config);
    CHECK(none[0].skipped);
    CHECK_THAT(none[0].reason, Catch::Matchers::ContainsSubstring("no feasible"));

    CHECK_THROWS_AS(run_matrix({toy_instance()}, {{"gurobi"}}, config), ConfigurationError);
    config.repeats = 0;
    CHECK_THROWS_AS(run_matrix({toy_instance()}, {{"sa"}}, config), ConfigurationError);

    const auto csv = skipped_csv(records);
    CHECK(csv.rfind("instance,num_vars,solver,seed,reason\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    const auto kept = records_csv(records);
    CHECK(std::count(kept.begin(), kept.end(), '\n') == 2);
}

TEST_CASE("codon instances run the dp solver") {
    mrna::CodonProblem p;
    p.protein = "MKW";
    BenchInstance inst{"mkw", [p] { return mrna::build_qubo_constrained(p); }, p, std::nullopt};
    const auto records = run_matrix({inst}, {{"dp"}, {"brute"}}, {});
    REQUIRE_FALSE(records[0].skipped);
    CHECK(records[0].energy == Approx(records[1].energy).margin(1e-9));
}

TEST_CASE("summary statistics") {
    const std::vector<BenchRecord> two{record("a", "sa", 132, 1.0), record("b", "sa", 133, 3.0)};
    const auto s = summarize(two).at("sa");
    CHECK(s.atts == 2.0);
    CHECK(s.mtts == 3.0);
    CHECK(s.stts == 1.0);
    CHECK(s.ac == 132.5);
    CHECK(s.runs == 2);
    CHECK(s.instances == 2);

    CHECK(summarize({record("a", "sa", 5, 4.0)}).at("sa").stts == 0.0);
    CHECK_THROWS_AS(summarize({}), ValidationError);
    auto skipped = record("a", "sa", 5, 4.0);
    skipped.skipped = true;
    CHECK_THROWS_AS(summarize({skipped}), ValidationError);
    CHECK_THROWS_AS(summarize(two).at("da"), ValidationError);
}

TEST_CASE("summary prefers feasible runs for accuracy") {
    const std::vector<BenchRecord> runs{record("a", "sa", -10, 1.0, false), record("a", "sa", 4, 1.0),
                                        record("a", "sa", 2, 1.0), record("b", "sa", 7, 1.0, false),
                                        record("b", "sa", 9, 1.0, false)};
    CHECK(summarize(runs).at("sa").ac == Approx((2.0 + 7.0) / 2.0));
}

TEST_CASE("summary ignores record order") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<BenchRecord> records;
    for (int k = 0; k < 40; ++k) {
        records.push_back(record("i" + std::to_string(k % 5), k % 3 == 0 ? "da" : "sa", std::round(u(rng)), u(rng),
                                 k % 7 != 0));
    }
    const auto base = summary_csv(summarize(records));
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(records.begin(), records.end(), rng);
        const auto again = summarize(records);
        REQUIRE(summary_csv(again) == base);
    }
    CHECK(base.rfind("solver,AC,ATTS,STTS,MTTS\n", 0) == 0);
}

TEST_CASE("least squares") {
    CHECK_FALSE(least_squares({}));
    CHECK_FALSE(least_squares({{1, 2}}));
    CHECK_FALSE(least_squares({{1, 2}, {1, 3}}));
    const auto f = least_squares({{1, 5}, {2, 7}, {4, 11}});
    REQUIRE(f);
    CHECK(f->slope == Approx(2.0));
    CHECK(f->intercept == Approx(3.0));
    CHECK(f->residual == Approx(0.0).margin(1e-12));
}

TEST_CASE("scaling fits") {
    std::vector<BenchRecord> records;
    for (std::size_t n : {10, 20, 30, 40, 50}) {
        records.push_back(point("line", n, 0.01 * static_cast<double>(n) + 0.5));
        records.push_back(point("exp", n, 1e-3 * std::exp(0.1 * static_cast<double>(n))));
        records.push_back(point("miss", n, 1.0, false));
    }
    records.push_back(point("line", 60, 100.0, false));
    const auto plot = scaling_plot(records);
    REQUIRE(plot.series.size() == 3);
    CHECK_FALSE(plot.missing_reference);

    const auto find = [&](std::string_view name) -> const SeriesFit& {
        for (const auto& s : plot.series) {
            if (s.solver == name) return s;
        }
        FAIL("missing series");
        throw;
    };
    const auto& line = find("line");
    REQUIRE(line.linear);
    CHECK(line.linear->slope == Approx(0.01));
    CHECK(line.linear->intercept == Approx(0.5));
    CHECK(line.chosen == "linear");
    CHECK(line.points.size() == 6);
    CHECK_FALSE(line.points.back().filled);

    const auto& ex = find("exp");
    REQUIRE(ex.exponential);
    CHECK(ex.exponential->slope == Approx(0.1));
    CHECK(ex.exponential->intercept == Approx(std::log(1e-3)));
    CHECK(ex.chosen == "exponential");
    CHECK(ex.predict(70) == Approx(1e-3 * std::exp(7.0)));

    const auto& miss = find("miss");
    CHECK_FALSE(miss.linear);
    CHECK_FALSE(miss.exponential);
    CHECK(miss.chosen.empty());

    CHECK(plot.points_csv.rfind("solver,num_vars,time_seconds,filled\n", 0) == 0);
    CHECK(std::count(plot.points_csv.begin(), plot.points_csv.end(), '\n') == 17);
    CHECK(plot.fits_csv.rfind("solver,model,slope,intercept,residual,chosen\n", 0) == 0);
    CHECK(std::count(plot.fits_csv.begin(), plot.fits_csv.end(), '\n') == 5);
    CHECK(plot.svg.rfind("<svg", 0) == 0);
    CHECK(plot.svg.find("</svg>") != std::string::npos);
    CHECK(plot.svg.find("fill=\"none\"/>") != std::string::npos);

    auto unknown = point("line", 5, 1.0);
    unknown.optimal_known.reset();
    unknown.reached_optimal = false;
    records.push_back(unknown);
    const auto marked = scaling_plot(records);
    CHECK(marked.missing_reference);
    CHECK(marked.series[1].points.front().filled);
}

TEST_CASE("timing scope names") {
    CHECK(parse_timing_scope("solve_only") == TimingScope::solve_only);
    CHECK(to_string(TimingScope::build_and_solve) == "build_and_solve");
    CHECK_THROWS_AS(parse_timing_scope("wall"), ConfigurationError);
}
