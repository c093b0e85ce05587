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
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qubench/crn.hpp"
#include "qubench/errors.hpp"
#include "qubench/mrna.hpp"
#include "qubench/penalty.hpp"
#include "qubench/qubo.hpp"
#include "qubench/random.hpp"

namespace qubench::solvers {

struct SolveResult {
    std::string solver;
    std::uint64_t seed = 0;
    Bits assignment;
    std::vector<std::int64_t> values;  // integer solution (CRN quantities, codon choices)
    double energy = 0.0;
    bool feasible = true;
    std::vector<std::string> violations;
    double time_seconds = 0.0;
    std::size_t iterations = 0;
    std::size_t stalled_sweeps = 0;
    bool timed_out = false;
};

inline nlohmann::json to_json(const SolveResult& r) {
    nlohmann::json doc;
    doc["solver"] = r.solver;
    doc["seed"] = r.seed;
    doc["energy"] = r.energy;
    doc["feasible"] = r.feasible;
    doc["violations"] = r.violations;
    doc["time_seconds"] = r.time_seconds;
    if (!r.assignment.empty() || r.values.empty()) {
        auto bits = nlohmann::json::array();
        for (auto b : r.assignment) bits.push_back(static_cast<int>(b));
        doc["assignment"] = std::move(bits);
    } else {
        doc["assignment"] = r.values;
    }
    if (!r.values.empty() && !r.assignment.empty()) doc["values"] = r.values;
    doc["iterations"] = r.iterations;
    doc["timed_out"] = r.timed_out;
    return doc;
}

/// Geometric cooling T_{k+1} = alpha T_k from t0 down to t_final.
struct AnnealSchedule {
    double t0 = 1.0;
    double t_final = 1e-3;
    double alpha = 0.98;
    std::size_t sweeps_per_temp = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(t0 > 0.0) || !std::isfinite(t0)) throw ConfigurationError("initial temperature must be positive");
        if (!(t_final > 0.0)) throw ConfigurationError("final temperature must be positive");
        if (!(t_final < t0)) throw ConfigurationError("final temperature must be below the initial temperature");
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigurationError("cooling factor must lie strictly inside (0, 1)");
    }

    std::size_t num_levels() const {
        validate();
        std::size_t levels = 0;
        for (double t = t0; t >= t_final * (1.0 - 1e-12); t *= alpha) ++levels;
        return levels;
    }

    double temperature(std::size_t level) const { return t0 * std::pow(alpha, static_cast<double>(level)); }
};

/// Probability 1 / (1 + exp(dE / T)).
inline double sa_acceptance(double delta, double temperature) noexcept {
    const double z = delta / temperature;
    if (z > 700.0) return 0.0;
    if (z < -700.0) return 1.0;
    return 1.0 / (1.0 + std::exp(z));
}

/// Probability min(1, exp(-dE / T)).
inline double da_acceptance(double delta, double temperature) noexcept {
    if (delta <= 0.0) return 1.0;
    return std::exp(-delta / temperature);
}

/// Replica exchange probability min(1, exp((1/T_a - 1/T_b)(E_a - E_b))).
inline double exchange_probability(double t_a, double t_b, double e_a, double e_b) noexcept {
    const double z = (1.0 / t_a - 1.0 / t_b) * (e_a - e_b);
    return z >= 0.0 ? 1.0 : std::exp(z);
}

namespace detail {

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

class Deadline {
 public:
    explicit Deadline(double limit_seconds) {
        if (limit_seconds > 0.0) {
            end_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(limit_seconds));
        }
    }
    bool expired() const { return end_ && Clock::now() >= *end_; }

 private:
    std::optional<Clock::time_point> end_;
};

/// The quadratic form the heuristics search: the model itself, or its
/// penalty embedding when it carries constraints.
inline CompiledQubo search_form(const QuboModel& model) {
    if (model.constraints().empty()) return CompiledQubo(model);
    return CompiledQubo(embed_penalties(model));
}

inline std::vector<std::string> violation_labels(const QuboModel& model, const FeasibilityReport& report) {
    std::vector<std::string> out;
    for (const auto& status : report.constraints) {
        if (status.satisfied) continue;
        const auto& label = model.constraints()[status.index].label();
        out.push_back(label.empty() ? "constraint " + std::to_string(status.index) : label);
    }
    return out;
}

/// Energy and feasibility are always re-evaluated on the original model.
inline SolveResult finish(const QuboModel& model, std::string solver, std::uint64_t seed, Bits x, double seconds) {
    SolveResult r;
    r.solver = std::move(solver);
    r.seed = seed;
    r.energy = evaluate(model, x);
    const auto report = check_feasible(model, x);
    r.feasible = report.feasible;
    r.violations = violation_labels(model, report);
    r.assignment = std::move(x);
    r.time_seconds = seconds;
    return r;
}

inline Bits random_bits(Rng& rng, std::size_t n) {
    Bits x(n);
    for (auto& b : x) b = static_cast<std::uint8_t>(uniform_below(rng, 2));
    return x;
}

inline bool lexicographically_less(BitsView a, BitsView b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace detail

/// Default schedule: T0 makes the mean uphill move of 100 random flips from
/// a random assignment acceptable with probability 0.8 under exp(-dE/T0);
/// T_f = 1e-3 T0, alpha = 0.98, one sweep per temperature.
inline AnnealSchedule automatic_schedule(const QuboModel& model, std::uint64_t seed) {
    const auto q = detail::search_form(model);
    AnnealSchedule s;
    s.seed = seed;
    const std::size_t n = q.num_vars();
    double uphill = 0.0;
    std::size_t count = 0;
    double magnitude = 0.0;
    std::size_t nonzero = 0;
    if (n > 0) {
        Rng rng(derive_seed(seed, 0x5eed));
        const auto x = detail::random_bits(rng, n);
        for (int k = 0; k < 100; ++k) {
            const double d = q.flip_delta(x, uniform_below(rng, n));
            if (d > 0.0) {
                uphill += d;
                ++count;
            }
            if (d != 0.0) {
                magnitude += std::abs(d);
                ++nonzero;
            }
        }
    }
    double mean = count > 0 ? uphill / static_cast<double>(count)
                            : (nonzero > 0 ? magnitude / static_cast<double>(nonzero) : 1.0);
    s.t0 = mean / std::log(1.0 / 0.8);
    s.t_final = 1e-3 * s.t0;
    s.alpha = 0.98;
    s.sweeps_per_temp = 1;
    return s;
}

/// Default schedule for da_sweep_solver: as automatic_schedule but with
/// clamp(n, 1, 200) single-flip sweeps per temperature.
inline AnnealSchedule automatic_da_schedule(const QuboModel& model, std::uint64_t seed) {
    auto s = automatic_schedule(model, seed);
    s.sweeps_per_temp = std::clamp<std::size_t>(model.num_vars(), 1, 200);
    return s;
}

struct BruteForceOptions {
    std::size_t max_vars = 24;
};

/// Exhaustive Gray-code enumeration. Constraints are honored exactly;
/// ties go to the lexicographically smallest assignment.
inline SolveResult brute_force(const QuboModel& model, const BruteForceOptions& options = {}) {
    const auto start = detail::Clock::now();
    const std::size_t n = model.num_vars();
    if (n > options.max_vars) {
        throw BudgetExceeded("brute force limited to " + std::to_string(options.max_vars) + " variables, model has " +
                             std::to_string(n));
    }
    if (n >= 63) throw BudgetExceeded("brute force cannot enumerate 2^" + std::to_string(n) + " assignments");
    const CompiledQubo q(model);
    const auto& cons = model.constraints();
    std::vector<CompiledQubo> con_forms;
    std::vector<double> lhs;
    std::vector<std::vector<std::size_t>> touching(n);
    Bits x(n, 0);
    for (std::size_t c = 0; c < cons.size(); ++c) {
        con_forms.push_back(CompiledQubo::from_constraint(n, cons[c]));
        lhs.push_back(cons[c].lhs(x));
        for (auto v : cons[c].support()) touching[v].push_back(c);
    }
    std::size_t violated = 0;
    for (std::size_t c = 0; c < cons.size(); ++c) violated += cons[c].violation(lhs[c]) > feasibility_tolerance;

    std::vector<double> h(n);
    q.local_fields(x, h);
    double energy = q.offset();
    std::optional<Bits> best;
    double best_energy = std::numeric_limits<double>::infinity();
    const auto consider = [&] {
        if (violated != 0) return;
        const double tol = 1e-9 * std::max(1.0, std::abs(best_energy));
        if (!best || energy < best_energy - tol) {
            best = x;
            best_energy = energy;
        } else if (std::abs(energy - best_energy) <= tol && detail::lexicographically_less(x, *best)) {
            best = x;
            best_energy = std::min(best_energy, energy);
        }
    };
    consider();
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t t = 1; t < total; ++t) {
        const auto k = static_cast<std::size_t>(std::countr_zero(t));
        for (auto c : touching[k]) {
            const bool was = cons[c].violation(lhs[c]) > feasibility_tolerance;
            const double f = con_forms[c].local_field(x, k);
            lhs[c] += x[k] ? -f : f;
            const bool now = cons[c].violation(lhs[c]) > feasibility_tolerance;
            violated = violated - was + now;
        }
        energy += x[k] ? -h[k] : h[k];
        q.apply_flip(x, h, k);
        if ((t & 4095U) == 0) {
            energy = q.energy(x);
            q.local_fields(x, h);
            for (auto c = std::size_t{0}; c < cons.size(); ++c) lhs[c] = cons[c].lhs(x);
        }
        consider();
    }
    if (!best) throw NoFeasibleSolution("no assignment satisfies every constraint");
    auto r = detail::finish(model, "brute", 0, std::move(*best), detail::seconds_since(start));
    r.iterations = static_cast<std::size_t>(total);
    return r;
}

struct DpOptions {
    double work_budget = 1e9;
};

/// Exact codon selection by dynamic programming over (position, codon,
/// cumulative GC count); the GC cost is added at the terminal count.
inline SolveResult dp_codon_exact(const mrna::CodonProblem& problem, const DpOptions& options = {}) {
    const auto start = detail::Clock::now();
    const auto lay = mrna::layout(problem);
    const std::size_t len = lay.length();
    std::size_t max_m = 0;
    for (std::size_t p = 0; p < len; ++p) max_m = std::max(max_m, lay.choices(p));
    const std::size_t kmax = 3 * len;
    const double work = static_cast<double>(len) * static_cast<double>(kmax + 1) * static_cast<double>(max_m * max_m);
    if (work > options.work_budget) throw BudgetExceeded("codon DP work estimate exceeds the budget");

    const double inf = std::numeric_limits<double>::infinity();
    const std::size_t width = kmax + 1;
    // value[p][i * width + k]: best usage + repetition cost of positions 0..p
    // with codon i at p and k GC nucleotides so far.
    std::vector<std::vector<double>> value(len);
    std::vector<std::vector<std::uint32_t>> parent(len);
    const auto& w = problem.weights;
    for (std::size_t p = 0; p < len; ++p) {
        value[p].assign(lay.choices(p) * width, inf);
        parent[p].assign(lay.choices(p) * width, 0);
    }
    for (std::size_t i = 0; i < lay.choices(0); ++i) {
        const auto idx = lay.index(0, i);
        value[0][i * width + static_cast<std::size_t>(lay.gc_count[idx])] = mrna::usage_cost(w, lay.frequency[idx]);
    }
    for (std::size_t p = 1; p < len; ++p) {
        for (std::size_t j = 0; j < lay.choices(p); ++j) {
            const auto jdx = lay.index(p, j);
            const double fj = mrna::usage_cost(w, lay.frequency[jdx]);
            const auto sj = static_cast<std::size_t>(lay.gc_count[jdx]);
            for (std::size_t i = 0; i < lay.choices(p - 1); ++i) {
                const double rij = w.c_r * mrna::repetition_penalty(lay.codon[lay.index(p - 1, i)], lay.codon[jdx]);
                for (std::size_t k = 0; k + sj < width; ++k) {
                    const double prev = value[p - 1][i * width + k];
                    if (prev == inf) continue;
                    const double cand = prev + rij + fj;
                    auto& slot = value[p][j * width + k + sj];
                    if (cand < slot) {
                        slot = cand;
                        parent[p][j * width + k + sj] = static_cast<std::uint32_t>(i);
                    }
                }
            }
        }
    }
    double best = inf;
    std::size_t best_i = 0;
    std::size_t best_k = 0;
    for (std::size_t i = 0; i < lay.choices(len - 1); ++i) {
        for (std::size_t k = 0; k < width; ++k) {
            const double v = value[len - 1][i * width + k];
            if (v == inf) continue;
            const double total = v + mrna::gc_cost(problem, lay, static_cast<int>(k));
            if (total < best) {
                best = total;
                best_i = i;
                best_k = k;
            }
        }
    }
    mrna::Selection sel(len);
    std::size_t i = best_i;
    std::size_t k = best_k;
    for (std::size_t p = len; p-- > 0;) {
        sel[p] = i;
        if (p == 0) break;
        const auto prev = parent[p][i * width + k];
        k -= static_cast<std::size_t>(lay.gc_count[lay.index(p, i)]);
        i = prev;
    }

    SolveResult r;
    r.solver = "dp";
    r.assignment = mrna::selection_to_bits(lay, sel);
    r.values.assign(sel.begin(), sel.end());
    r.energy = mrna::selection_energy(problem, lay, sel);
    if (std::abs(r.energy - best) > 1e-9 * std::max(1.0, std::abs(best))) {
        throw std::logic_error("codon DP reconstruction disagrees with its table value");
    }
    r.feasible = true;
    r.iterations = len;
    r.time_seconds = detail::seconds_since(start);
    return r;
}

struct AnnealOptions {
    std::optional<Bits> initial;
    double time_limit_seconds = 0.0;
};

/// Single-flip simulated annealing with index-order sweeps and acceptance
/// 1/(1+exp(dE/T)). Returns the best assignment seen.
inline SolveResult simulated_annealing(const QuboModel& model, const AnnealSchedule& schedule,
                                       const AnnealOptions& options = {}) {
    schedule.validate();
    const auto start = detail::Clock::now();
    const detail::Deadline deadline(options.time_limit_seconds);
    const auto q = detail::search_form(model);
    const std::size_t n = q.num_vars();
    Rng rng(schedule.seed);
    Bits x = options.initial ? *options.initial : detail::random_bits(rng, n);
    qubench::detail::check_length(n, x);
    std::vector<double> h(n);
    q.local_fields(x, h);
    double energy = q.energy(x);
    Bits best = x;
    double best_energy = energy;
    std::size_t sweeps = 0;
    bool timed_out = false;
    const std::size_t levels = schedule.sweeps_per_temp == 0 ? 0 : schedule.num_levels();
    for (std::size_t level = 0; level < levels && !timed_out; ++level) {
        const double t = schedule.temperature(level);
        for (std::size_t s = 0; s < schedule.sweeps_per_temp; ++s) {
            for (std::size_t i = 0; i < n; ++i) {
                const double d = x[i] ? -h[i] : h[i];
                if (uniform01(rng) < sa_acceptance(d, t)) {
                    q.apply_flip(x, h, i);
                    energy += d;
                    if (energy < best_energy) {
                        best_energy = energy;
                        best = x;
                    }
                }
            }
            ++sweeps;
        }
        if (deadline.expired()) timed_out = true;
    }
    auto r = detail::finish(model, "sa", schedule.seed, std::move(best), detail::seconds_since(start));
    r.iterations = sweeps;
    r.timed_out = timed_out;
    return r;
}

inline SolveResult simulated_annealing(const QuboModel& model, std::uint64_t seed, const AnnealOptions& options = {}) {
    return simulated_annealing(model, automatic_schedule(model, seed), options);
}

enum class DaMode { anneal, parallel_tempering };

struct DaOptions {
    std::size_t replicas = 1;
    DaMode mode = DaMode::anneal;
    std::size_t workers = 1;
    double time_limit_seconds = 0.0;
    /// Called after every sweep with the replica slot, its assignment and its
    /// maintained local fields. May run concurrently when workers > 1.
    std::function<void(std::size_t, BitsView, std::span<const double>)> on_sweep;
};

namespace detail {

struct Replica {
    Bits x;
    std::vector<double> h;
    double energy = 0.0;
    Bits best;
    double best_energy = 0.0;
    std::size_t stalled = 0;
    std::size_t sweeps = 0;
};

/// One digital-annealer sweep: every bit is proposed in parallel with
/// min(1, exp(-dE/T)) and one accepted flip is applied.
inline void da_sweep(const CompiledQubo& q, Replica& rep, Rng& rng, double t, std::vector<std::size_t>& accepted) {
    accepted.clear();
    const std::size_t n = rep.x.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double d = rep.x[i] ? -rep.h[i] : rep.h[i];
        if (uniform01(rng) < da_acceptance(d, t)) accepted.push_back(i);
    }
    ++rep.sweeps;
    if (accepted.empty()) {
        ++rep.stalled;
        return;
    }
    const auto k = accepted[uniform_below(rng, accepted.size())];
    rep.energy += rep.x[k] ? -rep.h[k] : rep.h[k];
    q.apply_flip(rep.x, rep.h, k);
    if (rep.energy < rep.best_energy) {
        rep.best_energy = rep.energy;
        rep.best = rep.x;
    }
}

inline void for_each_slot(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& fn) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    if (workers == 1) {
        for (std::size_t s = 0; s < count; ++s) fn(s);
        return;
    }
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t s = w; s < count; s += workers) fn(s);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// Digital-annealer-style solver. In anneal mode every replica follows the
/// geometric schedule independently; in parallel_tempering mode replicas
/// sit on a fixed geometric ladder between t_final and t0 and adjacent
/// ladder slots attempt exchanges after each round of sweeps_per_temp
/// sweeps. Replica k draws from seed + k; exchanges use their own stream.
inline SolveResult da_sweep_solver(const QuboModel& model, const AnnealSchedule& schedule, const DaOptions& options = {}) {
    schedule.validate();
    if (options.replicas == 0) throw ConfigurationError("at least one replica is required");
    if (options.mode == DaMode::parallel_tempering && options.replicas < 2) {
        throw ConfigurationError("parallel tempering needs at least two replicas");
    }
    const auto start = detail::Clock::now();
    const detail::Deadline deadline(options.time_limit_seconds);
    const auto q = detail::search_form(model);
    const std::size_t n = q.num_vars();
    const std::size_t count = options.replicas;
    const std::size_t levels = schedule.sweeps_per_temp == 0 ? 0 : schedule.num_levels();

    std::vector<detail::Replica> reps(count);
    std::vector<Rng> rngs;
    for (std::size_t k = 0; k < count; ++k) {
        rngs.emplace_back(schedule.seed + k);
        auto& rep = reps[k];
        rep.x = detail::random_bits(rngs[k], n);
        rep.h.resize(n);
        q.local_fields(rep.x, rep.h);
        rep.energy = q.energy(rep.x);
        rep.best = rep.x;
        rep.best_energy = rep.energy;
    }
    bool timed_out = false;

    const auto run_sweeps = [&](std::size_t slot, double t) {
        std::vector<std::size_t> accepted;
        accepted.reserve(n);
        for (std::size_t s = 0; s < schedule.sweeps_per_temp; ++s) {
            detail::da_sweep(q, reps[slot], rngs[slot], t, accepted);
            if (options.on_sweep) options.on_sweep(slot, reps[slot].x, reps[slot].h);
        }
    };

    if (options.mode == DaMode::anneal) {
        std::vector<std::uint8_t> expired(count, 0);
        detail::for_each_slot(count, options.workers, [&](std::size_t slot) {
            for (std::size_t level = 0; level < levels; ++level) {
                run_sweeps(slot, schedule.temperature(level));
                if (deadline.expired()) {
                    expired[slot] = 1;
                    break;
                }
            }
        });
        timed_out = std::any_of(expired.begin(), expired.end(), [](auto e) { return e != 0; });
    } else {
        std::vector<double> ladder(count);
        for (std::size_t k = 0; k < count; ++k) {
            ladder[k] = schedule.t_final *
                        std::pow(schedule.t0 / schedule.t_final, static_cast<double>(k) / static_cast<double>(count - 1));
        }
        Rng exchange_rng(derive_seed(schedule.seed, 0xe8c4a9e));
        for (std::size_t round = 0; round < levels; ++round) {
            detail::for_each_slot(count, options.workers, [&](std::size_t slot) { run_sweeps(slot, ladder[slot]); });
            for (std::size_t k = 0; k + 1 < count; ++k) {
                const double p = exchange_probability(ladder[k], ladder[k + 1], reps[k].energy, reps[k + 1].energy);
                if (uniform01(exchange_rng) < p) {
                    std::swap(reps[k].x, reps[k + 1].x);
                    std::swap(reps[k].h, reps[k + 1].h);
                    std::swap(reps[k].energy, reps[k + 1].energy);
                }
            }
            if (deadline.expired()) {
                timed_out = true;
                break;
            }
        }
    }

    std::size_t winner = 0;
    for (std::size_t k = 1; k < count; ++k) {
        if (reps[k].best_energy < reps[winner].best_energy) winner = k;
    }
    std::size_t sweeps = 0;
    std::size_t stalled = 0;
    for (const auto& rep : reps) {
        sweeps += rep.sweeps;
        stalled += rep.stalled;
    }
    auto r = detail::finish(model, options.mode == DaMode::anneal ? "da" : "pt", schedule.seed,
                            std::move(reps[winner].best), detail::seconds_since(start));
    r.iterations = sweeps;
    r.stalled_sweeps = stalled;
    r.timed_out = timed_out;
    return r;
}

inline SolveResult da_sweep_solver(const QuboModel& model, std::uint64_t seed, const DaOptions& options = {}) {
    return da_sweep_solver(model, automatic_da_schedule(model, seed), options);
}

/// Greedy descent: apply the most negative single flip (lowest index on
/// ties) until none improves or max_iters flips were made. The observer
/// sees the search energy after every step, starting with the initial one.
inline SolveResult steepest_descent(const QuboModel& model, Bits x, std::size_t max_iters = 1'000'000,
                                    const std::function<void(double)>& observer = {}) {
    const auto start = detail::Clock::now();
    const auto q = detail::search_form(model);
    const std::size_t n = q.num_vars();
    qubench::detail::check_length(n, x);
    std::vector<double> h(n);
    q.local_fields(x, h);
    double energy = q.energy(x);
    if (observer) observer(energy);
    std::size_t iters = 0;
    while (iters < max_iters) {
        std::size_t pick = n;
        double best = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = x[i] ? -h[i] : h[i];
            if (d < best) {
                best = d;
                pick = i;
            }
        }
        if (pick == n) break;
        q.apply_flip(x, h, pick);
        energy += best;
        ++iters;
        if (observer) observer(energy);
    }
    auto r = detail::finish(model, "steepest", 0, std::move(x), detail::seconds_since(start));
    r.iterations = iters;
    return r;
}

struct EnumerationOptions {
    double budget = 1e6;
};

/// Exact CRN integer program by enumerating every quantity vector inside
/// the bounds and keeping the mass-balanced ones. Ties go to the
/// lexicographically smallest quantity vector.
inline SolveResult solve_ip_exhaustive(const crn::CrnModel& model, const EnumerationOptions& options = {}) {
    const auto start = detail::Clock::now();
    const auto& reactions = model.network.reactions();
    const std::size_t nr = reactions.size();
    double space = 1.0;
    for (const auto& r : reactions) space *= static_cast<double>(r.upper - r.lower + 1);
    if (space > options.budget) {
        throw BudgetExceeded("IP enumeration space " + std::to_string(static_cast<long long>(space)) +
                             " exceeds the budget");
    }
    const auto incidence = model.network.incidence();
    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> touches(nr);
    for (std::size_t s = 0; s < incidence.size(); ++s) {
        for (const auto& [r, v] : incidence[s]) touches[r].emplace_back(s, v);
    }
    std::vector<std::int64_t> x(nr);
    for (std::size_t r = 0; r < nr; ++r) x[r] = reactions[r].lower;
    auto residual = model.balance_residual(x);
    std::size_t unbalanced = static_cast<std::size_t>(std::count_if(residual.begin(), residual.end(), [](auto v) { return v != 0; }));

    std::optional<std::vector<std::int64_t>> best;
    double best_value = std::numeric_limits<double>::infinity();
    std::size_t visited = 0;
    while (true) {
        ++visited;
        if (unbalanced == 0) {
            const double v = model.objective(x);
            if (v < best_value) {
                best_value = v;
                best = x;
            }
        }
        // Odometer with the last reaction fastest, so visits are lexicographic.
        bool wrapped = true;
        for (std::size_t r = nr; r-- > 0;) {
            const bool carry = x[r] == reactions[r].upper;
            const std::int64_t step = carry ? reactions[r].lower - reactions[r].upper : 1;
            for (const auto& [s, v] : touches[r]) {
                const bool was = residual[s] != 0;
                residual[s] += v * step;
                unbalanced = unbalanced - was + (residual[s] != 0);
            }
            x[r] += step;
            if (!carry) {
                wrapped = false;
                break;
            }
        }
        if (wrapped) break;
    }
    if (!best) throw NoFeasibleSolution("no quantity vector within the bounds balances every species");
    SolveResult res;
    res.solver = "ip-exhaustive";
    res.values = *best;
    res.energy = model.objective(*best);
    const auto violations = model.linear.violations(model.point(*best));
    res.feasible = violations.empty();
    res.violations = violations;
    res.iterations = visited;
    res.time_seconds = detail::seconds_since(start);
    return res;
}

namespace detail {

/// Visit every codon selection in lexicographic order.
template <typename Fn>
void for_each_selection(const std::vector<std::size_t>& domains, double budget, Fn&& fn) {
    double space = 1.0;
    for (auto m : domains) space *= static_cast<double>(m);
    if (space > budget) throw BudgetExceeded("selection enumeration space exceeds the budget");
    mrna::Selection sel(domains.size(), 0);
    while (true) {
        fn(static_cast<const mrna::Selection&>(sel));
        std::size_t p = sel.size();
        while (p > 0) {
            --p;
            if (++sel[p] < domains[p]) break;
            sel[p] = 0;
            if (p == 0) return;
        }
        if (sel.empty()) return;
    }
}

inline SolveResult selection_result(std::string solver, const mrna::CodonLayout& lay, const mrna::Selection& sel,
                                    double value, std::size_t visited, Clock::time_point start) {
    SolveResult r;
    r.solver = std::move(solver);
    r.assignment = mrna::selection_to_bits(lay, sel);
    r.values.assign(sel.begin(), sel.end());
    r.energy = value;
    r.feasible = true;
    r.iterations = visited;
    r.time_seconds = seconds_since(start);
    return r;
}

}  // namespace detail

/// Exact MIP optimum: every codon selection is mapped to its unique
/// completion (z, g), checked against all MIP rows and scored with the MIP
/// objective.
inline SolveResult solve_mip_enumeration(const mrna::CodonProblem& problem, const EnumerationOptions& options = {}) {
    const auto start = detail::Clock::now();
    const auto lay = mrna::layout(problem);
    const auto mip = mrna::build_mip(problem);
    std::vector<std::size_t> domains;
    for (std::size_t p = 0; p < lay.length(); ++p) domains.push_back(lay.choices(p));
    std::optional<mrna::Selection> best;
    double best_value = std::numeric_limits<double>::infinity();
    std::size_t visited = 0;
    detail::for_each_selection(domains, options.budget, [&](const mrna::Selection& sel) {
        ++visited;
        const auto point = mip.point(lay, sel);
        if (!mip.linear.violations(point).empty()) return;
        const double v = mip.linear.objective_value(point);
        if (v < best_value) {
            best_value = v;
            best = sel;
        }
    });
    if (!best) throw NoFeasibleSolution("MIP has no feasible completion");
    return detail::selection_result("mip-enum", lay, *best, best_value, visited, start);
}

/// Exact CP optimum by enumerating the integer decision variables.
inline SolveResult solve_cp_enumeration(const mrna::CodonProblem& problem, const EnumerationOptions& options = {}) {
    const auto start = detail::Clock::now();
    const auto lay = mrna::layout(problem);
    const auto cp = mrna::build_cp(problem);
    std::optional<mrna::Selection> best;
    double best_value = std::numeric_limits<double>::infinity();
    std::size_t visited = 0;
    detail::for_each_selection(cp.domains, options.budget, [&](const mrna::Selection& sel) {
        ++visited;
        const double v = cp.objective(sel);
        if (v < best_value) {
            best_value = v;
            best = sel;
        }
    });
    return detail::selection_result("cp-enum", lay, *best, best_value, visited, start);
}

}  // namespace qubench::solvers
