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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "qubench/errors.hpp"
#include "qubench/mrna.hpp"
#include "qubench/qubo.hpp"
#include "qubench/qubo_io.hpp"
#include "qubench/random.hpp"
#include "qubench/solvers.hpp"

namespace qubench::bench {

/// Tolerance for deciding that a run reached the known optimum.
inline constexpr double optimum_tolerance = 1e-6;

enum class TimingScope { solve_only, build_and_solve };

inline std::string_view to_string(TimingScope s) noexcept {
    return s == TimingScope::solve_only ? "solve_only" : "build_and_solve";
}

inline TimingScope parse_timing_scope(std::string_view name) {
    if (name == "solve_only") return TimingScope::solve_only;
    if (name == "build_and_solve") return TimingScope::build_and_solve;
    throw ConfigurationError("unknown timing scope '" + std::string(name) + "'");
}

struct BenchInstance {
    std::string id;
    std::function<QuboModel()> build;
    std::optional<mrna::CodonProblem> codon;  // enables the dp solver
    std::optional<double> optimal_known;
};

/// Solver names: brute, sa, da, pt, steepest, dp.
struct SolverSpec {
    std::string name;
    std::optional<solvers::AnnealSchedule> schedule{};  // automatic when absent; its seed is replaced per run
    std::size_t replicas = 0;                           // 0: 1 for da, 8 for pt
    bool embed_constraints = true;
    std::size_t brute_cap = 24;
};

inline const std::set<std::string>& solver_names() {
    static const std::set<std::string> names{"brute", "sa", "da", "pt", "steepest", "dp"};
    return names;
}

struct BenchConfig {
    std::size_t repeats = 1;
    std::uint64_t master_seed = 0;
    double time_limit_seconds = 0.0;
    std::size_t workers = 1;
    TimingScope timing = TimingScope::solve_only;
};

struct BenchRecord {
    std::string instance;
    std::size_t num_vars = 0;
    std::string solver;
    std::uint64_t seed = 0;
    double energy = 0.0;
    bool feasible = false;
    double time_seconds = 0.0;
    std::optional<double> optimal_known;
    bool reached_optimal = false;
    bool timed_out = false;
    bool skipped = false;
    std::string reason;  // why a record was skipped
};

/// Seed of repeat r of solver s on instance i.
inline std::uint64_t cell_seed(std::uint64_t master, std::size_t instance, std::size_t solver, std::size_t repeat) {
    return derive_seed(derive_seed(derive_seed(master, instance), solver), repeat);
}

namespace detail {

inline std::optional<std::string> skip_reason(const SolverSpec& spec, const BenchInstance& instance,
                                              const QuboModel& model) {
    if (spec.name == "dp" && !instance.codon) return "dp requires a codon-selection instance";
    if (spec.name == "brute" && model.num_vars() > spec.brute_cap) {
        return std::to_string(model.num_vars()) + " variables exceed the brute-force cap of " +
               std::to_string(spec.brute_cap);
    }
    if (spec.name != "brute" && spec.name != "dp" && !spec.embed_constraints && !model.constraints().empty()) {
        return "solver " + spec.name + " does not support constraints";
    }
    return std::nullopt;
}

inline solvers::SolveResult run_solver(const SolverSpec& spec, const QuboModel& model, const BenchInstance& instance,
                                       std::uint64_t seed, double time_limit) {
    if (spec.name == "brute") return solvers::brute_force(model, {spec.brute_cap});
    if (spec.name == "dp") return solvers::dp_codon_exact(*instance.codon);
    if (spec.name == "steepest") {
        Rng rng(seed);
        Bits x(model.num_vars());
        for (auto& b : x) b = static_cast<std::uint8_t>(uniform_below(rng, 2));
        auto r = solvers::steepest_descent(model, std::move(x));
        r.seed = seed;
        return r;
    }
    if (spec.name == "sa") {
        auto schedule = spec.schedule ? *spec.schedule : solvers::automatic_schedule(model, seed);
        schedule.seed = seed;
        return solvers::simulated_annealing(model, schedule, {std::nullopt, time_limit});
    }
    solvers::DaOptions opts;
    opts.time_limit_seconds = time_limit;
    if (spec.name == "pt") {
        opts.mode = solvers::DaMode::parallel_tempering;
        opts.replicas = spec.replicas == 0 ? 8 : spec.replicas;
    } else {
        opts.replicas = spec.replicas == 0 ? 1 : spec.replicas;
    }
    auto schedule = spec.schedule ? *spec.schedule : solvers::automatic_da_schedule(model, seed);
    schedule.seed = seed;
    return solvers::da_sweep_solver(model, schedule, opts);
}

}  // namespace detail

/// Run every (instance, solver, repeat) cell. Records come back in that
/// nesting order regardless of worker count; each cell is timed on its own
/// monotonic clock. Time-limit expiry is recorded, not raised.
inline std::vector<BenchRecord> run_matrix(const std::vector<BenchInstance>& instances,
                                           const std::vector<SolverSpec>& specs, const BenchConfig& config) {
    for (const auto& spec : specs) {
        if (!solver_names().contains(spec.name)) throw ConfigurationError("unknown solver '" + spec.name + "'");
    }
    if (config.repeats == 0) throw ConfigurationError("repeats must be at least 1");
    const std::size_t per_instance = specs.size() * config.repeats;
    std::vector<BenchRecord> records(instances.size() * per_instance);
    solvers::detail::for_each_slot(records.size(), config.workers, [&](std::size_t cell) {
        const std::size_t i = cell / per_instance;
        const std::size_t s = (cell % per_instance) / config.repeats;
        const std::size_t rep = cell % config.repeats;
        const auto& instance = instances[i];
        const auto& spec = specs[s];
        auto& rec = records[cell];
        rec.instance = instance.id;
        rec.solver = spec.name;
        rec.seed = cell_seed(config.master_seed, i, s, rep);
        rec.optimal_known = instance.optimal_known;

        const auto build_start = std::chrono::steady_clock::now();
        const QuboModel model = instance.build();
        const auto solve_start = std::chrono::steady_clock::now();
        rec.num_vars = model.num_vars();
        if (auto reason = detail::skip_reason(spec, instance, model)) {
            rec.skipped = true;
            rec.reason = *reason;
            return;
        }
        try {
            const auto result = detail::run_solver(spec, model, instance, rec.seed, config.time_limit_seconds);
            const auto end = std::chrono::steady_clock::now();
            const auto from = config.timing == TimingScope::solve_only ? solve_start : build_start;
            rec.time_seconds = std::chrono::duration<double>(end - from).count();
            rec.energy = result.energy;
            rec.feasible = result.feasible;
            rec.timed_out = result.timed_out;
            rec.reached_optimal = rec.optimal_known && rec.feasible &&
                                  std::abs(rec.energy - *rec.optimal_known) <= optimum_tolerance;
        } catch (const NoFeasibleSolution& e) {
            rec.skipped = true;
            rec.reason = std::string("no feasible solution: ") + e.what();
        } catch (const BudgetExceeded& e) {
            rec.skipped = true;
            rec.reason = std::string("budget exceeded: ") + e.what();
        }
    });
    return records;
}

struct SolverSummary {
    std::string solver;
    double ac = 0.0;    // mean over instances of the best energy
    double atts = 0.0;  // mean time
    double stts = 0.0;  // population standard deviation of time
    double mtts = 0.0;  // maximum time
    std::size_t runs = 0;
    std::size_t instances = 0;
    std::size_t reached_optimal = 0;
};

struct BenchSummary {
    std::vector<SolverSummary> rows;  // sorted by solver id

    const SolverSummary& at(std::string_view solver) const {
        for (const auto& r : rows) {
            if (r.solver == solver) return r;
        }
        throw ValidationError("no summary for solver '" + std::string(solver) + "'");
    }
};

/// Aggregate non-skipped records per solver. The per-instance best energy
/// prefers feasible runs. The result does not depend on record order.
inline BenchSummary summarize(const std::vector<BenchRecord>& records) {
    std::map<std::string, std::vector<const BenchRecord*>> by_solver;
    for (const auto& r : records) {
        if (!r.skipped) by_solver[r.solver].push_back(&r);
    }
    if (by_solver.empty()) throw ValidationError("cannot summarize an empty set of records");
    BenchSummary summary;
    for (const auto& [solver, group] : by_solver) {
        std::map<std::string, std::pair<bool, double>> best;  // instance -> (feasible, energy)
        std::vector<double> times;
        SolverSummary row;
        row.solver = solver;
        for (const auto* r : group) {
            times.push_back(r->time_seconds);
            row.reached_optimal += r->reached_optimal;
            auto [it, fresh] = best.try_emplace(r->instance, r->feasible, r->energy);
            if (fresh) continue;
            auto& [feasible, energy] = it->second;
            if ((r->feasible && !feasible) || (r->feasible == feasible && r->energy < energy)) {
                feasible = r->feasible;
                energy = r->energy;
            }
        }
        std::sort(times.begin(), times.end());
        double sum = 0.0;
        for (double t : times) sum += t;
        row.runs = times.size();
        row.atts = sum / static_cast<double>(times.size());
        double sq = 0.0;
        for (double t : times) sq += (t - row.atts) * (t - row.atts);
        row.stts = std::sqrt(sq / static_cast<double>(times.size()));
        row.mtts = times.back();
        double energy_sum = 0.0;
        for (const auto& [instance, entry] : best) energy_sum += entry.second;
        row.instances = best.size();
        row.ac = energy_sum / static_cast<double>(best.size());
        summary.rows.push_back(std::move(row));
    }
    return summary;
}

inline std::string records_csv(const std::vector<BenchRecord>& records) {
    std::ostringstream out;
    out << "instance,num_vars,solver,seed,energy,feasible,time_seconds,reached_optimal\n";
    for (const auto& r : records) {
        if (r.skipped) continue;
        out << r.instance << ',' << r.num_vars << ',' << r.solver << ',' << r.seed << ',' << format_double(r.energy)
            << ',' << (r.feasible ? "true" : "false") << ',' << format_double(r.time_seconds) << ','
            << (r.reached_optimal ? "true" : "false") << '\n';
    }
    return out.str();
}

inline std::string skipped_csv(const std::vector<BenchRecord>& records) {
    std::ostringstream out;
    out << "instance,num_vars,solver,seed,reason\n";
    for (const auto& r : records) {
        if (!r.skipped) continue;
        std::string reason = r.reason;
        std::replace(reason.begin(), reason.end(), ',', ';');
        out << r.instance << ',' << r.num_vars << ',' << r.solver << ',' << r.seed << ',' << reason << '\n';
    }
    return out.str();
}

inline std::string summary_csv(const BenchSummary& summary) {
    std::ostringstream out;
    out << "solver,AC,ATTS,STTS,MTTS\n";
    for (const auto& r : summary.rows) {
        out << r.solver << ',' << format_double(r.ac) << ',' << format_double(r.atts) << ',' << format_double(r.stts)
            << ',' << format_double(r.mtts) << '\n';
    }
    return out.str();
}

/// Least-squares line y = slope * x + intercept; residual is the sum of
/// squared errors in time units.
struct Fit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};

inline std::optional<Fit> least_squares(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 2) return std::nullopt;
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : points) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(points.size());
    my /= static_cast<double>(points.size());
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    if (sxx == 0.0) return std::nullopt;
    Fit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    for (const auto& [x, y] : points) {
        const double e = y - (fit.slope * x + fit.intercept);
        fit.residual += e * e;
    }
    return fit;
}

struct PlotPoint {
    double num_vars = 0.0;
    double time_seconds = 0.0;
    bool filled = true;
};

struct SeriesFit {
    std::string solver;
    std::vector<PlotPoint> points;
    std::optional<Fit> linear;       // t = slope n + intercept
    std::optional<Fit> exponential;  // ln t = slope n + intercept; residual measured on t
    std::string chosen;              // "linear", "exponential" or empty

    double predict(double n) const {
        if (chosen == "linear") return linear->slope * n + linear->intercept;
        if (chosen == "exponential") return std::exp(exponential->slope * n + exponential->intercept);
        return std::nan("");
    }
};

struct ScalingPlot {
    std::vector<SeriesFit> series;
    bool missing_reference = false;  // some points lacked a known optimum and are drawn filled
    std::string svg;
    std::string points_csv;
    std::string fits_csv;
};

namespace detail {

inline std::string svg_number(double v) {
    std::ostringstream out;
    out.precision(4);
    out << std::fixed << v;
    return out.str();
}

inline std::string render_svg(const ScalingPlot& plot) {
    constexpr double width = 640;
    constexpr double height = 420;
    constexpr double left = 70;
    constexpr double right = 150;
    constexpr double top = 30;
    constexpr double bottom = 50;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    double xmax = 1.0;
    double ymax = 0.0;
    for (const auto& s : plot.series) {
        for (const auto& p : s.points) {
            xmax = std::max(xmax, p.num_vars);
            ymax = std::max(ymax, p.time_seconds);
        }
    }
    if (ymax <= 0.0) ymax = 1.0;
    const double pw = width - left - right;
    const double ph = height - top - bottom;
    const auto sx = [&](double x) { return left + x / xmax * pw; };
    const auto sy = [&](double y) { return top + ph - std::clamp(y / ymax, 0.0, 1.05) * ph; };

    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + ph << "\" x2=\"" << left + pw << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + ph
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left + pw / 2 << "\" y=\"" << height - 12 << "\" text-anchor=\"middle\">variables</text>\n";
    out << "<text x=\"16\" y=\"" << top + ph / 2 << "\" transform=\"rotate(-90 16 " << top + ph / 2
        << ")\" text-anchor=\"middle\">time to solution (s)</text>\n";
    out << "<text x=\"" << left << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">0</text>\n";
    out << "<text x=\"" << left + pw << "\" y=\"" << top + ph + 16 << "\" text-anchor=\"middle\">"
        << format_double(xmax) << "</text>\n";
    out << "<text x=\"" << left - 6 << "\" y=\"" << top + 4 << "\" text-anchor=\"end\">" << svg_number(ymax)
        << "</text>\n";
    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        const char* color = palette[k % std::size(palette)];
        if (!s.chosen.empty()) {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-dasharray=\"4 3\" points=\"";
            for (int step = 0; step <= 50; ++step) {
                const double n = xmax * step / 50.0;
                out << svg_number(sx(n)) << ',' << svg_number(sy(s.predict(n))) << ' ';
            }
            out << "\"/>\n";
        }
        for (const auto& p : s.points) {
            out << "<circle cx=\"" << svg_number(sx(p.num_vars)) << "\" cy=\"" << svg_number(sy(p.time_seconds))
                << "\" r=\"4\" stroke=\"" << color << "\" fill=\"" << (p.filled ? color : "none") << "\"/>\n";
        }
        const double ly = top + 16.0 * static_cast<double>(k);
        out << "<circle cx=\"" << left + pw + 16 << "\" cy=\"" << ly << "\" r=\"4\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << left + pw + 26 << "\" y=\"" << ly + 4 << "\">" << s.solver
            << (s.chosen.empty() ? "" : " (" + s.chosen + ")") << "</text>\n";
    }
    if (plot.missing_reference) {
        out << "<text x=\"" << left << "\" y=\"" << height - 30
            << "\" font-size=\"10\">* no known optimum for some points; drawn filled</text>\n";
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace detail

/// Per-solver time vs size scatter with linear and log-linear fits. Points
/// that missed a known optimum are hollow and left out of the fits; a fit
/// needs two points with distinct sizes.
inline ScalingPlot scaling_plot(const std::vector<BenchRecord>& records) {
    std::map<std::string, std::vector<PlotPoint>> by_solver;
    ScalingPlot plot;
    for (const auto& r : records) {
        if (r.skipped) continue;
        const bool filled = !r.optimal_known || r.reached_optimal;
        if (!r.optimal_known) plot.missing_reference = true;
        by_solver[r.solver].push_back({static_cast<double>(r.num_vars), r.time_seconds, filled});
    }
    std::ostringstream points_csv;
    std::ostringstream fits_csv;
    points_csv << "solver,num_vars,time_seconds,filled\n";
    fits_csv << "solver,model,slope,intercept,residual,chosen\n";
    for (auto& [solver, points] : by_solver) {
        std::sort(points.begin(), points.end(), [](const PlotPoint& a, const PlotPoint& b) {
            return std::tie(a.num_vars, a.time_seconds, a.filled) < std::tie(b.num_vars, b.time_seconds, b.filled);
        });
        SeriesFit s;
        s.solver = solver;
        s.points = points;
        std::vector<std::pair<double, double>> lin;
        std::vector<std::pair<double, double>> logs;
        for (const auto& p : points) {
            if (!p.filled) continue;
            lin.emplace_back(p.num_vars, p.time_seconds);
            if (p.time_seconds > 0.0) logs.emplace_back(p.num_vars, std::log(p.time_seconds));
        }
        s.linear = least_squares(lin);
        if (logs.size() == lin.size()) s.exponential = least_squares(logs);
        if (s.exponential) {
            s.exponential->residual = 0.0;
            for (const auto& [n, t] : lin) {
                const double e = t - std::exp(s.exponential->slope * n + s.exponential->intercept);
                s.exponential->residual += e * e;
            }
        }
        if (s.linear && (!s.exponential || s.linear->residual <= s.exponential->residual)) {
            s.chosen = "linear";
        } else if (s.exponential) {
            s.chosen = "exponential";
        }
        for (const auto& p : points) {
            points_csv << solver << ',' << format_double(p.num_vars) << ',' << format_double(p.time_seconds) << ','
                       << (p.filled ? "true" : "false") << '\n';
        }
        const auto fit_row = [&](std::string_view kind, const std::optional<Fit>& f) {
            if (!f) return;
            fits_csv << solver << ',' << kind << ',' << format_double(f->slope) << ',' << format_double(f->intercept)
                     << ',' << format_double(f->residual) << ',' << (s.chosen == kind ? "true" : "false") << '\n';
        };
        fit_row("linear", s.linear);
        fit_row("exponential", s.exponential);
        plot.series.push_back(std::move(s));
    }
    plot.points_csv = points_csv.str();
    plot.fits_csv = fits_csv.str();
    plot.svg = detail::render_svg(plot);
    return plot;
}

}  // namespace qubench::bench
