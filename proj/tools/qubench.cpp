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

// qubench: build, analyze, solve and benchmark QUBO formulations from the
// command line. Data goes to files under --out; diagnostics go to stderr.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qubench/qubench.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace qubench;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_error = 1;
constexpr int exit_infeasible = 2;

struct RunConfig {
    std::string subcommand;
    std::vector<std::string> argv;

    std::string network;
    std::string fasta;
    std::string table;
    std::string model;
    std::string manifest;
    std::string selection;
    std::string solution;
    std::size_t record = 0;

    std::string formulation = "qubo";
    std::string solver;
    std::string encoding = "unary";
    std::string gc_normalization = "nucleotide";
    std::string embedding = "one_hot_square";
    std::string format = "text";
    mrna::CodonWeights weights;

    std::optional<double> t0;
    std::optional<double> t_final;
    std::optional<double> alpha;
    std::optional<std::size_t> sweeps;
    std::size_t replicas = 0;

    crn::GeneratorParams generator;
    bool dot = false;

    std::uint64_t seed = 1;
    double time_limit = 0.0;
    std::size_t workers = 1;
    std::string out;
};

json to_json(const RunConfig& c) {
    json doc;
    doc["subcommand"] = c.subcommand;
    doc["argv"] = c.argv;
    json inputs = json::object();
    for (const auto& [key, value] : std::map<std::string, std::string>{{"network", c.network},
                                                                       {"fasta", c.fasta},
                                                                       {"table", c.table},
                                                                       {"model", c.model},
                                                                       {"manifest", c.manifest},
                                                                       {"selection", c.selection},
                                                                       {"solution", c.solution}}) {
        if (!value.empty()) inputs[key] = value;
    }
    doc["inputs"] = inputs;
    doc["fasta_record"] = c.record;
    doc["formulation"] = c.formulation;
    doc["solver"] = c.solver;
    doc["encoding"] = c.encoding;
    doc["gc_normalization"] = c.gc_normalization;
    doc["embedding"] = c.embedding;
    doc["format"] = c.format;
    doc["weights"] = {{"c_f", c.weights.c_f},
                      {"c_gc", c.weights.c_gc},
                      {"c_r", c.weights.c_r},
                      {"rho_target", c.weights.rho_target},
                      {"epsilon_f", c.weights.epsilon_f}};
    doc["replicas"] = c.replicas;
    doc["generator"] = {{"species", c.generator.num_species},
                        {"reactions_per_species", c.generator.reactions_per_species},
                        {"seed", c.generator.seed},
                        {"cost_range", {c.generator.cost_range.first, c.generator.cost_range.second}},
                        {"bound_range", {c.generator.bound_range.first, c.generator.bound_range.second}}};
    doc["dot"] = c.dot;
    doc["seed"] = c.seed;
    doc["time_limit_seconds"] = c.time_limit;
    doc["workers"] = c.workers;
    doc["out"] = c.out;
    return doc;
}

json to_json(const solvers::AnnealSchedule& s) {
    return {{"t0", s.t0}, {"t_final", s.t_final}, {"alpha", s.alpha}, {"sweeps_per_temp", s.sweeps_per_temp},
            {"seed", s.seed}};
}

solvers::AnnealSchedule schedule_from_json(const json& doc, solvers::AnnealSchedule base) {
    base.t0 = doc.value("t0", base.t0);
    base.t_final = doc.value("t_final", base.t_final);
    base.alpha = doc.value("alpha", base.alpha);
    base.sweeps_per_temp = doc.value("sweeps_per_temp", base.sweeps_per_temp);
    base.validate();
    return base;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Every file a run writes passes through here, so the manifest can list it.
class Outputs {
public:
    void write(const fs::path& path, const std::string& content) {
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
        out << content;
        if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
        written_.push_back(path.string());
    }

    const std::vector<std::string>& written() const { return written_; }

private:
    std::vector<std::string> written_;
};

void write_manifest(Outputs& outputs, const fs::path& path, const RunConfig& cfg, json resolved) {
    json doc;
    doc["tool"] = "qubench";
    doc["config"] = to_json(cfg);
    doc["resolved"] = std::move(resolved);
    doc["outputs"] = outputs.written();
    outputs.write(path, doc.dump(2) + "\n");
}

fs::path sibling(const std::string& out, std::string_view suffix) { return fs::path(out + std::string(suffix)); }

// --- solver dispatch on a QUBO ------------------------------------------------

bool has_schedule_flags(const RunConfig& cfg) { return cfg.t0 || cfg.t_final || cfg.alpha || cfg.sweeps; }

solvers::AnnealSchedule resolve_schedule(const RunConfig& cfg, solvers::AnnealSchedule automatic) {
    if (cfg.t0) automatic.t0 = *cfg.t0;
    if (cfg.t_final) automatic.t_final = *cfg.t_final;
    if (cfg.alpha) automatic.alpha = *cfg.alpha;
    if (cfg.sweeps) automatic.sweeps_per_temp = *cfg.sweeps;
    automatic.seed = cfg.seed;
    automatic.validate();
    return automatic;
}

solvers::SolveResult run_qubo_solver(const RunConfig& cfg, const QuboModel& model, json& resolved) {
    const auto& name = cfg.solver;
    if (name == "brute") return solvers::brute_force(model);
    if (name == "steepest") {
        Rng rng(cfg.seed);
        Bits x(model.num_vars());
        for (auto& b : x) b = static_cast<std::uint8_t>(uniform_below(rng, 2));
        auto r = solvers::steepest_descent(model, std::move(x));
        r.seed = cfg.seed;
        return r;
    }
    if (name == "sa") {
        const auto schedule = resolve_schedule(cfg, solvers::automatic_schedule(model, cfg.seed));
        resolved["schedule"] = to_json(schedule);
        resolved["schedule_source"] = has_schedule_flags(cfg) ? "flags over automatic" : "automatic";
        return solvers::simulated_annealing(model, schedule, {std::nullopt, cfg.time_limit});
    }
    if (name == "da" || name == "pt") {
        const auto schedule = resolve_schedule(cfg, solvers::automatic_da_schedule(model, cfg.seed));
        solvers::DaOptions opts;
        opts.mode = name == "pt" ? solvers::DaMode::parallel_tempering : solvers::DaMode::anneal;
        opts.replicas = cfg.replicas != 0 ? cfg.replicas : (name == "pt" ? 8 : 1);
        opts.workers = cfg.workers;
        opts.time_limit_seconds = cfg.time_limit;
        resolved["schedule"] = to_json(schedule);
        resolved["schedule_source"] = has_schedule_flags(cfg) ? "flags over automatic" : "automatic";
        resolved["replicas"] = opts.replicas;
        return solvers::da_sweep_solver(model, schedule, opts);
    }
    throw ConfigurationError("unknown solver '" + name + "'");
}

// --- crn --------------------------------------------------------------------

crn::ReactionNetwork load_network_file(const std::string& path) { return crn::load_network(read_file(path)); }

int crn_build(const RunConfig& cfg) {
    const auto network = load_network_file(cfg.network);
    Outputs outputs;
    json resolved;
    if (cfg.formulation == "mip") {
        outputs.write(cfg.out, lp::to_lp(crn::build_ip(network).linear, "reaction network " + network.name()));
    } else {
        const auto q = crn::build_qubo(network, parse_encoding(cfg.encoding));
        resolved["num_vars"] = q.model.num_vars();
        if (cfg.formulation == "qubo") {
            outputs.write(cfg.out, to_text(q.model));
        } else if (cfg.formulation == "embedded") {
            const auto embedded = embed_penalties(q.model);
            resolved["embedded_num_vars"] = embedded.num_vars();
            outputs.write(cfg.out, to_text(embedded));
        } else {
            throw ConfigurationError("crn build supports --formulation qubo, embedded or mip");
        }
    }
    write_manifest(outputs, sibling(cfg.out, ".manifest.json"), cfg, resolved);
    return exit_ok;
}

int crn_solve(const RunConfig& cfg) {
    const auto network = load_network_file(cfg.network);
    const auto ip = crn::build_ip(network);
    json resolved;
    solvers::SolveResult r;
    if (cfg.solver == "brute" || cfg.solver == "ip") {
        // Exact search over integer reaction quantities; the binarized model
        // of a realistic network is far beyond bit enumeration.
        resolved["method"] = "exhaustive enumeration of reaction quantities";
        r = solvers::solve_ip_exhaustive(ip);
    } else {
        const auto q = crn::build_qubo(network, parse_encoding(cfg.encoding));
        resolved["num_vars"] = q.model.num_vars();
        r = run_qubo_solver(cfg, q.model, resolved);
        r.values = q.quantities(r.assignment);
    }

    auto doc = solvers::to_json(r);
    doc["network"] = network.name();
    doc["solution"] = crn::to_json(crn::make_solution(network, r.values));
    doc["objective"] = ip.objective(r.values);
    const auto residual = ip.balance_residual(r.values);
    doc["balanced"] = std::all_of(residual.begin(), residual.end(), [](std::int64_t v) { return v == 0; });

    Outputs outputs;
    outputs.write(cfg.out, doc.dump(2) + "\n");
    if (cfg.dot) outputs.write(sibling(cfg.out, ".dot"), crn::export_dot(network, crn::make_solution(network, r.values)));
    write_manifest(outputs, sibling(cfg.out, ".manifest.json"), cfg, resolved);
    if (!r.feasible) {
        std::cerr << "qubench: solver returned an infeasible assignment\n";
        return exit_infeasible;
    }
    return exit_ok;
}

int crn_export(const RunConfig& cfg) {
    const auto network = load_network_file(cfg.network);
    std::optional<crn::Solution> solution;
    if (!cfg.solution.empty()) {
        json doc;
        try {
            doc = json::parse(read_file(cfg.solution));
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("solution JSON: ") + e.what());
        }
        solution = crn::solution_from_json(doc.contains("solution") ? doc["solution"] : doc);
    }
    Outputs outputs;
    outputs.write(cfg.out, crn::export_dot(network, solution));
    write_manifest(outputs, sibling(cfg.out, ".manifest.json"), cfg, {});
    return exit_ok;
}

int crn_generate(const RunConfig& cfg) {
    const auto network = crn::generate_artificial(cfg.generator);
    Outputs outputs;
    outputs.write(cfg.out, crn::to_json(network).dump(2) + "\n");
    json resolved;
    resolved["reactions"] = network.reactions().size();
    resolved["species"] = network.species().size();
    write_manifest(outputs, sibling(cfg.out, ".manifest.json"), cfg, resolved);
    return exit_ok;
}

// --- mrna -------------------------------------------------------------------

struct LoadedProtein {
    mrna::FastaRecord record;
    mrna::CodonProblem problem;
};

LoadedProtein load_protein(const RunConfig& cfg) {
    const auto records = mrna::load_fasta(read_file(cfg.fasta));
    if (records.empty()) throw ParseError("no FASTA records in '" + cfg.fasta + "'");
    if (cfg.record >= records.size()) {
        throw ConfigurationError("FASTA record " + std::to_string(cfg.record) + " requested but only " +
                                 std::to_string(records.size()) + " present");
    }
    LoadedProtein out{records[cfg.record], {}};
    out.problem.protein = out.record.sequence;
    if (!cfg.table.empty()) out.problem.table = mrna::load_codon_table(read_file(cfg.table));
    out.problem.weights = cfg.weights;
    out.problem.gc_normalization = mrna::parse_gc_normalization(cfg.gc_normalization);
    out.problem.validate();
    return out;
}

int mrna_build(const RunConfig& cfg) {
    const auto [record, problem] = load_protein(cfg);
    Outputs outputs;
    json resolved;
    resolved["protein"] = problem.protein;
    if (cfg.formulation == "qubo") {
        outputs.write(cfg.out, to_text(mrna::build_qubo_constrained(problem)));
    } else if (cfg.formulation == "embedded") {
        outputs.write(cfg.out,
                      to_text(mrna::build_qubo_embedded(problem, mrna::parse_embedding_variant(cfg.embedding))));
    } else if (cfg.formulation == "mip") {
        outputs.write(cfg.out, lp::to_lp(mrna::build_mip(problem).linear, "codon selection for " + record.header));
    } else if (cfg.formulation == "cp") {
        outputs.write(cfg.out, mrna::to_json(mrna::build_cp(problem)).dump(2) + "\n");
    } else {
        throw ConfigurationError("unknown formulation '" + cfg.formulation + "'");
    }
    write_manifest(outputs, sibling(cfg.out, ".manifest.json"), cfg, resolved);
    return exit_ok;
}

int mrna_solve(const RunConfig& cfg) {
    const auto [record, problem] = load_protein(cfg);
    const auto lay = mrna::layout(problem);
    json resolved;
    solvers::SolveResult r;
    if (cfg.solver == "dp") {
        r = solvers::dp_codon_exact(problem);
    } else if (cfg.solver == "mip" || cfg.solver == "mip-enum") {
        r = solvers::solve_mip_enumeration(problem);
    } else if (cfg.solver == "cp" || cfg.solver == "cp-enum") {
        r = solvers::solve_cp_enumeration(problem);
    } else {
        QuboModel model;
        if (cfg.formulation == "qubo") {
            model = mrna::build_qubo_constrained(problem);
        } else if (cfg.formulation == "embedded") {
            model = mrna::build_qubo_embedded(problem, mrna::parse_embedding_variant(cfg.embedding));
        } else {
            throw ConfigurationError("QUBO solvers take --formulation qubo or embedded");
        }
        resolved["num_vars"] = model.num_vars();
        r = run_qubo_solver(cfg, model, resolved);
        try {
            const auto sel = mrna::bits_to_selection(lay, r.assignment);
            r.values.assign(sel.begin(), sel.end());
        } catch (const ValidationError& e) {
            r.feasible = false;
            r.violations.emplace_back(e.what());
        }
    }

    auto doc = solvers::to_json(r);
    doc["protein"] = problem.protein;
    doc["header"] = record.header;
    if (r.feasible) {
        const mrna::Selection sel(r.values.begin(), r.values.end());
        doc["selection"] = sel;
        doc["sequence"] = mrna::selection_sequence(lay, sel);
        doc["objective"] = mrna::selection_energy(problem, lay, sel);
        doc["gc_content"] = static_cast<double>(std::count_if(doc["sequence"].get_ref<const std::string&>().begin(),
                                                              doc["sequence"].get_ref<const std::string&>().end(),
                                                              [](char c) { return c == 'G' || c == 'C'; })) /
                            static_cast<double>(3 * lay.length());
    }
    Outputs outputs;
    outputs.write(cfg.out, doc.dump(2) + "\n");
    write_manifest(outputs, sibling(cfg.out, ".manifest.json"), cfg, resolved);
    if (!r.feasible) {
        std::cerr << "qubench: solver returned an infeasible assignment\n";
        return exit_infeasible;
    }
    return exit_ok;
}

int mrna_export(const RunConfig& cfg) {
    const auto [record, problem] = load_protein(cfg);
    const auto lay = mrna::layout(problem);
    json doc;
    try {
        doc = json::parse(read_file(cfg.selection));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("selection JSON: ") + e.what());
    }
    if (!doc.contains("selection")) throw ValidationError("'" + cfg.selection + "' holds no selection");
    const auto sel = doc["selection"].get<mrna::Selection>();
    if (sel.size() != lay.length()) throw ValidationError("selection length does not match the protein");
    for (std::size_t p = 0; p < sel.size(); ++p) {
        if (sel[p] >= lay.choices(p)) throw ValidationError("selection out of range at position " + std::to_string(p + 1));
    }
    const auto sequence = mrna::selection_sequence(lay, sel);
    std::ostringstream fa;
    fa << '>' << record.header << " | mRNA objective " << format_double(mrna::selection_energy(problem, lay, sel))
       << '\n';
    for (std::size_t k = 0; k < sequence.size(); k += 60) fa << sequence.substr(k, 60) << '\n';
    Outputs outputs;
    outputs.write(cfg.out, fa.str());
    write_manifest(outputs, sibling(cfg.out, ".manifest.json"), cfg, {});
    return exit_ok;
}

// --- metrics ----------------------------------------------------------------

json to_json(const metrics::StructureReport& report) {
    json doc;
    doc["size"] = report.size;
    doc["density"] = report.density;
    doc["interconnectivity"] = report.interconnectivity;
    doc["rank1_dominance"] = report.rank1_dominance;
    json groups = json::object();
    for (const auto& g : report.rank1_groups) groups[g.label] = g.is_rank_one;
    doc["rank1_groups"] = groups;
    json counts = json::object();
    for (const auto& [sense, count] : report.constraint_type_counts) counts[std::string(to_string(sense))] = count;
    doc["constraints"] = counts;
    doc["penalty_separated"] = report.penalty_separated;
    return doc;
}

int cmd_metrics(const RunConfig& cfg) {
    const auto model = from_text(read_file(cfg.model));
    const auto report = metrics::analyze(model);
    std::string body;
    if (cfg.format == "text") {
        body = metrics::to_text(report);
    } else if (cfg.format == "json") {
        body = to_json(report).dump(2) + "\n";
    } else if (cfg.format == "csv") {
        body = metrics::csv_header() + "\n" + metrics::to_csv_row(report, fs::path(cfg.model).stem().string()) + "\n";
    } else {
        throw ConfigurationError("unknown format '" + cfg.format + "'");
    }
    Outputs outputs;
    outputs.write(cfg.out, body);
    write_manifest(outputs, sibling(cfg.out, ".manifest.json"), cfg, {});
    return exit_ok;
}

// --- bench ------------------------------------------------------------------

std::string resolve_path(const fs::path& base, const std::string& path) {
    const fs::path p(path);
    return p.is_absolute() ? p.string() : (base / p).string();
}

mrna::CodonWeights weights_from_json(const json& doc) {
    mrna::CodonWeights w;
    w.c_f = doc.value("c_f", w.c_f);
    w.c_gc = doc.value("c_gc", w.c_gc);
    w.c_r = doc.value("c_r", w.c_r);
    w.rho_target = doc.value("rho_target", w.rho_target);
    w.epsilon_f = doc.value("epsilon_f", w.epsilon_f);
    return w;
}

/// One manifest entry. Exactly one of "qubo", "mrna", "crn" or "artificial"
/// describes the model; "optimal_known" is a number or "exact".
bench::BenchInstance load_instance(const json& entry, const fs::path& base) {
    bench::BenchInstance inst;
    inst.id = entry.at("id").get<std::string>();
    std::function<double()> exact;
    if (entry.contains("qubo")) {
        auto model = std::make_shared<QuboModel>(from_text(read_file(resolve_path(base, entry["qubo"].get<std::string>()))));
        inst.build = [model] { return *model; };
        exact = [model] { return solvers::brute_force(*model).energy; };
    } else if (entry.contains("mrna")) {
        const auto& spec = entry["mrna"];
        const auto records = mrna::load_fasta(read_file(resolve_path(base, spec.at("fasta").get<std::string>())));
        if (records.empty()) throw ParseError("instance '" + inst.id + "': no FASTA records");
        mrna::CodonProblem p;
        p.protein = records.at(spec.value("record", std::size_t{0})).sequence;
        if (spec.contains("table")) p.table = mrna::load_codon_table(read_file(resolve_path(base, spec["table"])));
        if (spec.contains("weights")) p.weights = weights_from_json(spec["weights"]);
        p.gc_normalization = mrna::parse_gc_normalization(spec.value("gc_normalization", "nucleotide"));
        p.validate();
        const auto formulation = spec.value("formulation", "qubo");
        if (formulation == "qubo") {
            inst.build = [p] { return mrna::build_qubo_constrained(p); };
        } else if (formulation == "embedded") {
            const auto variant = mrna::parse_embedding_variant(spec.value("embedding", "one_hot_square"));
            inst.build = [p, variant] { return mrna::build_qubo_embedded(p, variant); };
        } else {
            throw ConfigurationError("instance '" + inst.id + "': unknown formulation '" + formulation + "'");
        }
        inst.codon = p;
        exact = [p] { return solvers::dp_codon_exact(p).energy; };
    } else if (entry.contains("crn") || entry.contains("artificial")) {
        std::shared_ptr<crn::ReactionNetwork> shared;
        EncodingScheme scheme;
        if (entry.contains("crn")) {
            const auto& spec = entry["crn"];
            shared = std::make_shared<crn::ReactionNetwork>(
                load_network_file(resolve_path(base, spec.at("network").get<std::string>())));
            scheme = parse_encoding(spec.value("encoding", "unary"));
        } else {
            const auto& spec = entry["artificial"];
            crn::GeneratorParams g;
            g.num_species = spec.value("species", g.num_species);
            g.reactions_per_species = spec.value("reactions_per_species", g.reactions_per_species);
            g.seed = spec.value("seed", g.seed);
            shared = std::make_shared<crn::ReactionNetwork>(crn::generate_artificial(g));
            scheme = parse_encoding(spec.value("encoding", "unary"));
        }
        inst.build = [shared, scheme] { return crn::build_qubo(*shared, scheme).model; };
        exact = [shared] { return solvers::solve_ip_exhaustive(crn::build_ip(*shared)).energy; };
    } else {
        throw ValidationError("instance '" + inst.id + "' names no model source");
    }
    if (entry.contains("optimal_known")) {
        const auto& known = entry["optimal_known"];
        if (known.is_number()) {
            inst.optimal_known = known.get<double>();
        } else if (known == "exact") {
            inst.optimal_known = exact();
        } else {
            throw ValidationError("instance '" + inst.id + "': optimal_known must be a number or \"exact\"");
        }
    }
    return inst;
}

bench::SolverSpec load_solver(const json& entry) {
    bench::SolverSpec spec;
    if (entry.is_string()) {
        spec.name = entry.get<std::string>();
        return spec;
    }
    spec.name = entry.at("name").get<std::string>();
    if (entry.contains("schedule")) spec.schedule = schedule_from_json(entry["schedule"], {});
    spec.replicas = entry.value("replicas", spec.replicas);
    spec.embed_constraints = entry.value("embed_constraints", spec.embed_constraints);
    spec.brute_cap = entry.value("brute_cap", spec.brute_cap);
    return spec;
}

int cmd_bench(const RunConfig& cfg, bool seed_given, bool workers_given, bool limit_given) {
    json manifest;
    try {
        manifest = json::parse(read_file(cfg.manifest));
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("bench manifest: ") + e.what());
    }
    const fs::path base = fs::path(cfg.manifest).parent_path();

    bench::BenchConfig config;
    config.repeats = manifest.value("repeats", config.repeats);
    config.master_seed = seed_given ? cfg.seed : manifest.value("seed", cfg.seed);
    config.workers = workers_given ? cfg.workers : manifest.value("workers", cfg.workers);
    config.time_limit_seconds = limit_given ? cfg.time_limit : manifest.value("time_limit_seconds", cfg.time_limit);
    config.timing = bench::parse_timing_scope(manifest.value("timing", "solve_only"));

    std::vector<bench::BenchInstance> instances;
    for (const auto& entry : manifest.at("instances")) instances.push_back(load_instance(entry, base));
    std::vector<bench::SolverSpec> specs;
    for (const auto& entry : manifest.at("solvers")) specs.push_back(load_solver(entry));
    if (instances.empty() || specs.empty()) throw ValidationError("bench manifest needs instances and solvers");

    const auto records = bench::run_matrix(instances, specs, config);
    for (const auto& r : records) {
        if (r.skipped) std::cerr << "qubench: skipped " << r.solver << " on " << r.instance << ": " << r.reason << '\n';
    }

    const fs::path dir(cfg.out);
    Outputs outputs;
    outputs.write(dir / "records.csv", bench::records_csv(records));
    outputs.write(dir / "skipped.csv", bench::skipped_csv(records));
    const bool any_run = std::any_of(records.begin(), records.end(), [](const auto& r) { return !r.skipped; });
    if (any_run) {
        outputs.write(dir / "summary.csv", bench::summary_csv(bench::summarize(records)));
        const auto plot = bench::scaling_plot(records);
        outputs.write(dir / "scaling.svg", plot.svg);
        outputs.write(dir / "scaling_points.csv", plot.points_csv);
        outputs.write(dir / "scaling_fits.csv", plot.fits_csv);
    } else {
        std::cerr << "qubench: every cell was skipped; no summary written\n";
    }

    json resolved;
    resolved["repeats"] = config.repeats;
    resolved["master_seed"] = config.master_seed;
    resolved["workers"] = config.workers;
    resolved["time_limit_seconds"] = config.time_limit_seconds;
    resolved["timing"] = bench::to_string(config.timing);
    resolved["manifest"] = manifest;
    json seeds = json::array();
    for (const auto& r : records) {
        seeds.push_back({{"instance", r.instance}, {"solver", r.solver}, {"seed", r.seed}});
    }
    resolved["cell_seeds"] = seeds;
    json optima = json::object();
    for (const auto& inst : instances) {
        if (inst.optimal_known) optima[inst.id] = *inst.optimal_known;
    }
    resolved["optimal_known"] = optima;
    write_manifest(outputs, dir / "run.manifest.json", cfg, resolved);
    return any_run ? exit_ok : exit_infeasible;
}

// --- command line -----------------------------------------------------------

void add_shared(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--out", cfg.out, "Output path")->required();
    sub->add_option("--seed", cfg.seed, "Random seed");
    sub->add_option("--time-limit", cfg.time_limit, "Per-solve time limit in seconds (0: none)")
        ->check(CLI::NonNegativeNumber);
    sub->add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
}

void add_solver_flags(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--t0", cfg.t0, "Initial temperature")->check(CLI::PositiveNumber);
    sub->add_option("--t-final", cfg.t_final, "Final temperature")->check(CLI::PositiveNumber);
    sub->add_option("--alpha", cfg.alpha, "Geometric cooling factor");
    sub->add_option("--sweeps", cfg.sweeps, "Sweeps per temperature level");
    sub->add_option("--replicas", cfg.replicas, "Replicas for da / pt (0: solver default)");
}

void add_codon_flags(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--fasta", cfg.fasta, "Protein FASTA")->required()->check(CLI::ExistingFile);
    sub->add_option("--table", cfg.table, "Codon usage CSV (default: uniform standard code)")->check(CLI::ExistingFile);
    sub->add_option("--record", cfg.record, "FASTA record index");
    sub->add_option("--gc-normalization", cfg.gc_normalization, "nucleotide or paper_faithful")
        ->check(CLI::IsMember({"nucleotide", "paper_faithful"}));
    sub->add_option("--embedding", cfg.embedding, "Penalty embedding variant")
        ->check(CLI::IsMember({"one_hot_square", "fox"}));
    sub->add_option("--c-f", cfg.weights.c_f, "Codon usage weight");
    sub->add_option("--c-gc", cfg.weights.c_gc, "GC content weight");
    sub->add_option("--c-r", cfg.weights.c_r, "Repetition weight");
    sub->add_option("--rho-target", cfg.weights.rho_target, "Target GC fraction");
    sub->add_option("--epsilon-f", cfg.weights.epsilon_f, "Usage log offset");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qubench: QUBO formulations, structure metrics, solvers and benchmarks"};
    app.require_subcommand(1);
    RunConfig cfg;
    for (int k = 1; k < argc; ++k) cfg.argv.emplace_back(argv[k]);
    std::function<int()> action;

    auto* crn_cmd = app.add_subcommand("crn", "Chemical reaction network pathways");
    crn_cmd->require_subcommand(1);
    auto* crn_build_cmd = crn_cmd->add_subcommand("build", "Write the QUBO or integer program of a network");
    crn_build_cmd->add_option("--network", cfg.network, "Network JSON")->required()->check(CLI::ExistingFile);
    crn_build_cmd->add_option("--formulation", cfg.formulation, "qubo, embedded or mip")
        ->check(CLI::IsMember({"qubo", "embedded", "mip"}));
    crn_build_cmd->add_option("--encoding", cfg.encoding, "unary or log")->check(CLI::IsMember({"unary", "log"}));
    add_shared(crn_build_cmd, cfg);
    crn_build_cmd->callback([&] { action = [&] { return crn_build(cfg); }; });

    auto* crn_solve_cmd = crn_cmd->add_subcommand("solve", "Find a cheapest balanced pathway");
    crn_solve_cmd->add_option("--network", cfg.network, "Network JSON")->required()->check(CLI::ExistingFile);
    crn_solve_cmd->add_option("--solver", cfg.solver, "brute, sa, da, pt or steepest")
        ->required()
        ->check(CLI::IsMember({"brute", "ip", "sa", "da", "pt", "steepest"}));
    crn_solve_cmd->add_option("--encoding", cfg.encoding, "unary or log")->check(CLI::IsMember({"unary", "log"}));
    crn_solve_cmd->add_flag("--dot", cfg.dot, "Also write <out>.dot");
    add_solver_flags(crn_solve_cmd, cfg);
    add_shared(crn_solve_cmd, cfg);
    crn_solve_cmd->callback([&] { action = [&] { return crn_solve(cfg); }; });

    auto* crn_export_cmd = crn_cmd->add_subcommand("export", "Graphviz DOT of a network or solution");
    crn_export_cmd->add_option("--network", cfg.network, "Network JSON")->required()->check(CLI::ExistingFile);
    crn_export_cmd->add_option("--solution", cfg.solution, "Solution or solve-result JSON")->check(CLI::ExistingFile);
    add_shared(crn_export_cmd, cfg);
    crn_export_cmd->callback([&] { action = [&] { return crn_export(cfg); }; });

    auto* crn_gen_cmd = crn_cmd->add_subcommand("generate", "Random artificial network");
    crn_gen_cmd->add_option("--species", cfg.generator.num_species, "Number of species")->check(CLI::PositiveNumber);
    crn_gen_cmd->add_option("--reactions-per-species", cfg.generator.reactions_per_species, "Producing reactions")
        ->check(CLI::PositiveNumber);
    crn_gen_cmd->add_option("--bound-max", cfg.generator.bound_range.second, "Largest reaction upper bound");
    add_shared(crn_gen_cmd, cfg);
    crn_gen_cmd->callback([&] {
        cfg.generator.seed = cfg.seed;
        action = [&] { return crn_generate(cfg); };
    });

    auto* mrna_cmd = app.add_subcommand("mrna", "mRNA codon selection");
    mrna_cmd->require_subcommand(1);
    auto* mrna_build_cmd = mrna_cmd->add_subcommand("build", "Write a codon-selection formulation");
    add_codon_flags(mrna_build_cmd, cfg);
    mrna_build_cmd->add_option("--formulation", cfg.formulation, "qubo, embedded, mip or cp")
        ->check(CLI::IsMember({"qubo", "embedded", "mip", "cp"}));
    add_shared(mrna_build_cmd, cfg);
    mrna_build_cmd->callback([&] { action = [&] { return mrna_build(cfg); }; });

    auto* mrna_solve_cmd = mrna_cmd->add_subcommand("solve", "Choose codons for a protein");
    add_codon_flags(mrna_solve_cmd, cfg);
    mrna_solve_cmd->add_option("--formulation", cfg.formulation, "qubo or embedded (QUBO solvers)")
        ->check(CLI::IsMember({"qubo", "embedded"}));
    mrna_solve_cmd->add_option("--solver", cfg.solver, "dp, mip, cp, brute, sa, da, pt or steepest")
        ->required()
        ->check(CLI::IsMember({"dp", "mip", "mip-enum", "cp", "cp-enum", "brute", "sa", "da", "pt", "steepest"}));
    add_solver_flags(mrna_solve_cmd, cfg);
    add_shared(mrna_solve_cmd, cfg);
    mrna_solve_cmd->callback([&] { action = [&] { return mrna_solve(cfg); }; });

    auto* mrna_export_cmd = mrna_cmd->add_subcommand("export", "FASTA of a solved codon selection");
    add_codon_flags(mrna_export_cmd, cfg);
    mrna_export_cmd->add_option("--selection", cfg.selection, "Solve-result JSON")
        ->required()
        ->check(CLI::ExistingFile);
    add_shared(mrna_export_cmd, cfg);
    mrna_export_cmd->callback([&] { action = [&] { return mrna_export(cfg); }; });

    auto* metrics_cmd = app.add_subcommand("metrics", "Structure metrics of a QUBO text file");
    metrics_cmd->add_option("--model", cfg.model, "QUBO text file")->required()->check(CLI::ExistingFile);
    metrics_cmd->add_option("--format", cfg.format, "text, json or csv")->check(CLI::IsMember({"text", "json", "csv"}));
    add_shared(metrics_cmd, cfg);
    metrics_cmd->callback([&] { action = [&] { return cmd_metrics(cfg); }; });

    auto* bench_cmd = app.add_subcommand("bench", "Run a solver x instance matrix");
    bench_cmd->add_option("--manifest", cfg.manifest, "Bench manifest JSON")->required()->check(CLI::ExistingFile);
    add_shared(bench_cmd, cfg);
    bench_cmd->callback([&] {
        const bool seed_given = bench_cmd->count("--seed") > 0;
        const bool workers_given = bench_cmd->count("--workers") > 0;
        const bool limit_given = bench_cmd->count("--time-limit") > 0;
        action = [&, seed_given, workers_given, limit_given] {
            return cmd_bench(cfg, seed_given, workers_given, limit_given);
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? exit_ok : exit_error;
    }
    for (const auto* sub : app.get_subcommands()) {
        cfg.subcommand = sub->get_name();
        for (const auto* leaf : sub->get_subcommands()) cfg.subcommand += " " + leaf->get_name();
    }

    try {
        return action();
    } catch (const NoFeasibleSolution& e) {
        std::cerr << "qubench: infeasible: " << e.what() << '\n';
        return exit_infeasible;
    } catch (const std::exception& e) {
        std::cerr << "qubench: error: " << e.what() << '\n';
        return exit_error;
    }
}
