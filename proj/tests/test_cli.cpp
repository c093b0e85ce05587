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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <set>

#include <nlohmann/json.hpp>

#include "qubench/mrna.hpp"
#include "support.hpp"

using namespace qubench;
using Catch::Approx;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Fresh empty directory under the scratch root.
fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(QUBENCH_SCRATCH_DIR) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

/// Run the CLI inside `dir` with stderr captured to dir/stderr.txt.
int run(const fs::path& dir, const std::string& args) {
    const std::string cmd = "cd '" + dir.string() + "' && '" + QUBENCH_CLI_PATH + "' " + args + " > stdout.txt 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string data(const std::string& name) { return "'" + testing::data_path(name) + "'"; }

json load_json(const fs::path& path) { return json::parse(testing::read_file(path.string())); }

json without_timing(json doc) {
    doc.erase("time_seconds");
    return doc;
}

}  // namespace

TEST_CASE("usage and exit codes") {
    const auto dir = scratch("usage");
    CHECK(run(dir, "") == 1);
    CHECK(run(dir, "--help") == 0);
    CHECK(run(dir, "crn solve --network " + data("solvay.json") + " --solver nope --out r.json") == 1);
    CHECK(run(dir, "crn solve --network missing.json --solver brute --out r.json") == 1);
    CHECK_FALSE(fs::exists(dir / "r.json"));
    CHECK(run(dir, "crn solve --network " + data("infeasible.json") + " --solver brute --out inf.json") == 2);
    CHECK(testing::read_file((dir / "stderr.txt").string()).find("infeasible") != std::string::npos);
}

TEST_CASE("crn solve on the Solvay fixture") {
    const auto dir = scratch("crn_solve");
    REQUIRE(run(dir, "crn solve --network " + data("solvay.json") + " --solver brute --dot --out r.json") == 0);
    const auto r = load_json(dir / "r.json");
    CHECK(r["feasible"] == true);
    CHECK(r["balanced"] == true);
    CHECK(r["energy"].get<double>() == 33.0);
    CHECK(r["solution"]["R2_carbonation"] == 2);
    CHECK(r["solution"]["buy_NaCl"] == 2);
    CHECK(fs::exists(dir / "r.json.dot"));

    const auto manifest = load_json(dir / "r.json.manifest.json");
    CHECK(manifest["config"]["subcommand"] == "crn solve");
    CHECK(manifest["config"]["solver"] == "brute");
    CHECK(manifest["config"]["seed"] == 1);
    CHECK(manifest["outputs"].size() == 2);
    CHECK(testing::read_file((dir / "stdout.txt").string()).empty());

    REQUIRE(run(dir, "crn export --network " + data("solvay.json") + " --solution r.json --out sol.dot") == 0);
    const auto dot = testing::read_file((dir / "sol.dot").string());
    CHECK(dot.rfind("digraph", 0) == 0);
    CHECK(dot == testing::read_file((dir / "r.json.dot").string()));
}

TEST_CASE("crn build, generate and metrics") {
    const auto dir = scratch("crn_build");
    REQUIRE(run(dir, "crn build --network " + data("solvay.json") + " --encoding log --out solvay.qubo") == 0);
    REQUIRE(run(dir, "metrics --model solvay.qubo --format json --out m.json") == 0);
    const auto m = load_json(dir / "m.json");
    CHECK(m["rank1_dominance"] == 0.0);
    CHECK(m["penalty_separated"] == true);

    REQUIRE(run(dir, "crn build --network " + data("solvay.json") + " --formulation mip --out solvay.lp") == 0);
    const auto lp = testing::read_file((dir / "solvay.lp").string());
    CHECK(lp.find("Minimize") != std::string::npos);
    CHECK(lp.find("balance_NaCl") != std::string::npos);

    REQUIRE(run(dir, "crn generate --species 6 --reactions-per-species 2 --seed 4 --out a.json") == 0);
    REQUIRE(run(dir, "crn generate --species 6 --reactions-per-species 2 --seed 4 --out b.json") == 0);
    CHECK(testing::read_file((dir / "a.json").string()) == testing::read_file((dir / "b.json").string()));
    REQUIRE(run(dir, "crn build --network a.json --out a.qubo") == 0);
    CHECK(testing::read_file((dir / "a.qubo").string()).rfind("qubo ", 0) == 0);
}

TEST_CASE("mrna formulations") {
    const auto dir = scratch("mrna_build");
    const auto inputs = "--fasta " + data("lgw.fa") + " --table " + data("standard_code.csv");
    REQUIRE(run(dir, "mrna build " + inputs + " --formulation mip --out lgw.lp") == 0);
    const auto lp = testing::read_file((dir / "lgw.lp").string());
    std::set<std::string> x_vars;
    for (std::size_t at = lp.find("x_"); at != std::string::npos; at = lp.find("x_", at + 1)) {
        if (at > 0 && lp[at - 1] != ' ') continue;
        const auto end = lp.find_first_of(" \n", at);
        x_vars.insert(lp.substr(at, end - at));
    }
    CHECK(x_vars.size() == 11);

    REQUIRE(run(dir, "mrna build " + inputs + " --formulation cp --out lgw.cp.json") == 0);
    CHECK(load_json(dir / "lgw.cp.json")["format"] == "qubench-cp-1");

    REQUIRE(run(dir, "mrna build " + inputs + " --out lgw.qubo") == 0);
    REQUIRE(run(dir, "metrics --model lgw.qubo --out lgw.txt") == 0);
    CHECK(testing::read_file((dir / "lgw.txt").string()).find("rank1_group.H_GC: true") != std::string::npos);
    REQUIRE(run(dir, "metrics --model lgw.qubo --format json --out lgw.json") == 0);
    CHECK(load_json(dir / "lgw.json")["rank1_groups"]["H_GC"] == true);

    REQUIRE(run(dir, "mrna build " + inputs + " --formulation embedded --embedding fox --out fox.qubo") == 0);
    CHECK(testing::read_file((dir / "fox.qubo").string()).find("con ") == std::string::npos);

    CHECK(run(dir, "mrna build --fasta " + data("bad_letter.fa") + " --out bad.qubo") == 1);
    CHECK(testing::read_file((dir / "stderr.txt").string()).find("position 3") != std::string::npos);
    CHECK_FALSE(fs::exists(dir / "bad.qubo"));
}

TEST_CASE("mrna solve and export") {
    const auto dir = scratch("mrna_solve");
    const auto inputs = "--fasta " + data("lgw.fa") + " --table " + data("standard_code.csv");
    mrna::CodonProblem p;
    p.protein = "LGW";
    p.table = mrna::load_codon_table(testing::read_file(testing::data_path("standard_code.csv")));
    const auto lay = mrna::layout(p);

    for (const std::string solver : {"dp", "mip", "cp", "brute", "sa", "da", "pt", "steepest"}) {
        const auto out = solver + ".json";
        const int rc = run(dir, "mrna solve " + inputs + " --solver " + solver + " --seed 3 --out " + out);
        const auto doc = load_json(dir / out);
        if (solver == "steepest" && rc == 2) continue;  // a local minimum may break one-hot
        REQUIRE(rc == 0);
        const auto sel = doc["selection"].get<mrna::Selection>();
        CHECK(mrna::selection_energy(p, lay, sel) == Approx(doc["energy"].get<double>()).margin(1e-9));
        CHECK(doc["sequence"] == mrna::selection_sequence(lay, sel));
    }
    const double optimum = load_json(dir / "dp.json")["energy"].get<double>();
    for (const char* exact : {"mip.json", "cp.json", "brute.json"}) {
        CHECK(load_json(dir / exact)["energy"].get<double>() == Approx(optimum).margin(1e-9));
    }

    REQUIRE(run(dir, "mrna solve " + inputs + " --solver sa --formulation embedded --seed 3 --out emb.json") == 0);
    CHECK(load_json(dir / "emb.json")["energy"].get<double>() ==
          Approx(load_json(dir / "emb.json")["objective"].get<double>()).margin(1e-9));

    REQUIRE(run(dir, "mrna export " + inputs + " --selection dp.json --out lgw_opt.fa") == 0);
    const auto fa = testing::read_file((dir / "lgw_opt.fa").string());
    CHECK(fa.find(load_json(dir / "dp.json")["sequence"].get<std::string>()) != std::string::npos);
    CHECK(fa[0] == '>');
}

TEST_CASE("manifests reproduce runs") {
    const auto dir = scratch("replay");
    const auto inputs = "--fasta " + data("lgw.fa") + " --table " + data("standard_code.csv");
    REQUIRE(run(dir, "mrna solve " + inputs + " --solver pt --seed 11 --workers 2 --out a.json") == 0);
    const auto manifest = load_json(dir / "a.json.manifest.json");
    CHECK(manifest["resolved"]["replicas"] == 8);
    CHECK(manifest["resolved"]["schedule"]["seed"] == 11);
    std::string args;
    for (const auto& a : manifest["config"]["argv"]) {
        std::string s = a.get<std::string>();
        if (s == "a.json") s = "b.json";
        args += "'" + s + "' ";
    }
    REQUIRE(run(dir, args) == 0);
    CHECK(without_timing(load_json(dir / "a.json")) == without_timing(load_json(dir / "b.json")));
}

TEST_CASE("writes stay under --out") {
    const auto dir = scratch("confined");
    REQUIRE(run(dir, "crn solve --network " + data("solvay.json") + " --solver brute --dot --out out/r.json") == 0);
    REQUIRE(run(dir, "bench --manifest " + data("bench_manifest.json") + " --out out/bench") == 0);
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        const auto rel = fs::relative(entry.path(), dir).string();
        if (rel == "stdout.txt" || rel == "stderr.txt") continue;
        CHECK(rel.rfind("out", 0) == 0);
    }
}

TEST_CASE("bench over a manifest") {
    const auto dir = scratch("bench");
    REQUIRE(run(dir, "bench --manifest " + data("bench_manifest.json") + " --out results") == 0);
    const auto records = testing::read_file((dir / "results/records.csv").string());
    CHECK(std::count(records.begin(), records.end(), '\n') == 5);
    CHECK(records.rfind("instance,num_vars,solver,seed,energy,feasible,time_seconds,reached_optimal\n", 0) == 0);
    const auto summary = testing::read_file((dir / "results/summary.csv").string());
    CHECK(summary.rfind("solver,AC,ATTS,STTS,MTTS\n", 0) == 0);
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 3);
    CHECK(testing::read_file((dir / "results/skipped.csv").string()) == "instance,num_vars,solver,seed,reason\n");
    CHECK(testing::read_file((dir / "results/scaling.svg").string()).rfind("<svg", 0) == 0);
    const auto manifest = load_json(dir / "results/run.manifest.json");
    CHECK(manifest["resolved"]["master_seed"] == 7);
    CHECK(manifest["resolved"]["cell_seeds"].size() == 4);

    REQUIRE(run(dir, "bench --manifest " + data("bench_manifest.json") + " --seed 7 --out again") == 0);
    const auto strip_time = [](const std::string& csv) {
        std::string out;
        std::istringstream in(csv);
        for (std::string line; std::getline(in, line);) {
            std::vector<std::string> cells;
            std::istringstream row(line);
            for (std::string cell; std::getline(row, cell, ',');) cells.push_back(cell);
            cells.erase(cells.begin() + 6);
            for (const auto& c : cells) out += c + ",";
            out += "\n";
        }
        return out;
    };
    CHECK(strip_time(records) == strip_time(testing::read_file((dir / "again/records.csv").string())));
}
