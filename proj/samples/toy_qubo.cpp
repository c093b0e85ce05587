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

// Build the two-variable toy model, inspect it, and solve it three ways.

#include <cstdio>

#include "qubench/qubench.hpp"

int main() {
    using namespace qubench;

    QuboModel model(2);
    model.add_term(0, 0, -2.0, "cost");
    model.add_term(1, 1, 3.0, "cost");
    model.add_term(0, 1, 4.0, "coupling");

    std::printf("%s", to_text(model).c_str());
    std::printf("density %.3f\n", metrics::density(model));

    const auto exact = solvers::brute_force(model);
    std::printf("brute   E=%g x=(%d,%d)\n", exact.energy, exact.assignment[0], exact.assignment[1]);

    const auto sa = solvers::simulated_annealing(model, 42);
    std::printf("sa      E=%g\n", sa.energy);

    solvers::DaOptions pt;
    pt.mode = solvers::DaMode::parallel_tempering;
    pt.replicas = 4;
    const auto da = solvers::da_sweep_solver(model, 42, pt);
    std::printf("pt      E=%g\n", da.energy);
    return 0;
}
