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

#include "qubench/bench.hpp"
#include "qubench/crn.hpp"
#include "qubench/encodings.hpp"
#include "qubench/errors.hpp"
#include "qubench/linear_model.hpp"
#include "qubench/metrics.hpp"
#include "qubench/mrna.hpp"
#include "qubench/penalty.hpp"
#include "qubench/qubo.hpp"
#include "qubench/qubo_io.hpp"
#include "qubench/random.hpp"
#include "qubench/solvers.hpp"
