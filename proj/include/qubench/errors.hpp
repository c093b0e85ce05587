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

#include <stdexcept>
#include <string>

namespace qubench {

/// Assignment length does not match the model's variable count.
class DimensionError : public std::invalid_argument {
 public:
    using std::invalid_argument::invalid_argument;
};

/// Variable index outside [0, num_vars).
class IndexError : public std::out_of_range {
 public:
    using std::out_of_range::out_of_range;
};

class UnsupportedEmbedding : public std::invalid_argument {
 public:
    using std::invalid_argument::invalid_argument;
};

class UndefinedMetric : public std::domain_error {
 public:
    using std::domain_error::domain_error;
};

class UnknownGroup : public std::invalid_argument {
 public:
    using std::invalid_argument::invalid_argument;
};

class BoundsError : public std::invalid_argument {
 public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed input text (model files, networks, FASTA, codon tables).
class ParseError : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// Input parsed but violates a domain invariant.
class ValidationError : public std::invalid_argument {
 public:
    using std::invalid_argument::invalid_argument;
};

class ConfigurationError : public std::invalid_argument {
 public:
    using std::invalid_argument::invalid_argument;
};

class NoFeasibleSolution : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// An exact method was asked to do more work than its configured budget.
class BudgetExceeded : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

}  // namespace qubench
