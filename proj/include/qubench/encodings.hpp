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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "qubench/errors.hpp"
#include "qubench/qubo.hpp"

namespace qubench {

enum class EncodingScheme { unary, log };

inline std::string_view to_string(EncodingScheme scheme) noexcept {
    return scheme == EncodingScheme::unary ? "unary" : "log";
}

inline EncodingScheme parse_encoding(std::string_view name) {
    if (name == "unary") return EncodingScheme::unary;
    if (name == "log") return EncodingScheme::log;
    throw ConfigurationError("unknown encoding '" + std::string(name) + "' (expected unary or log)");
}

/// Binary encoding of an integer in [lower, upper]:
/// value = lower + sum_k weight_k * q_k.
struct IntegerEncoding {
    std::int64_t lower = 0;
    std::int64_t upper = 0;
    EncodingScheme scheme = EncodingScheme::unary;
    std::vector<std::int64_t> weights;
    /// Index of the first bit inside a host model.
    std::size_t bit_offset = 0;

    std::size_t num_bits() const noexcept { return weights.size(); }
};

namespace detail {

inline void check_bounds(std::int64_t lower, std::int64_t upper) {
    if (lower > upper) {
        throw BoundsError("lower bound " + std::to_string(lower) + " exceeds upper bound " +
                          std::to_string(upper));
    }
}

}  // namespace detail

/// d = upper - lower bits of weight 1.
inline IntegerEncoding make_unary(std::int64_t lower, std::int64_t upper, std::size_t bit_offset = 0) {
    detail::check_bounds(lower, upper);
    IntegerEncoding enc{lower, upper, EncodingScheme::unary, {}, bit_offset};
    enc.weights.assign(static_cast<std::size_t>(upper - lower), 1);
    return enc;
}

/// K + 1 bits for d = upper - lower > 0, K = floor(log2 d): weights
/// 2^0 .. 2^(K-1) followed by the residual d - (2^K - 1). d = 0 gives no bits.
inline IntegerEncoding make_log(std::int64_t lower, std::int64_t upper, std::size_t bit_offset = 0) {
    detail::check_bounds(lower, upper);
    IntegerEncoding enc{lower, upper, EncodingScheme::log, {}, bit_offset};
    const auto d = static_cast<std::uint64_t>(upper - lower);
    if (d == 0) return enc;
    const int k = std::bit_width(d) - 1;
    for (int b = 0; b < k; ++b) enc.weights.push_back(std::int64_t{1} << b);
    enc.weights.push_back(static_cast<std::int64_t>(d - ((std::uint64_t{1} << k) - 1)));
    return enc;
}

inline IntegerEncoding make_encoding(EncodingScheme scheme, std::int64_t lower, std::int64_t upper,
                                     std::size_t bit_offset = 0) {
    return scheme == EncodingScheme::unary ? make_unary(lower, upper, bit_offset)
                                           : make_log(lower, upper, bit_offset);
}

/// Integer represented by `bits` (the encoding's own bits, not the host model).
inline std::int64_t decode(const IntegerEncoding& enc, BitsView bits) {
    if (bits.size() != enc.num_bits()) {
        throw DimensionError("encoding has " + std::to_string(enc.num_bits()) + " bits, got " +
                             std::to_string(bits.size()));
    }
    std::int64_t value = enc.lower;
    for (std::size_t k = 0; k < bits.size(); ++k) {
        if (bits[k]) value += enc.weights[k];
    }
    return value;
}

/// Decode the encoding's slice of a full host-model assignment.
inline std::int64_t decode_in(const IntegerEncoding& enc, BitsView assignment) {
    if (enc.bit_offset + enc.num_bits() > assignment.size()) {
        throw DimensionError("encoding bits [" + std::to_string(enc.bit_offset) + ", " +
                             std::to_string(enc.bit_offset + enc.num_bits()) + ") exceed assignment length " +
                             std::to_string(assignment.size()));
    }
    return decode(enc, assignment.subspan(enc.bit_offset, enc.num_bits()));
}

/// Canonical bit pattern for `value`: a prefix of ones for unary; for log,
/// plain binary in the power-of-two bits, with the residual bit set only
/// when the value does not fit below 2^K.
inline Bits encode_value(const IntegerEncoding& enc, std::int64_t value) {
    if (value < enc.lower || value > enc.upper) {
        throw BoundsError("value " + std::to_string(value) + " outside [" + std::to_string(enc.lower) +
                          ", " + std::to_string(enc.upper) + "]");
    }
    Bits bits(enc.num_bits(), 0);
    auto rest = static_cast<std::uint64_t>(value - enc.lower);
    if (enc.scheme == EncodingScheme::unary) {
        for (std::uint64_t k = 0; k < rest; ++k) bits[k] = 1;
        return bits;
    }
    if (bits.empty()) return bits;
    const std::size_t last = bits.size() - 1;
    const std::uint64_t below = (std::uint64_t{1} << last) - 1;
    if (rest > below) {
        bits[last] = 1;
        rest -= static_cast<std::uint64_t>(enc.weights[last]);
    }
    for (std::size_t b = 0; b < last; ++b) bits[b] = static_cast<std::uint8_t>((rest >> b) & 1U);
    return bits;
}

}  // namespace qubench
