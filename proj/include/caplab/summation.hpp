#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace caplab {

/// Pairwise (cascade) summation with a fixed split order. The result depends
/// only on the input sequence, never on how the caller parallelised the work
/// that produced it.
double pairwise_sum(std::span<const double> values);

/// SplitMix64 step; used to derive independent per-worker / per-instance seeds.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double unit_interval(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// 64-bit FNV-1a; stable across platforms, used for artifact content hashes.
std::uint64_t fnv1a64(std::string_view bytes);

}  // namespace caplab
