#pragma once

#include <cstddef>
#include <string_view>

// Squared-Euclidean distance kernels. These sit on the hot path of kNN graph
// construction and 1-NN classification, where the inner loop is a plain
// reduction over contiguous coordinate rows. A scalar reference kernel is
// always available; wider variants are selected once at runtime from CPU
// capabilities. All variants compute the same reduction; they may differ by
// floating-point rounding only (FMA, lane reassociation), never by contract.

namespace te::simd {

using SqDistFn = double (*)(const double*, const double*, std::size_t);

/// Reference kernel: straight scalar loop. Kept as the comparison oracle.
double squared_distance_scalar(const double* a, const double* b, std::size_t d);

#if defined(__x86_64__) || defined(_M_X64)
double squared_distance_avx2(const double* a, const double* b, std::size_t d);
#endif
#if defined(__aarch64__)
double squared_distance_neon(const double* a, const double* b, std::size_t d);
#endif

/// Kernel chosen for this machine; resolved once, thread-safe.
SqDistFn dispatch();

/// Name of the dispatched variant ("scalar", "avx2", "neon").
std::string_view dispatch_name();

/// Squared Euclidean distance between two length-d rows via the active kernel.
inline double squared_distance(const double* a, const double* b, std::size_t d) {
    return dispatch()(a, b, d);
}

} // namespace te::simd
