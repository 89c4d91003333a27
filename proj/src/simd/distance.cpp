#include "te/simd/distance.hpp"

#if defined(__aarch64__)
#include <arm_neon.h>
#endif

namespace te::simd {

double squared_distance_scalar(const double* a, const double* b, std::size_t d) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}

#if defined(__aarch64__)
double squared_distance_neon(const double* a, const double* b, std::size_t d) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= d; i += 4) {
        const float64x2_t d0 = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        const float64x2_t d1 = vsubq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
        acc0 = vfmaq_f64(acc0, d0, d0);
        acc1 = vfmaq_f64(acc1, d1, d1);
    }
    double acc = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < d; ++i) {
        const double diff = a[i] - b[i];
        acc += diff * diff;
    }
    return acc;
}
#endif

namespace {

SqDistFn resolve() {
#if defined(__x86_64__) || defined(_M_X64)
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return &squared_distance_avx2;
    }
#elif defined(__aarch64__)
    return &squared_distance_neon;
#endif
    return &squared_distance_scalar;
}

} // namespace

SqDistFn dispatch() {
    static const SqDistFn fn = resolve();
    return fn;
}

std::string_view dispatch_name() {
    const SqDistFn fn = dispatch();
#if defined(__x86_64__) || defined(_M_X64)
    if (fn == &squared_distance_avx2) return "avx2";
#endif
#if defined(__aarch64__)
    if (fn == &squared_distance_neon) return "neon";
#endif
    return "scalar";
}

} // namespace te::simd
