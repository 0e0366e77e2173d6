// AVX2 kernel variants. This translation unit is compiled with
// -mavx2 -mfma; it must only be entered through the dispatch layer after
// the CPUID check.

#include <cassert>
#include <cstddef>

#include "fxres/kernels.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace fxres::kernels::detail {

namespace {

inline double hsum256(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

} // namespace

double sum_avx2(std::span<const double> x) {
    const size_t n = x.size();
    const double* p = x.data();
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_add_pd(acc, _mm256_loadu_pd(p + i));
    }
    double out = hsum256(acc);
    for (; i < n; ++i) out += p[i];
    return out;
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const size_t n = a.size();
    const double* pa = a.data();
    const double* pb = b.data();
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i), acc);
    }
    double out = hsum256(acc);
    for (; i < n; ++i) out += pa[i] * pb[i];
    return out;
}

double sumsq_dev_avx2(std::span<const double> x, double c) {
    const size_t n = x.size();
    const double* p = x.data();
    const __m256d vc = _mm256_set1_pd(c);
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(p + i), vc);
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double out = hsum256(acc);
    for (; i < n; ++i) {
        const double d = p[i] - c;
        out += d * d;
    }
    return out;
}

double sqdist_avx2(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    const size_t n = a.size();
    const double* pa = a.data();
    const double* pb = b.data();
    __m256d acc = _mm256_setzero_pd();
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(pa + i), _mm256_loadu_pd(pb + i));
        acc = _mm256_fmadd_pd(d, d, acc);
    }
    double out = hsum256(acc);
    for (; i < n; ++i) {
        const double d = pa[i] - pb[i];
        out += d * d;
    }
    return out;
}

void axpy_avx2(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    const size_t n = x.size();
    const double* px = x.data();
    double* py = y.data();
    const __m256d va = _mm256_set1_pd(alpha);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(px + i), _mm256_loadu_pd(py + i));
        _mm256_storeu_pd(py + i, r);
    }
    for (; i < n; ++i) py[i] += alpha * px[i];
}

void clamp_avx2(std::span<double> x, double lo, double hi) {
    const size_t n = x.size();
    double* p = x.data();
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vhi = _mm256_set1_pd(hi);
    size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_min_pd(_mm256_max_pd(_mm256_loadu_pd(p + i), vlo), vhi);
        _mm256_storeu_pd(p + i, v);
    }
    for (; i < n; ++i) p[i] = p[i] < lo ? lo : (p[i] > hi ? hi : p[i]);
}

} // namespace fxres::kernels::detail

#else // non-x86: AVX2 entry points fall back to scalar

namespace fxres::kernels::detail {

double sum_avx2(std::span<const double> x) { return sum_scalar(x); }
double dot_avx2(std::span<const double> a, std::span<const double> b) { return dot_scalar(a, b); }
double sumsq_dev_avx2(std::span<const double> x, double c) { return sumsq_dev_scalar(x, c); }
double sqdist_avx2(std::span<const double> a, std::span<const double> b) {
    return sqdist_scalar(a, b);
}
void axpy_avx2(double alpha, std::span<const double> x, std::span<double> y) {
    axpy_scalar(alpha, x, y);
}
void clamp_avx2(std::span<double> x, double lo, double hi) { clamp_scalar(x, lo, hi); }

} // namespace fxres::kernels::detail

#endif
