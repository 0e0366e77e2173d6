#include "fxres/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <cstring>

namespace fxres::kernels {

namespace detail {

double sum_scalar(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc;
}

double dot_scalar(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double sumsq_dev_scalar(std::span<const double> x, double c) {
    double acc = 0.0;
    for (double v : x) {
        const double d = v - c;
        acc += d * d;
    }
    return acc;
}

double sqdist_scalar(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void axpy_scalar(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    for (size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void clamp_scalar(std::span<double> x, double lo, double hi) {
    for (double& v : x) v = std::min(std::max(v, lo), hi);
}

bool avx2_supported() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

} // namespace detail

namespace {

Isa resolve_isa() {
    if (const char* env = std::getenv("FXRES_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Isa::Scalar;
        if (std::strcmp(env, "avx2") == 0 && detail::avx2_supported()) return Isa::Avx2;
        return Isa::Scalar;
    }
    return detail::avx2_supported() ? Isa::Avx2 : Isa::Scalar;
}

} // namespace

Isa active_isa() {
    static const Isa isa = resolve_isa();
    return isa;
}

const char* isa_name(Isa isa) {
    switch (isa) {
        case Isa::Avx2: return "avx2";
        case Isa::Scalar: return "scalar";
    }
    return "scalar";
}

double sum(std::span<const double> x) {
    return active_isa() == Isa::Avx2 ? detail::sum_avx2(x) : detail::sum_scalar(x);
}

double dot(std::span<const double> a, std::span<const double> b) {
    return active_isa() == Isa::Avx2 ? detail::dot_avx2(a, b) : detail::dot_scalar(a, b);
}

double sumsq_dev(std::span<const double> x, double c) {
    return active_isa() == Isa::Avx2 ? detail::sumsq_dev_avx2(x, c)
                                     : detail::sumsq_dev_scalar(x, c);
}

double sqdist(std::span<const double> a, std::span<const double> b) {
    return active_isa() == Isa::Avx2 ? detail::sqdist_avx2(a, b) : detail::sqdist_scalar(a, b);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    if (active_isa() == Isa::Avx2) {
        detail::axpy_avx2(alpha, x, y);
    } else {
        detail::axpy_scalar(alpha, x, y);
    }
}

void clamp(std::span<double> x, double lo, double hi) {
    if (active_isa() == Isa::Avx2) {
        detail::clamp_avx2(x, lo, hi);
    } else {
        detail::clamp_scalar(x, lo, hi);
    }
}

} // namespace fxres::kernels
