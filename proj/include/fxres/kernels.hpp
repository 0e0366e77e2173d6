#pragma once

#include <span>

namespace fxres::kernels {

// Data-parallel inner loops used by the estimation layers: reductions for
// windowed moments, squared distances for the cluster assignment step,
// clamping for winsorization, weighted accumulation for path aggregation.
//
// Each kernel has a scalar reference implementation and an AVX2 variant.
// The active variant is selected once at startup from CPUID; set
// FXRES_SIMD=scalar (or avx2) to force a lane. Within one process the
// selection is fixed, so results are reproducible run to run.

enum class Isa { Scalar, Avx2 };

Isa active_isa();
const char* isa_name(Isa isa);

double sum(std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);

// sum of (x_i - c)^2
double sumsq_dev(std::span<const double> x, double c);

// squared Euclidean distance
double sqdist(std::span<const double> a, std::span<const double> b);

// y_i += alpha * x_i
void axpy(double alpha, std::span<const double> x, std::span<double> y);

// x_i <- min(max(x_i, lo), hi)
void clamp(std::span<double> x, double lo, double hi);

namespace detail {

double sum_scalar(std::span<const double> x);
double dot_scalar(std::span<const double> a, std::span<const double> b);
double sumsq_dev_scalar(std::span<const double> x, double c);
double sqdist_scalar(std::span<const double> a, std::span<const double> b);
void axpy_scalar(double alpha, std::span<const double> x, std::span<double> y);
void clamp_scalar(std::span<double> x, double lo, double hi);

double sum_avx2(std::span<const double> x);
double dot_avx2(std::span<const double> a, std::span<const double> b);
double sumsq_dev_avx2(std::span<const double> x, double c);
double sqdist_avx2(std::span<const double> a, std::span<const double> b);
void axpy_avx2(double alpha, std::span<const double> x, std::span<double> y);
void clamp_avx2(std::span<double> x, double lo, double hi);

bool avx2_supported();

} // namespace detail

} // namespace fxres::kernels
