#pragma once

#include <complex>
#include <cstddef>
#include <span>

/// Data-parallel inner loops. Each kernel exists twice: a plain serial loop
/// kept as the reference, and an OpenMP version used by the library. The
/// parallel reductions sum over a fixed block decomposition so their result
/// does not depend on the number of threads.
namespace cqnls::kernels {

using cplx = std::complex<double>;

/// Number of partial sums used by the parallel reductions.
inline constexpr std::size_t kReductionBlocks = 64;

namespace serial {

double weighted_sum(std::span<const double> values, std::span<const double> weights);

/// sum_i w_i |z_i|^2
double weighted_norm_sq(std::span<const cplx> z, std::span<const double> weights);

/// v_i <- v_i exp(i tau (|u_i|^2 - |u_i|^4)) damping_i with u_i = v_i inv_r_i.
/// An empty damping span means no absorption.
void nonlinear_phase(std::span<cplx> v, std::span<const double> inv_r, double tau,
                     std::span<const double> damping);

/// a_i <- a_i b_i
void pointwise_multiply(std::span<cplx> a, std::span<const cplx> b);

}  // namespace serial

namespace parallel {

double weighted_sum(std::span<const double> values, std::span<const double> weights);
double weighted_norm_sq(std::span<const cplx> z, std::span<const double> weights);
void nonlinear_phase(std::span<cplx> v, std::span<const double> inv_r, double tau,
                     std::span<const double> damping);
void pointwise_multiply(std::span<cplx> a, std::span<const cplx> b);

}  // namespace parallel

}  // namespace cqnls::kernels
