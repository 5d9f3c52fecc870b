// numerics.hpp - deterministic numerical kernels
//
// Unitary DFT pair, a time-domain circular-convolution oracle, CSCG block
// sampling, and the special functions used by the outage analysis:
//   bessel_k               K_nu(x), integral representation + asymptotic tail
//   lower_incomplete_gamma gamma(s, x), series / continued fraction
//   q_function             Q(x) = erfc(x / sqrt(2)) / 2
//
// The DFT is fixed-order (radix-2 for powers of two, direct sum otherwise) so
// repeated runs are bit-identical.

#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <vector>

#include "bbbc/rng.hpp"

namespace bbbc {

using cplx = std::complex<double>;
using cvec = std::vector<cplx>;

// unitary DFT: X_p = (1/sqrt(N)) sum_q x_q exp(-j 2 pi p q / N)
cvec dft(const cvec& x);
cvec idft(const cvec& X);

// in-place variants for hot paths; same transform, no allocation
void dft_inplace(cvec& x);
void idft_inplace(cvec& x);

// length-N cyclic convolution, direct O(N^2) time-domain sum; serves as an
// independent oracle for DFT-based paths
cvec circular_convolve(const cvec& a, const cvec& b);

// n i.i.d. CN(0, variance) samples
cvec sample_cscg(std::size_t n, double variance, RngStream& rng);

// modified Bessel function of the second kind, K_nu(x); K_{-nu} = K_nu
double bessel_k(double nu, double x);

// lower incomplete gamma gamma(s, x); overflows with Gamma(s) for s > ~171
double lower_incomplete_gamma(double s, double x);

// regularized P(s, x) = gamma(s, x) / Gamma(s), safe for large s
double regularized_lower_gamma(double s, double x);

double q_function(double x);

// adaptive Gauss-Kronrod 7-15 on [a, b]; refines the worst segment until the
// accumulated error estimate drops below max(abs_tol, rel_tol * |integral|)
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol = 1e-10,
                          double abs_tol = 0.0, int max_segments = 4000);

}  // namespace bbbc
