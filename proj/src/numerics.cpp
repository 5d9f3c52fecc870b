#include "bbbc/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bbbc {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// iterative radix-2 Cooley-Tukey, unnormalized, fixed butterfly order
void fft_pow2(cvec& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

void dft_direct(cvec& a, bool inverse) {
  const std::size_t n = a.size();
  cvec out(n, cplx(0.0, 0.0));
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t p = 0; p < n; ++p) {
    for (std::size_t q = 0; q < n; ++q) {
      const double ang =
          sign * 2.0 * kPi * static_cast<double>((p * q) % n) / static_cast<double>(n);
      out[p] += a[q] * cplx(std::cos(ang), std::sin(ang));
    }
  }
  a = std::move(out);
}

void transform(cvec& x, bool inverse) {
  if (x.empty()) throw std::invalid_argument("dft: empty input");
  if (is_pow2(x.size()))
    fft_pow2(x, inverse);
  else
    dft_direct(x, inverse);
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (auto& v : x) v *= scale;
}

}  // namespace

cvec dft(const cvec& x) {
  cvec y = x;
  transform(y, false);
  return y;
}

cvec idft(const cvec& X) {
  cvec y = X;
  transform(y, true);
  return y;
}

void dft_inplace(cvec& x) { transform(x, false); }
void idft_inplace(cvec& x) { transform(x, true); }

cvec circular_convolve(const cvec& a, const cvec& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("circular_convolve: length mismatch");
  const std::size_t n = a.size();
  cvec out(n, cplx(0.0, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    cplx acc(0.0, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      acc += a[k] * b[(i + n - k) % n];
    }
    out[i] = acc;
  }
  return out;
}

cvec sample_cscg(std::size_t n, double variance, RngStream& rng) {
  if (variance < 0.0)
    throw std::invalid_argument("sample_cscg: negative variance");
  cvec out(n);
  for (auto& v : out) v = rng.next_cscg(variance);
  return out;
}

// ---------------------------------------------------------------------------
// adaptive Gauss-Kronrod 7-15

namespace {

// QUADPACK 15-point Kronrod nodes/weights on [-1, 1]; Gauss points are the
// odd-indexed nodes
constexpr double kXgk[8] = {
    0.991455371120812639206854697526, 0.949107912342758524526189684048,
    0.864864423359769072789712788641, 0.741531185599394439863864773281,
    0.586087235467691130294144838259, 0.405845151377397166906606412077,
    0.207784955007898467600689403773, 0.0};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058, 0.063092092629978553290700663189,
    0.104790010322250183839876322542, 0.140653259715525918745189590510,
    0.169004726639267902826583426599, 0.190350578064785409913256402421,
    0.204432940075298892414161999234, 0.209482141084727828012999174892};
constexpr double kWg[4] = {
    0.129484966168869693270611432679, 0.279705391489276667901467771424,
    0.381830050505118944950369775489, 0.417959183673469387755102040816};

struct GkResult {
  double value;
  double error;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double result_g = kWg[3] * fc;
  double result_k = kWgk[7] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * kXgk[i];
    const double f1 = f(c - x);
    const double f2 = f(c + x);
    result_k += kWgk[i] * (f1 + f2);
    if (i % 2 == 1) result_g += kWg[i / 2] * (f1 + f2);
  }
  result_g *= h;
  result_k *= h;
  return {result_k, std::abs(result_k - result_g)};
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, double abs_tol,
                          int max_segments) {
  if (a == b) return 0.0;
  struct Segment {
    double a, b, value, error;
  };
  std::vector<Segment> segs;
  GkResult first = gk15(f, a, b);
  segs.push_back({a, b, first.value, first.error});
  for (int iter = 0; iter < max_segments; ++iter) {
    double total = 0.0, err = 0.0;
    for (const auto& s : segs) {
      total += s.value;
      err += s.error;
    }
    if (err <= std::max(abs_tol, rel_tol * std::abs(total))) break;
    // split the worst segment; ties resolved by left endpoint for determinism
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i) {
      if (segs[i].error > segs[worst].error ||
          (segs[i].error == segs[worst].error && segs[i].a < segs[worst].a))
        worst = i;
    }
    const Segment s = segs[worst];
    const double mid = 0.5 * (s.a + s.b);
    if (mid <= s.a || mid >= s.b) break;  // interval exhausted in doubles
    GkResult left = gk15(f, s.a, mid);
    GkResult right = gk15(f, mid, s.b);
    segs[worst] = {s.a, mid, left.value, left.error};
    segs.push_back({mid, s.b, right.value, right.error});
  }
  double total = 0.0;
  for (const auto& s : segs) total += s.value;
  return total;
}

// ---------------------------------------------------------------------------
// special functions

namespace {

// asymptotic series sqrt(pi/2x) e^-x sum_k a_k(nu)/x^k, valid for x >> nu^2
double bessel_k_asymptotic(double nu, double x) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (8.0 * x * static_cast<double>(k));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return std::sqrt(kPi / (2.0 * x)) * std::exp(-x) * sum;
}

}  // namespace

double bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw std::domain_error("bessel_k: x must be > 0");
  nu = std::fabs(nu);
  if (x >= 40.0 && x >= 20.0 * nu * nu) return bessel_k_asymptotic(nu, x);

  // K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt. Written as
  // exp(phi_max - x) * int_0^T g(t) dt with the integrand rescaled by the
  // peak of phi(t) = nu t - x (cosh t - 1) so the quadrature never overflows.
  const double t_peak = std::asinh(nu / x);
  const double phi_max = nu * t_peak - x * (std::cosh(t_peak) - 1.0);
  const auto g = [nu, x, phi_max](double t) {
    const double base = -x * (std::cosh(t) - 1.0) - phi_max;
    const double ep = base + nu * t;
    const double em = base - nu * t;
    double v = 0.0;
    if (ep > -745.0) v += std::exp(ep);
    if (em > -745.0) v += std::exp(em);
    return 0.5 * v;
  };
  double upper = std::max(t_peak, 1.0);
  while (upper < 700.0 &&
         nu * upper - x * (std::cosh(upper) - 1.0) - phi_max > -60.0)
    upper *= 1.4;
  const double integral = integrate_adaptive(g, 0.0, upper, 1e-12, 0.0);
  const double log_value = phi_max - x + std::log(integral);
  if (log_value > 709.0) return std::numeric_limits<double>::infinity();
  if (log_value < -745.0) return 0.0;
  return std::exp(log_value);
}

namespace {

// regularized lower gamma by series, x < s + 1
double gamma_series(double s, double x) {
  double ap = s;
  double del = 1.0 / s;
  double sum = del;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
  }
  return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// regularized upper gamma by Lentz continued fraction, x >= s + 1
double gamma_cf(double s, double x) {
  const double fpmin = std::numeric_limits<double>::min() / 1e-30;
  double b = x + 1.0 - s;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) <= 1e-17) break;
  }
  return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

}  // namespace

double regularized_lower_gamma(double s, double x) {
  if (!(s > 0.0)) throw std::domain_error("lower_incomplete_gamma: s must be > 0");
  if (x < 0.0) throw std::domain_error("lower_incomplete_gamma: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) return gamma_series(s, x);
  return 1.0 - gamma_cf(s, x);
}

double lower_incomplete_gamma(double s, double x) {
  return regularized_lower_gamma(s, x) * std::tgamma(s);
}

double q_function(double x) { return 0.5 * std::erfc(x * 0.7071067811865475244); }

}  // namespace bbbc
