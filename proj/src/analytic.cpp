#include "smallcell/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace smallcell {

namespace {

constexpr double kAbsTol = 1e-9;
constexpr double kRelTol = 1e-8;

template <class F>
double adaptive_gk(const F& f, double a, double b, const char* where) {
  double error = 0.0;
  double l1 = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          f, a, b, 15, 1e-11, &error, &l1);
  if (!std::isfinite(value) ||
      !(error <= std::max(kAbsTol, kRelTol * std::abs(value)))) {
    throw QuadratureNotConverged(std::string(where) +
                                 ": error estimate " + std::to_string(error) +
                                 " for value " + std::to_string(value));
  }
  return value;
}

void validate_pmf_span(std::span<const double> pmf, const char* where,
                       bool first_entry_zero) {
  if (pmf.size() < 2)
    throw InvalidParameter(std::string(where) + ": pmf must cover 0..m_max");
  double sum = 0.0;
  for (double p : pmf) {
    if (!(p >= 0.0))
      throw InvalidParameter(std::string(where) + ": negative pmf entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6)
    throw InvalidParameter(std::string(where) + ": pmf does not sum to 1");
  if (first_entry_zero && pmf[0] != 0.0)
    throw InvalidParameter(std::string(where) +
                           ": mass at group size 0 is not allowed");
}

// integral over u in [lower, infinity) of the interferer-size mixture
// sum_{z>=1} pmf[z] * phi(u^(-alpha/2), y, z).
//
// Split at a pivot beyond the kernel knee; the unbounded part is mapped onto
// t in [0,1) via u = pivot*(1-t)^(-p) with p = 2/(alpha-2), which makes the
// transformed integrand approach a finite constant at t=1 for every
// alpha > 2.
double mixed_phi_tail_integral(double lower, double y,
                               std::span<const double> pmf, double alpha) {
  double active = 0.0;
  for (std::size_t z = 1; z < pmf.size(); ++z) active += pmf[z];
  if (active == 0.0) return 0.0;

  const auto mixture = [&](double x) {
    double acc = 0.0;
    for (std::size_t z = 1; z < pmf.size(); ++z)
      if (pmf[z] != 0.0)
        acc += pmf[z] * phi(x, y, static_cast<double>(z));
    return acc;
  };

  const double knee = std::pow(y, 2.0 / alpha);  // widest kernel (z = 1)
  const double pivot = 2.0 * std::max(lower, knee);
  const double head = adaptive_gk(
      [&](double u) { return mixture(std::pow(u, -alpha / 2.0)); }, lower,
      pivot, "rho head");

  const double p = 2.0 / (alpha - 2.0);
  const double limit_value =
      active * y * std::pow(pivot, 1.0 - alpha / 2.0) * p;
  const double tail = adaptive_gk(
      [&](double t) {
        const double one_minus = 1.0 - t;
        const double x =
            std::pow(pivot, -alpha / 2.0) * std::pow(one_minus, p * alpha / 2.0);
        // phi ~ x*y for every z >= 1 in this regime
        if (x * y < 1e-14) return limit_value;
        return mixture(x) * pivot * p * std::pow(one_minus, -p - 1.0);
      },
      0.0, 1.0, "rho tail");
  return head + tail;
}

// integral over u in [r0, infinity) of sum_{z>=1} pmf[z]*phi(u^(-alpha),s,z)*u.
double mixed_laplace_tail_integral(double r0, double s,
                                   std::span<const double> pmf, double alpha) {
  double active = 0.0;
  for (std::size_t z = 1; z < pmf.size(); ++z) active += pmf[z];
  if (active == 0.0) return 0.0;

  const auto mixture = [&](double x) {
    double acc = 0.0;
    for (std::size_t z = 1; z < pmf.size(); ++z)
      if (pmf[z] != 0.0)
        acc += pmf[z] * phi(x, s, static_cast<double>(z));
    return acc;
  };

  const double knee = std::pow(s, 1.0 / alpha);
  const double pivot = 2.0 * std::max(r0, knee);
  const double head = adaptive_gk(
      [&](double u) { return mixture(std::pow(u, -alpha)) * u; }, r0, pivot,
      "laplace head");

  const double q = 2.0 / (alpha - 2.0);
  const double limit_scale = active * s * std::pow(pivot, 2.0 - alpha) * q;
  const double tail = adaptive_gk(
      [&](double t) {
        const double one_minus = 1.0 - t;
        const double x = std::pow(pivot, -alpha) * std::pow(one_minus, q * alpha);
        if (x * s < 1e-14) return limit_scale * one_minus;
        return mixture(x) * pivot * pivot * q *
               std::pow(one_minus, -2.0 * q - 1.0);
      },
      0.0, 1.0, "laplace tail");
  return head + tail;
}

void require_alpha(double alpha, const char* where) {
  if (!(alpha > 2.0))
    throw InvalidParameter(std::string(where) + ": alpha must be > 2");
}

}  // namespace

bool is_valid_cdf_curve(const CdfCurve& curve, double eps) {
  if (curve.abscissae.size() != curve.values.size()) return false;
  for (std::size_t i = 0; i < curve.values.size(); ++i) {
    if (!(curve.values[i] >= 0.0 && curve.values[i] <= 1.0)) return false;
    if (i > 0 && curve.abscissae[i] <= curve.abscissae[i - 1]) return false;
    if (i > 0 && curve.values[i] < curve.values[i - 1] - eps) return false;
  }
  return true;
}

double phi(double x, double y, double z) {
  const double w = x * y / z;
  return -std::expm1(-z * std::log1p(w));
}

double rho(double theta, int m, std::span<const double> mtilde_pmf,
           double alpha) {
  if (!(theta > 0.0)) throw InvalidParameter("rho: theta must be > 0");
  if (m < 1) throw InvalidParameter("rho: m must be >= 1");
  require_alpha(alpha, "rho");
  validate_pmf_span(mtilde_pmf, "rho", false);

  const double lower = std::pow(theta, -2.0 / alpha);
  return std::pow(theta, 2.0 / alpha) *
         mixed_phi_tail_integral(lower, static_cast<double>(m), mtilde_pmf,
                                 alpha);
}

double sir_cdf_conditional(double theta, int m,
                           std::span<const double> mtilde_pmf, double alpha) {
  return 1.0 - 1.0 / (1.0 + rho(theta, m, mtilde_pmf, alpha));
}

double sir_cdf(double theta, std::span<const double> m_pmf,
               std::span<const double> mtilde_pmf, double alpha) {
  validate_pmf_span(m_pmf, "sir_cdf", true);
  double acc = 0.0;
  for (std::size_t m = 1; m < m_pmf.size(); ++m) {
    if (m_pmf[m] == 0.0) continue;
    acc += m_pmf[m] *
           sir_cdf_conditional(theta, static_cast<int>(m), mtilde_pmf, alpha);
  }
  return acc;
}

double interference_laplace(double s, double r0, double lambda_a,
                            std::span<const double> mtilde_pmf, double alpha) {
  if (!(s >= 0.0)) throw InvalidParameter("interference_laplace: s must be >= 0");
  if (!(r0 > 0.0))
    throw InvalidParameter("interference_laplace: r0 must be > 0");
  if (!(lambda_a > 0.0))
    throw InvalidParameter("interference_laplace: lambda_a must be > 0");
  require_alpha(alpha, "interference_laplace");
  validate_pmf_span(mtilde_pmf, "interference_laplace", false);
  if (s == 0.0) return 1.0;

  const double acc = mixed_laplace_tail_integral(r0, s, mtilde_pmf, alpha);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::exp(-two_pi * lambda_a * acc);
}

double per_channel_rate(double sir, int n) {
  if (!(sir >= 0.0))
    throw InvalidParameter("per_channel_rate: sir must be >= 0");
  if (n < 1) throw InvalidParameter("per_channel_rate: n must be >= 1");
  return std::log2(1.0 + sir) / n;
}

namespace {

void validate_rate_args(double r, int k0, int m, int n,
                        const ChannelParams& params,
                        std::span<const double> mtilde_pmf) {
  if (k0 < 1) throw InvalidParameter("rate_cdf_conditional: k0 must be >= 1");
  if (m < 1 || m > k0 || m >= static_cast<int>(mtilde_pmf.size()))
    throw InvalidParameter("rate_cdf_conditional: m out of range");
  if (n < 1) throw InvalidParameter("rate_cdf_conditional: n must be >= 1");
  if (!(params.theta0 > 0.0))
    throw InvalidParameter("rate_cdf_conditional: theta0 must be > 0");
  if (!(r >= 0.0))
    throw InvalidParameter("rate_cdf_conditional: r must be >= 0");
}

// outage_mass = sir_cdf_conditional(theta0, m), precomputed by callers that
// mix over many (k0, m) pairs.
double rate_conditional_impl(double r, int k0, int m, int n,
                             const ChannelParams& params,
                             std::span<const double> mtilde_pmf,
                             double outage_mass) {
  const double rate_at_threshold = std::log2(1.0 + params.theta0);
  const double breakpoint =
      rate_at_threshold * m / (static_cast<double>(n) * k0);
  if (r <= breakpoint) return outage_mass;

  const double exponent = r * n * k0 / static_cast<double>(m);
  // Beyond ~2^600 the cdf is 1 to far below any tolerance of interest.
  if (exponent > 600.0) return 1.0;
  const double theta = std::exp2(exponent) - 1.0;
  return sir_cdf_conditional(theta, m, mtilde_pmf, params.alpha);
}

}  // namespace

double rate_cdf_conditional(double r, int k0, int m, int n,
                            const ChannelParams& params,
                            std::span<const double> mtilde_pmf) {
  validate_rate_args(r, k0, m, n, params, mtilde_pmf);
  const double outage_mass =
      sir_cdf_conditional(params.theta0, m, mtilde_pmf, params.alpha);
  return rate_conditional_impl(r, k0, m, n, params, mtilde_pmf, outage_mass);
}

double rate_cdf(double r, const JointPmf& typical_joint, int n,
                const ChannelParams& params,
                std::span<const double> mtilde_pmf) {
  if (typical_joint.empty())
    throw InvalidParameter("rate_cdf: empty joint pmf");
  double sum = 0.0;
  for (const auto& e : typical_joint) sum += e.prob;
  if (std::abs(sum - 1.0) > 1e-6)
    throw InvalidParameter("rate_cdf: joint pmf does not sum to 1");

  std::vector<double> outage_by_m(mtilde_pmf.size(), -1.0);
  double acc = 0.0;
  for (const auto& e : typical_joint) {
    if (e.prob == 0.0) continue;
    validate_rate_args(r, e.k0, e.m, n, params, mtilde_pmf);
    if (outage_by_m[e.m] < 0.0)
      outage_by_m[e.m] =
          sir_cdf_conditional(params.theta0, e.m, mtilde_pmf, params.alpha);
    acc += e.prob * rate_conditional_impl(r, e.k0, e.m, n, params, mtilde_pmf,
                                          outage_by_m[e.m]);
  }
  return acc;
}

CdfCurve sir_cdf_curve(std::span<const double> thetas,
                       const AccessProfile& profile,
                       const ChannelParams& params) {
  const int m_max = static_cast<int>(profile.mtilde_pmf.size()) - 1;
  const std::vector<double> m_pmf = marginal_m_pmf(profile.typical_joint, m_max);
  CdfCurve curve;
  curve.abscissae.assign(thetas.begin(), thetas.end());
  curve.values.reserve(thetas.size());
  for (double theta : thetas) {
    try {
      curve.values.push_back(
          sir_cdf(theta, m_pmf, profile.mtilde_pmf, params.alpha));
    } catch (const QuadratureNotConverged& e) {
      throw QuadratureNotConverged("sir_cdf_curve at theta=" +
                                   std::to_string(theta) + ": " + e.what());
    }
  }
  return curve;
}

CdfCurve rate_cdf_curve(std::span<const double> rates,
                        const AccessProfile& profile, int n,
                        const ChannelParams& params) {
  CdfCurve curve;
  curve.abscissae.assign(rates.begin(), rates.end());
  curve.values.reserve(rates.size());
  for (double r : rates) {
    try {
      curve.values.push_back(
          rate_cdf(r, profile.typical_joint, n, params, profile.mtilde_pmf));
    } catch (const QuadratureNotConverged& e) {
      throw QuadratureNotConverged("rate_cdf_curve at r=" + std::to_string(r) +
                                   ": " + e.what());
    }
  }
  return curve;
}

}  // namespace smallcell
