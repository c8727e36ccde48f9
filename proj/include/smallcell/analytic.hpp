#pragma once

#include <span>
#include <vector>

#include "smallcell/access.hpp"
#include "smallcell/errors.hpp"

namespace smallcell {

struct ChannelParams {
  double alpha = 4.0;   // path-loss exponent, must be > 2
  double theta0 = 1.0;  // linear SIR threshold (dB conversion is a CLI concern)
};

/// Sampled cumulative distribution: values[i] = F(abscissae[i]).
struct CdfCurve {
  std::vector<double> abscissae;
  std::vector<double> values;
};

/// Checks strictly increasing abscissae and values in [0,1] non-decreasing
/// (within eps slack).
bool is_valid_cdf_curve(const CdfCurve& curve, double eps = 0.0);

/// 1 - (1 + x*y/z)^(-z), the interference kernel. Stable for tiny x*y.
double phi(double x, double y, double z);

/// Interference exponent of the conditional SIR cdf: mixture over the
/// interferer SDMA count of theta^(2/alpha) * integral of phi from
/// theta^(-2/alpha) to infinity. mtilde_pmf is indexed 0..m_max; the idle
/// entry contributes nothing.
double rho(double theta, int m, std::span<const double> mtilde_pmf,
           double alpha);

/// Conditional SIR cdf 1 - 1/(1 + rho(theta, m)).
double sir_cdf_conditional(double theta, int m,
                           std::span<const double> mtilde_pmf, double alpha);

/// SIR cdf mixed over the served-group-size pmf (indexed 0..m_max, entry 0
/// must be zero).
double sir_cdf(double theta, std::span<const double> m_pmf,
               std::span<const double> mtilde_pmf, double alpha);

/// Laplace transform of the aggregate interference seen at distance r0 from
/// the serving AP, for interferer density lambda_a. Used as an independent
/// consistency route for the SIR cdf.
double interference_laplace(double s, double r0, double lambda_a,
                            std::span<const double> mtilde_pmf, double alpha);

/// Spectral efficiency per channel use over n subchannels: log2(1+sir)/n.
double per_channel_rate(double sir, int n);

/// Rate cdf conditioned on k0 users sharing the subchannel, m of them served
/// together with the probe user. Flat at the SIR-outage mass below the
/// breakpoint r = log2(1+theta0)*m/(n*k0), continuous across it.
double rate_cdf_conditional(double r, int k0, int m, int n,
                            const ChannelParams& params,
                            std::span<const double> mtilde_pmf);

/// Rate cdf mixed over the joint (K0, M) pmf of the probe user.
double rate_cdf(double r, const JointPmf& typical_joint, int n,
                const ChannelParams& params,
                std::span<const double> mtilde_pmf);

/// Curve evaluation over a grid (thetas / rates strictly increasing).
CdfCurve sir_cdf_curve(std::span<const double> thetas,
                       const AccessProfile& profile,
                       const ChannelParams& params);
CdfCurve rate_cdf_curve(std::span<const double> rates,
                        const AccessProfile& profile, int n,
                        const ChannelParams& params);

}  // namespace smallcell
