#pragma once

// Quasi-posterior over break dates, generalized Laplace estimates, highest
// density sets and the plug-in argmax-law interval.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "glbreak/errors.hpp"
#include "glbreak/limit_laws.hpp"
#include "glbreak/loss.hpp"
#include "glbreak/ls_engine.hpp"
#include "glbreak/lrv.hpp"
#include "glbreak/model.hpp"

namespace glbreak {

struct QuasiPosterior {
  std::vector<int> dates;
  std::vector<double> log_weights;  // temperature * Q + log prior
  std::vector<double> pmf;
  double temperature = 1.0;

  std::size_t size() const noexcept { return dates.size(); }
};

enum class SetMethod { Hdr, Bai };

inline std::string to_string(SetMethod m) { return m == SetMethod::Hdr ? "hdr_gl" : "bai"; }

struct ConfidenceSet {
  std::vector<int> dates;  // sorted
  double level = 0.95;
  SetMethod method = SetMethod::Hdr;
  double achieved_mass = std::numeric_limits<double>::quiet_NaN();  // hdr only

  std::size_t length() const noexcept { return dates.size(); }
  bool contains(int d) const { return std::binary_search(dates.begin(), dates.end(), d); }
};

/// pmf(d) proportional to exp(temperature * Q(d)) * prior(d). Without a prior
/// the prior is uniform on the profile dates.
inline QuasiPosterior quasi_posterior(const CriterionProfile& profile, const PriorDensity* prior, double temperature = 1.0) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) fail(ErrorCode::InvalidArgument, "temperature must be positive");
  if (profile.dates.empty()) fail(ErrorCode::EmptyProfile, "empty criterion profile");
  if (prior && prior->support != profile.dates)
    fail(ErrorCode::SupportMismatch, "prior support differs from the profile dates");
  QuasiPosterior qp;
  qp.dates = profile.dates;
  qp.temperature = temperature;
  const std::size_t n = profile.size();
  qp.log_weights.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double log_prior = prior ? std::log(prior->pmf[j]) : 0.0;
    qp.log_weights[j] = temperature * profile.q_values[j] + log_prior;
  }
  const double top = *std::max_element(qp.log_weights.begin(), qp.log_weights.end());
  qp.pmf.resize(n);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) total += (qp.pmf[j] = std::exp(qp.log_weights[j] - top));
  for (double& p : qp.pmf) p /= total;
  return qp;
}

inline QuasiPosterior quasi_posterior(const CriterionProfile& profile, const PriorDensity& prior, double temperature = 1.0) {
  return quasi_posterior(profile, &prior, temperature);
}

/// Prior restricted to `dates` and renormalized.
inline PriorDensity restrict_prior(const PriorDensity& prior, const std::vector<int>& dates) {
  PriorDensity out;
  out.floor = prior.floor;
  out.support = dates;
  double total = 0.0;
  for (int d : dates) {
    const auto it = std::lower_bound(prior.support.begin(), prior.support.end(), d);
    if (it == prior.support.end() || *it != d) fail(ErrorCode::SupportMismatch, "date " + std::to_string(d) + " outside prior support");
    const double p = prior.pmf[static_cast<std::size_t>(it - prior.support.begin())];
    out.pmf.push_back(p);
    total += p;
  }
  for (double& p : out.pmf) p /= total;
  return out;
}

struct GlEstimate {
  double raw = 0.0;  // real-valued risk minimizer
  int date = 0;      // rounded half away from zero
};

namespace detail {

/// Smallest date with cumulative mass >= prob (up to rounding).
inline int weighted_quantile(const QuasiPosterior& qp, double prob) {
  double cum = 0.0;
  for (std::size_t j = 0; j < qp.size(); ++j) {
    cum += qp.pmf[j];
    if (cum >= prob - 1e-12) return qp.dates[j];
  }
  return qp.dates.back();
}

inline double expected_risk(const QuasiPosterior& qp, const LossSpec& loss, double s) {
  double risk = 0.0;
  for (std::size_t j = 0; j < qp.size(); ++j) risk += loss(s - qp.dates[j]) * qp.pmf[j];
  return risk;
}

}  // namespace detail

/// Minimizer of the expected quasi-posterior loss.
inline GlEstimate gl_estimate(const QuasiPosterior& qp, const LossSpec& loss) {
  if (qp.dates.empty()) fail(ErrorCode::EmptyProfile, "empty quasi-posterior");
  GlEstimate out;
  switch (loss.kind) {
    case LossKind::Squared: {
      double mean = 0.0;
      for (std::size_t j = 0; j < qp.size(); ++j) mean += qp.pmf[j] * qp.dates[j];
      out.raw = std::clamp(mean, static_cast<double>(qp.dates.front()), static_cast<double>(qp.dates.back()));
      break;
    }
    case LossKind::Absolute: out.raw = detail::weighted_quantile(qp, 0.5); break;
    case LossKind::Check: out.raw = detail::weighted_quantile(qp, loss.tau); break;
    case LossKind::Polynomial: {
      if (!(loss.exponent >= 1.0)) fail(ErrorCode::InvalidArgument, "polynomial loss needs exponent m >= 1");
      const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
      double a = qp.dates.front(), b = qp.dates.back();
      double c = b - invphi * (b - a), d = a + invphi * (b - a);
      double fc = detail::expected_risk(qp, loss, c), fd = detail::expected_risk(qp, loss, d);
      while (b - a > 1e-9 * std::max(1.0, std::abs(a))) {
        if (fc <= fd) {
          b = d, d = c, fd = fc;
          c = b - invphi * (b - a);
          fc = detail::expected_risk(qp, loss, c);
        } else {
          a = c, c = d, fc = fd;
          d = a + invphi * (b - a);
          fd = detail::expected_risk(qp, loss, d);
        }
      }
      out.raw = 0.5 * (a + b);
      break;
    }
  }
  out.date = static_cast<int>(std::round(out.raw));
  return out;
}

/// Highest-density set: dates by decreasing mass (earlier first among
/// equals) until the mass reaches 1 - alpha, then every remaining date whose
/// mass equals that of the last one included.
inline ConfidenceSet hdr_set(const QuasiPosterior& qp, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  std::vector<std::size_t> order(qp.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return qp.pmf[a] > qp.pmf[b]; });
  ConfidenceSet out;
  out.level = 1.0 - alpha;
  out.method = SetMethod::Hdr;
  double mass = 0.0;
  std::size_t k = 0;
  while (k < order.size() && mass < 1.0 - alpha - 1e-12) mass += qp.pmf[order[k++]];
  const double threshold = qp.pmf[order[k - 1]];
  while (k < order.size() && qp.pmf[order[k]] == threshold) mass += qp.pmf[order[k++]];
  for (std::size_t j = 0; j < k; ++j) out.dates.push_back(qp.dates[order[j]]);
  std::sort(out.dates.begin(), out.dates.end());
  out.achieved_mass = mass;
  return out;
}

/// Interval for the true date from the argmax law: s (T_hat - T0) ~ argmax V,
/// so T0 lies in [T_hat - q(1 - alpha/2)/s, T_hat - q(alpha/2)/s]. Rounded
/// outward and clipped to 1..T.
inline ConfidenceSet bai_interval(int estimated_date, double scale_factor, const LimitLawSample& argmax_sample, double alpha, int T) {
  if (!(scale_factor > 0.0) || !std::isfinite(scale_factor)) fail(ErrorCode::DegenerateScale, "scale factor must be positive");
  if (argmax_sample.law != LimitLaw::ArgmaxVstar) fail(ErrorCode::InvalidArgument, "Bai interval needs an argmax-law sample");
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::InvalidArgument, "alpha must lie in (0, 1)");
  const auto q = quantiles(argmax_sample, {alpha / 2.0, 1.0 - alpha / 2.0});
  const double lo = std::floor(estimated_date - q[1] / scale_factor + 1e-9);
  const double hi = std::ceil(estimated_date - q[0] / scale_factor - 1e-9);
  ConfidenceSet out;
  out.level = 1.0 - alpha;
  out.method = SetMethod::Bai;
  const int first = static_cast<int>(std::clamp(lo, 1.0, static_cast<double>(T)));
  const int last = static_cast<int>(std::clamp(hi, 1.0, static_cast<double>(T)));
  for (int d = first; d <= last; ++d) out.dates.push_back(d);
  return out;
}

inline ConfidenceSet bai_interval(const CriterionProfile& profile, const RegimeMoments& moments,
                                  const LimitLawSample& argmax_sample, double alpha) {
  return bai_interval(profile.argmax_date, moments.scale_factor(), argmax_sample, alpha, profile.T);
}

enum class PriorKind { Limit, Uniform };

/// Supplies argmax-law draws for (xi_e, xi_z); lets callers share samples.
using SampleProvider = std::function<LimitLawSample(double xi_e, double xi_z)>;

struct InferenceConfig {
  LossSpec loss = LossSpec::absolute();
  PriorKind prior = PriorKind::Limit;
  /// Law behind the limit prior: the argmax law or the Bayes-ratio law.
  LimitLaw prior_law = LimitLaw::ArgmaxVstar;
  double alpha = 0.05;
  double temperature = 1.0;
  LrvMethod lrv = LrvMethod::plain();
  std::size_t paths = 100000;
  WienerGrid grid;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool sup_wald = true;
  double test_alpha = 0.05;
  SampleProvider argmax_provider;  // optional
};

/// Inference on one break date; every intermediate artifact is kept.
struct BreakInference {
  CriterionProfile profile;
  SegmentedFit fit;
  std::optional<RegimeMoments> moments;
  bool degenerate = false;  // moments unavailable; point-mass fallbacks used
  std::string degenerate_reason;
  double scale_factor = std::numeric_limits<double>::quiet_NaN();
  double kappa = std::numeric_limits<double>::quiet_NaN();
  LimitLawSample argmax_sample;
  std::optional<LimitLawSample> prior_sample;  // Bayes-ratio prior only
  PriorDensity prior;
  QuasiPosterior posterior;
  GlEstimate estimate;
  ConfidenceSet hdr;
  ConfidenceSet bai;
};

struct SingleBreakResult {
  BreakInference inference;
  std::optional<SupWaldResult> supwald;
};

struct MultipleBreakResult {
  SegmentedFit fit;
  std::vector<BreakInference> breaks;
};

namespace detail {

/// Runs moments -> limit law -> prior -> quasi-posterior -> estimates for one
/// break whose criterion profile and moments (index `which`) are given.
inline BreakInference infer_break(const RegressionData& data, const BreakSpec& spec, CriterionProfile profile,
                                  const SegmentedFit& fit, std::size_t which, const InferenceConfig& config,
                                  std::uint64_t seed) {
  BreakInference out;
  out.profile = std::move(profile);
  out.fit = fit;
  const int center = out.profile.argmax_date;

  try {
    out.moments = estimate_moments(data, spec, fit, config.lrv).at(which);
    out.scale_factor = out.moments->scale_factor();
    if (!(out.scale_factor > 0.0) || !std::isfinite(out.scale_factor))
      fail(ErrorCode::DegenerateRegime, "non-positive scale factor");
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateRegime) throw Error(e.code(), "moments: " + e.message());
    out.moments.reset();
    out.degenerate = true;
    out.degenerate_reason = e.message();
  }

  const auto& dates = out.profile.dates;
  const DateBand band{dates.front(), dates.back()};
  if (out.degenerate) {
    // Noise-free regimes: the limit laws collapse to a point mass.
    LimitLawSample point;
    point.draws.assign(1, 0.0);
    out.argmax_sample = point;
    out.prior = restrict_prior(prior_from_sample(point, center, 1.0, data.T(), band), dates);
    out.bai.level = 1.0 - config.alpha;
    out.bai.method = SetMethod::Bai;
    out.bai.dates = {center};
  } else {
    const auto& m = *out.moments;
    out.argmax_sample = with_stage("argmax law", [&] {
      return config.argmax_provider ? config.argmax_provider(m.xi_e, m.xi_z)
                                    : simulate_argmax_vstar(m.xi_e, m.xi_z, config.paths, config.grid, split_seed(seed, 1),
                                                            config.threads);
    });
    out.bai = with_stage("bai interval", [&] {
      return bai_interval(center, out.scale_factor, out.argmax_sample, config.alpha, static_cast<int>(data.T()));
    });
    // Exponent scale of the quasi-posterior in standardized units.
    out.kappa = config.temperature * 2.0 * m.shift.dot(m.Sigma1 * m.shift) / m.shift.dot(m.V1 * m.shift);
    if (config.prior == PriorKind::Limit) {
      out.prior = with_stage("prior", [&] {
        // The draws describe T_hat - T0; the prior is a belief about T0.
        if (config.prior_law == LimitLaw::ArgmaxVstar)
          return restrict_prior(prior_from_sample(reflected(out.argmax_sample), center, out.scale_factor, data.T(), band), dates);
        const LossSpec law_loss = config.loss.kind == LossKind::Polynomial ? LossSpec::squared() : config.loss;
        out.prior_sample = simulate_bayes_ratio(law_loss, m.xi_e, m.xi_z, config.paths, config.grid, out.kappa,
                                                split_seed(seed, 2), config.threads);
        return restrict_prior(prior_from_sample(reflected(*out.prior_sample), center, out.scale_factor, data.T(), band), dates);
      });
    }
  }
  if (config.prior == PriorKind::Uniform) out.prior = uniform_prior(dates);

  out.posterior = with_stage("quasi-posterior", [&] { return quasi_posterior(out.profile, out.prior, config.temperature); });
  out.estimate = gl_estimate(out.posterior, config.loss);
  out.hdr = hdr_set(out.posterior, config.alpha);
  return out;
}

}  // namespace detail

/// Least-squares profile, plug-in moments, limit-law prior, quasi-posterior,
/// GL estimate, HDR set, argmax-law interval and sup-Wald test.
inline SingleBreakResult gl_pipeline_single(const RegressionData& data, const BreakSpec& spec, const InferenceConfig& config) {
  if (spec.num_breaks != 1) fail(ErrorCode::InvalidArgument, "gl_pipeline_single needs num_breaks = 1");
  SingleBreakResult out;
  auto profile = with_stage("profile", [&] { return profile_single(data, spec); });
  const auto fit = with_stage("fit", [&] { return ols_concentrated(data, spec, {profile.argmax_date}); });
  out.inference = detail::infer_break(data, spec, std::move(profile), fit, 0, config, config.seed);
  if (config.sup_wald) {
    out.supwald = with_stage("sup-Wald", [&] { return sup_wald_statistic(data, spec, config.lrv); });
    const int q = static_cast<int>(regressor_roles(data, spec.structure).breaking.cols());
    out.supwald->alpha = config.test_alpha;
    if (const auto cv = find_sup_wald_critical_value(q, spec.trimming, config.test_alpha)) {
      out.supwald->critical_value = *cv;
      out.supwald->reject = out.supwald->statistic > *cv;
    }
  }
  return out;
}

/// Break-by-break inference around the dynamic-programming fit: each date is
/// profiled between its neighbours with the other dates held fixed.
inline MultipleBreakResult gl_pipeline_multiple(const RegressionData& data, const BreakSpec& spec, const InferenceConfig& config) {
  MultipleBreakResult out;
  if (spec.num_breaks == 1) {
    auto single = gl_pipeline_single(data, spec, config);
    out.fit = single.inference.fit;
    out.breaks.push_back(std::move(single.inference));
    return out;
  }
  out.fit = with_stage("segmentation", [&] { return fit_multiple(data, spec); });
  for (std::size_t i = 0; i < out.fit.break_dates.size(); ++i) {
    auto profile = with_stage("profile", [&] { return profile_conditional(data, spec, out.fit.break_dates, i); });
    out.breaks.push_back(detail::infer_break(data, spec, std::move(profile), out.fit, i, config, split_seed(config.seed, i + 1)));
  }
  return out;
}

inline void write_posterior_csv(std::ostream& out, const QuasiPosterior& qp) {
  out << "date,pmf\n";
  out.precision(17);
  for (std::size_t j = 0; j < qp.size(); ++j) out << qp.dates[j] << ',' << qp.pmf[j] << '\n';
}

}  // namespace glbreak
