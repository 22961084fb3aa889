#pragma once

// JSON views of fits and inference results, and the CLI run configuration.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "glbreak/inference.hpp"
#include "glbreak/model.hpp"

namespace glbreak {

using Json = nlohmann::ordered_json;

namespace detail {

inline Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

/// NaN and infinities become null.
inline Json number_json(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

inline Json set_json(const ConfidenceSet& set) {
  Json j{{"method", to_string(set.method)}, {"level", set.level}, {"dates", set.dates}, {"length", set.length()}};
  if (set.method == SetMethod::Hdr) j["achieved_mass"] = number_json(set.achieved_mass);
  return j;
}

}  // namespace detail

inline Json fit_json(const SegmentedFit& fit) {
  Json deltas = Json::array();
  for (const auto& d : fit.delta_hat) deltas.push_back(detail::vector_json(d));
  return Json{{"dates", fit.break_dates},
              {"phi_hat", detail::vector_json(fit.phi_hat)},
              {"delta_hat", deltas},
              {"ssr", fit.ssr},
              {"criterion_value", fit.criterion_value}};
}

namespace detail {

inline void append_break(Json& out, const BreakInference& b, const LossSpec& loss, std::optional<std::size_t> index) {
  auto tag = [&](Json j) {
    if (index) j["break"] = *index + 1;
    return j;
  };
  out["break_estimates"].push_back(tag({{"method", "ols"}, {"date", b.profile.argmax_date}}));
  out["break_estimates"].push_back(tag({{"method", "gl"}, {"date", b.estimate.date}, {"raw", b.estimate.raw}, {"loss", to_string(loss)}}));
  out["sets"].push_back(tag(set_json(b.hdr)));
  out["sets"].push_back(tag(set_json(b.bai)));
  Json diag{{"delta_hat", vector_json(b.profile.delta_hat_at_argmax)},
            {"xi_z", b.moments ? number_json(b.moments->xi_z) : Json(nullptr)},
            {"xi_e", b.moments ? number_json(b.moments->xi_e) : Json(nullptr)},
            {"scale_factor", number_json(b.scale_factor)},
            {"kappa", number_json(b.kappa)},
            {"degenerate", b.degenerate},
            {"lrv_clipped", b.moments ? b.moments->clipped : false},
            {"prior_non_integrable", b.prior_sample ? b.prior_sample->non_integrable : false}};
  if (b.degenerate) diag["degenerate_reason"] = b.degenerate_reason;
  out["diagnostics"].push_back(tag(diag));
}

}  // namespace detail

/// {break_estimates, sets, supwald, diagnostics}.
inline Json result_json(const SingleBreakResult& r, const LossSpec& loss) {
  Json out{{"break_estimates", Json::array()}, {"sets", Json::array()}, {"supwald", nullptr}, {"diagnostics", Json::array()}};
  detail::append_break(out, r.inference, loss, std::nullopt);
  out["diagnostics"] = out["diagnostics"][0];
  if (r.supwald)
    out["supwald"] = Json{{"stat", detail::number_json(r.supwald->statistic)},
                          {"cv", detail::number_json(r.supwald->critical_value)},
                          {"reject", r.supwald->reject},
                          {"alpha", r.supwald->alpha}};
  return out;
}

/// As result_json, with one entry per break tagged by its 1-based index.
inline Json result_json(const MultipleBreakResult& r, const LossSpec& loss) {
  Json out{{"break_estimates", Json::array()}, {"sets", Json::array()}, {"supwald", nullptr}, {"diagnostics", Json::array()}};
  for (std::size_t i = 0; i < r.breaks.size(); ++i) detail::append_break(out, r.breaks[i], loss, i);
  out["fit"] = fit_json(r.fit);
  return out;
}

/// Everything a CLI invocation needs; round-trips through JSON.
struct RunConfig {
  std::string command;  // fit | infer | simulate-limit | mc-table
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::size_t paths = 100000;

  // fit / infer
  std::string csv;
  int breaks = 1;
  double trimming = 0.15;
  std::string structure = "partial";
  std::string loss = "absolute";
  std::string prior = "limit";
  std::string prior_law = "argmax";
  double alpha = 0.05;
  double temperature = 1.0;
  std::string lrv = "plain";
  int bandwidth = -1;

  // simulate-limit
  double xi_e = 1.0;
  double xi_z = 1.0;
  std::string law = "argmax";
  double kappa = 1.0;
  double step = 0.05;
  double half_width = 30.0;

  // mc-table
  int table = 1;
  int reps = 500;
  std::size_t law_paths = 20000;

  // outputs
  std::string out;
  std::string samples_out;
  std::string audit_out;

  bool operator==(const RunConfig&) const = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, command, seed, threads, paths, csv, breaks, trimming, structure, loss,
                                                prior, prior_law, alpha, temperature, lrv, bandwidth, xi_e, xi_z, law, kappa,
                                                step, half_width, table, reps, law_paths, out, samples_out, audit_out)

inline Structure parse_structure(const std::string& s) {
  if (s == "partial") return Structure::Partial;
  if (s == "pure") return Structure::Pure;
  fail(ErrorCode::InvalidArgument, "structure must be 'partial' or 'pure'");
}

inline LrvMethod parse_lrv(const std::string& s, int bandwidth) {
  if (s == "plain") return LrvMethod::plain();
  if (s == "newey_west") return LrvMethod::newey_west(bandwidth);
  if (s == "prewhitened_hac" || s == "prewhitened") return LrvMethod::prewhitened(bandwidth);
  fail(ErrorCode::InvalidArgument, "lrv must be plain, newey_west or prewhitened_hac");
}

inline BreakSpec break_spec(const RunConfig& c) {
  BreakSpec spec;
  spec.num_breaks = c.breaks;
  spec.trimming = c.trimming;
  spec.structure = parse_structure(c.structure);
  return spec;
}

inline InferenceConfig inference_config(const RunConfig& c) {
  InferenceConfig cfg;
  cfg.loss = parse_loss(c.loss);
  if (c.prior == "limit") cfg.prior = PriorKind::Limit;
  else if (c.prior == "uniform") cfg.prior = PriorKind::Uniform;
  else fail(ErrorCode::InvalidArgument, "prior must be 'limit' or 'uniform'");
  if (c.prior_law == "argmax") cfg.prior_law = LimitLaw::ArgmaxVstar;
  else if (c.prior_law == "bayes") cfg.prior_law = LimitLaw::BayesRatio;
  else fail(ErrorCode::InvalidArgument, "prior law must be 'argmax' or 'bayes'");
  cfg.alpha = c.alpha;
  cfg.temperature = c.temperature;
  cfg.lrv = parse_lrv(c.lrv, c.bandwidth);
  cfg.paths = c.paths;
  cfg.grid.step = c.step;
  cfg.grid.half_width = c.half_width;
  cfg.seed = c.seed;
  cfg.threads = c.threads;
  return cfg;
}

}  // namespace glbreak
