#include "slotune/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "slotune/detail/seed.hpp"
#include "slotune/error.hpp"

namespace slotune {

AblationFlags AblationFlags::parse(const std::string& list) {
  AblationFlags f;
  std::istringstream in(list);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    tok.erase(0, tok.find_first_not_of(" \t"));
    tok.erase(tok.find_last_not_of(" \t") + 1);
    if (tok.empty()) continue;
    if (tok == "no_tr" || tok == "no_trust_region") f.no_trust_region = true;
    else if (tok == "no_correction") f.no_correction = true;
    else if (tok == "no_model") f.no_model = true;
    else if (tok == "no_denoiser") f.no_denoiser = true;
    else throw ConfigError("unknown ablation '" + tok + "'");
  }
  return f;
}

std::string AblationFlags::to_string() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(no_trust_region, "no_tr");
  add(no_correction, "no_correction");
  add(no_model, "no_model");
  add(no_denoiser, "no_denoiser");
  return out;
}

void ControllerConfig::validate() const {
  if (W_g < 1) throw ConfigError("W_g must be >= 1");
  if (W_s < 2) throw ConfigError("W_s must be >= 2");
  if (!(phi > 1.0)) throw ConfigError("phi must be > 1");
  if (k_shift < 1) throw ConfigError("k_shift must be >= 1");
  if (!(d_novel > 0.0)) throw ConfigError("d_novel must be > 0");
  if (!(kappa > 0.0)) throw ConfigError("kappa must be > 0");
  if (!(tau_rel > 0.0)) throw ConfigError("tau_rel must be > 0");
  if (!(sigma0 > 0.0)) throw ConfigError("sigma0 must be > 0");
  if (!(smooth_radius >= 0.0)) throw ConfigError("smooth_radius must be >= 0");
  objective.validate();
  trust_region.validate();
  proposal.validate();
  denoiser.validate();
}

bool RegimeDetector::update(double g, double g_best) {
  if (g > phi_ * g_best) ++count_;
  else count_ = 0;
  return count_ >= k_;
}

void RollingBest::push(double g, const ParamVector& x) {
  history_.emplace_back(g, x);
  while (history_.size() > window_) history_.pop_front();
}

void RollingBest::reset(double g, const ParamVector& x) {
  history_.clear();
  history_.emplace_back(g, x);
}

std::pair<double, const ParamVector*> RollingBest::best() const {
  if (history_.empty()) throw StateError("rolling best queried with empty history");
  const std::pair<double, ParamVector>* b = &history_.front();
  for (const auto& h : history_)
    if (h.first <= b->first) b = &h;
  return {b->first, &b->second};
}

bool admit(const std::vector<ParamVector>& window, const ParamVector& x, double g_obs,
           const CorrectedPrediction& prediction, const ControllerConfig& config,
           const ParamSpace& space) {
  if (window.empty()) return true;
  double dmin = std::numeric_limits<double>::infinity();
  for (const auto& w : window)
    dmin = std::min(dmin, mixed_distance(x, w, space, config.trust_region.distance));
  const bool novel = dmin > config.d_novel;
  const double miss = std::abs(prediction.mean - g_obs);
  const bool surprising =
      miss > std::max(config.kappa * prediction.stddev, config.tau_rel * std::abs(g_obs));
  return novel || surprising;
}

Controller::Controller(ParamSpace space, SloSpec slo, ControllerConfig config,
                       std::shared_ptr<const PerformanceModel> model, ParamVector x0,
                       std::uint64_t seed)
    : space_(std::move(space)),
      slo_(std::move(slo)),
      config_(std::move(config)),
      model_(std::move(model)),
      seed_(seed),
      current_(std::move(x0)),
      denoiser_(slo_.num_classes(), config_.denoiser, !config_.ablation.no_denoiser),
      detector_(config_.phi, config_.k_shift),
      best_(config_.W_g) {
  config_.validate();
  slo_.validate();
  std::size_t max_simplex = 0;
  for (const auto& b : space_.blocks())
    if (b.kind == BlockKind::Simplex) max_simplex = std::max(max_simplex, b.dim);
  config_.trust_region.distance.validate(max_simplex);
  check_normalized(current_, space_);
  if (!model_ && !config_.ablation.no_model)
    throw ConfigError("controller needs a performance model unless no_model is set");
}

double Controller::model_objective(const ParamVector& x, const WorkloadSpec& workload) const {
  ++model_calls_;
  const auto y = model_->predict(x, workload);
  const double f = objective(y, slo_, config_.objective);
  if (!std::isfinite(f)) throw NumericError("model objective is not finite");
  return f;
}

CorrectedPrediction Controller::predict(const ParamVector& x, const WorkloadSpec& workload) const {
  const auto& ab = config_.ablation;
  const double f = ab.no_model ? 0.0 : model_objective(x, workload);
  if (ab.no_correction && !ab.no_model) return {f, config_.sigma0};
  if (!gp_) return {f, config_.sigma0};
  return corrected_predict(
      f, gp_->predict(gp_input(x, space_, config_.trust_region.distance.simplex_floor)));
}

void Controller::refit() {
  const std::uint64_t fit_seed = detail::mix_seed(seed_, iteration_, 1);
  try {
    if (config_.select_kernel) {
      const auto cands = default_candidates();
      gp_ = bic_select(training_, config_.gp, cands, fit_seed);
    } else {
      const GpHyperparams* warm = nullptr;
      if (gp_ && gp_->hyperparams().kernel == config_.gp.kernel &&
          gp_->hyperparams().mean == config_.gp.mean)
        warm = &gp_->hyperparams();
      gp_ = fit(training_, config_.gp, fit_seed, warm);
    }
  } catch (const NumericError&) {
    // Keep the previous model; it is still a valid posterior on older data.
  }
}

StepResult Controller::step(const SliVector& raw, const WorkloadSpec& workload) {
  if (raw.size() != slo_.num_classes())
    throw ShapeError("observation has " + std::to_string(raw.size()) + " SLIs, SLO has " +
                     std::to_string(slo_.num_classes()));
  const auto& ab = config_.ablation;
  StepResult r;
  Sample& s = r.sample;
  s.iteration = iteration_;
  s.x = current_;
  s.raw = raw;
  if (previous_ && mixed_distance(current_, *previous_, space_, config_.trust_region.distance) >
                       config_.smooth_radius)
    denoiser_.reset();
  previous_ = current_;
  s.smoothed = denoiser_.push(raw);
  s.g = objective(s.smoothed, slo_, config_.objective);
  r.distance_to_best = current_distance_;
  r.ei = current_ei_;
  r.compliant = compliant(ratios(s.smoothed, slo_));

  if (ab.no_model) {
    s.f = 0.0;
  } else {
    try {
      s.f = model_objective(s.x, workload);
    } catch (const Error&) {
      s.f = std::numeric_limits<double>::quiet_NaN();
      r.model_failed = true;
    }
  }
  s.residual = s.g - s.f;

  if (best_.empty()) {
    best_.push(s.g, s.x);
  } else if (detector_.update(s.g, best_.best().first)) {
    r.regime_shift = true;
    detector_.clear();
    best_.reset(s.g, s.x);
  } else {
    best_.push(s.g, s.x);
  }

  if (!r.model_failed) {
    std::vector<ParamVector> xs;
    xs.reserve(window_.size());
    for (const auto& w : window_) xs.push_back(w.x);
    CorrectedPrediction pred{s.f, config_.sigma0};
    if (!window_.empty()) {
      try {
        pred = predict(s.x, workload);
      } catch (const Error&) {
      }
    }
    s.admitted = admit(xs, s.x, s.g, pred, config_, space_);
    if (s.admitted) {
      window_.push_back(s);
      while (window_.size() > config_.W_s) window_.pop_front();
      training_ = TrainingSet{};
      for (const auto& w : window_)
        training_.add(gp_input(w.x, space_, config_.trust_region.distance.simplex_floor),
                      w.residual);
      if (!ab.no_correction || ab.no_model) refit();
    }
  }

  const auto [g_best, x_best] = best_.best();
  r.g_best = g_best;
  r.x_best = *x_best;

  TrustRegionSpec tr = config_.trust_region;
  tr.enabled = !ab.no_trust_region;
  ProposalConfig pc = config_.proposal;
  // the EI floor falls back to the best mean inside the region; without a
  // region that is a global greedy step, so plain EI is used instead
  if (ab.no_trust_region) pc.ei_floor = 0.0;
  pc.seed = detail::mix_seed(seed_, iteration_, 2);
  const SurrogateFn surrogate = [&](const ParamVector& x) { return predict(x, workload); };
  try {
    auto p = propose(space_, surrogate, g_best, *x_best, tr, pc);
    r.next = std::move(p.x);
    current_ei_ = p.acquisition.ei;
    current_distance_ = p.acquisition.distance;
  } catch (const ProposalError&) {
    r.next = *x_best;
    r.proposal_failed = true;
    current_ei_ = 0.0;
    current_distance_ = 0.0;
  }
  current_ = r.next;
  ++iteration_;
  return r;
}

}  // namespace slotune
