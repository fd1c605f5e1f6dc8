#include "slotune/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <tuple>

#include "slotune/detail/pattern_search.hpp"
#include "slotune/error.hpp"

namespace slotune {

void TrustRegionSpec::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("trust-region epsilon must be > 0");
  if (!(beta > 0.0)) throw ConfigError("trust-region beta must be > 0");
}

void ProposalConfig::validate() const {
  if (n_starts < 1) throw ConfigError("n_starts must be >= 1");
  if (local_budget < 1) throw ConfigError("local_budget must be >= 1");
  if (!(uniform_fraction >= 0.0 && uniform_fraction <= 1.0))
    throw ConfigError("uniform_fraction must lie in [0,1]");
  if (!(ei_floor >= 0.0)) throw ConfigError("ei_floor must be >= 0");
}

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mu, double sigma, double g_best) {
  const double gain = g_best - mu;
  if (!(sigma > 0.0)) return std::max(gain, 0.0);
  const double z = gain / sigma;
  return std::max(0.0, gain * normal_cdf(z) + sigma * normal_pdf(z));
}

double tr_penalty(double d, const TrustRegionSpec& spec) {
  if (d <= spec.epsilon) return 0.0;
  const double excess = d - spec.epsilon;
  return spec.beta * excess * excess;
}

AcquisitionValue acquisition_value(const ParamVector& x, const SurrogateFn& surrogate,
                                   double g_best, const TrustRegionSpec& tr,
                                   const ParamVector& x_best, const ParamSpace& space) {
  AcquisitionValue a;
  a.prediction = surrogate(x);
  a.ei = expected_improvement(a.prediction.mean, a.prediction.stddev, g_best);
  a.distance = mixed_distance(x, x_best, space, tr.distance);
  a.penalty = tr.enabled ? tr_penalty(a.distance, tr) : 0.0;
  a.value = -a.ei + a.penalty;
  return a;
}

namespace {

// Lexicographic search key: acquisition, then penalized mean, then distance.
struct Key {
  double value = std::numeric_limits<double>::infinity();
  double tie = std::numeric_limits<double>::infinity();
  double distance = std::numeric_limits<double>::infinity();
  AcquisitionValue acq;

  friend bool operator<(const Key& a, const Key& b) {
    return std::tie(a.value, a.tie, a.distance) < std::tie(b.value, b.tie, b.distance);
  }
};

constexpr double kLogitBound = 30.0;

// Unconstrained coordinates: hypercube values in [0,1], simplex blocks as
// logits.
class Embedding {
 public:
  explicit Embedding(const ParamSpace& space) : space_(space) {
    for (const auto& b : space.blocks()) {
      const bool simplex = b.kind == BlockKind::Simplex;
      for (std::size_t i = 0; i < b.dim; ++i) {
        lo_.push_back(simplex ? -kLogitBound : 0.0);
        hi_.push_back(simplex ? kLogitBound : 1.0);
      }
      if (simplex) effective_dim_ += b.dim - 1;
      else effective_dim_ += b.dim;
    }
  }

  std::vector<double> to_theta(const ParamVector& x, double floor) const {
    std::vector<double> t;
    t.reserve(space_.dimension());
    for (std::size_t k = 0; k < space_.num_blocks(); ++k) {
      if (space_.blocks()[k].kind == BlockKind::Hypercube) {
        t.insert(t.end(), x.blocks[k].begin(), x.blocks[k].end());
      } else {
        const auto c = clr(x.blocks[k], floor);
        t.insert(t.end(), c.begin(), c.end());
      }
    }
    return t;
  }

  ParamVector to_point(const std::vector<double>& theta) const {
    ParamVector x;
    x.blocks.reserve(space_.num_blocks());
    std::size_t off = 0;
    for (const auto& b : space_.blocks()) {
      std::span<const double> s(theta.data() + off, b.dim);
      if (b.kind == BlockKind::Hypercube) x.blocks.emplace_back(s.begin(), s.end());
      else x.blocks.push_back(softmax_map(s));
      off += b.dim;
    }
    return x;
  }

  // Perturbation whose mixed-distance norm is `radius` times the norm of a
  // standard normal draw in isometric coordinates. Simplex moves are centered
  // logit shifts, for which the Aitchison distance is the Euclidean norm.
  std::vector<double> gaussian_direction(std::mt19937_64& rng, double alpha) const {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v;
    v.reserve(space_.dimension());
    const double simplex_scale = alpha > 0.0 ? 1.0 / std::sqrt(alpha) : 1.0;
    for (const auto& b : space_.blocks()) {
      if (b.kind == BlockKind::Hypercube) {
        for (std::size_t i = 0; i < b.dim; ++i) v.push_back(normal(rng));
      } else {
        std::vector<double> z(b.dim);
        double mean = 0.0;
        for (auto& c : z) {
          c = normal(rng);
          mean += c;
        }
        mean /= static_cast<double>(b.dim);
        for (auto& c : z) v.push_back((c - mean) * simplex_scale);
      }
    }
    return v;
  }

  double isometric_norm(const std::vector<double>& v, double alpha) const {
    double s = 0.0;
    std::size_t off = 0;
    for (const auto& b : space_.blocks()) {
      const double w = b.kind == BlockKind::Hypercube ? 1.0 : (alpha > 0.0 ? alpha : 1.0);
      for (std::size_t i = 0; i < b.dim; ++i) s += w * v[off + i] * v[off + i];
      off += b.dim;
    }
    return std::sqrt(s);
  }

  void clamp(std::vector<double>& theta) const {
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = std::clamp(theta[i], lo_[i], hi_[i]);
  }

  const std::vector<double>& lo() const { return lo_; }
  const std::vector<double>& hi() const { return hi_; }
  std::size_t effective_dim() const { return effective_dim_; }

 private:
  const ParamSpace& space_;
  std::vector<double> lo_, hi_;
  std::size_t effective_dim_ = 0;
};

}  // namespace

Proposal propose(const ParamSpace& space, const SurrogateFn& surrogate, double g_best,
                 const ParamVector& x_best, const TrustRegionSpec& tr,
                 const ProposalConfig& config) {
  config.validate();
  check_shape(x_best, space);
  const Embedding emb(space);
  const double alpha = tr.distance.alpha;
  const double floor = tr.distance.simplex_floor;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto center = emb.to_theta(x_best, floor);
  const int n_uniform =
      static_cast<int>(std::lround(config.uniform_fraction * static_cast<double>(config.n_starts)));

  std::vector<std::vector<double>> starts;
  starts.reserve(static_cast<std::size_t>(config.n_starts));
  for (int s = 0; s < config.n_starts; ++s) {
    std::vector<double> theta;
    if (s < n_uniform && !tr.enabled) {
      theta = emb.to_theta(sample_uniform(space, rng), floor);
    } else if (s < n_uniform) {
      auto dir = emb.gaussian_direction(rng, alpha);
      const double norm = emb.isometric_norm(dir, alpha);
      const double radius =
          tr.epsilon * std::pow(unit(rng), 1.0 / static_cast<double>(emb.effective_dim()));
      theta = center;
      if (norm > 0.0)
        for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += dir[i] * radius / norm;
    } else {
      const auto dir = emb.gaussian_direction(rng, alpha);
      theta = center;
      for (std::size_t i = 0; i < theta.size(); ++i) theta[i] += dir[i] * 0.5 * tr.epsilon;
    }
    emb.clamp(theta);
    starts.push_back(std::move(theta));
  }

  const double ei_cut = config.ei_floor * std::abs(g_best);
  auto evaluate = [&](const std::vector<double>& theta) {
    Key k;
    try {
      k.acq = acquisition_value(emb.to_point(theta), surrogate, g_best, tr, x_best, space);
    } catch (const Error&) {
      return k;
    }
    const auto& a = k.acq;
    if (!std::isfinite(a.value) || !std::isfinite(a.prediction.mean)) return k;
    k.value = a.ei > ei_cut ? a.value : a.penalty;
    k.tie = a.prediction.mean + a.penalty;
    k.distance = a.distance;
    return k;
  };

  // Initial steps: half the radius in every isometric direction, or a
  // quarter of the unit box when the region is the whole space.
  const double reach = tr.enabled ? 0.5 * tr.epsilon : 0.25;
  std::vector<double> step;
  for (const auto& b : space.blocks()) {
    const double s = b.kind == BlockKind::Hypercube
                         ? reach
                         : (alpha > 0.0 ? reach / std::sqrt(alpha) : reach);
    for (std::size_t i = 0; i < b.dim; ++i) step.push_back(s);
  }

  std::optional<Proposal> best;
  Key best_key;
  for (int s = 0; s < config.n_starts; ++s) {
    auto r = detail::pattern_search<Key>(evaluate, starts[static_cast<std::size_t>(s)], step,
                                         emb.lo(), emb.hi(), config.local_budget, 1e-7);
    if (!std::isfinite(r.value.value)) continue;
    if (!best || r.value < best_key) {
      best_key = r.value;
      best = Proposal{emb.to_point(r.x), r.value.acq, s};
    }
  }
  if (!best) throw ProposalError("acquisition was not finite at any candidate");
  return std::move(*best);
}

}  // namespace slotune
