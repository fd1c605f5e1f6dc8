#include "slotune/surrogate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "slotune/detail/pattern_search.hpp"
#include "slotune/error.hpp"

namespace slotune {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;  // ln(2 pi)

double kernel_of_r2(KernelFamily k, double sf2, double r2) {
  if (k == KernelFamily::SquaredExponential) return sf2 * std::exp(-0.5 * r2);
  const double r = std::sqrt(r2);
  const double s5r = std::sqrt(5.0) * r;
  return sf2 * (1.0 + s5r + 5.0 * r2 / 3.0) * std::exp(-s5r);
}

// Cholesky of K + noise I with decade jitter escalation. Returns the noise
// actually used, or nullopt when every level failed.
std::optional<double> factorize(Eigen::MatrixXd& k, double noise, double max_jitter,
                                Eigen::LLT<Eigen::MatrixXd>& llt) {
  const Eigen::Index n = k.rows();
  double extra = 0.0;
  for (;;) {
    Eigen::MatrixXd a = k;
    a.diagonal().array() += noise + extra;
    llt.compute(a);
    bool ok = llt.info() == Eigen::Success;
    if (ok) {
      const auto& l = llt.matrixLLT();
      for (Eigen::Index i = 0; i < n && ok; ++i) ok = l(i, i) > 0.0 && std::isfinite(l(i, i));
    }
    if (ok) return noise + extra;
    extra = extra == 0.0 ? std::max(noise, 1e-10) : extra * 10.0;
    if (extra > max_jitter * (1.0 + 1e-12)) return std::nullopt;
  }
}

struct Solved {
  double lml;
  double mean;
  double noise;
};

// Given a kernel matrix (without noise) and targets, factorizes, profiles the
// constant mean when requested and returns the LML. `alpha`/`llt` receive
// the solution used for prediction.
std::optional<Solved> solve_system(Eigen::MatrixXd& k, const Eigen::VectorXd& y, MeanFamily mean,
                                   double fixed_mean, bool profile_mean, double noise,
                                   double max_jitter, Eigen::LLT<Eigen::MatrixXd>& llt,
                                   Eigen::VectorXd& alpha) {
  const auto used = factorize(k, noise, max_jitter, llt);
  if (!used) return std::nullopt;
  const Eigen::Index n = y.size();
  double m = 0.0;
  if (mean == MeanFamily::Constant) {
    if (profile_mean) {
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
      const Eigen::VectorXd a1 = llt.solve(ones);
      const Eigen::VectorXd ay = llt.solve(y);
      m = ones.dot(ay) / ones.dot(a1);
    } else {
      m = fixed_mean;
    }
  }
  const Eigen::VectorXd centered = y.array() - m;
  alpha = llt.solve(centered);
  const auto& l = llt.matrixLLT();
  double logdet = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) logdet += std::log(l(i, i));
  const double lml = -0.5 * centered.dot(alpha) - logdet - 0.5 * static_cast<double>(n) * kLog2Pi;
  if (!std::isfinite(lml)) return std::nullopt;
  return Solved{lml, m, *used};
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_data(const TrainingSet& data) {
  if (data.size() == 0) throw StateError("GP needs at least one training point");
  if (data.inputs.size() != data.targets.size())
    throw ShapeError("training inputs and targets differ in count");
  const std::size_t d = data.dimension();
  for (const auto& x : data.inputs)
    if (x.size() != d) throw ShapeError("training inputs differ in dimension");
  for (double y : data.targets)
    if (!std::isfinite(y)) throw NumericError("non-finite training target");
}

// Likelihood evaluator over log-space hyperparameters with pairwise squared
// differences cached per dimension.
class LikelihoodSurface {
 public:
  LikelihoodSurface(const TrainingSet& data, const FitOptions& opt)
      : opt_(opt), n_(data.size()), d_(data.dimension()), y_(to_eigen(data.targets)) {
    diffs_.resize(n_ * (n_ - 1) / 2 * d_);
    std::size_t p = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < i; ++j)
        for (std::size_t k = 0; k < d_; ++k) {
          const double t = data.inputs[i][k] - data.inputs[j][k];
          diffs_[p++] = t * t;
        }
    kmat_.resize(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  }

  // theta = (ln l_1..l_d, ln sf2, ln sn2); returns -LML (or +inf).
  double operator()(const std::vector<double>& theta) {
    std::vector<double> inv_l2(d_);
    for (std::size_t k = 0; k < d_; ++k) inv_l2[k] = std::exp(-2.0 * theta[k]);
    const double sf2 = std::exp(theta[d_]);
    const double sn2 = std::exp(theta[d_ + 1]);
    std::size_t p = 0;
    for (std::size_t i = 0; i < n_; ++i) {
      kmat_(i, i) = sf2;
      for (std::size_t j = 0; j < i; ++j) {
        double r2 = 0.0;
        for (std::size_t k = 0; k < d_; ++k) r2 += diffs_[p++] * inv_l2[k];
        const double v = kernel_of_r2(opt_.kernel, sf2, r2);
        kmat_(i, j) = v;
        kmat_(j, i) = v;
      }
    }
    const auto s = solve_system(kmat_, y_, opt_.mean, 0.0, true, sn2, opt_.max_jitter, llt_,
                                alpha_);
    if (!s) return std::numeric_limits<double>::infinity();
    return -s->lml;
  }

 private:
  const FitOptions& opt_;
  std::size_t n_, d_;
  Eigen::VectorXd y_;
  std::vector<double> diffs_;
  Eigen::MatrixXd kmat_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  Eigen::VectorXd alpha_;
};

}  // namespace

std::size_t GpHyperparams::num_parameters() const {
  return length_scales.size() + 2 + (mean == MeanFamily::Constant ? 1 : 0);
}

void TrainingSet::add(std::vector<double> x, double y) {
  if (!inputs.empty() && x.size() != inputs.front().size())
    throw ShapeError("training input dimension mismatch");
  inputs.push_back(std::move(x));
  targets.push_back(y);
}

double kernel_value(const GpHyperparams& hp, std::span<const double> a,
                    std::span<const double> b) {
  if (a.size() != b.size() || a.size() != hp.length_scales.size())
    throw ShapeError("kernel input dimension mismatch");
  double r2 = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double t = (a[k] - b[k]) / hp.length_scales[k];
    r2 += t * t;
  }
  return kernel_of_r2(hp.kernel, hp.signal_variance, r2);
}

GpModel GpModel::condition(TrainingSet data, GpHyperparams hp, double max_jitter) {
  check_data(data);
  const std::size_t n = data.size();
  const std::size_t d = data.dimension();
  if (hp.length_scales.size() != d) throw ShapeError("length scale count does not match inputs");
  for (double l : hp.length_scales)
    if (!(l > 0.0)) throw ConfigError("length scales must be positive");
  if (!(hp.signal_variance > 0.0)) throw ConfigError("signal variance must be positive");
  if (!(hp.noise_variance >= 0.0)) throw ConfigError("noise variance must be non-negative");

  Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = kernel_value(hp, data.inputs[i], data.inputs[j]);
      k(i, j) = v;
      k(j, i) = v;
    }
  GpModel m;
  Eigen::LLT<Eigen::MatrixXd> llt;
  const auto s = solve_system(k, to_eigen(data.targets), hp.mean, hp.mean_value, false,
                              hp.noise_variance, max_jitter, llt, m.alpha_);
  if (!s) throw NumericError("GP covariance is not positive definite after jitter escalation");
  m.chol_ = llt.matrixL();
  m.lml_ = s->lml;
  m.diag_noise_ = s->noise;
  if (hp.mean == MeanFamily::Zero) hp.mean_value = 0.0;
  m.hp_ = std::move(hp);
  m.dim_ = d;
  m.data_ = std::move(data);
  return m;
}

SurrogatePosterior GpModel::predict(std::span<const double> x) const {
  if (x.size() != dim_)
    throw ShapeError("query has dimension " + std::to_string(x.size()) + ", model expects " +
                     std::to_string(dim_));
  const std::size_t n = data_.size();
  Eigen::VectorXd ks(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) ks(i) = kernel_value(hp_, x, data_.inputs[i]);
  const double mean = hp_.mean == MeanFamily::Constant ? hp_.mean_value : 0.0;
  SurrogatePosterior p;
  p.mu = mean + ks.dot(alpha_);
  chol_.triangularView<Eigen::Lower>().solveInPlace(ks);
  p.var = std::max(0.0, hp_.signal_variance - ks.squaredNorm());
  return p;
}

double GpModel::kernel(std::span<const double> a, std::span<const double> b) const {
  return kernel_value(hp_, a, b);
}

double GpModel::bic() const {
  const double n = static_cast<double>(data_.size());
  return static_cast<double>(hp_.num_parameters()) * std::log(n) - 2.0 * lml_;
}

GpModel fit(const TrainingSet& data, const FitOptions& opt, std::uint64_t seed,
            const GpHyperparams* warm_start) {
  check_data(data);
  const std::size_t d = data.dimension();
  std::vector<double> lo(d + 2), hi(d + 2);
  for (std::size_t k = 0; k < d; ++k) {
    lo[k] = std::log(opt.length_scale_min);
    hi[k] = std::log(opt.length_scale_max);
  }
  lo[d] = std::log(opt.signal_variance_min);
  hi[d] = std::log(opt.signal_variance_max);
  lo[d + 1] = std::log(std::max(opt.noise_variance_min, opt.jitter));
  hi[d + 1] = std::log(opt.noise_variance_max);

  LikelihoodSurface surface(data, opt);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> best_theta;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < std::max(1, opt.n_starts); ++s) {
    std::vector<double> theta(d + 2);
    for (std::size_t k = 0; k < theta.size(); ++k) theta[k] = lo[k] + unit(rng) * (hi[k] - lo[k]);
    if (s == 0 && warm_start && warm_start->length_scales.size() == d) {
      for (std::size_t k = 0; k < d; ++k) theta[k] = std::log(warm_start->length_scales[k]);
      theta[d] = std::log(warm_start->signal_variance);
      theta[d + 1] = std::log(std::max(warm_start->noise_variance, opt.jitter));
    }
    std::vector<double> step(d + 2);
    for (std::size_t k = 0; k < step.size(); ++k) step[k] = 0.25 * (hi[k] - lo[k]);
    auto r = detail::pattern_search<double>(surface, theta, step, lo, hi, opt.evals_per_start,
                                            1e-3);
    if (r.value < best) {
      best = r.value;
      best_theta = r.x;
    }
  }
  if (best_theta.empty() || !std::isfinite(best))
    throw NumericError("GP likelihood is not finite at any start");

  GpHyperparams hp;
  hp.kernel = opt.kernel;
  hp.mean = opt.mean;
  hp.length_scales.resize(d);
  for (std::size_t k = 0; k < d; ++k) hp.length_scales[k] = std::exp(best_theta[k]);
  hp.signal_variance = std::exp(best_theta[d]);
  hp.noise_variance = std::exp(best_theta[d + 1]);

  if (hp.mean == MeanFamily::Constant) {
    // Profiled mean for the chosen hyperparameters.
    const std::size_t n = data.size();
    Eigen::MatrixXd k(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j) k(i, j) = k(j, i) = kernel_value(hp, data.inputs[i], data.inputs[j]);
    Eigen::LLT<Eigen::MatrixXd> llt;
    Eigen::VectorXd alpha;
    const auto s = solve_system(k, to_eigen(data.targets), hp.mean, 0.0, true,
                                hp.noise_variance, opt.max_jitter, llt, alpha);
    if (!s) throw NumericError("GP covariance is not positive definite after jitter escalation");
    hp.mean_value = s->mean;
  }
  return GpModel::condition(data, std::move(hp), opt.max_jitter);
}

double log_marginal_likelihood(const GpModel& model, const TrainingSet& data) {
  return GpModel::condition(data, model.hyperparams()).log_marginal_likelihood();
}

std::vector<GpCandidate> default_candidates() {
  return {{KernelFamily::SquaredExponential, MeanFamily::Zero},
          {KernelFamily::SquaredExponential, MeanFamily::Constant},
          {KernelFamily::Matern52, MeanFamily::Zero},
          {KernelFamily::Matern52, MeanFamily::Constant}};
}

GpModel bic_select(const TrainingSet& data, const FitOptions& options,
                   std::span<const GpCandidate> candidates, std::uint64_t seed) {
  FitOptions o = options;
  if (data.size() < 4 || candidates.empty()) {
    o.kernel = KernelFamily::SquaredExponential;
    o.mean = MeanFamily::Constant;
    return fit(data, o, seed);
  }
  std::optional<GpModel> best;
  for (const auto& c : candidates) {
    o.kernel = c.kernel;
    o.mean = c.mean;
    GpModel m = fit(data, o, seed);
    if (!best || m.bic() < best->bic()) best = std::move(m);
  }
  return std::move(*best);
}

CorrectedPrediction corrected_predict(double f_value, const SurrogatePosterior& post) {
  return {f_value + post.mu, std::sqrt(std::max(0.0, post.var))};
}

std::vector<double> gp_input(const ParamVector& x, const ParamSpace& space, double simplex_floor) {
  check_shape(x, space);
  std::vector<double> out;
  out.reserve(space.dimension());
  for (std::size_t k = 0; k < space.num_blocks(); ++k) {
    if (space.blocks()[k].kind == BlockKind::Hypercube) {
      out.insert(out.end(), x.blocks[k].begin(), x.blocks[k].end());
    } else {
      const auto c = clr(x.blocks[k], simplex_floor);
      out.insert(out.end(), c.begin(), c.end());
    }
  }
  return out;
}

}  // namespace slotune
