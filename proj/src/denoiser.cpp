#include "slotune/denoiser.hpp"

#include <algorithm>
#include <cmath>

#include "slotune/error.hpp"

namespace slotune {

void DenoiserConfig::validate() const {
  if (window < 2) throw ConfigError("denoiser window must be >= 2");
  if (!(sigma_max > 0.0)) throw ConfigError("denoiser sigma_max must be > 0");
  if (!(v_off > 0.0 && v_off < v_ref)) throw ConfigError("denoiser needs 0 < v_off < v_ref");
}

Denoiser::Denoiser(DenoiserConfig config) : config_(config) {
  config_.validate();
  buffer_.reserve(config_.window);
}

double Denoiser::volatility() const {
  if (buffer_.empty()) return 0.0;
  const double n = static_cast<double>(buffer_.size());
  double mean = 0.0;
  for (double v : buffer_) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : buffer_) var += (v - mean) * (v - mean);
  return std::sqrt(var / n) / (std::abs(mean) + 1e-9);
}

double Denoiser::push(double raw) {
  if (!std::isfinite(raw)) throw NumericError("denoiser input is not finite");
  if (buffer_.size() == config_.window) buffer_.erase(buffer_.begin());
  buffer_.push_back(raw);

  const double v = volatility();
  if (v < config_.v_off) {
    last_width_ = 0.0;
    return raw;
  }
  const double width = config_.sigma_max * std::min(1.0, v / config_.v_ref);
  last_width_ = width;
  const std::size_t t = buffer_.size() - 1;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j <= t; ++j) {
    const double lag = static_cast<double>(t - j);
    const double w = std::exp(-lag * lag / (2.0 * width * width));
    num += w * buffer_[j];
    den += w;
  }
  // Keep the result inside the buffer range despite rounding.
  const auto [lo, hi] = std::minmax_element(buffer_.begin(), buffer_.end());
  return std::clamp(num / den, *lo, *hi);
}

void Denoiser::reset() {
  buffer_.clear();
  last_width_ = 0.0;
}

SliDenoiser::SliDenoiser(std::size_t channels, DenoiserConfig config, bool enabled)
    : channels_(channels, Denoiser(config)), enabled_(enabled) {}

std::vector<double> SliDenoiser::push(std::span<const double> raw) {
  if (raw.size() != channels_.size()) throw ShapeError("SLI channel count mismatch");
  std::vector<double> out(raw.begin(), raw.end());
  if (!enabled_) return out;
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = channels_[i].push(raw[i]);
  return out;
}

void SliDenoiser::reset() {
  for (auto& c : channels_) c.reset();
}

}  // namespace slotune
