#pragma once

#include <cstddef>
#include <deque>
#include <span>
#include <vector>

namespace slotune {

struct DenoiserConfig {
  std::size_t window = 8;  // volatility lookback, samples
  double sigma_max = 3.0;  // widest kernel, samples
  double v_ref = 0.2;      // volatility at which the kernel reaches sigma_max
  double v_off = 0.01;     // below this the filter passes samples through

  void validate() const;
};

/// Causal Gaussian smoother for one SLI channel. The kernel width grows with
/// the coefficient of variation of the last `window` samples; a stable
/// signal passes through unchanged.
class Denoiser {
 public:
  explicit Denoiser(DenoiserConfig config = {});

  double push(double raw);
  /// Empties the buffer; the next push passes through.
  void reset();

  /// Coefficient of variation of the current buffer.
  double volatility() const;
  /// Kernel width used by the last push (0 when passed through).
  double last_width() const { return last_width_; }
  std::span<const double> buffer() const { return {buffer_.data(), buffer_.size()}; }
  const DenoiserConfig& config() const { return config_; }

 private:
  DenoiserConfig config_;
  std::vector<double> buffer_;  // oldest first
  double last_width_ = 0.0;
};

/// One denoiser per SLI channel, or raw pass-through when disabled.
class SliDenoiser {
 public:
  SliDenoiser(std::size_t channels, DenoiserConfig config, bool enabled = true);

  std::vector<double> push(std::span<const double> raw);
  void reset();
  bool enabled() const { return enabled_; }

 private:
  std::vector<Denoiser> channels_;
  bool enabled_;
};

}  // namespace slotune
