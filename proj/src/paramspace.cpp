#include "slotune/paramspace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "slotune/error.hpp"

namespace slotune {

namespace {

std::string coord_name(const BlockSpec& b, std::size_t block, std::size_t i) {
  if (i < b.labels.size() && !b.labels[i].empty()) return b.labels[i];
  std::ostringstream os;
  os << "block" << block << "[" << i << "]";
  return os.str();
}

}  // namespace

BlockSpec BlockSpec::hypercube(std::vector<double> lo, std::vector<double> hi,
                               std::vector<std::string> labels) {
  BlockSpec b;
  b.kind = BlockKind::Hypercube;
  b.dim = lo.size();
  b.lo = std::move(lo);
  b.hi = std::move(hi);
  b.labels = std::move(labels);
  return b;
}

BlockSpec BlockSpec::simplex(std::size_t dim, std::vector<std::string> labels) {
  BlockSpec b;
  b.kind = BlockKind::Simplex;
  b.dim = dim;
  b.labels = std::move(labels);
  return b;
}

ParamSpace::ParamSpace(std::vector<BlockSpec> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw ConfigError("parameter space has no blocks");
  for (std::size_t k = 0; k < blocks_.size(); ++k) {
    const auto& b = blocks_[k];
    if (b.dim < 1) throw ConfigError("block " + std::to_string(k) + " has dim 0");
    if (!b.labels.empty() && b.labels.size() != b.dim)
      throw ConfigError("block " + std::to_string(k) + " label count does not match dim");
    if (b.kind == BlockKind::Simplex) {
      if (b.dim < 2) throw ConfigError("simplex block " + std::to_string(k) + " needs dim >= 2");
    } else {
      if (b.lo.size() != b.dim || b.hi.size() != b.dim)
        throw ConfigError("hypercube block " + std::to_string(k) + " bounds do not match dim");
      for (std::size_t i = 0; i < b.dim; ++i) {
        if (!(b.lo[i] < b.hi[i]) || !std::isfinite(b.lo[i]) || !std::isfinite(b.hi[i]))
          throw ConfigError("hypercube coordinate " + coord_name(b, k, i) + " needs lo < hi");
      }
    }
    dimension_ += b.dim;
  }
}

std::size_t ParamSpace::hypercube_dimension() const {
  std::size_t d = 0;
  for (const auto& b : blocks_)
    if (b.kind == BlockKind::Hypercube) d += b.dim;
  return d;
}

bool ParamSpace::has_simplex() const {
  return std::any_of(blocks_.begin(), blocks_.end(),
                     [](const BlockSpec& b) { return b.kind == BlockKind::Simplex; });
}

std::vector<std::string> ParamSpace::labels() const {
  std::vector<std::string> out;
  out.reserve(dimension_);
  for (std::size_t k = 0; k < blocks_.size(); ++k)
    for (std::size_t i = 0; i < blocks_[k].dim; ++i) out.push_back(coord_name(blocks_[k], k, i));
  return out;
}

bool operator==(const ParamSpace& a, const ParamSpace& b) {
  if (a.blocks_.size() != b.blocks_.size()) return false;
  for (std::size_t k = 0; k < a.blocks_.size(); ++k) {
    const auto& x = a.blocks_[k];
    const auto& y = b.blocks_[k];
    if (x.kind != y.kind || x.dim != y.dim || x.lo != y.lo || x.hi != y.hi) return false;
  }
  return true;
}

std::vector<double> ParamVector::flatten() const {
  std::vector<double> out;
  for (const auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

ParamVector ParamVector::unflatten(const ParamSpace& space, std::span<const double> flat) {
  if (flat.size() != space.dimension())
    throw ShapeError("flat vector has " + std::to_string(flat.size()) + " values, space needs " +
                     std::to_string(space.dimension()));
  ParamVector x;
  std::size_t off = 0;
  for (const auto& b : space.blocks()) {
    x.blocks.emplace_back(flat.begin() + off, flat.begin() + off + b.dim);
    off += b.dim;
  }
  return x;
}

void DistanceSpec::validate(std::size_t max_simplex_dim) const {
  if (!(alpha >= 0.0)) throw ConfigError("distance alpha must be >= 0");
  const double cap = max_simplex_dim > 0 ? 1.0 / static_cast<double>(max_simplex_dim) : 1.0;
  if (!(simplex_floor > 0.0 && simplex_floor < cap))
    throw ConfigError("simplex_floor must lie in (0, 1/max_dim)");
}

void check_shape(const ParamVector& x, const ParamSpace& space) {
  if (x.blocks.size() != space.num_blocks())
    throw ShapeError("vector has " + std::to_string(x.blocks.size()) + " blocks, space has " +
                     std::to_string(space.num_blocks()));
  for (std::size_t k = 0; k < x.blocks.size(); ++k)
    if (x.blocks[k].size() != space.blocks()[k].dim)
      throw ShapeError("block " + std::to_string(k) + " has wrong dimension");
}

namespace {

void check_simplex(std::span<const double> u, std::size_t block) {
  double sum = 0.0;
  for (double c : u) {
    if (!std::isfinite(c) || c < 0.0)
      throw RangeError("simplex block " + std::to_string(block) + " has a negative component");
    sum += c;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw RangeError("simplex block " + std::to_string(block) + " does not sum to 1");
}

}  // namespace

void check_normalized(const ParamVector& x, const ParamSpace& space) {
  check_shape(x, space);
  for (std::size_t k = 0; k < x.blocks.size(); ++k) {
    const auto& b = space.blocks()[k];
    if (b.kind == BlockKind::Simplex) {
      check_simplex(x.blocks[k], k);
      continue;
    }
    for (std::size_t i = 0; i < b.dim; ++i) {
      const double v = x.blocks[k][i];
      if (!(v >= 0.0 && v <= 1.0))
        throw RangeError("normalized coordinate " + coord_name(b, k, i) + " = " +
                         std::to_string(v) + " outside [0,1]");
    }
  }
}

ParamVector normalize(const ParamVector& raw, const ParamSpace& space) {
  check_shape(raw, space);
  ParamVector out = raw;
  for (std::size_t k = 0; k < raw.blocks.size(); ++k) {
    const auto& b = space.blocks()[k];
    if (b.kind == BlockKind::Simplex) {
      check_simplex(raw.blocks[k], k);
      continue;
    }
    for (std::size_t i = 0; i < b.dim; ++i) {
      const double v = raw.blocks[k][i];
      if (!(v >= b.lo[i] && v <= b.hi[i]))
        throw RangeError("raw coordinate " + coord_name(b, k, i) + " = " + std::to_string(v) +
                         " outside [" + std::to_string(b.lo[i]) + ", " +
                         std::to_string(b.hi[i]) + "]");
      out.blocks[k][i] = (v - b.lo[i]) / (b.hi[i] - b.lo[i]);
    }
  }
  return out;
}

ParamVector denormalize(const ParamVector& normalized, const ParamSpace& space) {
  check_normalized(normalized, space);
  ParamVector out = normalized;
  for (std::size_t k = 0; k < normalized.blocks.size(); ++k) {
    const auto& b = space.blocks()[k];
    if (b.kind == BlockKind::Simplex) continue;
    for (std::size_t i = 0; i < b.dim; ++i) {
      const double t = normalized.blocks[k][i];
      // Endpoints map exactly so that round trips hit lo/hi bit-for-bit.
      out.blocks[k][i] = t == 1.0 ? b.hi[i] : b.lo[i] + t * (b.hi[i] - b.lo[i]);
    }
  }
  return out;
}

std::vector<double> softmax_map(std::span<const double> z) {
  if (z.size() < 2) throw ShapeError("softmax needs at least 2 inputs");
  double zmax = -std::numeric_limits<double>::infinity();
  for (double v : z) {
    if (!std::isfinite(v)) throw NumericError("softmax input is not finite");
    zmax = std::max(zmax, v);
  }
  std::vector<double> out(z.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    out[i] = std::exp(z[i] - zmax);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

std::vector<double> close_composition(std::span<const double> u, double floor) {
  std::vector<double> out(u.begin(), u.end());
  double sum = 0.0;
  for (auto& v : out) {
    v = std::max(v, floor);
    sum += v;
  }
  for (auto& v : out) v /= sum;
  return out;
}

std::vector<double> clr(std::span<const double> u, double floor) {
  if (u.size() < 2) throw ShapeError("clr needs a composition with at least 2 parts");
  auto c = close_composition(u, floor);
  double mean_log = 0.0;
  for (auto& v : c) {
    v = std::log(v);
    mean_log += v;
  }
  mean_log /= static_cast<double>(c.size());
  for (auto& v : c) v -= mean_log;
  return c;
}

double aitchison_distance(std::span<const double> u, std::span<const double> v, double floor) {
  if (u.size() != v.size()) throw ShapeError("compositions differ in length");
  const auto a = clr(u, floor);
  const auto b = clr(v, floor);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double mixed_distance(const ParamVector& x, const ParamVector& y, const ParamSpace& space,
                      const DistanceSpec& spec) {
  check_shape(x, space);
  check_shape(y, space);
  double hyper = 0.0;
  double simplex = 0.0;
  for (std::size_t k = 0; k < space.num_blocks(); ++k) {
    const auto& b = space.blocks()[k];
    if (b.kind == BlockKind::Hypercube) {
      for (std::size_t i = 0; i < b.dim; ++i) {
        const double d = x.blocks[k][i] - y.blocks[k][i];
        hyper += d * d;
      }
    } else if (spec.alpha > 0.0) {
      const double d = aitchison_distance(x.blocks[k], y.blocks[k], spec.simplex_floor);
      simplex += d * d;
    }
  }
  return std::sqrt(hyper + spec.alpha * simplex);
}

}  // namespace slotune
