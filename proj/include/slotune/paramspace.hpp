#pragma once

// Mixed hypercube x simplex configuration space.
//
// A configuration is an ordered list of blocks. Hypercube blocks carry
// independent knobs with physical bounds; simplex blocks carry allocations
// (non-negative, summing to one). Optimization happens on the normalized
// representation, where every hypercube coordinate lies in [0,1] and simplex
// blocks are passed through untouched.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace slotune {

enum class BlockKind { Hypercube, Simplex };

struct BlockSpec {
  BlockKind kind = BlockKind::Hypercube;
  std::size_t dim = 0;
  std::vector<double> lo;  // hypercube only, physical units
  std::vector<double> hi;
  std::vector<std::string> labels;

  static BlockSpec hypercube(std::vector<double> lo, std::vector<double> hi,
                             std::vector<std::string> labels = {});
  static BlockSpec simplex(std::size_t dim, std::vector<std::string> labels = {});
};

class ParamSpace {
 public:
  ParamSpace() = default;
  /// Throws ConfigError when a block violates its invariants.
  explicit ParamSpace(std::vector<BlockSpec> blocks);

  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  std::size_t num_blocks() const { return blocks_.size(); }
  std::size_t dimension() const { return dimension_; }
  std::size_t hypercube_dimension() const;
  bool has_simplex() const;

  /// Flattened coordinate labels in block order.
  std::vector<std::string> labels() const;

  friend bool operator==(const ParamSpace& a, const ParamSpace& b);

 private:
  std::vector<BlockSpec> blocks_;
  std::size_t dimension_ = 0;
};

/// One value list per block of the owning ParamSpace. Whether values are raw
/// or normalized is a property of how the vector was produced.
struct ParamVector {
  std::vector<std::vector<double>> blocks;

  std::vector<double> flatten() const;
  static ParamVector unflatten(const ParamSpace& space, std::span<const double> flat);

  friend bool operator==(const ParamVector&, const ParamVector&) = default;
};

struct DistanceSpec {
  double alpha = 0.5;
  double simplex_floor = 1e-6;

  void validate(std::size_t max_simplex_dim) const;
};

/// Throws ShapeError when x does not match the block layout.
void check_shape(const ParamVector& x, const ParamSpace& space);

/// Validates a normalized vector: hypercube coords in [0,1], simplex blocks
/// non-negative and summing to one within 1e-9.
void check_normalized(const ParamVector& x, const ParamSpace& space);

ParamVector normalize(const ParamVector& raw, const ParamSpace& space);
ParamVector denormalize(const ParamVector& normalized, const ParamSpace& space);

/// Numerically stable softmax; output lies on the simplex.
std::vector<double> softmax_map(std::span<const double> z);

/// Clamp components below `floor` up to `floor` and renormalize.
std::vector<double> close_composition(std::span<const double> u, double floor);

/// Centered log-ratio transform of a composition (after flooring).
std::vector<double> clr(std::span<const double> u, double floor = 1e-6);

double aitchison_distance(std::span<const double> u, std::span<const double> v,
                          double floor = 1e-6);

/// sqrt(||h_x - h_y||^2 + alpha * sum_l d_A(u_x^l, u_y^l)^2)
double mixed_distance(const ParamVector& x, const ParamVector& y, const ParamSpace& space,
                      const DistanceSpec& spec = {});

/// Uniform random normalized point: hypercube coords uniform, simplex blocks
/// from the flat Dirichlet distribution.
template <class Rng>
ParamVector sample_uniform(const ParamSpace& space, Rng& rng);

}  // namespace slotune

#include "slotune/detail/paramspace_sampling.hpp"
