#include "slotune/testbed/testbed.hpp"

#include "slotune/error.hpp"

namespace slotune {

void check_knob_layout(const ParamSpace& space, std::size_t classes) {
  const auto& b = space.blocks();
  const bool ok = b.size() == 3 && b[0].kind == BlockKind::Simplex && b[0].dim == classes &&
                  b[1].kind == BlockKind::Hypercube && b[1].dim == classes &&
                  b[2].kind == BlockKind::Hypercube && b[2].dim == classes;
  if (!ok)
    throw ConfigError("testbed expects blocks [simplex weights, hypercube marking, hypercube cwnd] of " +
                      std::to_string(classes) + " classes");
}

KnobView knob_view(const ParamVector& x, const ParamSpace& space) {
  check_knob_layout(space, space.blocks().front().dim);
  check_shape(x, space);
  return {x.blocks[0], x.blocks[1], x.blocks[2]};
}

ParamSpace canonical_space(std::size_t classes, double k_lo_kb, double k_hi_kb, double cwnd_lo,
                           double cwnd_hi) {
  static const std::vector<std::string> kDscp{"10", "18", "26"};
  std::vector<std::string> w, k, c;
  for (std::size_t i = 0; i < classes; ++i) {
    const std::string tag = classes == kDscp.size() ? kDscp[i] : std::to_string(i);
    w.push_back("weight_" + tag);
    k.push_back("marking_kb_" + tag);
    c.push_back("init_cwnd_" + tag);
  }
  return ParamSpace({BlockSpec::simplex(classes, w),
                     BlockSpec::hypercube(std::vector<double>(classes, k_lo_kb),
                                          std::vector<double>(classes, k_hi_kb), k),
                     BlockSpec::hypercube(std::vector<double>(classes, cwnd_lo),
                                          std::vector<double>(classes, cwnd_hi), c)});
}

}  // namespace slotune
