#pragma once

#include <set>
#include <string>
#include <string_view>

#include "dtreason/features.hpp"

namespace dtr {

/// Distance between a factual instance `from` and a contrastive instance `to`:
///   sum over nominal features of [x_to != x_from]
///   + beta  * sum over ordinal/continuous features of |x_to - x_from| / (max - min)
///   + gamma * max over ordinal/continuous features of |x_to - x_from| / (max - min)
struct DistanceSpec {
  std::string from;
  std::string to;
  Rat beta = 1;
  Rat gamma = 0;
  bool matching = true;
  bool l1 = true;
  bool linf = false;
};

/// Accepts "l1norm(F, CE)" (beta = 1, gamma = 0) and
/// "dist(F, CE, beta=<rat>, gamma=<rat>)".
DistanceSpec parse_distance_spec(std::string_view text);
std::string render_distance_spec(const DistanceSpec& spec);

/// Linearized objective. Slack variables are numbered from layout.size().
struct ObjectiveBuild {
  LinExpr objective;
  Conjunction side;
  std::set<VarId> new_integral;  // always empty: matching uses one-hot slacks
  VarId first_slack = 0;
  std::size_t slack_count = 0;
};

/// Per scaled feature a slack t >= +-(x_to - x_from)/(max - min); L1 adds
/// beta * sum t, L-infinity adds gamma * z with z >= t. Per nominal value a
/// slack s >= +-(x_to^v - x_from^v), matching adds sum s / 2. Throws when a
/// feature needed by the L1/L-infinity terms has no normalization bounds.
ObjectiveBuild build_objective(const DistanceSpec& spec, const VarLayout& layout);

/// Direct evaluation of the same distance on two fully specified points.
Rat eval_distance(const DistanceSpec& spec, const NamedPoint& from, const NamedPoint& to,
                  const VarLayout& layout);

}  // namespace dtr
