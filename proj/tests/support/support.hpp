#pragma once

#include <random>
#include <set>
#include <string>
#include <vector>

#include "dtreason/features.hpp"
#include "dtreason/lp.hpp"
#include "dtreason/tree.hpp"

namespace dtr::testing {

using Rng = std::mt19937_64;

Rat random_rat(Rng& rng, long lo, long hi, long max_den = 4);

/// Feature lists mixing continuous, ordinal and nominal features. With
/// `discrete_only`, continuous features are left out.
std::vector<FeatureMeta> random_features(Rng& rng, std::size_t count, bool discrete_only = false);

struct TreeOptions {
  int max_depth = 5;
  std::vector<std::string> classes = {"a", "b"};
  bool oblique = true;
};

/// Random tree. Thresholds sit on quarter-integers inside feature ranges so
/// that random points regularly land on split boundaries.
DecisionTree random_tree(Rng& rng, const std::vector<FeatureMeta>& features, const TreeOptions& opts);

/// Point inside every feature's domain. Continuous values are quarter-integers.
NamedPoint random_point(Rng& rng, const std::vector<FeatureMeta>& features);

/// Small-coefficient random constraint system over variables 0..vars-1.
Conjunction random_conjunction(Rng& rng, std::size_t vars, std::size_t constraints,
                               bool allow_equalities = true);

/// Every grid point of a discrete feature list (ordinal ranges x nominal domains).
std::vector<NamedPoint> enumerate_grid(const std::vector<FeatureMeta>& features);

/// Re-checks constraints with Boost rationals, independent of Rat arithmetic.
bool independent_holds(const Conjunction& c, const Point& p);
bool independent_integral(const Point& p, const std::set<VarId>& int_vars);

}  // namespace dtr::testing
