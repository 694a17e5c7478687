#pragma once

#include <set>

#include "dtreason/linear.hpp"

namespace dtr {

/// Fourier-Motzkin elimination of one variable. Equalities mentioning `v`
/// are used for substitution first; otherwise every lower/upper bound pair
/// is combined (strict if either side is strict). The result has the same
/// solution set as "exists v. c".
Conjunction eliminate_var(const Conjunction& c, VarId v);

/// Drops every constraint entailed by the remaining ones (one LP per
/// constraint, in order). Unsatisfiable input collapses to {false}.
Conjunction remove_redundant(const Conjunction& c);

/// Real shadow of `c` on `keep`: eliminates the other variables lowest id
/// first, pruning redundancy after each step.
Conjunction project(const Conjunction& c, const std::set<VarId>& keep);

/// True iff every point of `a` satisfies `b`.
bool entails(const Conjunction& a, const Conjunction& b);

}  // namespace dtr
