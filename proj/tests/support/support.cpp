#include "support.hpp"

#include <boost/multiprecision/cpp_int.hpp>

namespace dtr::testing {

namespace {

long uniform(Rng& rng, long lo, long hi) { return std::uniform_int_distribution<long>(lo, hi)(rng); }

Rat quarter_between(Rng& rng, const Rat& lo, const Rat& hi) {
  // quarter-integers in [lo, hi], bounds assumed integral
  long a = (lo * Rat(4)).num().get_si();
  long b = (hi * Rat(4)).num().get_si();
  return Rat(uniform(rng, a, b), 4);
}

int build(Rng& rng, const std::vector<FeatureMeta>& features, const TreeOptions& opts, int depth,
          std::vector<TreeNode>& nodes) {
  int index = static_cast<int>(nodes.size());
  nodes.emplace_back();
  bool split = depth == 0 || (depth < opts.max_depth && uniform(rng, 0, 99) < 70);
  if (!split) {
    auto label = opts.classes[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(opts.classes.size()) - 1))];
    nodes[static_cast<std::size_t>(index)].content = Leaf{label, Rat(uniform(rng, 1, 10), 10)};
    return index;
  }
  std::vector<std::size_t> numeric;
  std::vector<std::size_t> nominal;
  for (std::size_t f = 0; f < features.size(); ++f) {
    (features[f].kind == FeatureKind::Nominal ? nominal : numeric).push_back(f);
  }
  bool use_nominal = !nominal.empty() && (numeric.empty() || uniform(rng, 0, 2) == 0);
  if (use_nominal) {
    std::size_t f = nominal[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(nominal.size()) - 1))];
    auto v = static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(features[f].values.size()) - 1));
    nodes[static_cast<std::size_t>(index)].content = EqualitySplit{f, v};
  } else {
    LinearSplit s;
    std::size_t f = numeric[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(numeric.size()) - 1))];
    bool oblique = opts.oblique && numeric.size() > 1 && uniform(rng, 0, 2) == 0;
    if (!oblique) {
      s.terms.emplace_back(f, Rat(1));
      Rat lo = *features[f].min;
      Rat hi = *features[f].max;
      s.threshold = features[f].kind == FeatureKind::Ordinal
                        ? Rat(uniform(rng, (lo * Rat(2)).num().get_si(), (hi * Rat(2)).num().get_si()), 2)
                        : quarter_between(rng, lo, hi);
    } else {
      std::size_t g = f;
      while (g == f) g = numeric[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(numeric.size()) - 1))];
      std::pair<std::size_t, std::size_t> pair{std::min(f, g), std::max(f, g)};
      Rat lo;
      Rat hi;
      for (std::size_t h : {pair.first, pair.second}) {
        long c = 0;
        while (c == 0) c = uniform(rng, -2, 2);
        s.terms.emplace_back(h, Rat(c));
        Rat a = Rat(c) * *features[h].min;
        Rat b = Rat(c) * *features[h].max;
        lo += min(a, b);
        hi += max(a, b);
      }
      s.threshold = quarter_between(rng, lo, hi);
    }
    nodes[static_cast<std::size_t>(index)].content = std::move(s);
  }
  int left = build(rng, features, opts, depth + 1, nodes);
  int right = build(rng, features, opts, depth + 1, nodes);
  nodes[static_cast<std::size_t>(index)].left = left;
  nodes[static_cast<std::size_t>(index)].right = right;
  return index;
}

using BigRat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

BigRat to_big(const Rat& r) { return BigRat(BigInt(r.num().get_str()), BigInt(r.den().get_str())); }

}  // namespace

Rat random_rat(Rng& rng, long lo, long hi, long max_den) {
  long den = uniform(rng, 1, max_den);
  return Rat(uniform(rng, lo * den, hi * den), den);
}

std::vector<FeatureMeta> random_features(Rng& rng, std::size_t count, bool discrete_only) {
  std::vector<FeatureMeta> out;
  for (std::size_t i = 0; i < count; ++i) {
    FeatureMeta f;
    f.name = "f" + std::to_string(i);
    long kind = uniform(rng, discrete_only ? 1 : 0, 2);
    if (kind == 0) {
      f.kind = FeatureKind::Continuous;
      long lo = uniform(rng, -5, 5);
      f.min = Rat(lo);
      f.max = Rat(lo + uniform(rng, 1, 10));
    } else if (kind == 1) {
      f.kind = FeatureKind::Ordinal;
      long lo = uniform(rng, 0, 20);
      f.min = Rat(lo);
      f.max = Rat(lo + uniform(rng, 1, 5));
    } else {
      f.kind = FeatureKind::Nominal;
      long k = uniform(rng, 2, 3);
      for (long v = 0; v < k; ++v) f.values.push_back(std::string(1, static_cast<char>('p' + v)));
    }
    out.push_back(std::move(f));
  }
  return out;
}

DecisionTree random_tree(Rng& rng, const std::vector<FeatureMeta>& features, const TreeOptions& opts) {
  DecisionTree t;
  t.model_id = "m";
  t.features = features;
  build(rng, features, opts, 0, t.nodes);
  return t;
}

NamedPoint random_point(Rng& rng, const std::vector<FeatureMeta>& features) {
  NamedPoint p;
  for (const auto& f : features) {
    switch (f.kind) {
      case FeatureKind::Continuous: p[f.name] = quarter_between(rng, *f.min, *f.max); break;
      case FeatureKind::Ordinal:
        p[f.name] = Rat(uniform(rng, f.min->num().get_si(), f.max->num().get_si()));
        break;
      case FeatureKind::Nominal:
        p[f.name] = f.values[static_cast<std::size_t>(uniform(rng, 0, static_cast<long>(f.values.size()) - 1))];
        break;
    }
  }
  return p;
}

Conjunction random_conjunction(Rng& rng, std::size_t vars, std::size_t constraints,
                               bool allow_equalities) {
  Conjunction out;
  for (std::size_t k = 0; k < constraints; ++k) {
    LinExpr e;
    for (std::size_t v = 0; v < vars; ++v) {
      if (uniform(rng, 0, 2) == 0) continue;
      e.add_term(static_cast<VarId>(v), Rat(uniform(rng, -3, 3)));
    }
    e.add_constant(Rat(uniform(rng, -6, 6)));
    long r = uniform(rng, 0, allow_equalities ? 9 : 8);
    RawRel rel = r < 5 ? RawRel::LE : r < 7 ? RawRel::LT : r < 9 ? RawRel::GE : RawRel::EQ;
    out.push_back(LinearConstraint::normalize(e, rel));
  }
  return out;
}

std::vector<NamedPoint> enumerate_grid(const std::vector<FeatureMeta>& features) {
  std::vector<NamedPoint> out{NamedPoint{}};
  for (const auto& f : features) {
    std::vector<FeatureValue> values;
    if (f.kind == FeatureKind::Nominal) {
      for (const auto& v : f.values) values.emplace_back(v);
    } else {
      for (long x = f.min->num().get_si(); x <= f.max->num().get_si(); ++x) values.emplace_back(Rat(x));
    }
    std::vector<NamedPoint> next;
    for (const auto& p : out) {
      for (const auto& v : values) {
        NamedPoint q = p;
        q[f.name] = v;
        next.push_back(std::move(q));
      }
    }
    out = std::move(next);
  }
  return out;
}

bool independent_holds(const Conjunction& c, const Point& p) {
  for (const auto& con : c) {
    BigRat sum = to_big(con.lhs().constant());
    for (const auto& [id, coef] : con.lhs().terms()) {
      auto it = p.find(id);
      if (it == p.end()) return false;
      sum += to_big(coef) * to_big(it->second);
    }
    bool ok = con.rel() == Rel::LE ? sum <= 0 : con.rel() == Rel::LT ? sum < 0 : sum == 0;
    if (!ok) return false;
  }
  return true;
}

bool independent_integral(const Point& p, const std::set<VarId>& int_vars) {
  for (VarId v : int_vars) {
    auto it = p.find(v);
    if (it == p.end()) return false;
    if (boost::multiprecision::denominator(to_big(it->second)) != 1) return false;
  }
  return true;
}

}  // namespace dtr::testing
