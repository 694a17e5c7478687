#include "dtreason/distance.hpp"

#include <cctype>

#include "dtreason/error.hpp"

namespace dtr {

namespace {

std::string trim(std::string_view s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

std::vector<std::string> split_args(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

bool needs_scaling(const DistanceSpec& spec) { return spec.l1 || spec.linf; }

bool scaled_kind(FeatureKind k) { return k != FeatureKind::Nominal; }

void require_bounds(const FeatureMeta& f) {
  if (!f.has_bounds()) {
    throw Error(ErrorKind::Validation, "feature '" + f.name +
                                           "' needs min/max normalization bounds for distance terms");
  }
}

}  // namespace

DistanceSpec parse_distance_spec(std::string_view text) {
  std::string s = trim(text);
  auto open = s.find('(');
  if (open == std::string::npos || s.back() != ')') {
    throw Error(ErrorKind::Parse, "minimize spec must look like l1norm(F, CE) or dist(F, CE, ...)");
  }
  std::string fn = trim(std::string_view(s).substr(0, open));
  auto args = split_args(std::string_view(s).substr(open + 1, s.size() - open - 2));
  if (args.size() < 2 || args[0].empty() || args[1].empty()) {
    throw Error(ErrorKind::Parse, "minimize spec needs two instance names");
  }
  DistanceSpec spec;
  spec.from = args[0];
  spec.to = args[1];
  if (fn == "l1norm") {
    if (args.size() != 2) throw Error(ErrorKind::Parse, "l1norm takes exactly two instances");
    return spec;
  }
  if (fn != "dist") throw Error(ErrorKind::Parse, "unknown distance '" + fn + "'");
  spec.beta = 0;
  spec.gamma = 0;
  for (std::size_t i = 2; i < args.size(); ++i) {
    auto eq = args[i].find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::Parse, "expected key=value in '" + args[i] + "'");
    std::string key = trim(std::string_view(args[i]).substr(0, eq));
    Rat value = Rat::parse(trim(std::string_view(args[i]).substr(eq + 1)));
    if (value.sign() < 0) throw Error(ErrorKind::Validation, key + " must be non-negative");
    if (key == "beta") {
      spec.beta = value;
    } else if (key == "gamma") {
      spec.gamma = value;
    } else {
      throw Error(ErrorKind::Parse, "unknown distance parameter '" + key + "'");
    }
  }
  spec.l1 = !spec.beta.is_zero();
  spec.linf = !spec.gamma.is_zero();
  return spec;
}

std::string render_distance_spec(const DistanceSpec& spec) {
  if (spec.matching && spec.l1 && !spec.linf && spec.beta == Rat(1)) {
    return "l1norm(" + spec.from + ", " + spec.to + ")";
  }
  return "dist(" + spec.from + ", " + spec.to + ", beta=" + spec.beta.str() +
         ", gamma=" + spec.gamma.str() + ")";
}

ObjectiveBuild build_objective(const DistanceSpec& spec, const VarLayout& layout) {
  auto from = layout.instance_index(spec.from);
  auto to = layout.instance_index(spec.to);
  if (!from) throw Error(ErrorKind::UnknownName, "unknown instance '" + spec.from + "'");
  if (!to) throw Error(ErrorKind::UnknownName, "unknown instance '" + spec.to + "'");

  ObjectiveBuild out;
  out.first_slack = static_cast<VarId>(layout.size());
  VarId next = out.first_slack;
  auto fresh = [&] {
    ++out.slack_count;
    return next++;
  };
  auto at_least = [&](VarId slack, const LinExpr& e) {
    // slack >= e and slack >= -e
    LinExpr s = LinExpr::var(slack);
    out.side.push_back(LinearConstraint::normalize(s, RawRel::GE, e));
    out.side.push_back(LinearConstraint::normalize(s, RawRel::GE, -e));
  };

  std::vector<VarId> scaled;
  const auto& features = layout.features();
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto& meta = features[f];
    if (scaled_kind(meta.kind)) {
      if (!needs_scaling(spec)) continue;
      require_bounds(meta);
      Rat width = *meta.max - *meta.min;
      if (width.is_zero()) continue;
      LinExpr diff = LinExpr::var(layout.var(*to, f)) - LinExpr::var(layout.var(*from, f));
      VarId t = fresh();
      at_least(t, diff * (Rat(1) / width));
      scaled.push_back(t);
      if (spec.l1) out.objective.add_term(t, spec.beta);
    } else if (spec.matching) {
      for (std::size_t k = 0; k < meta.values.size(); ++k) {
        LinExpr diff = LinExpr::var(layout.var(*to, f, k)) - LinExpr::var(layout.var(*from, f, k));
        VarId s = fresh();
        at_least(s, diff);
        out.objective.add_term(s, Rat(1, 2));
      }
    }
  }
  if (spec.linf) {
    VarId z = fresh();
    LinExpr zx = LinExpr::var(z);
    out.side.push_back(LinearConstraint::normalize(zx, RawRel::GE, LinExpr(Rat(0))));
    for (VarId t : scaled) {
      out.side.push_back(LinearConstraint::normalize(zx, RawRel::GE, LinExpr::var(t)));
    }
    out.objective.add_term(z, spec.gamma);
  }
  return out;
}

Rat eval_distance(const DistanceSpec& spec, const NamedPoint& from, const NamedPoint& to,
                  const VarLayout& layout) {
  auto get = [](const NamedPoint& p, const std::string& name) -> const FeatureValue& {
    auto it = p.find(name);
    if (it == p.end()) throw Error(ErrorKind::Validation, "point lacks feature '" + name + "'");
    return it->second;
  };
  Rat matching;
  Rat sum;
  Rat largest;
  for (const auto& meta : layout.features()) {
    const auto& a = get(from, meta.name);
    const auto& b = get(to, meta.name);
    if (!scaled_kind(meta.kind)) {
      if (render_value(a) != render_value(b)) matching += 1;
      continue;
    }
    if (!needs_scaling(spec)) continue;
    require_bounds(meta);
    Rat width = *meta.max - *meta.min;
    if (width.is_zero()) continue;
    Rat d = (std::get<Rat>(b) - std::get<Rat>(a)).abs() / width;
    sum += d;
    largest = max(largest, d);
  }
  Rat total;
  if (spec.matching) total += matching;
  if (spec.l1) total += spec.beta * sum;
  if (spec.linf) total += spec.gamma * largest;
  return total;
}

}  // namespace dtr
