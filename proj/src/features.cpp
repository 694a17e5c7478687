#include "dtreason/features.hpp"

#include <algorithm>

#include "dtreason/error.hpp"
#include "dtreason/milp.hpp"

namespace dtr {

std::string_view kind_name(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Continuous: return "continuous";
    case FeatureKind::Ordinal: return "ordinal";
    case FeatureKind::Nominal: return "nominal";
  }
  return "?";
}

std::optional<std::size_t> FeatureMeta::value_index(std::string_view value) const {
  auto it = std::find(values.begin(), values.end(), value);
  if (it == values.end()) return std::nullopt;
  return static_cast<std::size_t>(it - values.begin());
}

void validate(const FeatureMeta& meta) {
  auto fail = [&](const std::string& why) {
    throw Error(ErrorKind::Validation, "feature '" + meta.name + "': " + why);
  };
  if (meta.name.empty()) throw Error(ErrorKind::Validation, "feature with empty name");
  switch (meta.kind) {
    case FeatureKind::Ordinal:
      if (!meta.has_bounds()) fail("ordinal features need min and max");
      if (!meta.min->is_integer() || !meta.max->is_integer()) fail("ordinal bounds must be integers");
      if (*meta.min > *meta.max) fail("min exceeds max");
      break;
    case FeatureKind::Nominal: {
      if (meta.values.size() < 2) fail("nominal features need at least two values");
      auto sorted = meta.values;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        fail("nominal values must be distinct");
      }
      break;
    }
    case FeatureKind::Continuous:
      if (meta.min.has_value() != meta.max.has_value()) fail("give both min and max, or neither");
      if (meta.has_bounds() && !(*meta.min < *meta.max)) fail("min must be below max");
      break;
  }
}

Rat rat_from_json(const nlohmann::json& v) {
  if (v.is_string()) return Rat::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rat(v.get<long>());
  if (v.is_number()) return Rat::parse(v.dump());
  throw Error(ErrorKind::Parse, "expected a number or numeric string, got " + v.dump());
}

std::vector<FeatureMeta> parse_metadata(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array()) {
    throw Error(ErrorKind::Parse, "metadata document needs a \"features\" array");
  }
  std::vector<FeatureMeta> out;
  for (const auto& f : doc["features"]) {
    if (!f.is_object() || !f.contains("name") || !f.contains("kind")) {
      throw Error(ErrorKind::Parse, "feature entries need \"name\" and \"kind\"");
    }
    FeatureMeta meta;
    meta.name = f["name"].get<std::string>();
    auto kind = f["kind"].get<std::string>();
    if (kind == "continuous") {
      meta.kind = FeatureKind::Continuous;
    } else if (kind == "ordinal") {
      meta.kind = FeatureKind::Ordinal;
    } else if (kind == "nominal") {
      meta.kind = FeatureKind::Nominal;
    } else {
      throw Error(ErrorKind::Parse, "feature '" + meta.name + "': unknown kind '" + kind + "'");
    }
    if (f.contains("min")) meta.min = rat_from_json(f["min"]);
    if (f.contains("max")) meta.max = rat_from_json(f["max"]);
    if (f.contains("values")) {
      for (const auto& v : f["values"]) {
        meta.values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      }
    }
    validate(meta);
    if (std::any_of(out.begin(), out.end(), [&](const FeatureMeta& m) { return m.name == meta.name; })) {
      throw Error(ErrorKind::Duplicate, "duplicate feature '" + meta.name + "'");
    }
    out.push_back(std::move(meta));
  }
  return out;
}

nlohmann::json metadata_to_json(const std::vector<FeatureMeta>& metas) {
  auto features = nlohmann::json::array();
  for (const auto& m : metas) {
    nlohmann::json f = {{"name", m.name}, {"kind", std::string(kind_name(m.kind))}};
    if (m.kind == FeatureKind::Nominal) {
      f["values"] = m.values;
    } else if (m.has_bounds()) {
      f["min"] = m.min->str();
      f["max"] = m.max->str();
    }
    features.push_back(std::move(f));
  }
  return {{"features", std::move(features)}};
}

std::string render_value(const FeatureValue& v) {
  if (const auto* r = std::get_if<Rat>(&v)) return r->str();
  return std::get<std::string>(v);
}

VarLayout::VarLayout(std::vector<FeatureMeta> features, std::vector<std::string> instances)
    : features_(std::move(features)), instances_(std::move(instances)) {
  for (std::size_t i = 0; i < features_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (features_[i].name == features_[j].name) {
        throw Error(ErrorKind::Duplicate, "duplicate feature '" + features_[i].name + "'");
      }
    }
  }
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (instances_[i] == instances_[j]) {
        throw Error(ErrorKind::Duplicate, "duplicate instance '" + instances_[i] + "'");
      }
    }
  }
  for (const auto& f : features_) {
    offset_.push_back(width_);
    width_ += f.width();
  }
  for (std::size_t i = 0; i < instances_.size(); ++i) {
    for (std::size_t f = 0; f < features_.size(); ++f) {
      if (features_[f].kind == FeatureKind::Continuous) continue;
      for (VarId v : feature_vars(i, f)) integral_.insert(v);
    }
  }
}

std::optional<std::size_t> VarLayout::instance_index(std::string_view name) const {
  auto it = std::find(instances_.begin(), instances_.end(), name);
  if (it == instances_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - instances_.begin());
}

std::optional<std::size_t> VarLayout::feature_index(std::string_view name) const {
  auto it = std::find_if(features_.begin(), features_.end(),
                         [&](const FeatureMeta& f) { return f.name == name; });
  if (it == features_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - features_.begin());
}

VarId VarLayout::var(std::size_t instance, std::size_t feature, std::size_t value) const {
  return static_cast<VarId>(instance * width_ + offset_[feature] + value);
}

VarLayout::Slot VarLayout::slot(VarId id) const {
  if (id >= size()) throw Error(ErrorKind::Internal, "variable id outside the layout");
  std::size_t instance = id / width_;
  std::size_t rem = id % width_;
  auto it = std::upper_bound(offset_.begin(), offset_.end(), rem);
  auto feature = static_cast<std::size_t>(it - offset_.begin()) - 1;
  return {instance, feature, rem - offset_[feature]};
}

bool VarLayout::is_one_hot(VarId id) const {
  return id < size() && features_[slot(id).feature].kind == FeatureKind::Nominal;
}

std::vector<VarId> VarLayout::instance_vars(std::size_t instance) const {
  std::vector<VarId> out;
  for (std::size_t k = 0; k < width_; ++k) out.push_back(static_cast<VarId>(instance * width_ + k));
  return out;
}

std::vector<VarId> VarLayout::feature_vars(std::size_t instance, std::size_t feature) const {
  std::vector<VarId> out;
  for (std::size_t k = 0; k < features_[feature].width(); ++k) out.push_back(var(instance, feature, k));
  return out;
}

std::string VarLayout::var_name(VarId id) const {
  if (id >= size()) return default_var_name(id);
  auto s = slot(id);
  const auto& f = features_[s.feature];
  std::string base = instances_[s.instance] + "." + f.name;
  if (f.kind == FeatureKind::Nominal) return "[" + base + " = " + f.values[s.value] + "]";
  return base;
}

VarNamer VarLayout::namer() const {
  return [this](VarId id) { return var_name(id); };
}

Conjunction implicit_constraints(const VarLayout& layout, std::size_t instance) {
  Conjunction out;
  const auto& features = layout.features();
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto& meta = features[f];
    if (meta.kind == FeatureKind::Ordinal) {
      LinExpr x = LinExpr::var(layout.var(instance, f));
      out.push_back(LinearConstraint::normalize(LinExpr(*meta.min), RawRel::LE, x));
      out.push_back(LinearConstraint::normalize(x, RawRel::LE, LinExpr(*meta.max)));
    } else if (meta.kind == FeatureKind::Nominal) {
      LinExpr sum;
      for (VarId v : layout.feature_vars(instance, f)) {
        LinExpr x = LinExpr::var(v);
        out.push_back(LinearConstraint::normalize(LinExpr(Rat(0)), RawRel::LE, x));
        out.push_back(LinearConstraint::normalize(x, RawRel::LE, LinExpr(Rat(1))));
        sum += x;
      }
      out.push_back(LinearConstraint::normalize(sum, RawRel::EQ, LinExpr(Rat(1))));
    }
  }
  return out;
}

Conjunction implicit_constraints(const VarLayout& layout) {
  Conjunction out;
  for (std::size_t i = 0; i < layout.instances().size(); ++i) {
    out.append(implicit_constraints(layout, i));
  }
  return out;
}

Point encode_point(const VarLayout& layout, std::size_t instance, const NamedPoint& values) {
  Point out;
  for (const auto& [name, value] : values) {
    auto f = layout.feature_index(name);
    if (!f) throw Error(ErrorKind::UnknownName, "unknown feature '" + name + "'");
    const auto& meta = layout.features()[*f];
    if (meta.kind == FeatureKind::Nominal) {
      const auto* s = std::get_if<std::string>(&value);
      std::optional<std::size_t> idx = s ? meta.value_index(*s) : std::nullopt;
      if (!idx) {
        throw Error(ErrorKind::Domain, "value '" + render_value(value) + "' not in the domain of '" +
                                           name + "'");
      }
      for (std::size_t k = 0; k < meta.values.size(); ++k) {
        out[layout.var(instance, *f, k)] = k == *idx ? 1 : 0;
      }
      continue;
    }
    const auto* r = std::get_if<Rat>(&value);
    if (!r) throw Error(ErrorKind::Type, "feature '" + name + "' expects a number");
    if (meta.kind == FeatureKind::Ordinal &&
        (!r->is_integer() || *r < *meta.min || *r > *meta.max)) {
      throw Error(ErrorKind::Domain,
                  "value " + r->str() + " outside the ordinal domain of '" + name + "'");
    }
    out[layout.var(instance, *f)] = *r;
  }
  return out;
}

NamedPoint decode_point(const VarLayout& layout, std::size_t instance, const Point& point) {
  NamedPoint out;
  const auto& features = layout.features();
  for (std::size_t f = 0; f < features.size(); ++f) {
    const auto& meta = features[f];
    if (meta.kind != FeatureKind::Nominal) {
      auto it = point.find(layout.var(instance, f));
      if (it != point.end()) out[meta.name] = it->second;
      continue;
    }
    std::optional<std::size_t> hot;
    bool bound = false;
    for (std::size_t k = 0; k < meta.values.size(); ++k) {
      auto it = point.find(layout.var(instance, f, k));
      if (it == point.end()) continue;
      bound = true;
      if (it->second == Rat(1)) {
        if (hot) throw Error(ErrorKind::Domain, "one-hot block of '" + meta.name + "' has two ones");
        hot = k;
      } else if (!it->second.is_zero()) {
        throw Error(ErrorKind::Domain, "one-hot block of '" + meta.name + "' is not 0/1");
      }
    }
    if (!bound) continue;
    if (!hot) throw Error(ErrorKind::Domain, "one-hot block of '" + meta.name + "' has no one");
    out[meta.name] = meta.values[*hot];
  }
  return out;
}

namespace {

struct Block {
  std::size_t instance;
  std::size_t feature;
  bool operator<(const Block& o) const {
    return std::tie(instance, feature) < std::tie(o.instance, o.feature);
  }
};

struct Item {
  std::vector<VarId> key;
  std::string text;
};

// Integer-equivalent bound for a single ordinal variable.
LinearConstraint tighten_ordinal(const LinearConstraint& c) {
  if (c.rel() == Rel::EQ) return c;
  const auto& [id, a] = *c.lhs().terms().begin();
  Rat bound = -c.lhs().constant() / a;
  LinExpr x = LinExpr::var(id);
  if (a.sign() > 0) {
    Rat ub = c.is_strict() ? bound.ceil() - 1 : bound.floor();
    return LinearConstraint::normalize(x, RawRel::LE, LinExpr(ub));
  }
  Rat lb = c.is_strict() ? bound.floor() + 1 : bound.ceil();
  return LinearConstraint::normalize(x, RawRel::GE, LinExpr(lb));
}

// Matches x_I^v - x_J^v = 0 between two blocks of the same nominal feature.
std::optional<std::pair<VarId, VarId>> one_hot_link(const LinearConstraint& c,
                                                    const VarLayout& layout) {
  const auto& t = c.lhs().terms();
  if (c.rel() != Rel::EQ || t.size() != 2 || !c.lhs().constant().is_zero()) return std::nullopt;
  auto a = *t.begin();
  auto b = *std::next(t.begin());
  if (a.second != Rat(1) || b.second != Rat(-1)) return std::nullopt;
  if (!layout.is_one_hot(a.first) || !layout.is_one_hot(b.first)) return std::nullopt;
  auto sa = layout.slot(a.first);
  auto sb = layout.slot(b.first);
  if (sa.feature != sb.feature || sa.value != sb.value || sa.instance == sb.instance) {
    return std::nullopt;
  }
  return std::make_pair(a.first, b.first);
}

}  // namespace

std::vector<std::string> decode_answer(const Conjunction& c, const VarLayout& layout) {
  if (c.contains_false()) return {"false"};
  const auto& features = layout.features();
  Conjunction psi = implicit_constraints(layout);

  std::set<Block> blocks;
  for (VarId v : c.variables()) {
    if (layout.is_one_hot(v)) {
      auto s = layout.slot(v);
      blocks.insert({s.instance, s.feature});
    }
  }
  Conjunction closed = c;
  for (const auto& b : blocks) {
    for (const auto& lc : implicit_constraints(layout, b.instance)) {
      auto vars = Conjunction{lc}.variables();
      if (layout.is_one_hot(vars.front()) && layout.slot(vars.front()).feature == b.feature) {
        closed.push_back(lc);
      }
    }
  }

  std::vector<Item> items;
  // Nominal blocks: the set of values some integral solution still admits.
  for (const auto& b : blocks) {
    const auto& meta = features[b.feature];
    std::vector<std::size_t> allowed;
    for (std::size_t k = 0; k < meta.values.size(); ++k) {
      Conjunction probe = closed;
      probe.push_back(LinearConstraint::normalize(LinExpr::var(layout.var(b.instance, b.feature, k)),
                                                  RawRel::EQ, LinExpr(Rat(1))));
      auto r = solve_milp(LinExpr{}, probe, layout.integral(), Sense::Min);
      if (r.status == LpStatus::Optimal) allowed.push_back(k);
    }
    if (allowed.empty()) return {"false"};
    std::string ref = layout.instances()[b.instance] + "." + meta.name;
    std::vector<VarId> key{layout.var(b.instance, b.feature)};
    if (allowed.size() == 1) {
      items.push_back({key, ref + " = " + meta.values[allowed.front()]});
    } else {
      for (std::size_t k = 0; k < meta.values.size(); ++k) {
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
          items.push_back({{layout.var(b.instance, b.feature, k)}, ref + " != " + meta.values[k]});
        }
      }
    }
  }

  // Equal nominal values across instances: all k pairwise links present.
  std::map<std::pair<Block, Block>, std::vector<const LinearConstraint*>> links;
  for (const auto& lc : c) {
    if (auto link = one_hot_link(lc, layout)) {
      auto sa = layout.slot(link->first);
      auto sb = layout.slot(link->second);
      links[{Block{sa.instance, sa.feature}, Block{sb.instance, sb.feature}}].push_back(&lc);
    }
  }
  std::set<const LinearConstraint*> consumed;
  for (const auto& [pair, cs] : links) {
    const auto& meta = features[pair.first.feature];
    if (cs.size() != meta.values.size()) continue;
    consumed.insert(cs.begin(), cs.end());
    items.push_back({{layout.var(pair.first.instance, pair.first.feature),
                      layout.var(pair.second.instance, pair.second.feature)},
                     layout.instances()[pair.first.instance] + "." + meta.name + " = " +
                         layout.instances()[pair.second.instance] + "." + meta.name});
  }

  for (const auto& lc : c) {
    if (lc.is_true() || consumed.count(&lc) != 0) continue;
    auto vars = Conjunction{lc}.variables();
    bool in_layout = vars.back() < layout.size();
    if (in_layout && layout.is_one_hot(vars.front())) {
      auto s0 = layout.slot(vars.front());
      bool block_local = std::all_of(vars.begin(), vars.end(), [&](VarId v) {
        if (!layout.is_one_hot(v)) return false;
        auto s = layout.slot(v);
        return s.instance == s0.instance && s.feature == s0.feature;
      });
      if (block_local) continue;
    }
    LinearConstraint shown = lc;
    if (in_layout && vars.size() == 1 &&
        features[layout.slot(vars.front()).feature].kind == FeatureKind::Ordinal) {
      shown = tighten_ordinal(lc);
    }
    if (std::find(psi.begin(), psi.end(), shown) != psi.end()) continue;
    items.push_back({vars, render(shown, layout.namer())});
  }

  std::stable_sort(items.begin(), items.end(),
                   [](const Item& a, const Item& b) { return a.key < b.key; });
  std::vector<std::string> out;
  for (auto& it : items) {
    if (std::find(out.begin(), out.end(), it.text) == out.end()) out.push_back(std::move(it.text));
  }
  return out;
}

}  // namespace dtr
