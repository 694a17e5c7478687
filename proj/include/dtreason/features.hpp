#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "dtreason/linear.hpp"

namespace dtr {

enum class FeatureKind { Continuous, Ordinal, Nominal };

std::string_view kind_name(FeatureKind kind);

struct FeatureMeta {
  std::string name;
  FeatureKind kind = FeatureKind::Continuous;
  /// Ordinal: the integer domain [min, max]. Continuous: optional
  /// normalization bounds.
  std::optional<Rat> min;
  std::optional<Rat> max;
  /// Nominal: the ordered, distinct domain values.
  std::vector<std::string> values;

  /// Number of solver variables (k for one-hot nominal, else 1).
  std::size_t width() const { return kind == FeatureKind::Nominal ? values.size() : 1; }
  bool has_bounds() const { return min.has_value() && max.has_value(); }
  std::optional<std::size_t> value_index(std::string_view value) const;
};

/// Checks the per-kind invariants; throws Error(Validation) otherwise.
void validate(const FeatureMeta& meta);

/// Parses `{"features":[...]}`.
std::vector<FeatureMeta> parse_metadata(const nlohmann::json& doc);
nlohmann::json metadata_to_json(const std::vector<FeatureMeta>& metas);

/// Reads a JSON string ("3/4", "0.5") or number exactly.
Rat rat_from_json(const nlohmann::json& v);

using FeatureValue = std::variant<Rat, std::string>;
/// Feature name -> value for one instance.
using NamedPoint = std::map<std::string, FeatureValue>;

std::string render_value(const FeatureValue& v);

/// Positional mapping (instance, feature[, nominal value]) <-> solver variable.
/// Instance-major, so declaring a new instance never renumbers existing ones.
class VarLayout {
 public:
  struct Slot {
    std::size_t instance;
    std::size_t feature;
    std::size_t value;  // index into the nominal domain; 0 otherwise
  };

  VarLayout() = default;
  VarLayout(std::vector<FeatureMeta> features, std::vector<std::string> instances);

  const std::vector<FeatureMeta>& features() const { return features_; }
  const std::vector<std::string>& instances() const { return instances_; }
  std::size_t size() const { return width_ * instances_.size(); }
  std::size_t instance_width() const { return width_; }

  std::optional<std::size_t> instance_index(std::string_view name) const;
  std::optional<std::size_t> feature_index(std::string_view name) const;

  VarId var(std::size_t instance, std::size_t feature, std::size_t value = 0) const;
  Slot slot(VarId id) const;
  bool is_one_hot(VarId id) const;
  const std::set<VarId>& integral() const { return integral_; }

  std::vector<VarId> instance_vars(std::size_t instance) const;
  std::vector<VarId> feature_vars(std::size_t instance, std::size_t feature) const;

  /// "CE.age" for scalar features. One-hot components read "[CE.job = a]".
  std::string var_name(VarId id) const;
  VarNamer namer() const;

 private:
  std::vector<FeatureMeta> features_;
  std::vector<std::string> instances_;
  std::vector<std::size_t> offset_;
  std::size_t width_ = 0;
  std::set<VarId> integral_;
};

/// Datatype constraints: ordinal bounds, one-hot 0/1 bounds and sum-to-one.
Conjunction implicit_constraints(const VarLayout& layout);
Conjunction implicit_constraints(const VarLayout& layout, std::size_t instance);

/// Throws Error(Domain) for values outside a feature's domain. Features
/// missing from `values` are left unbound.
Point encode_point(const VarLayout& layout, std::size_t instance, const NamedPoint& values);
/// Inverse of encode_point; features whose variables are unbound are omitted.
NamedPoint decode_point(const VarLayout& layout, std::size_t instance, const Point& point);

/// Renders an answer conjunction with instance.feature names. One-hot
/// blocks are read back as nominal (in)equalities, datatype constraints are
/// dropped, and strict or fractional bounds on ordinal variables are
/// rounded to the equivalent integer bound.
std::vector<std::string> decode_answer(const Conjunction& c, const VarLayout& layout);

}  // namespace dtr
