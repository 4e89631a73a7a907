// Strict config readers and the name registries for densities, boundaries,
// surfaces and variation fields.
#pragma once

#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wstab/ambient.hpp"
#include "wstab/functionals.hpp"
#include "wstab/surface.hpp"

namespace wstab {

using Json = nlohmann::json;

// A view of one JSON object that records every key it hands out and writes
// the value actually used (explicit or default) into `normalized`. finish()
// rejects keys nobody asked for. Errors carry the dotted key path.
class ConfigNode {
 public:
  ConfigNode(const Json& in, Json& normalized, std::string path);

  bool has(const std::string& key) const;
  double number(const std::string& key, std::optional<double> def = std::nullopt);
  int integer(const std::string& key, std::optional<int> def = std::nullopt);
  bool boolean(const std::string& key, std::optional<bool> def = std::nullopt);
  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt);
  Vec3 vec3(const std::string& key, std::optional<Vec3> def = std::nullopt);
  std::vector<double> numbers(const std::string& key,
                              std::optional<std::vector<double>> def = std::nullopt);
  std::vector<std::string> strings(const std::string& key,
                                   std::optional<std::vector<std::string>> def = std::nullopt);
  ConfigNode child(const std::string& key);
  // Elements of an array of objects.
  std::vector<ConfigNode> children(const std::string& key);
  // The raw value, copied into the normalized tree unchanged.
  const Json& raw(const std::string& key);
  void finish() const;

  std::string key_path(const std::string& key) const;
  [[noreturn]] void fail(const std::string& key, const std::string& what) const;

 private:
  const Json* in_;
  Json* out_;
  std::string path_;
  std::set<std::string> used_;
  const Json& get(const std::string& key) const;
};

Density parse_density(ConfigNode node);
std::optional<BoundarySpec> parse_boundary(ConfigNode node);
AmbientSpace parse_ambient(ConfigNode node);
Immersion parse_surface(ConfigNode node);
VariationField parse_field(ConfigNode node);

struct RegistryEntry {
  std::string name;
  std::string params;  // "key: type = default, ..."
  std::string summary;
};
const std::vector<RegistryEntry>& density_registry();
const std::vector<RegistryEntry>& boundary_registry();
const std::vector<RegistryEntry>& surface_registry();
const std::vector<RegistryEntry>& field_registry();

}  // namespace wstab
