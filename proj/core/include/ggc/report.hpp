#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ggc {

/// Ordered JSON value tree for reports. Objects keep insertion order and
/// numbers are serialized with 17 significant digits, which makes reports
/// byte-stable for fixed inputs.
class JsonNode {
 public:
  using Array = std::vector<JsonNode>;
  using Object = std::vector<std::pair<std::string, JsonNode>>;

  JsonNode() : v_(nullptr) {}
  JsonNode(std::nullptr_t) : v_(nullptr) {}
  JsonNode(bool b) : v_(b) {}
  JsonNode(double d) : v_(d) {}
  JsonNode(int i) : v_(static_cast<double>(i)) {}
  JsonNode(const char* s) : v_(std::string(s)) {}
  JsonNode(std::string s) : v_(std::move(s)) {}
  JsonNode(Array a) : v_(std::move(a)) {}
  JsonNode(Object o) : v_(std::move(o)) {}

  static JsonNode object() { return JsonNode(Object{}); }
  static JsonNode array() { return JsonNode(Array{}); }

  JsonNode& set(const std::string& key, JsonNode value);
  JsonNode& push(JsonNode value);
  bool is_object() const { return std::holds_alternative<Object>(v_); }
  bool is_array() const { return std::holds_alternative<Array>(v_); }
  const Object* as_object() const { return std::get_if<Object>(&v_); }
  const Array* as_array() const { return std::get_if<Array>(&v_); }

  std::string dump(int indent = -1) const;
  /// Plain-text rendering: nested "key: value" lines; arrays of flat objects
  /// become aligned tables.
  std::string to_text() const;

 private:
  std::variant<std::nullptr_t, bool, double, std::string, Array, Object> v_;
};

std::string format_double(double d);

}  // namespace ggc
