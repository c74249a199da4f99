#include "ggc/report.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

namespace ggc {

std::string format_double(double d) {
  if (std::isnan(d)) return "null";
  if (std::isinf(d)) return d > 0 ? "1e999" : "-1e999";
  if (d == static_cast<long long>(d) && std::abs(d) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%lld", static_cast<long long>(d));
    return buf;
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", d);
  return buf;
}

JsonNode& JsonNode::set(const std::string& key, JsonNode value) {
  if (!is_object()) v_ = Object{};
  std::get<Object>(v_).emplace_back(key, std::move(value));
  return *this;
}

JsonNode& JsonNode::push(JsonNode value) {
  if (!is_array()) v_ = Array{};
  std::get<Array>(v_).push_back(std::move(value));
  return *this;
}

namespace {

void escape_to(const std::string& s, std::string* out) {
  out->push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': *out += "\\\""; break;
      case '\\': *out += "\\\\"; break;
      case '\n': *out += "\\n"; break;
      case '\t': *out += "\\t"; break;
      case '\r': *out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          *out += buf;
        } else {
          out->push_back(c);
        }
    }
  }
  out->push_back('"');
}

}  // namespace

std::string JsonNode::dump(int indent) const {
  std::string out;
  std::function<void(const JsonNode&, int)> go = [&](const JsonNode& n, int depth) {
    auto pad = [&](int d) {
      if (indent >= 0) {
        out.push_back('\n');
        out.append(static_cast<size_t>(d) * indent, ' ');
      }
    };
    if (std::holds_alternative<std::nullptr_t>(n.v_)) {
      out += "null";
    } else if (const bool* b = std::get_if<bool>(&n.v_)) {
      out += *b ? "true" : "false";
    } else if (const double* d = std::get_if<double>(&n.v_)) {
      out += format_double(*d);
    } else if (const std::string* s = std::get_if<std::string>(&n.v_)) {
      escape_to(*s, &out);
    } else if (const Array* a = std::get_if<Array>(&n.v_)) {
      out.push_back('[');
      for (size_t i = 0; i < a->size(); ++i) {
        if (i) out.push_back(',');
        pad(depth + 1);
        go((*a)[i], depth + 1);
      }
      if (!a->empty()) pad(depth);
      out.push_back(']');
    } else if (const Object* o = std::get_if<Object>(&n.v_)) {
      out.push_back('{');
      for (size_t i = 0; i < o->size(); ++i) {
        if (i) out.push_back(',');
        pad(depth + 1);
        escape_to((*o)[i].first, &out);
        out.push_back(':');
        if (indent >= 0) out.push_back(' ');
        go((*o)[i].second, depth + 1);
      }
      if (!o->empty()) pad(depth);
      out.push_back('}');
    }
  };
  go(*this, 0);
  return out;
}

namespace {

bool flat_scalar(const JsonNode& n) {
  return !n.is_array() && !n.is_object();
}

std::string scalar_text(const JsonNode& n) {
  std::string s = n.dump();
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

std::string JsonNode::to_text() const {
  std::ostringstream os;
  std::function<void(const JsonNode&, int)> go = [&](const JsonNode& n, int depth) {
    std::string ind(static_cast<size_t>(depth) * 2, ' ');
    if (const Object* o = n.as_object()) {
      for (const auto& [k, v] : *o) {
        if (flat_scalar(v)) {
          os << ind << k << ": " << scalar_text(v) << "\n";
        } else {
          os << ind << k << ":\n";
          go(v, depth + 1);
        }
      }
      return;
    }
    if (const Array* a = n.as_array()) {
      // Arrays of flat objects render as aligned tables.
      bool tabular = !a->empty();
      for (const auto& row : *a) {
        const Object* ro = row.as_object();
        if (!ro) {
          tabular = false;
          break;
        }
        for (const auto& [k, v] : *ro) {
          if (!flat_scalar(v)) tabular = false;
        }
      }
      if (tabular) {
        const Object* head = (*a)[0].as_object();
        std::vector<std::string> cols;
        for (const auto& [k, v] : *head) cols.push_back(k);
        std::vector<std::vector<std::string>> cells;
        cells.push_back(cols);
        for (const auto& row : *a) {
          std::vector<std::string> line;
          for (const auto& c : cols) {
            std::string val = "-";
            for (const auto& [k, v] : *row.as_object()) {
              if (k == c) val = scalar_text(v);
            }
            line.push_back(val);
          }
          cells.push_back(line);
        }
        std::vector<size_t> width(cols.size(), 0);
        for (const auto& line : cells) {
          for (size_t c = 0; c < line.size(); ++c) {
            width[c] = std::max(width[c], line[c].size());
          }
        }
        for (const auto& line : cells) {
          os << ind;
          for (size_t c = 0; c < line.size(); ++c) {
            os << line[c] << std::string(width[c] - line[c].size() + 2, ' ');
          }
          os << "\n";
        }
      } else {
        for (const auto& item : *a) {
          if (flat_scalar(item)) {
            os << ind << "- " << scalar_text(item) << "\n";
          } else {
            os << ind << "-\n";
            go(item, depth + 1);
          }
        }
      }
      return;
    }
    os << ind << scalar_text(n) << "\n";
  };
  go(*this, 0);
  return os.str();
}

}  // namespace ggc
