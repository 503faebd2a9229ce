#include "blobgraph/graph/value.hpp"

#include <cmath>
#include <cstdio>

#include "blobgraph/common/error.hpp"

namespace blobgraph {

const char* value_kind_name(ValueKind kind) noexcept {
  switch (kind) {
    case ValueKind::Integer: return "Integer";
    case ValueKind::Float: return "Float";
    case ValueKind::Text: return "Text";
    case ValueKind::Boolean: return "Boolean";
    case ValueKind::Blob: return "Blob";
  }
  return "?";
}

double as_double(const Value& v) {
  if (auto* i = std::get_if<std::int64_t>(&v)) return static_cast<double>(*i);
  if (auto* d = std::get_if<double>(&v)) return *d;
  raise(ErrorCode::KindMismatch, std::string("expected a number, got ") + value_kind_name(kind_of(v)));
}

namespace {

int domain(const Value& v) noexcept {
  switch (kind_of(v)) {
    case ValueKind::Integer:
    case ValueKind::Float: return 0;
    case ValueKind::Text: return 1;
    case ValueKind::Boolean: return 2;
    case ValueKind::Blob: return 3;
  }
  return 4;
}

std::weak_ordering numeric_order(const Value& a, const Value& b) noexcept {
  if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
    return std::get<std::int64_t>(a) <=> std::get<std::int64_t>(b);
  }
  double x = std::holds_alternative<double>(a) ? std::get<double>(a)
                                               : static_cast<double>(std::get<std::int64_t>(a));
  double y = std::holds_alternative<double>(b) ? std::get<double>(b)
                                               : static_cast<double>(std::get<std::int64_t>(b));
  if (x < y) return std::weak_ordering::less;
  if (x > y) return std::weak_ordering::greater;
  return std::weak_ordering::equivalent;
}

std::weak_ordering same_domain_order(const Value& a, const Value& b) noexcept {
  switch (domain(a)) {
    case 0: return numeric_order(a, b);
    case 1: return std::get<std::string>(a).compare(std::get<std::string>(b)) <=> 0;
    case 2: return std::get<bool>(a) <=> std::get<bool>(b);
    default: return std::get<BlobRef>(a).id.value <=> std::get<BlobRef>(b).id.value;
  }
}

}  // namespace

std::weak_ordering value_order(const Value& a, const Value& b) noexcept {
  int da = domain(a);
  int db = domain(b);
  if (da != db) return da <=> db;
  return same_domain_order(a, b);
}

std::optional<std::weak_ordering> value_compare(const Value& a, const Value& b) noexcept {
  if (domain(a) != domain(b)) return std::nullopt;
  return same_domain_order(a, b);
}

std::string value_to_string(const Value& v) {
  struct Visitor {
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      std::string s = buf;
      if (std::isfinite(d) && s.find_first_of(".eE") == std::string::npos) s += ".0";
      return s;
    }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(BlobRef b) const { return "blob:" + std::to_string(b.id.value); }
  };
  return std::visit(Visitor{}, v);
}

bool is_valid_utf8(std::string_view s) noexcept {
  std::size_t i = 0;
  while (i < s.size()) {
    auto c = static_cast<unsigned char>(s[i]);
    int extra;
    std::uint32_t cp;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (int k = 1; k <= extra; ++k) {
      auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) || (extra == 3 && cp < 0x10000) ||
        cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

}  // namespace blobgraph
