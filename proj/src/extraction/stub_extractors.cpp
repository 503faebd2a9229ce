#include "blobgraph/extraction/stub_extractors.hpp"

#include <cctype>

namespace blobgraph::stubs {

SemanticValue face_vector(std::string_view payload, std::uint32_t dim) {
  std::vector<float> v(dim, 0.0f);
  for (std::uint32_t i = 0; i < dim && i < payload.size(); ++i) {
    v[i] = (static_cast<unsigned char>(payload[i]) - 127.5f) / 127.5f;
  }
  return v;
}

SemanticValue jersey_number(std::string_view payload) {
  constexpr std::string_view marker = "jersey=";
  if (auto pos = payload.find(marker); pos != std::string_view::npos) {
    double n = 0;
    bool any = false;
    for (std::size_t i = pos + marker.size(); i < payload.size() && std::isdigit(static_cast<unsigned char>(payload[i])); ++i) {
      n = n * 10 + (payload[i] - '0');
      any = true;
    }
    if (any) return n;
  }
  return payload.empty() ? 0.0 : static_cast<double>(static_cast<unsigned char>(payload[0]));
}

SemanticValue animal(std::string_view payload) {
  static constexpr std::string_view kAnimals[] = {"cat", "dog", "bird", "fish", "horse"};
  std::size_t best = std::string_view::npos;
  std::string_view found = "unknown";
  for (auto a : kAnimals) {
    auto pos = payload.find(a);
    if (pos < best) {
      best = pos;
      found = a;
    }
  }
  return Categorical{std::string(found)};
}

SemanticValue byte_vector(std::string_view payload, std::uint32_t dim) {
  std::vector<float> v(dim, 0.0f);
  for (std::uint32_t i = 0; i < dim && i < payload.size(); ++i) {
    v[i] = static_cast<unsigned char>(payload[i]) / 255.0f;
  }
  return v;
}

Extractor face_extractor(std::uint32_t serial, std::uint32_t dim) {
  return Extractor{"face", serial, SemanticKind::Vector, dim,
                   [dim](std::string_view p) { return face_vector(p, dim); }};
}

Extractor jersey_extractor(std::uint32_t serial) {
  return Extractor{"jerseyNumber", serial, SemanticKind::Number, 0, jersey_number};
}

Extractor animal_extractor(std::uint32_t serial) {
  return Extractor{"animal", serial, SemanticKind::Categorical, 0, animal};
}

void register_default_stubs(ExtractionService& svc) {
  svc.register_extractor(face_extractor());
  svc.register_extractor(jersey_extractor());
  svc.register_extractor(animal_extractor());
}

}  // namespace blobgraph::stubs
