#pragma once

// Deterministic stand-ins for real models. They read only the payload bytes,
// so results are reproducible for a fixed serial.

#include <string_view>

#include "blobgraph/extraction/extraction_service.hpp"

namespace blobgraph::stubs {

// First `dim` bytes mapped to [-1, 1] (missing bytes read as 127.5, i.e. 0).
SemanticValue face_vector(std::string_view payload, std::uint32_t dim);

// Value of a "jersey=<digits>" marker if present, else the first byte.
SemanticValue jersey_number(std::string_view payload);

// First known animal word found in the payload, else "unknown".
SemanticValue animal(std::string_view payload);

// First `dim` bytes divided by 255, zero padded.
SemanticValue byte_vector(std::string_view payload, std::uint32_t dim);

Extractor face_extractor(std::uint32_t serial = 1, std::uint32_t dim = 16);
Extractor jersey_extractor(std::uint32_t serial = 1);
Extractor animal_extractor(std::uint32_t serial = 1);

// Registers face, jerseyNumber and animal at serial 1.
void register_default_stubs(ExtractionService& svc);

}  // namespace blobgraph::stubs
