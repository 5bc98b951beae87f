#pragma once

#include <string>

#include "m2ar/meta.hpp"

/// Canonical JSON interchange for bundles.
///
/// The document is a single object with exactly the keys
/// {assets, format, metamodel, models, version}; format is "m2ar-bundle",
/// version "1.0". Serialization is canonical — keys in lexicographic order,
/// instance arrays sorted by id, shortest round-trip number rendering, LF
/// line endings — so equal bundles serialize to identical bytes on every
/// platform.
namespace m2ar::io {

inline constexpr const char* bundle_format_tag = "m2ar-bundle";
inline constexpr const char* bundle_format_version = "1.0";
inline constexpr const char* bundle_extension = ".m2ar.json";

/// Decodes a canonical document. Never crashes on arbitrary bytes: anything
/// that is not a well-formed document raises BundleIoError
/// (malformed_document, unsupported_version, unknown_value_kind,
/// duplicate_id). Instance and model arrays are normalized to id order, so
/// the result is canonical regardless of input ordering.
meta::Bundle parse_bundle(const std::string& document);

/// Encodes a bundle as its canonical document. Deterministic byte-for-byte:
/// parse_bundle(serialize_bundle(b)) == b for bundles in canonical (id-
/// sorted) order.
std::string serialize_bundle(const meta::Bundle& bundle);

}  // namespace m2ar::io
