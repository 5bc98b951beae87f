#pragma once

#include <stdexcept>
#include <string>

namespace m2ar {

/// Raised by build_metamodel when a language definition is inconsistent.
class MetamodelError : public std::runtime_error {
public:
    enum class Code { duplicate_name, unresolved_endpoint_type, invalid_definition };

    MetamodelError(Code code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Code code() const { return code_; }

private:
    Code code_;
};

/// Raised by bundle parsing, serialization and workspace operations.
class BundleIoError : public std::runtime_error {
public:
    enum class Code {
        malformed_document,
        unsupported_version,
        unknown_value_kind,
        duplicate_id,
        io_failure,
        not_found,
        name_collision,
    };

    BundleIoError(Code code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Code code() const { return code_; }

private:
    Code code_;
};

/// Raised by resolve() when an InstanceRef does not point at anything.
class DanglingReference : public std::runtime_error {
public:
    explicit DanglingReference(const std::string& message) : std::runtime_error(message) {}
};

/// Raised by scene-state operations on ill-formed input or when a pose is
/// demanded before the world origin is known. Validated bundles never
/// trigger the structural codes.
class SceneError : public std::runtime_error {
public:
    enum class Code { unknown_augmentation, unknown_target, cycle_detected, origin_unknown };

    SceneError(Code code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    Code code() const { return code_; }

private:
    Code code_;
};

/// Raised when a scenario document cannot be parsed.
class ScenarioError : public std::runtime_error {
public:
    explicit ScenarioError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace m2ar
