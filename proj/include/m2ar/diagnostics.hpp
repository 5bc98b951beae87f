#pragma once

#include <string>
#include <vector>

#include "m2ar/ids.hpp"

namespace m2ar {

enum class Severity { error, warning };

inline const char* to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

/// One finding from conformance checking or language validation. Codes are
/// stable public identifiers: PascalCase names for generic conformance,
/// V001..V012 (plus the V003w/V009w warning variants) for the ARWFML rules.
struct Diagnostic {
    Severity severity = Severity::error;
    std::string code;
    Identifier model_id;
    Identifier instance_id;
    std::string message;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

using DiagnosticList = std::vector<Diagnostic>;

/// Deterministic report order: (model id, instance id, code), message as the
/// final tiebreak.
void sort_diagnostics(DiagnosticList& diagnostics);

bool has_errors(const DiagnosticList& diagnostics);

/// "severity code model/instance: message" line, as printed by the CLI.
std::string format_diagnostic(const Diagnostic& diagnostic);

}  // namespace m2ar
