#include "m2ar/diagnostics.hpp"

#include <algorithm>
#include <tuple>

namespace m2ar {

void sort_diagnostics(DiagnosticList& diagnostics) {
    std::sort(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::tie(a.model_id, a.instance_id, a.code, a.message) <
               std::tie(b.model_id, b.instance_id, b.code, b.message);
    });
}

bool has_errors(const DiagnosticList& diagnostics) {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::error; });
}

std::string format_diagnostic(const Diagnostic& d) {
    std::string location = d.model_id.str();
    if (!d.instance_id.empty()) location += "/" + d.instance_id.str();
    if (location.empty()) location = "<bundle>";
    return std::string(to_string(d.severity)) + " " + d.code + " " + location + ": " + d.message;
}

}  // namespace m2ar
