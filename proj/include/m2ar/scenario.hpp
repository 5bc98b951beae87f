#pragma once

#include <string>
#include <vector>

#include "m2ar/engine.hpp"

/// Scenario documents: a JSON stand-in for live AR input. One object
/// {events, stop_t}; each event carries kind, t, and the kind-specific
/// fields (detectable + optional pose / augmentation / key + value).
namespace m2ar::engine {

struct Scenario {
    std::vector<SimEvent> events;  // non-decreasing t, all <= stop_t
    double stop_t = 0.0;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Strict decode; anything else raises ScenarioError (never crashes on
/// arbitrary bytes). Rejects unsorted events and events past stop_t.
Scenario parse_scenario(const std::string& document);

/// Canonical encode: lexicographic keys, two-space indent, LF terminated.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace m2ar::engine
