#pragma once

#include <compare>
#include <functional>
#include <string>
#include <utility>

namespace m2ar {

/// Opaque unique token naming a model or instance. Uniqueness is scoped:
/// model ids are unique among models, instance ids are unique across the
/// whole bundle.
struct Identifier {
    std::string value;

    Identifier() = default;
    explicit Identifier(std::string v) : value(std::move(v)) {}

    bool empty() const { return value.empty(); }
    const std::string& str() const { return value; }

    friend auto operator<=>(const Identifier&, const Identifier&) = default;
};

}  // namespace m2ar

template <>
struct std::hash<m2ar::Identifier> {
    std::size_t operator()(const m2ar::Identifier& id) const noexcept {
        return std::hash<std::string>{}(id.value);
    }
};
