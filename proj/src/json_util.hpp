#pragma once

#include <optional>

#include <json.hpp>

#include "m2ar/pose.hpp"

// Shared pose <-> JSON helpers for the runtime formats (traces, snapshots,
// scenarios). The bundle format has its own strict decoder with path-aware
// errors; these are the tolerant counterparts.
namespace m2ar::io {

inline nlohmann::json encode_vector3(const scene::Vec3& v) {
    return nlohmann::json::array({v.x, v.y, v.z});
}

inline nlohmann::json encode_quaternion(const scene::Quat& q) {
    return nlohmann::json::array({q.x, q.y, q.z, q.w});
}

inline nlohmann::json encode_pose(const scene::Pose& pose) {
    return {{"position", encode_vector3(pose.position)},
            {"rotation", encode_quaternion(pose.rotation)},
            {"scale", encode_vector3(pose.scale)}};
}

inline bool all_finite_numbers(const nlohmann::json& array) {
    for (const auto& item : array) {
        if (!item.is_number() || !std::isfinite(item.get<double>())) return false;
    }
    return true;
}

inline std::optional<scene::Vec3> try_parse_vector3(const nlohmann::json& value) {
    if (!value.is_array() || value.size() != 3 || !all_finite_numbers(value)) return std::nullopt;
    return scene::Vec3{value[0].get<double>(), value[1].get<double>(), value[2].get<double>()};
}

inline std::optional<scene::Quat> try_parse_quaternion(const nlohmann::json& value) {
    if (!value.is_array() || value.size() != 4 || !all_finite_numbers(value)) return std::nullopt;
    return scene::Quat{value[0].get<double>(), value[1].get<double>(), value[2].get<double>(),
                       value[3].get<double>()};
}

inline std::optional<scene::Pose> try_parse_pose(const nlohmann::json& value) {
    if (!value.is_object()) return std::nullopt;
    if (!value.contains("position") || !value.contains("rotation") || !value.contains("scale")) {
        return std::nullopt;
    }
    const auto position = try_parse_vector3(value["position"]);
    const auto rotation = try_parse_quaternion(value["rotation"]);
    const auto scale = try_parse_vector3(value["scale"]);
    if (!position || !rotation || !scale) return std::nullopt;
    return scene::Pose{*position, *rotation, *scale};
}

}  // namespace m2ar::io
