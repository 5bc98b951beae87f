#pragma once

#include <map>
#include <optional>

#include "m2ar/meta.hpp"
#include "m2ar/pose.hpp"

/// Runtime scene state: which augmentations are visible and where, which
/// detectables have been seen, and how everything maps into the world frame
/// anchored at the origin detectable.
namespace m2ar::scene {

struct AugmentationState {
    bool visible = false;
    Pose local_pose = identity_pose();

    friend bool operator==(const AugmentationState&, const AugmentationState&) = default;
};

struct DetectableState {
    bool detected = false;
    std::optional<Pose> world_pose;  // set when detected

    friend bool operator==(const DetectableState&, const DetectableState&) = default;
};

/// Immutable snapshot of one ObjectSpace at runtime. The augmentation and
/// detectable keys are exactly the instance ids of the active ObjectSpace
/// model.
struct SceneState {
    std::map<Identifier, AugmentationState> augmentations;
    std::map<Identifier, DetectableState> detectables;
    std::optional<Pose> origin_frame;  // world pose of the origin detectable

    friend bool operator==(const SceneState&, const SceneState&) = default;
};

/// Seeds runtime state from an ObjectSpace model: augmentations start at
/// their modeled placement (or identity), hidden unless initially_visible;
/// detectables start undetected; the origin frame is unknown.
SceneState initial_scene_state(const meta::Model& object_space);

/// World pose of one augmentation: walks child parents up to the hierarchy
/// root, then grounds the chain at the root's anchored Detectable (if any)
/// or at the origin frame.
///
/// Empty when the grounding frame is not available yet — origin not detected,
/// or the anchor Detectable not seen. Throws SceneError
/// (unknown_augmentation, cycle_detected) on input that validation would have
/// rejected.
std::optional<Pose> try_world_pose(const SceneState& state, const meta::Model& object_space,
                                   const Identifier& augmentation_id);

/// As try_world_pose, but an unavailable grounding frame is an error
/// (SceneError::origin_unknown).
Pose world_pose(const SceneState& state, const meta::Model& object_space,
                const Identifier& augmentation_id);

/// Applies every Reference of a Statechange model, in instance-id order:
/// present ChangeList fields overwrite the target augmentation's channels
/// (visible, local position, rotation, scale); absent fields leave them
/// untouched. Pure: returns the new state.
///
/// Throws SceneError::unknown_target if a Reference points outside the
/// state's augmentations (unvalidated input only).
SceneState apply_statechange(SceneState state, const meta::Model& statechange_model);

}  // namespace m2ar::scene
