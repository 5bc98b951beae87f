#include "m2ar/scene.hpp"

#include <algorithm>
#include <set>
#include <vector>

#include "m2ar/arwfml.hpp"
#include "m2ar/errors.hpp"

namespace m2ar::scene {

namespace n = arwfml::names;

SceneState initial_scene_state(const meta::Model& object_space) {
    SceneState state;
    for (const auto& instance : object_space.class_instances) {
        if (instance.metaclass == n::augmentation) {
            state.augmentations[instance.id] = {
                arwfml::boolean_attr(instance, n::attr_initially_visible, false),
                instance.placement.value_or(identity_pose())};
        } else if (instance.metaclass == n::detectable) {
            state.detectables[instance.id] = {false, std::nullopt};
        }
    }
    return state;
}

namespace {

// Deterministic parent lookup: among several child edges into `id` (invalid
// per V008, but this code must not crash on it) the lexicographically
// smallest relation instance wins.
const meta::RelationclassInstance* child_edge_into(const meta::Model& object_space,
                                                   const Identifier& id) {
    const meta::RelationclassInstance* found = nullptr;
    for (const auto& relation : object_space.relationclass_instances) {
        if (relation.relationclass != n::child || relation.to_instance != id) continue;
        if (found == nullptr || relation.id < found->id) found = &relation;
    }
    return found;
}

const meta::RelationclassInstance* anchor_edge_from(const meta::Model& object_space,
                                                    const Identifier& id) {
    const meta::RelationclassInstance* found = nullptr;
    for (const auto& relation : object_space.relationclass_instances) {
        if (relation.relationclass != n::anchored || relation.from_instance != id) continue;
        if (found == nullptr || relation.id < found->id) found = &relation;
    }
    return found;
}

}  // namespace

std::optional<Pose> try_world_pose(const SceneState& state, const meta::Model& object_space,
                                   const Identifier& augmentation_id) {
    if (state.augmentations.find(augmentation_id) == state.augmentations.end()) {
        throw SceneError(SceneError::Code::unknown_augmentation,
                         "no augmentation '" + augmentation_id.str() + "' in scene state");
    }

    // Climb child edges to the hierarchy root, collecting local poses
    // innermost-first.
    std::vector<Pose> chain;
    std::set<Identifier> visited;
    Identifier current = augmentation_id;
    for (;;) {
        if (!visited.insert(current).second) {
            throw SceneError(SceneError::Code::cycle_detected,
                             "child cycle through augmentation '" + current.str() + "'");
        }
        chain.push_back(state.augmentations.at(current).local_pose);
        const meta::RelationclassInstance* edge = child_edge_into(object_space, current);
        if (edge == nullptr) break;
        auto parent = state.augmentations.find(edge->from_instance);
        if (parent == state.augmentations.end()) break;  // dangling edge: treat as root
        current = edge->from_instance;
    }

    // Ground the chain: the root's anchor Detectable if it has one, else the
    // origin frame.
    std::optional<Pose> frame;
    if (const meta::RelationclassInstance* anchor = anchor_edge_from(object_space, current)) {
        auto detectable = state.detectables.find(anchor->to_instance);
        if (detectable != state.detectables.end() && detectable->second.detected) {
            frame = detectable->second.world_pose;
        }
    } else {
        frame = state.origin_frame;
    }
    if (!frame) return std::nullopt;

    Pose world = *frame;
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) world = compose(world, *it);
    return world;
}

Pose world_pose(const SceneState& state, const meta::Model& object_space,
                const Identifier& augmentation_id) {
    std::optional<Pose> pose = try_world_pose(state, object_space, augmentation_id);
    if (!pose) {
        throw SceneError(SceneError::Code::origin_unknown,
                         "world pose of '" + augmentation_id.str() +
                             "' is undefined until its grounding frame is detected");
    }
    return *pose;
}

SceneState apply_statechange(SceneState state, const meta::Model& statechange_model) {
    // Instance-id order makes "last writer wins" deterministic.
    std::vector<const meta::ClassInstance*> references;
    for (const auto& instance : statechange_model.class_instances) {
        if (instance.metaclass == n::reference) references.push_back(&instance);
    }
    std::sort(references.begin(), references.end(),
              [](const meta::ClassInstance* a, const meta::ClassInstance* b) {
                  return a->id < b->id;
              });

    for (const meta::ClassInstance* reference : references) {
        const meta::InstanceRef* target = arwfml::ref_attr(*reference, n::attr_target);
        const ChangeList* changes = arwfml::changes_attr(*reference, n::attr_changes);
        if (target == nullptr || changes == nullptr) continue;  // conformance's problem
        auto entry = state.augmentations.find(target->instance_id);
        if (entry == state.augmentations.end()) {
            throw SceneError(SceneError::Code::unknown_target,
                             "Reference '" + reference->id.str() +
                                 "' targets unknown augmentation '" +
                                 target->instance_id.str() + "'");
        }
        AugmentationState& augmentation = entry->second;
        if (changes->visible) augmentation.visible = *changes->visible;
        if (changes->position) augmentation.local_pose.position = *changes->position;
        if (changes->rotation) augmentation.local_pose.rotation = *changes->rotation;
        if (changes->scale) augmentation.local_pose.scale = *changes->scale;
    }
    return state;
}

}  // namespace m2ar::scene
