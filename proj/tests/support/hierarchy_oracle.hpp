#pragma once

// Randomized child-chain hierarchies with a matrix-oracle expectation for
// the leaf's world pose. Scales are uniform per node (log-uniform in
// [0.1, 10]): TRS composition equals the homogeneous-matrix product exactly
// on that subgroup, which is what makes an independent oracle possible (see
// the note at scene::compose).

#include <random>
#include <string>

#include "m2ar/meta.hpp"
#include "m2ar/pose.hpp"
#include "m2ar/scene.hpp"
#include "support/builders.hpp"
#include "support/matrix_oracle.hpp"

namespace m2ar::testsupport {

struct HierarchyCase {
    meta::Model object_space;
    scene::SceneState state;
    Identifier leaf;
    Mat4 expected;
};

namespace hierarchy_detail {

inline scene::Quat random_unit_quat(std::mt19937& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    return scene::normalized(scene::Quat{gauss(rng), gauss(rng), gauss(rng), gauss(rng)});
}

inline scene::Pose random_uniform_scale_pose(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_real_distribution<double> log_s(std::log(0.1), std::log(10.0));
    const double s = std::exp(log_s(rng));
    scene::Pose pose;
    pose.position = {u(rng), u(rng), u(rng)};
    pose.rotation = random_unit_quat(rng);
    pose.scale = {s, s, s};
    return pose;
}

}  // namespace hierarchy_detail

/// A chain aug-1 (root) -> ... -> aug-<depth> (leaf) of child edges, grounded
/// either at the origin frame or at a detected anchor Detectable (coin flip).
inline HierarchyCase random_hierarchy_case(std::mt19937& rng) {
    namespace names = arwfml::names;
    namespace d = hierarchy_detail;

    const int depth = std::uniform_int_distribution<int>(1, 5)(rng);
    const bool anchored = std::uniform_int_distribution<int>(0, 1)(rng) == 1;

    HierarchyCase result;
    result.object_space.id = Identifier("os-h");
    result.object_space.scene_type = names::object_space;

    Mat4 expected = mat_identity();
    const scene::Pose frame = d::random_uniform_scale_pose(rng);
    expected = mat_multiply(expected, trs_matrix(frame));

    for (int i = 1; i <= depth; ++i) {
        meta::ClassInstance augmentation =
            make_instance("aug-" + std::to_string(i), names::augmentation);
        augmentation.placement = d::random_uniform_scale_pose(rng);
        expected = mat_multiply(expected, trs_matrix(*augmentation.placement));
        result.object_space.class_instances.push_back(std::move(augmentation));
        if (i > 1) {
            result.object_space.relationclass_instances.push_back(
                make_edge("child-" + std::to_string(i), names::child,
                          "aug-" + std::to_string(i - 1), "aug-" + std::to_string(i)));
        }
    }
    if (anchored) {
        result.object_space.class_instances.push_back(make_instance("det-a", names::detectable));
        result.object_space.relationclass_instances.push_back(
            make_edge("anchor-1", names::anchored, "aug-1", "det-a"));
    }

    result.state = scene::initial_scene_state(result.object_space);
    if (anchored) {
        result.state.detectables[Identifier("det-a")] = {true, frame};
    } else {
        result.state.origin_frame = frame;
    }
    result.leaf = Identifier("aug-" + std::to_string(depth));
    result.expected = expected;
    return result;
}

/// Largest componentwise deviation between the library's world_pose and the
/// oracle matrix over `cases` random hierarchies.
inline double worst_hierarchy_deviation(std::mt19937& rng, int cases) {
    double worst = 0.0;
    for (int i = 0; i < cases; ++i) {
        const HierarchyCase c = random_hierarchy_case(rng);
        const scene::Pose got = scene::world_pose(c.state, c.object_space, c.leaf);
        worst = std::max(worst, max_abs_diff(trs_matrix(got), c.expected));
    }
    return worst;
}

}  // namespace m2ar::testsupport
