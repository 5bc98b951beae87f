#pragma once

#include "m2ar/meta.hpp"
#include "m2ar/scenario.hpp"

/// Built-in demonstration content. The color-brick bundle models a guided
/// assembly of three stacked bricks: one image-marker Detectable anchors the
/// world, three Augmentations appear one by one as four 2-second timers
/// elapse, each appearance driven by its own Statechange model.
namespace m2ar::fixtures {

/// The color-brick bundle: 1 ObjectSpace (1 Detectable + 3 Augmentations),
/// 3 Statechange models, 1 FlowScene (Start, 4 timer Conditions, 3
/// StatechangeRefs, End in a straight line). Always validates cleanly and is
/// fully deterministic (fixed ids, no timestamps).
meta::Bundle color_brick_bundle();

/// The matching scenario: origin marker detected at t=1.0, clock advanced
/// through every timer expiry (3, 5, 7, 9), stop at t=10.0.
engine::Scenario color_brick_scenario();

}  // namespace m2ar::fixtures
