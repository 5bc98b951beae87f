#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "m2ar/arwfml.hpp"
#include "m2ar/engine.hpp"
#include "m2ar/errors.hpp"
#include "m2ar/fixtures.hpp"
#include "m2ar/meta.hpp"
#include "support/builders.hpp"
#include "support/proc.hpp"

using namespace m2ar;
using namespace m2ar::testsupport;
using engine::EngineError;
using engine::EngineState;
using engine::Phase;
using engine::SimEvent;
using engine::Trace;
using engine::TraceKind;
using engine::TraceRecord;

namespace {

namespace names = arwfml::names;

TraceRecord rec(std::uint64_t seq, double t, TraceKind kind, std::string subject,
                std::string details = "") {
    return {seq, t, kind, Identifier(std::move(subject)), std::move(details)};
}

// start -> cond-click-1(aug-1) -> end-1
meta::Bundle click_bundle() {
    meta::Model flow = mini_flow_scene();
    flow.class_instances.push_back(click_condition("cond-click-1", "aug-1"));
    flow.class_instances.push_back(end_node("end-1"));
    flow.relationclass_instances.push_back(flow_edge("f-1", "start", "cond-click-1"));
    flow.relationclass_instances.push_back(flow_edge("f-2", "cond-click-1", "end-1"));
    return make_bundle({mini_object_space(1), std::move(flow)});
}

// A self-contained FlowScene whose instance ids carry `suffix` so several of
// them can coexist in one bundle (instance ids are bundle-wide unique).
meta::Model tiny_flow(const std::string& model_id, const std::string& suffix) {
    meta::Model flow;
    flow.id = Identifier(model_id);
    flow.name = "Tiny flow " + suffix;
    flow.scene_type = names::flow_scene;
    flow.class_instances.push_back(make_instance("start-" + suffix, names::start));
    flow.class_instances.push_back(end_node("end-" + suffix));
    flow.class_instances.push_back(make_instance(
        "osr-" + suffix, names::object_space_ref,
        {{names::attr_objectspace,
          meta::AttributeValue::ref(meta::InstanceRef::to_model(Identifier("os-main")))}}));
    flow.port_instances.push_back(make_port(
        "port-origin-" + suffix, names::port_origin, "osr-" + suffix,
        meta::InstanceRef::to_class(Identifier("os-main"), Identifier("det-origin"))));
    flow.relationclass_instances.push_back(
        flow_edge("f-" + suffix, "start-" + suffix, "end-" + suffix));
    return flow;
}

EngineState detect_origin_at(EngineState state, double t) {
    return engine::inject(std::move(state), SimEvent::detect(Identifier("det-origin"), t));
}

std::string golden(const char* name) {
    return slurp(std::filesystem::path(M2AR_SOURCE_DIR) / "tests" / "golden" / name);
}

}  // namespace

TEST_CASE("load builds an AwaitOrigin state with one token at Start") {
    const meta::Bundle bundle = fixtures::color_brick_bundle();
    const EngineState state = engine::load(bundle);

    CHECK(state.phase == Phase::AwaitOrigin);
    CHECK(state.clock == 0.0);
    CHECK(state.trace.empty());
    REQUIRE(state.tokens.size() == 1);
    CHECK(state.tokens[0].at_node == Identifier("start"));
    CHECK_FALSE(state.tokens[0].armed_at.has_value());
    REQUIRE(state.context != nullptr);
    CHECK(state.context->flow_scene_id == Identifier("flow-assembly"));
    CHECK(state.context->object_space_id == Identifier("os-color-brick"));
    CHECK(state.context->origin_detectable_id == Identifier("det-marker"));
    CHECK(state.scene.augmentations.size() == 3);
    CHECK_FALSE(state.scene.origin_frame.has_value());
}

TEST_CASE("load rejects a bundle that fails validation") {
    meta::Bundle bundle = fixtures::color_brick_bundle();
    for (meta::Model& model : bundle.models) {
        if (model.id != Identifier("flow-assembly")) continue;
        for (meta::ClassInstance& instance : model.class_instances) {
            if (instance.id == Identifier("cond-timer-1")) {
                instance.attributes.insert_or_assign(names::attr_duration_s,
                                                     meta::AttributeValue::number(0.0));
            }
        }
    }
    try {
        (void)engine::load(bundle);
        FAIL("expected EngineError");
    } catch (const EngineError& error) {
        CHECK(error.code() == EngineError::Code::validation_failed);
        bool saw_v006 = false;
        for (const Diagnostic& diagnostic : error.diagnostics()) {
            if (diagnostic.code == "V006") saw_v006 = true;
        }
        CHECK(saw_v006);
    }
}

TEST_CASE("load reports missing and ambiguous selections") {
    const auto code_of = [](const meta::Bundle& bundle,
                            std::optional<Identifier> id = std::nullopt) {
        try {
            (void)engine::load(bundle, id);
            return std::optional<EngineError::Code>{};
        } catch (const EngineError& error) {
            return std::optional<EngineError::Code>{error.code()};
        }
    };

    // No FlowScene at all (only a warning for the validator, fatal here).
    CHECK(code_of(make_bundle({mini_object_space(1)})) == EngineError::Code::no_flow_scene);

    // A named FlowScene that does not exist.
    CHECK(code_of(click_bundle(), Identifier("flow-nope")) == EngineError::Code::no_flow_scene);

    // Two FlowScenes and no selection; either one loads once named.
    const meta::Bundle two_flows =
        make_bundle({mini_object_space(1), tiny_flow("flow-a", "a"), tiny_flow("flow-b", "b")});
    CHECK(code_of(two_flows) == EngineError::Code::ambiguous_flow_scene);
    const EngineState picked = engine::load(two_flows, Identifier("flow-b"));
    CHECK(picked.context->flow_scene_id == Identifier("flow-b"));
    CHECK(picked.tokens[0].at_node == Identifier("start-b"));

    // A FlowScene with no ObjectSpaceRef.
    meta::Model no_osr;
    no_osr.id = Identifier("flow-main");
    no_osr.scene_type = names::flow_scene;
    no_osr.class_instances.push_back(make_instance("start", names::start));
    no_osr.class_instances.push_back(end_node("end-1"));
    no_osr.relationclass_instances.push_back(flow_edge("f-1", "start", "end-1"));
    CHECK(code_of(make_bundle({mini_object_space(1), std::move(no_osr)})) ==
          EngineError::Code::no_object_space);

    // Two ObjectSpaceRefs to two different ObjectSpaces.
    meta::Model os_two;
    os_two.id = Identifier("os-two");
    os_two.scene_type = names::object_space;
    os_two.class_instances.push_back(make_instance(
        "det-two", names::detectable,
        {{names::attr_image, meta::AttributeValue::asset(Identifier("asset-marker"))},
         {names::attr_is_origin, meta::AttributeValue::boolean(true)}}));
    meta::Model two_spaces = mini_flow_scene();
    two_spaces.class_instances.push_back(end_node("end-1"));
    two_spaces.relationclass_instances.push_back(flow_edge("f-1", "start", "end-1"));
    two_spaces.class_instances.push_back(make_instance(
        "osr-2", names::object_space_ref,
        {{names::attr_objectspace,
          meta::AttributeValue::ref(meta::InstanceRef::to_model(Identifier("os-two")))}}));
    two_spaces.port_instances.push_back(
        make_port("port-origin-2", names::port_origin, "osr-2",
                  meta::InstanceRef::to_class(Identifier("os-two"), Identifier("det-two"))));
    CHECK(code_of(make_bundle(
              {mini_object_space(1), std::move(os_two), std::move(two_spaces)})) ==
          EngineError::Code::ambiguous_object_space);
}

TEST_CASE("only the origin detection has any effect before grounding") {
    EngineState state = engine::load(click_bundle());

    state = engine::inject(std::move(state), SimEvent::click(Identifier("aug-1"), 0.5));
    state = engine::inject(std::move(state), SimEvent::observe("door", "open", 0.6));
    state = engine::inject(std::move(state), SimEvent::detect(Identifier("aug-1"), 0.7));
    CHECK(state.phase == Phase::AwaitOrigin);
    CHECK(state.trace.empty());
    CHECK(state.pending_clicks.empty());  // the early tap is gone, not latent

    state = detect_origin_at(std::move(state), 1.0);
    CHECK(state.phase == Phase::Running);
    CHECK(state.trace == Trace{rec(1, 1.0, TraceKind::origin_detected, "det-origin")});
}

TEST_CASE("a click satisfies an armed condition and completes the flow") {
    EngineState state = detect_origin_at(engine::load(click_bundle()), 1.0);
    state = engine::inject(std::move(state), SimEvent::click(Identifier("aug-1"), 2.0));

    const Trace expected{
        rec(1, 1.0, TraceKind::origin_detected, "det-origin"),
        rec(2, 2.0, TraceKind::condition_satisfied, "cond-click-1", "click"),
        rec(3, 2.0, TraceKind::end_reached, "end-1"),
        rec(4, 2.0, TraceKind::workflow_completed, "flow-main"),
    };
    CHECK(state.phase == Phase::Completed);
    CHECK(state.trace == expected);

    // The serialized form, byte for byte (same shape as the frozen fixture trace).
    CHECK(engine::serialize_trace(state.trace) ==
          "{\"details\":\"\",\"kind\":\"origin_detected\",\"seq\":1,\"subject\":\"det-origin\",\"t\":1.0}\n"
          "{\"details\":\"click\",\"kind\":\"condition_satisfied\",\"seq\":2,\"subject\":\"cond-click-1\",\"t\":2.0}\n"
          "{\"details\":\"\",\"kind\":\"end_reached\",\"seq\":3,\"subject\":\"end-1\",\"t\":2.0}\n"
          "{\"details\":\"\",\"kind\":\"workflow_completed\",\"seq\":4,\"subject\":\"flow-main\",\"t\":2.0}\n");
}

TEST_CASE("one tap satisfies at most one click condition") {
    // AND-split: both conditions watch aug-1; the lower id wins each tap.
    meta::Model flow = mini_flow_scene();
    flow.class_instances.push_back(click_condition("cond-click-a", "aug-1"));
    flow.class_instances.push_back(click_condition("cond-click-b", "aug-1"));
    flow.class_instances.push_back(end_node("end-a"));
    flow.class_instances.push_back(end_node("end-b"));
    flow.relationclass_instances.push_back(flow_edge("f-1", "start", "cond-click-a"));
    flow.relationclass_instances.push_back(flow_edge("f-2", "start", "cond-click-b"));
    flow.relationclass_instances.push_back(flow_edge("f-3", "cond-click-a", "end-a"));
    flow.relationclass_instances.push_back(flow_edge("f-4", "cond-click-b", "end-b"));
    const meta::Bundle bundle = make_bundle({mini_object_space(1), std::move(flow)});

    EngineState state = detect_origin_at(engine::load(bundle), 1.0);
    state = engine::inject(std::move(state), SimEvent::click(Identifier("aug-1"), 2.0));
    CHECK(state.phase == Phase::Running);  // cond-click-b still waits
    state = engine::inject(std::move(state), SimEvent::click(Identifier("aug-1"), 3.0));
    CHECK(state.phase == Phase::Completed);

    const Trace expected{
        rec(1, 1.0, TraceKind::origin_detected, "det-origin"),
        rec(2, 2.0, TraceKind::condition_satisfied, "cond-click-a", "click"),
        rec(3, 2.0, TraceKind::end_reached, "end-a"),
        rec(4, 3.0, TraceKind::condition_satisfied, "cond-click-b", "click"),
        rec(5, 3.0, TraceKind::end_reached, "end-b"),
        rec(6, 3.0, TraceKind::workflow_completed, "flow-main"),
    };
    CHECK(state.trace == expected);
}

TEST_CASE("a tap from before the condition armed is stale") {
    meta::Model flow = mini_flow_scene();
    flow.class_instances.push_back(timer_condition("cond-timer-1", 2.0));
    flow.class_instances.push_back(click_condition("cond-click-1", "aug-1"));
    flow.class_instances.push_back(end_node("end-1"));
    flow.relationclass_instances.push_back(flow_edge("f-1", "start", "cond-timer-1"));
    flow.relationclass_instances.push_back(flow_edge("f-2", "cond-timer-1", "cond-click-1"));
    flow.relationclass_instances.push_back(flow_edge("f-3", "cond-click-1", "end-1"));
    const meta::Bundle bundle = make_bundle({mini_object_space(1), std::move(flow)});

    EngineState state = detect_origin_at(engine::load(bundle), 1.0);
    // Tapped while the token still sat at the timer: must not pre-satisfy.
    state = engine::inject(std::move(state), SimEvent::click(Identifier("aug-1"), 2.0));
    state = engine::inject(std::move(state), SimEvent::advance(3.0));
    CHECK(state.phase == Phase::Running);
    state = engine::inject(std::move(state), SimEvent::click(Identifier("aug-1"), 4.0));

    const Trace expected{
        rec(1, 1.0, TraceKind::origin_detected, "det-origin"),
        rec(2, 3.0, TraceKind::condition_satisfied, "cond-timer-1", "timer"),
        rec(3, 4.0, TraceKind::condition_satisfied, "cond-click-1", "click"),
        rec(4, 4.0, TraceKind::end_reached, "end-1"),
        rec(5, 4.0, TraceKind::workflow_completed, "flow-main"),
    };
    CHECK(state.phase == Phase::Completed);
    CHECK(state.trace == expected);
}

TEST_CASE("detection conditions are level-triggered") {
    meta::Model space = mini_object_space(1);
    space.class_instances.push_back(make_instance(
        "det-b", names::detectable,
        {{names::attr_image, meta::AttributeValue::asset(Identifier("asset-marker"))}}));
    meta::Model flow = mini_flow_scene();
    flow.class_instances.push_back(timer_condition("cond-timer-1", 2.0));
    flow.class_instances.push_back(detection_condition("cond-det-1", "det-b"));
    flow.class_instances.push_back(end_node("end-1"));
    flow.relationclass_instances.push_back(flow_edge("f-1", "start", "cond-timer-1"));
    flow.relationclass_instances.push_back(flow_edge("f-2", "cond-timer-1", "cond-det-1"));
    flow.relationclass_instances.push_back(flow_edge("f-3", "cond-det-1", "end-1"));
    const meta::Bundle bundle = make_bundle({std::move(space), std::move(flow)});

    EngineState state = detect_origin_at(engine::load(bundle), 1.0);
    // det-b shows up before any token waits on it; the fact persists.
    state = engine::inject(std::move(state), SimEvent::detect(Identifier("det-b"), 1.5));
    CHECK(state.phase == Phase::Running);
    state = engine::inject(std::move(state), SimEvent::advance(3.0));

    const Trace expected{
        rec(1, 1.0, TraceKind::origin_detected, "det-origin"),
        rec(2, 3.0, TraceKind::condition_satisfied, "cond-timer-1", "timer"),
        rec(3, 3.0, TraceKind::condition_satisfied, "cond-det-1", "detection"),
        rec(4, 3.0, TraceKind::end_reached, "end-1"),
        rec(5, 3.0, TraceKind::workflow_completed, "flow-main"),
    };
    CHECK(state.phase == Phase::Completed);
    CHECK(state.trace == expected);
}

TEST_CASE("observer conditions compare the stored value") {
    meta::Model flow = mini_flow_scene();
    flow.class_instances.push_back(observer_condition("cond-obs-1", "door", "open"));
    flow.class_instances.push_back(end_node("end-1"));
    flow.relationclass_instances.push_back(flow_edge("f-1", "start", "cond-obs-1"));
    flow.relationclass_instances.push_back(flow_edge("f-2", "cond-obs-1", "end-1"));
    const meta::Bundle bundle = make_bundle({mini_object_space(1), std::move(flow)});

    EngineState state = detect_origin_at(engine::load(bundle), 1.0);
    state = engine::inject(std::move(state), SimEvent::observe("door", "closed", 2.0));
    CHECK(state.phase == Phase::Running);
    state = engine::inject(std::move(state), SimEvent::observe("window", "open", 2.5));
    CHECK(state.phase == Phase::Running);
    state = engine::inject(std::move(state), SimEvent::observe("door", "open", 3.0));

    const Trace expected{
        rec(1, 1.0, TraceKind::origin_detected, "det-origin"),
        rec(2, 3.0, TraceKind::condition_satisfied, "cond-obs-1", "observer"),
        rec(3, 3.0, TraceKind::end_reached, "end-1"),
        rec(4, 3.0, TraceKind::workflow_completed, "flow-main"),
    };
    CHECK(state.phase == Phase::Completed);
    CHECK(state.trace == expected);
}

TEST_CASE("an observer condition without a value accepts any value") {
    meta::Model flow = mini_flow_scene();
    flow.class_instances.push_back(observer_condition("cond-obs-1", "door", std::nullopt));
    flow.class_instances.push_back(end_node("end-1"));
    flow.relationclass_instances.push_back(flow_edge("f-1", "start", "cond-obs-1"));
    flow.relationclass_instances.push_back(flow_edge("f-2", "cond-obs-1", "end-1"));
    const meta::Bundle bundle = make_bundle({mini_object_space(1), std::move(flow)});

    EngineState state = detect_origin_at(engine::load(bundle), 1.0);
    state = engine::inject(std::move(state), SimEvent::observe("door", "whatever", 2.0));
    CHECK(state.phase == Phase::Completed);
}

TEST_CASE("an observer condition borrows its key from a linked Observer") {
    meta::Model flow = mini_flow_scene();
    flow.class_instances.push_back(observer_condition("cond-obs-1", std::nullopt, "open"));
    flow.class_instances.push_back(observer_source("obs-1", "door"));
    flow.class_instances.push_back(end_node("end-1"));
    flow.relationclass_instances.push_back(flow_edge("f-1", "start", "cond-obs-1"));
    flow.relationclass_instances.push_back(flow_edge("f-2", "cond-obs-1", "end-1"));
    flow.relationclass_instances.push_back(
        make_edge("ol-1", names::observes_link, "obs-1", "cond-obs-1"));
    const meta::Bundle bundle = make_bundle({mini_object_space(1), std::move(flow)});

    EngineState state = detect_origin_at(engine::load(bundle), 1.0);
    state = engine::inject(std::move(state), SimEvent::observe("gate", "open", 1.5));
    CHECK(state.phase == Phase::Running);  // wrong key: the link names "door"
    state = engine::inject(std::move(state), SimEvent::observe("door", "open", 2.0));

    const Trace expected{
        rec(1, 1.0, TraceKind::origin_detected, "det-origin"),
        rec(2, 2.0, TraceKind::condition_satisfied, "cond-obs-1", "observer"),
        rec(3, 2.0, TraceKind::end_reached, "end-1"),
        rec(4, 2.0, TraceKind::workflow_completed, "flow-main"),
    };
    CHECK(state.phase == Phase::Completed);
    CHECK(state.trace == expected);
}

TEST_CASE("resolve disables a condition and drops its waiting token") {
    meta::Model flow = mini_flow_scene();
    flow.class_instances.push_back(timer_condition("cond-wait", 50.0));
    flow.class_instances.push_back(timer_condition("cond-short", 2.0));
    flow.class_instances.push_back(resolve_node("res-1", "cond-wait"));
    flow.class_instances.push_back(end_node("end-a"));
    flow.class_instances.push_back(end_node("end-b"));
    flow.relationclass_instances.push_back(flow_edge("f-1", "start", "cond-wait"));
    flow.relationclass_instances.push_back(flow_edge("f-2", "start", "cond-short"));
    flow.relationclass_instances.push_back(flow_edge("f-3", "cond-wait", "end-a"));
    flow.relationclass_instances.push_back(flow_edge("f-4", "cond-short", "res-1"));
    flow.relationclass_instances.push_back(flow_edge("f-5", "res-1", "end-b"));
    const meta::Bundle bundle = make_bundle({mini_object_space(1), std::move(flow)});

    EngineState state = detect_origin_at(engine::load(bundle), 1.0);
    state = engine::inject(std::move(state), SimEvent::advance(3.0));

    const Trace expected{
        rec(1, 1.0, TraceKind::origin_detected, "det-origin"),
        rec(2, 3.0, TraceKind::condition_satisfied, "cond-short", "timer"),
        rec(3, 3.0, TraceKind::resolve_applied, "res-1", "cond-wait"),
        rec(4, 3.0, TraceKind::end_reached, "end-b"),
        rec(5, 3.0, TraceKind::workflow_completed, "flow-main"),
    };
    CHECK(state.phase == Phase::Completed);  // end-a never fires, no token is stuck
    CHECK(state.trace == expected);
    CHECK(state.disabled_conditions.count(Identifier("cond-wait")) == 1);
}

TEST_CASE("a statechange ref applies its model to the scene") {
    scene::ChangeList show;
    show.visible = true;
    show.position = scene::Vec3{0.0, 0.5, 0.0};
    meta::Model flow = mini_flow_scene();
    flow.class_instances.push_back(statechange_ref("scref-1", "sc-show"));
    flow.class_instances.push_back(end_node("end-1"));
    flow.relationclass_instances.push_back(flow_edge("f-1", "start", "scref-1"));
    flow.relationclass_instances.push_back(flow_edge("f-2", "scref-1", "end-1"));
    const meta::Bundle bundle = make_bundle(
        {mini_object_space(1), mini_statechange("sc-show", "aug-1", show), std::move(flow)});

    EngineState state = detect_origin_at(engine::load(bundle), 1.0);

    const Trace expected{
        rec(1, 1.0, TraceKind::origin_detected, "det-origin"),
        rec(2, 1.0, TraceKind::statechange_applied, "scref-1", "sc-show"),
        rec(3, 1.0, TraceKind::end_reached, "end-1"),
        rec(4, 1.0, TraceKind::workflow_completed, "flow-main"),
    };
    CHECK(state.phase == Phase::Completed);
    CHECK(state.trace == expected);

    const engine::SceneSnapshot snap = engine::snapshot(state);
    const engine::SnapshotEntry& entry = snap.at(Identifier("aug-1"));
    CHECK(entry.visible);
    REQUIRE(entry.world_pose.has_value());
    CHECK(entry.world_pose->position == scene::Vec3{0.0, 0.5, 0.0});
}

TEST_CASE("a flow cycle runs out of firing budget and fails") {
    scene::ChangeList show;
    show.visible = true;
    meta::Model flow = mini_flow_scene();
    flow.class_instances.push_back(statechange_ref("scref-a", "sc-flip"));
    flow.class_instances.push_back(statechange_ref("scref-b", "sc-flip"));
    flow.class_instances.push_back(end_node("end-1"));
    flow.relationclass_instances.push_back(flow_edge("f-1", "start", "scref-a"));
    flow.relationclass_instances.push_back(flow_edge("f-2", "scref-a", "scref-b"));
    flow.relationclass_instances.push_back(flow_edge("f-3", "scref-b", "scref-a"));
    flow.relationclass_instances.push_back(flow_edge("f-4", "scref-b", "end-1"));
    const meta::Bundle bundle = make_bundle(
        {mini_object_space(1), mini_statechange("sc-flip", "aug-1", show), std::move(flow)});

    EngineState state = detect_origin_at(engine::load(bundle), 1.0);
    CHECK(state.phase == Phase::Failed);
    CHECK(state.trace.size() > 100000);  // it really did spin before giving up

    // Terminal: later events are ignored but remembered.
    const std::size_t before = state.trace.size();
    state = engine::inject(std::move(state), SimEvent::advance(2.0));
    CHECK(state.phase == Phase::Failed);
    REQUIRE(state.trace.size() == before + 1);
    CHECK(state.trace.back().kind == TraceKind::event_ignored);
    CHECK(state.trace.back().details == "advance");
}

TEST_CASE("time cannot run backwards") {
    EngineState state = detect_origin_at(engine::load(click_bundle()), 5.0);
    CHECK_THROWS_AS(engine::inject(std::move(state), SimEvent::advance(3.0)), EngineError);

    EngineState fresh = detect_origin_at(engine::load(click_bundle()), 5.0);
    try {
        (void)engine::inject(std::move(fresh), SimEvent::click(Identifier("aug-1"), 4.0));
        FAIL("expected EngineError");
    } catch (const EngineError& error) {
        CHECK(error.code() == EngineError::Code::time_regression);
    }
}

TEST_CASE("events after completion are recorded as ignored") {
    EngineState state = detect_origin_at(engine::load(click_bundle()), 1.0);
    state = engine::inject(std::move(state), SimEvent::click(Identifier("aug-1"), 2.0));
    REQUIRE(state.phase == Phase::Completed);

    state = engine::inject(std::move(state), SimEvent::click(Identifier("aug-1"), 5.0));
    CHECK(state.phase == Phase::Completed);
    CHECK(state.clock == 5.0);
    CHECK(state.trace.back() == rec(5, 5.0, TraceKind::event_ignored, "aug-1", "click"));
}

TEST_CASE("the origin frame is pinned at the first detection") {
    meta::Model flow = mini_flow_scene();
    flow.class_instances.push_back(timer_condition("cond-wait", 100.0));
    flow.class_instances.push_back(end_node("end-1"));
    flow.relationclass_instances.push_back(flow_edge("f-1", "start", "cond-wait"));
    flow.relationclass_instances.push_back(flow_edge("f-2", "cond-wait", "end-1"));
    const meta::Bundle bundle = make_bundle({mini_object_space(1), std::move(flow)});

    scene::Pose first = scene::identity_pose();
    first.position = scene::Vec3{1.0, 2.0, 3.0};
    scene::Pose second = scene::identity_pose();
    second.position = scene::Vec3{9.0, 9.0, 9.0};

    EngineState state = engine::load(bundle);
    state = engine::inject(std::move(state), SimEvent::detect(Identifier("det-origin"), 1.0, first));
    state = engine::inject(std::move(state), SimEvent::detect(Identifier("det-origin"), 2.0, second));

    REQUIRE(state.scene.origin_frame.has_value());
    CHECK(state.scene.origin_frame->position == scene::Vec3{1.0, 2.0, 3.0});
    REQUIRE(state.scene.detectables.at(Identifier("det-origin")).world_pose.has_value());
    CHECK(state.scene.detectables.at(Identifier("det-origin")).world_pose->position ==
          scene::Vec3{9.0, 9.0, 9.0});

    // The snapshot grounds augmentations in the pinned frame.
    const engine::SceneSnapshot snap = engine::snapshot(state);
    REQUIRE(snap.at(Identifier("aug-1")).world_pose.has_value());
    CHECK(snap.at(Identifier("aug-1")).world_pose->position == scene::Vec3{1.0, 2.0, 3.0});
}

TEST_CASE("run is exactly load + inject each event + final advance") {
    const meta::Bundle bundle = fixtures::color_brick_bundle();
    const engine::Scenario scenario = fixtures::color_brick_scenario();

    const engine::RunResult result = engine::run(bundle, scenario.events, scenario.stop_t);

    EngineState state = engine::load(bundle);
    for (const SimEvent& event : scenario.events) state = engine::inject(std::move(state), event);
    if (state.phase == Phase::AwaitOrigin || state.phase == Phase::Running) {
        state = engine::inject(std::move(state), SimEvent::advance(scenario.stop_t));
    }

    CHECK(result.final_phase == state.phase);
    CHECK(result.trace == state.trace);
    CHECK(engine::snapshot(state) == result.final_scene);

    // And a second run is byte-identical to the first.
    const engine::RunResult again = engine::run(bundle, scenario.events, scenario.stop_t);
    CHECK(engine::serialize_trace(again.trace) == engine::serialize_trace(result.trace));
    CHECK(engine::serialize_snapshot(again.final_scene) ==
          engine::serialize_snapshot(result.final_scene));
}

TEST_CASE("the fixture run reproduces the frozen golden outputs") {
    const engine::RunResult result = engine::run(fixtures::color_brick_bundle(),
                                                 fixtures::color_brick_scenario().events,
                                                 fixtures::color_brick_scenario().stop_t);
    CHECK(result.final_phase == Phase::Completed);
    CHECK(engine::serialize_trace(result.trace) == golden("color-brick.trace.jsonl"));
    CHECK(engine::serialize_snapshot(result.final_scene) == golden("color-brick.snapshot.json"));
}

TEST_CASE("run reports Running when stop_t preempts the workflow") {
    const engine::RunResult result =
        engine::run(fixtures::color_brick_bundle(),
                    {SimEvent::detect(Identifier("det-marker"), 1.0)}, 4.0);

    // Only the first timer (armed at 1.0, 2 s) has fired by t=4.
    const Trace expected{
        rec(1, 1.0, TraceKind::origin_detected, "det-marker"),
        rec(2, 4.0, TraceKind::condition_satisfied, "cond-timer-1", "timer"),
        rec(3, 4.0, TraceKind::statechange_applied, "scref-green", "sc-show-green"),
    };
    CHECK(result.final_phase == Phase::Running);
    CHECK(result.trace == expected);
    CHECK(result.final_scene.at(Identifier("aug-green-brick")).visible);
    CHECK_FALSE(result.final_scene.at(Identifier("aug-blue-brick")).visible);
}

TEST_CASE("a named flow scene drives run") {
    const meta::Bundle two_flows =
        make_bundle({mini_object_space(1), tiny_flow("flow-a", "a"), tiny_flow("flow-b", "b")});
    const engine::RunResult result =
        engine::run(two_flows, {SimEvent::detect(Identifier("det-origin"), 1.0)}, 2.0,
                    Identifier("flow-a"));
    CHECK(result.final_phase == Phase::Completed);
    REQUIRE(!result.trace.empty());
    CHECK(result.trace.back().subject == Identifier("flow-a"));
}
