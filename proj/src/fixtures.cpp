#include "m2ar/fixtures.hpp"

#include <algorithm>

#include "m2ar/arwfml.hpp"

namespace m2ar::fixtures {

using meta::AttributeValue;
using meta::ClassInstance;
using meta::InstanceRef;
using meta::Model;
using meta::RelationclassInstance;
namespace n = arwfml::names;

namespace {

ClassInstance augmentation(const char* id, const char* display, const char* asset) {
    ClassInstance instance;
    instance.id = Identifier(id);
    instance.metaclass = n::augmentation;
    instance.display_name = display;
    instance.attributes.emplace(n::attr_object3d, AttributeValue::asset(Identifier(asset)));
    instance.placement = scene::identity_pose();
    return instance;
}

ClassInstance timer_condition(const char* id, const char* display, double duration_s) {
    ClassInstance instance;
    instance.id = Identifier(id);
    instance.metaclass = n::condition;
    instance.display_name = display;
    instance.attributes.emplace(n::attr_kind, AttributeValue::text(n::kind_timer));
    instance.attributes.emplace(n::attr_duration_s, AttributeValue::number(duration_s));
    return instance;
}

ClassInstance statechange_ref(const char* id, const char* display, const char* model_id) {
    ClassInstance instance;
    instance.id = Identifier(id);
    instance.metaclass = n::statechange_ref;
    instance.display_name = display;
    instance.attributes.emplace(
        n::attr_statechange_model,
        AttributeValue::ref(InstanceRef::to_model(Identifier(model_id))));
    return instance;
}

RelationclassInstance flow_edge(const char* id, const char* from, const char* to) {
    RelationclassInstance edge;
    edge.id = Identifier(id);
    edge.relationclass = n::flow;
    edge.from_instance = Identifier(from);
    edge.to_instance = Identifier(to);
    return edge;
}

// One Statechange model holding a single Reference that makes a brick
// visible at its slot in the stack.
Model show_brick(const char* model_id, const char* model_name, const char* reference_id,
                 const char* target_augmentation, double height) {
    Model model;
    model.id = Identifier(model_id);
    model.name = model_name;
    model.scene_type = n::statechange;

    scene::ChangeList changes;
    changes.visible = true;
    changes.position = scene::Vec3{0.0, height, 0.0};

    ClassInstance reference;
    reference.id = Identifier(reference_id);
    reference.metaclass = n::reference;
    reference.display_name = model_name;
    reference.attributes.emplace(
        n::attr_target, AttributeValue::ref(InstanceRef::to_class(
                            Identifier("os-color-brick"), Identifier(target_augmentation))));
    reference.attributes.emplace(n::attr_changes, AttributeValue::changes(changes));
    model.class_instances.push_back(std::move(reference));
    return model;
}

}  // namespace

meta::Bundle color_brick_bundle() {
    meta::Bundle bundle;
    bundle.metamodel_name = n::metamodel;

    bundle.assets.emplace(Identifier("asset-marker-image"),
                          meta::AssetEntry{meta::AssetEntry::Kind::image, "assets/marker.png"});
    bundle.assets.emplace(
        Identifier("asset-green-gltf"),
        meta::AssetEntry{meta::AssetEntry::Kind::gltf, "assets/green-brick.gltf"});
    bundle.assets.emplace(
        Identifier("asset-blue-gltf"),
        meta::AssetEntry{meta::AssetEntry::Kind::gltf, "assets/blue-brick.gltf"});
    bundle.assets.emplace(Identifier("asset-red-gltf"),
                          meta::AssetEntry{meta::AssetEntry::Kind::gltf, "assets/red-brick.gltf"});

    // --- ObjectSpace: one marker, three bricks (hidden until triggered) ---
    Model object_space;
    object_space.id = Identifier("os-color-brick");
    object_space.name = "Color brick space";
    object_space.scene_type = n::object_space;

    ClassInstance marker;
    marker.id = Identifier("det-marker");
    marker.metaclass = n::detectable;
    marker.display_name = "Image marker";
    marker.attributes.emplace(n::attr_image,
                              AttributeValue::asset(Identifier("asset-marker-image")));
    marker.attributes.emplace(n::attr_is_origin, AttributeValue::boolean(true));

    object_space.class_instances = {
        augmentation("aug-blue-brick", "Blue brick", "asset-blue-gltf"),
        augmentation("aug-green-brick", "Green brick", "asset-green-gltf"),
        augmentation("aug-red-brick", "Red brick", "asset-red-gltf"),
        std::move(marker),
    };

    // --- Statechanges: bricks stack upward in 0.05 m steps ---
    bundle.models.push_back(show_brick("sc-show-green", "Show green brick", "ref-show-green",
                                       "aug-green-brick", 0.0));
    bundle.models.push_back(
        show_brick("sc-show-blue", "Show blue brick", "ref-show-blue", "aug-blue-brick", 0.05));
    bundle.models.push_back(
        show_brick("sc-show-red", "Show red brick", "ref-show-red", "aug-red-brick", 0.10));

    // --- FlowScene: a straight line of four timers and three triggers ---
    Model flow;
    flow.id = Identifier("flow-assembly");
    flow.name = "Brick assembly flow";
    flow.scene_type = n::flow_scene;

    ClassInstance start;
    start.id = Identifier("start");
    start.metaclass = n::start;
    start.display_name = "Start";

    ClassInstance end;
    end.id = Identifier("end");
    end.metaclass = n::end;
    end.display_name = "End";

    ClassInstance osr;
    osr.id = Identifier("osr-main");
    osr.metaclass = n::object_space_ref;
    osr.display_name = "Color brick space";
    osr.attributes.emplace(
        n::attr_objectspace,
        AttributeValue::ref(InstanceRef::to_model(Identifier("os-color-brick"))));

    flow.class_instances = {
        timer_condition("cond-timer-1", "Timer 1", 2.0),
        timer_condition("cond-timer-2", "Timer 2", 2.0),
        timer_condition("cond-timer-3", "Timer 3", 2.0),
        timer_condition("cond-timer-4", "Timer 4", 2.0),
        std::move(end),
        std::move(osr),
        statechange_ref("scref-blue", "Show blue brick", "sc-show-blue"),
        statechange_ref("scref-green", "Show green brick", "sc-show-green"),
        statechange_ref("scref-red", "Show red brick", "sc-show-red"),
        std::move(start),
    };

    meta::PortInstance origin;
    origin.id = Identifier("port-origin");
    origin.port = n::port_origin;
    origin.owner = Identifier("osr-main");
    origin.target =
        InstanceRef::to_class(Identifier("os-color-brick"), Identifier("det-marker"));
    flow.port_instances.push_back(std::move(origin));

    flow.relationclass_instances = {
        flow_edge("flow-1", "start", "cond-timer-1"),
        flow_edge("flow-2", "cond-timer-1", "scref-green"),
        flow_edge("flow-3", "scref-green", "cond-timer-2"),
        flow_edge("flow-4", "cond-timer-2", "scref-blue"),
        flow_edge("flow-5", "scref-blue", "cond-timer-3"),
        flow_edge("flow-6", "cond-timer-3", "scref-red"),
        flow_edge("flow-7", "scref-red", "cond-timer-4"),
        flow_edge("flow-8", "cond-timer-4", "end"),
    };

    bundle.models.push_back(std::move(object_space));
    bundle.models.push_back(std::move(flow));
    // Canonical (serialization) order, so the bundle equals its own round trip.
    std::sort(bundle.models.begin(), bundle.models.end(),
              [](const Model& a, const Model& b) { return a.id < b.id; });
    return bundle;
}

engine::Scenario color_brick_scenario() {
    engine::Scenario scenario;
    scenario.stop_t = 10.0;
    scenario.events = {
        engine::SimEvent::detect(Identifier("det-marker"), 1.0),
        engine::SimEvent::advance(3.0),
        engine::SimEvent::advance(5.0),
        engine::SimEvent::advance(7.0),
        engine::SimEvent::advance(9.0),
    };
    return scenario;
}

}  // namespace m2ar::fixtures
