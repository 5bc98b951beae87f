#include "m2ar/arwfml.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <vector>

#include "m2ar/conformance.hpp"

namespace m2ar::arwfml {

using meta::AttributeDefinition;
using meta::AttributeValue;
using meta::Bundle;
using meta::ClassInstance;
using meta::InstanceRef;
using meta::MetaClass;
using meta::Metamodel;
using meta::Model;
using meta::PortDefinition;
using meta::PortInstance;
using meta::RefTarget;
using meta::RefTargetKind;
using meta::RelationclassDefinition;
using meta::RoleDefinition;
using meta::SceneTypeDefinition;
using meta::ValueKind;

// ---------------------------------------------------------------------------
// Metamodel definition
// ---------------------------------------------------------------------------

namespace {

AttributeDefinition plain_attr(const char* name, ValueKind kind, bool required) {
    return {name, kind, required, std::nullopt, std::nullopt};
}

AttributeDefinition defaulted_attr(const char* name, ValueKind kind, AttributeValue fallback) {
    return {name, kind, false, std::move(fallback), std::nullopt};
}

AttributeDefinition reference_attr(const char* name, bool required, RefTargetKind kind,
                                   std::vector<std::string> allowed) {
    return {name, ValueKind::instance_ref, required, std::nullopt,
            RefTarget{kind, std::move(allowed)}};
}

// Every ARWFML relation uses the same role names and leaves multiplicity
// open; the V-rules constrain structure where it matters.
RoleDefinition role_fr(std::vector<std::string> endpoints) {
    return {"fr", std::move(endpoints), {0, std::nullopt}};
}

RoleDefinition role_tr(std::vector<std::string> endpoints) {
    return {"tr", std::move(endpoints), {0, std::nullopt}};
}

Metamodel make_arwfml_spec() {
    namespace n = names;
    Metamodel mm;
    mm.name = n::metamodel;
    mm.version = n::metamodel_version;

    // --- ObjectSpace: what exists in physical/augmented space ---
    SceneTypeDefinition object_space;
    object_space.name = n::object_space;
    object_space.metaclasses = {
        MetaClass{n::augmentation,
                  {plain_attr(n::attr_object3d, ValueKind::asset_ref, true),
                   defaulted_attr(n::attr_initially_visible, ValueKind::boolean,
                                  AttributeValue::boolean(false))},
                  {}},
        MetaClass{n::detectable,
                  {plain_attr(n::attr_image, ValueKind::asset_ref, false),
                   defaulted_attr(n::attr_is_origin, ValueKind::boolean,
                                  AttributeValue::boolean(false))},
                  {}},
    };
    object_space.relationclasses = {
        RelationclassDefinition{n::child, role_fr({n::augmentation}), role_tr({n::augmentation}),
                                {}},
        RelationclassDefinition{n::anchored, role_fr({n::augmentation}), role_tr({n::detectable}),
                                {}},
    };

    // --- Statechange: a named batch of visual changes ---
    SceneTypeDefinition statechange;
    statechange.name = n::statechange;
    statechange.metaclasses = {
        MetaClass{n::reference,
                  {reference_attr(n::attr_target, true, RefTargetKind::metaclass_instance,
                                  {n::augmentation}),
                   plain_attr(n::attr_changes, ValueKind::change_list, true)},
                  {}},
    };

    // --- FlowScene: the workflow graph ---
    SceneTypeDefinition flow_scene;
    flow_scene.name = n::flow_scene;
    flow_scene.metaclasses = {
        MetaClass{n::start, {}, {}},
        MetaClass{n::end, {}, {}},
        MetaClass{n::object_space_ref,
                  {reference_attr(n::attr_objectspace, true, RefTargetKind::scene_type_instance,
                                  {n::object_space})},
                  {PortDefinition{n::port_origin,
                                  RefTarget{RefTargetKind::metaclass_instance, {n::detectable}}}}},
        MetaClass{n::condition,
                  {plain_attr(n::attr_kind, ValueKind::text, true),
                   plain_attr(n::attr_duration_s, ValueKind::number, false),
                   reference_attr(n::attr_observes, false, RefTargetKind::metaclass_instance,
                                  {n::augmentation, n::detectable}),
                   plain_attr(n::attr_observer_key, ValueKind::text, false),
                   plain_attr(n::attr_observer_value, ValueKind::text, false)},
                  {}},
        MetaClass{n::statechange_ref,
                  {reference_attr(n::attr_statechange_model, true,
                                  RefTargetKind::scene_type_instance, {n::statechange})},
                  {}},
        MetaClass{n::resolve,
                  {reference_attr(n::attr_resolves, false, RefTargetKind::metaclass_instance,
                                  {n::condition})},
                  {}},
        MetaClass{n::observer, {plain_attr(n::attr_key, ValueKind::text, false)}, {}},
    };
    flow_scene.relationclasses = {
        RelationclassDefinition{
            n::flow, role_fr({n::start, n::condition, n::statechange_ref, n::resolve}),
            role_tr({n::condition, n::statechange_ref, n::resolve, n::end}), {}},
        RelationclassDefinition{n::observes_link, role_fr({n::observer}), role_tr({n::condition}),
                                {}},
    };

    mm.scene_types = {std::move(object_space), std::move(statechange), std::move(flow_scene)};
    return mm;
}

}  // namespace

const Metamodel& arwfml_metamodel() {
    static const Metamodel instance = meta::build_metamodel(make_arwfml_spec());
    return instance;
}

// ---------------------------------------------------------------------------
// Typed attribute access
// ---------------------------------------------------------------------------

std::optional<std::string> text_attr(const ClassInstance& instance, const std::string& name) {
    const AttributeValue* value = instance.find_attribute(name);
    if (value == nullptr || value->kind() != ValueKind::text) return std::nullopt;
    return value->as_text();
}

std::optional<double> number_attr(const ClassInstance& instance, const std::string& name) {
    const AttributeValue* value = instance.find_attribute(name);
    if (value == nullptr || value->kind() != ValueKind::number) return std::nullopt;
    return value->as_number();
}

bool boolean_attr(const ClassInstance& instance, const std::string& name, bool fallback) {
    const AttributeValue* value = instance.find_attribute(name);
    if (value == nullptr || value->kind() != ValueKind::boolean) return fallback;
    return value->as_boolean();
}

const InstanceRef* ref_attr(const ClassInstance& instance, const std::string& name) {
    const AttributeValue* value = instance.find_attribute(name);
    if (value == nullptr || value->kind() != ValueKind::instance_ref) return nullptr;
    return &value->as_ref();
}

const meta::AssetRef* asset_attr(const ClassInstance& instance, const std::string& name) {
    const AttributeValue* value = instance.find_attribute(name);
    if (value == nullptr || value->kind() != ValueKind::asset_ref) return nullptr;
    return &value->as_asset();
}

const scene::ChangeList* changes_attr(const ClassInstance& instance, const std::string& name) {
    const AttributeValue* value = instance.find_attribute(name);
    if (value == nullptr || value->kind() != ValueKind::change_list) return nullptr;
    return &value->as_changes();
}

// ---------------------------------------------------------------------------
// Validation rules
// ---------------------------------------------------------------------------

namespace {

namespace n = names;

std::vector<const ClassInstance*> instances_of(const Model& model, const char* metaclass) {
    std::vector<const ClassInstance*> result;
    for (const auto& instance : model.class_instances) {
        if (instance.metaclass == metaclass) result.push_back(&instance);
    }
    return result;
}

class Validator {
public:
    explicit Validator(const Bundle& bundle) : bundle_(bundle) {}

    DiagnosticList run() {
        DiagnosticList diagnostics = meta::conforms(bundle_, arwfml_metamodel());
        // The rules below assume structural soundness (references resolve,
        // kinds match); a bundle that fails conformance gets those
        // diagnostics alone.
        if (has_errors(diagnostics)) return diagnostics;
        diagnostics_ = std::move(diagnostics);

        index_models();
        for (const Model* model : object_space_models_) check_object_space(*model);
        for (const Model* model : flow_scene_models_) check_flow_scene(*model);
        if (flow_scene_models_.empty()) {
            warn("V011", {}, {}, "bundle defines no FlowScene; nothing is executable");
        }
        sort_diagnostics(diagnostics_);
        return std::move(diagnostics_);
    }

private:
    void fail(std::string code, Identifier model_id, Identifier instance_id, std::string message) {
        diagnostics_.push_back({Severity::error, std::move(code), std::move(model_id),
                                std::move(instance_id), std::move(message)});
    }

    void warn(std::string code, Identifier model_id, Identifier instance_id, std::string message) {
        diagnostics_.push_back({Severity::warning, std::move(code), std::move(model_id),
                                std::move(instance_id), std::move(message)});
    }

    void index_models() {
        for (const auto& model : bundle_.models) {
            if (model.scene_type == n::object_space) object_space_models_.push_back(&model);
            if (model.scene_type == n::flow_scene) flow_scene_models_.push_back(&model);
        }
    }

    // --- ObjectSpace rules: V003w, V008, V009 ---

    void check_object_space(const Model& model) {
        std::vector<Identifier> origins;
        for (const ClassInstance* detectable : instances_of(model, n::detectable)) {
            if (boolean_attr(*detectable, n::attr_is_origin, false)) {
                origins.push_back(detectable->id);
            }
            if (asset_attr(*detectable, n::attr_image) == nullptr) {
                warn("V009w", model.id, detectable->id,
                     "Detectable has no image asset; it cannot be recognized from camera input");
            } else {
                check_asset_uri("V009", model, *detectable, n::attr_image);
            }
        }
        if (origins.size() > 1) {
            warn("V003w", model.id, {},
                 std::to_string(origins.size()) + " Detectables claim is_origin");
        }
        for (const ClassInstance* augmentation : instances_of(model, n::augmentation)) {
            check_asset_uri("V009", model, *augmentation, n::attr_object3d);
        }
        check_child_graph(model);
    }

    void check_asset_uri(const char* code, const Model& model, const ClassInstance& instance,
                         const char* attribute) {
        const meta::AssetRef* asset = asset_attr(instance, attribute);
        if (asset == nullptr) return;  // conformance reports missing required attributes
        auto entry = bundle_.assets.find(asset->id);
        if (entry == bundle_.assets.end()) return;  // conformance reports unknown assets
        if (entry->second.uri.empty()) {
            fail(code, model.id, instance.id,
                 "asset '" + asset->id.str() + "' for '" + std::string(attribute) +
                     "' has an empty uri");
        }
    }

    // V008: the child graph must be a forest — acyclic, at most one parent.
    void check_child_graph(const Model& model) {
        std::map<Identifier, std::vector<Identifier>> parents;  // child -> parents
        std::map<Identifier, std::uint32_t> indegree;
        std::map<Identifier, std::vector<Identifier>> outgoing;  // parent -> children
        for (const auto& relation : model.relationclass_instances) {
            if (relation.relationclass != n::child) continue;
            parents[relation.to_instance].push_back(relation.from_instance);
            indegree[relation.to_instance] += 1;
            outgoing[relation.from_instance].push_back(relation.to_instance);
            if (indegree.find(relation.from_instance) == indegree.end()) {
                indegree[relation.from_instance] = 0;
            }
        }
        for (const auto& [child_id, parent_ids] : parents) {
            if (parent_ids.size() > 1) {
                fail("V008", model.id, child_id,
                     "Augmentation has " + std::to_string(parent_ids.size()) +
                         " child parents; the scene graph must be a forest");
            }
        }
        // Kahn peel: anything that survives sits on a cycle.
        std::map<Identifier, std::uint32_t> remaining = indegree;
        std::deque<Identifier> frontier;
        for (const auto& [id, degree] : remaining) {
            if (degree == 0) frontier.push_back(id);
        }
        while (!frontier.empty()) {
            Identifier id = frontier.front();
            frontier.pop_front();
            auto edges = outgoing.find(id);
            if (edges == outgoing.end()) continue;
            for (const auto& child_id : edges->second) {
                if (--remaining.at(child_id) == 0) frontier.push_back(child_id);
            }
        }
        for (const auto& [id, degree] : remaining) {
            if (degree > 0) {
                fail("V008", model.id, id, "Augmentation participates in a child cycle");
            }
        }
    }

    // --- FlowScene rules ---

    void check_flow_scene(const Model& model) {
        check_start_end(model);                                            // V001
        const auto object_spaces = check_object_space_refs(model);         // V002, V003, V012
        const auto statechanges = check_statechange_refs(model);           // V004
        check_references(model, object_spaces, statechanges);              // V005
        for (const ClassInstance* cond : instances_of(model, n::condition)) {
            check_condition(model, *cond);                                 // V006
        }
        check_reachability(model);                                         // V007
        for (const ClassInstance* resolve : instances_of(model, n::resolve)) {
            check_resolve(model, *resolve);                                // V010
        }
    }

    void check_start_end(const Model& model) {
        const auto starts = instances_of(model, n::start);
        const auto ends = instances_of(model, n::end);
        if (starts.size() != 1) {
            fail("V001", model.id, {},
                 "FlowScene needs exactly one Start, found " + std::to_string(starts.size()));
        }
        if (ends.empty()) {
            fail("V001", model.id, {}, "FlowScene needs at least one End, found none");
        }
    }

    // Returns the ObjectSpace models this FlowScene references, V002-valid
    // ones only; later rules silently skip what already failed here.
    std::vector<const Model*> check_object_space_refs(const Model& model) {
        std::vector<const Model*> valid;
        std::map<Identifier, std::vector<Identifier>> origin_claims;  // detectable -> osr ids
        for (const ClassInstance* osr : instances_of(model, n::object_space_ref)) {
            const InstanceRef* ref = ref_attr(*osr, n::attr_objectspace);
            if (ref == nullptr) continue;  // conformance reports the missing attribute
            const Model* target = bundle_.find_model(ref->model_id);
            if (target == nullptr || ref->kind != InstanceRef::Kind::model ||
                target->scene_type != n::object_space) {
                fail("V002", model.id, osr->id,
                     "objectspace must reference a model of scene type ObjectSpace");
                continue;
            }
            valid.push_back(target);
            check_origin_port(model, *osr, *target, origin_claims);
        }
        for (const auto& [detectable_id, osr_ids] : origin_claims) {
            if (osr_ids.size() > 1) {
                fail("V012", model.id, detectable_id,
                     "origin Detectable is claimed by " + std::to_string(osr_ids.size()) +
                         " ObjectSpaceRefs of this FlowScene");
            }
        }
        return valid;
    }

    // V003: the Origin port must name a Detectable flagged is_origin inside
    // the referenced ObjectSpace.
    void check_origin_port(const Model& model, const ClassInstance& osr,
                           const Model& object_space,
                           std::map<Identifier, std::vector<Identifier>>& origin_claims) {
        const PortInstance* origin = nullptr;
        for (const auto& port : model.port_instances) {
            if (port.owner == osr.id && port.port == n::port_origin) origin = &port;
        }
        if (origin == nullptr || !origin->target) {
            fail("V003", model.id, osr.id, "ObjectSpaceRef declares no Origin port target");
            return;
        }
        const InstanceRef& target = *origin->target;
        const ClassInstance* detectable = nullptr;
        if (target.kind == InstanceRef::Kind::class_instance &&
            target.model_id == object_space.id) {
            detectable = object_space.find_class_instance(target.instance_id);
        }
        if (detectable == nullptr || detectable->metaclass != n::detectable) {
            fail("V003", model.id, osr.id,
                 "Origin port must target a Detectable inside the referenced ObjectSpace");
            return;
        }
        if (!boolean_attr(*detectable, n::attr_is_origin, false)) {
            fail("V003", model.id, osr.id,
                 "Origin port targets Detectable '" + detectable->id.str() +
                     "' which is not flagged is_origin");
            return;
        }
        origin_claims[detectable->id].push_back(osr.id);
    }

    // Returns per-StatechangeRef targets, V004-valid ones only.
    std::vector<const Model*> check_statechange_refs(const Model& model) {
        std::vector<const Model*> valid;
        for (const ClassInstance* scref : instances_of(model, n::statechange_ref)) {
            const InstanceRef* ref = ref_attr(*scref, n::attr_statechange_model);
            if (ref == nullptr) continue;
            const Model* target = bundle_.find_model(ref->model_id);
            if (target == nullptr || ref->kind != InstanceRef::Kind::model ||
                target->scene_type != n::statechange) {
                fail("V004", model.id, scref->id,
                     "statechange_model must reference a model of scene type Statechange");
                continue;
            }
            if (std::find(valid.begin(), valid.end(), target) == valid.end()) {
                valid.push_back(target);
            }
        }
        return valid;
    }

    // V005: every Reference of every Statechange used by this FlowScene must
    // point into this FlowScene's ObjectSpace.
    void check_references(const Model& model, const std::vector<const Model*>& object_spaces,
                          const std::vector<const Model*>& statechanges) {
        if (object_spaces.empty()) return;  // V002 already reported; nothing to check against
        for (const Model* statechange : statechanges) {
            for (const ClassInstance* reference : instances_of(*statechange, n::reference)) {
                const InstanceRef* target = ref_attr(*reference, n::attr_target);
                if (target == nullptr) continue;
                if (!targets_augmentation_in(*target, object_spaces)) {
                    fail("V005", statechange->id, reference->id,
                         "target must be an Augmentation of the ObjectSpace used by FlowScene '" +
                             model.id.str() + "'");
                }
            }
        }
    }

    bool targets_augmentation_in(const InstanceRef& target,
                                 const std::vector<const Model*>& object_spaces) {
        if (target.kind != InstanceRef::Kind::class_instance) return false;
        for (const Model* object_space : object_spaces) {
            if (object_space->id != target.model_id) continue;
            const ClassInstance* instance =
                object_space->find_class_instance(target.instance_id);
            if (instance != nullptr && instance->metaclass == n::augmentation) return true;
        }
        return false;
    }

    // V006: per-kind consistency of Conditions.
    void check_condition(const Model& model, const ClassInstance& condition) {
        const auto kind = text_attr(condition, n::attr_kind);
        if (!kind) return;  // conformance reports the missing required attribute
        if (*kind == n::kind_timer) {
            const auto duration = number_attr(condition, n::attr_duration_s);
            if (!duration || !(*duration > 0.0)) {
                fail("V006", model.id, condition.id,
                     "timer Condition needs duration_s > 0");
            }
        } else if (*kind == n::kind_click) {
            if (!observes_metaclass(condition, n::augmentation)) {
                fail("V006", model.id, condition.id,
                     "click Condition must observe an Augmentation");
            }
        } else if (*kind == n::kind_detection) {
            if (!observes_metaclass(condition, n::detectable)) {
                fail("V006", model.id, condition.id,
                     "detection Condition must observe a Detectable");
            }
        } else if (*kind == n::kind_observer) {
            const bool has_key = text_attr(condition, n::attr_observer_key).has_value();
            const bool has_link = has_incoming_observes_link(model, condition.id);
            if (!has_key && !has_link) {
                fail("V006", model.id, condition.id,
                     "observer Condition needs an observes_link or an observer_key");
            }
        } else {
            fail("V006", model.id, condition.id,
                 "unknown Condition kind '" + *kind +
                     "' (expected timer, click, detection, or observer)");
        }
    }

    bool observes_metaclass(const ClassInstance& condition, const char* metaclass) {
        const InstanceRef* observes = ref_attr(condition, n::attr_observes);
        if (observes == nullptr || observes->kind != InstanceRef::Kind::class_instance) {
            return false;
        }
        const Model* model = bundle_.find_model(observes->model_id);
        if (model == nullptr) return false;
        const ClassInstance* target = model->find_class_instance(observes->instance_id);
        return target != nullptr && target->metaclass == metaclass;
    }

    bool has_incoming_observes_link(const Model& model, const Identifier& condition_id) {
        for (const auto& relation : model.relationclass_instances) {
            if (relation.relationclass == n::observes_link &&
                relation.to_instance == condition_id) {
                return true;
            }
        }
        return false;
    }

    // V007: every flow node is reachable from a Start; End never continues.
    void check_reachability(const Model& model) {
        std::map<Identifier, std::vector<Identifier>> successors;
        std::set<Identifier> ends;
        for (const ClassInstance* end : instances_of(model, n::end)) ends.insert(end->id);
        for (const auto& relation : model.relationclass_instances) {
            if (relation.relationclass != n::flow) continue;
            successors[relation.from_instance].push_back(relation.to_instance);
            if (ends.count(relation.from_instance) > 0) {
                fail("V007", model.id, relation.from_instance, "End has outgoing flow");
            }
        }
        std::set<Identifier> reached;
        std::deque<Identifier> frontier;
        for (const ClassInstance* start : instances_of(model, n::start)) {
            reached.insert(start->id);
            frontier.push_back(start->id);
        }
        while (!frontier.empty()) {
            Identifier id = frontier.front();
            frontier.pop_front();
            auto edges = successors.find(id);
            if (edges == successors.end()) continue;
            for (const auto& next : edges->second) {
                if (reached.insert(next).second) frontier.push_back(next);
            }
        }
        for (const char* metaclass :
             {n::condition, n::statechange_ref, n::resolve, n::end}) {
            for (const ClassInstance* node : instances_of(model, metaclass)) {
                if (reached.count(node->id) == 0) {
                    fail("V007", model.id, node->id,
                         std::string(metaclass) + " is not reachable from Start");
                }
            }
        }
    }

    // V010: resolves must stay inside this FlowScene and hit a Condition.
    void check_resolve(const Model& model, const ClassInstance& resolve) {
        const InstanceRef* target = ref_attr(resolve, n::attr_resolves);
        if (target == nullptr) return;  // attribute is optional
        const ClassInstance* condition = nullptr;
        if (target->kind == InstanceRef::Kind::class_instance && target->model_id == model.id) {
            condition = model.find_class_instance(target->instance_id);
        }
        if (condition == nullptr || condition->metaclass != n::condition) {
            fail("V010", model.id, resolve.id,
                 "resolves must target a Condition in the same FlowScene");
        }
    }

    const Bundle& bundle_;
    DiagnosticList diagnostics_;
    std::vector<const Model*> object_space_models_;
    std::vector<const Model*> flow_scene_models_;
};

}  // namespace

DiagnosticList validate(const Bundle& bundle) { return Validator(bundle).run(); }

}  // namespace m2ar::arwfml
