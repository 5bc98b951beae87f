#include "m2ar/conformance.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace m2ar::meta {

namespace {

class Checker {
public:
    Checker(const Bundle& bundle, const Metamodel& metamodel)
        : bundle_(bundle), metamodel_(metamodel) {}

    DiagnosticList run() {
        check_ids();
        for (const auto& model : bundle_.models) check_model(model);
        sort_diagnostics(diagnostics_);
        return std::move(diagnostics_);
    }

private:
    void report(Severity severity, std::string code, Identifier model_id, Identifier instance_id,
                std::string message) {
        diagnostics_.push_back({severity, std::move(code), std::move(model_id),
                                std::move(instance_id), std::move(message)});
    }

    void error(std::string code, const Identifier& model_id, const Identifier& instance_id,
               std::string message) {
        report(Severity::error, std::move(code), model_id, instance_id, std::move(message));
    }

    // Model ids must be unique among models; instance ids bundle-wide.
    void check_ids() {
        std::set<Identifier> model_ids;
        std::set<Identifier> instance_ids;
        for (const auto& model : bundle_.models) {
            if (!model_ids.insert(model.id).second) {
                error("DuplicateModelId", model.id, {}, "model id used more than once");
            }
            auto claim = [&](const Identifier& id) {
                if (!instance_ids.insert(id).second) {
                    error("DuplicateId", model.id, id, "instance id used more than once");
                }
            };
            for (const auto& instance : model.class_instances) claim(instance.id);
            for (const auto& instance : model.relationclass_instances) claim(instance.id);
            for (const auto& instance : model.port_instances) claim(instance.id);
        }
    }

    void check_model(const Model& model) {
        const SceneTypeDefinition* scene_type = metamodel_.find_scene_type(model.scene_type);
        if (scene_type == nullptr) {
            error("UnknownSceneType", model.id, {},
                  "scene type '" + model.scene_type + "' is not defined by metamodel '" +
                      metamodel_.name + "'");
            return;
        }
        for (const auto& instance : model.class_instances) {
            check_class_instance(model, *scene_type, instance);
        }
        for (const auto& instance : model.relationclass_instances) {
            check_relation_instance(model, *scene_type, instance);
        }
        for (const auto& instance : model.port_instances) {
            check_port_instance(model, *scene_type, instance);
        }
        check_cardinalities(model, *scene_type);
    }

    void check_class_instance(const Model& model, const SceneTypeDefinition& scene_type,
                              const ClassInstance& instance) {
        const MetaClass* metaclass = scene_type.find_metaclass(instance.metaclass);
        if (metaclass == nullptr) {
            error("UnknownMetaclass", model.id, instance.id,
                  "metaclass '" + instance.metaclass + "' is not declared by scene type '" +
                      scene_type.name + "'");
            return;
        }
        check_attributes(model, instance.id, instance.attributes, metaclass->attributes);
        if (instance.placement) check_pose(model, instance.id, *instance.placement, "placement");
    }

    void check_relation_instance(const Model& model, const SceneTypeDefinition& scene_type,
                                 const RelationclassInstance& instance) {
        const RelationclassDefinition* relationclass =
            scene_type.find_relationclass(instance.relationclass);
        if (relationclass == nullptr) {
            error("UnknownRelationclass", model.id, instance.id,
                  "relationclass '" + instance.relationclass +
                      "' is not declared by scene type '" + scene_type.name + "'");
            return;
        }
        check_endpoint(model, instance, relationclass->from_role, instance.from_instance);
        check_endpoint(model, instance, relationclass->to_role, instance.to_instance);
        check_attributes(model, instance.id, instance.attributes, relationclass->attributes);
    }

    void check_endpoint(const Model& model, const RelationclassInstance& instance,
                        const RoleDefinition& role, const Identifier& endpoint_id) {
        std::string endpoint_type;
        if (const ClassInstance* endpoint = model.find_class_instance(endpoint_id)) {
            endpoint_type = endpoint->metaclass;
        } else if (const PortInstance* port = model.find_port_instance(endpoint_id)) {
            endpoint_type = port->port;
        } else {
            error("DanglingEndpoint", model.id, instance.id,
                  "role '" + role.name + "' endpoint '" + endpoint_id.str() +
                      "' does not exist in the model");
            return;
        }
        const auto& allowed = role.allowed_endpoint_types;
        if (std::find(allowed.begin(), allowed.end(), endpoint_type) == allowed.end()) {
            error("RoleViolation", model.id, instance.id,
                  "role '" + role.name + "' of relationclass '" + instance.relationclass +
                      "' does not admit endpoint type '" + endpoint_type + "'");
        }
    }

    void check_port_instance(const Model& model, const SceneTypeDefinition& scene_type,
                             const PortInstance& instance) {
        const ClassInstance* owner = model.find_class_instance(instance.owner);
        if (owner == nullptr) {
            error("DanglingOwner", model.id, instance.id,
                  "port owner '" + instance.owner.str() + "' does not exist in the model");
            return;
        }
        const MetaClass* metaclass = scene_type.find_metaclass(owner->metaclass);
        const PortDefinition* port =
            metaclass == nullptr ? nullptr : metaclass->find_port(instance.port);
        if (port == nullptr) {
            error("UnknownPort", model.id, instance.id,
                  "metaclass '" + owner->metaclass + "' declares no port '" + instance.port + "'");
            return;
        }
        if (instance.target) {
            check_instance_ref(model, instance.id, *instance.target,
                               std::optional(port->ref_target.kind),
                               "port '" + instance.port + "'");
        }
    }

    void check_attributes(const Model& model, const Identifier& instance_id,
                          const std::map<std::string, AttributeValue>& attributes,
                          const std::vector<AttributeDefinition>& definitions) {
        for (const auto& [name, value] : attributes) {
            const AttributeDefinition* definition = nullptr;
            for (const auto& candidate : definitions) {
                if (candidate.name == name) definition = &candidate;
            }
            if (definition == nullptr) {
                error("UnknownAttribute", model.id, instance_id,
                      "attribute '" + name + "' is not declared");
                continue;
            }
            if (value.kind() != definition->kind) {
                error("AttributeKindMismatch", model.id, instance_id,
                      "attribute '" + name + "' holds " + to_string(value.kind()) +
                          ", declared as " + to_string(definition->kind));
                continue;
            }
            check_value(model, instance_id, name, value, *definition);
        }
        for (const auto& definition : definitions) {
            if (definition.required && attributes.find(definition.name) == attributes.end()) {
                error("MissingAttribute", model.id, instance_id,
                      "required attribute '" + definition.name + "' is absent");
            }
        }
    }

    void check_value(const Model& model, const Identifier& instance_id, const std::string& name,
                     const AttributeValue& value, const AttributeDefinition& definition) {
        switch (value.kind()) {
            case ValueKind::quaternion:
                check_quaternion(model, instance_id, value.as_quaternion(),
                                 "attribute '" + name + "'");
                break;
            case ValueKind::asset_ref:
                if (bundle_.assets.find(value.as_asset().id) == bundle_.assets.end()) {
                    error("UnknownAsset", model.id, instance_id,
                          "attribute '" + name + "' references unknown asset '" +
                              value.as_asset().id.str() + "'");
                }
                break;
            case ValueKind::instance_ref: {
                // build_metamodel guarantees a ref_target for instance_ref
                // attributes; tolerate its absence by checking resolution only.
                std::optional<RefTargetKind> declared;
                if (definition.ref_target) declared = definition.ref_target->kind;
                check_instance_ref(model, instance_id, value.as_ref(), declared,
                                   "attribute '" + name + "'");
                break;
            }
            case ValueKind::change_list: {
                const auto& changes = value.as_changes();
                if (changes.empty()) {
                    report(Severity::warning, "EmptyChangeList", model.id, instance_id,
                           "attribute '" + name + "' changes nothing");
                }
                if (changes.rotation) {
                    check_quaternion(model, instance_id, *changes.rotation,
                                     "attribute '" + name + "' rotation");
                }
                if (changes.scale && !(changes.scale->x > 0.0 && changes.scale->y > 0.0 &&
                                       changes.scale->z > 0.0)) {
                    error("InvalidPose", model.id, instance_id,
                          "attribute '" + name + "' scale must be positive");
                }
                break;
            }
            default:
                break;
        }
    }

    void check_instance_ref(const Model& model, const Identifier& instance_id,
                            const InstanceRef& ref, std::optional<RefTargetKind> declared_kind,
                            const std::string& what) {
        if (!try_resolve(bundle_, ref)) {
            error("DanglingReference", model.id, instance_id,
                  what + " references missing " + std::string(to_string(ref.kind)) + " '" +
                      ref.model_id.str() +
                      (ref.instance_id.empty() ? "" : "/" + ref.instance_id.str()) + "'");
            return;
        }
        if (!declared_kind) return;
        const bool kind_matches =
            (*declared_kind == RefTargetKind::metaclass_instance &&
             ref.kind == InstanceRef::Kind::class_instance) ||
            (*declared_kind == RefTargetKind::port_instance &&
             ref.kind == InstanceRef::Kind::port_instance) ||
            (*declared_kind == RefTargetKind::scene_type_instance &&
             ref.kind == InstanceRef::Kind::model);
        if (!kind_matches) {
            error("RefKindMismatch", model.id, instance_id,
                  what + " must reference a " + std::string(to_string(*declared_kind)) +
                      ", holds a " + std::string(to_string(ref.kind)) + " reference");
        }
    }

    void check_quaternion(const Model& model, const Identifier& instance_id,
                          const scene::Quat& q, const std::string& what) {
        if (std::fabs(scene::norm(q) - 1.0) > 1e-9) {
            error("InvalidQuaternion", model.id, instance_id, what + " is not a unit quaternion");
        }
    }

    void check_pose(const Model& model, const Identifier& instance_id, const scene::Pose& pose,
                    const std::string& what) {
        check_quaternion(model, instance_id, pose.rotation, what + " rotation");
        if (!(pose.scale.x > 0.0 && pose.scale.y > 0.0 && pose.scale.z > 0.0)) {
            error("InvalidPose", model.id, instance_id, what + " scale must be positive");
        }
    }

    // Role cardinalities count, per class instance of an admissible type, the
    // edges of the relationclass where it plays that role.
    void check_cardinalities(const Model& model, const SceneTypeDefinition& scene_type) {
        for (const auto& relationclass : scene_type.relationclasses) {
            check_role_cardinality(model, relationclass, relationclass.from_role, true);
            check_role_cardinality(model, relationclass, relationclass.to_role, false);
        }
    }

    void check_role_cardinality(const Model& model, const RelationclassDefinition& relationclass,
                                const RoleDefinition& role, bool from_side) {
        if (role.cardinality.min == 0 && !role.cardinality.max) return;  // unconstrained
        std::map<Identifier, std::uint32_t> degree;
        for (const auto& relation : model.relationclass_instances) {
            if (relation.relationclass != relationclass.name) continue;
            degree[from_side ? relation.from_instance : relation.to_instance] += 1;
        }
        const auto& allowed = role.allowed_endpoint_types;
        for (const auto& instance : model.class_instances) {
            if (std::find(allowed.begin(), allowed.end(), instance.metaclass) == allowed.end()) {
                continue;
            }
            const std::uint32_t count = degree.count(instance.id) ? degree.at(instance.id) : 0;
            const bool below = count < role.cardinality.min;
            const bool above = role.cardinality.max && count > *role.cardinality.max;
            if (below || above) {
                error("CardinalityViolation", model.id, instance.id,
                      "instance participates " + std::to_string(count) + " times in role '" +
                          role.name + "' of '" + relationclass.name + "'");
            }
        }
    }

    const Bundle& bundle_;
    const Metamodel& metamodel_;
    DiagnosticList diagnostics_;
};

}  // namespace

DiagnosticList conforms(const Bundle& bundle, const Metamodel& metamodel) {
    return Checker(bundle, metamodel).run();
}

}  // namespace m2ar::meta
