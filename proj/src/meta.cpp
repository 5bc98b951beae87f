#include "m2ar/meta.hpp"

#include <algorithm>
#include <set>

#include "m2ar/errors.hpp"

namespace m2ar::meta {

const char* to_string(ValueKind kind) {
    switch (kind) {
        case ValueKind::text: return "text";
        case ValueKind::number: return "number";
        case ValueKind::boolean: return "boolean";
        case ValueKind::vector3: return "vector3";
        case ValueKind::quaternion: return "quaternion";
        case ValueKind::asset_ref: return "asset_ref";
        case ValueKind::instance_ref: return "instance_ref";
        case ValueKind::change_list: return "change_list";
    }
    return "unknown";
}

const char* to_string(RefTargetKind kind) {
    switch (kind) {
        case RefTargetKind::metaclass_instance: return "metaclass_instance";
        case RefTargetKind::port_instance: return "port_instance";
        case RefTargetKind::scene_type_instance: return "scene_type_instance";
    }
    return "unknown";
}

const char* to_string(InstanceRef::Kind kind) {
    switch (kind) {
        case InstanceRef::Kind::class_instance: return "class_instance";
        case InstanceRef::Kind::port_instance: return "port_instance";
        case InstanceRef::Kind::model: return "model";
    }
    return "unknown";
}

const char* to_string(AssetEntry::Kind kind) {
    switch (kind) {
        case AssetEntry::Kind::gltf: return "gltf";
        case AssetEntry::Kind::image: return "image";
    }
    return "unknown";
}

namespace {

template <typename Range, typename NameOf>
const auto* find_by_name(const Range& range, const std::string& name, NameOf name_of) {
    for (const auto& item : range) {
        if (name_of(item) == name) return &item;
    }
    using Item = std::remove_cvref_t<decltype(*std::begin(range))>;
    return static_cast<const Item*>(nullptr);
}

template <typename Range, typename IdOf>
const auto* find_by_id(const Range& range, const Identifier& id, IdOf id_of) {
    for (const auto& item : range) {
        if (id_of(item) == id) return &item;
    }
    using Item = std::remove_cvref_t<decltype(*std::begin(range))>;
    return static_cast<const Item*>(nullptr);
}

}  // namespace

const AttributeDefinition* MetaClass::find_attribute(const std::string& attr_name) const {
    return find_by_name(attributes, attr_name, [](const auto& a) { return a.name; });
}

const PortDefinition* MetaClass::find_port(const std::string& port_name) const {
    return find_by_name(ports, port_name, [](const auto& p) { return p.name; });
}

const AttributeDefinition* RelationclassDefinition::find_attribute(
    const std::string& attr_name) const {
    return find_by_name(attributes, attr_name, [](const auto& a) { return a.name; });
}

const MetaClass* SceneTypeDefinition::find_metaclass(const std::string& metaclass_name) const {
    return find_by_name(metaclasses, metaclass_name, [](const auto& m) { return m.name; });
}

const RelationclassDefinition* SceneTypeDefinition::find_relationclass(
    const std::string& relationclass_name) const {
    return find_by_name(relationclasses, relationclass_name, [](const auto& r) { return r.name; });
}

const SceneTypeDefinition* Metamodel::find_scene_type(const std::string& scene_type_name) const {
    return find_by_name(scene_types, scene_type_name, [](const auto& s) { return s.name; });
}

const AttributeValue* ClassInstance::find_attribute(const std::string& name) const {
    auto it = attributes.find(name);
    return it == attributes.end() ? nullptr : &it->second;
}

const ClassInstance* Model::find_class_instance(const Identifier& instance_id) const {
    return find_by_id(class_instances, instance_id, [](const auto& c) { return c.id; });
}

const RelationclassInstance* Model::find_relationclass_instance(
    const Identifier& instance_id) const {
    return find_by_id(relationclass_instances, instance_id, [](const auto& r) { return r.id; });
}

const PortInstance* Model::find_port_instance(const Identifier& instance_id) const {
    return find_by_id(port_instances, instance_id, [](const auto& p) { return p.id; });
}

const Model* Bundle::find_model(const Identifier& model_id) const {
    return find_by_id(models, model_id, [](const auto& m) { return m.id; });
}

// ---------------------------------------------------------------------------
// build_metamodel
// ---------------------------------------------------------------------------

namespace {

void require_unique(std::set<std::string>& seen, const std::string& name,
                    const std::string& scope) {
    if (!seen.insert(name).second) {
        throw MetamodelError(MetamodelError::Code::duplicate_name,
                             "duplicate name '" + name + "' in " + scope);
    }
}

void check_attribute_definition(const AttributeDefinition& attr, const std::string& scope) {
    const bool is_ref = attr.kind == ValueKind::instance_ref;
    if (is_ref != attr.ref_target.has_value()) {
        throw MetamodelError(MetamodelError::Code::invalid_definition,
                             "attribute '" + attr.name + "' in " + scope +
                                 (is_ref ? " must declare a ref_target"
                                         : " must not declare a ref_target"));
    }
    if (attr.default_value && attr.default_value->kind() != attr.kind) {
        throw MetamodelError(MetamodelError::Code::invalid_definition,
                             "default of attribute '" + attr.name + "' in " + scope +
                                 " does not match its value kind");
    }
}

void check_role(const RoleDefinition& role, const SceneTypeDefinition& scene_type,
                const std::string& scope) {
    if (role.allowed_endpoint_types.empty()) {
        throw MetamodelError(MetamodelError::Code::invalid_definition,
                             "role '" + role.name + "' in " + scope +
                                 " declares no endpoint types");
    }
    for (const auto& endpoint : role.allowed_endpoint_types) {
        if (scene_type.find_metaclass(endpoint) != nullptr) continue;
        bool is_port = false;
        for (const auto& metaclass : scene_type.metaclasses) {
            if (metaclass.find_port(endpoint) != nullptr) is_port = true;
        }
        if (!is_port) {
            throw MetamodelError(MetamodelError::Code::unresolved_endpoint_type,
                                 "role '" + role.name + "' in " + scope +
                                     " names unknown endpoint type '" + endpoint + "'");
        }
    }
    if (role.cardinality.max && role.cardinality.min > *role.cardinality.max) {
        throw MetamodelError(MetamodelError::Code::invalid_definition,
                             "role '" + role.name + "' in " + scope + " has min > max");
    }
}

}  // namespace

Metamodel build_metamodel(Metamodel spec) {
    std::set<std::string> scene_type_names;
    for (const auto& scene_type : spec.scene_types) {
        require_unique(scene_type_names, scene_type.name, "metamodel '" + spec.name + "'");

        std::set<std::string> member_names;
        for (const auto& metaclass : scene_type.metaclasses) {
            require_unique(member_names, metaclass.name, "scene type '" + scene_type.name + "'");
            const std::string scope = "metaclass '" + metaclass.name + "'";
            std::set<std::string> attr_names;
            for (const auto& attr : metaclass.attributes) {
                require_unique(attr_names, attr.name, scope);
                check_attribute_definition(attr, scope);
            }
            std::set<std::string> port_names;
            for (const auto& port : metaclass.ports) {
                require_unique(port_names, port.name, scope);
            }
        }
        for (const auto& relationclass : scene_type.relationclasses) {
            require_unique(member_names, relationclass.name,
                           "scene type '" + scene_type.name + "'");
            const std::string scope = "relationclass '" + relationclass.name + "'";
            if (relationclass.from_role.name == relationclass.to_role.name) {
                throw MetamodelError(MetamodelError::Code::invalid_definition,
                                     scope + " uses one name for both roles");
            }
            check_role(relationclass.from_role, scene_type, scope);
            check_role(relationclass.to_role, scene_type, scope);
            std::set<std::string> attr_names;
            for (const auto& attr : relationclass.attributes) {
                require_unique(attr_names, attr.name, scope);
                check_attribute_definition(attr, scope);
            }
        }
    }
    return spec;
}

// ---------------------------------------------------------------------------
// resolve
// ---------------------------------------------------------------------------

std::optional<ResolvedInstance> try_resolve(const Bundle& bundle, const InstanceRef& ref) {
    const Model* model = bundle.find_model(ref.model_id);
    if (model == nullptr) return std::nullopt;
    switch (ref.kind) {
        case InstanceRef::Kind::model:
            return ResolvedInstance{model};
        case InstanceRef::Kind::class_instance: {
            const ClassInstance* instance = model->find_class_instance(ref.instance_id);
            if (instance == nullptr) return std::nullopt;
            return ResolvedInstance{instance};
        }
        case InstanceRef::Kind::port_instance: {
            const PortInstance* instance = model->find_port_instance(ref.instance_id);
            if (instance == nullptr) return std::nullopt;
            return ResolvedInstance{instance};
        }
    }
    return std::nullopt;
}

ResolvedInstance resolve(const Bundle& bundle, const InstanceRef& ref) {
    if (auto resolved = try_resolve(bundle, ref)) return *resolved;
    throw DanglingReference("dangling reference: " + std::string(to_string(ref.kind)) + " " +
                            ref.model_id.str() +
                            (ref.instance_id.empty() ? "" : "/" + ref.instance_id.str()));
}

}  // namespace m2ar::meta
