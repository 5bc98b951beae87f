#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "m2ar/ids.hpp"
#include "m2ar/pose.hpp"

/// Generic metamodeling kernel: scene-type-based languages are defined as
/// Metamodel values, instantiated as Models grouped into Bundles, and checked
/// against their language by the conformance pass (conformance.hpp).
///
/// Everything here is immutable after construction and safe to share between
/// threads; all operations are pure functions.
namespace m2ar::meta {

/// The closed set of attribute payload kinds.
enum class ValueKind : std::uint8_t {
    text,
    number,
    boolean,
    vector3,
    quaternion,
    asset_ref,
    instance_ref,
    change_list,
};

const char* to_string(ValueKind kind);

enum class RefTargetKind : std::uint8_t { metaclass_instance, port_instance, scene_type_instance };

const char* to_string(RefTargetKind kind);

/// What a reference attribute or port may point at. `allowed_types` narrows
/// the target by metaclass / port / scene-type name; empty means any. The
/// names are documentation for language-level validators: generic conformance
/// enforces the target kind only.
struct RefTarget {
    RefTargetKind kind = RefTargetKind::metaclass_instance;
    std::vector<std::string> allowed_types;

    friend bool operator==(const RefTarget&, const RefTarget&) = default;
};

/// Typed reference to a class instance, a port instance, or a whole model.
struct InstanceRef {
    enum class Kind : std::uint8_t { class_instance, port_instance, model };

    Kind kind = Kind::class_instance;
    Identifier model_id;
    Identifier instance_id;  // empty for model references

    static InstanceRef to_class(Identifier model, Identifier instance) {
        return {Kind::class_instance, std::move(model), std::move(instance)};
    }
    static InstanceRef to_port(Identifier model, Identifier instance) {
        return {Kind::port_instance, std::move(model), std::move(instance)};
    }
    static InstanceRef to_model(Identifier model) {
        return {Kind::model, std::move(model), Identifier{}};
    }

    friend bool operator==(const InstanceRef&, const InstanceRef&) = default;
};

const char* to_string(InstanceRef::Kind kind);

/// Identifier into the bundle's asset registry. Distinct type so the
/// AttributeValue variant can tell asset references and plain text apart.
struct AssetRef {
    Identifier id;

    friend bool operator==(const AssetRef&, const AssetRef&) = default;
};

/// Tagged attribute payload. The variant alternative order mirrors ValueKind
/// so kind() is a plain index lookup.
class AttributeValue {
public:
    static AttributeValue text(std::string v) { return AttributeValue(std::move(v)); }
    static AttributeValue number(double v) { return AttributeValue(v); }
    static AttributeValue boolean(bool v) { return AttributeValue(v); }
    static AttributeValue vector3(scene::Vec3 v) { return AttributeValue(v); }
    static AttributeValue quaternion(scene::Quat v) { return AttributeValue(v); }
    static AttributeValue asset(Identifier id) { return AttributeValue(AssetRef{std::move(id)}); }
    static AttributeValue ref(InstanceRef r) { return AttributeValue(std::move(r)); }
    static AttributeValue changes(scene::ChangeList c) { return AttributeValue(std::move(c)); }

    ValueKind kind() const { return static_cast<ValueKind>(value_.index()); }

    const std::string& as_text() const { return std::get<std::string>(value_); }
    double as_number() const { return std::get<double>(value_); }
    bool as_boolean() const { return std::get<bool>(value_); }
    const scene::Vec3& as_vector3() const { return std::get<scene::Vec3>(value_); }
    const scene::Quat& as_quaternion() const { return std::get<scene::Quat>(value_); }
    const AssetRef& as_asset() const { return std::get<AssetRef>(value_); }
    const InstanceRef& as_ref() const { return std::get<InstanceRef>(value_); }
    const scene::ChangeList& as_changes() const { return std::get<scene::ChangeList>(value_); }

    friend bool operator==(const AttributeValue&, const AttributeValue&) = default;

private:
    using Storage = std::variant<std::string, double, bool, scene::Vec3, scene::Quat, AssetRef,
                                 InstanceRef, scene::ChangeList>;

    template <typename T>
    explicit AttributeValue(T&& v) : value_(std::forward<T>(v)) {}

    Storage value_;
};

// ---------------------------------------------------------------------------
// Language definition layer
// ---------------------------------------------------------------------------

struct AttributeDefinition {
    std::string name;
    ValueKind kind = ValueKind::text;
    bool required = false;
    std::optional<AttributeValue> default_value;
    std::optional<RefTarget> ref_target;  // present iff kind == instance_ref

    friend bool operator==(const AttributeDefinition&, const AttributeDefinition&) = default;
};

struct PortDefinition {
    std::string name;
    RefTarget ref_target;  // a port exists to hold a reference

    friend bool operator==(const PortDefinition&, const PortDefinition&) = default;
};

struct Cardinality {
    std::uint32_t min = 0;
    std::optional<std::uint32_t> max;  // nullopt = unbounded

    friend bool operator==(const Cardinality&, const Cardinality&) = default;
};

/// Relationclasses do not connect to classes directly; each end is a role
/// naming the metaclasses allowed there.
struct RoleDefinition {
    std::string name;
    std::vector<std::string> allowed_endpoint_types;
    Cardinality cardinality;

    friend bool operator==(const RoleDefinition&, const RoleDefinition&) = default;
};

struct MetaClass {
    std::string name;
    std::vector<AttributeDefinition> attributes;
    std::vector<PortDefinition> ports;

    const AttributeDefinition* find_attribute(const std::string& attr_name) const;
    const PortDefinition* find_port(const std::string& port_name) const;

    friend bool operator==(const MetaClass&, const MetaClass&) = default;
};

struct RelationclassDefinition {
    std::string name;
    RoleDefinition from_role;
    RoleDefinition to_role;
    std::vector<AttributeDefinition> attributes;

    const AttributeDefinition* find_attribute(const std::string& attr_name) const;

    friend bool operator==(const RelationclassDefinition&, const RelationclassDefinition&) = default;
};

struct SceneTypeDefinition {
    std::string name;
    std::vector<MetaClass> metaclasses;
    std::vector<RelationclassDefinition> relationclasses;

    const MetaClass* find_metaclass(const std::string& metaclass_name) const;
    const RelationclassDefinition* find_relationclass(const std::string& relationclass_name) const;

    friend bool operator==(const SceneTypeDefinition&, const SceneTypeDefinition&) = default;
};

struct Metamodel {
    std::string name;
    std::string version;
    std::vector<SceneTypeDefinition> scene_types;

    const SceneTypeDefinition* find_scene_type(const std::string& scene_type_name) const;

    friend bool operator==(const Metamodel&, const Metamodel&) = default;
};

/// Checks a declarative language description and returns it as an immutable
/// Metamodel: names must be unique in their scope, every role endpoint type
/// must resolve to a declared metaclass of the owning scene type, reference
/// attributes must carry a ref_target (and only they may), defaults must
/// match their attribute's kind.
///
/// Throws MetamodelError (duplicate_name, unresolved_endpoint_type,
/// invalid_definition).
Metamodel build_metamodel(Metamodel spec);

// ---------------------------------------------------------------------------
// Instance layer
// ---------------------------------------------------------------------------

struct ClassInstance {
    Identifier id;
    std::string metaclass;
    std::string display_name;
    std::map<std::string, AttributeValue> attributes;
    std::optional<scene::Pose> placement;  // spatial position inside its model

    const AttributeValue* find_attribute(const std::string& name) const;

    friend bool operator==(const ClassInstance&, const ClassInstance&) = default;
};

struct RelationclassInstance {
    Identifier id;
    std::string relationclass;
    Identifier from_instance;
    Identifier to_instance;
    std::map<std::string, AttributeValue> attributes;

    friend bool operator==(const RelationclassInstance&, const RelationclassInstance&) = default;
};

struct PortInstance {
    Identifier id;
    std::string port;
    Identifier owner;  // owning ClassInstance
    std::optional<InstanceRef> target;

    friend bool operator==(const PortInstance&, const PortInstance&) = default;
};

/// An instance graph of exactly one scene type.
struct Model {
    Identifier id;
    std::string name;
    std::string scene_type;
    std::vector<ClassInstance> class_instances;
    std::vector<RelationclassInstance> relationclass_instances;
    std::vector<PortInstance> port_instances;

    const ClassInstance* find_class_instance(const Identifier& instance_id) const;
    const RelationclassInstance* find_relationclass_instance(const Identifier& instance_id) const;
    const PortInstance* find_port_instance(const Identifier& instance_id) const;

    friend bool operator==(const Model&, const Model&) = default;
};

struct AssetEntry {
    enum class Kind : std::uint8_t { gltf, image };

    Kind kind = Kind::gltf;
    std::string uri;

    friend bool operator==(const AssetEntry&, const AssetEntry&) = default;
};

const char* to_string(AssetEntry::Kind kind);

/// The unit of interchange: a set of models plus the asset registry they
/// reference. Assets are stored by reference only; their bytes are opaque to
/// the kernel.
struct Bundle {
    std::string format_version = "1.0";
    std::string metamodel_name;
    std::vector<Model> models;
    std::map<Identifier, AssetEntry> assets;

    const Model* find_model(const Identifier& model_id) const;

    friend bool operator==(const Bundle&, const Bundle&) = default;
};

/// Handle to whatever an InstanceRef resolved to.
using ResolvedInstance =
    std::variant<const ClassInstance*, const PortInstance*, const Model*>;

/// Looks up `ref` in `bundle`; empty when the reference dangles or its kind
/// does not match what is actually stored under those ids.
std::optional<ResolvedInstance> try_resolve(const Bundle& bundle, const InstanceRef& ref);

/// As try_resolve, but throws DanglingReference on a miss.
ResolvedInstance resolve(const Bundle& bundle, const InstanceRef& ref);

}  // namespace m2ar::meta
