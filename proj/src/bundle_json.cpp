#include "m2ar/bundle_json.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "m2ar/errors.hpp"

namespace m2ar::io {

using json = nlohmann::json;
using meta::AttributeValue;
using meta::Bundle;
using meta::InstanceRef;
using meta::Model;

namespace {

[[noreturn]] void malformed(const std::string& message) {
    throw BundleIoError(BundleIoError::Code::malformed_document, message);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

json encode_vector3(const scene::Vec3& v) { return json::array({v.x, v.y, v.z}); }

json encode_quaternion(const scene::Quat& q) { return json::array({q.x, q.y, q.z, q.w}); }

json encode_pose(const scene::Pose& pose) {
    return {{"position", encode_vector3(pose.position)},
            {"rotation", encode_quaternion(pose.rotation)},
            {"scale", encode_vector3(pose.scale)}};
}

const char* ref_kind_tag(InstanceRef::Kind kind) {
    switch (kind) {
        case InstanceRef::Kind::class_instance: return "class";
        case InstanceRef::Kind::port_instance: return "port";
        case InstanceRef::Kind::model: return "model";
    }
    return "class";
}

json encode_ref(const InstanceRef& ref) {
    json body = {{"kind", ref_kind_tag(ref.kind)}, {"model", ref.model_id.str()}};
    if (ref.kind != InstanceRef::Kind::model) body["instance"] = ref.instance_id.str();
    return {{"ref", body}};
}

json encode_value(const AttributeValue& value) {
    switch (value.kind()) {
        case meta::ValueKind::text: return value.as_text();
        case meta::ValueKind::number: return value.as_number();
        case meta::ValueKind::boolean: return value.as_boolean();
        case meta::ValueKind::vector3: return encode_vector3(value.as_vector3());
        case meta::ValueKind::quaternion: return encode_quaternion(value.as_quaternion());
        case meta::ValueKind::asset_ref: return {{"asset", value.as_asset().id.str()}};
        case meta::ValueKind::instance_ref: return encode_ref(value.as_ref());
        case meta::ValueKind::change_list: {
            const auto& changes = value.as_changes();
            json body = json::object();
            if (changes.visible) body["visible"] = *changes.visible;
            if (changes.position) body["position"] = encode_vector3(*changes.position);
            if (changes.rotation) body["rotation"] = encode_quaternion(*changes.rotation);
            if (changes.scale) body["scale"] = encode_vector3(*changes.scale);
            return {{"changes", body}};
        }
    }
    malformed("attribute value with unrepresentable kind");
}

json encode_attributes(const std::map<std::string, AttributeValue>& attributes) {
    json body = json::object();
    for (const auto& [name, value] : attributes) body[name] = encode_value(value);
    return body;
}

json encode_model(const Model& model) {
    json classes = json::array();
    auto class_instances = model.class_instances;
    std::sort(class_instances.begin(), class_instances.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& instance : class_instances) {
        json record = {{"attributes", encode_attributes(instance.attributes)},
                       {"display_name", instance.display_name},
                       {"id", instance.id.str()},
                       {"metaclass", instance.metaclass}};
        if (instance.placement) record["placement"] = encode_pose(*instance.placement);
        classes.push_back(std::move(record));
    }

    json relations = json::array();
    auto relation_instances = model.relationclass_instances;
    std::sort(relation_instances.begin(), relation_instances.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& instance : relation_instances) {
        relations.push_back({{"attributes", encode_attributes(instance.attributes)},
                             {"from", instance.from_instance.str()},
                             {"id", instance.id.str()},
                             {"relationclass", instance.relationclass},
                             {"to", instance.to_instance.str()}});
    }

    json ports = json::array();
    auto port_instances = model.port_instances;
    std::sort(port_instances.begin(), port_instances.end(),
              [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& instance : port_instances) {
        json record = {{"id", instance.id.str()},
                       {"owner", instance.owner.str()},
                       {"port", instance.port}};
        if (instance.target) record["target"] = encode_ref(*instance.target)["ref"];
        ports.push_back(std::move(record));
    }

    return {{"classes", std::move(classes)},
            {"id", model.id.str()},
            {"name", model.name},
            {"ports", std::move(ports)},
            {"relations", std::move(relations)},
            {"scene_type", model.scene_type}};
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

// nlohmann tolerates pathological nesting poorly (deep recursion on
// destruction); cap raw bracket depth before handing bytes to it.
constexpr int max_nesting_depth = 256;

void check_nesting_depth(const std::string& text) {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (char c : text) {
        if (in_string) {
            if (escaped) {
                escaped = false;
            } else if (c == '\\') {
                escaped = true;
            } else if (c == '"') {
                in_string = false;
            }
            continue;
        }
        if (c == '"') {
            in_string = true;
        } else if (c == '[' || c == '{') {
            if (++depth > max_nesting_depth) malformed("document nests deeper than 256 levels");
        } else if (c == ']' || c == '}') {
            --depth;  // imbalance is the JSON parser's problem
        }
    }
}

const json& expect_member(const json& object, const char* key, const std::string& where) {
    auto it = object.find(key);
    if (it == object.end()) malformed(where + ": missing key '" + key + "'");
    return *it;
}

std::string expect_string(const json& value, const std::string& where) {
    if (!value.is_string()) malformed(where + ": expected a string");
    return value.get<std::string>();
}

double expect_number(const json& value, const std::string& where) {
    if (!value.is_number()) malformed(where + ": expected a number");
    const double d = value.get<double>();
    if (!std::isfinite(d)) malformed(where + ": number is not finite");
    return d;
}

void reject_unknown_keys(const json& object, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (const auto& [key, unused] : object.items()) {
        if (std::find_if(known.begin(), known.end(),
                         [&](const char* k) { return key == k; }) == known.end()) {
            malformed(where + ": unknown key '" + key + "'");
        }
    }
}

scene::Vec3 parse_vector3(const json& value, const std::string& where) {
    if (!value.is_array() || value.size() != 3) malformed(where + ": expected [x, y, z]");
    return {expect_number(value[0], where), expect_number(value[1], where),
            expect_number(value[2], where)};
}

scene::Quat parse_quaternion(const json& value, const std::string& where) {
    if (!value.is_array() || value.size() != 4) malformed(where + ": expected [x, y, z, w]");
    return {expect_number(value[0], where), expect_number(value[1], where),
            expect_number(value[2], where), expect_number(value[3], where)};
}

scene::Pose parse_pose(const json& value, const std::string& where) {
    if (!value.is_object()) malformed(where + ": expected a pose object");
    reject_unknown_keys(value, {"position", "rotation", "scale"}, where);
    return {parse_vector3(expect_member(value, "position", where), where + ".position"),
            parse_quaternion(expect_member(value, "rotation", where), where + ".rotation"),
            parse_vector3(expect_member(value, "scale", where), where + ".scale")};
}

InstanceRef parse_ref_body(const json& body, const std::string& where) {
    if (!body.is_object()) malformed(where + ": expected a reference object");
    reject_unknown_keys(body, {"kind", "model", "instance"}, where);
    const std::string kind = expect_string(expect_member(body, "kind", where), where + ".kind");
    const std::string model = expect_string(expect_member(body, "model", where), where + ".model");
    if (kind == "model") {
        if (body.contains("instance")) malformed(where + ": model reference carries no instance");
        return InstanceRef::to_model(Identifier(model));
    }
    const std::string instance =
        expect_string(expect_member(body, "instance", where), where + ".instance");
    if (kind == "class") return InstanceRef::to_class(Identifier(model), Identifier(instance));
    if (kind == "port") return InstanceRef::to_port(Identifier(model), Identifier(instance));
    malformed(where + ": reference kind must be class, port, or model");
}

AttributeValue parse_value(const json& value, const std::string& where) {
    if (value.is_string()) return AttributeValue::text(value.get<std::string>());
    if (value.is_boolean()) return AttributeValue::boolean(value.get<bool>());
    if (value.is_number()) return AttributeValue::number(expect_number(value, where));
    if (value.is_array()) {
        if (value.size() == 3) return AttributeValue::vector3(parse_vector3(value, where));
        if (value.size() == 4) return AttributeValue::quaternion(parse_quaternion(value, where));
        throw BundleIoError(BundleIoError::Code::unknown_value_kind,
                            where + ": arrays encode vector3 [3] or quaternion [4]");
    }
    if (value.is_object() && value.size() == 1) {
        if (value.contains("asset")) {
            return AttributeValue::asset(
                Identifier(expect_string(value["asset"], where + ".asset")));
        }
        if (value.contains("ref")) {
            return AttributeValue::ref(parse_ref_body(value["ref"], where + ".ref"));
        }
        if (value.contains("changes")) {
            const json& body = value["changes"];
            if (!body.is_object()) malformed(where + ".changes: expected an object");
            reject_unknown_keys(body, {"visible", "position", "rotation", "scale"},
                                where + ".changes");
            scene::ChangeList changes;
            if (body.contains("visible")) {
                if (!body["visible"].is_boolean()) {
                    malformed(where + ".changes.visible: expected a boolean");
                }
                changes.visible = body["visible"].get<bool>();
            }
            if (body.contains("position")) {
                changes.position = parse_vector3(body["position"], where + ".changes.position");
            }
            if (body.contains("rotation")) {
                changes.rotation =
                    parse_quaternion(body["rotation"], where + ".changes.rotation");
            }
            if (body.contains("scale")) {
                changes.scale = parse_vector3(body["scale"], where + ".changes.scale");
            }
            return AttributeValue::changes(changes);
        }
    }
    throw BundleIoError(BundleIoError::Code::unknown_value_kind,
                        where + ": value matches no known attribute kind");
}

std::map<std::string, AttributeValue> parse_attributes(const json& value,
                                                       const std::string& where) {
    if (!value.is_object()) malformed(where + ": expected an attribute object");
    std::map<std::string, AttributeValue> attributes;
    for (const auto& [name, attr] : value.items()) {
        attributes.emplace(name, parse_value(attr, where + "." + name));
    }
    return attributes;
}

Model parse_model(const json& value, std::size_t index) {
    const std::string where = "models[" + std::to_string(index) + "]";
    if (!value.is_object()) malformed(where + ": expected a model object");
    reject_unknown_keys(value, {"classes", "id", "name", "ports", "relations", "scene_type"},
                        where);
    Model model;
    model.id = Identifier(expect_string(expect_member(value, "id", where), where + ".id"));
    model.name = expect_string(expect_member(value, "name", where), where + ".name");
    model.scene_type =
        expect_string(expect_member(value, "scene_type", where), where + ".scene_type");

    const json& classes = expect_member(value, "classes", where);
    if (!classes.is_array()) malformed(where + ".classes: expected an array");
    for (const json& record : classes) {
        const std::string cwhere = where + ".classes[" + std::to_string(
            model.class_instances.size()) + "]";
        if (!record.is_object()) malformed(cwhere + ": expected an object");
        reject_unknown_keys(record, {"attributes", "display_name", "id", "metaclass", "placement"},
                            cwhere);
        meta::ClassInstance instance;
        instance.id = Identifier(expect_string(expect_member(record, "id", cwhere), cwhere));
        instance.metaclass =
            expect_string(expect_member(record, "metaclass", cwhere), cwhere + ".metaclass");
        instance.display_name =
            expect_string(expect_member(record, "display_name", cwhere), cwhere + ".display_name");
        instance.attributes =
            parse_attributes(expect_member(record, "attributes", cwhere), cwhere + ".attributes");
        if (record.contains("placement")) {
            instance.placement = parse_pose(record["placement"], cwhere + ".placement");
        }
        model.class_instances.push_back(std::move(instance));
    }

    const json& relations = expect_member(value, "relations", where);
    if (!relations.is_array()) malformed(where + ".relations: expected an array");
    for (const json& record : relations) {
        const std::string rwhere = where + ".relations[" + std::to_string(
            model.relationclass_instances.size()) + "]";
        if (!record.is_object()) malformed(rwhere + ": expected an object");
        reject_unknown_keys(record, {"attributes", "from", "id", "relationclass", "to"}, rwhere);
        meta::RelationclassInstance instance;
        instance.id = Identifier(expect_string(expect_member(record, "id", rwhere), rwhere));
        instance.relationclass =
            expect_string(expect_member(record, "relationclass", rwhere), rwhere);
        instance.from_instance =
            Identifier(expect_string(expect_member(record, "from", rwhere), rwhere + ".from"));
        instance.to_instance =
            Identifier(expect_string(expect_member(record, "to", rwhere), rwhere + ".to"));
        instance.attributes =
            parse_attributes(expect_member(record, "attributes", rwhere), rwhere + ".attributes");
        model.relationclass_instances.push_back(std::move(instance));
    }

    const json& ports = expect_member(value, "ports", where);
    if (!ports.is_array()) malformed(where + ".ports: expected an array");
    for (const json& record : ports) {
        const std::string pwhere = where + ".ports[" + std::to_string(
            model.port_instances.size()) + "]";
        if (!record.is_object()) malformed(pwhere + ": expected an object");
        reject_unknown_keys(record, {"id", "owner", "port", "target"}, pwhere);
        meta::PortInstance instance;
        instance.id = Identifier(expect_string(expect_member(record, "id", pwhere), pwhere));
        instance.port = expect_string(expect_member(record, "port", pwhere), pwhere + ".port");
        instance.owner =
            Identifier(expect_string(expect_member(record, "owner", pwhere), pwhere + ".owner"));
        if (record.contains("target")) {
            instance.target = parse_ref_body(record["target"], pwhere + ".target");
        }
        model.port_instances.push_back(std::move(instance));
    }

    auto by_id = [](const auto& a, const auto& b) { return a.id < b.id; };
    std::sort(model.class_instances.begin(), model.class_instances.end(), by_id);
    std::sort(model.relationclass_instances.begin(), model.relationclass_instances.end(), by_id);
    std::sort(model.port_instances.begin(), model.port_instances.end(), by_id);
    return model;
}

void check_unique_ids(const Bundle& bundle) {
    std::set<Identifier> model_ids;
    std::set<Identifier> instance_ids;
    for (const auto& model : bundle.models) {
        if (!model_ids.insert(model.id).second) {
            throw BundleIoError(BundleIoError::Code::duplicate_id,
                                "duplicate model id '" + model.id.str() + "'");
        }
        auto claim = [&](const Identifier& id) {
            if (!instance_ids.insert(id).second) {
                throw BundleIoError(BundleIoError::Code::duplicate_id,
                                    "duplicate instance id '" + id.str() + "'");
            }
        };
        for (const auto& instance : model.class_instances) claim(instance.id);
        for (const auto& instance : model.relationclass_instances) claim(instance.id);
        for (const auto& instance : model.port_instances) claim(instance.id);
    }
}

}  // namespace

std::string serialize_bundle(const Bundle& bundle) {
    json assets = json::object();
    for (const auto& [id, entry] : bundle.assets) {
        assets[id.str()] = {{"kind", to_string(entry.kind)}, {"uri", entry.uri}};
    }

    json models = json::array();
    std::vector<const Model*> ordered;
    ordered.reserve(bundle.models.size());
    for (const auto& model : bundle.models) ordered.push_back(&model);
    std::sort(ordered.begin(), ordered.end(),
              [](const Model* a, const Model* b) { return a->id < b->id; });
    for (const Model* model : ordered) models.push_back(encode_model(*model));

    const json document = {{"assets", std::move(assets)},
                           {"format", bundle_format_tag},
                           {"metamodel", bundle.metamodel_name},
                           {"models", std::move(models)},
                           {"version", bundle.format_version}};
    return document.dump(2) + "\n";
}

Bundle parse_bundle(const std::string& document) {
    check_nesting_depth(document);
    json root;
    try {
        root = json::parse(document);
    } catch (const json::exception& e) {
        malformed(std::string("not valid JSON: ") + e.what());
    }
    if (!root.is_object()) malformed("top level must be an object");
    reject_unknown_keys(root, {"assets", "format", "metamodel", "models", "version"}, "document");

    const std::string format =
        expect_string(expect_member(root, "format", "document"), "format");
    if (format != bundle_format_tag) {
        malformed("format tag is '" + format + "', expected '" + bundle_format_tag + "'");
    }
    const std::string version =
        expect_string(expect_member(root, "version", "document"), "version");
    if (version != bundle_format_version) {
        throw BundleIoError(BundleIoError::Code::unsupported_version,
                            "version '" + version + "' is not supported (expected '" +
                                std::string(bundle_format_version) + "')");
    }

    Bundle bundle;
    bundle.format_version = version;
    bundle.metamodel_name =
        expect_string(expect_member(root, "metamodel", "document"), "metamodel");

    const json& assets = expect_member(root, "assets", "document");
    if (!assets.is_object()) malformed("assets: expected an object");
    for (const auto& [id, record] : assets.items()) {
        const std::string where = "assets." + id;
        if (!record.is_object()) malformed(where + ": expected an object");
        reject_unknown_keys(record, {"kind", "uri"}, where);
        const std::string kind = expect_string(expect_member(record, "kind", where), where);
        meta::AssetEntry entry;
        if (kind == "gltf") {
            entry.kind = meta::AssetEntry::Kind::gltf;
        } else if (kind == "image") {
            entry.kind = meta::AssetEntry::Kind::image;
        } else {
            throw BundleIoError(BundleIoError::Code::unknown_value_kind,
                                where + ": asset kind must be gltf or image");
        }
        entry.uri = expect_string(expect_member(record, "uri", where), where + ".uri");
        bundle.assets.emplace(Identifier(id), std::move(entry));
    }

    const json& models = expect_member(root, "models", "document");
    if (!models.is_array()) malformed("models: expected an array");
    for (std::size_t i = 0; i < models.size(); ++i) {
        bundle.models.push_back(parse_model(models[i], i));
    }
    std::sort(bundle.models.begin(), bundle.models.end(),
              [](const Model& a, const Model& b) { return a.id < b.id; });
    check_unique_ids(bundle);
    return bundle;
}

}  // namespace m2ar::io
