#pragma once

#include <optional>
#include <string>

#include "m2ar/diagnostics.hpp"
#include "m2ar/meta.hpp"

/// The ARWFML language definition: the fixed metamodel (augmented-reality
/// workflows as ObjectSpace / Statechange / FlowScene models) plus the
/// language-level well-formedness rules V001..V012 that go beyond generic
/// conformance.
namespace m2ar::arwfml {

/// Every name the language defines, in one place, so the validator, the
/// engine, and fixtures can never drift apart on spelling.
namespace names {

inline constexpr const char* metamodel = "ARWFML";
inline constexpr const char* metamodel_version = "1.0";

// scene types
inline constexpr const char* object_space = "ObjectSpace";
inline constexpr const char* statechange = "Statechange";
inline constexpr const char* flow_scene = "FlowScene";

// ObjectSpace metaclasses and relationclasses
inline constexpr const char* augmentation = "Augmentation";
inline constexpr const char* detectable = "Detectable";
inline constexpr const char* child = "child";
inline constexpr const char* anchored = "anchored";
inline constexpr const char* attr_object3d = "object3d";
inline constexpr const char* attr_initially_visible = "initially_visible";
inline constexpr const char* attr_image = "image";
inline constexpr const char* attr_is_origin = "is_origin";

// Statechange metaclass
inline constexpr const char* reference = "Reference";
inline constexpr const char* attr_target = "target";
inline constexpr const char* attr_changes = "changes";

// FlowScene metaclasses, port, and relationclasses
inline constexpr const char* start = "Start";
inline constexpr const char* end = "End";
inline constexpr const char* object_space_ref = "ObjectSpaceRef";
inline constexpr const char* condition = "Condition";
inline constexpr const char* statechange_ref = "StatechangeRef";
inline constexpr const char* resolve = "Resolve";
inline constexpr const char* observer = "Observer";
inline constexpr const char* port_origin = "Origin";
inline constexpr const char* flow = "flow";
inline constexpr const char* observes_link = "observes_link";
inline constexpr const char* attr_objectspace = "objectspace";
inline constexpr const char* attr_kind = "kind";
inline constexpr const char* attr_duration_s = "duration_s";
inline constexpr const char* attr_observes = "observes";
inline constexpr const char* attr_observer_key = "observer_key";
inline constexpr const char* attr_observer_value = "observer_value";
inline constexpr const char* attr_statechange_model = "statechange_model";
inline constexpr const char* attr_resolves = "resolves";
inline constexpr const char* attr_key = "key";

// Condition kinds
inline constexpr const char* kind_timer = "timer";
inline constexpr const char* kind_click = "click";
inline constexpr const char* kind_detection = "detection";
inline constexpr const char* kind_observer = "observer";

}  // namespace names

/// The fixed ARWFML metamodel. Built once through build_metamodel and cached;
/// structurally identical on every call.
const meta::Metamodel& arwfml_metamodel();

/// Checks a bundle against the ARWFML rule catalog.
///
/// Runs generic conformance first: conformance *errors* are returned as-is
/// and every V-rule is skipped (the rules assume a structurally sound
/// bundle); conformance warnings are merged into a full rule run.
///
/// Rules (errors unless stated):
///   V001  FlowScene has exactly one Start and at least one End
///   V002  ObjectSpaceRef.objectspace names a model of scene type ObjectSpace
///   V003  Origin port targets a Detectable with is_origin inside that
///         ObjectSpace; V003w (warning) if several Detectables claim origin
///   V004  StatechangeRef.statechange_model names a Statechange model
///   V005  Reference.target is an Augmentation of the ObjectSpace used by
///         every FlowScene that pulls in that Statechange model
///   V006  Condition kind is known and internally consistent (timer needs a
///         positive duration_s, click observes an Augmentation, detection
///         observes a Detectable, observer needs an observes_link or a key)
///   V007  every Condition/StatechangeRef/Resolve/End is reachable from a
///         Start, and End has no outgoing flow
///   V008  the child graph is acyclic and no Augmentation has two parents
///   V009  Augmentation.object3d names an asset with a non-empty uri;
///         V009w (warning) for a Detectable without an image asset
///   V010  Resolve.resolves targets a Condition in the same FlowScene
///   V011  (warning) bundle defines no FlowScene, so nothing is executable
///   V012  two ObjectSpaceRefs of one FlowScene claim the same origin
///         Detectable
///
/// Diagnostics are sorted by (model id, instance id, code, message).
DiagnosticList validate(const meta::Bundle& bundle);

// ---------------------------------------------------------------------------
// Typed attribute access
// ---------------------------------------------------------------------------
// Tolerant getters used by validator and engine alike: absent attribute or
// wrong payload kind reads as "not there" (conformance reports kind
// mismatches; nothing downstream should crash on them).

std::optional<std::string> text_attr(const meta::ClassInstance& instance, const std::string& name);
std::optional<double> number_attr(const meta::ClassInstance& instance, const std::string& name);
bool boolean_attr(const meta::ClassInstance& instance, const std::string& name, bool fallback);
const meta::InstanceRef* ref_attr(const meta::ClassInstance& instance, const std::string& name);
const meta::AssetRef* asset_attr(const meta::ClassInstance& instance, const std::string& name);
const scene::ChangeList* changes_attr(const meta::ClassInstance& instance,
                                      const std::string& name);

}  // namespace m2ar::arwfml
