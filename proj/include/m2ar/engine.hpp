#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "m2ar/diagnostics.hpp"
#include "m2ar/meta.hpp"
#include "m2ar/scene.hpp"

/// Deterministic FlowScene interpreter. Execution is a pure fold over an
/// event stream: load() builds the initial state, inject() folds one event
/// in, and every observable step lands in the trace. Identical inputs yield
/// byte-identical serialized traces, on any platform.
namespace m2ar::engine {

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

/// One timestamped input: a marker detection, a tap on an augmentation, an
/// external observer signal, or a bare clock advance.
struct SimEvent {
    enum class Kind : std::uint8_t { detect, click, observer, advance };

    Kind kind = Kind::advance;
    double t = 0.0;
    Identifier subject;                // detect: detectable id; click: augmentation id
    std::optional<scene::Pose> pose;   // detect only; identity when omitted
    std::string key;                   // observer only
    std::string value;                 // observer only

    static SimEvent detect(Identifier detectable, double t,
                           std::optional<scene::Pose> pose = std::nullopt) {
        SimEvent e;
        e.kind = Kind::detect;
        e.t = t;
        e.subject = std::move(detectable);
        e.pose = std::move(pose);
        return e;
    }
    static SimEvent click(Identifier augmentation, double t) {
        SimEvent e;
        e.kind = Kind::click;
        e.t = t;
        e.subject = std::move(augmentation);
        return e;
    }
    static SimEvent observe(std::string key, std::string value, double t) {
        SimEvent e;
        e.kind = Kind::observer;
        e.t = t;
        e.key = std::move(key);
        e.value = std::move(value);
        return e;
    }
    static SimEvent advance(double t) {
        SimEvent e;
        e.t = t;
        return e;
    }

    friend bool operator==(const SimEvent&, const SimEvent&) = default;
};

const char* to_string(SimEvent::Kind kind);

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

enum class TraceKind : std::uint8_t {
    origin_detected,
    condition_satisfied,
    statechange_applied,
    resolve_applied,
    end_reached,
    workflow_completed,
    event_ignored,  // an event arrived in a terminal phase and had no effect
};

const char* to_string(TraceKind kind);

struct TraceRecord {
    std::uint64_t seq = 0;  // strictly increasing from 1
    double t = 0.0;
    TraceKind kind = TraceKind::origin_detected;
    Identifier subject;
    std::string details;

    friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

using Trace = std::vector<TraceRecord>;

/// JSON Lines: one compact record per line, keys in lexicographic order
/// (details, kind, seq, subject, t), LF terminated.
std::string serialize_trace(const Trace& trace);

// ---------------------------------------------------------------------------
// Engine state
// ---------------------------------------------------------------------------

enum class Phase : std::uint8_t { Loaded, AwaitOrigin, Running, Completed, Failed };

const char* to_string(Phase phase);

/// A marker of progress through the FlowScene graph.
struct Token {
    Identifier id;
    Identifier at_node;
    std::optional<double> armed_at;  // set while sitting at a Condition

    friend bool operator==(const Token&, const Token&) = default;
};

/// A tap not yet matched to a click condition. Clicks are edge-triggered:
/// each satisfies at most one condition, then is spent.
struct PendingClick {
    double t = 0.0;
    Identifier augmentation;
    bool consumed = false;

    friend bool operator==(const PendingClick&, const PendingClick&) = default;
};

/// Everything about one execution that never changes after load: the bundle,
/// the chosen FlowScene and its ObjectSpace, and derived lookup tables.
/// Shared (immutably) between the states of one run.
struct RunContext {
    meta::Bundle bundle;
    Identifier flow_scene_id;
    Identifier object_space_id;
    Identifier origin_detectable_id;
    Identifier start_id;
    std::map<Identifier, const meta::ClassInstance*> flow_nodes;  // into this->bundle
    std::map<Identifier, std::vector<Identifier>> flow_successors;  // edge-id order
    std::map<Identifier, std::vector<Identifier>> observer_links;   // condition -> observers

    const meta::Model* flow_scene() const { return bundle.find_model(flow_scene_id); }
    const meta::Model* object_space() const { return bundle.find_model(object_space_id); }
};

/// Value-semantics execution state: inject/fire_ready take a state and
/// return the successor. Copies are cheap to reason about and the shared
/// context never mutates.
struct EngineState {
    std::shared_ptr<const RunContext> context;
    Phase phase = Phase::Loaded;
    double clock = 0.0;
    std::vector<Token> tokens;  // kept sorted by token id
    scene::SceneState scene;
    std::set<Identifier> disabled_conditions;
    Trace trace;
    std::vector<PendingClick> pending_clicks;
    std::map<std::string, std::string> observer_values;
    std::uint64_t next_token_number = 1;
    std::uint64_t next_seq = 1;
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

class EngineError : public std::runtime_error {
public:
    enum class Code {
        validation_failed,
        no_flow_scene,
        ambiguous_flow_scene,
        no_object_space,
        ambiguous_object_space,
        time_regression,
    };

    EngineError(Code code, const std::string& message, DiagnosticList diagnostics = {})
        : std::runtime_error(message), code_(code), diagnostics_(std::move(diagnostics)) {}

    Code code() const { return code_; }
    const DiagnosticList& diagnostics() const { return diagnostics_; }

private:
    Code code_;
    DiagnosticList diagnostics_;  // populated for validation_failed
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Validates the bundle, picks the FlowScene (the unique one unless an id is
/// given) and its single ObjectSpaceRef, and builds the initial state:
/// phase AwaitOrigin, one token parked at Start, scene at its modeled
/// initial appearance.
///
/// Throws EngineError: validation_failed (diagnostics attached),
/// no_flow_scene, ambiguous_flow_scene, no_object_space,
/// ambiguous_object_space.
EngineState load(const meta::Bundle& bundle,
                 const std::optional<Identifier>& flow_scene_id = std::nullopt);

/// Folds one event into the state. The clock advances to event.t
/// (time_regression if it would move backwards). Before the origin is
/// detected only detect(origin) has any effect; in Running the event is
/// recorded as condition-relevant fact and fire_ready runs to quiescence;
/// in a terminal phase the event is ignored and noted in the trace.
EngineState inject(EngineState state, const SimEvent& event);

/// Advances every token that can move, repeatedly, until nothing moves.
/// Processing order within a pass is token-id order; tokens spawned during
/// a pass run in the next one. No-op outside Running. When the last token
/// is consumed the workflow completes.
EngineState fire_ready(EngineState state);

// ---------------------------------------------------------------------------
// Snapshots and whole runs
// ---------------------------------------------------------------------------

struct SnapshotEntry {
    bool visible = false;
    std::optional<scene::Pose> world_pose;  // absent until its frame is grounded

    friend bool operator==(const SnapshotEntry&, const SnapshotEntry&) = default;
};

using SceneSnapshot = std::map<Identifier, SnapshotEntry>;

/// Visibility and world pose of every augmentation of the active ObjectSpace.
SceneSnapshot snapshot(const EngineState& state);

/// Canonical JSON object keyed by augmentation id, two-space indent, LF.
std::string serialize_snapshot(const SceneSnapshot& snapshot);

struct RunResult {
    Trace trace;
    SceneSnapshot final_scene;
    Phase final_phase = Phase::Loaded;
};

/// load + inject each event in order + a final advance to stop_t (skipped
/// when the workflow already terminated). Errors propagate from load and
/// inject.
RunResult run(const meta::Bundle& bundle, const std::vector<SimEvent>& events, double stop_t,
              const std::optional<Identifier>& flow_scene_id = std::nullopt);

}  // namespace m2ar::engine
