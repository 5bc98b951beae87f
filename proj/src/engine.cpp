#include "m2ar/engine.hpp"

#include <algorithm>
#include <cstdio>
#include <tuple>

#include "json_util.hpp"
#include "m2ar/arwfml.hpp"

namespace m2ar::engine {

namespace n = arwfml::names;

const char* to_string(SimEvent::Kind kind) {
    switch (kind) {
        case SimEvent::Kind::detect: return "detect";
        case SimEvent::Kind::click: return "click";
        case SimEvent::Kind::observer: return "observer";
        case SimEvent::Kind::advance: return "advance";
    }
    return "advance";
}

const char* to_string(TraceKind kind) {
    switch (kind) {
        case TraceKind::origin_detected: return "origin_detected";
        case TraceKind::condition_satisfied: return "condition_satisfied";
        case TraceKind::statechange_applied: return "statechange_applied";
        case TraceKind::resolve_applied: return "resolve_applied";
        case TraceKind::end_reached: return "end_reached";
        case TraceKind::workflow_completed: return "workflow_completed";
        case TraceKind::event_ignored: return "event_ignored";
    }
    return "event_ignored";
}

const char* to_string(Phase phase) {
    switch (phase) {
        case Phase::Loaded: return "Loaded";
        case Phase::AwaitOrigin: return "AwaitOrigin";
        case Phase::Running: return "Running";
        case Phase::Completed: return "Completed";
        case Phase::Failed: return "Failed";
    }
    return "Failed";
}

namespace {

Identifier make_token_id(std::uint64_t number) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "tok-%06llu",
                  static_cast<unsigned long long>(number));
    return Identifier(buffer);
}

void emit(EngineState& state, TraceKind kind, Identifier subject, std::string details) {
    state.trace.push_back(
        {state.next_seq++, state.clock, kind, std::move(subject), std::move(details)});
}

const meta::ClassInstance* node_of(const RunContext& context, const Identifier& id) {
    auto it = context.flow_nodes.find(id);
    return it == context.flow_nodes.end() ? nullptr : it->second;
}

void spawn_successors(EngineState& state, const Identifier& node, std::vector<Token>& spawned) {
    const RunContext& context = *state.context;
    auto edges = context.flow_successors.find(node);
    if (edges == context.flow_successors.end()) return;
    for (const Identifier& target : edges->second) {
        Token token;
        token.id = make_token_id(state.next_token_number++);
        token.at_node = target;
        const meta::ClassInstance* instance = node_of(context, target);
        if (instance != nullptr && instance->metaclass == n::condition) {
            token.armed_at = state.clock;  // the condition arms on arrival
        }
        spawned.push_back(std::move(token));
    }
}

// Matches pending clicks to armed click-conditions for one pass. A click
// satisfies at most one condition; contested clicks go to the lowest
// condition instance id (then lowest token id). The click is only spent
// when its condition actually fires.
std::map<Identifier, std::size_t> grant_clicks(const EngineState& state) {
    struct Candidate {
        Identifier condition;
        Identifier token;
        Identifier augmentation;
        double armed_at;
    };
    std::vector<Candidate> candidates;
    for (const Token& token : state.tokens) {
        const meta::ClassInstance* node = node_of(*state.context, token.at_node);
        if (node == nullptr || node->metaclass != n::condition) continue;
        if (state.disabled_conditions.count(token.at_node) > 0) continue;
        const auto kind = arwfml::text_attr(*node, n::attr_kind);
        if (!kind || *kind != n::kind_click) continue;
        const meta::InstanceRef* observes = arwfml::ref_attr(*node, n::attr_observes);
        if (observes == nullptr) continue;
        candidates.push_back(
            {token.at_node, token.id, observes->instance_id, token.armed_at.value_or(0.0)});
    }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        return std::tie(a.condition, a.token) < std::tie(b.condition, b.token);
    });

    std::map<Identifier, std::size_t> grants;  // token id -> pending click index
    std::vector<bool> taken(state.pending_clicks.size(), false);
    for (const Candidate& candidate : candidates) {
        for (std::size_t i = 0; i < state.pending_clicks.size(); ++i) {
            const PendingClick& click = state.pending_clicks[i];
            if (click.consumed || taken[i]) continue;
            if (click.augmentation != candidate.augmentation) continue;
            if (click.t < candidate.armed_at) continue;  // stale tap from before arming
            grants[candidate.token] = i;
            taken[i] = true;
            break;
        }
    }
    return grants;
}

bool condition_satisfied(const EngineState& state, const meta::ClassInstance& condition,
                         const Token& token, bool click_granted) {
    const auto kind = arwfml::text_attr(condition, n::attr_kind);
    if (!kind) return false;
    if (*kind == n::kind_timer) {
        const auto duration = arwfml::number_attr(condition, n::attr_duration_s);
        return duration && token.armed_at && state.clock >= *token.armed_at + *duration;
    }
    if (*kind == n::kind_click) return click_granted;
    if (*kind == n::kind_detection) {
        const meta::InstanceRef* observes = arwfml::ref_attr(condition, n::attr_observes);
        if (observes == nullptr) return false;
        auto it = state.scene.detectables.find(observes->instance_id);
        return it != state.scene.detectables.end() && it->second.detected;
    }
    if (*kind == n::kind_observer) {
        std::optional<std::string> key = arwfml::text_attr(condition, n::attr_observer_key);
        if (!key) {
            // borrow the key from a linked Observer node, lowest id first
            auto links = state.context->observer_links.find(condition.id);
            if (links != state.context->observer_links.end()) {
                const meta::Model* flow_scene = state.context->flow_scene();
                for (const Identifier& observer_id : links->second) {
                    const meta::ClassInstance* observer =
                        flow_scene == nullptr ? nullptr
                                              : flow_scene->find_class_instance(observer_id);
                    if (observer == nullptr) continue;
                    if (auto observer_key = arwfml::text_attr(*observer, n::attr_key)) {
                        key = observer_key;
                        break;
                    }
                }
            }
        }
        if (!key) return false;
        auto stored = state.observer_values.find(*key);
        if (stored == state.observer_values.end()) return false;
        const auto expected = arwfml::text_attr(condition, n::attr_observer_value);
        return !expected || *expected == stored->second;
    }
    return false;
}

// A flow cycle of nodes that always fire (StatechangeRef/Resolve loops)
// would spin forever; past this many firings in one call the run is declared
// failed instead.
constexpr std::uint64_t firing_budget = 100000;

}  // namespace

EngineState fire_ready(EngineState state) {
    if (state.phase != Phase::Running) return state;
    const RunContext& context = *state.context;
    std::uint64_t firings = 0;
    bool progress = true;
    while (progress) {
        progress = false;
        const auto grants = grant_clicks(state);
        std::vector<Token> current = std::move(state.tokens);
        state.tokens.clear();
        std::vector<Token> waiting;
        std::vector<Token> spawned;  // processed next pass; ids exceed all current ones
        for (Token& token : current) {
            const meta::ClassInstance* node = node_of(context, token.at_node);
            if (node == nullptr) {
                progress = true;  // dangling node (unvalidated input): drop the token
                continue;
            }
            const std::string& metaclass = node->metaclass;
            if (metaclass == n::start) {
                spawn_successors(state, token.at_node, spawned);
                progress = true;
            } else if (metaclass == n::condition) {
                if (state.disabled_conditions.count(token.at_node) > 0) {
                    progress = true;  // resolved away; the token is dropped
                    continue;
                }
                const auto grant = grants.find(token.id);
                if (condition_satisfied(state, *node, token, grant != grants.end())) {
                    if (grant != grants.end()) {
                        state.pending_clicks[grant->second].consumed = true;
                    }
                    emit(state, TraceKind::condition_satisfied, token.at_node,
                         arwfml::text_attr(*node, n::attr_kind).value_or(""));
                    spawn_successors(state, token.at_node, spawned);
                    progress = true;
                    ++firings;
                } else {
                    waiting.push_back(std::move(token));
                }
            } else if (metaclass == n::statechange_ref) {
                const meta::InstanceRef* ref =
                    arwfml::ref_attr(*node, n::attr_statechange_model);
                const meta::Model* statechange =
                    ref == nullptr ? nullptr : context.bundle.find_model(ref->model_id);
                if (statechange != nullptr) {
                    state.scene =
                        scene::apply_statechange(std::move(state.scene), *statechange);
                    emit(state, TraceKind::statechange_applied, token.at_node,
                         ref->model_id.str());
                }
                spawn_successors(state, token.at_node, spawned);
                progress = true;
                ++firings;
            } else if (metaclass == n::resolve) {
                const meta::InstanceRef* ref = arwfml::ref_attr(*node, n::attr_resolves);
                std::string details;
                if (ref != nullptr) {
                    state.disabled_conditions.insert(ref->instance_id);
                    details = ref->instance_id.str();
                }
                emit(state, TraceKind::resolve_applied, token.at_node, std::move(details));
                spawn_successors(state, token.at_node, spawned);
                progress = true;
                ++firings;
            } else if (metaclass == n::end) {
                emit(state, TraceKind::end_reached, token.at_node, "");
                progress = true;
            } else {
                progress = true;  // not a flow node (unvalidated input): drop
            }
        }
        state.tokens = std::move(waiting);
        state.tokens.insert(state.tokens.end(), std::make_move_iterator(spawned.begin()),
                            std::make_move_iterator(spawned.end()));
        if (firings > firing_budget) {
            state.phase = Phase::Failed;
            return state;
        }
    }
    if (state.tokens.empty()) {
        state.phase = Phase::Completed;
        emit(state, TraceKind::workflow_completed, context.flow_scene_id, "");
    }
    return state;
}

EngineState inject(EngineState state, const SimEvent& event) {
    if (!state.context) throw std::logic_error("inject on a state that was never loaded");
    if (event.t < state.clock) {
        throw EngineError(EngineError::Code::time_regression,
                          "event at t=" + std::to_string(event.t) +
                              " precedes the clock at t=" + std::to_string(state.clock));
    }
    if (state.phase == Phase::Completed || state.phase == Phase::Failed) {
        state.clock = event.t;
        emit(state, TraceKind::event_ignored, event.subject, to_string(event.kind));
        return state;
    }
    state.clock = event.t;

    if (state.phase == Phase::Loaded || state.phase == Phase::AwaitOrigin) {
        // Nothing but the origin detection has any effect yet.
        if (event.kind == SimEvent::Kind::detect &&
            event.subject == state.context->origin_detectable_id) {
            const scene::Pose frame = event.pose.value_or(scene::identity_pose());
            state.scene.origin_frame = frame;
            state.scene.detectables[event.subject] = {true, frame};
            emit(state, TraceKind::origin_detected, event.subject, "");
            state.phase = Phase::Running;
            return fire_ready(std::move(state));
        }
        return state;
    }

    switch (event.kind) {
        case SimEvent::Kind::detect: {
            // Level-triggered: the detectable stays detected. The origin
            // frame is pinned at the first origin detection and never
            // re-based mid-run.
            auto it = state.scene.detectables.find(event.subject);
            if (it != state.scene.detectables.end()) {
                it->second.detected = true;
                it->second.world_pose = event.pose.value_or(scene::identity_pose());
            }
            break;
        }
        case SimEvent::Kind::click:
            state.pending_clicks.push_back({event.t, event.subject, false});
            break;
        case SimEvent::Kind::observer:
            state.observer_values[event.key] = event.value;
            break;
        case SimEvent::Kind::advance:
            break;
    }
    return fire_ready(std::move(state));
}

EngineState load(const meta::Bundle& bundle, const std::optional<Identifier>& flow_scene_id) {
    DiagnosticList diagnostics = arwfml::validate(bundle);
    if (has_errors(diagnostics)) {
        std::size_t errors = 0;
        for (const auto& d : diagnostics) {
            if (d.severity == Severity::error) ++errors;
        }
        throw EngineError(EngineError::Code::validation_failed,
                          "bundle fails validation with " + std::to_string(errors) + " error(s)",
                          std::move(diagnostics));
    }

    std::vector<const meta::Model*> flow_scenes;
    for (const auto& model : bundle.models) {
        if (model.scene_type == n::flow_scene) flow_scenes.push_back(&model);
    }
    const meta::Model* chosen = nullptr;
    if (flow_scene_id) {
        for (const meta::Model* model : flow_scenes) {
            if (model->id == *flow_scene_id) chosen = model;
        }
        if (chosen == nullptr) {
            throw EngineError(EngineError::Code::no_flow_scene,
                              "no FlowScene model '" + flow_scene_id->str() + "' in the bundle");
        }
    } else if (flow_scenes.empty()) {
        throw EngineError(EngineError::Code::no_flow_scene,
                          "the bundle contains no FlowScene model");
    } else if (flow_scenes.size() > 1) {
        throw EngineError(EngineError::Code::ambiguous_flow_scene,
                          "the bundle contains " + std::to_string(flow_scenes.size()) +
                              " FlowScene models; select one by id");
    } else {
        chosen = flow_scenes.front();
    }

    std::vector<const meta::ClassInstance*> object_space_refs;
    for (const auto& instance : chosen->class_instances) {
        if (instance.metaclass == n::object_space_ref) object_space_refs.push_back(&instance);
    }
    if (object_space_refs.empty()) {
        throw EngineError(EngineError::Code::no_object_space,
                          "FlowScene '" + chosen->id.str() + "' references no ObjectSpace");
    }
    if (object_space_refs.size() > 1) {
        throw EngineError(EngineError::Code::ambiguous_object_space,
                          "FlowScene '" + chosen->id.str() + "' references " +
                              std::to_string(object_space_refs.size()) +
                              " ObjectSpaces; exactly one is executable");
    }
    const meta::InstanceRef* object_space_ref =
        arwfml::ref_attr(*object_space_refs.front(), n::attr_objectspace);
    if (object_space_ref == nullptr || bundle.find_model(object_space_ref->model_id) == nullptr) {
        throw std::logic_error("validated FlowScene lost its ObjectSpace reference");
    }

    // V003 guarantees the Origin port and its target; recover them.
    const meta::PortInstance* origin_port = nullptr;
    for (const auto& port : chosen->port_instances) {
        if (port.owner == object_space_refs.front()->id && port.port == n::port_origin) {
            origin_port = &port;
        }
    }
    if (origin_port == nullptr || !origin_port->target) {
        throw std::logic_error("validated FlowScene lacks an Origin port target");
    }

    auto context = std::make_shared<RunContext>();
    context->bundle = bundle;
    context->flow_scene_id = chosen->id;
    context->object_space_id = object_space_ref->model_id;
    context->origin_detectable_id = origin_port->target->instance_id;

    const meta::Model* flow_scene = context->bundle.find_model(context->flow_scene_id);
    const meta::ClassInstance* start = nullptr;
    for (const auto& instance : flow_scene->class_instances) {
        context->flow_nodes.emplace(instance.id, &instance);
        if (instance.metaclass == n::start && (start == nullptr || instance.id < start->id)) {
            start = &instance;
        }
    }
    if (start == nullptr) throw std::logic_error("validated FlowScene lacks a Start");
    context->start_id = start->id;

    std::vector<const meta::RelationclassInstance*> flow_edges;
    for (const auto& relation : flow_scene->relationclass_instances) {
        if (relation.relationclass == n::flow) flow_edges.push_back(&relation);
        if (relation.relationclass == n::observes_link) {
            context->observer_links[relation.to_instance].push_back(relation.from_instance);
        }
    }
    std::sort(flow_edges.begin(), flow_edges.end(),
              [](const auto* a, const auto* b) { return a->id < b->id; });
    for (const auto* edge : flow_edges) {
        context->flow_successors[edge->from_instance].push_back(edge->to_instance);
    }
    for (auto& [condition, observers] : context->observer_links) {
        std::sort(observers.begin(), observers.end());
    }

    EngineState state;
    state.context = context;
    state.phase = Phase::AwaitOrigin;
    state.scene = scene::initial_scene_state(*context->object_space());
    Token initial;
    initial.id = make_token_id(state.next_token_number++);
    initial.at_node = context->start_id;
    state.tokens.push_back(std::move(initial));
    return state;
}

SceneSnapshot snapshot(const EngineState& state) {
    SceneSnapshot result;
    if (!state.context) return result;
    const meta::Model* object_space = state.context->object_space();
    for (const auto& [id, augmentation] : state.scene.augmentations) {
        result[id] = {augmentation.visible,
                      scene::try_world_pose(state.scene, *object_space, id)};
    }
    return result;
}

std::string serialize_trace(const Trace& trace) {
    std::string out;
    for (const TraceRecord& record : trace) {
        const nlohmann::json line = {{"details", record.details},
                                     {"kind", to_string(record.kind)},
                                     {"seq", record.seq},
                                     {"subject", record.subject.str()},
                                     {"t", record.t}};
        out += line.dump();
        out += '\n';
    }
    return out;
}

std::string serialize_snapshot(const SceneSnapshot& snapshot) {
    nlohmann::json body = nlohmann::json::object();
    for (const auto& [id, entry] : snapshot) {
        nlohmann::json record = {{"visible", entry.visible}};
        if (entry.world_pose) record["world_pose"] = io::encode_pose(*entry.world_pose);
        body[id.str()] = std::move(record);
    }
    return body.dump(2) + "\n";
}

RunResult run(const meta::Bundle& bundle, const std::vector<SimEvent>& events, double stop_t,
              const std::optional<Identifier>& flow_scene_id) {
    EngineState state = load(bundle, flow_scene_id);
    for (const SimEvent& event : events) state = inject(std::move(state), event);
    if (state.phase == Phase::AwaitOrigin || state.phase == Phase::Running) {
        state = inject(std::move(state), SimEvent::advance(stop_t));
    }
    RunResult result;
    result.final_scene = snapshot(state);
    result.final_phase = state.phase;
    result.trace = std::move(state.trace);
    return result;
}

}  // namespace m2ar::engine
