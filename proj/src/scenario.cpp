#include "m2ar/scenario.hpp"

#include <cmath>

#include <json.hpp>

#include "json_util.hpp"
#include "m2ar/errors.hpp"

namespace m2ar::engine {

using json = nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& message) { throw ScenarioError(message); }

std::string expect_string(const json& object, const char* key, const std::string& where) {
    auto it = object.find(key);
    if (it == object.end() || !it->is_string()) {
        bad(where + ": missing or non-string '" + key + "'");
    }
    return it->get<std::string>();
}

double expect_time(const json& object, const std::string& where) {
    auto it = object.find("t");
    if (it == object.end() || !it->is_number()) bad(where + ": missing or non-numeric 't'");
    const double t = it->get<double>();
    if (!std::isfinite(t) || t < 0.0) bad(where + ": t must be a finite time >= 0");
    return t;
}

void reject_unknown_keys(const json& object, std::initializer_list<const char*> known,
                         const std::string& where) {
    for (const auto& [key, unused] : object.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) bad(where + ": unknown key '" + key + "'");
    }
}

SimEvent parse_event(const json& record, std::size_t index) {
    const std::string where = "events[" + std::to_string(index) + "]";
    if (!record.is_object()) bad(where + ": expected an object");
    const std::string kind = expect_string(record, "kind", where);
    const double t = expect_time(record, where);
    if (kind == "detect") {
        reject_unknown_keys(record, {"kind", "t", "detectable", "pose"}, where);
        std::optional<scene::Pose> pose;
        if (record.contains("pose")) {
            pose = io::try_parse_pose(record["pose"]);
            if (!pose) bad(where + ".pose: not a valid pose");
        }
        return SimEvent::detect(Identifier(expect_string(record, "detectable", where)), t,
                                std::move(pose));
    }
    if (kind == "click") {
        reject_unknown_keys(record, {"kind", "t", "augmentation"}, where);
        return SimEvent::click(Identifier(expect_string(record, "augmentation", where)), t);
    }
    if (kind == "observer") {
        reject_unknown_keys(record, {"kind", "t", "key", "value"}, where);
        return SimEvent::observe(expect_string(record, "key", where),
                                 expect_string(record, "value", where), t);
    }
    if (kind == "advance") {
        reject_unknown_keys(record, {"kind", "t"}, where);
        return SimEvent::advance(t);
    }
    bad(where + ": unknown event kind '" + kind + "'");
}

}  // namespace

Scenario parse_scenario(const std::string& document) {
    json root;
    try {
        root = json::parse(document);
    } catch (const json::exception& e) {
        bad(std::string("scenario is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) bad("scenario top level must be an object");
    reject_unknown_keys(root, {"events", "stop_t"}, "scenario");

    Scenario scenario;
    auto stop = root.find("stop_t");
    if (stop == root.end() || !stop->is_number()) bad("scenario: missing or non-numeric 'stop_t'");
    scenario.stop_t = stop->get<double>();
    if (!std::isfinite(scenario.stop_t) || scenario.stop_t < 0.0) {
        bad("scenario: stop_t must be a finite time >= 0");
    }

    auto events = root.find("events");
    if (events == root.end() || !events->is_array()) bad("scenario: missing 'events' array");
    double previous = 0.0;
    for (std::size_t i = 0; i < events->size(); ++i) {
        SimEvent event = parse_event((*events)[i], i);
        if (event.t < previous) bad("events[" + std::to_string(i) + "]: timestamps must be non-decreasing");
        if (event.t > scenario.stop_t) bad("events[" + std::to_string(i) + "]: t exceeds stop_t");
        previous = event.t;
        scenario.events.push_back(std::move(event));
    }
    return scenario;
}

std::string serialize_scenario(const Scenario& scenario) {
    json events = json::array();
    for (const SimEvent& event : scenario.events) {
        json record = {{"kind", to_string(event.kind)}, {"t", event.t}};
        switch (event.kind) {
            case SimEvent::Kind::detect:
                record["detectable"] = event.subject.str();
                if (event.pose) record["pose"] = io::encode_pose(*event.pose);
                break;
            case SimEvent::Kind::click:
                record["augmentation"] = event.subject.str();
                break;
            case SimEvent::Kind::observer:
                record["key"] = event.key;
                record["value"] = event.value;
                break;
            case SimEvent::Kind::advance:
                break;
        }
        events.push_back(std::move(record));
    }
    const json document = {{"events", std::move(events)}, {"stop_t", scenario.stop_t}};
    return document.dump(2) + "\n";
}

}  // namespace m2ar::engine
