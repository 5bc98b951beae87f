#include "m2ar/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "m2ar/arwfml.hpp"
#include "m2ar/bundle_json.hpp"
#include "m2ar/diagnostics.hpp"
#include "m2ar/engine.hpp"
#include "m2ar/errors.hpp"
#include "m2ar/fixtures.hpp"
#include "m2ar/scenario.hpp"

namespace m2ar::cli {
namespace {

// --------------------------------------------------------------------------
// Logging (stderr only; data outputs never pass through here)
// --------------------------------------------------------------------------

enum : int { log_error = 0, log_warn = 1, log_info = 2, log_debug = 3 };

int configured_log_level() {
    const char* env = std::getenv("M2AR_LOG");
    if (env == nullptr) return log_warn;
    const std::string value = env;
    if (value == "error") return log_error;
    if (value == "warn") return log_warn;
    if (value == "info") return log_info;
    if (value == "debug") return log_debug;
    return log_warn;
}

void log_line(std::ostream& err, int level, const char* tag, const std::string& message) {
    if (level <= configured_log_level()) err << '[' << tag << "] " << message << '\n';
}

// --------------------------------------------------------------------------
// File helpers
// --------------------------------------------------------------------------

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw BundleIoError(BundleIoError::Code::io_failure, "cannot read file: " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) {
        throw BundleIoError(BundleIoError::Code::io_failure, "read failed: " + path);
    }
    return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw BundleIoError(BundleIoError::Code::io_failure, "cannot write file: " + path);
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
        throw BundleIoError(BundleIoError::Code::io_failure, "write failed: " + path);
    }
}

// --------------------------------------------------------------------------
// Exit-code mapping
// --------------------------------------------------------------------------

// Runs a command body and maps every escaping error onto the exit-code
// contract: 1 validation, 2 parse/usage/file, 3 internal.
template <typename Fn>
int guarded(std::ostream& out, std::ostream& err, Fn&& body) {
    try {
        return body();
    } catch (const engine::EngineError& error) {
        if (error.code() == engine::EngineError::Code::validation_failed) {
            for (const Diagnostic& diagnostic : error.diagnostics()) {
                out << format_diagnostic(diagnostic) << '\n';
            }
            err << "error: " << error.what() << '\n';
            return 1;
        }
        err << "error: " << error.what() << '\n';
        return 2;
    } catch (const BundleIoError& error) {
        err << "error: " << error.what() << '\n';
        return 2;
    } catch (const ScenarioError& error) {
        err << "error: " << error.what() << '\n';
        return 2;
    } catch (const std::exception& error) {
        err << "internal error: " << error.what() << '\n';
        return 3;
    }
}

std::vector<std::string> split_words(const std::string& line) {
    std::istringstream stream(line);
    std::vector<std::string> words;
    std::string word;
    while (stream >> word) words.push_back(word);
    return words;
}

std::optional<double> parse_double(const std::string& text) {
    try {
        std::size_t consumed = 0;
        const double value = std::stod(text, &consumed);
        if (consumed != text.size() || !std::isfinite(value)) return std::nullopt;
        return value;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::optional<Identifier> to_identifier(const std::optional<std::string>& text) {
    if (!text) return std::nullopt;
    return Identifier(*text);
}

}  // namespace

// --------------------------------------------------------------------------
// validate
// --------------------------------------------------------------------------

int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(out, err, [&]() -> int {
        const meta::Bundle bundle = io::parse_bundle(read_file(options.bundle_path));
        log_line(err, log_info, "info", "loaded bundle: " + options.bundle_path);
        const DiagnosticList diagnostics = arwfml::validate(bundle);
        std::size_t errors = 0;
        std::size_t warnings = 0;
        for (const Diagnostic& diagnostic : diagnostics) {
            out << format_diagnostic(diagnostic) << '\n';
            if (diagnostic.severity == Severity::error) {
                ++errors;
            } else {
                ++warnings;
            }
        }
        out << "validation: " << errors << " error(s), " << warnings << " warning(s)\n";
        return errors == 0 ? 0 : 1;
    });
}

// --------------------------------------------------------------------------
// run
// --------------------------------------------------------------------------

int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err, RunReport* report) {
    const auto started = std::chrono::steady_clock::now();
    const int status = guarded(out, err, [&]() -> int {
        const meta::Bundle bundle = io::parse_bundle(read_file(options.bundle_path));
        const engine::Scenario scenario = engine::parse_scenario(read_file(options.scenario_path));
        const double stop_t = options.stop_t.value_or(scenario.stop_t);
        // --stop-t is a preemption point: scenario events past it never happen.
        std::vector<engine::SimEvent> events;
        for (const engine::SimEvent& event : scenario.events) {
            if (event.t <= stop_t) events.push_back(event);
        }
        log_line(err, log_info, "info",
                 "running " + std::to_string(events.size()) + " event(s) to t=" +
                     std::to_string(stop_t));
        const engine::RunResult result =
            engine::run(bundle, events, stop_t, to_identifier(options.flowscene));
        if (options.trace_path) {
            write_file(*options.trace_path, engine::serialize_trace(result.trace));
            log_line(err, log_info, "info", "trace written: " + *options.trace_path);
            if (report != nullptr) report->trace_path = options.trace_path;
        }
        if (options.snapshot_path) {
            write_file(*options.snapshot_path, engine::serialize_snapshot(result.final_scene));
            log_line(err, log_info, "info", "snapshot written: " + *options.snapshot_path);
            if (report != nullptr) report->snapshot_path = options.snapshot_path;
        }
        out << "phase: " << engine::to_string(result.final_phase) << '\n';
        out << "trace: " << result.trace.size() << " record(s)\n";
        return result.final_phase == engine::Phase::Completed ? 0 : 4;
    });
    if (report != nullptr) {
        report->exit_status = status;
        report->duration = std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::steady_clock::now() - started);
    }
    return status;
}

// --------------------------------------------------------------------------
// fixture
// --------------------------------------------------------------------------

int cmd_fixture(const FixtureOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(out, err, [&]() -> int {
        if (options.name != "color-brick") {
            err << "error: unknown fixture: " << options.name << '\n';
            return 2;
        }
        std::error_code ec;
        std::filesystem::create_directories(options.out_dir, ec);
        if (ec) {
            throw BundleIoError(BundleIoError::Code::io_failure,
                                "cannot create directory: " + options.out_dir);
        }
        const std::filesystem::path base(options.out_dir);
        const std::string bundle_file =
            (base / (options.name + std::string(io::bundle_extension))).string();
        const std::string scenario_file = (base / (options.name + ".scenario.json")).string();
        write_file(bundle_file, io::serialize_bundle(fixtures::color_brick_bundle()));
        write_file(scenario_file, engine::serialize_scenario(fixtures::color_brick_scenario()));
        out << "wrote " << bundle_file << '\n';
        out << "wrote " << scenario_file << '\n';
        return 0;
    });
}

// --------------------------------------------------------------------------
// inspect
// --------------------------------------------------------------------------

namespace {

void inspect_model(const meta::Model& model, std::ostream& out) {
    out << "model " << model.id.str() << '\n';
    out << "  name: " << model.name << '\n';
    out << "  scene_type: " << model.scene_type << '\n';
    out << "  classes: " << model.class_instances.size() << '\n';
    for (const meta::ClassInstance& instance : model.class_instances) {
        out << "    " << instance.id.str() << " (" << instance.metaclass << ")";
        if (!instance.display_name.empty()) out << " \"" << instance.display_name << "\"";
        out << '\n';
    }
    out << "  relations: " << model.relationclass_instances.size() << '\n';
    for (const meta::RelationclassInstance& relation : model.relationclass_instances) {
        out << "    " << relation.id.str() << " (" << relation.relationclass << ") "
            << relation.from_instance.str() << " -> " << relation.to_instance.str() << '\n';
    }
    out << "  ports: " << model.port_instances.size() << '\n';
    for (const meta::PortInstance& port : model.port_instances) {
        out << "    " << port.id.str() << " (" << port.port << ") owner="
            << port.owner.str();
        if (port.target) {
            out << " target=" << port.target->model_id.str();
            if (!port.target->instance_id.empty()) out << "/" << port.target->instance_id.str();
        }
        out << '\n';
    }
}

}  // namespace

int cmd_inspect(const InspectOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(out, err, [&]() -> int {
        const meta::Bundle bundle = io::parse_bundle(read_file(options.bundle_path));
        if (options.model_id) {
            const meta::Model* model = bundle.find_model(Identifier(*options.model_id));
            if (model == nullptr) {
                err << "error: unknown model id: " << *options.model_id << '\n';
                return 2;
            }
            inspect_model(*model, out);
            return 0;
        }
        out << bundle.models.size() << " models\n";
        std::size_t resolved = 0;
        std::size_t unresolved = 0;
        for (const meta::Model& model : bundle.models) {
            out << "  " << model.id.str() << " (" << model.scene_type << ") \"" << model.name
                << "\" classes=" << model.class_instances.size()
                << " relations=" << model.relationclass_instances.size()
                << " ports=" << model.port_instances.size() << '\n';
            for (const meta::ClassInstance& instance : model.class_instances) {
                for (const auto& [name, value] : instance.attributes) {
                    if (value.kind() != meta::ValueKind::instance_ref) continue;
                    if (meta::try_resolve(bundle, value.as_ref())) {
                        ++resolved;
                    } else {
                        ++unresolved;
                    }
                }
            }
            for (const meta::PortInstance& port : model.port_instances) {
                if (!port.target) continue;
                if (meta::try_resolve(bundle, *port.target)) {
                    ++resolved;
                } else {
                    ++unresolved;
                }
            }
        }
        out << "references: " << resolved << " resolved, " << unresolved << " unresolved\n";
        out << "assets: " << bundle.assets.size() << '\n';
        return 0;
    });
}

// --------------------------------------------------------------------------
// step
// --------------------------------------------------------------------------

int cmd_step(const StepOptions& options, std::istream& in, std::ostream& out, std::ostream& err) {
    return guarded(out, err, [&]() -> int {
        const meta::Bundle bundle = io::parse_bundle(read_file(options.bundle_path));
        engine::EngineState state = engine::load(bundle, to_identifier(options.flowscene));
        out << "phase: " << engine::to_string(state.phase) << '\n';

        const auto inject_checked = [&](const engine::SimEvent& event) {
            try {
                state = engine::inject(std::move(state), event);
                out << "phase: " << engine::to_string(state.phase) << '\n';
            } catch (const engine::EngineError& error) {
                err << "error: " << error.what() << '\n';
            }
        };

        std::string line;
        while (std::getline(in, line)) {
            const std::vector<std::string> words = split_words(line);
            if (words.empty()) continue;
            const std::string& command = words[0];

            if (command == "quit") break;

            if (command == "detect") {
                if (words.size() == 2) {
                    log_line(err, log_debug, "debug", "inject detect " + words[1]);
                    inject_checked(engine::SimEvent::detect(Identifier(words[1]), state.clock));
                    continue;
                }
                if (words.size() == 9) {
                    double numbers[7];
                    bool ok = true;
                    for (int i = 0; i < 7; ++i) {
                        const std::optional<double> parsed = parse_double(words[2 + i]);
                        if (!parsed) {
                            ok = false;
                            break;
                        }
                        numbers[i] = *parsed;
                    }
                    if (ok) {
                        scene::Pose pose;
                        pose.position = scene::Vec3{numbers[0], numbers[1], numbers[2]};
                        pose.rotation =
                            scene::Quat{numbers[3], numbers[4], numbers[5], numbers[6]};
                        pose.scale = scene::Vec3{1.0, 1.0, 1.0};
                        log_line(err, log_debug, "debug", "inject detect " + words[1]);
                        inject_checked(
                            engine::SimEvent::detect(Identifier(words[1]), state.clock, pose));
                        continue;
                    }
                }
                err << "usage: detect <id> [px py pz qx qy qz qw]\n";
                continue;
            }

            if (command == "click") {
                if (words.size() != 2) {
                    err << "usage: click <id>\n";
                    continue;
                }
                log_line(err, log_debug, "debug", "inject click " + words[1]);
                inject_checked(engine::SimEvent::click(Identifier(words[1]), state.clock));
                continue;
            }

            if (command == "observer") {
                if (words.size() != 3) {
                    err << "usage: observer <key> <value>\n";
                    continue;
                }
                log_line(err, log_debug, "debug", "inject observer " + words[1]);
                inject_checked(engine::SimEvent::observe(words[1], words[2], state.clock));
                continue;
            }

            if (command == "advance") {
                const std::optional<double> t =
                    words.size() == 2 ? parse_double(words[1]) : std::nullopt;
                if (!t) {
                    err << "usage: advance <t>\n";
                    continue;
                }
                log_line(err, log_debug, "debug", "inject advance " + words[1]);
                inject_checked(engine::SimEvent::advance(*t));
                continue;
            }

            if (command == "snapshot") {
                const std::string text = engine::serialize_snapshot(engine::snapshot(state));
                if (words.size() >= 2) {
                    write_file(words[1], text);
                    out << "wrote " << words[1] << '\n';
                } else {
                    out << text;
                }
                continue;
            }

            if (command == "trace") {
                const std::string text = engine::serialize_trace(state.trace);
                if (words.size() >= 2) {
                    write_file(words[1], text);
                    out << "wrote " << words[1] << '\n';
                } else {
                    out << text;
                }
                continue;
            }

            err << "unknown command: " << command << '\n';
        }
        return 0;
    });
}

}  // namespace m2ar::cli
