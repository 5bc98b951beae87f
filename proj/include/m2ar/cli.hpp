#pragma once

#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>

/// Command implementations behind the m2ar binary. Each takes an option
/// struct plus explicit streams so tests can drive them without a process
/// boundary; the binary wires them to argv and std::cin/cout/cerr.
///
/// Exit codes, uniformly: 0 success (run: workflow completed), 1 validation
/// errors, 2 parse/usage/file errors, 3 internal runtime error, 4 workflow
/// not completed at stop_t.
///
/// Stderr verbosity is controlled by the env var M2AR_LOG
/// (error|warn|info|debug, default warn). Data outputs go to declared paths
/// only; stdout carries human-readable summaries.
namespace m2ar::cli {

struct ValidateOptions {
    std::string bundle_path;
};

/// Prints one line per diagnostic plus a summary; exit 0 iff no errors
/// (warnings allowed).
int cmd_validate(const ValidateOptions& options, std::ostream& out, std::ostream& err);

struct RunOptions {
    std::string bundle_path;
    std::string scenario_path;
    std::optional<std::string> flowscene;      // default: the unique FlowScene
    std::optional<std::string> trace_path;     // JSON Lines out
    std::optional<std::string> snapshot_path;  // final scene JSON out
    std::optional<double> stop_t;              // overrides the scenario's stop_t
};

/// What a run produced; paths are set iff the files were written.
struct RunReport {
    std::optional<std::string> trace_path;
    std::optional<std::string> snapshot_path;
    int exit_status = 0;
    std::chrono::milliseconds duration{0};
};

/// Executes a scenario against a bundle and writes the requested outputs.
/// Exit 0 when the workflow completed, 4 when it is still waiting at stop_t.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err,
            RunReport* report = nullptr);

struct FixtureOptions {
    std::string name;           // "color-brick"
    std::string out_dir = ".";
};

/// Emits the named fixture bundle plus its scenario file into out_dir.
int cmd_fixture(const FixtureOptions& options, std::ostream& out, std::ostream& err);

struct InspectOptions {
    std::string bundle_path;
    std::optional<std::string> model_id;  // detail view of one model
};

/// Prints a model listing (scene types, instance counts, reference health).
int cmd_inspect(const InspectOptions& options, std::ostream& out, std::ostream& err);

struct StepOptions {
    std::string bundle_path;
    std::optional<std::string> flowscene;
};

/// Interactive (line-oriented, pipe-friendly) stepping session. Commands:
///   detect <id> [px py pz qx qy qz qw]   click <id>   observer <key> <value>
///   advance <t>   snapshot [path]   trace [path]   quit
/// Unknown commands print a message and the session continues. Deterministic
/// for a given command sequence.
int cmd_step(const StepOptions& options, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace m2ar::cli
