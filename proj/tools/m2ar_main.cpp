#include <CLI11.hpp>
#include <iostream>

#include "m2ar/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"m2ar: modeling kernel and FlowScene runner for AR workflow bundles"};
    app.require_subcommand(1);

    m2ar::cli::ValidateOptions validate_options;
    CLI::App* validate =
        app.add_subcommand("validate", "Check a bundle against the language rules");
    validate->add_option("bundle", validate_options.bundle_path, "Bundle file (.m2ar.json)")
        ->required();

    m2ar::cli::RunOptions run_options;
    CLI::App* run = app.add_subcommand("run", "Execute a scenario against a bundle");
    run->add_option("bundle", run_options.bundle_path, "Bundle file (.m2ar.json)")->required();
    run->add_option("--scenario", run_options.scenario_path, "Scenario file (events + stop_t)")
        ->required();
    run->add_option("--flowscene", run_options.flowscene,
                    "FlowScene model id (default: the unique one)");
    run->add_option("--trace", run_options.trace_path, "Write the trace here (JSON Lines)");
    run->add_option("--snapshot", run_options.snapshot_path, "Write the final scene here");
    run->add_option("--stop-t", run_options.stop_t, "Override the scenario's stop time");

    m2ar::cli::FixtureOptions fixture_options;
    CLI::App* fixture =
        app.add_subcommand("fixture", "Write a built-in example bundle and scenario");
    fixture->add_option("name", fixture_options.name, "Fixture name (color-brick)")->required();
    fixture->add_option("--out", fixture_options.out_dir, "Output directory (default: .)");

    m2ar::cli::InspectOptions inspect_options;
    CLI::App* inspect = app.add_subcommand("inspect", "Summarize a bundle's models");
    inspect->add_option("bundle", inspect_options.bundle_path, "Bundle file (.m2ar.json)")
        ->required();
    inspect->add_option("--model", inspect_options.model_id, "Show one model in detail");

    m2ar::cli::StepOptions step_options;
    CLI::App* step = app.add_subcommand("step", "Drive a workflow interactively from stdin");
    step->add_option("bundle", step_options.bundle_path, "Bundle file (.m2ar.json)")->required();
    step->add_option("--flowscene", step_options.flowscene,
                     "FlowScene model id (default: the unique one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (*validate) return m2ar::cli::cmd_validate(validate_options, std::cout, std::cerr);
    if (*run) return m2ar::cli::cmd_run(run_options, std::cout, std::cerr);
    if (*fixture) return m2ar::cli::cmd_fixture(fixture_options, std::cout, std::cerr);
    if (*inspect) return m2ar::cli::cmd_inspect(inspect_options, std::cout, std::cerr);
    if (*step) return m2ar::cli::cmd_step(step_options, std::cin, std::cout, std::cerr);
    return 2;
}
