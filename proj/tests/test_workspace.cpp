#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <random>

#include "m2ar/errors.hpp"
#include "m2ar/fixtures.hpp"
#include "m2ar/workspace.hpp"
#include "support/proc.hpp"
#include "support/random_bundle.hpp"

using namespace m2ar;
using namespace m2ar::testsupport;
namespace fs = std::filesystem;

namespace {

fs::path fresh_root(const std::string& label) {
    const fs::path root = scratch_dir("workspace") / label;
    fs::remove_all(root);
    fs::create_directories(root);
    return root;
}

}  // namespace

TEST_CASE("load_workspace wants an existing directory") {
    const fs::path root = fresh_root("open");
    const io::Workspace workspace = io::load_workspace(root);
    CHECK(workspace.root == root);
    CHECK(fs::is_directory(workspace.assets_dir()));

    try {
        io::load_workspace(root / "missing");
        FAIL("expected BundleIoError");
    } catch (const BundleIoError& error) {
        CHECK(error.code() == BundleIoError::Code::io_failure);
    }

    spit(root / "not-a-dir", "x");
    CHECK_THROWS_AS(io::load_workspace(root / "not-a-dir"), BundleIoError);
}

TEST_CASE("save, list, load round trip") {
    const io::Workspace workspace = io::load_workspace(fresh_root("roundtrip"));
    const meta::Bundle fixture = fixtures::color_brick_bundle();

    io::save_bundle(workspace, "color-brick", fixture);
    CHECK(fs::exists(workspace.root / "color-brick.m2ar.json"));
    CHECK(workspace.bundle_path("color-brick") == workspace.root / "color-brick.m2ar.json");

    std::mt19937 rng(11);
    const meta::Bundle other = random_bundle(rng);
    io::save_bundle(workspace, "other.v2", other);

    CHECK(io::list_bundles(workspace) == std::vector<std::string>{"color-brick", "other.v2"});
    CHECK(io::load_bundle(workspace, "color-brick") == fixture);
    CHECK(io::load_bundle(workspace, "other.v2") == other);

    // Overwrite is allowed and replaces the content.
    io::save_bundle(workspace, "color-brick", other);
    CHECK(io::load_bundle(workspace, "color-brick") == other);
}

TEST_CASE("bundle names are plain file stems") {
    const io::Workspace workspace = io::load_workspace(fresh_root("names"));
    const meta::Bundle fixture = fixtures::color_brick_bundle();
    for (const std::string bad : {"", "a/b", "../up", ".hidden", "sp ace", "semi;colon"}) {
        CAPTURE(bad);
        try {
            io::save_bundle(workspace, bad, fixture);
            FAIL("expected BundleIoError");
        } catch (const BundleIoError& error) {
            CHECK(error.code() == BundleIoError::Code::name_collision);
        }
    }
    // Accepted shapes.
    io::save_bundle(workspace, "A-z.0_9", fixture);
    CHECK(io::load_bundle(workspace, "A-z.0_9") == fixture);
}

TEST_CASE("a directory squatting on the file name is a collision") {
    const io::Workspace workspace = io::load_workspace(fresh_root("squat"));
    fs::create_directories(workspace.root / "taken.m2ar.json");
    try {
        io::save_bundle(workspace, "taken", fixtures::color_brick_bundle());
        FAIL("expected BundleIoError");
    } catch (const BundleIoError& error) {
        CHECK(error.code() == BundleIoError::Code::name_collision);
    }
}

TEST_CASE("loading errors carry distinct codes") {
    const io::Workspace workspace = io::load_workspace(fresh_root("load-errors"));
    try {
        io::load_bundle(workspace, "ghost");
        FAIL("expected BundleIoError");
    } catch (const BundleIoError& error) {
        CHECK(error.code() == BundleIoError::Code::not_found);
    }

    spit(workspace.root / "broken.m2ar.json", "{ nope");
    try {
        io::load_bundle(workspace, "broken");
        FAIL("expected BundleIoError");
    } catch (const BundleIoError& error) {
        CHECK(error.code() == BundleIoError::Code::malformed_document);
    }
}

TEST_CASE("list_bundles ignores foreign files") {
    const io::Workspace workspace = io::load_workspace(fresh_root("listing"));
    CHECK(io::list_bundles(workspace).empty());
    spit(workspace.root / "notes.txt", "x");
    spit(workspace.root / "half.json", "x");
    io::save_bundle(workspace, "real", fixtures::color_brick_bundle());
    CHECK(io::list_bundles(workspace) == std::vector<std::string>{"real"});
}
