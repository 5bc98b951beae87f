#include "m2ar/workspace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "m2ar/bundle_json.hpp"
#include "m2ar/errors.hpp"

namespace m2ar::io {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void io_failure(const std::string& message) {
    throw BundleIoError(BundleIoError::Code::io_failure, message);
}

// Bundle names are plain file stems; anything that could escape the
// workspace directory or alias another entry is rejected.
void check_name(const std::string& name) {
    const bool plain =
        !name.empty() && name.front() != '.' &&
        std::all_of(name.begin(), name.end(), [](char c) {
            return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                   c == '-' || c == '_' || c == '.';
        });
    if (!plain) {
        throw BundleIoError(BundleIoError::Code::name_collision,
                            "bundle name '" + name +
                                "' is not a plain file stem (letters, digits, '-', '_', '.')");
    }
}

}  // namespace

fs::path Workspace::bundle_path(const std::string& name) const {
    return root / (name + bundle_extension);
}

Workspace load_workspace(const fs::path& root) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) {
        io_failure("workspace root '" + root.string() + "' is not a directory");
    }
    Workspace workspace{root};
    fs::create_directories(workspace.assets_dir(), ec);
    if (ec) {
        io_failure("cannot create assets directory under '" + root.string() +
                   "': " + ec.message());
    }
    return workspace;
}

void save_bundle(const Workspace& workspace, const std::string& name,
                 const meta::Bundle& bundle) {
    check_name(name);
    const fs::path path = workspace.bundle_path(name);
    std::error_code ec;
    if (fs::exists(path, ec) && !fs::is_regular_file(path, ec)) {
        throw BundleIoError(BundleIoError::Code::name_collision,
                            "'" + path.string() + "' exists and is not a bundle file");
    }
    const std::string document = serialize_bundle(bundle);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) io_failure("cannot open '" + path.string() + "' for writing");
    out.write(document.data(), static_cast<std::streamsize>(document.size()));
    out.flush();
    if (!out) io_failure("write to '" + path.string() + "' failed");
}

meta::Bundle load_bundle(const Workspace& workspace, const std::string& name) {
    check_name(name);
    const fs::path path = workspace.bundle_path(name);
    std::error_code ec;
    if (!fs::is_regular_file(path, ec)) {
        throw BundleIoError(BundleIoError::Code::not_found,
                            "no bundle '" + name + "' in workspace '" +
                                workspace.root.string() + "'");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) io_failure("cannot open '" + path.string() + "' for reading");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) io_failure("read from '" + path.string() + "' failed");
    return parse_bundle(buffer.str());
}

std::vector<std::string> list_bundles(const Workspace& workspace) {
    std::vector<std::string> names;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(workspace.root, ec)) {
        if (!entry.is_regular_file()) continue;
        const std::string filename = entry.path().filename().string();
        const std::string suffix = bundle_extension;
        if (filename.size() <= suffix.size() ||
            filename.compare(filename.size() - suffix.size(), suffix.size(), suffix) != 0) {
            continue;
        }
        names.push_back(filename.substr(0, filename.size() - suffix.size()));
    }
    if (ec) io_failure("cannot list workspace '" + workspace.root.string() + "': " + ec.message());
    std::sort(names.begin(), names.end());
    return names;
}

}  // namespace m2ar::io
