#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "m2ar/meta.hpp"

/// File-based bundle persistence: one directory holds any number of bundles
/// (one canonical document per file, extension .m2ar.json) plus an assets/
/// subdirectory that relative asset URIs resolve against.
///
/// Single-writer contract: concurrent writers to one workspace directory
/// need external mutual exclusion; this layer does not lock.
namespace m2ar::io {

struct Workspace {
    std::filesystem::path root;

    std::filesystem::path assets_dir() const { return root / "assets"; }
    std::filesystem::path bundle_path(const std::string& name) const;
};

/// Opens an existing directory as a workspace, creating the assets/
/// subdirectory if needed. Throws BundleIoError::io_failure when root is
/// missing or not a directory.
Workspace load_workspace(const std::filesystem::path& root);

/// Writes the bundle's canonical document to <root>/<name>.m2ar.json,
/// replacing any previous bundle of that name. The name is a plain file
/// stem; path syntax or an existing non-file of that name raises
/// BundleIoError::name_collision.
void save_bundle(const Workspace& workspace, const std::string& name,
                 const meta::Bundle& bundle);

/// Reads a bundle back. Throws BundleIoError::not_found when no such bundle
/// exists, io_failure when it cannot be read, and the parse_bundle errors
/// when the file is not a canonical document.
meta::Bundle load_bundle(const Workspace& workspace, const std::string& name);

/// Names of all bundles in the workspace, sorted.
std::vector<std::string> list_bundles(const Workspace& workspace);

}  // namespace m2ar::io
