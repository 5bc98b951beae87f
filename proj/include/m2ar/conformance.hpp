#pragma once

#include "m2ar/diagnostics.hpp"
#include "m2ar/meta.hpp"

namespace m2ar::meta {

/// Generic conformance check of a bundle against a metamodel. Returns an
/// empty report iff:
///   - every model's scene type and every instance's metaclass,
///     relationclass, and port exist in the metamodel,
///   - ids are unique (model ids among models, instance ids bundle-wide),
///   - attribute values match their declared kind and required attributes
///     are present,
///   - relation endpoints exist, satisfy the role's allowed endpoint types,
///     and respect role cardinalities,
///   - every InstanceRef resolves and has the declared ref_target kind,
///   - asset references resolve into the bundle's asset registry,
///   - poses and quaternion values satisfy their numeric invariants.
///
/// Type-name restrictions on reference targets (RefTarget::allowed_types)
/// are deliberately not enforced here; they are language-level rules (see
/// arwfml.hpp). Diagnostics are returned, never thrown, ordered by
/// (model id, instance id, code).
DiagnosticList conforms(const Bundle& bundle, const Metamodel& metamodel);

}  // namespace m2ar::meta
