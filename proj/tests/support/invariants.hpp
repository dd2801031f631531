#pragma once

// Randomized checks of the document/interpreter invariants, shared by the
// unit tests (small counts) and the acceptance suite (full counts).

#include "support.hpp"

#include <optional>
#include <string>

namespace dmltest
{

struct InvariantResult
{
	std::size_t operations = 0;
	std::size_t failures = 0;
	std::optional<std::string> firstFailure;

	bool ok() const { return failures == 0 and operations > 0; }
	void fail(std::string what);
};

/// random commands, successful or not; full-rescan index oracle after each
InvariantResult checkIndexConsistency(Rng &rng, std::size_t operations);

/// successful commands change nothing outside their target, anchor and created nodes
InvariantResult checkLocality(Rng &rng, std::size_t operations);

/// failing commands leave tree, index, environment and id allocator untouched
InvariantResult checkAtomicity(Rng &rng, std::size_t operations);

/// mutations inside a clone leave the source subtree tree-equal to before
InvariantResult checkCloneIndependence(Rng &rng, std::size_t operations);

/// a charmap-generated set, once applied, regenerates as empty; tables whose
/// non-empty values share no characters with their keys
InvariantResult checkCharmapIdempotence(Rng &rng, std::size_t operations);

} // namespace dmltest
