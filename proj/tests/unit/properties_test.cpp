#include "invariants.hpp"

#include <gtest/gtest.h>

namespace
{

void expectHolds(const dmltest::InvariantResult &r, std::size_t operations)
{
	EXPECT_GE(r.operations, operations);
	EXPECT_EQ(r.failures, 0u) << r.firstFailure.value_or("");
}

} // namespace

TEST(Invariants, IndexConsistency)
{
	dmltest::Rng rng(101);
	expectHolds(dmltest::checkIndexConsistency(rng, 1000), 1000);
}

TEST(Invariants, Locality)
{
	dmltest::Rng rng(102);
	expectHolds(dmltest::checkLocality(rng, 1000), 1000);
}

TEST(Invariants, FailingCommandsAreAtomic)
{
	dmltest::Rng rng(103);
	expectHolds(dmltest::checkAtomicity(rng, 1000), 1000);
}

TEST(Invariants, CloneIndependence)
{
	dmltest::Rng rng(104);
	expectHolds(dmltest::checkCloneIndependence(rng, 1000), 1000);
}

TEST(Invariants, CharmapIdempotence)
{
	dmltest::Rng rng(105);
	expectHolds(dmltest::checkCharmapIdempotence(rng, 1000), 1000);
}
