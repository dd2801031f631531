#pragma once

// Shared helpers for the unit and acceptance tests: random documents and
// scripts, a synthetic lexicon, temporary directories.

#include "dml/command.hpp"
#include "dml/document.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace dmltest
{

using Rng = std::mt19937_64;

struct DocShape
{
	std::size_t minElements = 1;
	std::size_t maxElements = 25;
	std::size_t maxAttributes = 3;
	/// chance that a gap between children gets a text node
	double textChance = 0.35;
};

std::string randomText(Rng &rng);
std::string randomName(Rng &rng);

/// ids are "n1", "n2", ... in creation order
dml::Document randomDocument(Rng &rng, const DocShape &shape = {});

/// syntactically valid commands and comments, not tied to any document
dml::CommandSet randomCommandSet(Rng &rng, std::size_t items);

/// commands that all apply cleanly, in order, to \a doc
dml::CommandSet randomScript(Rng &rng, const dml::Document &doc, std::size_t commands);

/// one mutating command that may or may not apply to \a doc
dml::Command randomCommand(Rng &rng, const dml::Document &doc);

/// LEXICON root holding \a entries ENTRY elements of shape
/// FORM(ORTH, PRON), 4 x SENSE(USG, TRANS(TR, TR)); 24 ids per entry
std::string syntheticLexicon(std::size_t entries);

/// self-deleting scratch directory
class TempDir
{
  public:
	TempDir();
	~TempDir();
	TempDir(const TempDir &) = delete;
	TempDir &operator=(const TempDir &) = delete;

	const std::filesystem::path &path() const { return m_path; }
	std::filesystem::path operator/(const std::string &name) const { return m_path / name; }

  private:
	std::filesystem::path m_path;
};

/// directory of the checked-in fixtures
std::filesystem::path fixtures();

} // namespace dmltest
