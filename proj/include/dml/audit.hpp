#pragma once

/// \file
/// Reading command sets as data: per-node change history, per-stage
/// statistics, and an id-matching tree diff that emits DML.

#include "dml/command.hpp"
#include "dml/document.hpp"
#include "dml/error.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dml
{

/// a run directory lacks a file that the report says it has
class MissingArtifactError : public IoError
{
  public:
	using IoError::IoError;
};

struct HistoryEntry
{
	std::string stage;
	std::string file;
	std::size_t line = 0;
	std::string command;
	/// nearest comment above the command in its file, empty if none
	std::string comment;
};

struct NodeHistory
{
	NodeId id;
	bool includeDescendants = false;
	/// true when no trace logs were available and entries come from token matching only
	bool degraded = false;
	std::vector<HistoryEntry> entries;

	std::string toJson() const;
	std::string toText() const;
};

NodeHistory nodeHistory(const std::filesystem::path &runDir, const NodeId &id, bool includeDescendants = false);

struct StageStats
{
	std::string name;
	bool generated = false;
	std::map<std::string, std::size_t> perVerbCounts;
	std::size_t total = 0;
};

struct CommandStats
{
	std::vector<StageStats> stages;
	std::size_t manual = 0;
	std::size_t generated = 0;

	std::string toJson() const;
	/// one row per stage, manual and automatic columns
	std::string toText() const;
};

/// counts the applied commands of every stage, by verb
CommandStats stats(const std::filesystem::path &runDir);

class DiffError : public Error
{
  public:
	using Error::Error;
};

/// A script that turns \a before into \a after. Elements are matched by id;
/// elements only in \a after are created through bind variables, so the
/// result carries allocator ids in their place.
CommandSet diffToDml(const Document &before, const Document &after, const std::string &setName = "diff");

/// Tree equality where ids absent from \a before may differ, as long as they
/// pair up one-to-one. Returns the first difference.
std::optional<std::string> differenceUpToCreatedIds(const Document &before, const Document &a, const Document &b);

inline bool equivalentUpToCreatedIds(const Document &before, const Document &a, const Document &b)
{
	return not differenceUpToCreatedIds(before, a, b).has_value();
}

} // namespace dml
