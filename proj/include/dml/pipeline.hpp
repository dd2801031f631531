#pragma once

/// \file
/// End-to-end runs: source XML in, ordered stages of manual and generated
/// command sets applied, interim snapshots and a run report written out.
/// The source file is only ever read.

#include "dml/generators.hpp"
#include "dml/interpreter.hpp"
#include "dml/xml.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dml
{

struct ManualStage
{
	std::filesystem::path script;
};

struct RuleStage
{
	std::filesystem::path rules;
};

struct CharmapStage
{
	std::filesystem::path charmap;
	std::vector<std::string> tags;
};

struct Stage
{
	std::string name;
	std::variant<ManualStage, RuleStage, CharmapStage> kind;
	bool snapshotAfter = false;
	ApplyMode applyMode = ApplyMode::FailFast;

	bool generated() const { return not std::holds_alternative<ManualStage>(kind); }
};

struct Manifest
{
	std::filesystem::path sourceXml;
	std::string idAttribute = "ID";
	MissingIdPolicy missingIds = MissingIdPolicy::Strict;
	std::vector<Stage> stages;
	std::filesystem::path outputXml;
	std::filesystem::path workDir;
	/// applies to the final output only; snapshots are always canonical
	bool prettyPrint = false;

	/// relative paths are resolved against \a baseDir
	static Manifest parse(std::string_view json, const std::filesystem::path &baseDir);
	static Manifest load(const std::filesystem::path &file);
	std::string toJson() const;
};

/// One rollback item. An empty stage name means "whichever stage matches".
struct Exclusion
{
	enum class Kind
	{
		Stage,   ///< skip a whole stage
		Command, ///< drop the command at file:line of a manual set
		Match    ///< drop the block generated by a rule for a matched id
	};

	Kind kind = Kind::Stage;
	std::string stage;
	std::filesystem::path file;
	std::size_t line = 0;
	std::string rule;
	NodeId match;

	static Exclusion wholeStage(std::string stage);
	static Exclusion command(std::filesystem::path file, std::size_t line, std::string stage = {});
	static Exclusion generated(std::string rule, NodeId match, std::string stage = {});
};

struct StageReport
{
	std::size_t index = 0;
	std::string name;
	bool generated = false;
	bool excluded = false;
	/// file names inside the run directory; empty when not written
	std::string script;
	std::string snapshot;
	std::string trace;
	/// the manual set's own path (empty for generated stages)
	std::string sourceScript;
	std::vector<std::size_t> excludedLines;
	std::vector<GeneratedMarker> excludedMatches;
	ApplyReport apply;
};

struct RunReport
{
	std::filesystem::path runDir;
	std::string sourcePath;
	std::string sourceDigest;
	std::string outputPath;
	std::string outputDigest;
	std::vector<AssignedId> assignedIds;
	std::vector<StageReport> stages;
	std::size_t manualTotal = 0;
	std::size_t generatedTotal = 0;
	std::vector<std::string> warnings;
	/// set when a fail-fast stage aborted the run
	std::string error;

	std::string toJson() const;
	static RunReport parse(std::string_view json);
};

/// stage failure or invalid manifest/exclusion; carries the stage name in what()
class PipelineError : public Error
{
  public:
	using Error::Error;
};

inline constexpr std::string_view kReportFile = "report.json";
inline constexpr std::string_view kFinalFile = "final.xml";
inline constexpr std::string_view kManifestFile = "manifest.json";
inline constexpr std::string_view kLatestFile = "LATEST";

std::string toJson(const ApplyReport &report);

/// "NN-name" prefix used for every per-stage artifact
std::string stageArtifactPrefix(std::size_t index, const std::string &name);

RunReport runPipeline(const Manifest &manifest, const std::vector<Exclusion> &exclusions = {});

/// Non-chronological undo: replay from source without the excluded
/// commands. Same as runPipeline; warns about exclusions that matched nothing.
RunReport rollback(const Manifest &manifest, const std::vector<Exclusion> &exclusions);

/// a run directory, or a work directory whose LATEST marker names one
std::filesystem::path resolveRunDir(const std::filesystem::path &dir);

} // namespace dml
