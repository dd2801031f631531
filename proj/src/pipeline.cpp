#include "dml/pipeline.hpp"
#include "dml/digest.hpp"
#include "dml/script.hpp"
#include "overloaded.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <regex>
#include <set>

namespace dml
{

namespace fs = std::filesystem;
using json = nlohmann::json;
using detail::overloaded;

// --------------------------------------------------------------------
// manifest

namespace
{

std::string modeName(ApplyMode m)
{
	return m == ApplyMode::Collect ? "collect" : "failFast";
}

ApplyMode parseMode(const std::string &s)
{
	if (s == "failFast")
		return ApplyMode::FailFast;
	if (s == "collect")
		return ApplyMode::Collect;
	throw ConfigError("unknown applyMode \"" + s + "\" (expected failFast or collect)");
}

bool validStageName(const std::string &name)
{
	static const std::regex re("[A-Za-z0-9_.-]+");
	return std::regex_match(name, re) and name != "." and name != "..";
}

fs::path resolvePath(const fs::path &base, const std::string &p)
{
	fs::path path(p);
	return path.is_absolute() ? path : (base / path).lexically_normal();
}

} // namespace

Manifest Manifest::parse(std::string_view text, const fs::path &baseDir)
{
	Manifest m;
	try
	{
		auto j = json::parse(text);

		m.sourceXml = resolvePath(baseDir, j.at("sourceXml").get<std::string>());
		m.outputXml = resolvePath(baseDir, j.at("outputXml").get<std::string>());
		m.workDir = resolvePath(baseDir, j.value("workDir", std::string("work")));
		m.idAttribute = j.value("idAttribute", std::string("ID"));
		m.prettyPrint = j.value("prettyPrint", false);

		auto policy = j.value("missingIdPolicy", std::string("strict"));
		if (policy == "strict")
			m.missingIds = MissingIdPolicy::Strict;
		else if (policy == "assign")
			m.missingIds = MissingIdPolicy::Assign;
		else
			throw ConfigError("unknown missingIdPolicy \"" + policy + "\" (expected strict or assign)");

		for (auto &s : j.at("stages"))
		{
			Stage stage;
			stage.name = s.at("name").get<std::string>();
			if (not validStageName(stage.name))
				throw ConfigError("invalid stage name \"" + stage.name + "\"");

			auto kind = s.at("kind").get<std::string>();
			if (kind == "manual")
				stage.kind = ManualStage{ resolvePath(baseDir, s.at("path").get<std::string>()) };
			else if (kind == "generator" and s.contains("rules"))
				stage.kind = RuleStage{ resolvePath(baseDir, s.at("rules").get<std::string>()) };
			else if (kind == "generator" and s.contains("charmap"))
				stage.kind = CharmapStage{ resolvePath(baseDir, s.at("charmap").get<std::string>()),
										   s.at("tags").get<std::vector<std::string>>() };
			else
				throw ConfigError("stage \"" + stage.name + "\": kind must be manual (with path) or generator (with rules or charmap)");

			stage.snapshotAfter = s.value("snapshotAfter", false);
			stage.applyMode = parseMode(s.value("applyMode", modeName(stage.generated() ? ApplyMode::Collect : ApplyMode::FailFast)));
			m.stages.push_back(std::move(stage));
		}
	}
	catch (const json::exception &ex)
	{
		throw ConfigError(std::string("invalid manifest: ") + ex.what());
	}

	std::set<std::string> names;
	for (auto &s : m.stages)
	{
		if (not names.insert(s.name).second)
			throw ConfigError("duplicate stage name \"" + s.name + "\"");
	}
	return m;
}

Manifest Manifest::load(const fs::path &file)
{
	auto text = readFile(file);
	auto base = fs::absolute(file).parent_path();
	try
	{
		return parse(text, base);
	}
	catch (const ConfigError &ex)
	{
		throw ConfigError(file.string() + ": " + ex.what());
	}
}

std::string Manifest::toJson() const
{
	json j;
	j["sourceXml"] = sourceXml.string();
	j["idAttribute"] = idAttribute;
	j["missingIdPolicy"] = missingIds == MissingIdPolicy::Strict ? "strict" : "assign";
	j["outputXml"] = outputXml.string();
	j["workDir"] = workDir.string();
	j["prettyPrint"] = prettyPrint;
	j["stages"] = json::array();
	for (auto &s : stages)
	{
		json js;
		js["name"] = s.name;
		std::visit(overloaded{
					   [&](const ManualStage &k) {
						   js["kind"] = "manual";
						   js["path"] = k.script.string();
					   },
					   [&](const RuleStage &k) {
						   js["kind"] = "generator";
						   js["rules"] = k.rules.string();
					   },
					   [&](const CharmapStage &k) {
						   js["kind"] = "generator";
						   js["charmap"] = k.charmap.string();
						   js["tags"] = k.tags;
					   },
				   },
				   s.kind);
		js["snapshotAfter"] = s.snapshotAfter;
		js["applyMode"] = modeName(s.applyMode);
		j["stages"].push_back(std::move(js));
	}
	return j.dump(2) + "\n";
}

// --------------------------------------------------------------------
// exclusions

Exclusion Exclusion::wholeStage(std::string stage)
{
	Exclusion e;
	e.kind = Kind::Stage;
	e.stage = std::move(stage);
	return e;
}

Exclusion Exclusion::command(fs::path file, std::size_t line, std::string stage)
{
	Exclusion e;
	e.kind = Kind::Command;
	e.file = std::move(file);
	e.line = line;
	e.stage = std::move(stage);
	return e;
}

Exclusion Exclusion::generated(std::string rule, NodeId match, std::string stage)
{
	Exclusion e;
	e.kind = Kind::Match;
	e.rule = std::move(rule);
	e.match = std::move(match);
	e.stage = std::move(stage);
	return e;
}

// --------------------------------------------------------------------
// report

namespace
{

json reportJson(const ApplyReport &r)
{
	json j;
	j["setName"] = r.setName;
	j["commandsApplied"] = r.commandsApplied;
	j["perVerbCounts"] = r.perVerbCounts;
	j["failures"] = json::array();
	for (auto &f : r.failures)
		j["failures"].push_back({ { "file", f.location.file }, { "line", f.location.line }, { "command", f.command }, { "reason", f.reason } });
	j["warnings"] = r.warnings;
	return j;
}

ApplyReport applyReportFrom(const json &j)
{
	ApplyReport r;
	r.setName = j.at("setName").get<std::string>();
	r.commandsApplied = j.at("commandsApplied").get<std::size_t>();
	r.perVerbCounts = j.at("perVerbCounts").get<std::map<std::string, std::size_t>>();
	for (auto &f : j.at("failures"))
		r.failures.push_back({ { f.at("file").get<std::string>(), f.at("line").get<std::size_t>() },
							   f.at("command").get<std::string>(),
							   f.at("reason").get<std::string>() });
	r.warnings = j.value("warnings", std::vector<std::string>{});
	return r;
}

} // namespace

std::string toJson(const ApplyReport &report)
{
	return reportJson(report).dump(2) + "\n";
}

std::string RunReport::toJson() const
{
	json j;
	j["runDir"] = runDir.string();
	j["source"] = { { "path", sourcePath }, { "sha256", sourceDigest } };
	j["output"] = { { "path", outputPath }, { "sha256", outputDigest } };
	j["assignedIds"] = json::array();
	for (auto &a : assignedIds)
		j["assignedIds"].push_back({ { "id", a.id }, { "tag", a.tag }, { "line", a.line } });

	j["stages"] = json::array();
	for (auto &s : stages)
	{
		json js;
		js["index"] = s.index;
		js["name"] = s.name;
		js["kind"] = s.generated ? "generated" : "manual";
		js["excluded"] = s.excluded;
		js["script"] = s.script;
		js["sourceScript"] = s.sourceScript;
		js["snapshot"] = s.snapshot;
		js["trace"] = s.trace;
		js["excludedLines"] = s.excludedLines;
		js["excludedMatches"] = json::array();
		for (auto &m : s.excludedMatches)
			js["excludedMatches"].push_back({ { "rule", m.rule }, { "id", m.match } });
		js["apply"] = reportJson(s.apply);
		j["stages"].push_back(std::move(js));
	}

	j["totals"] = { { "manual", manualTotal }, { "generated", generatedTotal } };
	j["warnings"] = warnings;
	if (not error.empty())
		j["error"] = error;
	return j.dump(2) + "\n";
}

RunReport RunReport::parse(std::string_view text)
{
	RunReport r;
	try
	{
		auto j = json::parse(text);
		r.runDir = j.at("runDir").get<std::string>();
		r.sourcePath = j.at("source").at("path").get<std::string>();
		r.sourceDigest = j.at("source").at("sha256").get<std::string>();
		r.outputPath = j.at("output").at("path").get<std::string>();
		r.outputDigest = j.at("output").at("sha256").get<std::string>();
		for (auto &a : j.at("assignedIds"))
			r.assignedIds.push_back({ a.at("id").get<std::string>(), a.at("tag").get<std::string>(), a.at("line").get<std::size_t>() });
		for (auto &js : j.at("stages"))
		{
			StageReport s;
			s.index = js.at("index").get<std::size_t>();
			s.name = js.at("name").get<std::string>();
			s.generated = js.at("kind").get<std::string>() == "generated";
			s.excluded = js.at("excluded").get<bool>();
			s.script = js.at("script").get<std::string>();
			s.sourceScript = js.at("sourceScript").get<std::string>();
			s.snapshot = js.at("snapshot").get<std::string>();
			s.trace = js.at("trace").get<std::string>();
			s.excludedLines = js.at("excludedLines").get<std::vector<std::size_t>>();
			for (auto &m : js.at("excludedMatches"))
				s.excludedMatches.push_back({ m.at("rule").get<std::string>(), m.at("id").get<std::string>() });
			s.apply = applyReportFrom(js.at("apply"));
			r.stages.push_back(std::move(s));
		}
		r.manualTotal = j.at("totals").at("manual").get<std::size_t>();
		r.generatedTotal = j.at("totals").at("generated").get<std::size_t>();
		r.warnings = j.value("warnings", std::vector<std::string>{});
		r.error = j.value("error", std::string{});
	}
	catch (const json::exception &ex)
	{
		throw Error(std::string("invalid run report: ") + ex.what());
	}
	return r;
}

// --------------------------------------------------------------------
// run

std::string stageArtifactPrefix(std::size_t index, const std::string &name)
{
	char nn[16];
	std::snprintf(nn, sizeof(nn), "%02zu", index);
	return std::string(nn) + "-" + name;
}

fs::path resolveRunDir(const fs::path &dir)
{
	if (fs::exists(dir / kReportFile))
		return dir;
	if (fs::exists(dir / kLatestFile))
	{
		auto name = readFile(dir / kLatestFile);
		while (not name.empty() and (name.back() == '\n' or name.back() == '\r'))
			name.pop_back();
		return dir / name;
	}
	throw IoError("missing artifact: " + (dir / kReportFile).string() + " (not a run directory or work directory)");
}

namespace
{

bool samePath(const fs::path &a, const fs::path &b)
{
	std::error_code ec;
	if (fs::exists(a, ec) and fs::exists(b, ec))
		return fs::equivalent(a, b, ec);
	return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

fs::path createRunDir(const fs::path &workDir)
{
	fs::create_directories(workDir);

	std::size_t last = 0;
	static const std::regex re("run-([0-9]+)");
	for (auto &entry : fs::directory_iterator(workDir))
	{
		std::smatch m;
		auto name = entry.path().filename().string();
		if (entry.is_directory() and std::regex_match(name, m, re))
			last = std::max<std::size_t>(last, std::stoul(m[1].str()));
	}

	for (std::size_t n = last + 1;; ++n)
	{
		char name[32];
		std::snprintf(name, sizeof(name), "run-%04zu", n);
		auto dir = workDir / name;
		if (fs::create_directory(dir))
			return dir;
	}
}

struct StagePlan
{
	bool excluded = false;
	std::set<std::size_t> lines;
	std::vector<const Exclusion *> matches;
};

class Run
{
  public:
	Run(const Manifest &manifest, const std::vector<Exclusion> &exclusions)
		: m_manifest(manifest)
		, m_exclusions(exclusions)
	{
	}

	RunReport execute()
	{
		validate();

		auto sourceBytes = readFile(m_manifest.sourceXml);
		m_report.sourcePath = m_manifest.sourceXml.string();
		m_report.sourceDigest = sha256Hex(sourceBytes);

		LoadOptions load{ m_manifest.idAttribute, m_manifest.missingIds, m_manifest.sourceXml.string() };
		auto loaded = loadXml(sourceBytes, load);
		sourceBytes.clear();
		auto doc = std::move(loaded.document);
		m_report.assignedIds = std::move(loaded.assigned);

		m_runDir = createRunDir(m_manifest.workDir);
		m_report.runDir = m_runDir;
		writeFile(m_runDir / kManifestFile, m_manifest.toJson());

		try
		{
			for (std::size_t i = 0; i < m_manifest.stages.size(); ++i)
				runStage(i, doc);
		}
		catch (const std::exception &ex)
		{
			m_report.error = ex.what();
			finishReport();
			throw;
		}

		auto output = serializeXml(doc, { m_manifest.prettyPrint });
		if (m_manifest.outputXml.has_parent_path())
			fs::create_directories(m_manifest.outputXml.parent_path());
		writeFile(m_manifest.outputXml, output);
		writeFile(m_runDir / kFinalFile, output);
		m_report.outputPath = m_manifest.outputXml.string();
		m_report.outputDigest = sha256Hex(output);

		if (sha256File(m_manifest.sourceXml) != m_report.sourceDigest)
			throw PipelineError("source file " + m_manifest.sourceXml.string() + " changed during the run");

		for (auto &e : m_exclusions)
		{
			if (e.kind == Exclusion::Kind::Match and not m_usedMatches.count(&e))
				m_report.warnings.push_back("exclusion " + e.rule + ":" + e.match + " matched nothing");
		}

		finishReport();
		return std::move(m_report);
	}

  private:
	void validate()
	{
		if (samePath(m_manifest.sourceXml, m_manifest.outputXml))
			throw PipelineError("outputXml must differ from sourceXml (" + m_manifest.sourceXml.string() + ")");
		for (auto &s : m_manifest.stages)
		{
			auto input = std::visit(overloaded{
										[](const ManualStage &k) { return k.script; },
										[](const RuleStage &k) { return k.rules; },
										[](const CharmapStage &k) { return k.charmap; },
									},
									s.kind);
			if (samePath(input, m_manifest.outputXml))
				throw PipelineError("outputXml must differ from the input of stage \"" + s.name + "\" (" + input.string() + ")");
		}
		if (not fs::exists(m_manifest.sourceXml))
			throw IoError("source file " + m_manifest.sourceXml.string() + " does not exist");

		m_plans.resize(m_manifest.stages.size());

		for (auto &e : m_exclusions)
		{
			auto stageIndex = findStage(e);
			auto &plan = m_plans[stageIndex];
			switch (e.kind)
			{
				case Exclusion::Kind::Stage: plan.excluded = true; break;
				case Exclusion::Kind::Command: plan.lines.insert(e.line); break;
				case Exclusion::Kind::Match: break;
			}
		}

		for (auto &e : m_exclusions)
		{
			if (e.kind != Exclusion::Kind::Match)
				continue;
			for (std::size_t i = 0; i < m_manifest.stages.size(); ++i)
			{
				auto &s = m_manifest.stages[i];
				if (s.generated() and (e.stage.empty() or e.stage == s.name))
					m_plans[i].matches.push_back(&e);
			}
		}

		for (std::size_t i = 0; i < m_manifest.stages.size(); ++i)
		{
			if (auto manual = std::get_if<ManualStage>(&m_manifest.stages[i].kind))
			{
				if (not fs::exists(manual->script))
					throw IoError("stage \"" + m_manifest.stages[i].name + "\": script " + manual->script.string() + " does not exist");
			}
		}
	}

	std::size_t findStage(const Exclusion &e) const
	{
		auto &stages = m_manifest.stages;
		for (std::size_t i = 0; i < stages.size(); ++i)
		{
			auto &s = stages[i];
			if (not e.stage.empty())
			{
				if (s.name != e.stage)
					continue;
				if (e.kind == Exclusion::Kind::Command and s.generated())
					throw PipelineError("exclusion " + e.file.string() + ":" + std::to_string(e.line) + ": stage \"" + s.name +
										"\" is generated; exclude generated commands by rule and matched id");
				if (e.kind == Exclusion::Kind::Match and not s.generated())
					throw PipelineError("exclusion " + e.rule + ":" + e.match + ": stage \"" + s.name + "\" is not a generator stage");
				return i;
			}

			if (e.kind == Exclusion::Kind::Command)
			{
				if (auto manual = std::get_if<ManualStage>(&s.kind); manual and samePath(manual->script, e.file))
					return i;
			}
		}

		switch (e.kind)
		{
			case Exclusion::Kind::Stage: throw PipelineError("exclusion names unknown stage \"" + e.stage + "\"");
			case Exclusion::Kind::Command:
				throw PipelineError("exclusion " + e.file.string() + ":" + std::to_string(e.line) + " does not refer to a manual stage's script");
			case Exclusion::Kind::Match:
				if (not e.stage.empty())
					throw PipelineError("exclusion names unknown stage \"" + e.stage + "\"");
				break;
		}
		return 0;
	}

	void runStage(std::size_t i, Document &doc)
	{
		auto &stage = m_manifest.stages[i];
		auto &plan = m_plans[i];
		auto prefix = stageArtifactPrefix(i + 1, stage.name);

		StageReport sr;
		sr.index = i + 1;
		sr.name = stage.name;
		sr.generated = stage.generated();
		sr.excluded = plan.excluded;
		sr.apply.setName = stage.name;

		CommandSet set;
		if (auto manual = std::get_if<ManualStage>(&stage.kind))
		{
			auto text = readFile(manual->script);
			sr.sourceScript = manual->script.string();
			sr.script = prefix + ".dml";
			writeFile(m_runDir / sr.script, text);

			set = parseStage(stage, text, manual->script.string());
			set.name = stage.name;

			for (auto line : plan.lines)
			{
				auto hit = std::find_if(set.items.begin(), set.items.end(), [line](const ScriptItem &item) {
					auto cmd = std::get_if<Command>(&item);
					return cmd and cmd->location.line == line;
				});
				if (hit == set.items.end())
					throw PipelineError("stage \"" + stage.name + "\": excluded line " + manual->script.string() + ":" +
										std::to_string(line) + " is not a command");
				set.items.erase(hit);
				sr.excludedLines.push_back(line);
			}
		}
		else if (not plan.excluded)
		{
			sr.script = prefix + ".generated.dml";
			auto path = m_runDir / sr.script;

			auto generated = std::visit(overloaded{
											[&](const RuleStage &k) { return generate(doc, loadRules(k.rules), stage.name); },
											[&](const CharmapStage &k) {
												std::set<std::string> tags(k.tags.begin(), k.tags.end());
												return charmapGenerate(doc, tags, loadCharmap(k.charmap), stage.name);
											},
											[](const ManualStage &) { return CommandSet{}; },
										},
										stage.kind);

			// the persisted file is what gets applied
			auto text = printScript(generated);
			writeFile(path, text);
			set = parseStage(stage, text, path.string());
			set.name = stage.name;

			filterMatches(set, plan, sr);
		}

		if (not plan.excluded)
			apply(stage, set, doc, sr, prefix);

		if (stage.snapshotAfter)
		{
			sr.snapshot = prefix + ".xml";
			writeFile(m_runDir / sr.snapshot, serializeXml(doc));
		}

		(sr.generated ? m_report.generatedTotal : m_report.manualTotal) += sr.apply.commandsApplied;
		m_report.stages.push_back(std::move(sr));
	}

	CommandSet parseStage(const Stage &stage, std::string_view text, const std::string &name)
	{
		try
		{
			return parseScript(text, name);
		}
		catch (const ParseError &ex)
		{
			throw PipelineError("stage \"" + stage.name + "\": " + ex.what());
		}
	}

	void filterMatches(CommandSet &set, const StagePlan &plan, StageReport &sr)
	{
		if (plan.matches.empty())
			return;

		const Exclusion *current = nullptr;
		std::vector<ScriptItem> kept;
		for (auto &item : set.items)
		{
			if (auto c = std::get_if<Comment>(&item))
			{
				current = nullptr;
				if (auto marker = parseMarker(*c))
				{
					for (auto e : plan.matches)
					{
						if (e->rule == marker->rule and e->match == marker->match)
						{
							current = e;
							m_usedMatches.insert(e);
							sr.excludedMatches.push_back(*marker);
						}
					}
				}
			}
			else if (current != nullptr)
				continue;
			kept.push_back(std::move(item));
		}
		set.items = std::move(kept);
	}

	void apply(const Stage &stage, const CommandSet &set, Document &doc, StageReport &sr, const std::string &prefix)
	{
		std::string trace;
		ApplyOptions options;
		options.mode = stage.applyMode;
		options.observer = [&trace](const Command &cmd, const ExecuteResult &r) {
			json line;
			line["line"] = cmd.location.line;
			line["resolved"] = r.resolved;
			line["created"] = r.created;
			trace += line.dump();
			trace += '\n';
		};

		sr.trace = prefix + ".trace.jsonl";
		try
		{
			sr.apply = applySet(set, doc, options);
		}
		catch (const ApplyError &ex)
		{
			writeFile(m_runDir / sr.trace, trace);
			sr.apply = ex.partial();
			sr.apply.failures.push_back(ex.failure());
			m_report.stages.push_back(sr);
			throw PipelineError("stage \"" + stage.name + "\": " + ex.what());
		}
		writeFile(m_runDir / sr.trace, trace);
	}

	void finishReport()
	{
		writeFile(m_runDir / kReportFile, m_report.toJson());
		writeFile(m_manifest.workDir / kLatestFile, m_runDir.filename().string() + "\n");
	}

	const Manifest &m_manifest;
	const std::vector<Exclusion> &m_exclusions;
	std::vector<StagePlan> m_plans;
	std::set<const Exclusion *> m_usedMatches;
	fs::path m_runDir;
	RunReport m_report;
};

} // namespace

RunReport runPipeline(const Manifest &manifest, const std::vector<Exclusion> &exclusions)
{
	return Run(manifest, exclusions).execute();
}

RunReport rollback(const Manifest &manifest, const std::vector<Exclusion> &exclusions)
{
	return runPipeline(manifest, exclusions);
}

} // namespace dml
