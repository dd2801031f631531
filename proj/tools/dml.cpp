// dml: batch front end for DML scripts, pipelines, audit and diff.

#include "dml/audit.hpp"
#include "dml/generators.hpp"
#include "dml/interpreter.hpp"
#include "dml/pipeline.hpp"
#include "dml/script.hpp"
#include "dml/xml.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdlib>
#include <iostream>
#include <set>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace
{

struct Globals
{
	std::string idAttribute = "ID";
	bool idAttributeGiven = false;
	bool assignMissingIds = false;
	bool pretty = false;
	std::string format = "text";

	bool jsonOutput() const { return format == "json"; }
};

/// usage errors found after parsing (exit code 2)
class UsageError : public std::runtime_error
{
  public:
	using std::runtime_error::runtime_error;
};

bool samePath(const fs::path &a, const fs::path &b)
{
	std::error_code ec;
	if (fs::exists(a, ec) and fs::exists(b, ec))
		return fs::equivalent(a, b, ec);
	return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

void requireDistinct(const fs::path &out, const std::vector<fs::path> &inputs)
{
	for (auto &in : inputs)
	{
		if (samePath(out, in))
			throw UsageError("output " + out.string() + " must differ from input " + in.string());
	}
}

dml::LoadOptions loadOptions(const Globals &g, const fs::path &file)
{
	return { g.idAttribute, g.assignMissingIds ? dml::MissingIdPolicy::Assign : dml::MissingIdPolicy::Strict, file.string() };
}

dml::Document loadDocument(const Globals &g, const fs::path &file)
{
	auto result = dml::loadXmlFile(file, loadOptions(g, file));
	for (auto &a : result.assigned)
		std::cerr << file.string() << ":" << a.line << ": assigned id " << a.id << " to " << a.tag << "\n";
	return std::move(result.document);
}

void printFailures(const dml::ApplyReport &report)
{
	for (auto &f : report.failures)
		std::cerr << f.location.str() << ": " << f.reason << " [" << f.command << "]\n";
	for (auto &w : report.warnings)
		std::cerr << "warning: " << w << "\n";
}

// --------------------------------------------------------------------

struct RunArgs
{
	fs::path manifest;
	std::vector<std::string> stages, commands, matches;
};

int runCommand(const Globals &g, const RunArgs &args)
{
	auto manifest = dml::Manifest::load(args.manifest);
	if (auto dir = std::getenv("DML_WORKDIR"); dir and *dir)
		manifest.workDir = fs::absolute(dir);
	if (g.idAttributeGiven)
		manifest.idAttribute = g.idAttribute;
	if (g.assignMissingIds)
		manifest.missingIds = dml::MissingIdPolicy::Assign;
	if (g.pretty)
		manifest.prettyPrint = true;
	requireDistinct(manifest.outputXml, { args.manifest });

	std::vector<dml::Exclusion> exclusions;
	for (auto &s : args.stages)
		exclusions.push_back(dml::Exclusion::wholeStage(s));
	for (auto &c : args.commands)
	{
		auto colon = c.rfind(':');
		if (colon == std::string::npos or colon + 1 == c.size() or c.find_first_not_of("0123456789", colon + 1) != std::string::npos)
			throw UsageError("--exclude-command expects FILE:LINE, got \"" + c + "\"");
		exclusions.push_back(dml::Exclusion::command(fs::absolute(c.substr(0, colon)), std::stoul(c.substr(colon + 1))));
	}
	for (auto &m : args.matches)
	{
		auto colon = m.find(':');
		if (colon == std::string::npos or colon == 0 or colon + 1 == m.size())
			throw UsageError("--exclude-match expects RULE:ID, got \"" + m + "\"");
		exclusions.push_back(dml::Exclusion::generated(m.substr(0, colon), m.substr(colon + 1)));
	}

	auto report = exclusions.empty() ? dml::runPipeline(manifest) : dml::rollback(manifest, exclusions);

	bool failed = false;
	for (auto &s : report.stages)
	{
		printFailures(s.apply);
		failed = failed or not s.apply.failures.empty();
	}
	for (auto &w : report.warnings)
		std::cerr << "warning: " << w << "\n";

	if (g.jsonOutput())
		std::cout << report.toJson();
	else
	{
		for (auto &s : report.stages)
		{
			std::cout << dml::stageArtifactPrefix(s.index, s.name) << ": ";
			if (s.excluded)
				std::cout << "excluded\n";
			else
				std::cout << s.apply.commandsApplied << (s.generated ? " generated" : " manual") << " commands applied, "
						  << s.apply.failures.size() << " failed\n";
		}
		std::cout << "manual " << report.manualTotal << ", generated " << report.generatedTotal << "\n"
				  << "run " << report.runDir.string() << "\n"
				  << "output " << report.outputPath << " sha256 " << report.outputDigest << "\n";
	}
	return failed ? 1 : 0;
}

struct ApplyArgs
{
	fs::path doc, script, out;
	bool collect = false;
};

int applyCommand(const Globals &g, const ApplyArgs &args)
{
	requireDistinct(args.out, { args.doc, args.script });

	auto doc = loadDocument(g, args.doc);
	auto set = dml::parseScriptFile(args.script);

	dml::ApplyOptions options;
	options.mode = args.collect ? dml::ApplyMode::Collect : dml::ApplyMode::FailFast;
	auto report = dml::applySet(set, doc, options);

	dml::writeFile(args.out, dml::serializeXml(doc, { g.pretty }));
	printFailures(report);
	if (g.jsonOutput())
		std::cout << dml::toJson(report);
	else
		std::cout << report.commandsApplied << " commands applied, " << report.failures.size() << " failed\n";
	return report.failures.empty() ? 0 : 1;
}

struct CheckArgs
{
	fs::path script;
	fs::path doc;
};

int checkCommand(const Globals &g, const CheckArgs &args)
{
	auto set = dml::parseScriptFile(args.script);
	if (args.doc.empty())
	{
		if (g.jsonOutput())
			std::cout << json{ { "commands", set.commandCount() } }.dump(2) << "\n";
		else
			std::cout << set.commandCount() << " commands\n";
		return 0;
	}

	// dry run on an in-memory copy; the input file is never touched
	auto doc = loadDocument(g, args.doc);
	auto report = dml::applySet(set, doc, { dml::ApplyMode::Collect, {} });
	printFailures(report);
	if (g.jsonOutput())
		std::cout << dml::toJson(report);
	else
		std::cout << set.commandCount() << " commands, " << report.failures.size() << " unresolved\n";
	return report.failures.empty() ? 0 : 1;
}

struct GenArgs
{
	fs::path doc, rules, charmap, out;
	std::vector<std::string> tags;
};

int genCommand(const Globals &g, const GenArgs &args)
{
	if (args.rules.empty() == args.charmap.empty())
		throw UsageError("gen needs exactly one of --rules or --charmap");
	if (not args.charmap.empty() and args.tags.empty())
		throw UsageError("--charmap needs --tags");
	requireDistinct(args.out, { args.doc, args.rules.empty() ? args.charmap : args.rules });

	auto doc = loadDocument(g, args.doc);
	auto name = args.out.stem().string();
	dml::CommandSet set;
	if (not args.rules.empty())
		set = dml::generate(doc, dml::loadRules(args.rules), name);
	else
		set = dml::charmapGenerate(doc, std::set<std::string>(args.tags.begin(), args.tags.end()), dml::loadCharmap(args.charmap), name);

	dml::writeFile(args.out, dml::printScript(set));
	if (g.jsonOutput())
		std::cout << json{ { "commands", set.commandCount() }, { "output", args.out.string() } }.dump(2) << "\n";
	else
		std::cout << set.commandCount() << " commands generated\n";
	return 0;
}

struct AuditArgs
{
	fs::path run;
	std::string id;
	bool descendants = false;
};

int historyCommand(const Globals &g, const AuditArgs &args)
{
	auto history = dml::nodeHistory(args.run, args.id, args.descendants);
	std::cout << (g.jsonOutput() ? history.toJson() : history.toText());
	return 0;
}

int statsCommand(const Globals &g, const AuditArgs &args)
{
	auto s = dml::stats(args.run);
	std::cout << (g.jsonOutput() ? s.toJson() : s.toText());
	return 0;
}

struct DiffArgs
{
	fs::path before, after, out;
};

int diffCommand(const Globals &g, const DiffArgs &args)
{
	requireDistinct(args.out, { args.before, args.after });
	auto before = loadDocument(g, args.before);
	auto after = loadDocument(g, args.after);
	auto set = dml::diffToDml(before, after, args.out.string());
	dml::writeFile(args.out, dml::printScript(set));
	if (g.jsonOutput())
		std::cout << json{ { "commands", set.commandCount() }, { "output", args.out.string() } }.dump(2) << "\n";
	else
		std::cout << set.commandCount() << " commands\n";
	return 0;
}

// --------------------------------------------------------------------

void reportError(const Globals &g, const std::exception &ex, const std::string &kind)
{
	if (not g.jsonOutput())
	{
		std::cerr << ex.what() << "\n";
		return;
	}

	json j{ { "kind", kind }, { "message", ex.what() } };
	if (auto p = dynamic_cast<const dml::ParseError *>(&ex))
	{
		j["file"] = p->location().file;
		j["line"] = p->location().line;
		j["message"] = p->message();
	}
	else if (auto a = dynamic_cast<const dml::ApplyError *>(&ex))
	{
		j["file"] = a->failure().location.file;
		j["line"] = a->failure().location.line;
		j["command"] = a->failure().command;
		j["message"] = a->failure().reason;
	}
	std::cerr << json{ { "error", j } }.dump() << "\n";
}

} // namespace

int main(int argc, char **argv)
{
	CLI::App app("Apply, generate, audit and diff DML command sets over ID-indexed XML.", "dml");
	app.require_subcommand(1);
	app.fallthrough();

	Globals g;
	app.add_option("--id-attr", g.idAttribute, "Name of the id attribute")->each([&](const std::string &) { g.idAttributeGiven = true; });
	app.add_flag("--assign-missing-ids", g.assignMissingIds, "Give elements without an id a generated one");
	app.add_flag("--pretty", g.pretty, "Indent XML output");
	app.add_option("--format", g.format, "Output and diagnostic format")->check(CLI::IsMember({ "text", "json" }));

	RunArgs runArgs;
	auto run = app.add_subcommand("run", "Run a pipeline manifest");
	run->add_option("--manifest", runArgs.manifest, "Manifest file")->required();
	run->add_option("--exclude-stage", runArgs.stages, "Skip a whole stage");
	run->add_option("--exclude-command", runArgs.commands, "Skip the command at FILE:LINE of a manual set");
	run->add_option("--exclude-match", runArgs.matches, "Skip the block a rule generated for a matched id (RULE:ID)");

	ApplyArgs applyArgs;
	auto apply = app.add_subcommand("apply", "Apply one command set to a document");
	apply->add_option("--doc", applyArgs.doc, "Input XML")->required();
	apply->add_option("--script", applyArgs.script, "DML script")->required();
	apply->add_option("--out", applyArgs.out, "Output XML")->required();
	apply->add_flag("--collect", applyArgs.collect, "Keep going after a failing command");

	CheckArgs checkArgs;
	auto check = app.add_subcommand("check", "Parse a script, optionally resolving it against a document");
	check->add_option("script", checkArgs.script, "DML script")->required();
	check->add_option("--doc", checkArgs.doc, "Resolve references against this XML");

	GenArgs genArgs;
	auto gen = app.add_subcommand("gen", "Generate a command set from rules or a character map");
	gen->add_option("--doc", genArgs.doc, "Input XML")->required();
	gen->add_option("--rules", genArgs.rules, "Rule file (JSON)");
	gen->add_option("--charmap", genArgs.charmap, "Character map (JSON)");
	gen->add_option("--tags", genArgs.tags, "Tags whose text the character map rewrites")->delimiter(',');
	gen->add_option("--out", genArgs.out, "Output script")->required();

	AuditArgs auditArgs;
	auto audit = app.add_subcommand("audit", "Inspect a finished run");
	audit->require_subcommand(1);
	auto history = audit->add_subcommand("history", "Commands that touched an element");
	history->add_option("--run", auditArgs.run, "Run directory, or work directory")->required();
	history->add_option("--id", auditArgs.id, "Element id")->required();
	history->add_flag("--descendants", auditArgs.descendants, "Include the element's final subtree and derived ids");
	auto stats = audit->add_subcommand("stats", "Command counts per stage and verb");
	stats->add_option("--run", auditArgs.run, "Run directory, or work directory")->required();

	DiffArgs diffArgs;
	auto diff = app.add_subcommand("diff", "Emit a script that turns one document into another");
	diff->add_option("before", diffArgs.before, "Original XML")->required();
	diff->add_option("after", diffArgs.after, "Target XML")->required();
	diff->add_option("--out", diffArgs.out, "Output script")->required();

	try
	{
		app.parse(argc, argv);
	}
	catch (const CLI::ParseError &ex)
	{
		if (ex.get_exit_code() == 0)
			return app.exit(ex);
		std::cerr << "error: " << ex.what() << "\n\n" << app.help();
		return 2;
	}

	try
	{
		if (*run)
			return runCommand(g, runArgs);
		if (*apply)
			return applyCommand(g, applyArgs);
		if (*check)
			return checkCommand(g, checkArgs);
		if (*gen)
			return genCommand(g, genArgs);
		if (*history)
			return historyCommand(g, auditArgs);
		if (*stats)
			return statsCommand(g, auditArgs);
		if (*diff)
			return diffCommand(g, diffArgs);
	}
	catch (const UsageError &ex)
	{
		std::cerr << "error: " << ex.what() << "\n\n" << app.help();
		return 2;
	}
	catch (const dml::IoError &ex)
	{
		reportError(g, ex, "io");
		return 2;
	}
	catch (const fs::filesystem_error &ex)
	{
		reportError(g, ex, "io");
		return 2;
	}
	catch (const dml::Error &ex)
	{
		reportError(g, ex, "domain");
		return 1;
	}
	catch (const std::exception &ex)
	{
		reportError(g, ex, "internal");
		return 1;
	}
	return 2;
}
