#include "dml/audit.hpp"
#include "dml/generators.hpp"
#include "dml/interpreter.hpp"
#include "dml/pipeline.hpp"
#include "dml/script.hpp"
#include "dml/xml.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace dml
{

namespace fs = std::filesystem;
using json = nlohmann::json;

// --------------------------------------------------------------------
// run artifacts

namespace
{

struct TraceLine
{
	std::vector<NodeId> ids;
};

struct AppliedCommand
{
	const Command *command = nullptr;
	std::string comment;
	/// resolved and created ids, when a trace was available
	const TraceLine *trace = nullptr;
};

struct StageData
{
	const StageReport *report = nullptr;
	std::string file;
	CommandSet set;
	bool traced = false;
	std::unordered_map<std::size_t, TraceLine> trace;
	std::vector<AppliedCommand> applied;
};

struct RunData
{
	fs::path dir;
	RunReport report;
	Manifest manifest;
	std::vector<StageData> stages;
	bool degraded = false;
};

std::string readArtifact(const fs::path &file)
{
	if (not fs::exists(file))
		throw MissingArtifactError("missing artifact: " + file.string());
	return readFile(file);
}

std::map<std::size_t, TraceLine> parseTrace(const std::string &text, const fs::path &file)
{
	std::map<std::size_t, TraceLine> result;
	std::istringstream in(text);
	std::string line;
	while (std::getline(in, line))
	{
		if (line.empty())
			continue;
		try
		{
			auto j = json::parse(line);
			TraceLine t;
			t.ids = j.at("resolved").get<std::vector<NodeId>>();
			for (auto &id : j.at("created"))
				t.ids.push_back(id.get<NodeId>());
			result[j.at("line").get<std::size_t>()] = std::move(t);
		}
		catch (const json::exception &ex)
		{
			throw Error(file.string() + ": invalid trace line: " + ex.what());
		}
	}
	return result;
}

void collectApplied(StageData &stage, const RunReport &report, bool lastStage)
{
	auto &sr = *stage.report;

	std::set<std::size_t> skipped(sr.excludedLines.begin(), sr.excludedLines.end());
	for (auto &f : sr.apply.failures)
		skipped.insert(f.location.line);

	std::size_t cutoff = SIZE_MAX;
	if (lastStage and not report.error.empty() and not sr.apply.failures.empty())
		cutoff = sr.apply.failures.back().location.line;

	std::string comment;
	bool inExcludedBlock = false;
	for (auto &item : stage.set.items)
	{
		if (auto c = std::get_if<Comment>(&item))
		{
			comment = c->text;
			inExcludedBlock = false;
			if (auto marker = parseMarker(*c))
			{
				for (auto &m : sr.excludedMatches)
					inExcludedBlock = inExcludedBlock or (m.rule == marker->rule and m.match == marker->match);
			}
			continue;
		}

		auto &cmd = std::get<Command>(item);
		auto line = cmd.location.line;
		AppliedCommand applied{ &cmd, comment, nullptr };
		if (stage.traced)
		{
			auto t = stage.trace.find(line);
			if (t == stage.trace.end())
				continue;
			applied.trace = &t->second;
		}
		else if (inExcludedBlock or skipped.count(line) or line >= cutoff)
			continue;
		stage.applied.push_back(applied);
	}
}

RunData openRun(const fs::path &dir)
{
	RunData run;
	try
	{
		run.dir = resolveRunDir(dir);
	}
	catch (const IoError &ex)
	{
		throw MissingArtifactError(ex.what());
	}

	run.report = RunReport::parse(readArtifact(run.dir / kReportFile));
	run.manifest = Manifest::parse(readArtifact(run.dir / kManifestFile), run.dir);

	run.stages.reserve(run.report.stages.size());
	for (std::size_t i = 0; i < run.report.stages.size(); ++i)
	{
		auto &sr = run.report.stages[i];
		StageData stage;
		stage.report = &sr;
		if (sr.excluded or sr.script.empty())
		{
			run.stages.push_back(std::move(stage));
			continue;
		}

		auto scriptPath = run.dir / sr.script;
		stage.file = sr.generated ? scriptPath.string() : sr.sourceScript;
		stage.set = parseScript(readArtifact(scriptPath), stage.file);
		stage.set.name = sr.name;

		if (not sr.trace.empty() and fs::exists(run.dir / sr.trace))
		{
			stage.traced = true;
			auto trace = parseTrace(readFile(run.dir / sr.trace), run.dir / sr.trace);
			stage.trace.insert(trace.begin(), trace.end());
		}
		else
			run.degraded = true;

		collectApplied(stage, run.report, i + 1 == run.report.stages.size());
		run.stages.push_back(std::move(stage));
	}
	return run;
}

std::string padRight(std::string s, std::size_t width)
{
	if (s.size() < width)
		s.append(width - s.size(), ' ');
	return s;
}

std::string padLeft(const std::string &s, std::size_t width)
{
	return s.size() < width ? std::string(width - s.size(), ' ') + s : s;
}

} // namespace

// --------------------------------------------------------------------
// history

NodeHistory nodeHistory(const fs::path &runDir, const NodeId &id, bool includeDescendants)
{
	auto run = openRun(runDir);

	NodeHistory history;
	history.id = id;
	history.includeDescendants = includeDescendants;
	history.degraded = run.degraded;

	std::unordered_set<NodeId> targets{ id };
	auto derivedPrefix = id + "+";
	if (includeDescendants)
	{
		LoadOptions options{ run.manifest.idAttribute, MissingIdPolicy::Strict, (run.dir / kFinalFile).string() };
		auto final = loadXml(readArtifact(run.dir / kFinalFile), options).document;
		if (auto e = final.find(id))
		{
			std::vector<const Element *> stack{ e };
			while (not stack.empty())
			{
				auto top = stack.back();
				stack.pop_back();
				targets.insert(top->id());
				for (auto child : top->elements())
					stack.push_back(child);
			}
		}
	}

	auto hit = [&](const NodeId &token) {
		return targets.count(token) or (includeDescendants and token.compare(0, derivedPrefix.size(), derivedPrefix) == 0);
	};

	for (auto &stage : run.stages)
	{
		for (auto &applied : stage.applied)
		{
			bool found = false;
			if (applied.trace)
				found = std::any_of(applied.trace->ids.begin(), applied.trace->ids.end(), hit);
			else
			{
				auto refs = refsOf(applied.command->body);
				found = std::any_of(refs.begin(), refs.end(), [&](const Ref *r) { return hit(r->token); });
			}

			if (found)
				history.entries.push_back({ stage.report->name, stage.file, applied.command->location.line,
											printCommand(applied.command->body), applied.comment });
		}
	}
	return history;
}

std::string NodeHistory::toJson() const
{
	json j;
	j["id"] = id;
	j["includeDescendants"] = includeDescendants;
	j["mode"] = degraded ? "textual" : "resolved";
	j["degraded"] = degraded;
	j["entries"] = json::array();
	for (auto &e : entries)
		j["entries"].push_back({ { "stage", e.stage }, { "file", e.file }, { "line", e.line }, { "command", e.command }, { "comment", e.comment } });
	return j.dump(2) + "\n";
}

std::string NodeHistory::toText() const
{
	std::string out = "history of " + id + (includeDescendants ? " and descendants" : "") + ": " +
					  std::to_string(entries.size()) + " command" + (entries.size() == 1 ? "" : "s");
	out += degraded ? " (textual match only, no trace logs)\n" : "\n";
	for (auto &e : entries)
	{
		out += e.stage + "\t" + e.file + ":" + std::to_string(e.line) + "\t" + e.command;
		if (not e.comment.empty())
			out += "\t" + e.comment;
		out += '\n';
	}
	return out;
}

// --------------------------------------------------------------------
// stats

CommandStats stats(const fs::path &runDir)
{
	auto run = openRun(runDir);

	CommandStats result;
	for (auto &stage : run.stages)
	{
		StageStats s;
		s.name = stage.report->name;
		s.generated = stage.report->generated;
		for (auto &applied : stage.applied)
			++s.perVerbCounts[std::string(verbOf(applied.command->body))];
		s.total = stage.applied.size();
		(s.generated ? result.generated : result.manual) += s.total;
		result.stages.push_back(std::move(s));
	}
	return result;
}

std::string CommandStats::toJson() const
{
	json j;
	j["stages"] = json::array();
	for (auto &s : stages)
		j["stages"].push_back({ { "name", s.name },
								{ "kind", s.generated ? "generated" : "manual" },
								{ "perVerbCounts", s.perVerbCounts },
								{ "total", s.total } });
	j["totals"] = { { "manual", manual }, { "generated", generated } };
	return j.dump(2) + "\n";
}

std::string CommandStats::toText() const
{
	std::size_t width = 5;
	for (auto &s : stages)
		width = std::max(width, s.name.size());
	width += 2;

	std::string out = padRight("Stage", width) + padLeft("Manual", 10) + padLeft("Automatic", 12) + "\n";
	for (auto &s : stages)
	{
		out += padRight(s.name, width) + padLeft(s.generated ? "" : std::to_string(s.total), 10) +
			   padLeft(s.generated ? std::to_string(s.total) : "", 12) + "\n";
	}
	out += padRight("Total", width) + padLeft(std::to_string(manual), 10) + padLeft(std::to_string(generated), 12) + "\n";

	std::map<std::string, std::size_t> verbs;
	for (auto &s : stages)
		for (auto &[verb, n] : s.perVerbCounts)
			verbs[verb] += n;
	if (not verbs.empty())
	{
		out += "\n";
		for (auto &[verb, n] : verbs)
			out += padRight(verb, width) + padLeft(std::to_string(n), 10) + "\n";
	}
	return out;
}

// --------------------------------------------------------------------
// diff

namespace
{

/// maximal runs of non-empty text not separated by an element
struct TextRun
{
	std::string content;
	const Text *last = nullptr;
	/// first element after the run, null for a trailing run
	const Element *next = nullptr;
};

std::vector<TextRun> textRuns(const Element &e)
{
	std::vector<TextRun> runs;
	bool open = false;
	for (auto &n : e.children())
	{
		if (auto t = asText(n))
		{
			if (t->content.empty())
				continue;
			if (not open)
				runs.emplace_back();
			open = true;
			runs.back().content += t->content;
			runs.back().last = t;
		}
		else
		{
			if (open)
				runs.back().next = asElement(n);
			open = false;
		}
	}
	return runs;
}

std::vector<std::string> textSegments(const Element &e)
{
	std::vector<std::string> result;
	for (auto &c : normalizedChildren(e))
	{
		if (auto s = std::get_if<std::string>(&c))
			result.push_back(*s);
	}
	return result;
}

/// the anchor-free base of a derived id chain that exists in \a doc
const Element *derivationBase(const Document &doc, NodeId id)
{
	for (;;)
	{
		auto plus = id.rfind('+');
		if (plus == NodeId::npos or plus + 1 == id.size())
			return nullptr;
		if (not std::all_of(id.begin() + static_cast<std::ptrdiff_t>(plus) + 1, id.end(), [](char c) { return c >= '0' and c <= '9'; }))
			return nullptr;
		id.resize(plus);
		if (auto e = doc.find(id))
			return e;
	}
}

class Differ
{
  public:
	Differ(const Document &before, const Document &after, const std::string &setName)
		: m_before(before)
		, m_after(after)
		, m_work(before)
	{
		m_set.name = setName;
		m_set.sourcePath = setName;
	}

	CommandSet run()
	{
		if (m_before.idAttribute() != m_after.idAttribute())
			throw DiffError("documents use different id attributes (" + m_before.idAttribute() + ", " + m_after.idAttribute() + ")");
		if (m_before.root().id() != m_after.root().id())
			throw DiffError("root ids differ (" + m_before.root().id() + ", " + m_after.root().id() + "); the root cannot be replaced");

		for (auto &id : m_after.ids())
		{
			if (m_before.contains(id))
			{
				m_toWork[id] = id;
				m_kept.insert(id);
			}
		}

		prepareMixedContent();
		placeAll();
		removeLeftovers();

		if (auto d = differenceUpToCreatedIds(m_before, m_work, m_after))
			throw DiffError("internal error, diff does not reproduce the target: " + *d);
		return std::move(m_set);
	}

  private:
	struct Boundaries
	{
		std::vector<const Text *> lastText;
		std::vector<NodeId> markers;
	};

	// ---- output

	ExecuteResult emit(CommandBody body)
	{
		Command cmd{ std::move(body), { m_set.name, m_set.items.size() + 1 } };
		try
		{
			auto result = execute(cmd, m_work, m_env);
			m_set.items.emplace_back(std::move(cmd));
			return result;
		}
		catch (const CommandError &ex)
		{
			throw DiffError("cannot express difference with \"" + printCommand(cmd.body) + "\": " + ex.what());
		}
	}

	void comment(std::string text)
	{
		Comment c;
		c.text = "# " + std::move(text);
		c.location = { m_set.name, m_set.items.size() + 1 };
		m_set.items.emplace_back(std::move(c));
	}

	std::string freshVariable()
	{
		for (;;)
		{
			auto name = "_d" + std::to_string(m_nextVariable++);
			if (not m_before.contains(name) and not m_after.contains(name))
				return name;
		}
	}

	Ref ref(const NodeId &workId) const
	{
		auto v = m_variables.find(workId);
		return { v == m_variables.end() ? workId : v->second };
	}

	Element &work(const NodeId &afterId) { return *m_work.find(m_toWork.at(afterId)); }

	void bindNew(const Element &a, const ExecuteResult &r, const std::string &variable)
	{
		auto &id = r.created.front();
		m_toWork[a.id()] = id;
		m_variables[id] = variable;
		m_kept.insert(id);
	}

	// ---- phase 1: clones and gap markers for elements with several text segments

	/// last text node of each target segment, when the runs group into the segments
	static std::optional<std::vector<const Text *>> groupRuns(const std::vector<TextRun> &runs, const std::vector<std::string> &segments)
	{
		std::vector<const Text *> last;
		std::size_t r = 0;
		for (auto &segment : segments)
		{
			std::string acc;
			while (r < runs.size() and acc.size() < segment.size())
				acc += runs[r++].content;
			if (acc != segment)
				return std::nullopt;
			last.push_back(runs[r - 1].last);
		}
		if (r != runs.size())
			return std::nullopt;
		return last;
	}

	const Element *cloneSource(const Element &a, const std::vector<std::string> &segments) const
	{
		if (auto base = derivationBase(m_before, a.id()); base and groupRuns(textRuns(*base), segments))
			return base;
		for (auto &id : m_before.ids())
		{
			auto e = m_before.find(id);
			if (groupRuns(textRuns(*e), segments))
				return e;
		}
		return nullptr;
	}

	void prepareMixedContent()
	{
		std::vector<const Element *> mixed;
		for (auto &id : m_after.ids())
		{
			auto &a = *m_after.find(id);
			if (textSegments(a).size() >= 2)
				mixed.push_back(&a);
		}

		for (auto a : mixed)
		{
			if (m_toWork.count(a->id()))
				continue;
			auto segments = textSegments(*a);
			auto source = cloneSource(*a, segments);
			if (source == nullptr)
				throw DiffError("element " + a->id() + " has " + std::to_string(segments.size()) +
								" text segments and no source element to clone them from");
			auto variable = freshVariable();
			comment("diff: " + a->id() + " is " + variable + " (copied from " + source->id() + ")");
			bindNew(*a, emit(CreateClone{ { source->id() }, Relation::Under, { m_work.root().id() }, variable }), variable);
		}

		for (auto a : mixed)
		{
			auto &w = work(a->id());
			auto runs = textRuns(w);
			auto grouped = groupRuns(runs, textSegments(*a));
			if (not grouped)
				throw DiffError("text of " + a->id() + " cannot be split into its target segments");

			Boundaries b;
			b.lastText = std::move(*grouped);
			b.markers.resize(b.lastText.size() - 1);

			std::unordered_set<const Element *> significant;
			std::vector<const Element *> gapFirst(b.lastText.size() - 1, nullptr);
			std::size_t segment = 0;
			bool atGapStart = false;
			for (auto &item : normalizedChildren(*a))
			{
				if (std::holds_alternative<std::string>(item))
				{
					atGapStart = ++segment < b.lastText.size();
					continue;
				}
				auto c = std::get<const Element *>(item);
				const Element *cw = nullptr;
				if (auto id = m_toWork.find(c->id()); id != m_toWork.end())
					significant.insert(cw = m_work.find(id->second));
				if (atGapStart)
					gapFirst[segment - 1] = cw;
				atGapStart = false;
			}

			// a gap marker only where the gap's first child is not already in place
			std::vector<std::pair<std::size_t, NodeId>> needed;
			for (std::size_t j = 0; j < gapFirst.size(); ++j)
			{
				auto first = gapFirst[j];
				if (first and first->parent() == &w and currentPredecessor(w, *first, significant) == Predecessor(b.lastText[j]))
					continue;
				auto run = std::find_if(runs.begin(), runs.end(), [&](const TextRun &r) { return r.last == b.lastText[j]; });
				needed.emplace_back(j, run->next->id());
			}
			for (auto &[j, next] : needed)
				b.markers[j] = emit(CreateElement{ "_MARK", Relation::Before, ref(next), std::nullopt }).created.front();

			m_boundaries[a->id()] = std::move(b);
		}
	}

	// ---- phase 2: every element of the target in document order

	void placeAll()
	{
		std::vector<const Element *> stack{ &m_after.root() };
		while (not stack.empty())
		{
			auto a = stack.back();
			stack.pop_back();
			place(*a);
			auto children = a->elements();
			for (auto it = children.rbegin(); it != children.rend(); ++it)
				stack.push_back(*it);
		}
	}

	void fixAttributes(const Element &a, Element &w)
	{
		auto &target = a.attributes();
		auto current = w.attributes();

		std::size_t prefix = 0;
		while (prefix < current.size() and prefix < target.size() and current[prefix].first == target[prefix].first)
			++prefix;

		for (std::size_t i = 0; i < prefix; ++i)
		{
			if (current[i].second != target[i].second)
				emit(SetAttribute{ ref(w.id()), target[i].first, target[i].second });
		}
		for (std::size_t i = prefix; i < current.size(); ++i)
			emit(RemoveAttribute{ ref(w.id()), current[i].first });
		for (std::size_t i = prefix; i < target.size(); ++i)
			emit(SetAttribute{ ref(w.id()), target[i].first, target[i].second });
	}

	/// last text node of every segment, after fixing single-segment text
	std::vector<const Text *> fixText(const Element &a, Element &w)
	{
		if (auto b = m_boundaries.find(a.id()); b != m_boundaries.end())
			return b->second.lastText;

		auto segments = textSegments(a);
		auto runs = textRuns(w);
		std::size_t textNodes = std::count_if(w.children().begin(), w.children().end(),
											  [](const Node &n) { return asText(n) and not asText(n)->content.empty(); });

		if (segments.empty())
		{
			if (textNodes > 0)
				emit(RemoveText{ ref(w.id()) });
			return {};
		}

		if (textNodes != 1 or runs.front().content != segments.front())
		{
			emit(SetText{ ref(w.id()), segments.front() });
			runs = textRuns(w);
		}
		return { runs.front().last };
	}

	using Predecessor = std::variant<std::monostate, const Text *, const Element *>;

	Predecessor currentPredecessor(const Element &w, const Element &child, const std::unordered_set<const Element *> &significant) const
	{
		auto &children = w.children();
		auto it = std::find_if(children.begin(), children.end(), [&](const Node &n) { return asElement(n) == &child; });
		while (it != children.begin())
		{
			--it;
			if (auto t = asText(*it); t and not t->content.empty())
				return t;
			if (auto e = asElement(*it); e and significant.count(e))
				return e;
		}
		return std::monostate{};
	}

	void place(const Element &a)
	{
		auto &w = work(a.id());
		if (w.tag() != a.tag())
			emit(Retag{ ref(w.id()), a.tag() });
		fixAttributes(a, w);
		auto lastText = fixText(a, w);

		const std::vector<NodeId> *markers = nullptr;
		if (auto b = m_boundaries.find(a.id()); b != m_boundaries.end())
			markers = &b->second.markers;

		std::unordered_set<const Element *> significant;
		for (auto c : a.elements())
		{
			if (auto id = m_toWork.find(c->id()); id != m_toWork.end())
				significant.insert(m_work.find(id->second));
		}

		Predecessor pred;
		std::size_t segment = 0;
		for (auto &item : normalizedChildren(a))
		{
			if (std::holds_alternative<std::string>(item))
			{
				pred = lastText[segment++];
				continue;
			}

			auto &c = *std::get<const Element *>(item);
			Relation relation = Relation::Under;
			NodeId anchor = w.id();
			if (std::holds_alternative<const Element *>(pred))
			{
				relation = Relation::After;
				anchor = std::get<const Element *>(pred)->id();
			}
			else if (std::holds_alternative<std::monostate>(pred))
				relation = Relation::FirstUnder;
			else if (segment < lastText.size())
			{
				relation = Relation::Before;
				anchor = markers->at(segment - 1);
			}

			const Element *placed = nullptr;
			if (auto id = m_toWork.find(c.id()); id != m_toWork.end())
			{
				auto &cw = *m_work.find(id->second);
				if (cw.parent() != &w or currentPredecessor(w, cw, significant) != pred)
					emit(MoveElement{ ref(cw.id()), relation, ref(anchor) });
				placed = &cw;
			}
			else
			{
				auto variable = freshVariable();
				comment("diff: " + c.id() + " is " + variable);
				auto segments = textSegments(c);
				auto result = segments.size() == 1 and c.elementCount() == 0
								  ? emit(CreateTextElement{ c.tag(), segments.front(), relation, ref(anchor), variable })
								  : emit(CreateElement{ c.tag(), relation, ref(anchor), variable });
				bindNew(c, result, variable);
				placed = m_work.find(result.created.front());
				significant.insert(placed);
			}
			pred = placed;
		}
	}

	// ---- phase 3: everything not in the target

	void removeLeftovers()
	{
		std::vector<NodeId> doomed;
		std::vector<const Element *> stack{ &m_work.root() };
		while (not stack.empty())
		{
			auto e = stack.back();
			stack.pop_back();
			if (not m_kept.count(e->id()))
			{
				doomed.push_back(e->id());
				continue;
			}
			auto children = e->elements();
			for (auto it = children.rbegin(); it != children.rend(); ++it)
				stack.push_back(*it);
		}
		for (auto &id : doomed)
			emit(RemoveElement{ ref(id) });
	}

	const Document &m_before;
	const Document &m_after;
	Document m_work;
	Env m_env;
	CommandSet m_set;

	/// target id to working id
	std::unordered_map<NodeId, NodeId> m_toWork;
	/// working ids that are part of the target
	std::unordered_set<NodeId> m_kept;
	/// working id to the bind variable that names it
	std::unordered_map<NodeId, std::string> m_variables;
	std::unordered_map<NodeId, Boundaries> m_boundaries;
	std::size_t m_nextVariable = 1;
};

class BijectionCompare
{
  public:
	explicit BijectionCompare(const Document &before)
		: m_before(before)
	{
	}

	std::optional<std::string> compare(const Element &a, const Element &b)
	{
		if (m_before.contains(a.id()) or m_before.contains(b.id()))
		{
			if (a.id() != b.id())
				return "id differs: " + a.id() + " vs " + b.id();
		}
		else
		{
			auto [fwd, newFwd] = m_forward.emplace(a.id(), b.id());
			auto [bwd, newBwd] = m_backward.emplace(b.id(), a.id());
			if (fwd->second != b.id() or bwd->second != a.id())
				return "created ids do not pair up: " + a.id() + " vs " + b.id();
		}

		if (a.tag() != b.tag())
			return "tag differs at " + a.id() + ": " + a.tag() + " vs " + b.tag();
		if (a.attributes() != b.attributes())
			return "attributes differ at " + a.id();

		auto ca = normalizedChildren(a);
		auto cb = normalizedChildren(b);
		if (ca.size() != cb.size())
			return "child count differs at " + a.id() + ": " + std::to_string(ca.size()) + " vs " + std::to_string(cb.size());
		for (std::size_t i = 0; i < ca.size(); ++i)
		{
			if (ca[i].index() != cb[i].index())
				return "child kind differs at " + a.id() + " position " + std::to_string(i);
			if (auto ta = std::get_if<std::string>(&ca[i]))
			{
				if (*ta != std::get<std::string>(cb[i]))
					return "text differs at " + a.id() + ": \"" + *ta + "\" vs \"" + std::get<std::string>(cb[i]) + "\"";
			}
			else if (auto d = compare(*std::get<const Element *>(ca[i]), *std::get<const Element *>(cb[i])))
				return d;
		}
		return std::nullopt;
	}

  private:
	const Document &m_before;
	std::unordered_map<NodeId, NodeId> m_forward, m_backward;
};

} // namespace

CommandSet diffToDml(const Document &before, const Document &after, const std::string &setName)
{
	return Differ(before, after, setName).run();
}

std::optional<std::string> differenceUpToCreatedIds(const Document &before, const Document &a, const Document &b)
{
	return BijectionCompare(before).compare(a.root(), b.root());
}

} // namespace dml
