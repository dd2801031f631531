#include "support.hpp"

#include "dml/interpreter.hpp"

#include <cstdio>
#include <unistd.h>

namespace dmltest
{

namespace fs = std::filesystem;
using namespace dml;

namespace
{

const char *const kTags[] = { "ENTRY", "FORM", "ORTH", "PRON", "SENSE", "USG", "TRANS", "TR", "NOTE", "x-y", "_z" };
const char *const kAttrs[] = { "N", "TYPE", "LANG", "xY", "a-b", "_c" };
// legal XML character data only
const char *const kPieces[] = { "rare", " ", "طرف", "tür'fah", "a<b", "&amp;", "\"q\"", "\t", "\n", "\r", "\\", "ü", "x y", "]]>", "\x7f", "'" };

template <typename T, std::size_t N>
const T &pick(Rng &rng, const T (&items)[N])
{
	return items[std::uniform_int_distribution<std::size_t>(0, N - 1)(rng)];
}

std::size_t below(Rng &rng, std::size_t n)
{
	return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool chance(Rng &rng, double p)
{
	return std::bernoulli_distribution(p)(rng);
}

Relation randomRelation(Rng &rng)
{
	static const Relation all[] = { Relation::Under, Relation::FirstUnder, Relation::Before, Relation::After };
	return pick(rng, all);
}

} // namespace

std::string randomText(Rng &rng)
{
	std::string s;
	auto n = 1 + below(rng, 3);
	for (std::size_t i = 0; i < n; ++i)
		s += pick(rng, kPieces);
	return s;
}

std::string randomName(Rng &rng)
{
	return pick(rng, kTags);
}

Document randomDocument(Rng &rng, const DocShape &shape)
{
	auto count = shape.minElements + below(rng, shape.maxElements - shape.minElements + 1);
	std::size_t next = 1;

	auto make = [&]() {
		auto e = std::make_unique<Element>(randomName(rng), "n" + std::to_string(next++));
		auto attrs = below(rng, shape.maxAttributes + 1);
		std::vector<std::string> used;
		for (std::size_t i = 0; i < attrs; ++i)
		{
			std::string name = pick(rng, kAttrs);
			if (std::find(used.begin(), used.end(), name) != used.end())
				continue;
			used.push_back(name);
			e->appendAttribute(name, chance(rng, 0.2) ? std::string() : randomText(rng));
		}
		return e;
	};

	auto root = make();
	std::vector<Element *> all{ root.get() };
	while (next <= count)
	{
		auto parent = all[below(rng, all.size())];
		if (chance(rng, shape.textChance))
			parent->appendText(randomText(rng));
		all.push_back(&parent->appendElement(make()));
	}
	for (auto e : all)
	{
		if (chance(rng, shape.textChance))
			e->appendText(randomText(rng));
	}
	return Document(std::move(root));
}

CommandSet randomCommandSet(Rng &rng, std::size_t items)
{
	auto ref = [&]() {
		static const char *const refs[] = { "351794", "351795", "n1", "T", "x+1", "a+1+2", "_d1", "e.9", "q-1" };
		return Ref{ pick(rng, refs) };
	};
	auto bind = [&]() -> std::optional<std::string> {
		if (chance(rng, 0.5))
			return std::nullopt;
		return randomName(rng);
	};

	CommandSet set;
	set.name = "random";
	for (std::size_t i = 0; i < items; ++i)
	{
		if (chance(rng, 0.1))
		{
			static const char *const comments[] = { "# ABC 5/27/2011 sense tagged as usage, retag", "#", "   # indented \"quoted\"",
													"# XY 12/1/1999", "#\tTAB", "# generated rule=r match=n1" };
			Comment c;
			c.text = pick(rng, comments);
			parseCommentMetadata(c);
			set.items.emplace_back(std::move(c));
			continue;
		}

		CommandBody body;
		switch (below(rng, 10))
		{
			case 0: body = CreateElement{ randomName(rng), randomRelation(rng), ref(), bind() }; break;
			case 1: body = CreateTextElement{ randomName(rng), randomText(rng), randomRelation(rng), ref(), bind() }; break;
			case 2: body = CreateClone{ ref(), randomRelation(rng), ref(), bind() }; break;
			case 3: body = RemoveElement{ ref() }; break;
			case 4: body = RemoveText{ ref() }; break;
			case 5: body = RemoveAttribute{ ref(), pick(rng, kAttrs) }; break;
			case 6: body = Retag{ ref(), randomName(rng) }; break;
			case 7: body = MoveElement{ ref(), randomRelation(rng), ref() }; break;
			case 8: body = SetAttribute{ ref(), pick(rng, kAttrs), chance(rng, 0.1) ? std::string() : randomText(rng) }; break;
			default: body = SetText{ ref(), chance(rng, 0.1) ? std::string("\x01\x1f") : randomText(rng) }; break;
		}
		set.items.emplace_back(Command{ std::move(body), { set.name, 0 } });
	}
	return set;
}

Command randomCommand(Rng &rng, const Document &doc)
{
	auto ids = doc.ids();
	auto anyId = [&]() { return Ref{ ids[below(rng, ids.size())] }; };

	CommandBody body;
	switch (below(rng, 10))
	{
		case 0: body = CreateElement{ randomName(rng), randomRelation(rng), anyId(), std::nullopt }; break;
		case 1: body = CreateTextElement{ randomName(rng), randomText(rng), randomRelation(rng), anyId(), std::nullopt }; break;
		case 2: body = CreateClone{ anyId(), randomRelation(rng), anyId(), std::nullopt }; break;
		case 3: body = RemoveElement{ anyId() }; break;
		case 4: body = RemoveText{ anyId() }; break;
		case 5: body = RemoveAttribute{ anyId(), pick(rng, kAttrs) }; break;
		case 6: body = Retag{ anyId(), randomName(rng) }; break;
		case 7: body = MoveElement{ anyId(), randomRelation(rng), anyId() }; break;
		case 8: body = SetAttribute{ anyId(), pick(rng, kAttrs), randomText(rng) }; break;
		default: body = SetText{ anyId(), randomText(rng) }; break;
	}
	return Command{ std::move(body), { "random", 0 } };
}

CommandSet randomScript(Rng &rng, const Document &doc, std::size_t commands)
{
	Document scratch(doc);
	Env env;
	std::vector<std::string> variables;

	CommandSet set;
	set.name = "script";
	std::size_t attempts = 0;
	while (set.commandCount() < commands and attempts++ < commands * 50)
	{
		auto cmd = randomCommand(rng, scratch);

		// sometimes go through a bind variable
		if (not variables.empty() and chance(rng, 0.3))
		{
			auto refs = refsOf(cmd.body);
			refs[below(rng, refs.size())]->token = variables[below(rng, variables.size())];
		}
		if (auto b = bindOf(cmd.body); b and chance(rng, 0.4))
			*b = "v" + std::to_string(variables.size() + 1);

		cmd.location = { set.name, set.items.size() + 1 };
		try
		{
			execute(cmd, scratch, env);
		}
		catch (const CommandError &)
		{
			continue;
		}
		if (auto b = bindOf(cmd.body); b and *b)
			variables.push_back(**b);
		set.items.emplace_back(std::move(cmd));
	}
	return set;
}

std::string syntheticLexicon(std::size_t entries)
{
	std::string out = "<LEXICON ID=\"lex\">";
	out.reserve(entries * 900);
	std::size_t id = 100000;
	char buf[128];
	auto open = [&](const char *tag, const char *extra = "") {
		std::snprintf(buf, sizeof(buf), "<%s ID=\"%zu\"%s>", tag, id++, extra);
		out += buf;
	};

	for (std::size_t e = 0; e < entries; ++e)
	{
		open("ENTRY");
		open("FORM");
		open("ORTH");
		out += "word" + std::to_string(e) + "</ORTH>";
		open("PRON");
		out += "w\xc3\xbcrd'" + std::to_string(e % 97) + "</PRON></FORM>";
		for (int s = 1; s <= 4; ++s)
		{
			std::string n = " N=\"" + std::to_string(s) + "\"";
			open("SENSE", n.c_str());
			open("USG", " TYPE=\"time\"");
			out += s % 2 ? "rare</USG>" : "archaic</USG>";
			open("TRANS");
			open("TR");
			out += "meaning " + std::to_string(e) + "." + std::to_string(s) + "</TR>";
			open("TR");
			out += "gloss</TR></TRANS></SENSE>";
		}
		out += "</ENTRY>";
	}
	out += "</LEXICON>";
	return out;
}

TempDir::TempDir()
{
	auto base = fs::temp_directory_path();
	std::string tmpl = (base / "dml-test-XXXXXX").string();
	if (::mkdtemp(tmpl.data()) == nullptr)
		throw std::runtime_error("mkdtemp failed");
	m_path = tmpl;
}

TempDir::~TempDir()
{
	std::error_code ec;
	fs::remove_all(m_path, ec);
}

fs::path fixtures()
{
	return DML_FIXTURES_DIR;
}

} // namespace dmltest
