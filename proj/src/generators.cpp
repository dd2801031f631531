#include "dml/generators.hpp"
#include "dml/script.hpp"
#include "dml/xml.hpp"
#include "overloaded.hpp"

#include "json.hpp"

#include <algorithm>
#include <unordered_map>

namespace dml
{

using json = nlohmann::json;

// --------------------------------------------------------------------
// matching

bool matches(const Element &e, const Pattern &p)
{
	if (p.tag != "*" and e.tag() != p.tag)
		return false;

	for (auto &t : p.attrs)
	{
		auto v = e.attribute(t.name);
		switch (t.op)
		{
			case AttrTest::Op::Exists:
				if (v == nullptr)
					return false;
				break;
			case AttrTest::Op::Absent:
				if (v != nullptr)
					return false;
				break;
			case AttrTest::Op::Equals:
				if (v == nullptr or *v != t.value)
					return false;
				break;
		}
	}

	auto parent = e.parent();
	if ((p.requireParent or p.parentTag) and parent == nullptr)
		return false;
	if (p.parentTag and parent->tag() != *p.parentTag)
		return false;
	if (p.rootChild and *p.rootChild != (parent != nullptr and parent->parent() == nullptr))
		return false;

	if (p.requirePrev or p.prevTag)
	{
		auto prev = e.previousElement();
		if (prev == nullptr or (p.prevTag and prev->tag() != *p.prevTag))
			return false;
	}

	if (p.childCount)
	{
		auto n = e.elementCount();
		auto &c = *p.childCount;
		if ((c.exact and n != *c.exact) or (c.min and n < *c.min) or (c.max and n > *c.max))
			return false;
	}

	if (p.text)
	{
		auto text = e.text();
		if (p.text->kind == TextTest::Kind::Equals ? text != p.text->value : not std::regex_search(text, *p.text->regex))
			return false;
	}

	return true;
}

std::vector<Match> matchAll(const Document &doc, const Pattern &pattern)
{
	std::vector<Match> result;
	std::vector<const Element *> stack{ &doc.root() };
	while (not stack.empty())
	{
		auto e = stack.back();
		stack.pop_back();

		if (matches(*e, pattern))
		{
			Match m{ e->id(), std::nullopt, std::nullopt };
			if (auto parent = e->parent())
				m.parent = parent->id();
			if (auto prev = e->previousElement())
				m.prev = prev->id();
			result.push_back(std::move(m));
		}

		auto &children = e->children();
		for (auto it = children.rbegin(); it != children.rend(); ++it)
		{
			if (auto c = asElement(*it))
				stack.push_back(c);
		}
	}
	return result;
}

// --------------------------------------------------------------------
// templates

namespace
{

using detail::overloaded;

enum class Capture
{
	Self,
	Parent,
	Prev
};

std::optional<Capture> captureNamed(std::string_view name)
{
	if (name == "SELF")
		return Capture::Self;
	if (name == "PARENT")
		return Capture::Parent;
	if (name == "PREV")
		return Capture::Prev;
	return std::nullopt;
}

/// k for "NEWk", k >= 1
std::optional<std::size_t> newIndex(std::string_view name)
{
	if (name.size() < 4 or name.substr(0, 3) != "NEW")
		return std::nullopt;
	std::size_t k = 0;
	for (char c : name.substr(3))
	{
		if (c < '0' or c > '9')
			return std::nullopt;
		k = k * 10 + static_cast<std::size_t>(c - '0');
	}
	if (k == 0)
		return std::nullopt;
	return k;
}

/// one ${CAPTURE.text} or ${CAPTURE.attr.NAME} reference inside a quoted slot
struct Interpolation
{
	std::size_t begin, end;
	Capture capture;
	std::optional<std::string> attr;
};

std::vector<Interpolation> interpolations(const std::string &s, const std::string &rule)
{
	std::vector<Interpolation> result;
	std::size_t pos = 0;
	while ((pos = s.find("${", pos)) != std::string::npos)
	{
		auto close = s.find('}', pos);
		if (close == std::string::npos)
			throw ConfigError("rule \"" + rule + "\": unterminated ${ in \"" + s + "\"");
		auto body = std::string_view(s).substr(pos + 2, close - pos - 2);

		auto dot = body.find('.');
		auto capture = captureNamed(body.substr(0, dot));
		if (not capture or dot == std::string_view::npos)
			throw ConfigError("rule \"" + rule + "\": unbound placeholder ${" + std::string(body) + "}");

		auto field = body.substr(dot + 1);
		Interpolation ip{ pos, close + 1, *capture, std::nullopt };
		if (field.substr(0, 5) == "attr." and field.size() > 5)
			ip.attr = std::string(field.substr(5));
		else if (field != "text")
			throw ConfigError("rule \"" + rule + "\": unknown field in ${" + std::string(body) + "}");

		result.push_back(ip);
		pos = close + 1;
	}
	return result;
}

std::vector<std::string *> textSlots(CommandBody &body)
{
	return std::visit(overloaded{
						  [](CreateTextElement &c) { return std::vector<std::string *>{ &c.text }; },
						  [](SetAttribute &c) { return std::vector<std::string *>{ &c.value }; },
						  [](SetText &c) { return std::vector<std::string *>{ &c.text }; },
						  [](auto &) { return std::vector<std::string *>{}; },
					  },
					  body);
}

struct Uses
{
	bool parent = false;
	bool prev = false;
};

Uses validate(std::vector<Command> &emit, const std::string &rule)
{
	Uses uses;
	std::set<std::size_t> bound;

	auto note = [&](Capture c) {
		if (c == Capture::Parent)
			uses.parent = true;
		if (c == Capture::Prev)
			uses.prev = true;
	};

	for (auto &cmd : emit)
	{
		for (auto ref : refsOf(cmd.body))
		{
			if (ref->token.empty() or ref->token[0] != '$')
				continue;
			auto name = std::string_view(ref->token).substr(1);
			if (auto c = captureNamed(name))
				note(*c);
			else if (auto k = newIndex(name); k and bound.count(*k))
				;
			else
				throw ConfigError("rule \"" + rule + "\": unbound placeholder " + ref->token + " at " + cmd.location.str());
		}

		for (auto slot : textSlots(cmd.body))
		{
			for (auto &ip : interpolations(*slot, rule))
				note(ip.capture);
		}

		if (auto bind = bindOf(cmd.body); bind and *bind)
		{
			auto &name = **bind;
			auto k = name.size() > 1 and name[0] == '$' ? newIndex(std::string_view(name).substr(1)) : std::nullopt;
			if (not k)
				throw ConfigError("rule \"" + rule + "\": bind variable \"" + name +
								  "\" must be a $NEWk placeholder at " + cmd.location.str());
			if (not bound.insert(*k).second)
				throw ConfigError("rule \"" + rule + "\": " + name + " is bound twice");
		}
	}
	return uses;
}

} // namespace

Rule makeRule(std::string name, Pattern pattern, const std::vector<std::string> &emit)
{
	std::string text;
	for (auto &line : emit)
	{
		if (line.find('\n') != std::string::npos)
			throw ConfigError("rule \"" + name + "\": template must be a single line");
		text += line;
		text += '\n';
	}

	CommandSet parsed;
	try
	{
		parsed = parseScript(text, "rule " + name, ParseOptions{ true });
	}
	catch (const ParseError &ex)
	{
		throw ConfigError("rule \"" + name + "\": " + ex.what());
	}

	Rule rule{ std::move(name), std::move(pattern), {} };
	for (auto &item : parsed.items)
	{
		if (auto cmd = std::get_if<Command>(&item))
			rule.emit.push_back(std::move(*cmd));
	}

	auto uses = validate(rule.emit, rule.name);
	rule.match.requireParent = rule.match.requireParent or uses.parent;
	rule.match.requirePrev = rule.match.requirePrev or uses.prev;
	return rule;
}

namespace
{

Pattern parsePattern(const json &m, const std::string &rule)
{
	Pattern p;
	if (not m.is_object())
		throw ConfigError("rule \"" + rule + "\": match must be an object");

	p.tag = m.value("tag", std::string("*"));

	if (auto a = m.find("attrs"); a != m.end())
	{
		for (auto &t : *a)
		{
			AttrTest test;
			test.name = t.at("name").get<std::string>();
			auto op = t.value("op", std::string("exists"));
			if (op == "equals")
			{
				test.op = AttrTest::Op::Equals;
				test.value = t.at("value").get<std::string>();
			}
			else if (op == "exists")
				test.op = AttrTest::Op::Exists;
			else if (op == "absent")
				test.op = AttrTest::Op::Absent;
			else
				throw ConfigError("rule \"" + rule + "\": unknown attribute test \"" + op + "\"");
			p.attrs.push_back(std::move(test));
		}
	}

	if (auto c = m.find("childCount"); c != m.end())
	{
		ChildCount cc;
		if (c->is_number_unsigned())
			cc.exact = c->get<std::size_t>();
		else if (c->is_object())
		{
			if (c->contains("exact"))
				cc.exact = c->at("exact").get<std::size_t>();
			if (c->contains("min"))
				cc.min = c->at("min").get<std::size_t>();
			if (c->contains("max"))
				cc.max = c->at("max").get<std::size_t>();
		}
		else
			throw ConfigError("rule \"" + rule + "\": childCount must be a number or {exact,min,max}");
		p.childCount = cc;
	}

	if (auto t = m.find("text"); t != m.end())
	{
		TextTest test;
		if (t->is_string())
			test.value = t->get<std::string>();
		else if (t->contains("equals"))
			test.value = t->at("equals").get<std::string>();
		else if (t->contains("matches"))
		{
			test.kind = TextTest::Kind::Matches;
			test.value = t->at("matches").get<std::string>();
			try
			{
				test.regex = std::make_shared<const std::regex>(test.value);
			}
			catch (const std::regex_error &ex)
			{
				throw ConfigError("rule \"" + rule + "\": bad regular expression \"" + test.value + "\": " + ex.what());
			}
		}
		else
			throw ConfigError("rule \"" + rule + "\": text must be a string or {equals|matches}");
		p.text = std::move(test);
	}

	if (auto c = m.find("context"); c != m.end())
	{
		if (c->contains("parent"))
			p.parentTag = c->at("parent").get<std::string>();
		if (c->contains("prev"))
			p.prevTag = c->at("prev").get<std::string>();
		if (c->contains("rootChild"))
			p.rootChild = c->at("rootChild").get<bool>();
	}
	return p;
}

} // namespace

std::vector<Rule> parseRules(std::string_view text, const std::string &sourceName)
{
	std::vector<Rule> rules;
	try
	{
		auto doc = json::parse(text);
		for (auto &r : doc.at("rules"))
		{
			auto name = r.at("name").get<std::string>();
			auto pattern = parsePattern(r.at("match"), name);
			auto emit = r.at("emit").get<std::vector<std::string>>();
			rules.push_back(makeRule(std::move(name), std::move(pattern), emit));
		}
	}
	catch (const json::exception &ex)
	{
		throw ConfigError(sourceName + ": invalid rule file: " + ex.what());
	}

	std::set<std::string> names;
	for (auto &r : rules)
	{
		if (not names.insert(r.name).second)
			throw ConfigError(sourceName + ": duplicate rule name \"" + r.name + "\"");
	}
	return rules;
}

std::vector<Rule> loadRules(const std::filesystem::path &file)
{
	return parseRules(readFile(file), file.string());
}

// --------------------------------------------------------------------
// generation

std::string markerComment(std::string_view rule, const NodeId &match)
{
	return "# generated rule=" + std::string(rule) + " match=" + match;
}

std::optional<GeneratedMarker> parseMarker(const Comment &c)
{
	static const std::string_view prefix = "# generated rule=";
	std::string_view s(c.text);
	if (s.substr(0, prefix.size()) != prefix)
		return std::nullopt;
	s.remove_prefix(prefix.size());
	auto sep = s.find(" match=");
	if (sep == std::string_view::npos)
		return std::nullopt;
	return GeneratedMarker{ std::string(s.substr(0, sep)), NodeId(s.substr(sep + 7)) };
}

namespace
{

class SetWriter
{
  public:
	SetWriter(const Document &doc, const std::string &name)
		: m_doc(doc)
	{
		m_set.name = name;
		m_set.sourcePath = name;
	}

	void comment(std::string text)
	{
		Comment c{ std::move(text), std::nullopt, std::nullopt, next() };
		m_set.items.emplace_back(std::move(c));
	}

	void command(CommandBody body)
	{
		m_set.items.emplace_back(Command{ std::move(body), next() });
	}

	/// fresh set-unique bind variable that does not shadow a document id
	std::string freshVariable()
	{
		std::string name;
		do
			name = "_g" + std::to_string(++m_vars);
		while (m_doc.contains(name));
		return name;
	}

	CommandSet take() { return std::move(m_set); }

  private:
	SourceLocation next() { return { m_set.name, ++m_line }; }

	const Document &m_doc;
	CommandSet m_set;
	std::size_t m_line = 0;
	std::size_t m_vars = 0;
};

const Element *captured(const Document &doc, const Match &m, Capture c)
{
	switch (c)
	{
		case Capture::Self: return doc.find(m.self);
		case Capture::Parent: return m.parent ? doc.find(*m.parent) : nullptr;
		case Capture::Prev: return m.prev ? doc.find(*m.prev) : nullptr;
	}
	return nullptr;
}

std::string interpolate(const std::string &s, const Document &doc, const Match &m, const std::string &rule)
{
	auto ips = interpolations(s, rule);
	if (ips.empty())
		return s;

	std::string result;
	std::size_t pos = 0;
	for (auto &ip : ips)
	{
		result.append(s, pos, ip.begin - pos);
		if (auto e = captured(doc, m, ip.capture))
		{
			if (ip.attr)
			{
				if (auto v = e->attribute(*ip.attr))
					result += *v;
			}
			else
				result += e->text();
		}
		pos = ip.end;
	}
	result.append(s, pos, std::string::npos);
	return result;
}

} // namespace

CommandSet generate(const Document &doc, const std::vector<Rule> &rules, const std::string &setName)
{
	SetWriter out(doc, setName);

	for (auto &rule : rules)
	{
		for (auto &m : matchAll(doc, rule.match))
		{
			out.comment(markerComment(rule.name, m.self));

			std::unordered_map<std::string, std::string> fresh;
			auto substitute = [&](std::string &token) {
				if (token.empty() or token[0] != '$')
					return;
				auto name = token.substr(1);
				if (auto c = captureNamed(name))
					token = captured(doc, m, *c)->id();
				else
				{
					auto [it, inserted] = fresh.try_emplace(name);
					if (inserted)
						it->second = out.freshVariable();
					token = it->second;
				}
			};

			for (auto &tmpl : rule.emit)
			{
				auto body = tmpl.body;
				for (auto ref : refsOf(body))
					substitute(ref->token);
				if (auto bind = bindOf(body); bind and *bind)
					substitute(**bind);
				for (auto slot : textSlots(body))
					*slot = interpolate(*slot, doc, m, rule.name);
				out.command(std::move(body));
			}
		}
	}

	return out.take();
}

// --------------------------------------------------------------------
// charmap

Charmap parseCharmap(std::string_view text, const std::string &sourceName)
{
	Charmap table;
	try
	{
		auto doc = json::parse(text);
		if (not doc.is_object())
			throw ConfigError(sourceName + ": charmap must be a JSON object of strings");
		for (auto &[key, value] : doc.items())
		{
			if (key.empty())
				throw ConfigError(sourceName + ": charmap keys must be non-empty");
			table.emplace_back(key, value.get<std::string>());
		}
	}
	catch (const json::exception &ex)
	{
		throw ConfigError(sourceName + ": invalid charmap: " + ex.what());
	}
	return table;
}

Charmap loadCharmap(const std::filesystem::path &file)
{
	return parseCharmap(readFile(file), file.string());
}

namespace
{

class CompiledCharmap
{
  public:
	explicit CompiledCharmap(const Charmap &table)
	{
		for (auto &entry : table)
		{
			if (entry.first.empty())
				throw ConfigError("charmap keys must be non-empty");
			m_byFirst[entry.first.front()].push_back(&entry);
		}
		for (auto &[_, v] : m_byFirst)
			std::stable_sort(v.begin(), v.end(), [](auto a, auto b) { return a->first.size() > b->first.size(); });
	}

	std::string apply(std::string_view text) const
	{
		std::string result;
		std::size_t i = 0;
		while (i < text.size())
		{
			const Entry *hit = nullptr;
			if (auto c = m_byFirst.find(text[i]); c != m_byFirst.end())
			{
				for (auto entry : c->second)
				{
					if (text.compare(i, entry->first.size(), entry->first) == 0)
					{
						hit = entry;
						break;
					}
				}
			}

			if (hit)
			{
				result += hit->second;
				i += hit->first.size();
			}
			else
				result += text[i++];
		}
		return result;
	}

  private:
	using Entry = std::pair<std::string, std::string>;
	std::unordered_map<char, std::vector<const Entry *>> m_byFirst;
};

} // namespace

std::string applyCharmap(std::string_view text, const Charmap &table)
{
	return CompiledCharmap(table).apply(text);
}

CommandSet charmapGenerate(const Document &doc, const std::set<std::string> &tags, const Charmap &table,
						   const std::string &setName)
{
	SetWriter out(doc, setName);
	if (table.empty())
		return out.take();
	CompiledCharmap charmap(table);

	std::vector<const Element *> stack{ &doc.root() };
	while (not stack.empty())
	{
		auto e = stack.back();
		stack.pop_back();

		if (tags.count(e->tag()) and e->hasText())
		{
			auto text = e->text();
			auto mapped = charmap.apply(text);
			if (mapped != text)
			{
				out.comment(markerComment(kCharmapRule, e->id()));
				out.command(SetText{ Ref{ e->id() }, std::move(mapped) });
			}
		}

		auto &children = e->children();
		for (auto it = children.rbegin(); it != children.rend(); ++it)
		{
			if (auto c = asElement(*it))
				stack.push_back(c);
		}
	}
	return out.take();
}

} // namespace dml
