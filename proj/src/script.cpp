#include "dml/script.hpp"
#include "dml/xml.hpp"
#include "overloaded.hpp"

#include <array>
#include <cstdint>

namespace dml
{

namespace
{

struct Token
{
	std::string value;
	bool quoted = false;
};

std::string upper(std::string_view s)
{
	std::string r(s);
	for (auto &c : r)
	{
		if (c >= 'a' and c <= 'z')
			c = static_cast<char>(c - 'a' + 'A');
	}
	return r;
}

bool isBlank(char c)
{
	return c == ' ' or c == '\t';
}

void appendUtf8(std::string &out, std::uint32_t cp)
{
	if (cp < 0x80)
		out += static_cast<char>(cp);
	else if (cp < 0x800)
	{
		out += static_cast<char>(0xC0 | (cp >> 6));
		out += static_cast<char>(0x80 | (cp & 0x3F));
	}
	else if (cp < 0x10000)
	{
		out += static_cast<char>(0xE0 | (cp >> 12));
		out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
		out += static_cast<char>(0x80 | (cp & 0x3F));
	}
	else
	{
		out += static_cast<char>(0xF0 | (cp >> 18));
		out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
		out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
		out += static_cast<char>(0x80 | (cp & 0x3F));
	}
}

class LineParser
{
  public:
	LineParser(std::string_view line, SourceLocation loc)
		: m_line(line)
		, m_loc(std::move(loc))
	{
	}

	std::vector<Token> tokenize()
	{
		std::vector<Token> result;
		std::size_t i = 0;
		while (i < m_line.size())
		{
			if (isBlank(m_line[i]))
			{
				++i;
				continue;
			}

			if (m_line[i] == '"')
			{
				result.push_back({ readString(i), true });
				continue;
			}

			auto start = i;
			while (i < m_line.size() and not isBlank(m_line[i]))
			{
				if (m_line[i] == '"')
					error("unexpected '\"' inside token \"" + std::string(m_line.substr(start, i - start + 1)) + "\"");
				++i;
			}
			result.push_back({ std::string(m_line.substr(start, i - start)), false });
		}
		return result;
	}

	[[noreturn]] void error(const std::string &message) const
	{
		throw ParseError(m_loc, message);
	}

  private:
	std::uint32_t hex4(std::size_t &i)
	{
		if (i + 4 > m_line.size())
			error("bad escape: incomplete \\u sequence");
		std::uint32_t v = 0;
		for (int k = 0; k < 4; ++k)
		{
			char c = m_line[i++];
			v <<= 4;
			if (c >= '0' and c <= '9')
				v |= static_cast<std::uint32_t>(c - '0');
			else if (c >= 'a' and c <= 'f')
				v |= static_cast<std::uint32_t>(c - 'a' + 10);
			else if (c >= 'A' and c <= 'F')
				v |= static_cast<std::uint32_t>(c - 'A' + 10);
			else
				error(std::string("bad escape: invalid hex digit '") + c + "' in \\u sequence");
		}
		return v;
	}

	std::string readString(std::size_t &i)
	{
		std::string result;
		++i; // opening quote
		for (;;)
		{
			if (i >= m_line.size())
				error("unterminated string");

			char c = m_line[i++];
			if (c == '"')
				break;
			if (c != '\\')
			{
				result += c;
				continue;
			}

			if (i >= m_line.size())
				error("unterminated string");
			char e = m_line[i++];
			switch (e)
			{
				case '\\': result += '\\'; break;
				case '"': result += '"'; break;
				case 'n': result += '\n'; break;
				case 't': result += '\t'; break;
				case 'u':
				{
					auto cp = hex4(i);
					if (cp >= 0xD800 and cp <= 0xDBFF)
					{
						if (i + 6 > m_line.size() or m_line[i] != '\\' or m_line[i + 1] != 'u')
							error("bad escape: unpaired surrogate");
						i += 2;
						auto low = hex4(i);
						if (low < 0xDC00 or low > 0xDFFF)
							error("bad escape: unpaired surrogate");
						cp = 0x10000 + ((cp - 0xD800) << 10) + (low - 0xDC00);
					}
					else if (cp >= 0xDC00 and cp <= 0xDFFF)
						error("bad escape: unpaired surrogate");
					appendUtf8(result, cp);
					break;
				}
				default:
					error(std::string("bad escape '\\") + e + "'");
			}
		}

		if (i < m_line.size() and not isBlank(m_line[i]))
			error("missing whitespace after string");
		return result;
	}

	std::string_view m_line;
	SourceLocation m_loc;
};

enum class Object
{
	None,
	Element,
	TextElement,
	Clone,
	Text,
	Attribute
};

struct VerbInfo
{
	std::string_view verb;
	std::vector<std::pair<std::string_view, Object>> objects;
};

const std::array<VerbInfo, 5> &verbs()
{
	static const std::array<VerbInfo, 5> table{ {
		{ "CREATE", { { "ELEMENT", Object::Element }, { "TEXTELEMENT", Object::TextElement }, { "CLONE", Object::Clone } } },
		{ "REMOVE", { { "ELEMENT", Object::Element }, { "TEXT", Object::Text }, { "ATTRIBUTE", Object::Attribute } } },
		{ "RETAG", {} },
		{ "MOVE", { { "ELEMENT", Object::Element } } },
		{ "SET", { { "ATTRIBUTE", Object::Attribute }, { "TEXT", Object::Text } } },
	} };
	return table;
}

const VerbInfo *findVerb(std::string_view v)
{
	for (auto &info : verbs())
	{
		if (info.verb == v)
			return &info;
	}
	return nullptr;
}

std::optional<Object> findObject(const VerbInfo &info, std::string_view o)
{
	for (auto &[name, obj] : info.objects)
	{
		if (name == o)
			return obj;
	}
	return std::nullopt;
}

std::string objectList(const VerbInfo &info)
{
	static const std::array<std::pair<Object, const char *>, 5> names{ { { Object::Element, "Element" },
																		 { Object::TextElement, "TextElement" },
																		 { Object::Clone, "Clone" },
																		 { Object::Text, "Text" },
																		 { Object::Attribute, "Attribute" } } };
	std::string result;
	for (auto &[_, obj] : info.objects)
	{
		for (auto &[o, n] : names)
		{
			if (o == obj)
			{
				if (not result.empty())
					result += ", ";
				result += n;
			}
		}
	}
	return result;
}

class CommandBuilder
{
  public:
	CommandBuilder(LineParser &parser, std::string spelling, std::vector<Token> args, ParseOptions options)
		: m_parser(parser)
		, m_spelling(std::move(spelling))
		, m_args(std::move(args))
		, m_options(options)
	{
	}

	/// checks argument count; \a createForm allows one optional trailing bind variable
	void arity(std::size_t n, bool createForm)
	{
		auto count = m_args.size();
		if (count == n or (createForm and count == n + 1))
			return;

		if (not createForm and count == n + 1 and not m_args.back().quoted and isName(m_args.back().value))
			m_parser.error("bind variable \"" + m_args.back().value + "\" is only allowed on CREATE commands");

		if (createForm)
			m_parser.error(m_spelling + " expects " + std::to_string(n) + " or " + std::to_string(n + 1) + " arguments");
		m_parser.error(m_spelling + " expects " + std::to_string(n) + " argument" + (n == 1 ? "" : "s"));
	}

	Ref ref(std::size_t i)
	{
		auto &t = m_args[i];
		if (t.quoted)
			m_parser.error("expected an element reference, found quoted string \"" + t.value + "\"");
		return Ref{ t.value };
	}

	std::string name(std::size_t i, const char *what)
	{
		auto &t = m_args[i];
		if (t.quoted or not isName(t.value))
			m_parser.error(std::string("invalid ") + what + " \"" + t.value + "\"");
		return t.value;
	}

	std::string text(std::size_t i)
	{
		auto &t = m_args[i];
		if (not t.quoted)
			m_parser.error("expected a quoted string, found \"" + t.value + "\"");
		return t.value;
	}

	Relation relation(std::size_t i)
	{
		auto &t = m_args[i];
		auto r = t.quoted ? std::nullopt : parseRelation(t.value);
		if (not r)
			m_parser.error("unknown relation \"" + t.value + "\" (expected under, firstunder, before or after)");
		return *r;
	}

	std::optional<std::string> bind(std::size_t i)
	{
		if (i >= m_args.size())
			return std::nullopt;
		auto &t = m_args[i];
		if (m_options.placeholders and not t.quoted and t.value.size() > 1 and t.value[0] == '$' and
			isName(std::string_view(t.value).substr(1)))
			return t.value;
		return name(i, "variable name");
	}

  private:
	LineParser &m_parser;
	std::string m_spelling;
	std::vector<Token> m_args;
	ParseOptions m_options;
};

CommandBody parseCommand(LineParser &parser, std::vector<Token> tokens, ParseOptions options)
{
	auto &first = tokens.front();
	if (first.quoted)
		parser.error("expected a verb, found quoted string");

	auto head = upper(first.value);
	const VerbInfo *verb = findVerb(head);
	std::optional<Object> object;
	std::size_t argStart = 1;

	if (verb == nullptr)
	{
		// fused spelling like REMOVEattribute
		for (auto &info : verbs())
		{
			if (head.size() > info.verb.size() and head.compare(0, info.verb.size(), info.verb) == 0)
			{
				if (auto o = findObject(info, std::string_view(head).substr(info.verb.size())))
				{
					verb = &info;
					object = o;
					break;
				}
			}
		}
		if (verb == nullptr)
			parser.error("unknown verb \"" + first.value + "\"");
	}
	else if (not verb->objects.empty())
	{
		if (tokens.size() < 2 or tokens[1].quoted)
			parser.error(std::string(verb->verb) + " expects an object (" + objectList(*verb) + ")");
		object = findObject(*verb, upper(tokens[1].value));
		if (not object)
			parser.error("unknown object \"" + tokens[1].value + "\" for " + std::string(verb->verb) + " (expected " +
						 objectList(*verb) + ")");
		argStart = 2;
	}

	std::vector<Token> args(std::make_move_iterator(tokens.begin() + static_cast<std::ptrdiff_t>(argStart)),
							std::make_move_iterator(tokens.end()));

	auto v = verb->verb;
	auto o = object.value_or(Object::None);

	if (v == "CREATE" and o == Object::Element)
	{
		CommandBuilder b(parser, "CREATE Element", std::move(args), options);
		b.arity(3, true);
		return CreateElement{ b.name(0, "tag name"), b.relation(1), b.ref(2), b.bind(3) };
	}
	if (v == "CREATE" and o == Object::TextElement)
	{
		CommandBuilder b(parser, "CREATE TextElement", std::move(args), options);
		b.arity(4, true);
		return CreateTextElement{ b.name(0, "tag name"), b.text(1), b.relation(2), b.ref(3), b.bind(4) };
	}
	if (v == "CREATE" and o == Object::Clone)
	{
		CommandBuilder b(parser, "CREATE Clone", std::move(args), options);
		b.arity(3, true);
		return CreateClone{ b.ref(0), b.relation(1), b.ref(2), b.bind(3) };
	}
	if (v == "REMOVE" and o == Object::Element)
	{
		CommandBuilder b(parser, "REMOVE Element", std::move(args), options);
		b.arity(1, false);
		return RemoveElement{ b.ref(0) };
	}
	if (v == "REMOVE" and o == Object::Text)
	{
		CommandBuilder b(parser, "REMOVE Text", std::move(args), options);
		b.arity(1, false);
		return RemoveText{ b.ref(0) };
	}
	if (v == "REMOVE" and o == Object::Attribute)
	{
		CommandBuilder b(parser, "REMOVE Attribute", std::move(args), options);
		b.arity(2, false);
		return RemoveAttribute{ b.ref(0), b.name(1, "attribute name") };
	}
	if (v == "RETAG")
	{
		CommandBuilder b(parser, "RETAG", std::move(args), options);
		b.arity(2, false);
		return Retag{ b.ref(0), b.name(1, "tag name") };
	}
	if (v == "MOVE")
	{
		CommandBuilder b(parser, "MOVE Element", std::move(args), options);
		b.arity(3, false);
		return MoveElement{ b.ref(0), b.relation(1), b.ref(2) };
	}
	if (v == "SET" and o == Object::Attribute)
	{
		CommandBuilder b(parser, "SET Attribute", std::move(args), options);
		b.arity(3, false);
		return SetAttribute{ b.ref(0), b.name(1, "attribute name"), b.text(2) };
	}

	CommandBuilder b(parser, "SET Text", std::move(args), options);
	b.arity(2, false);
	return SetText{ b.ref(0), b.text(1) };
}

} // namespace

CommandSet parseScript(std::string_view text, const std::string &name, ParseOptions options)
{
	CommandSet set;
	set.name = name;
	set.sourcePath = name;

	std::size_t lineNo = 0;
	while (not text.empty())
	{
		++lineNo;
		auto eol = text.find('\n');
		auto line = text.substr(0, eol);
		text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);

		if (not line.empty() and line.back() == '\r')
			line.remove_suffix(1);

		auto first = line.find_first_not_of(" \t");
		if (first == std::string_view::npos)
			continue;

		SourceLocation loc{ name, lineNo };

		if (line[first] == '#')
		{
			Comment c{ std::string(line), std::nullopt, std::nullopt, loc };
			parseCommentMetadata(c);
			set.items.emplace_back(std::move(c));
			continue;
		}

		LineParser parser(line, loc);
		auto tokens = parser.tokenize();
		set.items.emplace_back(Command{ parseCommand(parser, std::move(tokens), options), loc });
	}
	return set;
}

CommandSet parseScriptFile(const std::filesystem::path &file)
{
	auto text = readFile(file);
	return parseScript(text, file.string());
}

std::string quote(std::string_view s)
{
	static const char hex[] = "0123456789ABCDEF";
	std::string result = "\"";
	for (char c : s)
	{
		auto u = static_cast<unsigned char>(c);
		switch (c)
		{
			case '\\': result += "\\\\"; break;
			case '"': result += "\\\""; break;
			case '\n': result += "\\n"; break;
			case '\t': result += "\\t"; break;
			default:
				if (u < 0x20 or u == 0x7F)
				{
					result += "\\u00";
					result += hex[u >> 4];
					result += hex[u & 0xF];
				}
				else
					result += c;
		}
	}
	result += '"';
	return result;
}

namespace
{

using detail::overloaded;

void appendBind(std::string &out, const std::optional<std::string> &bind)
{
	if (bind)
		out += " " + *bind;
}

} // namespace

std::string printCommand(const CommandBody &body)
{
	std::string out(spellingOf(body));
	auto rel = [](Relation r) { return std::string(toString(r)); };

	std::visit(overloaded{
				   [&](const CreateElement &c) {
					   out += " " + c.tag + " " + rel(c.relation) + " " + c.anchor.token;
					   appendBind(out, c.bind);
				   },
				   [&](const CreateTextElement &c) {
					   out += " " + c.tag + " " + quote(c.text) + " " + rel(c.relation) + " " + c.anchor.token;
					   appendBind(out, c.bind);
				   },
				   [&](const CreateClone &c) {
					   out += " " + c.source.token + " " + rel(c.relation) + " " + c.anchor.token;
					   appendBind(out, c.bind);
				   },
				   [&](const RemoveElement &c) { out += " " + c.target.token; },
				   [&](const RemoveText &c) { out += " " + c.target.token; },
				   [&](const RemoveAttribute &c) { out += " " + c.target.token + " " + c.attr; },
				   [&](const Retag &c) { out += " " + c.target.token + " " + c.tag; },
				   [&](const MoveElement &c) { out += " " + c.target.token + " " + rel(c.relation) + " " + c.anchor.token; },
				   [&](const SetAttribute &c) { out += " " + c.target.token + " " + c.attr + " " + quote(c.value); },
				   [&](const SetText &c) { out += " " + c.target.token + " " + quote(c.text); },
			   },
			   body);
	return out;
}

std::string printScript(const CommandSet &set)
{
	std::string out;
	for (auto &item : set.items)
	{
		if (auto c = std::get_if<Comment>(&item))
			out += c->text;
		else
			out += printCommand(std::get<Command>(item).body);
		out += '\n';
	}
	return out;
}

} // namespace dml
