#include "dml/xml.hpp"

#include <expat.h>

#include <cctype>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_map>

namespace dml
{

namespace
{

struct ParserDeleter
{
	void operator()(XML_Parser p) const { XML_ParserFree(p); }
};

struct Missing
{
	Element *element;
	std::size_t line;
};

class Loader
{
  public:
	explicit Loader(const LoadOptions &options)
		: m_options(options)
		, m_parser(XML_ParserCreate("UTF-8"))
	{
		if (not m_parser)
			throw std::bad_alloc();

		XML_SetUserData(m_parser.get(), this);
		XML_SetXmlDeclHandler(m_parser.get(), &Loader::onXmlDecl);
		XML_SetStartDoctypeDeclHandler(m_parser.get(), &Loader::onDoctype);
		XML_SetElementHandler(m_parser.get(), &Loader::onStart, &Loader::onEnd);
		XML_SetCharacterDataHandler(m_parser.get(), &Loader::onText);
	}

	LoadResult run(std::string_view bytes)
	{
		// a UTF-8 BOM is accepted and ignored
		if (bytes.substr(0, 3) == "\xEF\xBB\xBF")
			bytes.remove_prefix(3);

		auto status = XML_Parse(m_parser.get(), bytes.data(), static_cast<int>(bytes.size()), XML_TRUE);
		if (not m_error.empty())
			throw XmlError(m_error);
		if (status != XML_STATUS_OK)
		{
			throw XmlError(where(XML_GetCurrentLineNumber(m_parser.get())) + ": malformed XML: " +
						   XML_ErrorString(XML_GetErrorCode(m_parser.get())));
		}
		if (not m_root)
			throw XmlError(m_options.sourceName + ": no root element");

		std::vector<AssignedId> assigned;
		std::size_t next = 1;
		for (auto &m : m_missing)
		{
			NodeId id;
			do
				id = "gen-" + std::to_string(next++);
			while (m_seen.count(id));
			setId(*m.element, id);
			m_seen.emplace(id, m.line);
			assigned.push_back({ id, m.element->tag(), m.line });
		}

		Document doc(std::move(m_root), m_options.idAttribute);
		doc.setSourcePath(m_options.sourceName);
		return { std::move(doc), std::move(assigned) };
	}

  private:
	std::string where(std::size_t line) const
	{
		return m_options.sourceName + ":" + std::to_string(line);
	}

	void fail(std::string message)
	{
		if (m_error.empty())
			m_error = std::move(message);
		XML_StopParser(m_parser.get(), XML_FALSE);
	}

	static void setId(Element &e, NodeId id);

	void flushText()
	{
		if (not m_text.empty() and not m_stack.empty())
			m_stack.back()->appendText(std::move(m_text));
		m_text.clear();
	}

	static void XMLCALL onXmlDecl(void *self, const XML_Char *, const XML_Char *encoding, int)
	{
		auto loader = static_cast<Loader *>(self);
		if (encoding == nullptr)
			return;
		std::string enc(encoding);
		for (auto &c : enc)
			c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
		if (enc != "UTF-8" and enc != "UTF8")
			loader->fail(loader->where(XML_GetCurrentLineNumber(loader->m_parser.get())) + ": unsupported encoding \"" +
						 encoding + "\" (only UTF-8 is accepted)");
	}

	static void XMLCALL onDoctype(void *self, const XML_Char *, const XML_Char *, const XML_Char *, int)
	{
		auto loader = static_cast<Loader *>(self);
		loader->fail(loader->where(XML_GetCurrentLineNumber(loader->m_parser.get())) +
					 ": DOCTYPE declarations are not accepted");
	}

	static void XMLCALL onStart(void *self, const XML_Char *name, const XML_Char **attrs)
	{
		auto loader = static_cast<Loader *>(self);
		loader->start(name, attrs);
	}

	static void XMLCALL onEnd(void *self, const XML_Char *)
	{
		auto loader = static_cast<Loader *>(self);
		loader->flushText();
		loader->m_stack.pop_back();
	}

	static void XMLCALL onText(void *self, const XML_Char *s, int len)
	{
		static_cast<Loader *>(self)->m_text.append(s, static_cast<std::size_t>(len));
	}

	void start(const char *name, const char **attrs)
	{
		flushText();
		auto line = XML_GetCurrentLineNumber(m_parser.get());

		auto element = std::make_unique<Element>(name, NodeId{});
		bool hasId = false;
		for (auto a = attrs; *a != nullptr; a += 2)
		{
			if (m_options.idAttribute == a[0])
			{
				std::string id(a[1]);
				if (id.empty())
					return fail(where(line) + ": empty " + m_options.idAttribute + " attribute on <" + name + ">");
				if (auto i = m_seen.find(id); i != m_seen.end())
					return fail(where(line) + ": duplicate id \"" + id + "\" (first defined at " + where(i->second) +
								", again at " + where(line) + ")");
				m_seen.emplace(id, line);
				setId(*element, std::move(id));
				hasId = true;
			}
			else
				element->appendAttribute(a[0], a[1]);
		}

		if (not hasId and m_options.missingIds == MissingIdPolicy::Strict)
			return fail(where(line) + ": element <" + name + "> has no " + m_options.idAttribute + " attribute");

		Element *raw = element.get();
		if (m_stack.empty())
			m_root = std::move(element);
		else
			m_stack.back()->appendElement(std::move(element));
		m_stack.push_back(raw);

		if (not hasId)
			m_missing.push_back({ raw, static_cast<std::size_t>(line) });
	}

	const LoadOptions &m_options;
	std::unique_ptr<XML_ParserStruct, ParserDeleter> m_parser;
	std::unique_ptr<Element> m_root;
	std::vector<Element *> m_stack;
	std::string m_text;
	std::string m_error;
	std::unordered_map<NodeId, std::size_t> m_seen;
	std::vector<Missing> m_missing;
};

} // namespace

namespace detail
{

// ids of detached elements under construction; never used on indexed trees
struct IdAssignment
{
	static void set(Element &e, NodeId id) { e.m_id = std::move(id); }
};

} // namespace detail

void Loader::setId(Element &e, NodeId id)
{
	detail::IdAssignment::set(e, std::move(id));
}

LoadResult loadXml(std::string_view bytes, const LoadOptions &options)
{
	Loader loader(options);
	return loader.run(bytes);
}

LoadResult loadXmlFile(const std::filesystem::path &file, LoadOptions options)
{
	if (options.sourceName == "<memory>")
		options.sourceName = file.string();
	auto bytes = readFile(file);
	return loadXml(bytes, options);
}

// --------------------------------------------------------------------

namespace
{

void escapeText(std::string &out, std::string_view s)
{
	for (char c : s)
	{
		switch (c)
		{
			case '&': out += "&amp;"; break;
			case '<': out += "&lt;"; break;
			case '>': out += "&gt;"; break;
			case '\r': out += "&#13;"; break;
			default: out += c;
		}
	}
}

void escapeAttribute(std::string &out, std::string_view s)
{
	for (char c : s)
	{
		switch (c)
		{
			case '&': out += "&amp;"; break;
			case '<': out += "&lt;"; break;
			case '>': out += "&gt;"; break;
			case '"': out += "&quot;"; break;
			case '\t': out += "&#9;"; break;
			case '\n': out += "&#10;"; break;
			case '\r': out += "&#13;"; break;
			default: out += c;
		}
	}
}

class Writer
{
  public:
	explicit Writer(const Document &doc)
		: m_idAttribute(doc.idAttribute())
	{
	}

	void write(const Element &e, std::size_t depth, bool indent)
	{
		m_out += '<';
		m_out += e.tag();
		m_out += ' ';
		m_out += m_idAttribute;
		m_out += "=\"";
		escapeAttribute(m_out, e.id());
		m_out += '"';
		for (auto &[name, value] : e.attributes())
		{
			m_out += ' ';
			m_out += name;
			m_out += "=\"";
			escapeAttribute(m_out, value);
			m_out += '"';
		}

		bool empty = true, elements = false, text = false;
		for (auto &n : e.children())
		{
			if (auto t = asText(n))
			{
				if (not t->content.empty())
					empty = false;
				text = text or not std::all_of(t->content.begin(), t->content.end(), isXmlSpace);
			}
			else
				empty = false, elements = true;
		}

		if (empty)
		{
			m_out += "/>";
			return;
		}
		m_out += '>';

		// indentation replaces whitespace-only text between elements
		bool childIndent = indent and elements and not text;
		for (auto &n : e.children())
		{
			if (auto t = asText(n))
			{
				if (not childIndent)
					escapeText(m_out, t->content);
			}
			else
			{
				if (childIndent)
					newline(depth + 1);
				write(*asElement(n), depth + 1, childIndent);
			}
		}
		if (childIndent)
			newline(depth);

		m_out += "</";
		m_out += e.tag();
		m_out += '>';
	}

	std::string take() { return std::move(m_out); }

  private:
	void newline(std::size_t depth)
	{
		m_out += '\n';
		m_out.append(depth * 2, ' ');
	}

	const std::string &m_idAttribute;
	std::string m_out;
};

} // namespace

std::string serializeXml(const Document &doc, const SerializeOptions &options)
{
	Writer writer(doc);
	writer.write(doc.root(), 0, options.prettyPrint);
	auto result = writer.take();
	if (options.prettyPrint)
		result += '\n';
	return result;
}

std::string readFile(const std::filesystem::path &file)
{
	std::ifstream in(file, std::ios::binary);
	if (not in)
		throw IoError("cannot open " + file.string());
	std::ostringstream s;
	s << in.rdbuf();
	return s.str();
}

void writeFile(const std::filesystem::path &file, std::string_view contents)
{
	std::ofstream out(file, std::ios::binary | std::ios::trunc);
	if (not out)
		throw IoError("cannot write " + file.string());
	out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
	if (not out)
		throw IoError("error writing " + file.string());
}

} // namespace dml
