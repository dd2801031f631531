#include "dml/document.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace dml
{

std::string_view toString(Relation r)
{
	switch (r)
	{
		case Relation::Under: return "under";
		case Relation::FirstUnder: return "firstunder";
		case Relation::Before: return "before";
		case Relation::After: return "after";
	}
	return "under";
}

namespace
{

std::string lower(std::string_view s)
{
	std::string r(s);
	for (auto &c : r)
	{
		if (c >= 'A' and c <= 'Z')
			c = static_cast<char>(c - 'A' + 'a');
	}
	return r;
}

} // namespace

std::optional<Relation> parseRelation(std::string_view token)
{
	auto t = lower(token);
	if (t == "under")
		return Relation::Under;
	if (t == "firstunder")
		return Relation::FirstUnder;
	if (t == "before")
		return Relation::Before;
	if (t == "after")
		return Relation::After;
	return std::nullopt;
}

bool isName(std::string_view s)
{
	if (s.empty())
		return false;
	auto alpha = [](char c) { return (c >= 'A' and c <= 'Z') or (c >= 'a' and c <= 'z') or c == '_'; };
	if (not alpha(s.front()))
		return false;
	return std::all_of(s.begin() + 1, s.end(), [&](char c) { return alpha(c) or (c >= '0' and c <= '9') or c == '-'; });
}

// --------------------------------------------------------------------
// Element

const std::string *Element::attribute(std::string_view name) const
{
	for (auto &[n, v] : m_attrs)
	{
		if (n == name)
			return &v;
	}
	return nullptr;
}

std::string Element::text() const
{
	std::string result;
	for (auto &n : m_children)
	{
		if (auto t = asText(n))
			result += t->content;
	}
	return result;
}

bool Element::hasText() const
{
	return std::any_of(m_children.begin(), m_children.end(), [](const Node &n) { return asText(n) != nullptr; });
}

std::size_t Element::elementCount() const
{
	return static_cast<std::size_t>(
		std::count_if(m_children.begin(), m_children.end(), [](const Node &n) { return asElement(n) != nullptr; }));
}

Element *Element::previousElement() const
{
	if (m_parent == nullptr)
		return nullptr;
	auto it = m_self;
	while (it != m_parent->m_children.begin())
	{
		--it;
		if (auto e = asElement(*it))
			return e;
	}
	return nullptr;
}

Element *Element::nextElement() const
{
	if (m_parent == nullptr)
		return nullptr;
	for (auto it = std::next(m_self); it != m_parent->m_children.end(); ++it)
	{
		if (auto e = asElement(*it))
			return e;
	}
	return nullptr;
}

Element *Element::firstElement() const
{
	for (auto &n : m_children)
	{
		if (auto e = asElement(n))
			return e;
	}
	return nullptr;
}

std::vector<Element *> Element::elements() const
{
	std::vector<Element *> result;
	for (auto &n : m_children)
	{
		if (auto e = asElement(n))
			result.push_back(e);
	}
	return result;
}

bool Element::contains(const Element &other) const
{
	for (auto p = &other; p != nullptr; p = p->m_parent)
	{
		if (p == this)
			return true;
	}
	return false;
}

std::unique_ptr<Element> Element::clone() const
{
	auto result = std::make_unique<Element>(m_tag, m_id);
	result->m_attrs = m_attrs;
	for (auto &n : m_children)
	{
		if (auto e = asElement(n))
			result->appendElement(e->clone());
		else
			result->appendText(asText(n)->content);
	}
	return result;
}

Element &Element::appendElement(std::unique_ptr<Element> child)
{
	auto &ref = *child;
	m_children.emplace_back(std::move(child));
	ref.m_parent = this;
	ref.m_self = std::prev(m_children.end());
	return ref;
}

void Element::appendText(std::string text)
{
	m_children.emplace_back(Text{ std::move(text) });
}

void Element::appendAttribute(std::string name, std::string value)
{
	m_attrs.emplace_back(std::move(name), std::move(value));
}

// --------------------------------------------------------------------
// Document

Document::Document(std::unique_ptr<Element> root, std::string idAttribute)
	: m_root(std::move(root))
	, m_idAttribute(std::move(idAttribute))
{
	assert(m_root);
	m_root->m_parent = nullptr;

	std::vector<Element *> stack{ m_root.get() };
	while (not stack.empty())
	{
		auto e = stack.back();
		stack.pop_back();
		if (not m_index.emplace(e->m_id, e).second)
			throw XmlError("duplicate id \"" + e->m_id + "\"");
		for (auto it = e->m_children.rbegin(); it != e->m_children.rend(); ++it)
		{
			if (auto c = asElement(*it))
				stack.push_back(c);
		}
	}
}

Document::Document(const Document &other)
	: Document(other.m_root->clone(), other.m_idAttribute)
{
	m_sourcePath = other.m_sourcePath;
	m_reserved = other.m_reserved;
}

Document &Document::operator=(const Document &other)
{
	if (this != &other)
	{
		Document copy(other);
		*this = std::move(copy);
	}
	return *this;
}

Element *Document::find(const NodeId &id)
{
	auto i = m_index.find(id);
	return i == m_index.end() ? nullptr : i->second;
}

const Element *Document::find(const NodeId &id) const
{
	auto i = m_index.find(id);
	return i == m_index.end() ? nullptr : i->second;
}

NodeId Document::allocateDerivedId(const NodeId &base)
{
	if (not contains(base))
		throw CommandError("cannot derive an id from unknown id \"" + base + "\"");

	for (std::size_t n = 1;; ++n)
	{
		auto candidate = base + "+" + std::to_string(n);
		if (not contains(candidate) and not m_reserved.count(candidate))
		{
			m_reserved.insert(candidate);
			return candidate;
		}
	}
}

void Document::indexSubtree(Element &e)
{
	std::vector<Element *> stack{ &e };
	while (not stack.empty())
	{
		auto c = stack.back();
		stack.pop_back();
		m_index.emplace(c->m_id, c);
		m_reserved.erase(c->m_id);
		for (auto &n : c->m_children)
		{
			if (auto ce = asElement(n))
				stack.push_back(ce);
		}
	}
}

void Document::unindexSubtree(const Element &e)
{
	std::vector<const Element *> stack{ &e };
	while (not stack.empty())
	{
		auto c = stack.back();
		stack.pop_back();
		m_index.erase(c->m_id);
		for (auto &n : c->m_children)
		{
			if (auto ce = asElement(n))
				stack.push_back(ce);
		}
	}
}

void Document::checkPlacement(const Element &anchor, Relation rel) const
{
	if ((rel == Relation::Before or rel == Relation::After) and anchor.m_parent == nullptr)
		throw CommandError("relation " + std::string(toString(rel)) + " is not allowed with the root element \"" +
						   anchor.m_id + "\" as anchor");
}

void Document::place(Node node, Relation rel, Element &anchor)
{
	Element *parent = nullptr;
	NodeList::iterator pos;

	switch (rel)
	{
		case Relation::Under:
			parent = &anchor;
			pos = anchor.m_children.end();
			break;
		case Relation::FirstUnder:
			parent = &anchor;
			pos = anchor.m_children.begin();
			break;
		case Relation::Before:
			parent = anchor.m_parent;
			pos = anchor.m_self;
			break;
		case Relation::After:
			parent = anchor.m_parent;
			pos = std::next(anchor.m_self);
			break;
	}

	auto it = parent->m_children.insert(pos, std::move(node));
	if (auto e = asElement(*it))
	{
		e->m_parent = parent;
		e->m_self = it;
	}
}

Element &Document::insert(std::unique_ptr<Element> subtree, Relation rel, Element &anchor)
{
	checkPlacement(anchor, rel);

	std::vector<const Element *> stack{ subtree.get() };
	while (not stack.empty())
	{
		auto c = stack.back();
		stack.pop_back();
		if (contains(c->m_id))
			throw CommandError("id \"" + c->m_id + "\" is already in use");
		for (auto &n : c->m_children)
		{
			if (auto ce = asElement(n))
				stack.push_back(ce);
		}
	}

	auto &ref = *subtree;
	place(std::move(subtree), rel, anchor);
	indexSubtree(ref);
	return ref;
}

void Document::move(Element &target, Relation rel, Element &anchor)
{
	if (target.m_parent == nullptr)
		throw CommandError("cannot move the root element \"" + target.m_id + "\"");
	if (target.contains(anchor))
		throw CommandError("cannot move \"" + target.m_id + "\" relative to \"" + anchor.m_id +
						   "\": the anchor is inside the moved subtree");
	checkPlacement(anchor, rel);

	auto &from = target.m_parent->m_children;
	Element *parent = (rel == Relation::Under or rel == Relation::FirstUnder) ? &anchor : anchor.m_parent;
	NodeList::iterator pos;
	switch (rel)
	{
		case Relation::Under: pos = anchor.m_children.end(); break;
		case Relation::FirstUnder: pos = anchor.m_children.begin(); break;
		case Relation::Before: pos = anchor.m_self; break;
		case Relation::After: pos = std::next(anchor.m_self); break;
	}

	// splice keeps the list node, so target.m_self stays valid
	parent->m_children.splice(pos, from, target.m_self);
	target.m_parent = parent;
}

void Document::remove(Element &target)
{
	if (target.m_parent == nullptr)
		throw CommandError("cannot remove the root element \"" + target.m_id + "\"");
	unindexSubtree(target);
	target.m_parent->m_children.erase(target.m_self);
}

void Document::setTag(Element &e, std::string tag)
{
	e.m_tag = std::move(tag);
}

void Document::setAttribute(Element &e, const std::string &name, std::string value)
{
	if (name == m_idAttribute)
		throw CommandError("attribute \"" + name + "\" is the reserved id attribute");
	for (auto &[n, v] : e.m_attrs)
	{
		if (n == name)
		{
			v = std::move(value);
			return;
		}
	}
	e.m_attrs.emplace_back(name, std::move(value));
}

void Document::removeAttribute(Element &e, const std::string &name)
{
	if (name == m_idAttribute)
		throw CommandError("attribute \"" + name + "\" is the reserved id attribute");
	auto i = std::find_if(e.m_attrs.begin(), e.m_attrs.end(), [&](auto &a) { return a.first == name; });
	if (i == e.m_attrs.end())
		throw CommandError("element \"" + e.m_id + "\" has no attribute \"" + name + "\"");
	e.m_attrs.erase(i);
}

void Document::removeText(Element &e)
{
	e.m_children.remove_if([](const Node &n) { return asText(n) != nullptr; });
}

void Document::setText(Element &e, std::string text)
{
	auto &children = e.m_children;
	auto first = std::find_if(children.begin(), children.end(), [](const Node &n) { return asText(n) != nullptr; });
	if (first == children.end())
	{
		children.emplace_back(Text{ std::move(text) });
		return;
	}

	std::get<Text>(*first).content = std::move(text);
	for (auto it = std::next(first); it != children.end();)
	{
		if (asText(*it))
			it = children.erase(it);
		else
			++it;
	}
}

std::vector<NodeId> Document::ids() const
{
	std::vector<NodeId> result;
	std::vector<const Element *> stack{ m_root.get() };
	while (not stack.empty())
	{
		auto e = stack.back();
		stack.pop_back();
		result.push_back(e->m_id);
		for (auto it = e->m_children.rbegin(); it != e->m_children.rend(); ++it)
		{
			if (auto c = asElement(*it))
				stack.push_back(c);
		}
	}
	return result;
}

bool Document::indexConsistent() const
{
	std::size_t count = 0;
	std::vector<const Element *> stack{ m_root.get() };
	while (not stack.empty())
	{
		auto e = stack.back();
		stack.pop_back();
		++count;

		auto i = m_index.find(e->m_id);
		if (i == m_index.end() or i->second != e)
			return false;
		if (e->m_parent != nullptr and asElement(*e->m_self) != e)
			return false;

		for (auto &n : e->m_children)
		{
			if (auto c = asElement(n))
			{
				if (c->m_parent != e)
					return false;
				stack.push_back(c);
			}
		}
	}
	return count == m_index.size();
}

// --------------------------------------------------------------------
// comparison

std::vector<std::variant<const Element *, std::string>> normalizedChildren(const Element &e, CompareOptions opts)
{
	std::vector<std::variant<const Element *, std::string>> result;
	std::string pending;
	auto flush = [&]() {
		bool keep = not pending.empty();
		if (keep and opts.ignoreWhitespaceText)
			keep = not std::all_of(pending.begin(), pending.end(), isXmlSpace);
		if (keep)
			result.emplace_back(std::move(pending));
		pending.clear();
	};

	for (auto &n : e.children())
	{
		if (auto t = asText(n))
			pending += t->content;
		else
		{
			flush();
			result.emplace_back(asElement(n));
		}
	}
	flush();
	return result;
}

namespace
{

std::string path(const Element &e)
{
	return e.tag() + "[" + e.id() + "]";
}

std::optional<std::string> compare(const Element &a, const Element &b, CompareOptions opts)
{
	if (a.id() != b.id())
		return "id differs: " + path(a) + " vs " + path(b);
	if (a.tag() != b.tag())
		return "tag differs: " + path(a) + " vs " + path(b);
	if (a.attributes() != b.attributes())
		return "attributes differ at " + path(a);

	auto ca = normalizedChildren(a, opts);
	auto cb = normalizedChildren(b, opts);
	if (ca.size() != cb.size())
		return "child count differs at " + path(a) + ": " + std::to_string(ca.size()) + " vs " + std::to_string(cb.size());

	for (std::size_t i = 0; i < ca.size(); ++i)
	{
		if (ca[i].index() != cb[i].index())
			return "child kind differs at " + path(a) + " position " + std::to_string(i);
		if (auto ta = std::get_if<std::string>(&ca[i]))
		{
			if (*ta != std::get<std::string>(cb[i]))
				return "text differs at " + path(a) + ": \"" + *ta + "\" vs \"" + std::get<std::string>(cb[i]) + "\"";
		}
		else if (auto d = compare(*std::get<const Element *>(ca[i]), *std::get<const Element *>(cb[i]), opts))
			return d;
	}
	return std::nullopt;
}

} // namespace

std::optional<std::string> firstDifference(const Element &a, const Element &b, CompareOptions opts)
{
	return compare(a, b, opts);
}

bool treeEqual(const Element &a, const Element &b, CompareOptions opts)
{
	return not compare(a, b, opts).has_value();
}

bool treeEqual(const Document &a, const Document &b, CompareOptions opts)
{
	return treeEqual(a.root(), b.root(), opts);
}

} // namespace dml
