#pragma once

/// \file
/// In-memory lexicon: an ordered element/text tree whose elements are
/// addressed by a unique id, plus the id index kept in sync with every edit.

#include "dml/error.hpp"

#include <cstddef>
#include <list>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <variant>
#include <vector>

namespace dml
{

using NodeId = std::string;

/// Placement of a node relative to an anchor element.
enum class Relation
{
	Under,      ///< last child of the anchor
	FirstUnder, ///< first child of the anchor
	Before,     ///< sibling immediately before the anchor
	After       ///< sibling immediately after the anchor
};

std::string_view toString(Relation r);
std::optional<Relation> parseRelation(std::string_view token);

class Element;

namespace detail
{
struct IdAssignment;
}

struct Text
{
	std::string content;
};

using Node = std::variant<std::unique_ptr<Element>, Text>;
using NodeList = std::list<Node>;
using Attributes = std::vector<std::pair<std::string, std::string>>;

inline Element *asElement(const Node &n)
{
	auto p = std::get_if<std::unique_ptr<Element>>(&n);
	return p ? p->get() : nullptr;
}

inline const Text *asText(const Node &n)
{
	return std::get_if<Text>(&n);
}

/// An addressable element. Structure is only mutated through Document so
/// that the id index stays consistent; reading is unrestricted.
class Element
{
  public:
	Element(std::string tag, NodeId id)
		: m_tag(std::move(tag))
		, m_id(std::move(id))
	{
	}

	Element(const Element &) = delete;
	Element &operator=(const Element &) = delete;

	const std::string &tag() const noexcept { return m_tag; }
	const NodeId &id() const noexcept { return m_id; }
	const Attributes &attributes() const noexcept { return m_attrs; }
	const NodeList &children() const noexcept { return m_children; }
	Element *parent() const noexcept { return m_parent; }

	const std::string *attribute(std::string_view name) const;

	/// concatenation of the direct text children
	std::string text() const;
	bool hasText() const;

	std::size_t elementCount() const;
	Element *previousElement() const;
	Element *nextElement() const;
	Element *firstElement() const;
	std::vector<Element *> elements() const;

	/// true when this element is \a other or one of its ancestors
	bool contains(const Element &other) const;

	/// detached deep copy with identical ids
	std::unique_ptr<Element> clone() const;

	// builders for detached trees (used by the XML loader and tests)
	Element &appendElement(std::unique_ptr<Element> child);
	void appendText(std::string text);
	void appendAttribute(std::string name, std::string value);

  private:
	friend class Document;
	friend struct detail::IdAssignment;

	std::string m_tag;
	NodeId m_id;
	Attributes m_attrs;
	NodeList m_children;
	Element *m_parent = nullptr;
	NodeList::iterator m_self{};
};

/// Ordered tree with a unique-id index. Single writer; concurrent readers
/// are fine while nobody mutates.
class Document
{
  public:
	/// takes ownership of a detached tree and indexes it; throws XmlError on duplicate ids
	explicit Document(std::unique_ptr<Element> root, std::string idAttribute = "ID");

	Document(const Document &other);
	Document &operator=(const Document &other);
	Document(Document &&) noexcept = default;
	Document &operator=(Document &&) noexcept = default;

	Element &root() { return *m_root; }
	const Element &root() const { return *m_root; }

	const std::string &idAttribute() const noexcept { return m_idAttribute; }
	const std::string &sourcePath() const noexcept { return m_sourcePath; }
	void setSourcePath(std::string path) { m_sourcePath = std::move(path); }

	Element *find(const NodeId &id);
	const Element *find(const NodeId &id) const;
	bool contains(const NodeId &id) const { return m_index.count(id) != 0; }
	std::size_t size() const noexcept { return m_index.size(); }

	/// base + "+" + n for the smallest n >= 1 not in use; the id is reserved
	/// until an element carrying it is attached.
	NodeId allocateDerivedId(const NodeId &base);
	void releaseReservation(const NodeId &id) { m_reserved.erase(id); }

	// --- mutations; each validates before touching the tree so a thrown
	// CommandError leaves the document unchanged

	/// attach a detached subtree per relation to \a anchor; registers all its ids
	Element &insert(std::unique_ptr<Element> subtree, Relation rel, Element &anchor);
	/// relocate an attached element (with its subtree) per relation to \a anchor
	void move(Element &target, Relation rel, Element &anchor);
	/// detach and destroy \a target's subtree
	void remove(Element &target);

	void setTag(Element &e, std::string tag);
	void setAttribute(Element &e, const std::string &name, std::string value);
	void removeAttribute(Element &e, const std::string &name);
	void removeText(Element &e);
	void setText(Element &e, std::string text);

	/// full-rescan check that the index equals the set of reachable element ids
	bool indexConsistent() const;
	std::vector<NodeId> ids() const;

  private:
	void checkPlacement(const Element &anchor, Relation rel) const;
	void place(Node node, Relation rel, Element &anchor);
	void indexSubtree(Element &e);
	void unindexSubtree(const Element &e);

	std::unique_ptr<Element> m_root;
	std::string m_idAttribute;
	std::string m_sourcePath;
	std::unordered_map<NodeId, Element *> m_index;
	std::unordered_set<NodeId> m_reserved;
};

// --- tree comparison

struct CompareOptions
{
	/// drop text nodes consisting only of XML whitespace before comparing
	bool ignoreWhitespaceText = false;
};

/// Structural equality: tags, ids, ordered attributes, child order and text.
/// Adjacent text nodes are merged and empty ones dropped first.
bool treeEqual(const Element &a, const Element &b, CompareOptions opts = {});
bool treeEqual(const Document &a, const Document &b, CompareOptions opts = {});

/// human readable description of the first difference, or nullopt when equal
std::optional<std::string> firstDifference(const Element &a, const Element &b, CompareOptions opts = {});

/// children with adjacent text merged and empty text dropped
std::vector<std::variant<const Element *, std::string>> normalizedChildren(const Element &e, CompareOptions opts = {});

/// valid per the DML name rule [A-Za-z_][A-Za-z0-9_-]*
bool isName(std::string_view s);

inline bool isXmlSpace(char c)
{
	return c == ' ' or c == '\t' or c == '\n' or c == '\r';
}

} // namespace dml
