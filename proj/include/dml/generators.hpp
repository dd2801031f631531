#pragma once

/// \file
/// Run-time generation of command sets from declarative pattern rules. A
/// generator only reads the document it is given; its output depends on the
/// document's current state and nothing else.

#include "dml/command.hpp"
#include "dml/document.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace dml
{

struct AttrTest
{
	enum class Op
	{
		Equals,
		Exists,
		Absent
	};

	std::string name;
	Op op = Op::Exists;
	std::string value;
};

/// bounds on the number of element children
struct ChildCount
{
	std::optional<std::size_t> exact, min, max;
};

struct TextTest
{
	enum class Kind
	{
		Equals,
		Matches
	};

	Kind kind = Kind::Equals;
	std::string value;
	std::shared_ptr<const std::regex> regex;
};

struct Pattern
{
	/// "*" matches any tag
	std::string tag = "*";
	std::vector<AttrTest> attrs;
	std::optional<ChildCount> childCount;
	std::optional<TextTest> text;

	std::optional<std::string> parentTag;
	/// tag of the immediately preceding element sibling
	std::optional<std::string> prevTag;
	std::optional<bool> rootChild;

	/// elements lacking these captures never match
	bool requireParent = false;
	bool requirePrev = false;
};

/// capture environment of one match
struct Match
{
	NodeId self;
	std::optional<NodeId> parent;
	std::optional<NodeId> prev;
};

/// matches in document order; read-only
std::vector<Match> matchAll(const Document &doc, const Pattern &pattern);
bool matches(const Element &e, const Pattern &pattern);

/// Pattern plus command templates. Template refs may be $SELF, $PARENT,
/// $PREV or $NEWk (bound by an earlier CREATE in the same rule); quoted
/// slots may interpolate ${SELF.text} or ${SELF.attr.NAME} (also for PARENT and PREV).
struct Rule
{
	std::string name;
	Pattern match;
	std::vector<Command> emit;
};

/// parse and validate templates; throws ConfigError naming the rule
Rule makeRule(std::string name, Pattern pattern, const std::vector<std::string> &emit);

std::vector<Rule> parseRules(std::string_view json, const std::string &sourceName = "<rules>");
std::vector<Rule> loadRules(const std::filesystem::path &file);

/// For each rule, for each match in document order: a marker comment
/// ("# generated rule=NAME match=ID") followed by the instantiated templates.
CommandSet generate(const Document &doc, const std::vector<Rule> &rules, const std::string &setName);

/// ordered table of code-unit sequences to replacements; longest key wins
using Charmap = std::vector<std::pair<std::string, std::string>>;

Charmap parseCharmap(std::string_view json, const std::string &sourceName = "<charmap>");
Charmap loadCharmap(const std::filesystem::path &file);

/// longest-match-first left-to-right replacement
std::string applyCharmap(std::string_view text, const Charmap &table);

/// rule name used in the marker comments of charmap-generated sets
inline constexpr std::string_view kCharmapRule = "charmap";

/// SET Text for every element with a tag in \a tags whose text changes under the table
CommandSet charmapGenerate(const Document &doc, const std::set<std::string> &tags, const Charmap &table,
						   const std::string &setName);

struct GeneratedMarker
{
	std::string rule;
	NodeId match;
};

std::string markerComment(std::string_view rule, const NodeId &match);
std::optional<GeneratedMarker> parseMarker(const Comment &c);

} // namespace dml
