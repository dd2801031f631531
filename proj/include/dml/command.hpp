#pragma once

/// \file
/// DML abstract syntax: commands, comments and command sets.

#include "dml/document.hpp"
#include "dml/error.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dml
{

/// A bare token naming an element. Whether it is a variable or an id is
/// decided when the command runs: variables shadow ids.
struct Ref
{
	std::string token;

	bool operator==(const Ref &) const = default;
};

struct CreateElement
{
	std::string tag;
	Relation relation = Relation::Under;
	Ref anchor;
	std::optional<std::string> bind;

	bool operator==(const CreateElement &) const = default;
};

struct CreateTextElement
{
	std::string tag;
	std::string text;
	Relation relation = Relation::Under;
	Ref anchor;
	std::optional<std::string> bind;

	bool operator==(const CreateTextElement &) const = default;
};

struct CreateClone
{
	Ref source;
	Relation relation = Relation::Under;
	Ref anchor;
	std::optional<std::string> bind;

	bool operator==(const CreateClone &) const = default;
};

struct RemoveElement
{
	Ref target;
	bool operator==(const RemoveElement &) const = default;
};

struct RemoveText
{
	Ref target;
	bool operator==(const RemoveText &) const = default;
};

struct RemoveAttribute
{
	Ref target;
	std::string attr;
	bool operator==(const RemoveAttribute &) const = default;
};

struct Retag
{
	Ref target;
	std::string tag;
	bool operator==(const Retag &) const = default;
};

struct MoveElement
{
	Ref target;
	Relation relation = Relation::Under;
	Ref anchor;
	bool operator==(const MoveElement &) const = default;
};

struct SetAttribute
{
	Ref target;
	std::string attr;
	std::string value;
	bool operator==(const SetAttribute &) const = default;
};

struct SetText
{
	Ref target;
	std::string text;
	bool operator==(const SetText &) const = default;
};

using CommandBody = std::variant<CreateElement, CreateTextElement, CreateClone, RemoveElement, RemoveText,
								 RemoveAttribute, Retag, MoveElement, SetAttribute, SetText>;

struct Command
{
	CommandBody body;
	SourceLocation location;
};

struct Comment
{
	/// the full source line, verbatim
	std::string text;
	std::optional<std::string> author;
	std::optional<std::string> date;
	SourceLocation location;
};

using ScriptItem = std::variant<Comment, Command>;

/// One DML file: the unit of staging, audit and rollback.
struct CommandSet
{
	std::string name;
	std::string sourcePath;
	std::vector<ScriptItem> items;

	std::size_t commandCount() const;
};

/// "CREATE", "REMOVE", "RETAG", "MOVE" or "SET"
std::string_view verbOf(const CommandBody &body);
/// canonical two-token spelling, e.g. "REMOVE Attribute" or "RETAG"
std::string_view spellingOf(const CommandBody &body);

/// the target/anchor/source refs of a command, in argument order
std::vector<const Ref *> refsOf(const CommandBody &body);
std::vector<Ref *> refsOf(CommandBody &body);
const std::optional<std::string> *bindOf(const CommandBody &body);
std::optional<std::string> *bindOf(CommandBody &body);

/// items compared by command bodies and comment text (locations ignored)
bool structurallyEqual(const CommandSet &a, const CommandSet &b);

/// parse "# AUTHOR M/D/YYYY free text" comment metadata
void parseCommentMetadata(Comment &c);

} // namespace dml
