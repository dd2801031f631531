#pragma once

/// \file
/// Reading and writing DML scripts (see docs/dml-grammar.md).

#include "dml/command.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace dml
{

struct ParseOptions
{
	/// accept "$NAME" bind variables (rule templates)
	bool placeholders = false;
};

/// Line-oriented parse. Throws ParseError carrying file:line.
CommandSet parseScript(std::string_view text, const std::string &name, ParseOptions options = {});
CommandSet parseScriptFile(const std::filesystem::path &file);

/// Canonical text: one item per line, each line terminated by '\n'.
std::string printScript(const CommandSet &set);
std::string printCommand(const CommandBody &body);

/// quote with minimal escaping; inverse of the parser's string rule
std::string quote(std::string_view s);

} // namespace dml
