#pragma once

/// \file
/// exception types shared by all dml modules

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dml
{

/// file:line position of a script item or XML element
struct SourceLocation
{
	std::string file;
	std::size_t line = 0;

	bool operator==(const SourceLocation &) const = default;

	std::string str() const
	{
		return file + ":" + std::to_string(line);
	}
};

/// base of all domain errors (parse, apply, validation). CLI maps these to exit code 1.
class Error : public std::runtime_error
{
  public:
	using std::runtime_error::runtime_error;
};

/// malformed XML, duplicate or missing ids
class XmlError : public Error
{
  public:
	using Error::Error;
};

/// DML syntax error; what() always starts with file:line
class ParseError : public Error
{
  public:
	ParseError(SourceLocation loc, const std::string &message)
		: Error(loc.str() + ": " + message)
		, m_location(std::move(loc))
		, m_message(message)
	{
	}

	const SourceLocation &location() const noexcept { return m_location; }
	const std::string &message() const noexcept { return m_message; }

  private:
	SourceLocation m_location;
	std::string m_message;
};

/// failure of a single command against a document
class CommandError : public Error
{
  public:
	using Error::Error;
};

/// rule/charmap/manifest configuration problems
class ConfigError : public Error
{
  public:
	using Error::Error;
};

/// files or run artifacts that are absent or unreadable. CLI maps these to exit code 2.
class IoError : public std::runtime_error
{
  public:
	using std::runtime_error::runtime_error;
};

} // namespace dml
