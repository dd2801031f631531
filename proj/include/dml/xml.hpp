#pragma once

/// \file
/// Loading and canonical serialization of identified XML lexicons.

#include "dml/document.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dml
{

enum class MissingIdPolicy
{
	Strict, ///< an element without id attribute is an error
	Assign  ///< assign "gen-N" in document order and report it
};

struct LoadOptions
{
	std::string idAttribute = "ID";
	MissingIdPolicy missingIds = MissingIdPolicy::Strict;
	/// used in diagnostics and recorded as Document::sourcePath
	std::string sourceName = "<memory>";
};

struct AssignedId
{
	NodeId id;
	std::string tag;
	std::size_t line = 0;
};

struct LoadResult
{
	Document document;
	std::vector<AssignedId> assigned;
};

/// Parse UTF-8 XML. No DTDs; only the predefined entities and character
/// references are expanded. Throws XmlError.
LoadResult loadXml(std::string_view bytes, const LoadOptions &options = {});
LoadResult loadXmlFile(const std::filesystem::path &file, LoadOptions options = {});

struct SerializeOptions
{
	bool prettyPrint = false;
};

/// Canonical form: id attribute first, other attributes in stored order,
/// minimal escaping. Without prettyPrint no whitespace is added.
std::string serializeXml(const Document &doc, const SerializeOptions &options = {});

std::string readFile(const std::filesystem::path &file);
void writeFile(const std::filesystem::path &file, std::string_view contents);

} // namespace dml
