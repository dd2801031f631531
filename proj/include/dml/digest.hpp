#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace dml
{

/// lowercase hex SHA-256
std::string sha256Hex(std::string_view bytes);
std::string sha256File(const std::filesystem::path &file);

} // namespace dml
