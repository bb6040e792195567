#pragma once

#include <filesystem>
#include <string>

namespace vccopt {

/// Writes `content` to `path` atomically: the bytes land in a sibling
/// temporary file first and are moved into place with a rename.
void atomic_write_text(const std::filesystem::path& path, const std::string& content);

/// Formats a double with up to 12 significant digits, locale independent.
/// Used everywhere a report or table is written so identical values always
/// produce identical bytes.
std::string format_double(double value);

}  // namespace vccopt
