#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace anolab {

/// Writes `content` to a temporary sibling of `path` and renames it into
/// place, so readers never see a truncated file. Throws IoError.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double value);

/// Shortest decimal string that parses back to the same double.
std::string format_shortest(double value);

}  // namespace anolab
