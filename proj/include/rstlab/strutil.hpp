#ifndef RSTLAB_STRUTIL_HPP
#define RSTLAB_STRUTIL_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rstlab {

std::string trim(std::string_view s);
std::string lower(std::string_view s);

// Collapses every run of whitespace to a single space and trims the ends.
// EDU text is stored in this form so that token counts are stable and the
// tab-separated formats stay unambiguous.
std::string normalize_ws(std::string_view s);

std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split_char(std::string_view s, char sep);

std::size_t count_tokens(std::string_view s);

std::string xml_escape(std::string_view s);

// FNV-1a, used for feature-config fingerprints and the mapping-file checksum.
std::uint64_t fnv1a(std::string_view s, std::uint64_t seed = 14695981039346656037ull);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace rstlab

#endif
