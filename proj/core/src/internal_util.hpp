#pragma once
#include <string>
#include <string_view>
#include <vector>

namespace graphmem::detail {

std::string base64_encode(std::string_view data);
// Returns false on malformed input.
bool base64_decode(std::string_view data, std::string& out);

// Locale-independent double formatting with round-trip precision.
std::string format_double(double v);

std::vector<std::string> split_ws(std::string_view s);
std::vector<std::string> split_lines(std::string_view s);

// 64-bit FNV-1a with an explicit seed; stable across platforms/runs.
std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed);

}  // namespace graphmem::detail
