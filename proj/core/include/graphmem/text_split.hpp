#pragma once
#include <cstddef>
#include <string>
#include <vector>

namespace graphmem {

struct Fragment {
    std::string text;
    // Characters shared with the end of the previous fragment. Removing
    // them and concatenating reconstructs the source exactly.
    std::size_t overlap_with_prev = 0;
};

// Recursive splitter: tries each separator in order, splitting oversized
// pieces with the remaining separators, and falls through to fixed-size
// character windows with `overlap` shared characters. Every fragment is at
// most chunk_size characters. Requires chunk_size > overlap.
std::vector<Fragment> split_text(const std::string& text, std::size_t chunk_size,
                                 std::size_t overlap,
                                 const std::vector<std::string>& separators = {"\n\n"});

std::string reconstruct(const std::vector<Fragment>& fragments);

}  // namespace graphmem
