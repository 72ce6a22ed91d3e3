#include "graphmem/text_split.hpp"

#include <stdexcept>

#include "graphmem/errors.hpp"

namespace graphmem {

namespace {

// Pieces of `text` split on `sep`, the separator kept attached to the end
// of the preceding piece so concatenation reconstructs the input.
std::vector<std::string> split_keep_separator(const std::string& text,
                                              const std::string& sep) {
    std::vector<std::string> pieces;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            pieces.push_back(text.substr(start));
            break;
        }
        pieces.push_back(text.substr(start, pos - start + sep.size()));
        start = pos + sep.size();
    }
    return pieces;
}

void char_windows(const std::string& text, std::size_t chunk_size, std::size_t overlap,
                  std::vector<Fragment>& out) {
    const std::size_t step = chunk_size - overlap;
    out.push_back({text.substr(0, chunk_size), 0});
    for (std::size_t start = step; start + overlap < text.size(); start += step)
        out.push_back({text.substr(start, chunk_size), overlap});
}

void split_recursive(const std::string& text, std::size_t chunk_size, std::size_t overlap,
                     const std::vector<std::string>& separators, std::size_t sep_index,
                     std::vector<Fragment>& out) {
    if (text.size() <= chunk_size) {
        out.push_back({text, 0});
        return;
    }
    if (sep_index >= separators.size()) {
        char_windows(text, chunk_size, overlap, out);
        return;
    }
    const std::string& sep = separators[sep_index];
    std::vector<std::string> pieces =
        sep.empty() ? std::vector<std::string>{text} : split_keep_separator(text, sep);
    if (pieces.size() <= 1) {
        split_recursive(text, chunk_size, overlap, separators, sep_index + 1, out);
        return;
    }
    // Greedy merge of consecutive pieces up to chunk_size; oversized pieces
    // fall through to the next separator.
    std::string current;
    auto flush = [&]() {
        if (current.empty()) return;
        if (current.size() <= chunk_size)
            out.push_back({std::move(current), 0});
        else
            split_recursive(current, chunk_size, overlap, separators, sep_index + 1, out);
        current.clear();
    };
    for (std::string& piece : pieces) {
        if (!current.empty() && current.size() + piece.size() > chunk_size) flush();
        current += piece;
        if (current.size() > chunk_size) flush();
    }
    flush();
}

}  // namespace

std::vector<Fragment> split_text(const std::string& text, std::size_t chunk_size,
                                 std::size_t overlap,
                                 const std::vector<std::string>& separators) {
    if (chunk_size == 0 || chunk_size <= overlap)
        throw Error(ErrorCode::SchemaError, "chunk_size must exceed overlap");
    if (text.empty()) return {};
    std::vector<Fragment> out;
    split_recursive(text, chunk_size, overlap, separators, 0, out);
    return out;
}

std::string reconstruct(const std::vector<Fragment>& fragments) {
    std::string out;
    for (const Fragment& f : fragments) out += f.text.substr(f.overlap_with_prev);
    return out;
}

}  // namespace graphmem
