#include <array>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <string>

#include "graphmem/errors.hpp"
#include "graphmem/types.hpp"
#include "internal_util.hpp"

namespace graphmem {

const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::Object: return "object";
        case NodeKind::Thesis: return "thesis";
        case NodeKind::Episodic: return "episodic";
    }
    return "?";
}

const char* to_string(EdgeKind k) {
    switch (k) {
        case EdgeKind::Simple: return "simple";
        case EdgeKind::Hyper: return "hyper";
        case EdgeKind::EpisodicLink: return "episodic";
    }
    return "?";
}

const char* to_string(ErrorCode c) {
    switch (c) {
        case ErrorCode::EmptyLabel: return "EmptyLabel";
        case ErrorCode::EmptyField: return "EmptyField";
        case ErrorCode::EmptyStatement: return "EmptyStatement";
        case ErrorCode::EmptyText: return "EmptyText";
        case ErrorCode::UnknownId: return "UnknownId";
        case ErrorCode::UnknownMember: return "UnknownMember";
        case ErrorCode::MemberKindViolation: return "MemberKindViolation";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::FormatError: return "FormatError";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
        case ErrorCode::Timeout: return "Timeout";
        case ErrorCode::TransportError: return "TransportError";
        case ErrorCode::BudgetExhausted: return "BudgetExhausted";
        case ErrorCode::MockMiss: return "MockMiss";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NoMatches: return "NoMatches";
        case ErrorCode::NoPath: return "NoPath";
        case ErrorCode::MissingRawData: return "MissingRawData";
        case ErrorCode::SchemaError: return "SchemaError";
    }
    return "Error";
}

std::string canonical(const Triplet& t) {
    std::string out;
    out.reserve(t.subject.size() + t.relation.size() + t.object.size() + 6);
    out += '(';
    out += t.subject;
    out += ", ";
    out += t.relation;
    out += ", ";
    out += t.object;
    out += ')';
    return out;
}

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string fold_label(std::string_view s) {
    std::string out = trim(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

std::string compact_label(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

bool contains_fold(std::string_view haystack, std::string_view needle) {
    if (needle.empty()) return false;
    std::string h = fold_label(haystack);
    std::string n = fold_label(needle);
    return h.find(n) != std::string::npos;
}

}  // namespace graphmem

namespace graphmem::detail {

namespace {
constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::array<int, 256> decode_table() {
    std::array<int, 256> t{};
    t.fill(-1);
    for (int i = 0; i < 64; ++i) t[static_cast<unsigned char>(kB64[i])] = i;
    return t;
}
}  // namespace

std::string base64_encode(std::string_view data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    while (i + 3 <= data.size()) {
        std::uint32_t v = (static_cast<unsigned char>(data[i]) << 16) |
                          (static_cast<unsigned char>(data[i + 1]) << 8) |
                          static_cast<unsigned char>(data[i + 2]);
        out += kB64[(v >> 18) & 63];
        out += kB64[(v >> 12) & 63];
        out += kB64[(v >> 6) & 63];
        out += kB64[v & 63];
        i += 3;
    }
    std::size_t rem = data.size() - i;
    if (rem == 1) {
        std::uint32_t v = static_cast<unsigned char>(data[i]) << 16;
        out += kB64[(v >> 18) & 63];
        out += kB64[(v >> 12) & 63];
        out += "==";
    } else if (rem == 2) {
        std::uint32_t v = (static_cast<unsigned char>(data[i]) << 16) |
                          (static_cast<unsigned char>(data[i + 1]) << 8);
        out += kB64[(v >> 18) & 63];
        out += kB64[(v >> 12) & 63];
        out += kB64[(v >> 6) & 63];
        out += '=';
    }
    return out;
}

bool base64_decode(std::string_view data, std::string& out) {
    static const std::array<int, 256> table = decode_table();
    out.clear();
    if (data.size() % 4 != 0) return false;
    out.reserve(data.size() / 4 * 3);
    for (std::size_t i = 0; i < data.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int j = 0; j < 4; ++j) {
            char c = data[i + j];
            if (c == '=') {
                if (i + 4 != data.size() || j < 2) return false;
                vals[j] = 0;
                ++pad;
            } else {
                vals[j] = table[static_cast<unsigned char>(c)];
                if (vals[j] < 0 || pad > 0) return false;
            }
        }
        std::uint32_t v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
        out += static_cast<char>((v >> 16) & 0xFF);
        if (pad < 2) out += static_cast<char>((v >> 8) & 0xFF);
        if (pad < 1) out += static_cast<char>(v & 0xFF);
    }
    return true;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        std::size_t b = i;
        while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
        if (i > b) out.emplace_back(s.substr(b, i - b));
    }
    return out;
}

std::vector<std::string> split_lines(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '\n') {
            std::string_view line = s.substr(start, i - start);
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            out.emplace_back(line);
            start = i + 1;
        }
    }
    if (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed) {
    std::uint64_t h = 14695981039346656037ULL ^ seed;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

}  // namespace graphmem::detail
