#include <algorithm>
#include <cctype>
#include <cstdint>
#include <utility>

#include "graphmem/errors.hpp"
#include "graphmem/eval.hpp"

namespace graphmem {

namespace {

#include "unicode_punct.inc"

bool is_punct_codepoint(char32_t cp) {
    auto it = std::lower_bound(std::begin(kPunctRanges), std::end(kPunctRanges), cp,
                               [](const std::pair<char32_t, char32_t>& range, char32_t v) {
                                   return range.second < v;
                               });
    return it != std::end(kPunctRanges) && cp >= it->first;
}

// Decodes one UTF-8 codepoint at i; malformed bytes pass through as-is.
char32_t decode_utf8(const std::string& s, std::size_t& i) {
    unsigned char c = s[i];
    if (c < 0x80) {
        ++i;
        return c;
    }
    int extra = 0;
    char32_t cp = 0;
    if ((c & 0xE0) == 0xC0) {
        cp = c & 0x1F;
        extra = 1;
    } else if ((c & 0xF0) == 0xE0) {
        cp = c & 0x0F;
        extra = 2;
    } else if ((c & 0xF8) == 0xF0) {
        cp = c & 0x07;
        extra = 3;
    } else {
        ++i;
        return c;
    }
    if (i + extra >= s.size()) {
        ++i;
        return c;
    }
    for (int j = 1; j <= extra; ++j) {
        unsigned char cc = s[i + j];
        if ((cc & 0xC0) != 0x80) {
            ++i;
            return c;
        }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += extra + 1;
    return cp;
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

}  // namespace

std::string normalize_answer(const std::string& s) {
    std::string stripped;
    stripped.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        char32_t cp = decode_utf8(s, i);
        if (is_punct_codepoint(cp)) {
            stripped += ' ';  // punctuation acts as a word break
            continue;
        }
        if (cp < 0x80) {
            stripped += static_cast<char>(
                std::tolower(static_cast<unsigned char>(static_cast<char>(cp))));
        } else {
            append_utf8(stripped, cp);
        }
    }
    // Collapse whitespace runs.
    std::string out;
    bool in_space = true;
    for (char c : stripped) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!in_space) out += ' ';
            in_space = true;
        } else {
            out += c;
            in_space = false;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

bool exact_match(const std::string& pred, const std::string& gold) {
    return normalize_answer(pred) == normalize_answer(gold);
}

int judge(const std::string& question, const std::string& gold, const Answer& pred,
          const LlmClient& judge_client, const PromptSet& prompts,
          const GenerationParams& params, bool* flagged) {
    if (flagged) *flagged = false;
    if (pred.kind != AnswerKind::Text) return 0;  // NoAnswer scores 0, no call

    ChatRequest req;
    req.system = prompts.judge.system;
    req.user = render(prompts.judge.user, {{"question", question},
                                           {"gold", gold},
                                           {"answer", pred.text.value_or("")}});
    req.params = params;

    auto parse_label = [](const std::string& response) -> std::optional<int> {
        // First standalone 0/1 digit wins.
        for (std::size_t i = 0; i < response.size(); ++i) {
            char c = response[i];
            if (c != '0' && c != '1') continue;
            bool left_ok = i == 0 || !std::isalnum(static_cast<unsigned char>(response[i - 1]));
            bool right_ok = i + 1 == response.size() ||
                            !std::isalnum(static_cast<unsigned char>(response[i + 1]));
            if (left_ok && right_ok) return c - '0';
        }
        return std::nullopt;
    };

    for (int attempt = 0; attempt < 2; ++attempt) {
        if (auto label = parse_label(judge_client.complete(req))) return *label;
    }
    if (flagged) *flagged = true;
    return 0;
}

}  // namespace graphmem
