#include "graphmem/preprocess.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "graphmem/errors.hpp"
#include "graphmem/text_split.hpp"

namespace graphmem {

using nlohmann::json;

namespace {

struct QaOut {
    std::string id;
    std::string question;
    std::string answer;
};

void write_qa(const std::string& path, const std::vector<QaOut>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    for (const QaOut& row : rows) {
        json rec = {{"id", row.id}, {"question", row.question}, {"gold_answer", row.answer}};
        out << rec.dump() << '\n';
    }
}

void write_contexts(const std::string& path,
                    const std::vector<std::pair<std::string, std::string>>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
    for (const auto& [id, text] : rows) {
        json rec = {{"id", id}, {"text", text}};
        out << rec.dump() << '\n';
    }
}

PreprocessCounts preprocess_hotpotqa(const std::string& raw_path, const std::string& qa_out,
                                     const std::string& ctx_out,
                                     const PreprocessOptions& opt) {
    std::ifstream in(raw_path);
    if (!in) throw Error(ErrorCode::MissingRawData, "cannot open " + raw_path);
    json data = json::parse(in, nullptr, false);
    if (data.is_discarded() || !data.is_array())
        throw Error(ErrorCode::SchemaError, "expected the distractor/validation JSON array");

    PreprocessCounts counts;
    counts.raw_qa_pairs = data.size();
    const std::uint64_t limit = opt.qa_limit ? opt.qa_limit : 2000;

    // Relevant context per qa-pair = the supporting-fact paragraphs.
    struct QaEntry {
        std::string id, question, answer;
        std::vector<std::string> relevant;  // paragraph texts
    };
    std::vector<QaEntry> entries;
    std::set<std::string> unique_contexts;
    std::unordered_map<std::string, std::string> title_of;  // text -> title

    for (const auto& item : data) {
        if (!item.contains("question") || !item.contains("context"))
            throw Error(ErrorCode::SchemaError, "qa record lacks question/context");
        QaEntry e;
        e.id = item.value("_id", item.value("id", ""));
        e.question = item["question"].get<std::string>();
        e.answer = item.value("answer", "");

        std::unordered_set<std::string> fact_titles;
        for (const auto& fact : item.value("supporting_facts", json::array()))
            if (fact.is_array() && !fact.empty())
                fact_titles.insert(fact[0].get<std::string>());

        for (const auto& para : item["context"]) {
            if (!para.is_array() || para.size() < 2) continue;
            std::string title = para[0].get<std::string>();
            std::string text;
            for (const auto& sent : para[1]) text += sent.get<std::string>();
            if (fact_titles.count(title)) {
                e.relevant.push_back(text);
                unique_contexts.insert(text);
                title_of.emplace(text, title);
            }
        }
        entries.push_back(std::move(e));
    }
    counts.raw_contexts = unique_contexts.size();

    auto in_range = [&](const std::string& text) {
        return text.size() >= opt.min_chars && text.size() <= opt.max_chars;
    };
    std::uint64_t surviving = 0;
    for (const std::string& ctx : unique_contexts)
        if (in_range(ctx)) ++surviving;
    counts.after_length_filter = surviving;
    counts.after_sibling_filter = surviving;

    std::vector<QaOut> qa_rows;
    std::set<std::string> kept_contexts;
    std::vector<std::pair<std::string, std::string>> ctx_rows;
    for (const QaEntry& e : entries) {
        if (qa_rows.size() >= limit) break;
        bool ok = !e.relevant.empty();
        for (const std::string& ctx : e.relevant)
            if (!in_range(ctx)) ok = false;
        if (!ok) continue;
        qa_rows.push_back({e.id, e.question, e.answer});
        for (const std::string& ctx : e.relevant) {
            if (kept_contexts.insert(ctx).second)
                ctx_rows.emplace_back(title_of[ctx], ctx);
        }
    }
    counts.kept_qa_pairs = qa_rows.size();
    counts.kept_contexts = ctx_rows.size();

    write_qa(qa_out, qa_rows);
    write_contexts(ctx_out, ctx_rows);
    return counts;
}

PreprocessCounts preprocess_triviaqa(const std::string& raw_path, const std::string& qa_out,
                                     const std::string& ctx_out,
                                     const PreprocessOptions& opt) {
    std::ifstream in(raw_path);
    if (!in) throw Error(ErrorCode::MissingRawData, "cannot open " + raw_path);

    PreprocessCounts counts;
    const std::uint64_t limit = opt.qa_limit ? opt.qa_limit : 500;

    struct QaEntry {
        std::string id, question, answer;
        std::vector<std::size_t> groups;  // indices into group table
    };
    std::vector<QaEntry> entries;
    std::vector<std::vector<std::string>> groups;  // fragments per source context
    std::set<std::string> unique_fragments;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("question") || !rec.contains("contexts"))
            throw Error(ErrorCode::SchemaError,
                        "line " + std::to_string(line_no) +
                            ": expected {id, question, answer, contexts: [...]}");
        QaEntry e;
        e.id = rec.value("id", std::to_string(line_no));
        e.question = rec["question"].get<std::string>();
        e.answer = rec.value("answer", "");
        for (const auto& ctx : rec["contexts"]) {
            std::vector<Fragment> frags =
                split_text(ctx.get<std::string>(), opt.chunk_size, opt.chunk_overlap, {"\n\n"});
            std::vector<std::string> texts;
            texts.reserve(frags.size());
            for (Fragment& f : frags) {
                unique_fragments.insert(f.text);
                texts.push_back(std::move(f.text));
            }
            e.groups.push_back(groups.size());
            groups.push_back(std::move(texts));
        }
        entries.push_back(std::move(e));
    }
    counts.raw_qa_pairs = entries.size();
    counts.raw_contexts = unique_fragments.size();

    auto in_range = [&](const std::string& text) {
        return text.size() >= opt.min_chars && text.size() <= opt.max_chars;
    };
    std::set<std::string> in_range_fragments;
    for (const std::string& f : unique_fragments)
        if (in_range(f)) in_range_fragments.insert(f);
    counts.after_length_filter = in_range_fragments.size();

    // Sibling rule: losing one fragment deletes the whole source context.
    std::vector<bool> group_alive(groups.size(), true);
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (const std::string& f : groups[g])
            if (!in_range(f)) group_alive[g] = false;

    std::set<std::string> surviving;
    for (std::size_t g = 0; g < groups.size(); ++g)
        if (group_alive[g])
            for (const std::string& f : groups[g]) surviving.insert(f);
    counts.after_sibling_filter = surviving.size();

    std::vector<QaOut> qa_rows;
    std::set<std::string> kept;
    std::vector<std::pair<std::string, std::string>> ctx_rows;
    std::uint64_t ctx_seq = 0;
    for (const QaEntry& e : entries) {
        if (qa_rows.size() >= limit) break;
        bool ok = !e.groups.empty();
        for (std::size_t g : e.groups)
            if (!group_alive[g]) ok = false;
        if (!ok) continue;
        qa_rows.push_back({e.id, e.question, e.answer});
        for (std::size_t g : e.groups)
            for (const std::string& f : groups[g])
                if (kept.insert(f).second)
                    ctx_rows.emplace_back("frag-" + std::to_string(ctx_seq++), f);
    }
    counts.kept_qa_pairs = qa_rows.size();
    counts.kept_contexts = ctx_rows.size();

    write_qa(qa_out, qa_rows);
    write_contexts(ctx_out, ctx_rows);
    return counts;
}

PreprocessCounts preprocess_diaasq(const std::string& raw_path, const std::string& qa_out,
                                   const std::string& ctx_out) {
    namespace fs = std::filesystem;
    fs::path dir(raw_path);
    std::ifstream qa_in(dir / "qa.jsonl");
    std::ifstream ctx_in(dir / "contexts.jsonl");
    if (!qa_in || !ctx_in)
        throw Error(ErrorCode::MissingRawData,
                    "expected qa.jsonl and contexts.jsonl under " + raw_path);

    PreprocessCounts counts;
    std::vector<QaOut> qa_rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(qa_in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("question"))
            throw Error(ErrorCode::SchemaError, "qa.jsonl line " + std::to_string(line_no));
        qa_rows.push_back({rec.value("id", std::to_string(line_no)),
                           rec["question"].get<std::string>(),
                           rec.value("gold_answer", rec.value("answer", ""))});
    }
    std::vector<std::pair<std::string, std::string>> ctx_rows;
    line_no = 0;
    while (std::getline(ctx_in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("text"))
            throw Error(ErrorCode::SchemaError,
                        "contexts.jsonl line " + std::to_string(line_no));
        ctx_rows.emplace_back(rec.value("id", std::to_string(line_no)),
                              rec["text"].get<std::string>());
    }
    counts.raw_qa_pairs = counts.kept_qa_pairs = qa_rows.size();
    counts.raw_contexts = counts.after_length_filter = counts.after_sibling_filter =
        counts.kept_contexts = ctx_rows.size();
    write_qa(qa_out, qa_rows);
    write_contexts(ctx_out, ctx_rows);
    return counts;
}

}  // namespace

PreprocessCounts preprocess_corpus(DatasetKind kind, const std::string& raw_path,
                                   const std::string& qa_out_path,
                                   const std::string& contexts_out_path,
                                   const PreprocessOptions& options) {
    switch (kind) {
        case DatasetKind::HotpotQA:
            return preprocess_hotpotqa(raw_path, qa_out_path, contexts_out_path, options);
        case DatasetKind::TriviaQA:
            return preprocess_triviaqa(raw_path, qa_out_path, contexts_out_path, options);
        case DatasetKind::DiaASQ:
            return preprocess_diaasq(raw_path, qa_out_path, contexts_out_path);
    }
    throw Error(ErrorCode::SchemaError, "unknown dataset kind");
}

}  // namespace graphmem
