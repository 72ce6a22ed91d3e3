#include <atomic>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "graphmem/errors.hpp"
#include "graphmem/eval.hpp"

namespace graphmem {

EvalReport aggregate_records(std::vector<EvalRecord> records, bool judged) {
    EvalReport report;
    report.judged = judged;
    report.total = records.size();
    if (!records.empty()) {
        double em = 0, judge_sum = 0, noans = 0, perr = 0;
        for (const EvalRecord& r : records) {
            if (r.em) em += 1;
            if (r.judge_label) judge_sum += *r.judge_label;
            if (r.predicted.kind == AnswerKind::NoAnswer) noans += 1;
            if (r.parse_flagged) perr += 1;
        }
        double n = static_cast<double>(records.size());
        report.em_rate = em / n;
        report.accuracy = judged ? judge_sum / n : 0.0;
        report.no_answer_rate = noans / n;
        report.parse_error_rate = perr / n;
    }
    report.records = std::move(records);
    return report;
}

EvalReport run_eval(const std::vector<QuestionRecord>& questions, const KnowledgeGraph& graph,
                    const QaPipeline& pipeline, const QAConfig& qa_config,
                    const LlmClient* judge_client, const PromptSet& prompts,
                    const GenerationParams& params, const EvalOptions& options) {
    std::unordered_set<std::string> done_ids;
    for (const EvalRecord& r : options.completed) done_ids.insert(r.id);

    std::vector<const QuestionRecord*> todo;
    for (const QuestionRecord& q : questions)
        if (!done_ids.count(q.id)) todo.push_back(&q);

    std::vector<EvalRecord> fresh(todo.size());
    auto evaluate_one = [&](std::size_t idx) {
        const QuestionRecord& q = *todo[idx];
        EvalRecord rec;
        rec.id = q.id;
        rec.question = q.question;
        rec.gold = q.gold_answer;
        try {
            rec.predicted = pipeline.answer(q.question, graph, qa_config);
            rec.em = rec.predicted.kind == AnswerKind::Text &&
                     exact_match(*rec.predicted.text, q.gold_answer);
            if (judge_client) {
                bool flagged = false;
                rec.judge_label =
                    judge(q.question, q.gold_answer, rec.predicted, *judge_client, prompts,
                          params, &flagged);
                rec.parse_flagged = flagged;
            }
            if (rec.predicted.trace.degraded_parse) rec.parse_flagged = true;
        } catch (const std::exception& e) {
            rec.predicted = Answer{};
            rec.predicted.trace.reason = "Failure";
            rec.failure = e.what();
        }
        fresh[idx] = std::move(rec);
    };

    const int workers = std::max(1, options.parallelism);
    if (workers == 1 || todo.size() <= 1) {
        for (std::size_t i = 0; i < todo.size(); ++i) {
            evaluate_one(i);
            if (options.sink) options.sink(fresh[i]);
        }
    } else {
        // Records are sunk strictly in input order so report files are
        // byte-identical regardless of worker scheduling.
        std::atomic<std::size_t> next{0};
        std::mutex mu;
        std::condition_variable cv;
        std::vector<bool> ready(todo.size(), false);
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    std::size_t idx = next.fetch_add(1);
                    if (idx >= todo.size()) break;
                    evaluate_one(idx);
                    {
                        std::lock_guard lock(mu);
                        ready[idx] = true;
                    }
                    cv.notify_all();
                }
            });
        }
        std::size_t flushed = 0;
        {
            std::unique_lock lock(mu);
            while (flushed < todo.size()) {
                cv.wait(lock, [&] { return ready[flushed]; });
                while (flushed < todo.size() && ready[flushed]) {
                    if (options.sink) options.sink(fresh[flushed]);
                    ++flushed;
                }
            }
        }
        for (std::thread& t : pool) t.join();
    }

    std::vector<EvalRecord> all = options.completed;
    all.insert(all.end(), std::make_move_iterator(fresh.begin()),
               std::make_move_iterator(fresh.end()));
    return aggregate_records(std::move(all), judge_client != nullptr);
}

}  // namespace graphmem
