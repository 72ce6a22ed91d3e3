#pragma once
#include <iosfwd>
#include <string>

#include "graphmem/config.hpp"

namespace graphmem {

// Exit codes: 0 success, 1 runtime failure, 2 usage/input error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

struct QueryOptions {
    std::string question;
    bool show_evidence = false;
};

struct EvalCliOptions {
    bool grid = false;
};

struct StatsOptions {};

struct PreprocessCliOptions {
    std::string dataset;  // hotpotqa | triviaqa | diaasq
    std::string input;
    std::string out_qa;
    std::string out_contexts;
};

int cmd_build(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_query(const RunConfig& cfg, const QueryOptions& opt, std::ostream& out,
              std::ostream& err);
int cmd_eval(const RunConfig& cfg, const EvalCliOptions& opt, std::ostream& out,
             std::ostream& err);
int cmd_stats(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_preprocess(const PreprocessCliOptions& opt, std::ostream& out, std::ostream& err);

}  // namespace graphmem
