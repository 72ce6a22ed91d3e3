#pragma once
#include <map>
#include <string>

namespace graphmem {

// One system/user template pair per pipeline role. Placeholders ({text},
// {question}, {context}, {existing}, {new_knowledge}, {gold}, {answer})
// are substituted by render().
struct PromptTemplate {
    std::string system;
    std::string user;
};

struct PromptSet {
    PromptTemplate triplet_extraction;
    PromptTemplate thesis_extraction;
    PromptTemplate outdated_simple;
    PromptTemplate outdated_thesis;
    PromptTemplate key_entities;
    PromptTemplate answer_generation;
    PromptTemplate judge;

    // Built-in templates.
    static PromptSet defaults();
    // Overrides individual templates from <dir>/<role>.{system,user}.txt
    // when present; missing files keep the default.
    static PromptSet from_directory(const std::string& dir);
};

std::string render(const std::string& tmpl,
                   const std::map<std::string, std::string>& values);

}  // namespace graphmem
