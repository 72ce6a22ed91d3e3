#pragma once
#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace graphmem {

// Node and edge ids are drawn from one shared counter per graph, so a raw
// id value is unambiguous even when a caller mixes both kinds in one list
// (see KnowledgeGraph::remove_knowledge). Ids are stable across save/load
// and never reused after removal.
struct NodeId {
    std::uint64_t value = 0;
    auto operator<=>(const NodeId&) const = default;
};

struct EdgeId {
    std::uint64_t value = 0;
    auto operator<=>(const EdgeId&) const = default;
};

enum class NodeKind { Object, Thesis, Episodic };
enum class EdgeKind { Simple, Hyper, EpisodicLink };

const char* to_string(NodeKind k);
const char* to_string(EdgeKind k);

// Atomic fact; the unit of retrieval and of LLM context.
struct Triplet {
    std::string subject;
    std::string relation;
    std::string object;

    bool operator==(const Triplet&) const = default;
};

// "(subject, relation, object)" — the form used for dedup everywhere.
std::string canonical(const Triplet& t);

// Whitespace trim on both ends.
std::string trim(std::string_view s);
// ASCII case fold; identity key for object labels.
std::string fold_label(std::string_view s);
// Case fold + drop non-alphanumerics; the compact form used as a last
// entity-match tier ("MonaLisa" ~ "Mona Lisa").
std::string compact_label(std::string_view s);
// Case-insensitive substring test (ASCII folding).
bool contains_fold(std::string_view haystack, std::string_view needle);

}  // namespace graphmem

template <>
struct std::hash<graphmem::NodeId> {
    std::size_t operator()(const graphmem::NodeId& id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};

template <>
struct std::hash<graphmem::EdgeId> {
    std::size_t operator()(const graphmem::EdgeId& id) const noexcept {
        return std::hash<std::uint64_t>{}(id.value);
    }
};
