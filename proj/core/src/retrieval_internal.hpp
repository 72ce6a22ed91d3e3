#pragma once
#include <unordered_set>

#include "graphmem/retrieval.hpp"

namespace graphmem::detail_retrieval {

void merge_items(RetrievedTriplets& into, std::unordered_set<std::string>& seen,
                 const std::vector<RetrievedItem>& items);

RetrievedItem make_item(const KnowledgeGraph& g, EdgeId eid, const char* algorithm);

}  // namespace graphmem::detail_retrieval
