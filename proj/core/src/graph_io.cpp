#include <fstream>
#include <sstream>

#include "graphmem/errors.hpp"
#include "graphmem/graph.hpp"
#include "internal_util.hpp"

namespace graphmem {

namespace {

constexpr const char* kHeader = "graphmem-v1";

[[noreturn]] void format_error(std::size_t line_no, const std::string& what) {
    throw Error(ErrorCode::FormatError, "line " + std::to_string(line_no) + ": " + what);
}

NodeKind parse_node_kind(const std::string& s, std::size_t line_no) {
    if (s == "object") return NodeKind::Object;
    if (s == "thesis") return NodeKind::Thesis;
    if (s == "episodic") return NodeKind::Episodic;
    format_error(line_no, "unknown node kind '" + s + "'");
}

}  // namespace

void KnowledgeGraph::save(const std::string& path) const {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path + " for writing");

    out << kHeader << '\n';
    out << "meta next_id " << next_id_ << '\n';
    out << "meta contexts " << stored_contexts_ << ' ' << parse_errors_ << '\n';

    for (const auto& [id, n] : nodes_) {
        out << "node " << id.value << ' ' << to_string(n.kind) << ' '
            << detail::base64_encode(n.content);
        for (double x : n.embedding) out << ' ' << detail::format_double(x);
        out << '\n';
    }
    for (const auto& [id, n] : nodes_) {
        if (n.created_at) out << "ts " << id.value << ' ' << *n.created_at << '\n';
    }
    for (const auto& [id, e] : edges_) {
        switch (e.kind) {
            case EdgeKind::Simple:
                out << "edge simple " << id.value << ' ' << e.a.value << ' '
                    << detail::base64_encode(e.relation) << ' ' << e.b.value << '\n';
                break;
            case EdgeKind::Hyper:
                out << "edge hyper " << id.value << ' ' << e.a.value << ' ' << e.b.value
                    << '\n';
                break;
            case EdgeKind::EpisodicLink:
                out << "edge episodic " << id.value << ' ' << e.a.value << ' ' << e.b.value
                    << '\n';
                break;
        }
    }
    out << "end " << nodes_.size() << ' ' << edges_.size() << '\n';
    if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

KnowledgeGraph KnowledgeGraph::load(const std::string& path,
                                    std::shared_ptr<const EmbeddingProvider> embedder) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);

    KnowledgeGraph g(std::move(embedder));
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) format_error(1, "empty file");
    ++line_no;
    if (line != kHeader) format_error(line_no, "bad header, expected '" + std::string(kHeader) + "'");

    bool saw_end = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "meta") {
            std::string key;
            ls >> key;
            if (key == "next_id") {
                if (!(ls >> g.next_id_)) format_error(line_no, "bad next_id");
            } else if (key == "contexts") {
                if (!(ls >> g.stored_contexts_ >> g.parse_errors_))
                    format_error(line_no, "bad contexts meta");
            } else {
                format_error(line_no, "unknown meta key '" + key + "'");
            }
        } else if (tag == "node") {
            std::uint64_t id;
            std::string kind_s, content_b64;
            if (!(ls >> id >> kind_s >> content_b64)) format_error(line_no, "bad node record");
            Node n;
            n.id = NodeId{id};
            n.kind = parse_node_kind(kind_s, line_no);
            if (!detail::base64_decode(content_b64, n.content))
                format_error(line_no, "bad base64 content");
            if (n.content.empty()) format_error(line_no, "empty node content");
            double x;
            while (ls >> x) n.embedding.push_back(x);
            if (g.nodes_.count(n.id)) format_error(line_no, "duplicate node id");
            if (n.kind == NodeKind::Object) {
                const std::string folded = fold_label(n.content);
                if (g.object_by_label_.count(folded))
                    format_error(line_no, "duplicate object label '" + n.content + "'");
                g.object_by_label_.emplace(folded, n.id);
            } else if (n.kind == NodeKind::Thesis) {
                g.thesis_by_statement_.emplace(fold_label(n.content), n.id);
            }
            g.incident_.emplace(n.id, std::vector<EdgeId>{});
            g.nodes_.emplace(n.id, std::move(n));
        } else if (tag == "ts") {
            std::uint64_t id;
            std::int64_t ts;
            if (!(ls >> id >> ts)) format_error(line_no, "bad ts record");
            auto it = g.nodes_.find(NodeId{id});
            if (it == g.nodes_.end()) format_error(line_no, "ts for unknown node");
            it->second.created_at = ts;
        } else if (tag == "edge") {
            std::string kind_s;
            std::uint64_t id, a, b;
            if (!(ls >> kind_s >> id)) format_error(line_no, "bad edge record");
            Edge e;
            e.id = EdgeId{id};
            if (kind_s == "simple") {
                std::string rel_b64;
                if (!(ls >> a >> rel_b64 >> b)) format_error(line_no, "bad simple edge");
                e.kind = EdgeKind::Simple;
                if (!detail::base64_decode(rel_b64, e.relation))
                    format_error(line_no, "bad base64 relation");
            } else if (kind_s == "hyper") {
                if (!(ls >> a >> b)) format_error(line_no, "bad hyper edge");
                e.kind = EdgeKind::Hyper;
            } else if (kind_s == "episodic") {
                if (!(ls >> a >> b)) format_error(line_no, "bad episodic edge");
                e.kind = EdgeKind::EpisodicLink;
            } else {
                format_error(line_no, "unknown edge kind '" + kind_s + "'");
            }
            e.a = NodeId{a};
            e.b = NodeId{b};
            auto na = g.nodes_.find(e.a);
            auto nb = g.nodes_.find(e.b);
            if (na == g.nodes_.end() || nb == g.nodes_.end())
                format_error(line_no, "edge endpoint not defined yet");
            // Endpoint-kind typing rules.
            switch (e.kind) {
                case EdgeKind::Simple:
                    if (na->second.kind != NodeKind::Object ||
                        nb->second.kind != NodeKind::Object)
                        format_error(line_no, "simple edge endpoints must be objects");
                    break;
                case EdgeKind::Hyper:
                    if (na->second.kind != NodeKind::Thesis ||
                        nb->second.kind != NodeKind::Object)
                        format_error(line_no, "hyper edge must link thesis hub to object");
                    break;
                case EdgeKind::EpisodicLink:
                    if (na->second.kind != NodeKind::Episodic ||
                        nb->second.kind == NodeKind::Episodic)
                        format_error(line_no,
                                     "episodic link must go from episodic hub to object/thesis");
                    break;
            }
            if (g.edges_.count(e.id)) format_error(line_no, "duplicate edge id");
            const std::string key = g.edge_key(e.kind, e.a, e.b, e.relation);
            if (g.edge_by_key_.count(key)) format_error(line_no, "duplicate edge");
            g.edge_by_key_.emplace(key, e.id);
            g.incident_[e.a].push_back(e.id);
            if (e.b != e.a) g.incident_[e.b].push_back(e.id);
            g.edges_.emplace(e.id, std::move(e));
        } else if (tag == "end") {
            std::size_t n_nodes, n_edges;
            if (!(ls >> n_nodes >> n_edges)) format_error(line_no, "bad end record");
            if (n_nodes != g.nodes_.size() || n_edges != g.edges_.size())
                format_error(line_no, "record counts do not match end marker");
            saw_end = true;
        } else {
            format_error(line_no, "unknown record tag '" + tag + "'");
        }
    }
    if (!saw_end) format_error(line_no + 1, "truncated file: missing end marker");

    // Ids must stay unique forever, even if the meta line predates some
    // records.
    std::uint64_t max_id = 0;
    for (const auto& [id, n] : g.nodes_) max_id = std::max(max_id, id.value);
    for (const auto& [id, e] : g.edges_) max_id = std::max(max_id, id.value);
    g.next_id_ = std::max(g.next_id_, max_id + 1);
    return g;
}

}  // namespace graphmem
