#pragma once
#include <cstddef>
#include <memory>
#include <mutex>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "graphmem/types.hpp"

namespace graphmem {

// Unit-norm embedding vector. Dimension is fixed per provider.
using Vector = std::vector<double>;

double inner_product(const Vector& a, const Vector& b);
double l2_norm(const Vector& v);
void normalize(Vector& v);

class EmbeddingProvider {
public:
    virtual ~EmbeddingProvider() = default;
    // Returns a unit-norm vector. Deterministic for fixed provider state.
    virtual Vector embed(const std::string& text) const = 0;
    virtual std::size_t dimension() const = 0;
    // Identifies the provider in cache keys.
    virtual std::string id() const = 0;
};

// Offline embedder: hashes each whitespace token into one of `dim` buckets
// with a +/-1 sign from a second hash, accumulates, L2-normalizes. Two texts
// have nonzero similarity exactly when their token sets collide in a bucket,
// which in practice means shared tokens.
class HashedBagEmbedder final : public EmbeddingProvider {
public:
    explicit HashedBagEmbedder(std::size_t dim = 256);

    Vector embed(const std::string& text) const override;
    std::size_t dimension() const override { return dim_; }
    std::string id() const override;

private:
    std::size_t dim_;
};

struct RemoteEmbedderConfig {
    std::string endpoint;       // e.g. http://host:port/v1/embeddings
    std::string model;
    std::size_t batch_size = 16;
    int timeout_seconds = 60;
};

// Client for an external embedding service. POSTs {"model", "input": [...]}
// and expects {"data": [{"embedding": [...]}]} (float-array list). Vectors
// are re-normalized on receipt.
class RemoteEmbedder final : public EmbeddingProvider {
public:
    explicit RemoteEmbedder(RemoteEmbedderConfig cfg);

    Vector embed(const std::string& text) const override;
    std::vector<Vector> embed_batch(const std::vector<std::string>& texts) const;
    std::size_t dimension() const override;
    std::string id() const override;

private:
    RemoteEmbedderConfig cfg_;
    mutable std::size_t dim_ = 0;  // learned from first response
};

// Wraps a provider with a persistent cache keyed by (provider id, text).
// The cache file lives beside the graph so re-runs do not re-bill a remote
// service. Thread-safe.
class CachingEmbedder final : public EmbeddingProvider {
public:
    CachingEmbedder(std::shared_ptr<const EmbeddingProvider> inner, std::string cache_path);
    ~CachingEmbedder() override;

    Vector embed(const std::string& text) const override;
    std::size_t dimension() const override { return inner_->dimension(); }
    std::string id() const override { return inner_->id(); }

    std::size_t hits() const;
    std::size_t misses() const;
    void flush() const;

private:
    std::shared_ptr<const EmbeddingProvider> inner_;
    std::string cache_path_;
    mutable std::mutex mu_;
    mutable std::unordered_map<std::string, Vector> cache_;
    mutable std::size_t hits_ = 0;
    mutable std::size_t misses_ = 0;
    mutable bool dirty_ = false;
};

// Items sorted by inner product with the query, descending, stable on ties,
// truncated to n.
std::vector<std::pair<std::string, double>> top_n(
    const Vector& query,
    const std::vector<std::pair<std::string, Vector>>& items,
    std::size_t n);

}  // namespace graphmem
