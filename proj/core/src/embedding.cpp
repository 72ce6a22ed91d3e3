#include "graphmem/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "graphmem/errors.hpp"
#include "internal_util.hpp"

namespace graphmem {

using nlohmann::json;

double inner_product(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw Error(ErrorCode::DimensionMismatch,
                    "vectors of size " + std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double l2_norm(const Vector& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

void normalize(Vector& v) {
    double n = l2_norm(v);
    if (n > 0) {
        for (double& x : v) x /= n;
    }
}

HashedBagEmbedder::HashedBagEmbedder(std::size_t dim) : dim_(dim) {}

std::string HashedBagEmbedder::id() const {
    return "hashed-bag-" + std::to_string(dim_);
}

Vector HashedBagEmbedder::embed(const std::string& text) const {
    if (trim(text).empty()) throw Error(ErrorCode::EmptyText, "embed() needs non-empty text");
    Vector v(dim_, 0.0);
    for (const std::string& token : detail::split_ws(text)) {
        std::uint64_t bucket = detail::fnv1a64(token, 0x5eed0001) % dim_;
        double sign = (detail::fnv1a64(token, 0x5eed0002) & 1) ? 1.0 : -1.0;
        v[bucket] += sign;
    }
    double n = l2_norm(v);
    if (n < 1e-12) {
        // Signed counts cancelled out; fall back to a single deterministic
        // bucket so the result is still a unit vector.
        v.assign(dim_, 0.0);
        v[detail::fnv1a64(text, 0x5eed0003) % dim_] = 1.0;
        return v;
    }
    for (double& x : v) x /= n;
    return v;
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderConfig cfg) : cfg_(std::move(cfg)) {}

std::string RemoteEmbedder::id() const { return "remote-" + cfg_.model; }

std::size_t RemoteEmbedder::dimension() const {
    if (dim_ == 0)
        throw Error(ErrorCode::ProviderUnavailable, "dimension unknown before first embed");
    return dim_;
}

Vector RemoteEmbedder::embed(const std::string& text) const {
    auto vecs = embed_batch({text});
    return vecs.at(0);
}

std::vector<Vector> RemoteEmbedder::embed_batch(const std::vector<std::string>& texts) const {
    for (const auto& t : texts)
        if (trim(t).empty()) throw Error(ErrorCode::EmptyText, "embed() needs non-empty text");

    httplib::Client client(cfg_.endpoint);
    client.set_read_timeout(cfg_.timeout_seconds, 0);
    client.set_connection_timeout(cfg_.timeout_seconds, 0);

    std::vector<Vector> out;
    out.reserve(texts.size());
    for (std::size_t off = 0; off < texts.size(); off += cfg_.batch_size) {
        std::size_t end = std::min(texts.size(), off + cfg_.batch_size);
        json body = {{"model", cfg_.model},
                     {"input", json::array()}};
        for (std::size_t i = off; i < end; ++i) body["input"].push_back(texts[i]);

        auto res = client.Post("/v1/embeddings", body.dump(), "application/json");
        if (!res)
            throw Error(ErrorCode::ProviderUnavailable,
                        "embedding endpoint unreachable: " + cfg_.endpoint);
        if (res->status != 200)
            throw Error(ErrorCode::ProviderUnavailable,
                        "embedding endpoint returned " + std::to_string(res->status));
        json parsed = json::parse(res->body, nullptr, false);
        if (parsed.is_discarded() || !parsed.contains("data"))
            throw Error(ErrorCode::ProviderUnavailable, "malformed embedding response");
        for (const auto& item : parsed["data"]) {
            Vector v = item.at("embedding").get<Vector>();
            normalize(v);
            if (dim_ == 0) dim_ = v.size();
            if (v.size() != dim_)
                throw Error(ErrorCode::DimensionMismatch, "embedding dimension changed");
            out.push_back(std::move(v));
        }
    }
    if (out.size() != texts.size())
        throw Error(ErrorCode::ProviderUnavailable, "embedding count mismatch");
    return out;
}

namespace {
std::string cache_key(const std::string& provider_id, const std::string& text) {
    return provider_id + '\x1f' + text;
}
}  // namespace

CachingEmbedder::CachingEmbedder(std::shared_ptr<const EmbeddingProvider> inner,
                                 std::string cache_path)
    : inner_(std::move(inner)), cache_path_(std::move(cache_path)) {
    std::ifstream in(cache_path_);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded()) continue;
        if (!rec.contains("provider") || !rec.contains("text") || !rec.contains("vec")) continue;
        cache_[cache_key(rec["provider"], rec["text"])] = rec["vec"].get<Vector>();
    }
}

CachingEmbedder::~CachingEmbedder() {
    try {
        flush();
    } catch (...) {
    }
}

Vector CachingEmbedder::embed(const std::string& text) const {
    const std::string key = cache_key(inner_->id(), text);
    {
        std::lock_guard lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) {
            ++hits_;
            return it->second;
        }
    }
    Vector v = inner_->embed(text);
    std::lock_guard lock(mu_);
    auto [it, inserted] = cache_.emplace(key, v);
    if (inserted) {
        ++misses_;
        dirty_ = true;
    }
    return it->second;
}

std::size_t CachingEmbedder::hits() const {
    std::lock_guard lock(mu_);
    return hits_;
}

std::size_t CachingEmbedder::misses() const {
    std::lock_guard lock(mu_);
    return misses_;
}

void CachingEmbedder::flush() const {
    std::lock_guard lock(mu_);
    if (!dirty_ || cache_path_.empty()) return;
    std::ofstream out(cache_path_, std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "cannot write cache " + cache_path_);
    for (const auto& [key, vec] : cache_) {
        auto sep = key.find('\x1f');
        json rec = {{"provider", key.substr(0, sep)},
                    {"text", key.substr(sep + 1)},
                    {"vec", vec}};
        out << rec.dump() << '\n';
    }
    dirty_ = false;
}

std::vector<std::pair<std::string, double>> top_n(
    const Vector& query, const std::vector<std::pair<std::string, Vector>>& items,
    std::size_t n) {
    std::vector<std::pair<std::string, double>> scored;
    scored.reserve(items.size());
    for (const auto& [id, vec] : items) scored.emplace_back(id, inner_product(query, vec));
    std::stable_sort(scored.begin(), scored.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (scored.size() > n) scored.resize(n);
    return scored;
}

}  // namespace graphmem
