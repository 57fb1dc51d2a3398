#ifndef ZSO_RESPONSE_CACHE_HPP
#define ZSO_RESPONSE_CACHE_HPP

#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "error.hpp"
#include "gateway.hpp"
#include "response.hpp"

namespace zso {

// Append-only JSON Lines store of successful responses keyed by
// (model_id, prompt_fingerprint). Lines look like
//   {"completion_text":"Yes","model_id":"t0","prompt_fingerprint":"…","row_id":"4","transport_status":"ok","v":1}
// An empty path gives a purely in-memory cache.
class ResponseCache {
public:
    static constexpr int kSchemaVersion = 1;

    ResponseCache() = default;

    explicit ResponseCache(std::filesystem::path path) : path_(std::move(path))
    {
        if (path_.empty()) return;
        if (std::filesystem::exists(path_)) load();
        if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
        out_.open(path_, std::ios::binary | std::ios::app);
        if (!out_) throw Error(ErrorCode::IoError, "cannot open cache " + path_.string() + " for append");
    }

    static std::string to_line(const RawResponse& r)
    {
        nlohmann::json j;
        j["v"] = kSchemaVersion;
        j["row_id"] = r.row_id;
        j["model_id"] = r.model_id;
        j["prompt_fingerprint"] = r.prompt_fingerprint;
        j["completion_text"] = r.completion_text;
        j["transport_status"] = r.status.to_string();
        return j.dump();
    }

    /// Throws CacheCorrupt for anything that is not a version-1 record.
    static RawResponse from_line(const std::string& line, std::size_t line_no)
    {
        auto j = nlohmann::json::parse(line, nullptr, false);
        auto corrupt = [&](const std::string& why) { return LineError(ErrorCode::CacheCorrupt, line_no, why); };
        if (j.is_discarded() || !j.is_object()) throw corrupt("not a JSON object");
        auto str = [&](const char* key) {
            auto it = j.find(key);
            if (it == j.end() || !it->is_string()) throw corrupt(std::string("missing string field '") + key + "'");
            return it->get<std::string>();
        };
        auto v = j.find("v");
        if (v == j.end() || !v->is_number_integer() || v->get<int>() != kSchemaVersion)
            throw corrupt("unsupported schema version");
        RawResponse r;
        r.row_id = str("row_id");
        r.model_id = str("model_id");
        r.prompt_fingerprint = str("prompt_fingerprint");
        r.completion_text = str("completion_text");
        auto status = TransportStatus::parse(str("transport_status"));
        if (!status) throw corrupt("bad transport_status");
        r.status = *status;
        return r;
    }

    std::optional<RawResponse> lookup(const std::string& model_id, const std::string& fingerprint) const
    {
        std::shared_lock lock(mu_);
        auto it = entries_.find(key(model_id, fingerprint));
        if (it == entries_.end()) return std::nullopt;
        return it->second;
    }

    /// Stores ok responses only; the first entry for a key wins.
    void append(const RawResponse& r)
    {
        if (!r.status.is_ok()) return;
        std::unique_lock lock(mu_);
        auto [it, inserted] = entries_.emplace(key(r.model_id, r.prompt_fingerprint), r);
        if (!inserted || path_.empty()) return;
        out_ << to_line(r) << '\n';
        out_.flush();
        if (!out_) throw Error(ErrorCode::IoError, "cannot append to cache " + path_.string());
    }

    std::size_t size() const
    {
        std::shared_lock lock(mu_);
        return entries_.size();
    }

    const std::filesystem::path& path() const noexcept { return path_; }

private:
    static std::string key(const std::string& model_id, const std::string& fingerprint)
    {
        return model_id + '\n' + fingerprint;
    }

    void load()
    {
        std::ifstream in(path_, std::ios::binary);
        if (!in) throw Error(ErrorCode::IoError, "cannot read cache " + path_.string());
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            RawResponse r = from_line(line, line_no);
            entries_.emplace(key(r.model_id, r.prompt_fingerprint), std::move(r));
        }
    }

    std::filesystem::path path_;
    std::ofstream out_;
    mutable std::shared_mutex mu_;
    std::unordered_map<std::string, RawResponse> entries_;
};

/// Cache-first classification. A hit is returned with the caller's row id and
/// never reaches the backend.
inline RawResponse cached_classify(std::string_view prompt, const RowId& row_id, Backend& backend,
                                   ResponseCache& cache)
{
    const auto& model = backend.config().model_id;
    if (auto hit = cache.lookup(model, prompt_fingerprint(prompt))) {
        hit->row_id = row_id;
        return *hit;
    }
    RawResponse fresh = classify_prompt(prompt, row_id, backend);
    cache.append(fresh);
    return fresh;
}

} // namespace zso

#endif // ZSO_RESPONSE_CACHE_HPP
