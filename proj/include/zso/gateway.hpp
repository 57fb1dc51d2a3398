#ifndef ZSO_GATEWAY_HPP
#define ZSO_GATEWAY_HPP

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "fingerprint.hpp"
#include "response.hpp"

namespace zso {

/// One round trip to a backend; retries are layered on top by classify_prompt.
struct Attempt {
    TransportStatus status;
    std::string text;
};

class Backend {
public:
    explicit Backend(BackendConfig config) : config_(std::move(config)) { config_.validate(); }
    virtual ~Backend() = default;

    Backend(const Backend&) = delete;
    Backend& operator=(const Backend&) = delete;

    const BackendConfig& config() const noexcept { return config_; }

    /// Must be safe to call from up to config().max_in_flight threads at once.
    virtual Attempt attempt(std::string_view prompt) = 0;

private:
    BackendConfig config_;
};

/// Sends `prompt` with retries and exponential backoff. Transport problems are
/// reported in the status of the returned response, never thrown.
inline RawResponse classify_prompt(std::string_view prompt, const RowId& row_id, Backend& backend)
{
    const auto& cfg = backend.config();
    RawResponse out;
    out.row_id = row_id;
    out.model_id = cfg.model_id;
    out.prompt_fingerprint = prompt_fingerprint(prompt);

    auto delay = cfg.retry_backoff;
    for (std::size_t tries = 0;; ++tries) {
        Attempt a = backend.attempt(prompt);
        out.status = a.status;
        out.completion_text = std::move(a.text);
        if (out.status.is_ok() || !out.status.retryable() || tries >= cfg.max_retries) break;
        if (delay.count() > 0) std::this_thread::sleep_for(delay);
        delay *= 2;
    }
    if (!out.status.is_ok()) out.completion_text.clear();
    return out;
}

/// Table-driven backend for tests and offline runs. Lookups go by prompt
/// fingerprint, then an optional responder callback, then the default
/// response; with none of these the attempt reports an empty completion.
class StubBackend final : public Backend {
public:
    using Responder = std::function<std::optional<std::string>(std::string_view prompt)>;

    explicit StubBackend(BackendConfig config) : Backend(std::move(config))
    {
        for (const auto& [fp, text] : this->config().stub_table) table_[fp] = text;
        default_ = this->config().stub_default;
    }

    void set_response(std::string_view prompt, std::string text) { table_[prompt_fingerprint(prompt)] = std::move(text); }
    void set_default(std::optional<std::string> text) { default_ = std::move(text); }
    void set_responder(Responder r) { responder_ = std::move(r); }
    void set_latency(std::chrono::microseconds d) { latency_ = d; }

    /// The next `times` attempts for this prompt fail with `status`.
    void fail_next(std::string_view prompt, TransportStatus status, std::size_t times)
    {
        std::lock_guard lock(mu_);
        failures_[prompt_fingerprint(prompt)] = {status, times};
    }

    std::size_t calls() const noexcept { return calls_.load(); }
    std::size_t peak_in_flight() const noexcept { return peak_.load(); }
    void reset_counters() noexcept
    {
        calls_ = 0;
        peak_ = 0;
    }

    Attempt attempt(std::string_view prompt) override
    {
        ++calls_;
        const auto now = ++in_flight_;
        for (auto prev = peak_.load(); now > prev && !peak_.compare_exchange_weak(prev, now);) {
        }
        struct Leave {
            std::atomic<std::size_t>& n;
            ~Leave() { --n; }
        } leave{in_flight_};

        if (latency_.count() > 0) std::this_thread::sleep_for(latency_);

        const auto fp = prompt_fingerprint(prompt);
        {
            std::lock_guard lock(mu_);
            if (auto it = failures_.find(fp); it != failures_.end() && it->second.second > 0) {
                --it->second.second;
                return {it->second.first, {}};
            }
        }
        if (auto it = table_.find(fp); it != table_.end()) return {TransportStatus::ok(), it->second};
        if (responder_)
            if (auto text = responder_(prompt)) return {TransportStatus::ok(), std::move(*text)};
        if (default_) return {TransportStatus::ok(), *default_};
        return {TransportStatus::empty(), {}};
    }

private:
    std::unordered_map<std::string, std::string> table_;
    std::optional<std::string> default_;
    Responder responder_;
    std::chrono::microseconds latency_{0};

    std::mutex mu_;
    std::unordered_map<std::string, std::pair<TransportStatus, std::size_t>> failures_;

    std::atomic<std::size_t> calls_{0};
    std::atomic<std::size_t> in_flight_{0};
    std::atomic<std::size_t> peak_{0};
};

struct ParsedUrl {
    std::string origin; // scheme://host[:port]
    std::string path;
};

inline ParsedUrl split_url(std::string_view url)
{
    const auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos)
        throw Error(ErrorCode::InvalidConfig, "endpoint_url needs a scheme: " + std::string(url));
    const auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string_view::npos) return {std::string(url), "/"};
    return {std::string(url.substr(0, path_start)), std::string(url.substr(path_start))};
}

/// Completion-style HTTP endpoint (POST {model, prompt, max_tokens,
/// temperature}); the first choice's text is the completion. Chat-shaped
/// replies (choices[0].message.content) are accepted too.
class HttpCompletionBackend final : public Backend {
public:
    explicit HttpCompletionBackend(BackendConfig config) : Backend(std::move(config))
    {
        url_ = split_url(this->config().endpoint_url);
        if (const auto& env = this->config().api_key_env) {
            if (const char* key = std::getenv(env->c_str()); key && *key) {
                const auto& scheme = this->config().auth_scheme;
                auth_value_ = scheme.empty() ? std::string(key) : scheme + " " + key;
            }
        }
    }

    static std::string request_body(const BackendConfig& cfg, std::string_view prompt)
    {
        nlohmann::json body;
        body["model"] = cfg.model_id;
        body["prompt"] = prompt;
        body["max_tokens"] = cfg.max_new_tokens;
        body["temperature"] = BackendConfig::temperature;
        return body.dump();
    }

    static Attempt read_reply(int http_status, std::string_view body)
    {
        if (http_status < 200 || http_status >= 300) return {TransportStatus::http_error(http_status), {}};
        auto json = nlohmann::json::parse(body, nullptr, false);
        if (json.is_discarded() || !json.is_object()) return {TransportStatus::empty(), {}};
        auto choices = json.find("choices");
        if (choices == json.end() || !choices->is_array() || choices->empty()) return {TransportStatus::empty(), {}};
        const auto& first = (*choices)[0];
        std::string text;
        if (auto t = first.find("text"); t != first.end() && t->is_string()) text = t->get<std::string>();
        else if (auto m = first.find("message"); m != first.end() && m->is_object()) {
            if (auto c = m->find("content"); c != m->end() && c->is_string()) text = c->get<std::string>();
        }
        if (text.empty()) return {TransportStatus::empty(), {}};
        return {TransportStatus::ok(), std::move(text)};
    }

    Attempt attempt(std::string_view prompt) override
    {
        const auto& cfg = config();
        httplib::Client client(url_.origin);
        const auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
            std::chrono::duration<double>(cfg.request_timeout_s));
        client.set_connection_timeout(timeout);
        client.set_read_timeout(timeout);
        client.set_write_timeout(timeout);
        client.set_keep_alive(false);

        httplib::Headers headers;
        if (!auth_value_.empty()) headers.emplace(cfg.auth_header, auth_value_);

        auto res = client.Post(url_.path, headers, request_body(cfg, prompt), "application/json");
        if (!res) {
            const auto err = res.error();
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                return {TransportStatus::timeout(), {}};
            return {TransportStatus::http_error(0), {}};
        }
        return read_reply(res->status, res->body);
    }

private:
    ParsedUrl url_;
    std::string auth_value_;
};

inline std::unique_ptr<Backend> make_backend(const BackendConfig& config)
{
    switch (config.kind) {
    case BackendKind::HttpCompletion: return std::make_unique<HttpCompletionBackend>(config);
    case BackendKind::Stub: return std::make_unique<StubBackend>(config);
    }
    throw Error(ErrorCode::InvalidConfig, "unknown backend kind");
}

/// Never touches the network: every attempt is an empty completion. Used for
/// cache-only scoring, where only cache misses reach the backend.
class OfflineBackend final : public Backend {
public:
    using Backend::Backend;

    Attempt attempt(std::string_view) override
    {
        ++misses_;
        return {TransportStatus::empty(), {}};
    }

    std::size_t misses() const noexcept { return misses_.load(); }

private:
    std::atomic<std::size_t> misses_{0};
};

} // namespace zso

#endif // ZSO_GATEWAY_HPP
