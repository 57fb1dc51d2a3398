#ifndef ZSO_RESPONSE_HPP
#define ZSO_RESPONSE_HPP

#include <charconv>
#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "key_value.hpp"
#include "types.hpp"

namespace zso {

/// Outcome of talking to a backend, independent of what the model said.
class TransportStatus {
public:
    enum class Kind { Ok, Timeout, HttpError, Empty };

    static TransportStatus ok() noexcept { return TransportStatus(Kind::Ok, 0); }
    static TransportStatus timeout() noexcept { return TransportStatus(Kind::Timeout, 0); }
    /// Code 0 stands for a transport failure with no HTTP status (refused
    /// connection, reset socket).
    static TransportStatus http_error(int code) noexcept { return TransportStatus(Kind::HttpError, code); }
    static TransportStatus empty() noexcept { return TransportStatus(Kind::Empty, 0); }

    TransportStatus() = default;

    Kind kind() const noexcept { return kind_; }
    int http_code() const noexcept { return code_; }
    bool is_ok() const noexcept { return kind_ == Kind::Ok; }

    bool retryable() const noexcept
    {
        if (kind_ == Kind::Timeout) return true;
        if (kind_ == Kind::HttpError) return code_ == 0 || code_ == 408 || code_ == 429 || code_ >= 500;
        return false;
    }

    std::string to_string() const
    {
        switch (kind_) {
        case Kind::Ok: return "ok";
        case Kind::Timeout: return "timeout";
        case Kind::HttpError: return "http_error(" + std::to_string(code_) + ")";
        case Kind::Empty: return "empty";
        }
        return "?";
    }

    static std::optional<TransportStatus> parse(std::string_view s)
    {
        if (s == "ok") return ok();
        if (s == "timeout") return timeout();
        if (s == "empty") return empty();
        constexpr std::string_view prefix = "http_error(";
        if (s.size() > prefix.size() + 1 && s.substr(0, prefix.size()) == prefix && s.back() == ')') {
            int code = 0;
            const char* first = s.data() + prefix.size();
            const char* last = s.data() + s.size() - 1;
            auto [ptr, ec] = std::from_chars(first, last, code);
            if (ec == std::errc{} && ptr == last) return http_error(code);
        }
        return std::nullopt;
    }

    friend bool operator==(const TransportStatus&, const TransportStatus&) = default;

private:
    TransportStatus(Kind k, int code) noexcept : kind_(k), code_(code) {}

    Kind kind_ = Kind::Ok;
    int code_ = 0;
};

struct RawResponse {
    RowId row_id;
    std::string model_id;
    std::string prompt_fingerprint;
    std::string completion_text;
    TransportStatus status;

    friend bool operator==(const RawResponse&, const RawResponse&) = default;
};

enum class BackendKind { HttpCompletion, Stub };

/// Connection and decoding settings for one model under comparison.
/// Decoding is always greedy (temperature 0).
struct BackendConfig {
    BackendKind kind = BackendKind::Stub;
    std::string model_id;
    std::string endpoint_url; // http_completion only, e.g. http://localhost:8000/v1/completions
    std::size_t max_new_tokens = 8;
    double request_timeout_s = 60.0;
    std::size_t max_retries = 3;
    std::size_t max_in_flight = 4;
    std::chrono::milliseconds retry_backoff{250};
    std::string auth_header = "Authorization";
    std::string auth_scheme = "Bearer";
    std::optional<std::string> api_key_env;

    // stub only
    std::optional<std::string> stub_default;
    std::vector<std::pair<std::string, std::string>> stub_table; // fingerprint -> completion

    static constexpr double temperature = 0.0;

    void validate() const
    {
        auto bad = [&](const std::string& what) { throw Error(ErrorCode::InvalidConfig, model_id + ": " + what); };
        if (model_id.empty()) bad("model_id is empty");
        if (max_new_tokens < 1) bad("max_new_tokens must be >= 1");
        if (max_in_flight < 1) bad("max_in_flight must be >= 1");
        if (!(request_timeout_s > 0)) bad("request_timeout must be positive");
        if (kind == BackendKind::HttpCompletion && endpoint_url.empty()) bad("endpoint_url is required");
    }
};

/// Backend document keys: kind (http_completion | stub), model_id,
/// endpoint_url, max_new_tokens, request_timeout, max_retries, max_in_flight,
/// retry_backoff_ms, auth_header, auth_scheme, api_key_env, decoding (greedy),
/// stub_default, stub_response = <sha256 hex> -> <completion> (repeated).
inline BackendConfig backend_from_config(const KeyValueDocument& doc)
{
    doc.check_keys({"kind", "model_id", "endpoint_url", "max_new_tokens", "request_timeout", "max_retries",
                    "max_in_flight", "retry_backoff_ms", "auth_header", "auth_scheme", "api_key_env", "decoding",
                    "stub_default", "stub_response"});
    BackendConfig c;
    const auto kind = doc.require("kind");
    if (kind == "http_completion") c.kind = BackendKind::HttpCompletion;
    else if (kind == "stub") c.kind = BackendKind::Stub;
    else doc.fail("kind must be http_completion or stub");
    if (auto d = doc.get("decoding"); d && *d != "greedy") doc.fail("only greedy decoding is supported");
    c.model_id = doc.require("model_id");
    c.endpoint_url = doc.get_or("endpoint_url", "");
    if (auto v = doc.get_number<std::size_t>("max_new_tokens")) c.max_new_tokens = *v;
    if (auto v = doc.get_number<double>("request_timeout")) c.request_timeout_s = *v;
    if (auto v = doc.get_number<std::size_t>("max_retries")) c.max_retries = *v;
    if (auto v = doc.get_number<std::size_t>("max_in_flight")) c.max_in_flight = *v;
    if (auto v = doc.get_number<long>("retry_backoff_ms")) c.retry_backoff = std::chrono::milliseconds(*v);
    c.auth_header = doc.get_or("auth_header", c.auth_header);
    c.auth_scheme = doc.get_or("auth_scheme", c.auth_scheme);
    if (auto v = doc.get("api_key_env"); v && !v->empty()) c.api_key_env = *v;
    if (auto v = doc.get("stub_default")) c.stub_default = *v;
    for (const auto& entry : doc.get_all("stub_response")) {
        const auto arrow = entry.find("->");
        if (arrow == std::string::npos) doc.fail("stub_response '" + entry + "' is not 'fingerprint -> text'");
        c.stub_table.emplace_back(std::string(text::trim(std::string_view(entry).substr(0, arrow))),
                                  std::string(text::trim(std::string_view(entry).substr(arrow + 2))));
    }
    c.validate();
    return c;
}

inline BackendConfig load_backend(const std::filesystem::path& path)
{
    return backend_from_config(load_key_values(path));
}

} // namespace zso

#endif // ZSO_RESPONSE_HPP
