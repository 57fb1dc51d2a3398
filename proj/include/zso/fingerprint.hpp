#ifndef ZSO_FINGERPRINT_HPP
#define ZSO_FINGERPRINT_HPP

#include <array>
#include <string>
#include <string_view>

#include <openssl/evp.h>

#include "error.hpp"

namespace zso {

/// Lowercase hex SHA-256 of the given bytes.
inline std::string sha256_hex(std::string_view bytes)
{
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::IoError, "SHA-256 digest failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0x0f];
    }
    return out;
}

inline std::string prompt_fingerprint(std::string_view prompt) { return sha256_hex(prompt); }

} // namespace zso

#endif // ZSO_FINGERPRINT_HPP
