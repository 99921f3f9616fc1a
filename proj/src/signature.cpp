#include "funnelbot/signature.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include <array>

namespace funnelbot {

std::string hmac_sha256_hex(std::string_view secret, std::string_view payload) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int digest_len = 0;
    HMAC(EVP_sha256(), secret.data(), static_cast<int>(secret.size()),
         reinterpret_cast<const unsigned char*>(payload.data()), payload.size(),
         digest.data(), &digest_len);

    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(digest_len * 2);
    for (unsigned int i = 0; i < digest_len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0x0f]);
    }
    return out;
}

std::string signature_for(std::string_view secret, std::string_view payload) {
    return "sha256=" + hmac_sha256_hex(secret, payload);
}

bool constant_time_equal(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    volatile unsigned char acc = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        acc = static_cast<unsigned char>(
            acc | (static_cast<unsigned char>(a[i]) ^ static_cast<unsigned char>(b[i])));
    }
    return acc == 0;
}

bool verify_signature(std::string_view secret, const ForgeEventEnvelope& envelope) {
    if (secret.empty()) return false;
    if (!envelope.signature_header) return false;
    const std::string expected = signature_for(secret, envelope.raw_body);
    return constant_time_equal(expected, *envelope.signature_header);
}

}  // namespace funnelbot
