#pragma once

#include <string>
#include <string_view>

#include "funnelbot/forge.hpp"

namespace funnelbot {

inline constexpr const char* kSignatureHeader = "X-Hub-Signature-256";
inline constexpr const char* kDeliveryHeader = "X-GitHub-Delivery";
inline constexpr const char* kEventHeader = "X-GitHub-Event";

// Lowercase hex HMAC-SHA-256 of payload under secret.
std::string hmac_sha256_hex(std::string_view secret, std::string_view payload);

// "sha256=<hex>", the value a forge puts in the signature header.
std::string signature_for(std::string_view secret, std::string_view payload);

// Compares full length without data-dependent early exit. Length mismatch
// returns false immediately; lengths here are not secret.
bool constant_time_equal(std::string_view a, std::string_view b);

// True iff the envelope's signature header matches the HMAC of its raw body.
// A missing header is a plain false, not an error.
bool verify_signature(std::string_view secret, const ForgeEventEnvelope& envelope);

}  // namespace funnelbot
