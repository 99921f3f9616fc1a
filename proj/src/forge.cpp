#include "funnelbot/forge.hpp"

namespace funnelbot {

const char* to_string(ForgeErrorKind kind) {
    switch (kind) {
        case ForgeErrorKind::not_found: return "not_found";
        case ForgeErrorKind::permission_denied: return "permission_denied";
        case ForgeErrorKind::rate_limited: return "rate_limited";
        case ForgeErrorKind::transient: return "transient";
        case ForgeErrorKind::protocol: return "protocol";
    }
    return "unknown";
}

}  // namespace funnelbot
