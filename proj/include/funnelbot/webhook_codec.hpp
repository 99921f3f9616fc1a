#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>

#include "funnelbot/forge.hpp"
#include "funnelbot/timeline.hpp"

namespace funnelbot {

// Event names / payload shapes the mediator does not react to decode to this.
struct Ignored {
    std::string reason;

    bool operator==(const Ignored&) const = default;
};

// A decoded webhook: the timeline event plus where it belongs. The event's
// seq is left at 0 — the per-pull-request ordinal is assigned when the event
// is folded into a document.
struct InboundEvent {
    std::string repo;
    std::int64_t pr_number = 0;
    TimelineEvent event;

    bool operator==(const InboundEvent&) const = default;
};

class DecodeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Maps forge payloads onto timeline events: pull_request/opened, and
// issue_comment created/edited on issues that are pull requests. Everything
// else is Ignored. Throws DecodeError naming the missing/invalid field.
std::variant<InboundEvent, Ignored> decode_event(const ForgeEventEnvelope& envelope);

// Payload encoder for the fake side: produces the forge-shaped envelope a
// live webhook would carry for this event, signed when secret is non-empty.
// decode_event over the result yields the event back (seq stays 0).
ForgeEventEnvelope encode_event(const std::string& repo, std::int64_t pr_number,
                                const TimelineEvent& event, std::string_view secret);

}  // namespace funnelbot
