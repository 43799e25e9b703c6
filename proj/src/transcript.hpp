// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

namespace qsdc {

// Everything that happens on the public classical channel, plus photon-block
// transmissions, in order.  Secret operation choices never appear here until
// their owner publishes them, so an eavesdropper model may read the
// transcript freely.  The text rendering is stable line-per-event so runs can
// be compared byte-for-byte.
struct TranscriptEvent {
    std::string type;     // transmit, receipt-ack, check-start, sample-position,
                          // basis-choice, outcome, op-publication, check-verdict,
                          // abort, delivery
    std::string actor;    // sender, controller1..N, receiver
    int triple = -1;      // -1 when not about a single triple
    std::string payload;  // space-separated key=value pairs
};

class Transcript {
public:
    void append(std::string type, std::string actor, int triple, std::string payload) {
        events_.push_back({std::move(type), std::move(actor), triple, std::move(payload)});
    }

    const std::vector<TranscriptEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }

    std::string to_text() const {
        std::string out;
        for (const auto& e : events_) {
            out += e.type;
            out += " actor=";
            out += e.actor;
            if (e.triple >= 0) {
                out += " triple=";
                out += std::to_string(e.triple);
            }
            if (!e.payload.empty()) {
                out += ' ';
                out += e.payload;
            }
            out += '\n';
        }
        return out;
    }

private:
    std::vector<TranscriptEvent> events_;
};

} // namespace qsdc
