#pragma once

#include <utility>
#include <vector>

#include "vertisim/messages/envelope.hpp"

namespace vertisim {

/// A message a service wants sent; the hosting node adds sender, seq and time.
struct Outgoing {
    MessageType type;
    Body body;
};

inline Outgoing outgoing(Body body, bool to_vertidrome = false) {
    const auto type = default_type(body, to_vertidrome);
    return Outgoing{type, std::move(body)};
}

using Outbox = std::vector<Outgoing>;

}  // namespace vertisim
