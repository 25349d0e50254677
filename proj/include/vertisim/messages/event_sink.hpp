#pragma once

#include <string>

#include "json.hpp"
#include "vertisim/messages/geometry.hpp"

namespace vertisim {

/// Receives domain events (plan-filed, takeoff, pad-closed, ...) from services.
class EventSink {
public:
    virtual ~EventSink() = default;
    virtual void record(SimTime time, const std::string& source, const std::string& kind,
                        nlohmann::json payload = nlohmann::json::object()) = 0;
};

/// Discards everything; the default for services used stand-alone.
class NullSink final : public EventSink {
public:
    void record(SimTime, const std::string&, const std::string&, nlohmann::json) override {}
};

inline NullSink& null_sink() {
    static NullSink sink;
    return sink;
}

}  // namespace vertisim
