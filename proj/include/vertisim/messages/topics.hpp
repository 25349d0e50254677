#pragma once

#include <string>

#include "vertisim/messages/envelope.hpp"

namespace vertisim::topics {

inline const std::string kRegistryRequest = "uspace/registry/request";
inline const std::string kRegistryResponse = "uspace/registry/response";
inline const std::string kFlightPlanRequest = "uspace/flightplan/request";
inline const std::string kEmergency = "uspace/emergency";

std::string flightplan_decision(const std::string& callsign);
std::string position(const std::string& callsign);
std::string adherence(const std::string& callsign);
std::string vertidrome(const std::string& vd, const std::string& leaf);  // request|decision|padstatus|...
std::string fleet_command(const std::string& callsign);

/// Topic an envelope travels on. Pure function of the type tag and body.
std::string topic_for(const Envelope& env);

struct Delivery {
    int qos = 1;
    bool retain = false;
};

/// Positions are QoS 0; everything else QoS 1; pad status additionally retained.
Delivery delivery_for(MessageType type);

}  // namespace vertisim::topics
