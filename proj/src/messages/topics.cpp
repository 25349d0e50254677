#include "vertisim/messages/topics.hpp"

namespace vertisim::topics {

std::string flightplan_decision(const std::string& callsign) { return "uspace/flightplan/decision/" + callsign; }
std::string position(const std::string& callsign) { return "uspace/position/" + callsign; }
std::string adherence(const std::string& callsign) { return "uspace/adherence/" + callsign; }
std::string vertidrome(const std::string& vd, const std::string& leaf) { return "vertidrome/" + vd + "/" + leaf; }
std::string fleet_command(const std::string& callsign) { return "fleet/" + callsign + "/command"; }

std::string topic_for(const Envelope& env) {
    return std::visit(
        [&](const auto& b) -> std::string {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, RegistrationRequest>) {
                return kRegistryRequest;
            } else if constexpr (std::is_same_v<T, RegistrationResponse>) {
                return kRegistryResponse;
            } else if constexpr (std::is_same_v<T, FlightPlan>) {
                if (env.type == MessageType::FlightPlan) return kFlightPlanRequest;
                return vertidrome(b.vertidrome(), "request");
            } else if constexpr (std::is_same_v<T, FlightStatus>) {
                return kFlightPlanRequest;
            } else if constexpr (std::is_same_v<T, FlightAuthorisation>) {
                return flightplan_decision(b.callsign);
            } else if constexpr (std::is_same_v<T, SlotDecision> || std::is_same_v<T, SlotDisplaced> ||
                                 std::is_same_v<T, EmsConfirmation>) {
                return vertidrome(b.vertidrome, "decision");
            } else if constexpr (std::is_same_v<T, SlotCancel> || std::is_same_v<T, EmsDemand>) {
                return vertidrome(b.vertidrome, "request");
            } else if constexpr (std::is_same_v<T, PositionReport>) {
                return position(b.callsign);
            } else if constexpr (std::is_same_v<T, AdherenceNotice>) {
                return adherence(b.callsign);
            } else if constexpr (std::is_same_v<T, EmergencyReport>) {
                return kEmergency;
            } else if constexpr (std::is_same_v<T, PadStatusNotice> || std::is_same_v<T, InfrastructureHealth>) {
                return vertidrome(b.vertidrome, "padstatus");
            } else if constexpr (std::is_same_v<T, SlotForecast>) {
                return vertidrome(b.vertidrome, "forecast");
            } else if constexpr (std::is_same_v<T, WeatherReport>) {
                return vertidrome(b.vertidrome, "weather");
            } else if constexpr (std::is_same_v<T, GfmuPreference>) {
                return vertidrome(b.vertidrome, "gfmu");
            } else {
                static_assert(std::is_same_v<T, FleetCommand> || std::is_same_v<T, HazardAdvisory>);
                return fleet_command(b.callsign);
            }
        },
        env.body);
}

Delivery delivery_for(MessageType type) {
    switch (type) {
        case MessageType::PositionReport: return {0, false};
        case MessageType::PadStatusNotice: return {1, true};
        default: return {1, false};
    }
}

}  // namespace vertisim::topics
