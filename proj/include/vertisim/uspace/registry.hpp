#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>

namespace vertisim::uspace {

struct Registration {
    std::string operator_id;
    std::string serial;
    std::string uas_id;
    std::string callsign;
};

struct Rejection {
    std::string reason;
};

/// UAS registry: one stable id per (operator, serial), assigned in order.
class Registry {
public:
    /// Idempotent per (operator, serial). A non-empty callsign is bound to
    /// the registration so flight plans and reports can be checked by callsign.
    std::variant<Registration, Rejection> register_uas(const std::string& operator_id, const std::string& serial,
                                                       const std::string& callsign = "");

    bool is_registered_callsign(const std::string& callsign) const { return by_callsign_.contains(callsign); }
    std::optional<Registration> find_by_callsign(const std::string& callsign) const;
    std::size_t size() const { return by_key_.size(); }

private:
    std::map<std::pair<std::string, std::string>, Registration> by_key_;
    std::map<std::string, std::string> by_callsign_;  // callsign -> uas_id
    int next_ = 1;
};

}  // namespace vertisim::uspace
