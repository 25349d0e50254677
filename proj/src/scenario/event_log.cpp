#include "vertisim/scenario/event_log.hpp"

#include <sstream>

namespace vertisim::scenario {

using nlohmann::json;

json LogEntry::to_json() const { return {{"t", time}, {"source", source}, {"kind", kind}, {"data", data}}; }

void EventLog::record(SimTime time, const std::string& source, const std::string& kind, json payload) {
    if (payload.is_null()) payload = json::object();
    entries_.push_back({time, source, kind, std::move(payload)});
    const auto index = entries_.size() - 1;
    // observers may append, so copy rather than hold a reference
    const LogEntry entry = entries_[index];
    for (const auto& o : observers_) o(entry);
}

EventLog EventLog::detached() const {
    EventLog copy;
    copy.entries_ = entries_;
    return copy;
}

const LogEntry* EventLog::find(const std::string& kind, const std::string& callsign) const {
    for (const auto& e : entries_) {
        if (e.kind != kind) continue;
        if (!callsign.empty() && e.data.value("callsign", std::string{}) != callsign) continue;
        return &e;
    }
    return nullptr;
}

std::vector<const LogEntry*> EventLog::find_all(const std::string& kind) const {
    std::vector<const LogEntry*> out;
    for (const auto& e : entries_)
        if (e.kind == kind) out.push_back(&e);
    return out;
}

std::size_t EventLog::count(const std::string& kind) const { return find_all(kind).size(); }

std::vector<std::string> EventLog::kinds() const {
    std::vector<std::string> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.kind);
    return out;
}

void EventLog::write_jsonl(std::ostream& out) const {
    for (const auto& e : entries_) out << e.to_json().dump() << '\n';
}

std::string EventLog::jsonl() const {
    std::ostringstream out;
    write_jsonl(out);
    return out.str();
}

}  // namespace vertisim::scenario
