#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "vertisim/messages/event_sink.hpp"

namespace vertisim::scenario {

struct LogEntry {
    SimTime time = 0;
    std::string source;
    std::string kind;
    nlohmann::json data;

    nlohmann::json to_json() const;
};

/// Ordered record of every domain event in a run.
class EventLog final : public EventSink {
public:
    void record(SimTime time, const std::string& source, const std::string& kind, nlohmann::json payload) override;

    /// Observers see each entry right after it is appended (may record further entries).
    void on_record(std::function<void(const LogEntry&)> observer) { observers_.push_back(std::move(observer)); }

    /// Copy of the entries without observers.
    EventLog detached() const;

    const std::vector<LogEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

    /// First entry of `kind`, optionally restricted to a callsign in its data.
    const LogEntry* find(const std::string& kind, const std::string& callsign = {}) const;
    std::vector<const LogEntry*> find_all(const std::string& kind) const;
    std::size_t count(const std::string& kind) const;
    std::vector<std::string> kinds() const;

    /// One JSON object per line.
    void write_jsonl(std::ostream& out) const;
    std::string jsonl() const;

private:
    std::vector<LogEntry> entries_;
    std::vector<std::function<void(const LogEntry&)>> observers_;
};

}  // namespace vertisim::scenario
