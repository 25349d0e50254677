#include "vertisim/mqtt/topic.hpp"

#include <algorithm>
#include <cstdint>

namespace vertisim::mqtt {

std::vector<std::string_view> split_levels(std::string_view topic) {
    std::vector<std::string_view> levels;
    std::size_t start = 0;
    while (true) {
        const auto slash = topic.find('/', start);
        if (slash == std::string_view::npos) {
            levels.push_back(topic.substr(start));
            return levels;
        }
        levels.push_back(topic.substr(start, slash - start));
        start = slash + 1;
    }
}

bool valid_topic_name(std::string_view topic) {
    if (topic.empty() || topic.size() > UINT16_MAX) return false;
    for (char c : topic) {
        if (c == '+' || c == '#' || c == '\0') return false;
    }
    return true;
}

bool valid_topic_filter(std::string_view filter) {
    if (filter.empty() || filter.size() > UINT16_MAX) return false;
    if (filter.find('\0') != std::string_view::npos) return false;
    const auto levels = split_levels(filter);
    for (std::size_t i = 0; i < levels.size(); ++i) {
        const auto level = levels[i];
        const bool has_plus = level.find('+') != std::string_view::npos;
        const bool has_hash = level.find('#') != std::string_view::npos;
        if (has_plus && level != "+") return false;
        if (has_hash && (level != "#" || i + 1 != levels.size())) return false;
    }
    return true;
}

bool topic_matches(std::string_view filter, std::string_view topic) {
    std::size_t f = 0;
    std::size_t t = 0;
    while (true) {
        const auto f_end = std::min(filter.find('/', f), filter.size());
        const auto f_level = filter.substr(f, f_end - f);
        if (f_level == "#") return true;

        const auto t_end = std::min(topic.find('/', t), topic.size());
        const auto t_level = topic.substr(t, t_end - t);
        if (f_level != "+" && f_level != t_level) return false;

        const bool f_done = f_end == filter.size();
        const bool t_done = t_end == topic.size();
        if (t_done) {
            if (f_done) return true;
            // "a/#" also matches "a": the parent level counts as zero remaining levels.
            return filter.substr(f_end + 1) == "#";
        }
        if (f_done) return false;
        f = f_end + 1;
        t = t_end + 1;
    }
}

}  // namespace vertisim::mqtt
