#include "vertisim/messages/display_time.hpp"

#include <chrono>
#include <cstdio>

namespace vertisim {

namespace {

using namespace std::chrono;

struct Civil {
    year_month_day ymd;
    int hour, minute, second;
};

Civil civil(std::int64_t unix_seconds) {
    const sys_seconds tp{seconds{unix_seconds}};
    const auto day = floor<days>(tp);
    const auto tod = hh_mm_ss{tp - day};
    return {year_month_day{day}, static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
            static_cast<int>(tod.seconds().count())};
}

std::int64_t floor_seconds(SimTime t) { return t >= 0 ? t / 1000 : -((-t + 999) / 1000); }

}  // namespace

std::optional<DisplayClock> DisplayClock::from_iso(std::string_view text) {
    int y = 0;
    unsigned mo = 0, d = 0, h = 0, mi = 0, s = 0;
    char tail = 0;
    const std::string buf(text);
    if (std::sscanf(buf.c_str(), "%d-%u-%uT%u:%u:%u%c", &y, &mo, &d, &h, &mi, &s, &tail) != 6) return std::nullopt;
    const year_month_day ymd{year{y}, month{mo}, day{d}};
    if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
    const auto tp = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
    return DisplayClock(tp.time_since_epoch().count());
}

std::string DisplayClock::clock(SimTime t) const {
    const auto c = civil(epoch_ + floor_seconds(t));
    char out[16];
    std::snprintf(out, sizeof out, "%02d:%02d:%02d", c.hour, c.minute, c.second);
    return out;
}

std::string DisplayClock::date_time(SimTime t) const {
    static const char* kMonths[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                    "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
    const auto c = civil(epoch_ + floor_seconds(t));
    char out[40];
    std::snprintf(out, sizeof out, "%02u-%s-%04d %02d:%02d:%02d", static_cast<unsigned>(c.ymd.day()),
                  kMonths[static_cast<unsigned>(c.ymd.month()) - 1], static_cast<int>(c.ymd.year()), c.hour,
                  c.minute, c.second);
    return out;
}

}  // namespace vertisim
