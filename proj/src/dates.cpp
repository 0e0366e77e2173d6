#include "fxres/dates.hpp"

#include <array>
#include <cstdio>

#include "fxres/errors.hpp"

namespace fxres {

namespace {

// Howard Hinnant's civil-from-days / days-from-civil algorithms.
int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<int64_t>(doe) - 719468;
}

void civil_from_days(int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yy = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

int days_in_month(int y, int m) {
    static constexpr std::array<int, 12> len = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) return 29;
    return len[static_cast<size_t>(m - 1)];
}

} // namespace

Date make_date(int year, int month, int day) {
    return Date{static_cast<int32_t>(days_from_civil(year, static_cast<unsigned>(month),
                                                     static_cast<unsigned>(day)))};
}

void civil_from_date(Date d, int& year, int& month, int& day) {
    unsigned m, dd;
    civil_from_days(d.days, year, m, dd);
    month = static_cast<int>(m);
    day = static_cast<int>(dd);
}

int weekday(Date d) {
    // 1970-01-01 was a Thursday (weekday 4)
    const int64_t z = d.days;
    return static_cast<int>(z >= -4 ? (z + 4) % 7 : (z + 5) % 7 + 6);
}

Date parse_iso_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') {
        throw MalformedRow("date not in YYYY-MM-DD format: '" + std::string(s) + "'");
    }
    auto digits = [&](size_t pos, size_t n) -> int {
        int v = 0;
        for (size_t i = 0; i < n; ++i) {
            const char c = s[pos + i];
            if (c < '0' || c > '9') {
                throw MalformedRow("date not in YYYY-MM-DD format: '" + std::string(s) + "'");
            }
            v = v * 10 + (c - '0');
        }
        return v;
    };
    const int y = digits(0, 4);
    const int m = digits(5, 2);
    const int d = digits(8, 2);
    if (m < 1 || m > 12 || d < 1 || d > days_in_month(y, m)) {
        throw MalformedRow("invalid calendar date: '" + std::string(s) + "'");
    }
    return make_date(y, m, d);
}

std::string format_iso_date(Date d) {
    int y, m, dd;
    civil_from_date(d, y, m, dd);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, dd);
    return buf;
}

bool is_quarter_end(Date d) {
    int y, m, dd;
    civil_from_date(d, y, m, dd);
    return (m == 3 || m == 6 || m == 9 || m == 12) && dd == days_in_month(y, m);
}

bool is_year_end(Date d) {
    int y, m, dd;
    civil_from_date(d, y, m, dd);
    return m == 12 && dd == 31;
}

Date quarter_end_of(Date d) {
    int y, m, dd;
    civil_from_date(d, y, m, dd);
    const int qm = ((m - 1) / 3) * 3 + 3;
    return make_date(y, qm, days_in_month(y, qm));
}

int quarter_index(Date d) {
    int y, m, dd;
    civil_from_date(d, y, m, dd);
    return y * 4 + (m - 1) / 3;
}

std::string quarter_label(Date d) {
    int y, m, dd;
    civil_from_date(d, y, m, dd);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04dQ%d", y, (m - 1) / 3 + 1);
    return buf;
}

int year_of(Date d) {
    int y, m, dd;
    civil_from_date(d, y, m, dd);
    return y;
}

} // namespace fxres
