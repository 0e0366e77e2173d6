#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace fxres {

// Calendar date stored as days since 1970-01-01 (proleptic Gregorian).
struct Date {
    int32_t days = 0;

    auto operator<=>(const Date&) const = default;
};

Date make_date(int year, int month, int day);
void civil_from_date(Date d, int& year, int& month, int& day);

// 0 = Sunday ... 6 = Saturday
int weekday(Date d);

// Throws MalformedRow on anything that is not a valid YYYY-MM-DD date.
Date parse_iso_date(std::string_view s);
std::string format_iso_date(Date d);

bool is_quarter_end(Date d);
bool is_year_end(Date d);

// Last calendar day of the quarter containing d.
Date quarter_end_of(Date d);

// year*4 + (q-1); a sortable quarter bucket index.
int quarter_index(Date d);
std::string quarter_label(Date d); // "2010Q3"

int year_of(Date d);

} // namespace fxres
