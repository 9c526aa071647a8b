#include "procgraph/types.hpp"

#include "procgraph/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace procgraph {

std::string_view to_string(NodeKind kind) {
    switch (kind) {
        case NodeKind::Uri: return "uri";
        case NodeKind::Blank: return "blank";
        case NodeKind::Literal: return "literal";
    }
    return "?";
}

Triple make_triple(std::string subject, std::string predicate, std::string object) {
    Triple t;
    t.subject = NodeId::uri(std::move(subject));
    t.predicate = NodeId::uri(std::move(predicate));
    t.object = t.predicate.id.starts_with('@') ? NodeId::literal(std::move(object))
                                               : NodeId::uri(std::move(object));
    return t;
}

std::optional<double> parse_number(std::string_view text) {
    if (text.empty()) return std::nullopt;
    // std::from_chars<double> is incomplete on some libstdc++ versions; strtod
    // on a bounded copy keeps this portable.
    std::string buf(text);
    const char* begin = buf.c_str();
    char* end = nullptr;
    errno = 0;
    double value = std::strtod(begin, &end);
    if (end != begin + buf.size() || errno == ERANGE) return std::nullopt;
    return value;
}

ScalarKind infer_scalar_kind(std::string_view lexical) {
    if (parse_instant(lexical) && lexical.find('-') != std::string_view::npos)
        return ScalarKind::Instant;
    if (auto n = parse_number(lexical)) {
        if (lexical.find_first_of(".eE") == std::string_view::npos) return ScalarKind::Integer;
        return ScalarKind::Decimal;
    }
    return ScalarKind::String;
}

int literal_compare(std::string_view a, std::string_view b) {
    auto na = parse_number(a);
    auto nb = parse_number(b);
    if (na && nb) {
        if (*na < *nb) return -1;
        if (*na > *nb) return 1;
        return 0;
    }
    int c = a.compare(b);
    return c < 0 ? -1 : c > 0 ? 1 : 0;
}

namespace {

// Howard Hinnant's days-from-civil algorithm.
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y += m <= 2;
}

bool read_uint(std::string_view s, std::size_t& pos, std::size_t digits, int& out) {
    if (pos + digits > s.size()) return false;
    int value = 0;
    for (std::size_t i = 0; i < digits; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    pos += digits;
    out = value;
    return true;
}

}  // namespace

std::optional<InstantMs> parse_instant(std::string_view text) {
    std::size_t pos = 0;
    int year, month, day;
    if (!read_uint(text, pos, 4, year)) return std::nullopt;
    if (pos >= text.size() || text[pos] != '-') return std::nullopt;
    ++pos;
    if (!read_uint(text, pos, 2, month)) return std::nullopt;
    if (pos >= text.size() || text[pos] != '-') return std::nullopt;
    ++pos;
    if (!read_uint(text, pos, 2, day)) return std::nullopt;
    if (month < 1 || month > 12 || day < 1 || day > 31) return std::nullopt;

    int hour = 0, minute = 0, second = 0, millis = 0;
    std::int64_t offset_min = 0;
    if (pos < text.size()) {
        char sep = text[pos];
        if (sep != 'T' && sep != 't' && sep != ' ') return std::nullopt;
        ++pos;
        if (!read_uint(text, pos, 2, hour)) return std::nullopt;
        if (pos >= text.size() || text[pos] != ':') return std::nullopt;
        ++pos;
        if (!read_uint(text, pos, 2, minute)) return std::nullopt;
        if (pos < text.size() && text[pos] == ':') {
            ++pos;
            if (!read_uint(text, pos, 2, second)) return std::nullopt;
        }
        if (pos < text.size() && text[pos] == '.') {
            ++pos;
            std::size_t start = pos;
            while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
            if (pos == start) return std::nullopt;
            std::string frac(text.substr(start, std::min<std::size_t>(3, pos - start)));
            while (frac.size() < 3) frac.push_back('0');
            millis = std::stoi(frac);
        }
        if (pos < text.size()) {
            char z = text[pos];
            if (z == 'Z' || z == 'z') {
                ++pos;
            } else if (z == '+' || z == '-') {
                ++pos;
                int oh, om;
                if (!read_uint(text, pos, 2, oh)) return std::nullopt;
                if (pos >= text.size() || text[pos] != ':') return std::nullopt;
                ++pos;
                if (!read_uint(text, pos, 2, om)) return std::nullopt;
                offset_min = (z == '+' ? 1 : -1) * (oh * 60 + om);
            }
        }
        if (hour > 23 || minute > 59 || second > 60) return std::nullopt;
    }
    if (pos != text.size()) return std::nullopt;

    std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                        static_cast<unsigned>(day));
    std::int64_t ms = ((days * 24 + hour) * 60 + minute) * 60 + second;
    ms = ms * 1000 + millis;
    ms -= offset_min * 60 * 1000;
    return ms;
}

std::string format_instant(InstantMs ms) {
    std::int64_t total_sec = ms / 1000;
    int millis = static_cast<int>(ms % 1000);
    if (millis < 0) {
        millis += 1000;
        --total_sec;
    }
    std::int64_t days = total_sec / 86400;
    std::int64_t rem = total_sec % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02d.%03dZ", y, m, d,
                  static_cast<int>(rem / 3600), static_cast<int>((rem % 3600) / 60),
                  static_cast<int>(rem % 60), millis);
    return buf;
}

CyclicRelationshipError::CyclicRelationshipError(std::vector<std::string> cycle_nodes)
    : Error([&] {
          std::ostringstream os;
          os << "relationship edges form a directed cycle:";
          for (const auto& n : cycle_nodes) os << ' ' << n;
          return os.str();
      }()),
      cycle(std::move(cycle_nodes)) {}

}  // namespace procgraph
