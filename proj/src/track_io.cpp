#include "trackdens/track_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "trackdens/csv.hpp"
#include "trackdens/error.hpp"
#include "trackdens/hash.hpp"

namespace trackdens {

namespace {

void check_point(const GeoPoint& pt, std::size_t line_no) {
    if (!std::isfinite(pt.lon) || !std::isfinite(pt.lat))
        throw parse_error("non-finite coordinate", line_no);
    if (pt.lat < -90.0 || pt.lat > 90.0)
        throw parse_error("latitude " + format_double(pt.lat) + " outside [-90, 90]", line_no);
}

/// "17.5N" -> 17.5, "55.0W" -> -55.0; plain signed numbers pass through.
double parse_hemisphere(std::string_view field, char pos, char neg, std::size_t line_no) {
    field = trim(field);
    if (field.empty()) throw parse_error("empty coordinate field", line_no);
    const char last = field.back();
    double sign = 1.0;
    if (last == pos || last == neg || last == (pos + 32) || last == (neg + 32)) {
        sign = (last == neg || last == (neg + 32)) ? -1.0 : 1.0;
        field.remove_suffix(1);
    }
    return sign * parse_double_field(field, line_no);
}

int year_from_timestamp(std::string_view ts) {
    ts = trim(ts);
    if (ts.size() < 4) return 0;
    int year = 0;
    for (int i = 0; i < 4; ++i) {
        if (ts[static_cast<std::size_t>(i)] < '0' || ts[static_cast<std::size_t>(i)] > '9') return 0;
        year = year * 10 + (ts[static_cast<std::size_t>(i)] - '0');
    }
    return (year >= 1000 && year <= 9999) ? year : 0;
}

void finish_track(ParseResult& out, RawTrack&& track, int year) {
    if (track.points.size() < 2) {
        out.warnings.push_back("track '" + track.id + "' rejected: fewer than 2 points");
        return;
    }
    out.tracks.push_back(std::move(track));
    out.years.push_back(year);
}

ParseResult parse_csv(std::istream& in) {
    ParseResult out;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    RawTrack current;
    int current_year = 0;
    bool have_current = false;

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (!saw_header) {
            saw_header = true;
            continue;  // `id,seq,lon,lat`
        }
        auto fields = split_csv_line(sv);
        if (fields.size() < 4) throw parse_error("expected 4 fields `id,seq,lon,lat`", line_no);
        std::string id(trim(fields[0]));
        if (id.empty()) throw parse_error("empty id", line_no);
        parse_int_field(fields[1], line_no);  // seq: validated, order comes from the stream
        GeoPoint pt{parse_double_field(fields[2], line_no), parse_double_field(fields[3], line_no)};
        check_point(pt, line_no);

        if (!have_current || id != current.id) {
            if (have_current) finish_track(out, std::move(current), current_year);
            current = RawTrack{};
            current.id = id;
            current_year = 0;
            have_current = true;
        }
        current.points.push_back(pt);
    }
    if (have_current) finish_track(out, std::move(current), current_year);
    if (out.tracks.empty() && line_no <= 1)
        out.warnings.push_back("empty input: no track records found");
    return out;
}

ParseResult parse_hurdat(std::istream& in) {
    ParseResult out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        auto header = split_csv_line(sv);
        if (header.size() < 3) throw parse_error("expected storm header `ID,NAME,COUNT`", line_no);
        RawTrack track;
        track.id = std::string(trim(header[0]));
        if (track.id.empty()) throw parse_error("empty storm id", line_no);
        const long count = parse_int_field(header[2], line_no);
        if (count < 0) throw parse_error("negative fix count", line_no);

        int year = 0;
        for (long i = 0; i < count; ++i) {
            if (!std::getline(in, line))
                throw parse_error("storm '" + track.id + "' truncated: expected " +
                                      std::to_string(count) + " fixes",
                                  line_no);
            ++line_no;
            auto fields = split_csv_line(trim(line));
            if (fields.size() < 3)
                throw parse_error("expected `timestamp,lat,lon,...`", line_no);
            if (year == 0) year = year_from_timestamp(fields[0]);
            GeoPoint pt;
            pt.lat = parse_hemisphere(fields[1], 'N', 'S', line_no);
            pt.lon = parse_hemisphere(fields[2], 'E', 'W', line_no);
            check_point(pt, line_no);
            track.points.push_back(pt);
            track.timestamps.push_back(static_cast<double>(i) * 6.0);
        }
        finish_track(out, std::move(track), year);
    }
    if (out.tracks.empty() && line_no == 0)
        out.warnings.push_back("empty input: no track records found");
    return out;
}

}  // namespace

ParseResult parse_tracks(std::istream& in, TrackFormat format) {
    return format == TrackFormat::csv ? parse_csv(in) : parse_hurdat(in);
}

ParseResult parse_tracks_file(const std::string& path, TrackFormat format) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open input file: " + path);
    return parse_tracks(in, format);
}

void write_tracks_csv(std::ostream& out, const std::vector<RegularTrack>& tracks) {
    out << "id,seq,lon,lat\n";
    for (const auto& t : tracks)
        for (std::size_t i = 0; i < t.points.size(); ++i)
            out << t.id << ',' << i << ',' << format_double(t.points[i].lon) << ','
                << format_double(t.points[i].lat) << '\n';
}

void write_tracks_csv_file(const std::string& path, const std::vector<RegularTrack>& tracks) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open output file: " + path);
    write_tracks_csv(out, tracks);
}

std::map<std::string, int> read_years_csv(std::istream& in) {
    std::map<std::string, int> years;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = trim(line);
        if (sv.empty()) continue;
        if (!saw_header) {
            saw_header = true;
            continue;
        }
        auto fields = split_csv_line(sv);
        if (fields.size() < 2) throw parse_error("expected `id,year`", line_no);
        years[std::string(trim(fields[0]))] = static_cast<int>(parse_int_field(fields[1], line_no));
    }
    return years;
}

std::map<std::string, int> read_years_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open years file: " + path);
    return read_years_csv(in);
}

void write_years_csv_file(const std::string& path, const TrackSet& set) {
    std::ofstream out(path);
    if (!out) throw input_error("cannot open output file: " + path);
    out << "id,year\n";
    for (std::size_t i = 0; i < set.tracks.size(); ++i)
        out << set.tracks[i].id << ',' << (i < set.years.size() ? set.years[i] : 0) << '\n';
}

TrackSet build_track_set(const ParseResult& parsed, std::size_t p,
                         std::vector<std::string>* warnings) {
    TrackSet set;
    set.tracks.reserve(parsed.tracks.size());
    for (std::size_t i = 0; i < parsed.tracks.size(); ++i) {
        set.tracks.push_back(regularize(parsed.tracks[i], p));
        set.years.push_back(i < parsed.years.size() ? parsed.years[i] : 0);
    }
    if (warnings)
        warnings->insert(warnings->end(), parsed.warnings.begin(), parsed.warnings.end());
    validate_track_set(set);
    return set;
}

std::string track_set_hash(const TrackSet& set) {
    std::ostringstream canon;
    for (std::size_t i = 0; i < set.tracks.size(); ++i) {
        canon << set.tracks[i].id << '|';
        for (const auto& pt : set.tracks[i].points)
            canon << format_double(pt.lon) << ',' << format_double(pt.lat) << ';';
        canon << (i < set.years.size() ? set.years[i] : 0) << '\n';
    }
    return hash_hex(fnv1a64(canon.str()));
}

}  // namespace trackdens
