#include "hotspot/csv.hpp"
#include "hotspot/data.hpp"
#include "hotspot/error.hpp"
#include "hotspot/random.hpp"

#include <doctest.h>

#include <algorithm>
#include <sstream>
#include <string>

using namespace hotspot;

namespace {

const std::string kAcc = std::string(kAccidentHeader) + "\n";
const std::string kWx = std::string(kWeatherHeader) + "\n";

AccidentParseResult accidents(const std::string& body, YearRange years = {}) {
  std::istringstream in(kAcc + body);
  return parse_accidents(in, federal_district_bbox(), years);
}

WeatherParseResult weather(const std::string& body) {
  std::istringstream in(kWx + body);
  return parse_weather(in);
}

}  // namespace

TEST_CASE("csv helpers") {
  CHECK(csv::split("a,\"b,c\",,d") == std::vector<std::string>{"a", "b,c", "", "d"});
  CHECK(csv::split("\"say \"\"hi\"\"\"") == std::vector<std::string>{"say \"hi\""});
  CHECK(csv::quote("plain") == "plain");
  CHECK(csv::quote("a,b") == "\"a,b\"");
  CHECK(csv::format_double(0.1) == "0.1");
  CHECK(csv::format_double(-15.79) == "-15.79");
  CHECK(csv::format_double(0.0) == "0");
  CHECK(!csv::parse_double("nan"));
  CHECK(!csv::parse_double("1.5x"));
  CHECK(*csv::parse_double(" 2.5 ") == 2.5);
  CHECK(!csv::parse_int("60.5"));
  // FNV-1a 64 reference vectors.
  CHECK(csv::fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(csv::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(csv::hex_digest("a") == "af63dc4c8601ec8c");
}

TEST_CASE("format_double round-trips exactly") {
  rng::Engine eng = rng::make_engine(5);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng::normal(eng, 0.0, 1e3) * std::pow(10.0, static_cast<int>(rng::below(eng, 20)) - 10);
    CHECK(*csv::parse_double(csv::format_double(v)) == v);
  }
}

TEST_CASE("timestamps") {
  CHECK(format_datetime(*parse_datetime("2020-02-29T23:59")) == "2020-02-29T23:59");
  CHECK(!parse_datetime("2021-02-29T10:00"));
  CHECK(!parse_datetime("2021-01-01 10:00"));
  CHECK(!parse_datetime("2021-01-01T24:00"));
  CHECK(!parse_hour_stamp("2021-01-01T10:30"));
  CHECK(weekday(2020, 1, 1) == 3);  // Wednesday
  CHECK(weekday(2021, 1, 3) == 0);  // Sunday
  CHECK(shift_hours({2020, 12, 31, 23}, 1) == HourStamp{2021, 1, 1, 0});
  CHECK(shift_hours({2021, 3, 1, 0}, -1) == HourStamp{2021, 2, 28, 23});
  CHECK(shift_hours({2020, 3, 1, 0}, -1) == HourStamp{2020, 2, 29, 23});
}

TEST_CASE("parse_accidents: header") {
  std::istringstream in("id,lat,lon,speed,ts\n");
  CHECK_THROWS_AS(parse_accidents(in, federal_district_bbox()), Error);
  std::istringstream empty("");
  try {
    parse_accidents(empty, federal_district_bbox());
    FAIL("expected MalformedHeader");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedHeader);
  }
}

TEST_CASE("parse_accidents: reject reasons") {
  SUBCASE("empty latitude") {
    const auto r = accidents("a1,,-47.9,60,2020-01-01T10:00\n");
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects.entries[0].reason == RejectReason::MissingField);
    CHECK(r.rejects.entries[0].row == 2);
  }
  SUBCASE("outside the Federal District") {
    const auto r = accidents("a1,-23.55,-46.63,60,2020-01-01T10:00\n");
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects.entries[0].reason == RejectReason::OutOfBounds);
  }
  SUBCASE("speed limit outside [10, 130]") {
    const auto r = accidents("a1,-15.8,-47.9,150,2020-01-01T10:00\na2,-15.8,-47.9,9,2020-01-01T10:00\n");
    CHECK(r.rejects.size() == 2);
    CHECK(r.rejects.entries[0].reason == RejectReason::BadNumber);
  }
  SUBCASE("bad timestamp and year range") {
    const auto r = accidents("a1,-15.8,-47.9,60,2020-13-01T10:00\na2,-15.8,-47.9,60,2019-12-31T10:00\n",
                             YearRange{2020, 2021});
    REQUIRE(r.rejects.size() == 2);
    CHECK(r.rejects.entries[0].reason == RejectReason::BadTimestamp);
    CHECK(r.rejects.entries[1].reason == RejectReason::BadTimestamp);
  }
  SUBCASE("wrong field count") {
    const auto r = accidents("a1,-15.8,-47.9,60\n");
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects.entries[0].reason == RejectReason::MissingField);
  }
}

TEST_CASE("parse_accidents: hand-checked 5-row fixture") {
  const std::string body =
      "a1,-15.794,-47.882,60,2020-03-02T08:15\n"   // ok
      "a2,-15.8,,60,2020-03-02T09:00\n"            // missing longitude
      "a3,-15.65,-47.79,80,2020-07-19T18:40\n"     // ok
      "a4,-15.9,-47.1,60,2020-05-05T12:00\n"       // east of the box
      "a5,-16.0,-48.06,40,2021-01-01T00:00\n";     // ok
  const auto r = accidents(body);
  REQUIRE(r.records.size() == 3);
  REQUIRE(r.rejects.size() == 2);
  CHECK(r.input_rows == 5);
  CHECK(r.records[0].id == "a1");
  CHECK(r.records[1].location == GeoPoint(-15.65, -47.79));
  CHECK(r.records[1].speed_limit_kmh == 80);
  CHECK(r.records[2].timestamp == LocalDateTime{2021, 1, 1, 0, 0});
  CHECK(r.rejects.entries[0].row == 3);
  CHECK(r.rejects.entries[0].reason == RejectReason::MissingField);
  CHECK(r.rejects.entries[1].row == 5);
  CHECK(r.rejects.entries[1].reason == RejectReason::OutOfBounds);
}

TEST_CASE("parse_accidents: accepted + rejected == input rows on random garbage") {
  rng::Engine eng = rng::make_engine(9);
  const char* pieces[] = {"-15.8", "-47.9", "60", "2020-01-01T10:00", "", "x", "-99", "131", "2020-02-30T01:00",
                          "\"q,r\"", "45", "-47.5"};
  for (int trial = 0; trial < 50; ++trial) {
    std::string body;
    const int rows = static_cast<int>(rng::below(eng, 40));
    for (int i = 0; i < rows; ++i) {
      const int fields = 3 + static_cast<int>(rng::below(eng, 4));
      for (int f = 0; f < fields; ++f) {
        if (f) body += ',';
        body += pieces[rng::below(eng, std::size(pieces))];
      }
      body += '\n';
    }
    const auto r = accidents(body);
    CHECK(r.records.size() + r.rejects.size() == r.input_rows);
    CHECK(r.input_rows == static_cast<std::size_t>(rows));
    std::vector<std::size_t> seen;
    for (const auto& e : r.rejects.entries) seen.push_back(e.row);
    CHECK(std::adjacent_find(seen.begin(), seen.end()) == seen.end());
  }
}

TEST_CASE("parse_weather") {
  SUBCASE("empty body") {
    const auto r = weather("");
    CHECK(r.stations.empty());
    CHECK(r.rejects.empty());
  }
  SUBCASE("duplicate hour keeps the first row") {
    const auto r = weather(
        "A001,-15.789,-47.926,2020-01-01T10:00,25,60,886,2,1000,0\n"
        "A001,-15.789,-47.926,2020-01-01T10:00,30,60,886,2,1000,0\n");
    REQUIRE(r.stations.size() == 1);
    CHECK(r.stations[0].observations.size() == 1);
    CHECK(r.stations[0].observations.begin()->second.temperature_c == 25.0);
    REQUIRE(r.rejects.size() == 1);
    CHECK(r.rejects.entries[0].reason == RejectReason::DuplicateHour);
    CHECK(r.rejects.entries[0].row == 3);
  }
  SUBCASE("5 stations x 24 hours") {
    std::string body;
    for (int s = 0; s < 5; ++s) {
      for (int h = 0; h < 24; ++h) {
        body += "S" + std::to_string(s) + ",-15." + std::to_string(5 + s) + ",-47.9,2020-06-01T" +
                (h < 10 ? "0" : "") + std::to_string(h) + ":00,20,50,890,1,0,0\n";
      }
    }
    const auto r = weather(body);
    REQUIRE(r.stations.size() == 5);
    for (const auto& s : r.stations) CHECK(s.observations.size() == 24);
    CHECK(r.rejects.empty());
    CHECK(r.input_rows == 120);
  }
  SUBCASE("value checks") {
    const auto r = weather(
        "A,-15.7,-47.9,2020-01-01T10:00,25,101,886,2,1000,0\n"
        "A,-15.7,-47.9,2020-01-01T11:00,25,50,886,-1,1000,0\n"
        "A,-15.7,-47.9,2020-01-01T12:30,25,50,886,1,1000,0\n"
        "A,-15.7,-47.9,2020-01-01T13:00,25,50,,1,1000,0\n"
        "A,-15.8,-47.9,2020-01-01T14:00,25,50,886,1,1000,0\n"
        "A,-15.7,-47.9,2020-01-01T15:00,25,50,886,1,1000,0\n");
    REQUIRE(r.rejects.size() == 5);
    CHECK(r.rejects.entries[0].reason == RejectReason::BadNumber);
    CHECK(r.rejects.entries[1].reason == RejectReason::BadNumber);
    CHECK(r.rejects.entries[2].reason == RejectReason::BadTimestamp);
    CHECK(r.rejects.entries[3].reason == RejectReason::MissingField);
    CHECK(r.rejects.entries[4].reason == RejectReason::InconsistentStation);
    CHECK(r.stations.at(0).observations.size() == 1);
  }
}

TEST_CASE("writers round-trip through the parsers") {
  const auto r = accidents(
      "a1,-15.794,-47.882,60,2020-03-02T08:15\n"
      "\"id,with,commas\",-15.65,-47.79,80,2020-07-19T18:40\n");
  REQUIRE(r.records.size() == 2);
  std::ostringstream out;
  write_accidents(out, r.records);
  std::istringstream back(out.str());
  CHECK(parse_accidents(back, federal_district_bbox()).records == r.records);

  const auto w = weather(
      "A001,-15.789,-47.926,2020-01-01T10:00,25.3,60.1,886.2,2.2,1000.5,0.4\n"
      "A002,-15.6,-48.1,2020-01-01T10:00,24,61,889,1.2,900,0\n");
  std::ostringstream wout;
  write_weather(wout, w.stations);
  std::istringstream wback(wout.str());
  const auto w2 = parse_weather(wback);
  REQUIRE(w2.stations.size() == 2);
  CHECK(w2.stations[0].observations == w.stations[0].observations);
  CHECK(w2.stations[1].observations == w.stations[1].observations);
}

TEST_CASE("reject log format") {
  RejectLog log;
  log.add(3, RejectReason::OutOfBounds, "far, away");
  std::ostringstream out;
  write_reject_log(out, log);
  CHECK(out.str() == "row,reason,message\n3,OutOfBounds,\"far, away\"\n");
}
