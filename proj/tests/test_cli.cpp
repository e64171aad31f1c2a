#include "hotspot/cli.hpp"
#include "hotspot/json_io.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using hotspot::Json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = hotspot::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Fresh directory under the system temp area.
fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hotspot_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

const std::vector<std::string> kFast{"--trees", "20", "--threads", "2"};

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

fs::path synth_into(const std::string& name) {
  const fs::path dir = scratch(name);
  const Result r = cli({"synth", "--n-per-year", "400", "--out", dir.string()});
  REQUIRE(r.code == 0);
  return dir;
}

}  // namespace

TEST_CASE("synth writes its files") {
  const fs::path dir = synth_into("synth");
  for (const char* f : {"accidents.csv", "weather.csv", "manifest.json"}) CHECK(fs::exists(dir / f));
  const Json m = Json::parse(slurp(dir / "manifest.json"));
  CHECK(m.at("schema") == "hotspot.synth-manifest/1");
  const fs::path again = scratch("synth_again");
  REQUIRE(cli({"synth", "--n-per-year", "400", "--out", again.string()}).code == 0);
  CHECK(slurp(dir / "accidents.csv") == slurp(again / "accidents.csv"));
  CHECK(slurp(dir / "weather.csv") == slurp(again / "weather.csv"));
}

TEST_CASE("pipeline report and step-by-step run agree byte for byte") {
  const fs::path data = synth_into("steps_data");
  const std::string acc = (data / "accidents.csv").string();
  const std::string wx = (data / "weather.csv").string();

  const fs::path pipe = scratch("pipe");
  const Result p = cli(concat({"pipeline", "--accidents", acc, "--weather", wx, "--out", pipe.string()}, kFast));
  REQUIRE(p.code == 0);
  CHECK(p.out.find("Random Forest") != std::string::npos);
  const Json report = Json::parse(slurp(pipe / "report.json"));
  CHECK(report.at("hit_rate").get<double>() >= 0.0);
  CHECK(report.at("hit_rate").get<double>() <= 1.0);
  CHECK(report.at("cell_count") == 80);

  const fs::path s = scratch("steps");
  const std::string o = s.string();
  REQUIRE(cli({"ingest", "--accidents", acc, "--weather", wx, "--out", o}).code == 0);
  REQUIRE(cli({"join", "--accidents", o + "/accidents.clean.csv", "--weather", o + "/weather.clean.csv", "--out", o})
              .code == 0);
  REQUIRE(cli({"grid", "--joined", o + "/joined.csv", "--year", "2020", "--out", o}).code == 0);
  REQUIRE(cli({"grid", "--joined", o + "/joined.csv", "--year", "2021", "--out", o}).code == 0);
  REQUIRE(cli(concat({"train", "--dataset", o + "/dataset_2020.csv", "--out", o}, kFast)).code == 0);
  REQUIRE(cli({"eval", "--model", o + "/model.json", "--dataset", o + "/dataset_2021.csv", "--out", o}).code == 0);

  for (const char* f : {"joined.csv", "dataset_2020.csv", "dataset_2021.csv", "model.json", "report.json"}) {
    CAPTURE(f);
    CHECK(slurp(pipe / f) == slurp(s / f));
  }

  SUBCASE("downstream commands") {
    REQUIRE(cli({"importance", "--model", o + "/model.json", "--out", o}).code == 0);
    const Json imp = Json::parse(slurp(s / "importance.json"));
    CHECK(imp.at("ranking").size() == 13);
    REQUIRE(cli({"render", "importance", "--importance", o + "/importance.json", "--out", o}).code == 0);
    REQUIRE(cli({"render", "heatmap", "--accidents", acc, "--year", "2020", "--ppm", "--out", o}).code == 0);
    REQUIRE(cli({"render", "scatter", "--accidents", acc, "--out", o}).code == 0);
    for (const char* f : {"importance.svg", "heatmap.svg", "heatmap.ppm", "scatter.svg"}) CHECK(fs::exists(s / f));

    const Result a = cli(concat({"ablate", "--joined", o + "/joined.csv", "--drop", "latitude,longitude", "--out", o},
                                kFast));
    REQUIRE(a.code == 0);
    CHECK(Json::parse(slurp(s / "ablate.json")).at("features").size() == 11);
    const Result sw =
        cli(concat({"sweep", "--joined", o + "/joined.csv", "--cells", "20,80", "--out", o}, kFast));
    REQUIRE(sw.code == 0);
    CHECK(Json::parse(slurp(s / "sweep.json")).at("entries").size() == 2);
  }
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("codes");
  const std::string o = dir.string();
  SUBCASE("usage errors are validation failures") {
    CHECK(cli({}).code == hotspot::cli::kExitValidation);
    CHECK(cli({"frobnicate"}).code == hotspot::cli::kExitValidation);
    CHECK(cli({"sweep", "--joined", "x.csv", "--trees", "many"}).code == hotspot::cli::kExitValidation);
  }
  SUBCASE("missing input is an I/O failure") {
    const Result r = cli({"ingest", "--accidents", o + "/nope.csv", "--weather", o + "/nope2.csv", "--out", o});
    CHECK(r.code == hotspot::cli::kExitIo);
    CHECK(r.err.find("cannot open") != std::string::npos);
  }
  SUBCASE("bad values are validation failures") {
    const fs::path data = synth_into("codes_data");
    const std::string acc = (data / "accidents.csv").string();
    const std::string wx = (data / "weather.csv").string();
    CHECK(cli({"pipeline", "--accidents", acc, "--weather", wx, "--cells", "0", "--out", o}).code == 1);
    CHECK(cli({"pipeline", "--accidents", acc, "--weather", wx, "--model", "svm", "--out", o}).code == 1);
    CHECK(cli({"synth", "--n-per-year", "0", "--out", o}).code == 1);
    CHECK(cli({"sweep", "--accidents", acc, "--weather", wx, "--cells", "80,20", "--out", o}).code == 1);
  }
  SUBCASE("help") {
    const Result r = cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("pipeline") != std::string::npos);
  }
}

TEST_CASE("config file and environment") {
  const fs::path dir = scratch("config");
  {
    std::ofstream cfg(dir / "synth.toml");
    cfg << "[synth]\nn-per-year = 123\nseed = 9\n";
  }
  REQUIRE(cli({"synth", "--config", (dir / "synth.toml").string(), "--out", dir.string()}).code == 0);
  const Json m = Json::parse(slurp(dir / "manifest.json"));
  CHECK(m.dump().find("123") != std::string::npos);
  CHECK(m.at("config").at("seed") == 9);
  // Command line wins over the file.
  REQUIRE(cli({"synth", "--config", (dir / "synth.toml").string(), "--seed", "5", "--out", dir.string()}).code == 0);
  CHECK(Json::parse(slurp(dir / "manifest.json")).at("config").at("seed") == 5);

  const fs::path env_dir = scratch("env");
  ::setenv("HOTSPOT_OUT_DIR", env_dir.string().c_str(), 1);
  const Result r = cli({"synth", "--n-per-year", "50"});
  ::unsetenv("HOTSPOT_OUT_DIR");
  REQUIRE(r.code == 0);
  CHECK(fs::exists(env_dir / "accidents.csv"));
}

TEST_CASE("installed binary") {
  const char* bin = std::getenv("HOTSPOT_CLI");
  if (bin == nullptr) return;  // only when run through ctest
  const fs::path dir = scratch("binary");
  const std::string quiet = " >/dev/null 2>&1";
  auto status = [&](const std::string& args) {
    const int raw = std::system((std::string(bin) + " " + args + quiet).c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status("synth --n-per-year 20 --out " + dir.string()) == 0);
  CHECK(status("ingest --accidents " + dir.string() + "/missing.csv --weather x --out " + dir.string()) == 2);
  CHECK(status("grid --joined a.csv --year notayear") == 1);
}
