#include "hotspot/cli.hpp"
#include "hotspot/csv.hpp"
#include "hotspot/data.hpp"
#include "hotspot/error.hpp"
#include "hotspot/eval.hpp"
#include "hotspot/forest.hpp"
#include "hotspot/fuse.hpp"
#include "hotspot/json_io.hpp"
#include "hotspot/labeling.hpp"
#include "hotspot/render.hpp"
#include "hotspot/synth.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace hotspot::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kOutEnv = "HOTSPOT_OUT_DIR";

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::InvalidArgument, msg); }

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return in;
}

std::string slurp(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Json read_json(const fs::path& path) {
  try {
    return Json::parse(slurp(path));
  } catch (const Json::parse_error& e) {
    invalid(path.string() + " is not valid JSON: " + e.what());
  }
}

class Writer {
 public:
  Writer(fs::path dir, std::ostream& log) : dir_(std::move(dir)), log_(log) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorCode::Io, "cannot create " + dir_.string() + ": " + ec.message());
  }

  fs::path path(const std::string& name) const { return dir_ / name; }

  void text(const std::string& name, const std::string& content) const {
    const fs::path p = path(name);
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::Io, "cannot write " + p.string());
    f << content;
    f.close();
    if (!f) throw Error(ErrorCode::Io, "write failed for " + p.string());
    log_ << "wrote " << p.string() << '\n';
  }

  template <class Fn>
  void stream(const std::string& name, Fn&& fn) const {
    std::ostringstream buf;
    fn(buf);
    text(name, buf.str());
  }

  void json(const std::string& name, const Json& j) const { text(name, canonical(j)); }

 private:
  fs::path dir_;
  std::ostream& log_;
};

BoundingBox parse_bbox(const std::string& text) {
  if (text.empty()) return federal_district_bbox();
  const auto parts = csv::split(text);
  if (parts.size() != 4) invalid("--bbox expects min_lat,min_lon,max_lat,max_lon");
  double v[4];
  for (std::size_t i = 0; i < 4; ++i) {
    const auto d = csv::parse_double(parts[i]);
    if (!d) invalid("--bbox: bad number '" + parts[i] + "'");
    v[i] = *d;
  }
  try {
    return BoundingBox(GeoPoint(v[0], v[1]), GeoPoint(v[2], v[3]));
  } catch (const Error& e) {
    invalid(std::string("--bbox: ") + e.what());
  }
}

YearRange parse_years(const std::string& text) {
  if (text.empty()) return {};
  const auto dots = text.find("..");
  const std::string a = dots == std::string::npos ? text : text.substr(0, dots);
  const std::string b = dots == std::string::npos ? text : text.substr(dots + 2);
  const auto lo = csv::parse_int(a);
  const auto hi = csv::parse_int(b);
  if (!lo || !hi || *lo > *hi) invalid("--years expects YEAR or FIRST..LAST");
  return {static_cast<int>(*lo), static_cast<int>(*hi)};
}

std::vector<int> parse_int_list(const std::string& text, const char* flag) {
  std::vector<int> out;
  for (const auto& part : csv::split(text)) {
    const auto v = csv::parse_int(part);
    if (!v) invalid(std::string(flag) + ": bad integer '" + part + "'");
    out.push_back(static_cast<int>(*v));
  }
  return out;
}

std::vector<Rgb> parse_ramp(const std::string& text) {
  std::vector<Rgb> out;
  for (const auto& part : csv::split(text)) out.push_back(parse_hex_color(part));
  if (out.empty()) invalid("--ramp needs at least one colour");
  return out;
}

fs::path meta_path(const fs::path& dataset) {
  fs::path p = dataset;
  p.replace_extension(".meta.json");
  return p;
}

Json dataset_meta(const Dataset& data, int year) {
  return Json{{"schema", "hotspot.dataset/1"}, {"grid", data.grid}, {"year", year}, {"rows", data.size()}};
}

std::string dataset_name(int year) { return "dataset_" + std::to_string(year) + ".csv"; }

void write_dataset_pair(const Writer& w, const Dataset& data, int year) {
  const std::string name = dataset_name(year);
  w.stream(name, [&](std::ostream& o) { write_dataset(o, data); });
  w.json(meta_path(name).string(), dataset_meta(data, year));
}

Dataset load_dataset(const fs::path& path) {
  const Json meta = read_json(meta_path(path));
  if (meta.value("schema", "") != "hotspot.dataset/1") invalid(meta_path(path).string() + " is not a dataset sidecar");
  const GridSpec grid = meta.at("grid").get<GridSpec>();
  std::ifstream in = open_in(path);
  return read_dataset(in, grid);
}

std::vector<JoinedRecord> records_of_year(std::span<const JoinedRecord> all, int year) {
  std::vector<JoinedRecord> out;
  for (const auto& r : all) {
    if (r.accident.timestamp.year == year) out.push_back(r);
  }
  return out;
}

// ---- option groups -------------------------------------------------------

struct SourceOpts {
  std::string accidents;
  std::string weather;
  std::string joined;
  std::string bbox;
  std::string years;
  int offset_hours = 0;
};

void add_source(CLI::App* app, SourceOpts& o, bool allow_joined) {
  app->add_option("--accidents", o.accidents, "Accident CSV");
  app->add_option("--weather", o.weather, "Weather CSV");
  if (allow_joined) app->add_option("--joined", o.joined, "Joined CSV (instead of --accidents/--weather)");
  app->add_option("--bbox", o.bbox, "Study box min_lat,min_lon,max_lat,max_lon (default: Federal District)");
  app->add_option("--years", o.years, "Keep accidents in YEAR or FIRST..LAST");
  app->add_option("--time-offset-hours", o.offset_hours, "Shift applied to accident hours before the weather join");
}

struct ModelOpts {
  std::string model = "rf";
  std::string task = "regression";
  int trees = 100;
  int max_depth = 0;
  int min_samples_split = 2;
  int mtry = 0;
  std::uint64_t seed = 42;
  int threads = 0;
  std::string hidden = "21,21,21";
  double learning_rate = 1e-3;
  int batch_size = 32;
  int epochs = 200;
};

void add_model(CLI::App* app, ModelOpts& o) {
  app->add_option("--model", o.model, "rf | mlp")->capture_default_str();
  app->add_option("--task", o.task, "regression | classification")->capture_default_str();
  app->add_option("--trees", o.trees, "Forest size")->capture_default_str();
  app->add_option("--max-depth", o.max_depth, "Tree depth limit, 0 = unlimited")->capture_default_str();
  app->add_option("--min-samples-split", o.min_samples_split)->capture_default_str();
  app->add_option("--mtry", o.mtry, "Features tried per split, 0 = task default")->capture_default_str();
  app->add_option("--seed", o.seed)->capture_default_str();
  app->add_option("--threads", o.threads, "Training threads, 0 = all cores")->capture_default_str();
  app->add_option("--hidden", o.hidden, "MLP hidden widths")->capture_default_str();
  app->add_option("--learning-rate", o.learning_rate)->capture_default_str();
  app->add_option("--batch-size", o.batch_size)->capture_default_str();
  app->add_option("--epochs", o.epochs)->capture_default_str();
}

ModelParams model_params(const ModelOpts& o) {
  ModelParams p;
  p.forest.n_trees = o.trees;
  if (o.max_depth < 0) invalid("--max-depth must be >= 0");
  if (o.max_depth > 0) p.forest.max_depth = o.max_depth;
  p.forest.min_samples_split = o.min_samples_split;
  if (o.mtry < 0) invalid("--mtry must be >= 0");
  if (o.mtry > 0) p.forest.mtry = o.mtry;
  p.forest.seed = o.seed;
  p.forest.threads = o.threads;
  p.mlp.hidden_layers = parse_int_list(o.hidden, "--hidden");
  p.mlp.learning_rate = o.learning_rate;
  p.mlp.batch_size = o.batch_size;
  p.mlp.epochs = o.epochs;
  p.mlp.seed = o.seed;
  return p;
}

struct SplitOpts {
  int train_year = 2020;
  int test_year = 2021;
  int cells = 80;
};

void add_split(CLI::App* app, SplitOpts& o, bool with_cells = true) {
  app->add_option("--train-year", o.train_year)->capture_default_str();
  app->add_option("--test-year", o.test_year)->capture_default_str();
  if (with_cells) app->add_option("--cells", o.cells, "Grid cell count")->capture_default_str();
}

// ---- shared stages -------------------------------------------------------

struct Ingested {
  AccidentParseResult accidents;
  WeatherParseResult weather;
};

Ingested ingest(const SourceOpts& o) {
  if (o.accidents.empty() || o.weather.empty()) invalid("--accidents and --weather are required");
  const BoundingBox bbox = parse_bbox(o.bbox);
  std::ifstream a = open_in(o.accidents);
  std::ifstream w = open_in(o.weather);
  Ingested out;
  out.accidents = parse_accidents(a, bbox, parse_years(o.years));
  out.weather = parse_weather(w);
  return out;
}

void write_ingested(const Writer& w, const Ingested& in) {
  w.stream("accidents.clean.csv", [&](std::ostream& o) { write_accidents(o, in.accidents.records); });
  w.stream("weather.clean.csv", [&](std::ostream& o) { write_weather(o, in.weather.stations); });
  w.stream("rejects.accidents.csv", [&](std::ostream& o) { write_reject_log(o, in.accidents.rejects); });
  w.stream("rejects.weather.csv", [&](std::ostream& o) { write_reject_log(o, in.weather.rejects); });
}

void write_joined_outputs(const Writer& w, const JoinResult& joined) {
  w.stream("joined.csv", [&](std::ostream& o) { write_joined(o, joined.records); });
  w.stream("rejects.join.csv", [&](std::ostream& o) { write_reject_log(o, joined.rejects); });
}

std::vector<JoinedRecord> load_joined(const SourceOpts& o) {
  if (!o.joined.empty()) {
    std::ifstream in = open_in(o.joined);
    return read_joined(in);
  }
  const Ingested in = ingest(o);
  return join_all(in.accidents.records, in.weather.stations, o.offset_hours).records;
}

std::pair<Dataset, Dataset> split_datasets(std::span<const JoinedRecord> joined, const SplitOpts& s,
                                           const BoundingBox& bbox) {
  if (s.cells < 1) invalid("--cells must be >= 1");
  if (s.train_year == s.test_year) invalid("--train-year and --test-year must differ");
  const GridSpec grid = make_grid(bbox, s.cells);
  const auto train = records_of_year(joined, s.train_year);
  const auto test = records_of_year(joined, s.test_year);
  if (train.empty()) throw Error(ErrorCode::EmptyDataset, "no joined records for " + std::to_string(s.train_year));
  if (test.empty()) throw Error(ErrorCode::EmptyDataset, "no joined records for " + std::to_string(s.test_year));
  return {build_dataset(train, grid), build_dataset(test, grid)};
}

void write_report(const Writer& w, const std::string& stem, const EvalReport& report, std::ostream& out) {
  w.json(stem + ".json", to_json(report));
  const std::string table = format_table(std::span(&report, 1));
  w.text(stem + ".txt", table);
  out << table;
}

FigureSpec figure_spec(int width, int height, const std::string& ramp, const std::string& title) {
  FigureSpec spec;
  spec.width = width;
  spec.height = height;
  if (!ramp.empty()) spec.ramp = parse_ramp(ramp);
  spec.title = title;
  validate(spec);
  return spec;
}

int exit_code_for(ErrorCode code) { return code == ErrorCode::Io ? kExitIo : kExitValidation; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Accident hotspot prediction toolkit", "hotspot"};
  app.set_config("--config", "", "TOML/INI file setting any flag; command-line values win");
  app.require_subcommand(1);
  app.fallthrough();

  std::string out_dir = ".";
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory")->envname(kOutEnv)->capture_default_str();
  };

  // synth
  SynthConfig synth;
  std::string synth_json;
  auto* s_synth = app.add_subcommand("synth", "Generate a seeded two-year synthetic dataset");
  s_synth->add_option("--seed", synth.seed)->capture_default_str();
  s_synth->add_option("--n-per-year", synth.n_per_year)->capture_default_str();
  s_synth->add_option("--uniform-fraction", synth.uniform_fraction)->capture_default_str();
  s_synth->add_option("--drift-km", synth.year_drift_km)->capture_default_str();
  s_synth->add_option("--site-persistence", synth.site_persistence)->capture_default_str();
  s_synth->add_option("--stations", synth.n_stations)->capture_default_str();
  s_synth->add_option("--year-a", synth.year_a)->capture_default_str();
  s_synth->add_option("--year-b", synth.year_b)->capture_default_str();
  s_synth->add_option("--synth-config", synth_json, "JSON generator config (hotspots etc.); flags override");
  add_out(s_synth);

  // ingest
  SourceOpts src;
  auto* s_ingest = app.add_subcommand("ingest", "Clean accident and weather CSVs, logging rejects");
  add_source(s_ingest, src, false);
  add_out(s_ingest);

  // join
  auto* s_join = app.add_subcommand("join", "Attach nearest-station hourly weather to each accident");
  s_join->add_option("--accidents", src.accidents, "Cleaned accident CSV")->required();
  s_join->add_option("--weather", src.weather, "Cleaned weather CSV")->required();
  s_join->add_option("--bbox", src.bbox, "Study box min_lat,min_lon,max_lat,max_lon");
  s_join->add_option("--time-offset-hours", src.offset_hours, "Shift applied to accident hours");
  add_out(s_join);

  // grid
  std::string joined_path;
  int grid_year = 2020;
  int grid_cells = 80;
  auto* s_grid = app.add_subcommand("grid", "Label one year of joined records with per-cell counts");
  s_grid->add_option("--joined", joined_path, "Joined CSV")->required();
  s_grid->add_option("--year", grid_year)->required();
  s_grid->add_option("--cells", grid_cells)->capture_default_str();
  s_grid->add_option("--bbox", src.bbox, "Study box min_lat,min_lon,max_lat,max_lon");
  add_out(s_grid);

  // train
  ModelOpts mo;
  std::string dataset_path;
  std::vector<std::string> drop;
  auto* s_train = app.add_subcommand("train", "Train a model on a labelled dataset");
  s_train->add_option("--dataset", dataset_path, "Dataset CSV (with .meta.json sidecar)")->required();
  s_train->add_option("--drop", drop, "Features to remove")->delimiter(',');
  add_model(s_train, mo);
  add_out(s_train);

  // eval
  std::string model_path;
  auto* s_eval = app.add_subcommand("eval", "Score a trained model on a dataset");
  s_eval->add_option("--model", model_path, "Model JSON")->required();
  s_eval->add_option("--dataset", dataset_path, "Test dataset CSV")->required();
  add_out(s_eval);

  // pipeline
  SplitOpts split;
  auto* s_pipe = app.add_subcommand("pipeline", "ingest -> join -> grid -> train -> eval");
  add_source(s_pipe, src, false);
  add_split(s_pipe, split);
  add_model(s_pipe, mo);
  add_out(s_pipe);

  // ablate
  auto* s_ablate = app.add_subcommand("ablate", "Year-split evaluation with features removed");
  add_source(s_ablate, src, true);
  add_split(s_ablate, split);
  add_model(s_ablate, mo);
  s_ablate->add_option("--drop", drop, "Features to remove")->delimiter(',')->required();
  add_out(s_ablate);

  // sweep
  std::string sweep_cells = "20,80,320";
  auto* s_sweep = app.add_subcommand("sweep", "Year-split evaluation over several grid resolutions");
  add_source(s_sweep, src, true);
  add_split(s_sweep, split, false);
  add_model(s_sweep, mo);
  s_sweep->add_option("--cells", sweep_cells, "Strictly increasing cell counts")->capture_default_str();
  add_out(s_sweep);

  // importance
  auto* s_imp = app.add_subcommand("importance", "Mean-decrease-impurity importance of a forest model");
  s_imp->add_option("--model", model_path, "Random forest model JSON")->required();
  add_out(s_imp);

  // render
  std::string kind;
  std::string importance_path;
  int render_year = 0;
  int width = 800;
  int height = 600;
  std::string ramp;
  std::string title;
  bool ppm = false;
  auto* s_render = app.add_subcommand("render", "Write SVG figures: scatter, heatmap or importance");
  s_render->add_option("kind", kind, "scatter | heatmap | importance")
      ->required()
      ->check(CLI::IsMember({"scatter", "heatmap", "importance"}));
  s_render->add_option("--accidents", src.accidents, "Accident CSV (scatter, heatmap)");
  s_render->add_option("--importance", importance_path, "Importance JSON (importance)");
  s_render->add_option("--year", render_year, "Only this year (scatter, heatmap); 0 = all");
  s_render->add_option("--cells", grid_cells, "Grid cell count (heatmap)")->capture_default_str();
  s_render->add_option("--bbox", src.bbox, "Study box min_lat,min_lon,max_lat,max_lon");
  s_render->add_option("--width", width)->capture_default_str();
  s_render->add_option("--height", height)->capture_default_str();
  s_render->add_option("--ramp", ramp, "Comma-separated #rrggbb stops, low to high");
  s_render->add_option("--title", title);
  s_render->add_flag("--ppm", ppm, "Also write a PPM raster (heatmap)");
  add_out(s_render);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitValidation;
  }

  try {
    const Writer w(out_dir, out);

    if (*s_synth) {
      if (!synth_json.empty()) {
        SynthConfig from_file = synth_config_from_json(read_json(synth_json));
        // Flags given explicitly on top of the file.
        if (s_synth->count("--seed")) from_file.seed = synth.seed;
        if (s_synth->count("--n-per-year")) from_file.n_per_year = synth.n_per_year;
        if (s_synth->count("--uniform-fraction")) from_file.uniform_fraction = synth.uniform_fraction;
        if (s_synth->count("--drift-km")) from_file.year_drift_km = synth.year_drift_km;
        if (s_synth->count("--site-persistence")) from_file.site_persistence = synth.site_persistence;
        if (s_synth->count("--stations")) from_file.n_stations = synth.n_stations;
        if (s_synth->count("--year-a")) from_file.year_a = synth.year_a;
        if (s_synth->count("--year-b")) from_file.year_b = synth.year_b;
        synth = from_file;
      }
      const SynthData data = generate(synth);
      std::vector<AccidentRecord> all = data.year_a;
      all.insert(all.end(), data.year_b.begin(), data.year_b.end());
      w.stream("accidents.csv", [&](std::ostream& o) { write_accidents(o, all); });
      w.stream("weather.csv", [&](std::ostream& o) { write_weather(o, data.stations); });
      w.json("manifest.json", make_manifest(synth, data));
      return kExitOk;
    }

    if (*s_ingest) {
      const Ingested in = ingest(src);
      write_ingested(w, in);
      out << "accidents: " << in.accidents.records.size() << " kept, " << in.accidents.rejects.size()
          << " rejected; weather: " << in.weather.stations.size() << " stations, " << in.weather.rejects.size()
          << " rejected\n";
      return kExitOk;
    }

    if (*s_join) {
      const BoundingBox bbox = parse_bbox(src.bbox);
      std::ifstream a = open_in(src.accidents);
      std::ifstream wf = open_in(src.weather);
      const auto accidents = parse_accidents(a, bbox);
      const auto weather = parse_weather(wf);
      if (!accidents.rejects.empty() || !weather.rejects.empty()) {
        invalid("join expects cleaned inputs; run ingest first");
      }
      const JoinResult joined = join_all(accidents.records, weather.stations, src.offset_hours);
      write_joined_outputs(w, joined);
      out << "joined " << joined.records.size() << ", no weather " << joined.rejects.size() << '\n';
      return kExitOk;
    }

    if (*s_grid) {
      std::ifstream in = open_in(joined_path);
      const auto joined = read_joined(in);
      const GridSpec grid = make_grid(parse_bbox(src.bbox), grid_cells);
      const auto records = records_of_year(joined, grid_year);
      if (records.empty()) throw Error(ErrorCode::EmptyDataset, "no joined records for " + std::to_string(grid_year));
      write_dataset_pair(w, build_dataset(records, grid), grid_year);
      return kExitOk;
    }

    if (*s_train) {
      const Dataset data = load_dataset(dataset_path);
      const TrainedModel model =
          train_model(data, parse_model_kind(mo.model), parse_task(mo.task), model_params(mo), drop);
      w.json("model.json", to_json(model));
      return kExitOk;
    }

    if (*s_eval) {
      const TrainedModel model = model_from_json(read_json(model_path));
      const Dataset test = load_dataset(dataset_path);
      write_report(w, "report", evaluate(model, test), out);
      return kExitOk;
    }

    if (*s_pipe) {
      const ModelKind model_kind = parse_model_kind(mo.model);
      const Task task = parse_task(mo.task);
      const ModelParams params = model_params(mo);
      const Ingested in = ingest(src);
      write_ingested(w, in);
      const JoinResult joined = join_all(in.accidents.records, in.weather.stations, src.offset_hours);
      write_joined_outputs(w, joined);
      auto [train, test] = split_datasets(joined.records, split, parse_bbox(src.bbox));
      write_dataset_pair(w, train, split.train_year);
      write_dataset_pair(w, test, split.test_year);
      const TrainedModel model = train_model(train, model_kind, task, params);
      w.json("model.json", to_json(model));
      write_report(w, "report", evaluate(model, test), out);
      return kExitOk;
    }

    if (*s_ablate) {
      const auto joined = load_joined(src);
      auto [train, test] = split_datasets(joined, split, parse_bbox(src.bbox));
      const EvalReport report =
          ablate_features(train, test, drop, parse_model_kind(mo.model), parse_task(mo.task), model_params(mo));
      write_report(w, "ablate", report, out);
      return kExitOk;
    }

    if (*s_sweep) {
      const auto counts = parse_int_list(sweep_cells, "--cells");
      if (split.train_year == split.test_year) invalid("--train-year and --test-year must differ");
      const auto joined = load_joined(src);
      const auto train = records_of_year(joined, split.train_year);
      const auto test = records_of_year(joined, split.test_year);
      const SweepReport report = grid_sweep(train, test, parse_bbox(src.bbox), counts, parse_model_kind(mo.model),
                                            parse_task(mo.task), model_params(mo));
      w.json("sweep.json", to_json(report));
      const std::string table = format_sweep_table(report);
      w.text("sweep.txt", table);
      out << table;
      return kExitOk;
    }

    if (*s_imp) {
      const TrainedModel model = model_from_json(read_json(model_path));
      const auto* forest = std::get_if<Forest>(&model.model);
      if (forest == nullptr) invalid("importance needs a random forest model");
      const ImportanceReport report = mdi_importance(*forest);
      w.json("importance.json", to_json(report));
      for (std::size_t k = 0; k < report.ranking.size(); ++k) {
        const auto j = static_cast<std::size_t>(
            std::find(report.feature_names.begin(), report.feature_names.end(), report.ranking[k]) -
            report.feature_names.begin());
        char line[96];
        std::snprintf(line, sizeof(line), "%2zu  %-16s %.4f\n", k + 1, report.ranking[k].c_str(),
                      report.importance[j]);
        out << line;
      }
      return kExitOk;
    }

    if (*s_render) {
      const FigureSpec spec = figure_spec(width, height, ramp, title);
      if (kind == "importance") {
        if (importance_path.empty()) invalid("render importance needs --importance");
        w.text("importance.svg", render_importance(importance_from_json(read_json(importance_path)), spec));
        return kExitOk;
      }
      if (src.accidents.empty()) invalid("render " + kind + " needs --accidents");
      const BoundingBox bbox = parse_bbox(src.bbox);
      std::ifstream a = open_in(src.accidents);
      // Unbounded parse so that out-of-box points reach the clip counter.
      const BoundingBox world(GeoPoint(-90.0, -180.0), GeoPoint(90.0, 180.0));
      const auto parsed = parse_accidents(a, world, render_year > 0 ? YearRange{render_year, render_year} : YearRange{});
      std::vector<GeoPoint> points;
      for (const auto& r : parsed.records) points.push_back(r.location);
      if (kind == "scatter") {
        w.text("scatter.svg", render_scatter(points, bbox, spec));
        return kExitOk;
      }
      if (grid_cells < 1) invalid("--cells must be >= 1");
      CellCounts counts{make_grid(bbox, grid_cells), {}};
      counts.counts.assign(static_cast<std::size_t>(grid_cells), 0);
      for (const auto& p : points) {
        if (bbox.contains(p)) ++counts.counts[counts.grid.flat_index(cell_of(p, counts.grid))];
      }
      w.text("heatmap.svg", render_grid_heatmap(counts, spec));
      if (ppm) w.text("heatmap.ppm", render_grid_heatmap_ppm(counts, spec));
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const Json::exception& e) {
    err << "error: malformed JSON document: " << e.what() << '\n';
    return kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitValidation;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace hotspot::cli
