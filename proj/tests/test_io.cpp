#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "support.hpp"
#include "tempheno/io.hpp"
#include "tempheno/synthgen.hpp"

using namespace tempheno;
using namespace tempheno::testing;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() /
           ("tempheno_io_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& name, const std::string& content) const {
    std::ofstream(path / name) << content;
    return path / name;
  }
};

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_CASE("single event with declared duration") {
  TempDir dir;
  const auto path = dir.write("e.csv", "individual_id,feature,time,duration\np1,drugA,0,3\n");
  const auto x = io::load_events(path);
  REQUIRE(x.individuals() == 1);
  CHECK(x.feature_names == std::vector<std::string>{"drugA"});
  CHECK(x.matrices[0] == Matrix::from_rows({{1, 0, 0}}));
}

TEST_CASE("sidecar durations keep trailing empty days and event-free individuals") {
  TempDir dir;
  const auto path = dir.write("e.csv", "individual_id,feature,time\np1,b,1\np1,a,0\n");
  dir.write("e.durations.csv", "individual_id,duration\np1,5\np2,2\n");
  const auto x = io::load_events(path);
  REQUIRE(x.individuals() == 2);
  CHECK(x.feature_names == std::vector<std::string>{"a", "b"});
  CHECK(x.matrices[0] == Matrix::from_rows({{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}}));
  CHECK(x.matrices[1].sum() == 0.0);
  CHECK(x.individual_ids == std::vector<std::string>{"p1", "p2"});
}

TEST_CASE("loader errors") {
  TempDir dir;
  SUBCASE("duplicate triple names its line") {
    const auto path = dir.write("d.csv", "individual_id,feature,time,duration\np,a,0,3\np,a,1,3\np,a,0,3\n");
    try {
      io::load_events(path);
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
      CHECK(std::string(e.what()).find(", line 4:") != std::string::npos);
    }
  }
  SUBCASE("time equal to duration") {
    const auto path = dir.write("t.csv", "individual_id,feature,time,duration\np,a,3,3\n");
    CHECK(code_of([&] { io::load_events(path); }) == ErrorCode::TimeOutOfRange);
  }
  SUBCASE("feature outside the whitelist") {
    const auto path = dir.write("w.csv", "individual_id,feature,time,duration\np,z,0,3\n");
    io::LoadOptions options;
    options.feature_whitelist = std::vector<std::string>{"a", "b"};
    CHECK(code_of([&] { io::load_events(path, options); }) == ErrorCode::UnknownFeature);
  }
  SUBCASE("no durations anywhere") {
    const auto path = dir.write("n.csv", "individual_id,feature,time\np,a,0\n");
    CHECK(code_of([&] { io::load_events(path); }) == ErrorCode::ParseError);
  }
  SUBCASE("malformed time") {
    const auto path = dir.write("m.csv", "individual_id,feature,time,duration\np,a,x,3\n");
    CHECK(code_of([&] { io::load_events(path); }) == ErrorCode::ParseError);
  }
  SUBCASE("missing file") {
    CHECK(code_of([&] { io::load_events(dir.path / "absent.csv"); }) == ErrorCode::IoError);
  }
}

TEST_CASE("whitelist fixes the feature rows") {
  TempDir dir;
  const auto path = dir.write("e.csv", "individual_id,feature,time,duration\np,b,0,2\n");
  io::LoadOptions options;
  options.feature_whitelist = std::vector<std::string>{"a", "b", "c"};
  const auto x = io::load_events(path, options);
  CHECK(x.features() == 3);
  CHECK(x.matrices[0] == Matrix::from_rows({{0, 0}, {1, 0}, {0, 0}}));
}

TEST_CASE("CSV and JSONL loaders agree") {
  TempDir dir;
  const auto csv = dir.write("e.csv", "individual_id,feature,time\nq,y,2\nq,x,0\nr,x,1\n");
  dir.write("e.durations.csv", "individual_id,duration\nq,3\nr,4\ns,1\n");
  const auto jsonl = dir.write(
      "e.jsonl",
      "{\"type\":\"dataset\",\"features\":[\"x\",\"y\"],\"individuals\":[{\"id\":\"q\",\"duration\":3},"
      "{\"id\":\"r\",\"duration\":4},{\"id\":\"s\",\"duration\":1}]}\n"
      "{\"individual_id\":\"q\",\"feature\":\"y\",\"time\":2}\n"
      "{\"individual_id\":\"q\",\"feature\":\"x\",\"time\":0}\n"
      "{\"individual_id\":\"r\",\"feature\":\"x\",\"time\":1}\n");
  const auto a = io::load_events(csv);
  const auto b = io::load_events(jsonl);
  CHECK(a.matrices == b.matrices);
  CHECK(a.feature_names == b.feature_names);
  CHECK(a.individual_ids == b.individual_ids);
  CHECK(io::dataset_digest(a) == io::dataset_digest(b));
}

TEST_CASE("save_events round-trips in both formats") {
  TempDir dir;
  GenConfig cfg;
  cfg.individuals = 12;
  cfg.duration_range = std::make_pair<std::size_t, std::size_t>(3, 9);
  cfg.seed = 2;
  const auto ds = generate(cfg);
  for (auto format : {io::EventFormat::Csv, io::EventFormat::Jsonl}) {
    const auto path = dir.path / (format == io::EventFormat::Csv ? "x.csv" : "x.jsonl");
    io::save_events(path, ds.data, format);
    io::LoadOptions options;
    options.feature_whitelist = ds.data.feature_names;
    const auto back = io::load_events(path, options);
    CHECK(back.matrices == ds.data.matrices);
    CHECK(back.individual_ids == ds.data.individual_ids);
    CHECK(io::dataset_digest(back) == io::dataset_digest(ds.data));
  }
}

TEST_CASE("dataset digest changes with content") {
  Rng rng(1);
  auto x = random_tensor(3, 2, {4}, rng);
  const auto before = io::dataset_digest(x);
  x.matrices[1](0, 0) = 1.0 - x.matrices[1](0, 0);
  CHECK(io::dataset_digest(x) != before);
}

TEST_CASE("model files") {
  TempDir dir;
  Rng rng(3);
  io::ModelFile model;
  model.phenotypes = random_phenotypes(3, 4, 2, rng);
  model.phenotypes.feature_names = numbered("f", 4);
  model.hyperparameters.rank = 3;
  model.hyperparameters.window = 2;
  model.provenance.seed = 77;
  model.provenance.dataset_digest = "abc";
  const auto path = dir.path / "model.json";
  io::save_model(path, model);

  SUBCASE("round trip is bit-exact") {
    const auto back = io::load_model(path);
    CHECK(back.phenotypes.data == model.phenotypes.data);
    CHECK(back.phenotypes.feature_names == model.phenotypes.feature_names);
    CHECK(back.provenance.seed == 77);
    CHECK(back.provenance.dataset_digest == "abc");
    CHECK(back.hyperparameters.window == 2);
  }
  SUBCASE("another format version is rejected") {
    model.format_version = io::kModelFormatVersion + 1;
    io::save_model(path, model);
    CHECK(code_of([&] { io::load_model(path); }) == ErrorCode::VersionMismatch);
  }
  SUBCASE("truncated file") {
    const std::string text = read(path);
    dir.write("model.json", text.substr(0, text.size() / 2));
    CHECK(code_of([&] { io::load_model(path); }) == ErrorCode::CorruptFile);
  }
  SUBCASE("edited payload fails the checksum") {
    auto doc = nlohmann::json::parse(read(path));
    doc["payload"]["provenance"]["seed"] = 78;
    dir.write("model.json", doc.dump());
    CHECK(code_of([&] { io::load_model(path); }) == ErrorCode::CorruptFile);
  }
}

TEST_CASE("pathway files round-trip") {
  TempDir dir;
  Rng rng(4);
  io::PathwayFile file;
  file.individual_ids = {"a", "b"};
  file.window = 3;
  file.pathways.matrices = {random_matrix(2, 4, rng), random_matrix(2, 1, rng)};
  io::save_pathways(dir.path / "w.json", file);
  const auto back = io::load_pathways(dir.path / "w.json");
  CHECK(back.individual_ids == file.individual_ids);
  CHECK(back.window == 3);
  CHECK(back.pathways.matrices == file.pathways.matrices);
}

TEST_CASE("report emission") {
  TempDir dir;
  io::RunReport report;
  report.command = "train";
  report.fit_x_test = 0.5;
  report.loss_history = {LossRecord{0, LossBreakdown{1, 2, 3, 4, 1, 0.5}}};
  const auto doc = nlohmann::json::parse(io::to_json(report));
  CHECK(doc["fit_x_test"] == 0.5);
  CHECK(doc["fit_p"].is_null());
  CHECK(doc["loss_history"].size() == 1);

  const auto csv = dir.path / "runs.csv";
  io::append_report_csv(csv, report);
  io::append_report_csv(csv, report);
  std::istringstream lines(read(csv));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  CHECK(count == 3);
}

TEST_CASE("heatmaps") {
  Matrix p = Matrix::from_rows({{0, 1}, {0.5, 0}});
  const std::vector<std::string> names = {"a", "b"};
  const std::string svg = io::render_svg(p, names, "t");
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("rgb(255,255,255)") != std::string::npos);
  CHECK(svg.find("rgb(0,0,0)") != std::string::npos);
  CHECK(svg.find("0.50") != std::string::npos);
  const std::string text = io::render_text(p, names, "t");
  CHECK(text.find("1.00") != std::string::npos);

  io::HeatmapOptions quiet;
  quiet.annotate_max_features = 1;
  CHECK(io::render_svg(p, names, "t", quiet).find("0.50") == std::string::npos);
}
