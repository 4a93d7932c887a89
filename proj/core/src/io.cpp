#include "tempheno/io.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include <json.hpp>

namespace tempheno::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void parse_error(const fs::path& path, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::ParseError, path.string() + ", line " + std::to_string(line) + ": " + what);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::size_t parse_count(const fs::path& path, std::size_t line, const std::string& field,
                        const char* what) {
  std::size_t value = 0;
  std::size_t used = 0;
  try {
    if (!field.empty() && field.front() != '-') value = std::stoull(field, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != field.size()) {
    parse_error(path, line, std::string("invalid ") + what + " '" + field + "'");
  }
  return value;
}

struct Event {
  std::string individual;
  std::string feature;
  std::size_t time = 0;
  std::size_t line = 0;
};

struct Declared {
  std::vector<std::string> order;
  std::unordered_map<std::string, std::size_t> duration;

  void declare(const fs::path& path, std::size_t line, const std::string& id, std::size_t d) {
    auto [it, inserted] = duration.emplace(id, d);
    if (inserted) {
      order.push_back(id);
    } else if (it->second != d) {
      parse_error(path, line, "conflicting durations for '" + id + "'");
    }
  }
};

IrregularTensor assemble(const fs::path& path, const Declared& declared,
                         const std::vector<Event>& events, std::set<std::string> universe,
                         const LoadOptions& options) {
  if (options.feature_whitelist) {
    const std::set<std::string> allowed(options.feature_whitelist->begin(),
                                        options.feature_whitelist->end());
    for (const auto& f : universe) {
      if (!allowed.contains(f)) {
        throw Error(ErrorCode::UnknownFeature, path.string() + ": feature '" + f +
                                                   "' is not in the configured feature list");
      }
    }
    universe = allowed;
  }
  for (const Event& e : events) {
    if (!universe.contains(e.feature)) {
      throw Error(ErrorCode::UnknownFeature, path.string() + ", line " + std::to_string(e.line) +
                                                 ": undeclared feature '" + e.feature + "'");
    }
  }

  IrregularTensor x;
  x.feature_names.assign(universe.begin(), universe.end());  // std::set keeps them sorted
  std::unordered_map<std::string, std::size_t> row;
  for (std::size_t i = 0; i < x.feature_names.size(); ++i) row[x.feature_names[i]] = i;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& id : declared.order) {
    index[id] = x.matrices.size();
    x.individual_ids.push_back(id);
    x.matrices.emplace_back(x.feature_names.size(), declared.duration.at(id));
  }

  std::set<std::tuple<std::string, std::string, std::size_t>> seen;
  for (const Event& e : events) {
    const auto it = index.find(e.individual);
    if (it == index.end()) {
      parse_error(path, e.line, "individual '" + e.individual + "' has no declared duration");
    }
    const std::size_t duration = declared.duration.at(e.individual);
    if (e.time >= duration) {
      throw Error(ErrorCode::TimeOutOfRange,
                  path.string() + ", line " + std::to_string(e.line) + ": time " +
                      std::to_string(e.time) + " is outside the duration " +
                      std::to_string(duration) + " of '" + e.individual + "'");
    }
    if (!seen.emplace(e.individual, e.feature, e.time).second) {
      parse_error(path, e.line, "duplicate event (" + e.individual + "," + e.feature + "," +
                                    std::to_string(e.time) + ")");
    }
    x.matrices[it->second](row.at(e.feature), e.time) = 1.0;
  }
  return x;
}

IrregularTensor load_csv(const fs::path& path, const LoadOptions& options) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) parse_error(path, 1, "missing header");
  ++line_no;
  const auto header = split_csv(line);
  const bool has_duration = header.size() == 4 && header[3] == "duration";
  if (header.size() < 3 || header[0] != "individual_id" || header[1] != "feature" ||
      header[2] != "time" || (header.size() == 4 && !has_duration) || header.size() > 4) {
    parse_error(path, 1, "expected header individual_id,feature,time[,duration]");
  }

  Declared declared;
  std::optional<fs::path> sidecar = options.durations_path;
  if (!sidecar && fs::exists(durations_path_for(path))) sidecar = durations_path_for(path);
  if (sidecar) {
    std::istringstream side(read_file(*sidecar));
    std::string side_line;
    std::size_t side_no = 0;
    while (std::getline(side, side_line)) {
      ++side_no;
      if (trim(side_line).empty()) continue;
      const auto fields = split_csv(side_line);
      if (side_no == 1 && fields.size() == 2 && fields[0] == "individual_id") continue;
      if (fields.size() != 2) parse_error(*sidecar, side_no, "expected individual_id,duration");
      declared.declare(*sidecar, side_no, fields[0],
                       parse_count(*sidecar, side_no, fields[1], "duration"));
    }
  } else if (!has_duration) {
    throw Error(ErrorCode::ParseError,
                path.string() + ": durations missing (no duration column and no sidecar " +
                    durations_path_for(path).string() + ")");
  }

  std::vector<Event> events;
  std::set<std::string> universe;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      parse_error(path, line_no, "expected " + std::to_string(header.size()) + " fields");
    }
    if (fields[0].empty() || fields[1].empty()) parse_error(path, line_no, "empty identifier");
    Event e{fields[0], fields[1], parse_count(path, line_no, fields[2], "time"), line_no};
    if (has_duration) {
      declared.declare(path, line_no, e.individual,
                       parse_count(path, line_no, fields[3], "duration"));
    }
    universe.insert(e.feature);
    events.push_back(std::move(e));
  }
  return assemble(path, declared, events, std::move(universe), options);
}

IrregularTensor load_jsonl(const fs::path& path, const LoadOptions& options) {
  std::istringstream in(read_file(path));
  std::string line;
  std::size_t line_no = 0;
  Declared declared;
  std::set<std::string> universe;
  std::vector<Event> events;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      parse_error(path, line_no, std::string("invalid JSON: ") + e.what());
    }
    try {
      if (!have_header) {
        if (record.value("type", "") != "dataset") {
          parse_error(path, line_no, "first record must be the dataset header");
        }
        for (const auto& f : record.at("features")) universe.insert(f.get<std::string>());
        for (const auto& ind : record.at("individuals")) {
          declared.declare(path, line_no, ind.at("id").get<std::string>(),
                           ind.at("duration").get<std::size_t>());
        }
        have_header = true;
        continue;
      }
      Event e{record.at("individual_id").get<std::string>(),
              record.at("feature").get<std::string>(), 0, line_no};
      const auto& t = record.at("time");
      if (!t.is_number_unsigned()) parse_error(path, line_no, "time must be a nonnegative integer");
      e.time = t.get<std::size_t>();
      events.push_back(std::move(e));
    } catch (const json::exception& e) {
      parse_error(path, line_no, std::string("malformed record: ") + e.what());
    }
  }
  if (!have_header) parse_error(path, line_no + 1, "missing dataset header");
  return assemble(path, declared, events, std::move(universe), options);
}

// FNV-1a 64.
class Digest {
 public:
  void bytes(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < size; ++i) {
      state_ ^= p[i];
      state_ *= 0x100000001b3ULL;
    }
  }
  void text(const std::string& s) {
    const std::uint64_t size = s.size();
    bytes(&size, sizeof size);
    bytes(s.data(), s.size());
  }
  void count(std::uint64_t v) { bytes(&v, sizeof v); }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(state_));
    return buf;
  }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::string checksum_of(const json& payload) {
  Digest d;
  d.text(payload.dump());
  return d.hex();
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    rows.push_back(std::vector<double>(m.row(i).begin(), m.row(i).end()));
  }
  return rows;
}

Matrix matrix_from_json(const json& rows, std::size_t expect_rows, std::size_t expect_cols) {
  if (!rows.is_array() || rows.size() != expect_rows) {
    throw Error(ErrorCode::CorruptFile, "matrix has wrong row count");
  }
  Matrix m(expect_rows, expect_cols);
  for (std::size_t i = 0; i < expect_rows; ++i) {
    if (!rows[i].is_array() || rows[i].size() != expect_cols) {
      throw Error(ErrorCode::CorruptFile, "matrix has wrong column count");
    }
    for (std::size_t j = 0; j < expect_cols; ++j) m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

json hyperparameters_to_json(const HyperParams& hp) {
  return {{"rank", hp.rank},
          {"window", hp.window},
          {"alpha", hp.sparsity_weight},
          {"beta", hp.nonsuccession_weight},
          {"learning_rate", hp.learning_rate},
          {"batch_size", hp.batch_size},
          {"epochs", hp.epochs},
          {"seed", hp.rng_seed},
          {"log_epsilon", hp.log_epsilon}};
}

HyperParams hyperparameters_from_json(const json& j) {
  HyperParams hp;
  hp.rank = j.at("rank").get<std::size_t>();
  hp.window = j.at("window").get<std::size_t>();
  hp.sparsity_weight = j.at("alpha").get<double>();
  hp.nonsuccession_weight = j.at("beta").get<double>();
  hp.learning_rate = j.at("learning_rate").get<double>();
  hp.batch_size = j.at("batch_size").get<std::size_t>();
  hp.epochs = j.at("epochs").get<std::size_t>();
  hp.rng_seed = j.at("seed").get<std::uint64_t>();
  hp.log_epsilon = j.at("log_epsilon").get<double>();
  return hp;
}

json loss_to_json(const LossBreakdown& loss) {
  return {{"reconstruction", loss.reconstruction},
          {"sparsity", loss.sparsity},
          {"nonsuccession", loss.nonsuccession},
          {"total", loss.total}};
}

// Parses a checksummed document and verifies format tag, version and checksum.
json load_document(const fs::path& path, const std::string& format) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("payload") || !doc.contains("checksum")) {
    throw Error(ErrorCode::CorruptFile, path.string() + ": missing payload or checksum");
  }
  const json& payload = doc["payload"];
  if (payload.value("format", "") != format) {
    throw Error(ErrorCode::CorruptFile, path.string() + ": not a " + format + " file");
  }
  const int version = payload.value("format_version", -1);
  if (version != kModelFormatVersion) {
    throw Error(ErrorCode::VersionMismatch, path.string() + ": format_version " +
                                                std::to_string(version) + ", expected " +
                                                std::to_string(kModelFormatVersion));
  }
  if (doc["checksum"] != checksum_of(payload)) {
    throw Error(ErrorCode::CorruptFile, path.string() + ": checksum mismatch");
  }
  return payload;
}

void save_document(const fs::path& path, json payload) {
  json doc = {{"checksum", checksum_of(payload)}, {"payload", std::move(payload)}};
  write_text(path, doc.dump(1) + "\n");
}

void check_unit_box(const Matrix& m, const char* what) {
  for (double v : m.values()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw Error(ErrorCode::CorruptFile, std::string(what) + " value outside [0,1]");
    }
  }
}

std::string format_value(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

EventFormat format_from_path(const fs::path& path) {
  return path.extension() == ".jsonl" ? EventFormat::Jsonl : EventFormat::Csv;
}

fs::path durations_path_for(const fs::path& events_path) {
  return events_path.parent_path() / (events_path.stem().string() + ".durations.csv");
}

IrregularTensor load_events(const fs::path& path, EventFormat format, const LoadOptions& options) {
  return format == EventFormat::Csv ? load_csv(path, options) : load_jsonl(path, options);
}

IrregularTensor load_events(const fs::path& path, const LoadOptions& options) {
  return load_events(path, format_from_path(path), options);
}

void save_events(const fs::path& path, const IrregularTensor& x, EventFormat format) {
  std::ostringstream out;
  auto id_of = [&](std::size_t k) {
    return k < x.individual_ids.size() ? x.individual_ids[k] : "i" + std::to_string(k);
  };
  auto feature_of = [&](std::size_t i) {
    return i < x.feature_names.size() ? x.feature_names[i] : "f" + std::to_string(i);
  };
  if (format == EventFormat::Csv) {
    out << "individual_id,feature,time\n";
    std::ostringstream durations;
    durations << "individual_id,duration\n";
    for (std::size_t k = 0; k < x.individuals(); ++k) {
      durations << id_of(k) << ',' << x.duration(k) << '\n';
      const Matrix& m = x.matrices[k];
      for (std::size_t t = 0; t < m.cols(); ++t) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
          if (m(i, t) != 0.0) out << id_of(k) << ',' << feature_of(i) << ',' << t << '\n';
        }
      }
    }
    write_text(durations_path_for(path), durations.str());
  } else {
    json header = {{"type", "dataset"}, {"features", json::array()}, {"individuals", json::array()}};
    for (std::size_t i = 0; i < x.features(); ++i) header["features"].push_back(feature_of(i));
    for (std::size_t k = 0; k < x.individuals(); ++k) {
      header["individuals"].push_back({{"id", id_of(k)}, {"duration", x.duration(k)}});
    }
    out << header.dump() << '\n';
    for (std::size_t k = 0; k < x.individuals(); ++k) {
      const Matrix& m = x.matrices[k];
      for (std::size_t t = 0; t < m.cols(); ++t) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
          if (m(i, t) != 0.0) {
            out << json{{"individual_id", id_of(k)}, {"feature", feature_of(i)}, {"time", t}}.dump()
                << '\n';
          }
        }
      }
    }
  }
  write_text(path, out.str());
}

std::string dataset_digest(const IrregularTensor& x) {
  Digest d;
  d.count(x.feature_names.size());
  for (const auto& f : x.feature_names) d.text(f);
  d.count(x.individual_ids.size());
  for (const auto& id : x.individual_ids) d.text(id);
  d.count(x.individuals());
  for (const Matrix& m : x.matrices) {
    d.count(m.rows());
    d.count(m.cols());
    // Cells are binary; pack them as bytes so the digest ignores float encoding.
    for (double v : m.values()) {
      const unsigned char bit = v != 0.0 ? 1 : 0;
      d.bytes(&bit, 1);
    }
  }
  return d.hex();
}

ModelFile make_model_file(const TrainedModel& model, const IrregularTensor& dataset,
                          const IrregularTensor& train_set) {
  ModelFile file;
  file.phenotypes = model.phenotypes;
  file.hyperparameters = model.config.hp;
  file.provenance.seed = model.rng_seed;
  file.provenance.epochs = model.config.hp.epochs;
  file.provenance.dataset_digest = dataset_digest(dataset);
  file.provenance.train_digest = dataset_digest(train_set);
  return file;
}

void save_model(const fs::path& path, const ModelFile& model) {
  json phenotypes = json::array();
  for (const Matrix& p : model.phenotypes.data) phenotypes.push_back(matrix_to_json(p));
  json payload = {
      {"format", "tempheno-model"},
      {"format_version", model.format_version},
      {"feature_names", model.phenotypes.feature_names},
      {"rank", model.phenotypes.rank()},
      {"window", model.phenotypes.window()},
      {"features", model.phenotypes.features()},
      {"hyperparameters", hyperparameters_to_json(model.hyperparameters)},
      {"phenotypes", std::move(phenotypes)},
      {"provenance",
       {{"seed", model.provenance.seed},
        {"epochs", model.provenance.epochs},
        {"dataset_digest", model.provenance.dataset_digest},
        {"train_digest", model.provenance.train_digest}}}};
  save_document(path, std::move(payload));
}

ModelFile load_model(const fs::path& path) {
  const json payload = load_document(path, "tempheno-model");
  ModelFile model;
  try {
    model.format_version = payload.at("format_version").get<int>();
    const auto rank = payload.at("rank").get<std::size_t>();
    const auto window = payload.at("window").get<std::size_t>();
    const auto features = payload.at("features").get<std::size_t>();
    model.phenotypes.feature_names = payload.at("feature_names").get<std::vector<std::string>>();
    if (model.phenotypes.feature_names.size() != features) {
      throw Error(ErrorCode::CorruptFile, "feature name count does not match feature dimension");
    }
    const json& arrays = payload.at("phenotypes");
    if (!arrays.is_array() || arrays.size() != rank) {
      throw Error(ErrorCode::CorruptFile, "phenotype count does not match rank");
    }
    for (const json& p : arrays) {
      model.phenotypes.data.push_back(matrix_from_json(p, features, window));
      check_unit_box(model.phenotypes.data.back(), "phenotype");
    }
    model.hyperparameters = hyperparameters_from_json(payload.at("hyperparameters"));
    const json& prov = payload.at("provenance");
    model.provenance.seed = prov.at("seed").get<std::uint64_t>();
    model.provenance.epochs = prov.at("epochs").get<std::size_t>();
    model.provenance.dataset_digest = prov.at("dataset_digest").get<std::string>();
    model.provenance.train_digest = prov.value("train_digest", "");
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, path.string() + ": " + e.what());
  }
  return model;
}

void save_pathways(const fs::path& path, const PathwayFile& file) {
  json pathways = json::array();
  json durations = json::array();
  for (const Matrix& w : file.pathways.matrices) {
    pathways.push_back(matrix_to_json(w));
    durations.push_back(w.cols());
  }
  json payload = {{"format", "tempheno-pathways"},
                  {"format_version", kModelFormatVersion},
                  {"rank", file.pathways.rank()},
                  {"window", file.window},
                  {"individual_ids", file.individual_ids},
                  {"lengths", std::move(durations)},
                  {"pathways", std::move(pathways)}};
  save_document(path, std::move(payload));
}

PathwayFile load_pathways(const fs::path& path) {
  const json payload = load_document(path, "tempheno-pathways");
  PathwayFile file;
  try {
    const auto rank = payload.at("rank").get<std::size_t>();
    file.window = payload.at("window").get<std::size_t>();
    file.individual_ids = payload.at("individual_ids").get<std::vector<std::string>>();
    const auto lengths = payload.at("lengths").get<std::vector<std::size_t>>();
    const json& arrays = payload.at("pathways");
    if (!arrays.is_array() || arrays.size() != lengths.size()) {
      throw Error(ErrorCode::CorruptFile, "pathway count does not match lengths");
    }
    for (std::size_t k = 0; k < lengths.size(); ++k) {
      file.pathways.matrices.push_back(matrix_from_json(arrays[k], rank, lengths[k]));
      check_unit_box(file.pathways.matrices.back(), "pathway");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::CorruptFile, path.string() + ": " + e.what());
  }
  return file;
}

std::string to_json(const RunReport& report, int indent) {
  json j;
  j["command"] = report.command;
  auto optional_field = [&](const char* key, const std::optional<double>& v) {
    j[key] = v ? json(*v) : json(nullptr);
  };
  optional_field("fit_x_train", report.fit_x_train);
  optional_field("fit_x_test", report.fit_x_test);
  optional_field("fit_p", report.fit_p);
  optional_field("fit_w", report.fit_w);
  json history = json::array();
  for (const auto& rec : report.loss_history) {
    json entry = loss_to_json(rec.loss);
    entry["epoch"] = rec.epoch;
    history.push_back(std::move(entry));
  }
  j["loss_history"] = std::move(history);
  j["wall_seconds"] = report.wall_seconds;
  j["config"] = hyperparameters_to_json(report.hyperparameters);
  j["config"]["test_fraction"] = report.test_fraction;
  j["train_individuals"] = report.train_individuals;
  j["test_individuals"] = report.test_individuals;
  j["dataset_digest"] = report.dataset_digest;
  return j.dump(indent);
}

void append_report_csv(const fs::path& path, const RunReport& report) {
  const bool fresh = !fs::exists(path) || fs::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  auto opt = [](const std::optional<double>& v) {
    if (!v) return std::string();
    std::ostringstream s;
    s << std::setprecision(17) << *v;
    return s.str();
  };
  const HyperParams& hp = report.hyperparameters;
  if (fresh) {
    out << "command,dataset_digest,rank,window,alpha,beta,learning_rate,batch_size,epochs,seed,"
           "fit_x_train,fit_x_test,fit_p,fit_w,final_loss,wall_seconds\n";
  }
  out << report.command << ',' << report.dataset_digest << ',' << hp.rank << ',' << hp.window
      << ',' << hp.sparsity_weight << ',' << hp.nonsuccession_weight << ',' << hp.learning_rate
      << ',' << hp.batch_size << ',' << hp.epochs << ',' << hp.rng_seed << ','
      << opt(report.fit_x_train) << ',' << opt(report.fit_x_test) << ',' << opt(report.fit_p)
      << ',' << opt(report.fit_w) << ','
      << (report.loss_history.empty() ? std::string()
                                      : opt(report.loss_history.back().loss.total))
      << ',' << report.wall_seconds << '\n';
}

void write_text(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << content;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::string render_svg(const Matrix& phenotype, const std::vector<std::string>& feature_names,
                       const std::string& title, const HeatmapOptions& options) {
  const double cell = options.cell_size;
  const double label_width = 120.0;
  const double top = 40.0;
  const double width = label_width + cell * static_cast<double>(phenotype.cols()) + 10.0;
  const double height = top + cell * static_cast<double>(phenotype.rows()) + 10.0;
  const bool annotate = phenotype.rows() <= options.annotate_max_features;

  std::ostringstream svg;
  svg << std::fixed << std::setprecision(1);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"4\" y=\"16\" font-size=\"13\">" << xml_escape(title) << "</text>\n";
  for (std::size_t tau = 0; tau < phenotype.cols(); ++tau) {
    svg << "<text x=\"" << label_width + cell * static_cast<double>(tau) + cell / 2
        << "\" y=\"" << top - 6 << "\" text-anchor=\"middle\">" << tau << "</text>\n";
  }
  for (std::size_t i = 0; i < phenotype.rows(); ++i) {
    const double y = top + cell * static_cast<double>(i);
    const std::string name = i < feature_names.size() ? feature_names[i] : std::to_string(i);
    svg << "<text x=\"" << label_width - 6 << "\" y=\"" << y + cell * 0.65
        << "\" text-anchor=\"end\">" << xml_escape(name) << "</text>\n";
    for (std::size_t tau = 0; tau < phenotype.cols(); ++tau) {
      const double v = std::clamp(phenotype(i, tau), 0.0, 1.0);
      const int level = static_cast<int>(std::lround(255.0 * (1.0 - v)));
      const double x = label_width + cell * static_cast<double>(tau);
      svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell << "\" height=\""
          << cell << "\" fill=\"rgb(" << level << ',' << level << ',' << level
          << ")\" stroke=\"#cccccc\"/>\n";
      if (annotate) {
        svg << "<text x=\"" << x + cell / 2 << "\" y=\"" << y + cell * 0.65
            << "\" text-anchor=\"middle\" fill=\"" << (v > 0.5 ? "white" : "black") << "\">"
            << format_value(v) << "</text>\n";
      }
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

std::string render_text(const Matrix& phenotype, const std::vector<std::string>& feature_names,
                        const std::string& title, const HeatmapOptions& options) {
  static constexpr std::array<char, 10> shades = {' ', '.', ':', '-', '=', '+', '*', '#', '%', '@'};
  const bool annotate = phenotype.rows() <= options.annotate_max_features;
  const int cell_width = annotate ? 5 : 2;
  std::size_t name_width = 4;
  for (std::size_t i = 0; i < phenotype.rows() && i < feature_names.size(); ++i) {
    name_width = std::max(name_width, feature_names[i].size());
  }
  std::ostringstream out;
  out << title << '\n' << std::string(name_width, ' ');
  for (std::size_t tau = 0; tau < phenotype.cols(); ++tau) out << std::setw(cell_width) << tau;
  out << '\n';
  for (std::size_t i = 0; i < phenotype.rows(); ++i) {
    const std::string name = i < feature_names.size() ? feature_names[i] : std::to_string(i);
    out << std::setw(static_cast<int>(name_width)) << name;
    for (std::size_t tau = 0; tau < phenotype.cols(); ++tau) {
      const double v = std::clamp(phenotype(i, tau), 0.0, 1.0);
      if (annotate) {
        out << ' ' << format_value(v);
      } else {
        out << ' ' << shades[static_cast<std::size_t>(std::lround(v * 9.0))];
      }
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace tempheno::io
