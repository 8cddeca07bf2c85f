#include "spikecode/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spikecode {

namespace fs = std::filesystem;

namespace {

Json matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const Json& j, Eigen::Index cols_if_empty) {
  const auto rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : cols_if_empty;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[r].size()) != cols) throw std::invalid_argument("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

Json vector_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path.string());
  return is;
}

}  // namespace

Json to_json(const NetworkConfig& c) {
  Json j;
  j["n"] = c.size();
  j["taus"] = {{"mem_s", c.taus.mem_s}, {"syn_plus_s", c.taus.syn_plus_s}, {"syn_minus_s", c.taus.syn_minus_s}};
  j["theta"] = c.theta;
  j["q"] = c.q;
  j["sigma_het"] = c.sigma_het;
  j["w_max"] = c.w_max;
  j["seed"] = c.seed;
  j["eta"] = c.eta;
  j["weights"] = c.weights;
  return j;
}

NetworkConfig network_from_json(const Json& j) {
  NetworkConfig c;
  const auto& t = j.at("taus");
  c.taus = {t.at("mem_s").get<double>(), t.at("syn_plus_s").get<double>(), t.at("syn_minus_s").get<double>()};
  c.theta = j.at("theta").get<double>();
  c.q = j.at("q").get<double>();
  c.sigma_het = j.at("sigma_het").get<double>();
  c.w_max = j.at("w_max").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.eta = j.at("eta").get<std::vector<EtaRow>>();
  c.weights = j.at("weights").get<std::vector<WeightRow>>();
  validate(c);
  return c;
}

Json to_json(const TrainedDecoder& d) {
  Json j;
  j["k"] = d.k;
  j["n_inputs"] = d.n_inputs();
  j["n_outputs"] = d.n_outputs();
  j["mean"] = vector_json(d.mean);
  j["basis"] = matrix_json(d.basis);
  j["regression"] = matrix_json(d.regression);
  j["intercept"] = vector_json(d.intercept);
  j["explained_variance"] = d.explained_variance;
  return j;
}

TrainedDecoder decoder_from_json(const Json& j) {
  TrainedDecoder d;
  d.k = j.at("k").get<std::size_t>();
  d.mean = vector_from_json(j.at("mean"));
  d.intercept = vector_from_json(j.at("intercept"));
  d.basis = matrix_from_json(j.at("basis"), d.mean.size());
  d.regression = matrix_from_json(j.at("regression"), 0);
  if (d.regression.rows() == 0) d.regression.resize(d.intercept.size(), 0);
  d.explained_variance = j.at("explained_variance").get<std::vector<double>>();
  if (static_cast<std::size_t>(d.basis.rows()) != d.k || d.basis.cols() != d.mean.size() ||
      d.regression.rows() != d.intercept.size() || static_cast<std::size_t>(d.regression.cols()) != d.k) {
    throw std::invalid_argument("decoder shapes are inconsistent");
  }
  return d;
}

Json to_json(const Encoding& e) {
  Json j;
  j["y_star"] = e.y_star;
  j["fired"] = e.fired;
  j["n_fired"] = e.n_fired;
  j["median_s"] = e.median_s;
  return j;
}

Encoding encoding_from_json(const Json& j) {
  Encoding e;
  e.y_star = j.at("y_star").get<std::vector<double>>();
  e.fired = j.at("fired").get<std::vector<bool>>();
  if (e.fired.size() != e.y_star.size()) throw std::invalid_argument("encoding fields differ in length");
  e.n_fired = static_cast<std::size_t>(std::count(e.fired.begin(), e.fired.end(), true));
  e.median_s = j.value("median_s", 0.0);
  return e;
}

Json to_json(const TimeGrid& g) { return {{"duration_s", g.duration_s}, {"fs_hz", g.fs_hz}}; }

TimeGrid grid_from_json(const Json& j) { return {j.at("duration_s").get<double>(), j.at("fs_hz").get<double>()}; }

void write_json(const fs::path& path, const Json& j) {
  auto os = open_out(path);
  os << j.dump(2) << '\n';
}

Json read_json(const fs::path& path) {
  auto is = open_in(path);
  return Json::parse(is);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_stream_csv(std::ostream& os, const SpikeStream& s) {
  std::vector<std::pair<double, bool>> ev;
  ev.reserve(s.size());
  for (double t : s.up_times) ev.emplace_back(t, true);
  for (double t : s.dn_times) ev.emplace_back(t, false);
  std::stable_sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  os << "time_s,channel\n";
  for (const auto& [t, up] : ev) os << format_double(t) << ',' << (up ? "UP" : "DN") << '\n';
}

void write_stream_csv(const fs::path& path, const SpikeStream& stream) {
  auto os = open_out(path);
  write_stream_csv(os, stream);
}

SpikeStream read_stream_csv(const fs::path& path) {
  SpikeStream s;
  for (const auto& row : read_csv(path)) {
    if (row.size() != 2) throw std::invalid_argument("stream rows need time_s,channel");
    const double t = std::stod(row[0]);
    if (row[1] == "UP") {
      s.up_times.push_back(t);
    } else if (row[1] == "DN") {
      s.dn_times.push_back(t);
    } else {
      throw std::invalid_argument("unknown channel " + row[1]);
    }
  }
  return s;
}

void write_metrics_csv(const fs::path& path, const std::vector<MetricRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.reserve(rows.size());
  for (const auto& r : rows) cells.push_back({r.run, std::to_string(r.seed), r.metric, format_double(r.value)});
  write_csv(path, {"run", "seed", "metric", "value"}, cells);
}

void write_csv(const fs::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows) {
  auto os = open_out(path);
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path, bool skip_header) {
  auto is = open_in(path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool first = true;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first && skip_header) {
      first = false;
      continue;
    }
    first = false;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  return rows;
}

void write_dataset(const fs::path& dir, const WaveformDataset& data) {
  fs::create_directories(dir);
  Json meta;
  meta["family"] = std::string(to_string(data.family));
  meta["preset"] = std::string(to_string(data.preset));
  meta["grid"] = to_json(data.grid);
  meta["seed"] = data.seed;
  meta["n_stimuli"] = data.waveforms.size();
  meta["params"] = param_names(data.family);
  write_json(dir / "metadata.json", meta);

  std::vector<std::string> header{"stimulus"};
  for (const auto& name : param_names(data.family)) header.push_back(name);
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < data.params.size(); ++i) {
    std::vector<std::string> r{std::to_string(i)};
    for (double v : data.params[i]) r.push_back(format_double(v));
    rows.push_back(std::move(r));
  }
  write_csv(dir / "params.csv", header, rows);

  auto os = open_out(dir / "waveforms.csv");
  os << "stimulus";
  const std::size_t len = data.grid.size();
  for (std::size_t k = 0; k < len; ++k) os << ",x" << k;
  os << '\n';
  for (std::size_t i = 0; i < data.waveforms.size(); ++i) {
    os << i;
    for (double v : data.waveforms[i]) os << ',' << format_double(v);
    os << '\n';
  }
}

WaveformDataset read_dataset(const fs::path& dir) {
  WaveformDataset d;
  const auto meta = read_json(dir / "metadata.json");
  d.family = parse_family(meta.at("family").get<std::string>());
  d.preset = parse_preset(meta.at("preset").get<std::string>());
  d.grid = grid_from_json(meta.at("grid"));
  d.seed = meta.at("seed").get<std::uint64_t>();
  for (const auto& row : read_csv(dir / "params.csv")) {
    ParamVector p;
    for (std::size_t c = 1; c < row.size(); ++c) p.push_back(std::stod(row[c]));
    d.params.push_back(std::move(p));
  }
  for (const auto& row : read_csv(dir / "waveforms.csv")) {
    Waveform w;
    w.reserve(row.size());
    for (std::size_t c = 1; c < row.size(); ++c) w.push_back(std::stod(row[c]));
    d.waveforms.push_back(std::move(w));
  }
  if (d.params.size() != d.waveforms.size()) throw std::invalid_argument("params and waveforms differ in count");
  return d;
}

}  // namespace spikecode
