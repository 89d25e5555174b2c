#include "cptv/harness/artifacts.hpp"

#include "cptv/errors.hpp"
#include "cptv/io/csv.hpp"

#include <fstream>

namespace cptv::harness {

using nlohmann::json;

namespace {

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
    throw ConfigError("model: " + what + " has the wrong number of rows");
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ConfigError("model: " + what + " has the wrong number of columns");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

std::vector<double> column(const Matrix& m) { return {m.data(), m.data() + m.size()}; }

Matrix column_from(const std::vector<double>& v) {
  Matrix m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return m;
}

json changepoint_to_json(const cp::Changepoint& c) {
  return {{"time", c.time}, {"left", c.left}, {"right", c.right}};
}

json refit_summary(const cp::SegmentFit& f) {
  return {{"start", f.start},
          {"end", f.end},
          {"interior_points", f.interior_points},
          {"lambda", f.lambda ? json(*f.lambda) : json(nullptr)},
          {"final_loss", f.final_loss}};
}

void write_json(const json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace

json network_to_json(const pinn::NetworkParams& p) {
  json weights = json::array();
  json biases = json::array();
  for (std::size_t l = 0; l < p.layer_count(); ++l) {
    weights.push_back(matrix_to_json(p.weights[l]));
    biases.push_back(column(p.biases[l]));
  }
  return {{"widths", p.widths},
          {"input_lo", column(p.input_map.lo)},
          {"input_hi", column(p.input_map.hi)},
          {"weights", weights},
          {"biases", biases}};
}

pinn::NetworkParams network_from_json(const json& j) {
  try {
    pinn::NetworkParams p;
    p.widths = j.at("widths").get<std::vector<int>>();
    if (p.widths.size() < 2) throw ConfigError("model: network needs at least two widths");
    const auto lo = j.at("input_lo").get<std::vector<double>>();
    const auto hi = j.at("input_hi").get<std::vector<double>>();
    p.input_map.lo = column_from(lo);
    p.input_map.hi = column_from(hi);
    const json& w = j.at("weights");
    const json& b = j.at("biases");
    if (w.size() + 1 != p.widths.size() || b.size() + 1 != p.widths.size())
      throw ConfigError("model: layer count disagrees with widths");
    for (std::size_t l = 0; l + 1 < p.widths.size(); ++l) {
      p.weights.push_back(matrix_from_json(w[l], p.widths[l + 1], p.widths[l], "weights[" + std::to_string(l) + "]"));
      p.biases.push_back(column_from(b[l].get<std::vector<double>>()));
    }
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model: malformed network: ") + e.what());
  }
}

json track_to_json(const cp::LambdaTrack& t) {
  return {{"horizon", t.horizon()},
          {"base", t.base()},
          {"knots", t.knots()},
          {"raw_up", column(t.raw_up())},
          {"raw_down", column(t.raw_down())},
          {"weighting", t.weighting() == cp::EdgeWeighting::UShape ? "u_shape" : "sqrt_horizon"}};
}

cp::LambdaTrack track_from_json(const json& j) {
  try {
    cp::LambdaTrack t(j.at("horizon").get<double>(), j.at("knots").get<std::vector<double>>(), j.at("base").get<double>());
    const auto up = j.at("raw_up").get<std::vector<double>>();
    const auto down = j.at("raw_down").get<std::vector<double>>();
    if (up.size() != t.knot_count() || down.size() != t.knot_count())
      throw ConfigError("model: increment count disagrees with knots");
    for (std::size_t i = 0; i < up.size(); ++i) t.set_raw(i, up[i], down[i]);
    const std::string w = j.value("weighting", "sqrt_horizon");
    if (w != "sqrt_horizon" && w != "u_shape") throw ConfigError("model: unknown weighting " + w);
    t.set_weighting(w == "u_shape" ? cp::EdgeWeighting::UShape : cp::EdgeWeighting::SqrtHorizon);
    return t;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model: malformed track: ") + e.what());
  }
}

json model_to_json(const ModelFile& m) {
  json cps = json::array();
  for (const auto& c : m.changepoints) cps.push_back(changepoint_to_json(c));
  json segs = json::array();
  for (const auto& f : m.refits) {
    json s = refit_summary(f);
    s["network"] = f.network ? network_to_json(*f.network) : json(nullptr);
    segs.push_back(std::move(s));
  }
  return {{"network", network_to_json(m.model.network)},
          {"track", track_to_json(m.model.track)},
          {"changepoints", cps},
          {"refits", segs}};
}

ModelFile model_from_json(const json& j) {
  try {
    ModelFile m;
    m.model.network = network_from_json(j.at("network"));
    m.model.track = track_from_json(j.at("track"));
    for (const json& c : j.value("changepoints", json::array()))
      m.changepoints.push_back({c.at("time").get<double>(), c.at("left").get<double>(), c.at("right").get<double>()});
    for (const json& s : j.value("refits", json::array())) {
      cp::SegmentFit f;
      f.start = s.at("start").get<double>();
      f.end = s.at("end").get<double>();
      f.interior_points = s.value("interior_points", std::size_t{0});
      if (!s.at("lambda").is_null()) f.lambda = s.at("lambda").get<double>();
      if (s.contains("network") && !s.at("network").is_null()) f.network = network_from_json(s.at("network"));
      f.final_loss = s.value("final_loss", 0.0);
      m.refits.push_back(std::move(f));
    }
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

void write_model(const ModelFile& m, const std::filesystem::path& path) { write_json(model_to_json(m), path); }

ModelFile read_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  }
  return model_from_json(j);
}

json metrics_to_json(const Metrics& m) {
  return {{"solution_mse", m.solution_mse},
          {"refit_mse", m.refit_mse ? json(*m.refit_mse) : json(nullptr)},
          {"segment_lambda_error", m.segment_lambda_error},
          {"changepoint_error", m.changepoint_error}};
}

json report_to_json(const RunReport& r) {
  json cps = json::array();
  for (const auto& c : r.changepoints) cps.push_back(changepoint_to_json(c));
  json segs = json::array();
  for (const auto& f : r.refits) segs.push_back(refit_summary(f));
  json final_w = r.record.weights.empty() ? json(nullptr) : json(r.record.weights.back().w);
  return {{"changepoints", cps},
          {"threshold", r.threshold},
          {"lambda_base", r.model.track.base()},
          {"refits", segs},
          {"metrics", r.metrics ? metrics_to_json(*r.metrics) : json(nullptr)},
          {"final_weights", final_w},
          {"regret", r.regret},
          {"regret_bound", r.regret_bound},
          {"g", r.g},
          {"updates", r.updates},
          {"eta", r.config.online.eta},
          {"wall_seconds", r.wall_seconds},
          {"files",
           {{"lambda_track", "lambda_track.csv"},
            {"weights", "weights.csv"},
            {"loss_curve", "loss_curve.csv"},
            {"mse_grid", "mse_grid.csv"},
            {"model", "model.json"}}},
          {"config", config_to_json(r.config)}};
}

void write_track_csv(const cp::LambdaTrack& track, const std::filesystem::path& path) {
  io::CsvWriter out(path, {"knot_time", "lambda_right_value"});
  const Vector levels = track.levels();
  out.row({0.0, levels(0)});
  for (std::size_t i = 0; i < track.knot_count(); ++i)
    out.row({track.knots()[i], levels(static_cast<Eigen::Index>(i) + 1)});
}

std::vector<cp::Segment> read_track_csv(const std::filesystem::path& path) {
  const io::CsvTable t = io::read_csv(path, {"knot_time", "lambda_right_value"});
  std::vector<cp::Segment> out;
  for (const auto& r : t.rows) out.push_back({r[0], r[1]});
  return out;
}

void write_loss_curve_csv(const std::vector<LossSample>& curve, const std::filesystem::path& path) {
  io::CsvWriter out(path, {"visit", "step", "loss"});
  for (const auto& s : curve) out.row({static_cast<double>(s.visit), static_cast<double>(s.step), s.loss});
}

void write_mse_grid_csv(const Matrix& err, const ref::ReferenceSolution& reference, const std::filesystem::path& path) {
  io::CsvWriter out(path, {"t", "x", "sq_error"});
  for (Eigen::Index n = 0; n < err.rows(); ++n)
    for (Eigen::Index i = 0; i < err.cols(); ++i) out.row({reference.t(n), reference.x(i), err(n, i)});
}

void write_run_artifacts(const RunReport& report, const std::filesystem::path& dir,
                         const ref::ReferenceSolution* reference) {
  std::filesystem::create_directories(dir);
  write_json(report_to_json(report), dir / "report.json");
  write_model({report.model, report.changepoints, report.refits}, dir / "model.json");
  write_track_csv(report.model.track, dir / "lambda_track.csv");
  oco::write_record_csv(report.record, dir / "weights.csv");
  write_loss_curve_csv(report.loss_curve, dir / "loss_curve.csv");
  if (reference) write_mse_grid_csv(squared_error_grid(report.model.network, *reference), *reference, dir / "mse_grid.csv");
}

}  // namespace cptv::harness
