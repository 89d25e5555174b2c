#include "cptv/harness/config.hpp"

#include "cptv/errors.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace cptv::harness {

using nlohmann::json;

namespace {

// Walks one JSON object, rejecting unknown keys and reporting typed reads by
// dotted path.
class Section {
 public:
  Section(const json& j, std::string path, std::set<std::string> allowed) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + "expected an object");
    for (const auto& [key, _] : j_.items())
      if (!allowed.contains(key)) throw ConfigError(where() + "unknown key \"" + key + "\"");
  }

  [[nodiscard]] bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  [[nodiscard]] const json& at(const std::string& key) const { return j_.at(key); }
  [[nodiscard]] std::string child(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const std::string& key, double& out) const {
    if (!has(key)) return;
    if (!at(key).is_number()) throw ConfigError(child(key) + ": expected a number");
    out = at(key).get<double>();
  }
  void integer(const std::string& key, int& out) const {
    if (!has(key)) return;
    if (!at(key).is_number_integer()) throw ConfigError(child(key) + ": expected an integer");
    out = at(key).get<int>();
  }
  void boolean(const std::string& key, bool& out) const {
    if (!has(key)) return;
    if (!at(key).is_boolean()) throw ConfigError(child(key) + ": expected true or false");
    out = at(key).get<bool>();
  }
  void string(const std::string& key, std::string& out) const {
    if (!has(key)) return;
    if (!at(key).is_string()) throw ConfigError(child(key) + ": expected a string");
    out = at(key).get<std::string>();
  }
  void numbers(const std::string& key, std::vector<double>& out) const {
    if (!has(key)) return;
    const json& a = at(key);
    if (!a.is_array()) throw ConfigError(child(key) + ": expected an array of numbers");
    out.clear();
    for (const json& v : a) {
      if (!v.is_number()) throw ConfigError(child(key) + ": expected an array of numbers");
      out.push_back(v.get<double>());
    }
  }
  void range(const std::string& key, double& lo, double& hi) const {
    std::vector<double> v{lo, hi};
    numbers(key, v);
    if (v.size() != 2) throw ConfigError(child(key) + ": expected [lo, hi]");
    lo = v[0];
    hi = v[1];
  }

 private:
  [[nodiscard]] std::string where() const { return path_.empty() ? "config: " : path_ + ": "; }
  const json& j_;
  std::string path_;
};

cp::EdgeWeighting parse_weighting(const std::string& s) {
  if (s == "sqrt_horizon") return cp::EdgeWeighting::SqrtHorizon;
  if (s == "u_shape") return cp::EdgeWeighting::UShape;
  throw ConfigError("track.weighting: expected \"sqrt_horizon\" or \"u_shape\", got \"" + s + "\"");
}

std::string weighting_name(cp::EdgeWeighting w) {
  return w == cp::EdgeWeighting::UShape ? "u_shape" : "sqrt_horizon";
}

void read_adam(const Section& s, optim::AdamSettings& a) {
  s.number("step_size", a.step_size);
  s.number("beta1", a.beta1);
  s.number("beta2", a.beta2);
  s.number("epsilon", a.epsilon);
  s.integer("steps", a.steps);
  s.integer("decay_every", a.decay_every);
  s.number("decay_factor", a.decay_factor);
  s.boolean("global_decay", a.global_decay);
}

json adam_to_json(const optim::AdamSettings& a) {
  return {{"step_size", a.step_size}, {"beta1", a.beta1},       {"beta2", a.beta2},
          {"epsilon", a.epsilon},     {"steps", a.steps},       {"decay_every", a.decay_every},
          {"decay_factor", a.decay_factor}, {"global_decay", a.global_decay}};
}

const std::set<std::string> kAdamKeys{"step_size", "beta1", "beta2", "epsilon", "steps", "decay_every", "decay_factor",
                                      "global_decay"};

std::set<std::string> with(std::set<std::string> a, std::initializer_list<std::string> extra) {
  a.insert(extra);
  return a;
}

ref::GridSpec read_grid(const json& j, const std::string& path) {
  ref::GridSpec g;
  const Section s(j, path, {"x_range", "nx", "horizon", "nt", "lambda"});
  s.range("x_range", g.x_lo, g.x_hi);
  s.integer("nx", g.nx);
  s.number("horizon", g.horizon);
  s.integer("nt", g.nt);
  if (s.has("lambda")) {
    const json& a = s.at("lambda");
    const std::string where = s.child("lambda");
    if (a.is_number()) {
      g.lambda = {{0.0, a.get<double>()}};
    } else {
      if (!a.is_array() || a.empty()) throw ConfigError(where + ": expected a number or a list of [start, value]");
      g.lambda.clear();
      for (const json& seg : a) {
        if (!seg.is_array() || seg.size() != 2 || !seg[0].is_number() || !seg[1].is_number())
          throw ConfigError(where + ": each segment must be [start, value]");
        g.lambda.push_back({seg[0].get<double>(), seg[1].get<double>()});
      }
    }
  }
  return g;
}

}  // namespace

std::vector<std::string> TrainConfig::validate() const {
  std::vector<std::string> warnings;
  grid.validate();
  if (problem.samples.interior < 1 || problem.samples.boundary < 1 || problem.samples.initial < 1)
    throw ConfigError("problem.samples: every count must be >= 1");
  if (problem.variant == pinn::PdeVariant::NavierStokes2D) {
    if (problem.data_path.empty()) throw ConfigError("problem.data: Navier-Stokes runs need a sample file");
    if (!(problem.y_hi > problem.y_lo)) throw ConfigError("problem.y_range: empty interval");
  }
  if (hidden.empty()) throw ConfigError("network.hidden: at least one hidden layer required");
  for (int w : hidden)
    if (w < 1) throw ConfigError("network.hidden: widths must be >= 1");
  if (track.knots < 0) throw ConfigError("track.knots: must be >= 0");
  if (!(track.initial_base > 0.0)) throw ConfigError("track.initial_base: must be positive");
  if (!(track.initial_increment >= 0.0)) throw ConfigError("track.initial_increment: must be >= 0");
  if (!(track.tv_scale >= 0.0)) throw ConfigError("track.tv_scale: must be >= 0");
  if (!(track_step_scale > 0.0)) throw ConfigError("track.step_scale: must be positive");
  if (track.epsilon && !(*track.epsilon > 0.0)) throw ConfigError("track.epsilon: must be positive");
  if (!(online.eta > 0.0)) throw ConfigError("online.eta: must be positive");
  if (online.eta < 1e-6 || online.eta > 1e-3) warnings.emplace_back("learning rate outside tested range [1e-6,1e-3]");
  double sum = 0.0;
  for (double w : online.w0) {
    if (!(w > 0.0)) throw ConfigError("online.w0: weights must be positive");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("online.w0: weights must sum to 1");
  if (online.batches < 1) throw ConfigError("online.batches: must be >= 1");
  if (online.epochs < 1) throw ConfigError("online.epochs: must be >= 1");
  optimizer.validate();
  if (extraction.threshold && !(*extraction.threshold > 0.0)) throw ConfigError("extraction.threshold: must be positive");
  if (!(extraction.relative > 0.0)) throw ConfigError("extraction.relative: must be positive");
  if (!(extraction.dead_band >= 0.0)) throw ConfigError("extraction.dead_band: must be >= 0");
  refit.adam.validate();
  return warnings;
}

ref::GridSpec grid_from_json(const json& j) {
  if (j.is_object() && j.contains("grid")) {
    const Section top(j, "", {"problem", "grid", "network", "track", "online", "optimizer", "extraction", "seed"});
    return read_grid(top.at("grid"), "grid");
  }
  return read_grid(j, "grid");
}

json grid_to_json(const ref::GridSpec& g) {
  json segs = json::array();
  for (const auto& s : g.lambda) segs.push_back({s.start, s.value});
  return {{"x_range", {g.x_lo, g.x_hi}}, {"nx", g.nx}, {"horizon", g.horizon}, {"nt", g.nt}, {"lambda", segs}};
}

TrainConfig config_from_json(const json& j) {
  TrainConfig c;
  const Section top(j, "", {"problem", "grid", "network", "track", "online", "optimizer", "extraction", "seed"});

  if (top.has("problem")) {
    const Section s(top.at("problem"), "problem", {"variant", "data", "samples", "include_interior_data", "y_range"});
    if (s.has("variant")) {
      std::string v;
      s.string("variant", v);
      try {
        c.problem.variant = pinn::parse_variant(v);
      } catch (const std::exception&) {
        throw ConfigError("problem.variant: unknown variant \"" + v + "\"");
      }
    }
    s.string("data", c.problem.data_path);
    s.boolean("include_interior_data", c.problem.include_interior_data);
    s.range("y_range", c.problem.y_lo, c.problem.y_hi);
    if (s.has("samples")) {
      const Section n(s.at("samples"), "problem.samples", {"interior", "boundary", "initial"});
      n.integer("interior", c.problem.samples.interior);
      n.integer("boundary", c.problem.samples.boundary);
      n.integer("initial", c.problem.samples.initial);
    }
  }
  if (top.has("grid")) c.grid = read_grid(top.at("grid"), "grid");
  if (top.has("network")) {
    const Section s(top.at("network"), "network", {"hidden"});
    if (s.has("hidden")) {
      const json& a = s.at("hidden");
      if (!a.is_array()) throw ConfigError("network.hidden: expected an array of integers");
      c.hidden.clear();
      for (const json& v : a) {
        if (!v.is_number_integer()) throw ConfigError("network.hidden: expected an array of integers");
        c.hidden.push_back(v.get<int>());
      }
    }
  }
  if (top.has("track")) {
    const Section s(top.at("track"), "track",
                    {"knots", "initial_base", "initial_increment", "tv_scale", "weighting", "step_scale", "epsilon"});
    s.integer("knots", c.track.knots);
    s.number("initial_base", c.track.initial_base);
    s.number("initial_increment", c.track.initial_increment);
    s.number("tv_scale", c.track.tv_scale);
    s.number("step_scale", c.track_step_scale);
    if (s.has("epsilon")) {
      double e = 0.0;
      s.number("epsilon", e);
      c.track.epsilon = e;
    }
    if (s.has("weighting")) {
      std::string w;
      s.string("weighting", w);
      c.track.weighting = parse_weighting(w);
    }
  }
  if (top.has("online")) {
    const Section s(top.at("online"), "online", {"eta", "w0", "batches", "epochs", "adaptive"});
    s.number("eta", c.online.eta);
    if (s.has("w0")) {
      std::vector<double> w;
      s.numbers("w0", w);
      if (w.size() != 3) throw ConfigError("online.w0: expected three weights");
      std::copy(w.begin(), w.end(), c.online.w0.begin());
    }
    s.integer("batches", c.online.batches);
    s.integer("epochs", c.online.epochs);
    s.boolean("adaptive", c.online.adaptive);
  }
  if (top.has("optimizer")) {
    const Section s(top.at("optimizer"), "optimizer", kAdamKeys);
    read_adam(s, c.optimizer);
  }
  if (top.has("extraction")) {
    const Section s(top.at("extraction"), "extraction", {"threshold", "relative", "dead_band", "refit"});
    if (s.has("threshold")) {
      double t = 0.0;
      s.number("threshold", t);
      c.extraction.threshold = t;
    }
    s.number("relative", c.extraction.relative);
    s.number("dead_band", c.extraction.dead_band);
    if (s.has("refit")) {
      const Section r(s.at("refit"), "extraction.refit", with(kAdamKeys, {"enabled"}));
      r.boolean("enabled", c.refit.enabled);
      read_adam(r, c.refit.adam);
    }
  }
  if (top.has("seed")) {
    const json& s = top.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("seed: expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  c.validate();
  return c;
}

json config_to_json(const TrainConfig& c) {
  json refit = adam_to_json(c.refit.adam);
  refit["enabled"] = c.refit.enabled;
  return {
      {"problem",
       {{"variant", pinn::to_string(c.problem.variant)},
        {"data", c.problem.data_path},
        {"samples",
         {{"interior", c.problem.samples.interior},
          {"boundary", c.problem.samples.boundary},
          {"initial", c.problem.samples.initial}}},
        {"include_interior_data", c.problem.include_interior_data},
        {"y_range", {c.problem.y_lo, c.problem.y_hi}}}},
      {"grid", grid_to_json(c.grid)},
      {"network", {{"hidden", c.hidden}}},
      {"track",
       {{"knots", c.track.knots},
        {"initial_base", c.track.initial_base},
        {"initial_increment", c.track.initial_increment},
        {"tv_scale", c.track.tv_scale},
        {"weighting", weighting_name(c.track.weighting)},
        {"step_scale", c.track_step_scale},
        {"epsilon", c.track.epsilon ? json(*c.track.epsilon) : json(nullptr)}}},
      {"online",
       {{"eta", c.online.eta},
        {"w0", c.online.w0},
        {"batches", c.online.batches},
        {"epochs", c.online.epochs},
        {"adaptive", c.online.adaptive}}},
      {"optimizer", adam_to_json(c.optimizer)},
      {"extraction",
       {{"threshold", c.extraction.threshold ? json(*c.extraction.threshold) : json(nullptr)},
        {"relative", c.extraction.relative},
        {"dead_band", c.extraction.dead_band},
        {"refit", refit}}},
      {"seed", c.seed},
  };
}

namespace {

// 1-based line of the first occurrence of "key" in the source text.
int line_of_key(const std::string& text, const std::string& key) {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

}  // namespace

TrainConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto byte = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
    throw ConfigError(path.string() + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const ConfigError& e) {
    // Point at the line of the last path component named in the message.
    const std::string msg = e.what();
    int line = 0;
    const auto colon = msg.find(':');
    if (colon != std::string::npos) {
      std::string key = msg.substr(0, colon);
      if (const auto q = msg.find("unknown key \""); q != std::string::npos) {
        key = msg.substr(q + 13, msg.find('"', q + 13) - (q + 13));
      } else if (const auto dot = key.rfind('.'); dot != std::string::npos) {
        key = key.substr(dot + 1);
      }
      line = line_of_key(text, key);
    }
    throw ConfigError(path.string() + ":" + (line > 0 ? std::to_string(line) + ":" : std::string()) + " " + msg);
  }
}

}  // namespace cptv::harness
