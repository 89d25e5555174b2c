#include "cptv/oco/regret.hpp"

#include "cptv/errors.hpp"
#include "cptv/io/csv.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace cptv::oco {

void RegretRecord::push(const LossVector& l, const SimplexWeights& w) {
  l.validate();
  losses.push_back(l);
  weights.push_back(w);
}

double RegretRecord::max_l1() const {
  double g = 0.0;
  for (const auto& l : losses) g = std::max(g, l.l1_norm());
  return g;
}

void RegretRecord::validate() const {
  if (losses.size() != weights.size()) throw ConfigError("RegretRecord: loss and weight histories differ in length");
  if (losses.empty()) throw ConfigError("RegretRecord: empty history");
}

FixedComparator best_fixed_weights(const RegretRecord& record) {
  record.validate();
  std::array<double, 3> cumulative{};
  for (const auto& l : record.losses) {
    const auto v = l.values();
    for (std::size_t i = 0; i < 3; ++i) cumulative[i] += v[i];
  }
  FixedComparator best{0, cumulative[0]};
  for (int i = 1; i < 3; ++i)
    if (cumulative[static_cast<std::size_t>(i)] < best.value) best = {i, cumulative[static_cast<std::size_t>(i)]};
  return best;
}

double regret(const RegretRecord& record) {
  const FixedComparator best = best_fixed_weights(record);
  double adaptive = 0.0;
  for (std::size_t k = 0; k < record.size(); ++k) adaptive += total_loss(record.losses[k], record.weights[k]);
  return adaptive - best.value;
}

double regret_bound(double eta, long long batches, double g) {
  if (!(eta > 0.0) || batches < 1 || !(g > 0.0)) throw ConfigError("regret_bound: need eta > 0, B >= 1, G > 0");
  return std::log(3.0) / eta + eta * static_cast<double>(batches) * g * g;
}

double optimal_eta(long long batches, double g) {
  if (batches < 1 || !(g > 0.0)) throw ConfigError("optimal_eta: need B >= 1, G > 0");
  return std::sqrt(std::log(3.0)) / (g * std::sqrt(static_cast<double>(batches)));
}

void write_record_csv(const RegretRecord& record, const std::filesystem::path& path) {
  record.validate();
  io::CsvWriter out(path, {"batch", "L_f", "L_s", "V_lambda", "w1", "w2", "w3", "gamma"});
  for (std::size_t k = 0; k < record.size(); ++k) {
    const auto& l = record.losses[k];
    const auto& w = record.weights[k];
    out.row({static_cast<double>(l.batch), l.fitting, l.structure, l.tv, w.w[0], w.w[1], w.w[2], w.gamma});
  }
}

RegretRecord read_record_csv(const std::filesystem::path& path, double eta) {
  const io::CsvTable table = io::read_csv(path, {"batch", "L_f", "L_s", "V_lambda", "w1", "w2", "w3", "gamma"});
  RegretRecord record;
  for (const auto& r : table.rows) {
    LossVector l{r[1], r[2], r[3], static_cast<int>(r[0])};
    SimplexWeights w;
    w.w = {r[4], r[5], r[6]};
    w.gamma = r[7];
    w.eta = eta;
    record.push(l, w);
  }
  record.validate();
  return record;
}

}  // namespace cptv::oco
