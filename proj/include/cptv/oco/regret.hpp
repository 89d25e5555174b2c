#pragma once

#include "cptv/oco/weights.hpp"

#include <filesystem>
#include <vector>

namespace cptv::oco {

// Per-batch losses and the weights produced from them.
struct RegretRecord {
  std::vector<LossVector> losses;
  std::vector<SimplexWeights> weights;

  void push(const LossVector& l, const SimplexWeights& w);
  [[nodiscard]] std::size_t size() const { return losses.size(); }
  // Largest l1 norm of a recorded loss vector.
  [[nodiscard]] double max_l1() const;
  void validate() const;
};

struct FixedComparator {
  int vertex = 0;  // index of the loss channel carrying all the weight
  double value = 0.0;
};

// Best fixed weights in hindsight. The cumulative loss is linear in w, so the
// minimum over the closed simplex sits at a vertex.
FixedComparator best_fixed_weights(const RegretRecord& record);

// Sum_k <L_k, w_k> minus the best fixed cumulative loss.
double regret(const RegretRecord& record);

// log(3) / eta + eta * batches * g^2.
double regret_bound(double eta, long long batches, double g);

// sqrt(log 3) / (g sqrt(batches)), the minimizer of regret_bound in eta.
double optimal_eta(long long batches, double g);

// CSV with columns batch,L_f,L_s,V_lambda,w1,w2,w3,gamma. The learning rate
// is not stored; `eta` fills SimplexWeights::eta on read.
void write_record_csv(const RegretRecord& record, const std::filesystem::path& path);
RegretRecord read_record_csv(const std::filesystem::path& path, double eta);

}  // namespace cptv::oco
