#include "cptv/reference/sampling.hpp"

#include "cptv/errors.hpp"
#include "cptv/io/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <string>

namespace cptv::ref {

std::vector<pinn::TrainingBatch> sample_training_data(const ReferenceSolution& sol, const SampleCounts& counts,
                                                      int n_batches, std::uint64_t seed) {
  if (counts.interior < 1 || counts.boundary < 1 || counts.initial < 1)
    throw ConfigError("sample_training_data: every point count must be >= 1");
  if (n_batches < 1) throw ConfigError("sample_training_data: n_batches must be >= 1");

  const double x_lo = sol.x_lo();
  const double x_hi = sol.x_hi();
  const double horizon = sol.horizon();
  const double width = (x_hi - x_lo) / n_batches;
  const double hx = (x_hi - x_lo) / static_cast<double>(sol.x.size() - 1);
  if (width < 2.0 * hx)
    throw ConfigError("sample_training_data: " + std::to_string(n_batches) + " slabs are too narrow for a grid of " +
                      std::to_string(sol.x.size()) + " columns");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Times in (0, T].
  auto draw_time = [&] { return horizon * (1.0 - unit(rng)); };

  std::vector<pinn::TrainingBatch> batches;
  for (int k = 0; k < n_batches; ++k) {
    pinn::TrainingBatch b;
    b.index = k;
    b.slab = k;
    b.slab_lo = x_lo + k * width;
    b.slab_hi = k + 1 == n_batches ? x_hi : x_lo + (k + 1) * width;

    b.interior.coords.resize(2, counts.interior);
    b.interior.targets.resize(1, counts.interior);
    for (int i = 0; i < counts.interior; ++i) {
      double x = b.slab_lo + (b.slab_hi - b.slab_lo) * unit(rng);
      // Interior points stay off the walls.
      if (x <= x_lo) x = x_lo + 0.5 * hx;
      const double t = draw_time();
      b.interior.coords(0, i) = x;
      b.interior.coords(1, i) = t;
      b.interior.targets(0, i) = sol.interpolate(x, t);
    }

    b.boundary.coords.resize(2, counts.boundary);
    b.boundary.targets.resize(1, counts.boundary);
    for (int i = 0; i < counts.boundary; ++i) {
      const double x = i % 2 == 0 ? x_lo : x_hi;
      const double t = draw_time();
      b.boundary.coords(0, i) = x;
      b.boundary.coords(1, i) = t;
      b.boundary.targets(0, i) = sol.interpolate(x, t);
    }

    b.initial.coords.resize(2, counts.initial);
    b.initial.targets.resize(1, counts.initial);
    for (int i = 0; i < counts.initial; ++i) {
      const double x = b.slab_lo + (b.slab_hi - b.slab_lo) * unit(rng);
      b.initial.coords(0, i) = x;
      b.initial.coords(1, i) = 0.0;
      b.initial.targets(0, i) = sol.interpolate(x, 0.0);
    }
    batches.push_back(std::move(b));
  }
  return batches;
}

void write_solution_csv(const ReferenceSolution& sol, const std::filesystem::path& path) {
  io::CsvWriter out(path, {"t", "x", "u"});
  for (Eigen::Index n = 0; n < sol.t.size(); ++n)
    for (Eigen::Index i = 0; i < sol.x.size(); ++i) out.row({sol.t(n), sol.x(i), sol.u(n, i)});
}

ReferenceSolution read_solution_csv(const std::filesystem::path& path) {
  const io::CsvTable table = io::read_csv(path, {"t", "x", "u"});
  std::map<double, std::size_t> times;
  std::map<double, std::size_t> xs;
  for (const auto& r : table.rows) {
    times.try_emplace(r[0], 0);
    xs.try_emplace(r[1], 0);
  }
  if (times.size() < 2 || xs.size() < 3) throw ConfigError(path.string() + ": solution grid needs >= 2 times and >= 3 x nodes");
  if (times.size() * xs.size() != table.rows.size())
    throw ConfigError(path.string() + ": rows do not form a complete t-x grid");
  ReferenceSolution sol;
  sol.t.resize(static_cast<Eigen::Index>(times.size()));
  sol.x.resize(static_cast<Eigen::Index>(xs.size()));
  std::size_t idx = 0;
  for (auto& [t, slot] : times) {
    slot = idx;
    sol.t(static_cast<Eigen::Index>(idx++)) = t;
  }
  idx = 0;
  for (auto& [x, slot] : xs) {
    slot = idx;
    sol.x(static_cast<Eigen::Index>(idx++)) = x;
  }
  if (sol.t(0) != 0.0) throw ConfigError(path.string() + ": solution grid must start at t = 0");
  sol.u = Matrix::Constant(sol.t.size(), sol.x.size(), std::nan(""));
  for (const auto& r : table.rows)
    sol.u(static_cast<Eigen::Index>(times.at(r[0])), static_cast<Eigen::Index>(xs.at(r[1]))) = r[2];
  if (!sol.u.allFinite()) throw ConfigError(path.string() + ": duplicate or missing grid rows");
  return sol;
}

pinn::PointSet read_flow_csv(const std::filesystem::path& path) {
  const io::CsvTable table = io::read_csv(path, {"t", "x", "y", "u", "v", "p"});
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  pinn::PointSet out;
  out.coords.resize(3, n);
  out.targets.resize(3, n);
  for (Eigen::Index c = 0; c < n; ++c) {
    const auto& r = table.rows[static_cast<std::size_t>(c)];
    out.coords.col(c) << r[1], r[2], r[0];
    out.targets.col(c) << r[3], r[4], r[5];
  }
  return out;
}

std::vector<pinn::TrainingBatch> partition_points(const pinn::PointSet& points, double x_lo, double x_hi,
                                                  int n_batches) {
  if (n_batches < 1) throw ConfigError("partition_points: n_batches must be >= 1");
  const double width = (x_hi - x_lo) / n_batches;
  std::vector<std::vector<Eigen::Index>> members(static_cast<std::size_t>(n_batches));
  for (Eigen::Index c = 0; c < points.size(); ++c) {
    const double x = points.coords(0, c);
    if (x < x_lo || x > x_hi) throw DomainError("partition_points: sample outside spatial domain");
    const int k = std::min(n_batches - 1, static_cast<int>((x - x_lo) / width));
    members[static_cast<std::size_t>(k)].push_back(c);
  }
  std::vector<pinn::TrainingBatch> out;
  for (int k = 0; k < n_batches; ++k) {
    const auto& idx = members[static_cast<std::size_t>(k)];
    if (idx.empty()) throw ConfigError("partition_points: slab " + std::to_string(k) + " holds no samples");
    pinn::TrainingBatch b;
    b.index = k;
    b.slab = k;
    b.slab_lo = x_lo + k * width;
    b.slab_hi = k + 1 == n_batches ? x_hi : x_lo + (k + 1) * width;
    b.interior.coords.resize(points.coords.rows(), static_cast<Eigen::Index>(idx.size()));
    b.interior.targets.resize(points.targets.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
      b.interior.coords.col(static_cast<Eigen::Index>(i)) = points.coords.col(idx[i]);
      b.interior.targets.col(static_cast<Eigen::Index>(i)) = points.targets.col(idx[i]);
    }
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace cptv::ref
