#pragma once

#include "cptv/pinn/problem.hpp"
#include "cptv/reference/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace cptv::ref {

struct SampleCounts {
  int interior = 500;  // per batch
  int boundary = 100;  // per batch, split over both walls
  int initial = 100;   // per batch, inside the batch's slab
};

// Cuts [x_lo, x_hi] into `n_batches` equal contiguous slabs. Each batch gets
// interior points drawn uniformly over its slab x (0, T], initial points
// uniformly over its slab at t = 0, and wall points uniformly in time on both
// walls. Values come from bilinear interpolation of the grid solution.
std::vector<pinn::TrainingBatch> sample_training_data(const ReferenceSolution& sol, const SampleCounts& counts,
                                                      int n_batches, std::uint64_t seed);

// "t,x,u" rows, one per grid node, time-major.
void write_solution_csv(const ReferenceSolution& sol, const std::filesystem::path& path);
// Rebuilds the tensor grid from a "t,x,u" file. Lambda segments are not stored
// in the file and are left empty.
ReferenceSolution read_solution_csv(const std::filesystem::path& path);

// Externally produced Navier-Stokes samples, header "t,x,y,u,v,p".
// Returns coordinates (x, y, t) and targets (u, v, p).
pinn::PointSet read_flow_csv(const std::filesystem::path& path);

// Splits scattered samples into spatial slabs spanning all times.
std::vector<pinn::TrainingBatch> partition_points(const pinn::PointSet& points, double x_lo, double x_hi,
                                                  int n_batches);

}  // namespace cptv::ref
