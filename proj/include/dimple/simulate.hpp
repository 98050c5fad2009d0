#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dimple/network.hpp"

// Monte Carlo sweeps: generate -> sample -> fit -> score, replicated over one
// swept parameter.  Replicate (value v, repeat r) draws every seed from a
// substream of (grid seed, v, r), so results are bit-identical for any worker
// count and any execution order; failed replicates are counted and excluded
// from the aggregates.

namespace dimple {

enum class SweepAxis { nodes, layers, strength };

struct ExperimentGrid {
  ModelKind model = ModelKind::block;
  DimpleConfig base;            // swept field is overwritten per value
  SweepAxis axis = SweepAxis::nodes;
  std::vector<double> values;   // sweep values (node/layer counts or strengths)
  int replicates = 100;
  std::uint64_t seed = 0;
  std::vector<std::string> metrics;  // subset of r_bl, r_wl, r_s_ave, r_s_max
  bool noiseless = false;       // fit exact probability layers instead of samples

  void validate() const;
};

struct GridCell {
  double value = 0.0;
  std::string metric;
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation over successful replicates
  int replicates = 0;   // requested
  int failed = 0;       // replicates that raised an error
};

struct GridResult {
  std::vector<GridCell> cells;  // grouped by sweep value, metrics in grid order
};

// text key/value grid description (see load_grid in io formats); '#' comments
ExperimentGrid load_grid(const std::string& path);

GridResult run_grid(const ExperimentGrid& grid, int workers);

// deterministic CSV: model,axis,value,metric,mean,std,replicates,failed
std::string grid_csv(const GridResult& result, const ExperimentGrid& grid);

std::string axis_name(SweepAxis axis);

}  // namespace dimple
