// Per-round observation records produced by the engine.
#pragma once

#include <cstdint>
#include <vector>

namespace rgossip {

using NodeId = uint32_t;

struct PullEdge {
  NodeId puller = 0;
  NodeId target = 0;
  double delivered_value = 0.0;
  bool corrupted = false;

  bool operator==(const PullEdge&) const = default;
};

// Statistics of the value snapshot at the END of a round. min/max/phi/psi are
// always filled; median and the below/inside/above window counts only when
// rank summaries are enabled for this n (has_rank_stats).
struct RoundSummary {
  double min = 0.0;
  double max = 0.0;
  double phi = 0.0;  // n * sum(x^2) - (sum x)^2, the pairwise spread potential
  double psi = 0.0;  // sum of values
  bool has_rank_stats = false;
  double median = 0.0;
  uint64_t l_size = 0;  // strictly below the target rank window
  uint64_t m_size = 0;  // inside the window
  uint64_t h_size = 0;  // strictly above

  bool operator==(const RoundSummary&) const = default;
};

struct RoundTrace {
  int round_index = 0;
  std::vector<NodeId> corrupted_set;  // sorted, at most floor(beta*n) ids
  bool edges_recorded = false;
  std::vector<PullEdge> edges;        // only at trace level `edges` and small n
  RoundSummary summary;

  bool operator==(const RoundTrace&) const = default;
};

struct TraceOptions {
  enum class Level { summary, edges };
  Level level = Level::summary;
  // Edge lists blow up quadratically in memory terms; above this n they are
  // elided even at level `edges`.
  uint64_t edge_threshold = 100000;
  // Per-round median and window counts cost a sort-select pass; above this n
  // they are skipped (final-snapshot statistics are always computed by the
  // evaluation layer regardless).
  uint64_t rank_stat_threshold = 200000;
};

} // namespace rgossip
