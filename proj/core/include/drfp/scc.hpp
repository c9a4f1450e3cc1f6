#pragma once

#include <vector>

namespace drfp {

struct SccResult {
  int count = 0;
  std::vector<int> component;  // component id per vertex
};

// Tarjan's algorithm, iterative. `adjacency[v]` lists successors of v.
SccResult strongly_connected_components(const std::vector<std::vector<int>>& adjacency);

}  // namespace drfp
