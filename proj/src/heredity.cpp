#include "hsvm/heredity.hpp"

#include <algorithm>

#include "hsvm/error.hpp"

namespace hsvm {

const char* to_string(HeredityPolicy policy) {
  switch (policy) {
    case HeredityPolicy::none:
      return "none";
    case HeredityPolicy::weak:
      return "weak";
    case HeredityPolicy::strong:
      return "strong";
  }
  return "none";
}

HeredityPolicy parse_policy(const std::string& name) {
  if (name == "none") return HeredityPolicy::none;
  if (name == "weak") return HeredityPolicy::weak;
  if (name == "strong") return HeredityPolicy::strong;
  throw ConfigError("unknown heredity policy '" + name + "'");
}

GraphDiagnostics validate_heredity_graph(const HeredityGraph& graph) {
  GraphDiagnostics diag;
  const std::size_t n = graph.size();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t r : graph.parents[j]) {
      if (r >= n) {
        diag.valid = false;
        diag.problems.push_back("effect " + std::to_string(j) + " lists unknown parent " +
                                std::to_string(r));
      }
    }
  }
  if (!diag.valid) return diag;

  // Kahn's algorithm over parent -> child edges.
  std::vector<std::size_t> pending(n, 0);
  std::vector<std::vector<std::size_t>> children(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t r : graph.parents[j]) {
      children[r].push_back(j);
      ++pending[j];
    }
  }
  std::vector<std::size_t> ready;
  for (std::size_t j = 0; j < n; ++j) {
    if (pending[j] == 0) ready.push_back(j);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    const std::size_t j = ready.back();
    ready.pop_back();
    ++visited;
    for (std::size_t c : children[j]) {
      if (--pending[c] == 0) ready.push_back(c);
    }
  }
  if (visited != n) {
    diag.valid = false;
    for (std::size_t j = 0; j < n; ++j) {
      if (pending[j] > 0) diag.problems.push_back("effect " + std::to_string(j) + " lies on a cycle");
    }
  }
  return diag;
}

bool obeys_heredity(const HeredityGraph& graph, const std::vector<bool>& active,
                    HeredityPolicy policy) {
  if (active.size() != graph.size()) {
    throw DimensionMismatch("active set has " + std::to_string(active.size()) +
                            " flags for " + std::to_string(graph.size()) + " effects");
  }
  if (policy == HeredityPolicy::none) return true;
  for (std::size_t j = 0; j < graph.size(); ++j) {
    const auto& parents = graph.parents[j];
    if (!active[j] || parents.empty()) continue;
    const auto is_active = [&](std::size_t r) { return bool(active[r]); };
    if (policy == HeredityPolicy::strong && !std::all_of(parents.begin(), parents.end(), is_active)) {
      return false;
    }
    if (policy == HeredityPolicy::weak && std::none_of(parents.begin(), parents.end(), is_active)) {
      return false;
    }
  }
  return true;
}

std::size_t count_heredity_violations(const HeredityGraph& graph, const Eigen::VectorXd& theta,
                                      HeredityPolicy policy, double tol) {
  if (static_cast<std::size_t>(theta.size()) != graph.size()) {
    throw DimensionMismatch("theta has " + std::to_string(theta.size()) + " entries for " +
                            std::to_string(graph.size()) + " effects");
  }
  std::size_t violations = 0;
  for (std::size_t j = 0; j < graph.size(); ++j) {
    const auto& parents = graph.parents[j];
    if (parents.empty()) continue;
    const double tj = theta[static_cast<Eigen::Index>(j)];
    if (policy == HeredityPolicy::strong && tj > tol) {
      for (std::size_t r : parents) {
        if (theta[static_cast<Eigen::Index>(r)] < tj - tol) {
          ++violations;
          break;
        }
      }
    } else if (policy == HeredityPolicy::weak) {
      double total = 0.0;
      for (std::size_t r : parents) total += theta[static_cast<Eigen::Index>(r)];
      if (tj > total + tol) ++violations;
    }
  }
  return violations;
}

}  // namespace hsvm
