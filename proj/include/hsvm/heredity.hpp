#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hsvm {

enum class HeredityPolicy { none, weak, strong };

const char* to_string(HeredityPolicy policy);
HeredityPolicy parse_policy(const std::string& name);

/// Parent sets D_j over effect ids, plus the policy a fit should enforce.
struct HeredityGraph {
  std::vector<std::vector<std::size_t>> parents;
  HeredityPolicy policy = HeredityPolicy::none;

  std::size_t size() const { return parents.size(); }
};

struct GraphDiagnostics {
  bool valid = true;
  std::vector<std::string> problems;

  explicit operator bool() const { return valid; }
};

/// Acyclic and every parent reference resolves. Never throws.
GraphDiagnostics validate_heredity_graph(const HeredityGraph& graph);

/// Selection-level check on an active set: strong needs every parent of an
/// active effect active, weak needs at least one. Parentless effects always
/// pass. Policy none is vacuous.
bool obeys_heredity(const HeredityGraph& graph, const std::vector<bool>& active,
                    HeredityPolicy policy);

/// Numerical check on scaling parameters.
///   strong: theta_j > tol  =>  min_{r in D_j} theta_r >= theta_j - tol
///   weak:   theta_j <= sum_{r in D_j} theta_r + tol
std::size_t count_heredity_violations(const HeredityGraph& graph, const Eigen::VectorXd& theta,
                                      HeredityPolicy policy, double tol = 1e-8);

}  // namespace hsvm
