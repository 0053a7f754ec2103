#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace usergraph {

// Adam with bias correction. One state instance covers a fixed-order list
// of parameter tensors; moments are allocated lazily on the first step.
struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  long step = 0;
  std::vector<Eigen::MatrixXd> m, v;
};

// params[i] -= lr * m_hat / (sqrt(v_hat) + eps). Throws on shape mismatch
// between params, grads and previously seen shapes.
void adam_step(std::span<Eigen::MatrixXd* const> params,
               std::span<const Eigen::MatrixXd* const> grads,
               AdamState& state, double lr);

}  // namespace usergraph
