#include "usergraph/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace usergraph {

void adam_step(std::span<Eigen::MatrixXd* const> params,
               std::span<const Eigen::MatrixXd* const> grads,
               AdamState& state, double lr) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("adam_step: params/grads tensor count mismatch");
  }
  if (state.m.empty()) {
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const auto* p : params) {
      state.m.emplace_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
      state.v.emplace_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
    }
  }
  if (state.m.size() != params.size()) {
    throw std::invalid_argument("adam_step: state tensor count mismatch");
  }

  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));

  for (std::size_t i = 0; i < params.size(); ++i) {
    Eigen::MatrixXd& p = *params[i];
    const Eigen::MatrixXd& g = *grads[i];
    if (p.rows() != g.rows() || p.cols() != g.cols() ||
        p.rows() != state.m[i].rows() || p.cols() != state.m[i].cols()) {
      throw std::invalid_argument("adam_step: tensor shape mismatch at index " +
                                  std::to_string(i));
    }
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i].array().matrix() +
                 (1.0 - state.beta2) * g.array().square().matrix();
    const auto m_hat = state.m[i].array() / bc1;
    const auto v_hat = state.v[i].array() / bc2;
    p.array() -= lr * m_hat / (v_hat.sqrt() + state.eps);
  }
}

}  // namespace usergraph
