#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cnls/analytic/formulas.hpp"
#include "cnls/bvp/solution.hpp"

namespace cnls::systems {

/// Index of every physical and auxiliary parameter. All three systems carry
/// the full vector so that branch rows and snapshots share one layout.
enum Param : int { OMEGA = 0, S, BETA1, BETA2, D1, D2, EPS1, EPS2, LAMBDA_R, LAMBDA_I, C1, C2, PARAM_COUNT };

inline const std::vector<std::string>& parameter_names() {
  static const std::vector<std::string> names = {"omega", "s",    "beta1",    "beta2",    "d1", "d2",
                                                 "eps1",  "eps2", "lambda_R", "lambda_I", "c1", "c2"};
  return names;
}

/// Parameter set initialised from the model parameters; auxiliaries zero.
inline bvp::ParameterSet make_parameters(const analytic::ModelParams& model) {
  model.validate();
  bvp::ParameterSet p(parameter_names());
  p[OMEGA] = model.omega;
  p[S] = model.s;
  p[BETA1] = model.beta1;
  p[BETA2] = model.beta2;
  return p;
}

inline analytic::ModelParams model_of(const Eigen::VectorXd& p) {
  return {p[OMEGA], p[S], p[BETA1], p[BETA2]};
}

}  // namespace cnls::systems
