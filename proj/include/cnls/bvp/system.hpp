#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cnls/bvp/solution.hpp"
#include "cnls/errors.hpp"

namespace cnls::bvp {

/// Integrand of an integral condition. `ref` is the reference state at the
/// same x (empty when the condition does not use a reference).
struct IntegralCondition {
  std::string name;
  std::function<double(double x, const Eigen::VectorXd& u, const Eigen::VectorXd& ref,
                       const Eigen::VectorXd& p)>
      integrand;
  std::function<Eigen::VectorXd(double x, const Eigen::VectorXd& u, const Eigen::VectorXd& ref,
                                const Eigen::VectorXd& p)>
      grad_state;
  // optional; gradient of the integrand with respect to all parameters
  std::function<Eigen::VectorXd(double x, const Eigen::VectorXd& u, const Eigen::VectorXd& ref,
                                const Eigen::VectorXd& p)>
      grad_params;
  int subtract_parameter = -1;  // residual = integral - p[subtract_parameter]
  bool uses_reference = false;
};

/// Two-point BVP u' = f(x, u, p) with separated or mixed boundary conditions
/// g(u(x-), u(x+), p) = 0 and integral conditions. Parameter vectors always
/// carry every parameter of `parameter_names`; `free_parameters` lists the
/// ones Newton solves for at fixed principal parameter.
struct BvpSystem {
  std::string name;
  int state_dim = 0;
  std::vector<std::string> parameter_names;
  std::vector<std::string> free_parameters;

  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&)> rhs;
  std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&)> rhs_jac_state;
  std::function<Eigen::MatrixXd(double, const Eigen::VectorXd&, const Eigen::VectorXd&)> rhs_jac_params;

  int bc_count = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&)> bc;
  // Jacobian of bc with respect to [u(x-), u(x+), p] as one bc_count x (2n + P) matrix
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&, const Eigen::VectorXd&, const Eigen::VectorXd&)> bc_jac;

  std::vector<IntegralCondition> integral_conditions;
  std::shared_ptr<const CollocationSolution> reference;

  int parameter_count() const { return static_cast<int>(parameter_names.size()); }
  int ic_count() const { return static_cast<int>(integral_conditions.size()); }

  int parameter_index(const std::string& n) const {
    for (int i = 0; i < parameter_count(); ++i)
      if (parameter_names[i] == n) return i;
    throw DimensionError(name + ": unknown parameter '" + n + "'");
  }

  std::vector<int> free_indices() const {
    std::vector<int> idx;
    for (const auto& f : free_parameters) idx.push_back(parameter_index(f));
    return idx;
  }

  ParameterSet make_parameters() const { return ParameterSet(parameter_names); }

  /// Checks the condition count n_bc + n_ic = n + n_free and that every
  /// callback is present.
  void validate() const {
    if (state_dim <= 0) throw DimensionError(name + ": state_dim must be positive");
    if (!rhs || !rhs_jac_state || !rhs_jac_params || !bc || !bc_jac)
      throw DimensionError(name + ": missing callback");
    for (const auto& ic : integral_conditions) {
      if (!ic.integrand || !ic.grad_state) throw DimensionError(name + ": incomplete integral condition");
      if (ic.uses_reference && !reference)
        throw DimensionError(name + ": integral condition '" + ic.name + "' needs a reference");
    }
    (void)free_indices();
    const int conditions = bc_count + ic_count();
    const int unknowns = state_dim + static_cast<int>(free_parameters.size());
    if (conditions != unknowns)
      throw DimensionError(name + ": " + std::to_string(bc_count) + " boundary + " +
                           std::to_string(ic_count()) + " integral conditions != " +
                           std::to_string(state_dim) + " states + " +
                           std::to_string(free_parameters.size()) + " free parameters");
  }

  void check_solution(const CollocationSolution& sol) const {
    sol.validate();
    if (sol.state_dim != state_dim) throw DimensionError(name + ": state_dim mismatch");
    if (sol.parameters.size() != parameter_count())
      throw DimensionError(name + ": parameter vector size mismatch");
  }
};

}  // namespace cnls::bvp
