#pragma once

#include <Eigen/Core>

#include <optional>
#include <ostream>
#include <vector>

#include "igo/model.hpp"

namespace igo {

/// Exact hybrid trajectory: jump times with pre/post states, and optional
/// dense samples between jumps. For n fired jumps, jump_times and
/// pre_jump_states carry n+1 entries (the last one is the state at which
/// the next jump would fire); post_jump_states and jump_weights carry n.
struct Trajectory {
  std::vector<double> jump_times;
  std::vector<Eigen::VectorXd> pre_jump_states;
  std::vector<Eigen::VectorXd> post_jump_states;
  std::vector<double> jump_weights;

  struct Sample {
    double t = 0.0;
    Eigen::VectorXd x;
  };
  std::vector<Sample> dense_samples;
};

struct UltimateBounds {
  Eigen::VectorXd v;  // componentwise asymptotic lower bounds
  Eigen::VectorXd h;  // componentwise asymptotic upper bounds
};

/// Flows x(t) = e^{(t - t_n) A} x(t_n^+) between jumps (matrix exponential,
/// no stepping error) and applies x(t_n^+) = X_n + F(C X_n) B at jumps with
/// T_n = Phi(C X_n). Dense samples, when requested, are anchored at each
/// post-jump state at multiples of dense_dt inside the interval.
Trajectory simulate(const IgoModel& model, const Eigen::VectorXd& x0,
                    int n_jumps, std::optional<double> dense_dt = {});

/// X_0, ..., X_n under repeated application of the return map; identical to
/// the pre-jump states of simulate.
std::vector<Eigen::VectorXd> iterate_return_map(const IgoModel& model,
                                                const Eigen::VectorXd& x0,
                                                int n);

/// V_1 = F1/(e^{a_1 Phi2} - 1), H_1 = F2/(1 - e^{-a_1 Phi1}), then
/// V_i = (g_{i-1}/a_i) V_{i-1} and likewise for H.
UltimateBounds ultimate_bounds(const IgoModel& model);

/// CSV rows `t,event,x1,...,xm,y` with event in {pre_jump, post_jump,
/// dense}, full double precision.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

}  // namespace igo
