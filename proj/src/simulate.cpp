#include "igo/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "igo/cycles.hpp"
#include "igo/matfun.hpp"

namespace igo {

namespace {

// Exponentials keyed by elapsed time; constant-Phi runs reuse one entry.
class ExpCache {
 public:
  explicit ExpCache(const Eigen::MatrixXd& a) : a_(a) {}

  const Eigen::MatrixXd& at(double t) {
    auto it = cache_.find(t);
    if (it == cache_.end())
      it = cache_.emplace(t, matrix_exponential(t * a_)).first;
    return it->second;
  }

 private:
  const Eigen::MatrixXd& a_;
  std::map<double, Eigen::MatrixXd> cache_;
};

void append_row(std::ostream& out, double t, const char* event,
                const Eigen::VectorXd& x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  out << buf << ',' << event;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", x[i]);
    out << ',' << buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", x[x.size() - 1]);
  out << ',' << buf << '\n';
}

}  // namespace

Trajectory simulate(const IgoModel& model, const Eigen::VectorXd& x0,
                    int n_jumps, std::optional<double> dense_dt) {
  if (n_jumps < 1) throw std::invalid_argument("simulate: n_jumps must be >= 1");
  if (x0.size() != model.m)
    throw std::invalid_argument("simulate: x0 dimension mismatch");
  if ((x0.array() < 0).any())
    throw std::invalid_argument("simulate: x0 must be entrywise >= 0");
  if (dense_dt && !(*dense_dt > 0))
    throw std::invalid_argument("simulate: dense_dt must be > 0");

  const StateSpace space = build_state_space(model);
  ExpCache cache(space.A);

  Trajectory traj;
  traj.jump_times.reserve(n_jumps + 1);
  traj.pre_jump_states.reserve(n_jumps + 1);
  traj.post_jump_states.reserve(n_jumps);
  traj.jump_weights.reserve(n_jumps);

  double t = 0.0;
  Eigen::VectorXd state = x0;
  for (int n = 0; n < n_jumps; ++n) {
    traj.jump_times.push_back(t);
    traj.pre_jump_states.push_back(state);

    const double y = space.C * state;
    const double lambda = model.f.value(y);
    const double period = model.phi.value(y);
    const Eigen::VectorXd post = state + lambda * space.B;
    traj.jump_weights.push_back(lambda);
    traj.post_jump_states.push_back(post);

    if (dense_dt) {
      for (int j = 1; j * *dense_dt < period * (1.0 - 1e-12); ++j) {
        const double s = j * *dense_dt;
        traj.dense_samples.push_back({t + s, cache.at(s) * post});
      }
    }

    state = cache.at(period) * post;
    t += period;
  }
  traj.jump_times.push_back(t);
  traj.pre_jump_states.push_back(state);
  return traj;
}

std::vector<Eigen::VectorXd> iterate_return_map(const IgoModel& model,
                                                const Eigen::VectorXd& x0,
                                                int n) {
  if (n < 0) throw std::invalid_argument("iterate_return_map: n must be >= 0");
  std::vector<Eigen::VectorXd> states;
  states.reserve(n + 1);
  states.push_back(x0);
  for (int i = 0; i < n; ++i) states.push_back(return_map(model, states.back()));
  return states;
}

UltimateBounds ultimate_bounds(const IgoModel& model) {
  build_state_space(model);  // parameter validation
  UltimateBounds b;
  b.v.resize(model.m);
  b.h.resize(model.m);
  b.v[0] = model.f.lo / std::expm1(model.a[0] * model.phi.hi);
  b.h[0] = model.f.hi / -std::expm1(-model.a[0] * model.phi.lo);
  for (int i = 1; i < model.m; ++i) {
    const double ratio = model.g[i - 1] / model.a[i];
    b.v[i] = ratio * b.v[i - 1];
    b.h[i] = ratio * b.h[i - 1];
  }
  return b;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  const Eigen::Index m = trajectory.pre_jump_states.front().size();
  out << "t,event";
  for (Eigen::Index i = 1; i <= m; ++i) out << ",x" << i;
  out << ",y\n";

  std::size_t dense_idx = 0;
  const std::size_t jumps = trajectory.post_jump_states.size();
  for (std::size_t n = 0; n <= jumps; ++n) {
    const double t = trajectory.jump_times[n];
    append_row(out, t, "pre_jump", trajectory.pre_jump_states[n]);
    if (n == jumps) break;
    append_row(out, t, "post_jump", trajectory.post_jump_states[n]);
    const double t_next = trajectory.jump_times[n + 1];
    while (dense_idx < trajectory.dense_samples.size() &&
           trajectory.dense_samples[dense_idx].t < t_next) {
      const auto& s = trajectory.dense_samples[dense_idx++];
      append_row(out, s.t, "dense", s.x);
    }
  }
}

}  // namespace igo
