#include "ssb/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace ssb {

void GeneratorSpec::validate() const {
  if (!hamiltonian.is_hermitian()) {
    throw std::invalid_argument("GeneratorSpec: Hamiltonian must be Hermitian");
  }
  if (epsilon < 0.0) {
    throw std::invalid_argument("GeneratorSpec: epsilon must be >= 0");
  }
  if (epsilon > 0.0) {
    if (!breaking_field) {
      throw std::invalid_argument(
          "GeneratorSpec: epsilon > 0 requires a breaking field");
    }
    if (!breaking_field->is_hermitian()) {
      throw std::invalid_argument(
          "GeneratorSpec: breaking field must be Hermitian");
    }
    if (breaking_field->dim() != hamiltonian.dim()) {
      throw std::invalid_argument("GeneratorSpec: dimension mismatch");
    }
  }
}

Rhs GeneratorSpec::make_rhs() const {
  validate();
  const LinearOperator h = hamiltonian;
  if (epsilon == 0.0) {
    return [h](double, const Eigen::VectorXcd& y, Eigen::VectorXcd& dydt) {
      dydt.resize(y.size());
      h.apply(y.data(), dydt.data());
      dydt *= Complex(0.0, -1.0);
    };
  }
  const LinearOperator field = *breaking_field;
  const double half_eps = 0.5 * epsilon;
  return [h, field, half_eps, tmp = Eigen::VectorXcd()](
             double, const Eigen::VectorXcd& y,
             Eigen::VectorXcd& dydt) mutable {
    dydt.resize(y.size());
    tmp.resize(y.size());
    h.apply(y.data(), dydt.data());
    field.apply(y.data(), tmp.data());
    dydt = Complex(0.0, -1.0) * dydt + half_eps * tmp;
  };
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                 kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0,
                 kC5 = 8.0 / 9.0;

constexpr double kNormUnderflow = 1e-150;

}  // namespace

long integrate_adaptive(const Rhs& rhs, Eigen::VectorXcd state, double t_final,
                        double record_every, const IntegratorOptions& opts,
                        const SampleObserver& observe) {
  if (!(t_final > 0.0) || !(record_every > 0.0)) {
    throw std::invalid_argument("integrate_adaptive: t_final > 0 required");
  }
  if (!(opts.tolerance > 0.0)) {
    throw std::invalid_argument("integrate_adaptive: bad tolerance");
  }
  const int n = static_cast<int>(state.size());
  const long n_samples = std::max<long>(1, std::lround(t_final / record_every));
  const double dt_sample = t_final / static_cast<double>(n_samples);

  double log_norm = 0.0;
  {
    const double norm0 = state.norm();
    if (norm0 < kNormUnderflow) {
      throw std::runtime_error("integrate_adaptive: initial norm underflow");
    }
    state /= norm0;
    log_norm += std::log(norm0);
  }

  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  Eigen::VectorXcd ytmp(n), ynew(n), errv(n);

  double h = std::min(opts.initial_step, opts.max_step);
  double last_h = h;
  long accepted = 0;

  rhs(0.0, state, k1);
  observe(0.0, state, log_norm, 0.0);

  for (long sample = 0; sample < n_samples; ++sample) {
    const double t_stop = (sample + 1 == n_samples)
                              ? t_final
                              : dt_sample * static_cast<double>(sample + 1);
    double t = dt_sample * static_cast<double>(sample);

    while (t < t_stop) {
      const bool clipped = h > t_stop - t;
      const double h_try = clipped ? t_stop - t : h;
      if (h_try < 1e-13 * std::max(1.0, std::abs(t))) {
        throw std::runtime_error("integrate_adaptive: step size underflow");
      }

      ytmp = state + h_try * (kA21 * k1);
      rhs(t + kC2 * h_try, ytmp, k2);
      ytmp = state + h_try * (kA31 * k1 + kA32 * k2);
      rhs(t + kC3 * h_try, ytmp, k3);
      ytmp = state + h_try * (kA41 * k1 + kA42 * k2 + kA43 * k3);
      rhs(t + kC4 * h_try, ytmp, k4);
      ytmp = state + h_try * (kA51 * k1 + kA52 * k2 + kA53 * k3 + kA54 * k4);
      rhs(t + kC5 * h_try, ytmp, k5);
      ytmp = state +
             h_try * (kA61 * k1 + kA62 * k2 + kA63 * k3 + kA64 * k4 + kA65 * k5);
      rhs(t + h_try, ytmp, k6);
      ynew = state +
             h_try * (kB1 * k1 + kB3 * k3 + kB4 * k4 + kB5 * k5 + kB6 * k6);
      rhs(t + h_try, ynew, k7);
      errv = h_try * (kE1 * k1 + kE3 * k3 + kE4 * k4 + kE5 * k5 + kE6 * k6 +
                      kE7 * k7);

      const double err =
          errv.norm() / (std::max(state.norm(), ynew.norm()) + 1e-30);
      const double target = opts.tolerance * h_try;
      const bool accept = err <= target;

      if (accept) {
        t += h_try;
        const double norm = ynew.norm();
        if (norm < kNormUnderflow) {
          throw std::runtime_error(
              "integrate_adaptive: norm underflow before renormalization");
        }
        state = ynew / norm;
        k1 = k7 / norm;  // FSAL; valid because the flow is linear
        log_norm += std::log(norm);
        last_h = h_try;
        ++accepted;
      }

      // a clipped, accepted step says nothing about the natural step size
      if (!(accept && clipped)) {
        const double grow =
            err > 0.0 ? 0.9 * std::pow(target / err, 0.2) : 5.0;
        h = std::min(opts.max_step,
                     h_try * std::min(5.0, std::max(0.2, grow)));
      }
    }

    observe(t_stop, state, log_norm, last_h);
  }
  return accepted;
}

Trajectory evolve(const StateVector& psi0, const GeneratorSpec& gen,
                  const LinearOperator& order_param, double t_final,
                  double record_every, const IntegratorOptions& opts) {
  gen.validate();
  if (psi0.dim() != gen.hamiltonian.dim() ||
      order_param.dim() != gen.hamiltonian.dim()) {
    throw std::invalid_argument("evolve: dimension mismatch");
  }
  const Rhs rhs = gen.make_rhs();
  Trajectory traj;
  const LinearOperator& h = gen.hamiltonian;
  const BasisPtr basis = psi0.basis_labels;

  traj.total_accepted_steps = integrate_adaptive(
      rhs, psi0.amplitudes, t_final, record_every, opts,
      [&](double t, const Eigen::VectorXcd& y, double log_norm,
          double last_step) {
        StateVector state(basis, y);
        const Complex op = expectation_normalized(state, order_param);
        traj.times.push_back(t);
        traj.op_modulus.push_back(std::abs(op));
        traj.op_phase.push_back(std::arg(op));
        traj.energy.push_back(expectation_normalized(state, h).real());
        traj.log_norm.push_back(log_norm);
        traj.step_sizes.push_back(last_step);
      });
  return traj;
}

std::optional<double> first_crossing(const std::vector<double>& times,
                                     const std::vector<double>& values,
                                     double threshold) {
  if (times.size() != values.size()) {
    throw std::invalid_argument("first_crossing: length mismatch");
  }
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= threshold) {
      if (i == 0) return times[0];
      const double v0 = values[i - 1], v1 = values[i];
      const double f = (threshold - v0) / (v1 - v0);
      return times[i - 1] + f * (times[i] - times[i - 1]);
    }
  }
  return std::nullopt;
}

namespace {

// Cutoff large enough for the initial packet, the stationary packet selected
// by the field, and the transient reshaping (which populates angular momenta
// out to roughly eps*N*t/2 ~ 3*N*sqrt(B) while a displaced packet swings
// around). The edge amplitude is still monitored during the run.
int auto_cutoff(double n_particles, double field_b, double epsilon,
                int requested) {
  const double sigma_init =
      std::sqrt(wavepacket_sigma_m_squared(n_particles, field_b));
  const double sigma_stat =
      std::sqrt(0.5 * n_particles * std::sqrt(0.5 * epsilon));
  const double transient = 3.0 * n_particles * std::sqrt(field_b);
  const int m = static_cast<int>(std::ceil(
                    transient + 10.0 * std::max(sigma_init, sigma_stat))) +
                16;
  return std::max({4, m, requested});
}

void check_edges(const Eigen::VectorXcd& y, double t) {
  const int n = static_cast<int>(y.size());
  const double edge = std::max(std::abs(y(0)), std::abs(y(n - 1)));
  if (edge > 1e-8) {
    throw std::runtime_error(
        "rotor run left the cutoff window at t = " + std::to_string(t) +
        " (edge amplitude " + std::to_string(edge) + ")");
  }
}

// Steady-state order parameter: relative change below 1e-6 across the last
// tenth of the recorded window.
bool op_is_steady(const std::vector<double>& op, double* plateau) {
  const size_t n = op.size();
  if (n < 20) return false;
  const size_t window = n / 10;
  double lo = op[n - window], hi = op[n - window];
  for (size_t i = n - window; i < n; ++i) {
    lo = std::min(lo, op[i]);
    hi = std::max(hi, op[i]);
  }
  *plateau = op.back();
  return hi - lo <= 1e-6 * std::max(hi, 1e-30);
}

}  // namespace

CollapseResult collapse_time(const RotorModel& params, double epsilon,
                             double gamma, const CollapseOptions& opts) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("collapse_time: epsilon must be > 0");
  }
  RotorModel p = params;
  p.field_b = 0.0;  // symmetric Hamiltonian; only the non-unitary field acts
  p.epsilon = epsilon;
  p.cutoff = auto_cutoff(p.n_particles, 0.0, epsilon, params.cutoff);

  const ModelBundle bundle = build_rotor(p);
  const StateVector start = symmetric_state(bundle);
  GeneratorSpec gen{bundle.hamiltonian, epsilon, bundle.breaking_field};

  const double budget = opts.budget_factor / (epsilon * p.n_particles) +
                        10.0 / std::sqrt(epsilon);
  const double record_every = budget / static_cast<double>(opts.samples);

  const Rhs rhs = gen.make_rhs();
  Trajectory traj;
  traj.total_accepted_steps = integrate_adaptive(
      rhs, start.amplitudes, budget, record_every, opts.integrator,
      [&](double t, const Eigen::VectorXcd& y, double log_norm,
          double last_step) {
        check_edges(y, t);
        StateVector state(bundle.basis, y);
        const Complex op = expectation_normalized(state, bundle.order_parameter);
        traj.times.push_back(t);
        traj.op_modulus.push_back(std::abs(op));
        traj.op_phase.push_back(std::arg(op));
        traj.energy.push_back(
            expectation_normalized(state, bundle.hamiltonian).real());
        traj.log_norm.push_back(log_norm);
        traj.step_sizes.push_back(last_step);
      });

  CollapseResult result;
  result.trajectory = std::move(traj);
  op_is_steady(result.trajectory.op_modulus, &result.plateau_op);
  const auto t_c =
      first_crossing(result.trajectory.times, result.trajectory.op_modulus,
                     gamma);
  result.reached = t_c.has_value();
  result.time = t_c.value_or(0.0);
  return result;
}

ReorientResult reorientation_time(const RotorModel& params, double theta_start,
                                  double theta_field, double epsilon,
                                  const ReorientOptions& opts) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("reorientation_time: epsilon must be > 0");
  }
  RotorModel p = params;
  p.epsilon = epsilon;
  p.cutoff = auto_cutoff(p.n_particles, p.field_b, epsilon, params.cutoff);

  const StateVector packet = wavepacket_state(p, theta_start);

  RotorModel field_params = p;
  field_params.field_b = 0.0;
  field_params.theta0 = theta_field;
  const ModelBundle bundle = build_rotor(field_params);
  GeneratorSpec gen{bundle.hamiltonian, epsilon, bundle.breaking_field};

  const double budget =
      opts.budget_factor * std::max(std::sqrt(p.field_b), 0.02) / epsilon;
  const double record_every = budget / static_cast<double>(opts.samples);

  const Rhs rhs = gen.make_rhs();
  Trajectory traj;
  std::optional<double> t_r;
  std::vector<double> angular_offset;

  traj.total_accepted_steps = integrate_adaptive(
      rhs, packet.amplitudes, budget, record_every, opts.integrator,
      [&](double t, const Eigen::VectorXcd& y, double log_norm,
          double last_step) {
        check_edges(y, t);
        StateVector state(bundle.basis, y);
        const Complex op = expectation_normalized(state, bundle.order_parameter);
        traj.times.push_back(t);
        traj.op_modulus.push_back(std::abs(op));
        traj.op_phase.push_back(std::arg(op));
        traj.energy.push_back(
            expectation_normalized(state, bundle.hamiltonian).real());
        traj.log_norm.push_back(log_norm);
        traj.step_sizes.push_back(last_step);
        angular_offset.push_back(
            -std::abs(wrap_angle(std::arg(op) - theta_field)));
      });

  // capture when |arg<op> - theta_field| first drops inside the radius
  t_r = first_crossing(traj.times, angular_offset, -opts.capture_radius);

  ReorientResult result;
  result.trajectory = std::move(traj);
  result.reached = t_r.has_value();
  result.time = t_r.value_or(0.0);
  return result;
}

Trajectory quench_sweep(const TfimModel& params, const QuenchSchedule& schedule,
                        double epsilon, double field_sign,
                        const QuenchOptions& opts) {
  params.validate();
  if (!(schedule.t_total > 0.0)) {
    throw std::invalid_argument("quench_sweep: ramp must span [0, 1]");
  }
  if (field_sign != 1.0 && field_sign != -1.0) {
    throw std::invalid_argument("quench_sweep: field_sign must be +-1");
  }

  TfimModel start_params = params;
  start_params.p = 0.0;
  const ModelBundle start_bundle = build_tfim(start_params);
  const EigenPair gs = ground_state(start_bundle.hamiltonian);
  StateVector psi(start_bundle.basis, gs.vector.amplitudes);

  TfimModel end_params = params;
  end_params.p = 1.0;
  const ModelBundle end_bundle = build_tfim(end_params);

  // H(t) = (1 - p) H(0) + p H(1) for the linear interpolation in p
  const LinearOperator h0 = start_bundle.hamiltonian;
  const LinearOperator h1 = end_bundle.hamiltonian;
  const LinearOperator field = start_bundle.breaking_field.scaled(field_sign);
  const double t_total = schedule.t_total;
  const double half_eps = 0.5 * epsilon;

  Rhs rhs = [&, tmp = Eigen::VectorXcd(), tmp2 = Eigen::VectorXcd()](
                double t, const Eigen::VectorXcd& y,
                Eigen::VectorXcd& dydt) mutable {
    const double p = std::min(1.0, std::max(0.0, t / t_total));
    dydt.resize(y.size());
    tmp.resize(y.size());
    h0.apply(y.data(), dydt.data());
    h1.apply(y.data(), tmp.data());
    dydt = Complex(0.0, -1.0) * ((1.0 - p) * dydt + p * tmp);
    if (epsilon > 0.0) {
      tmp2.resize(y.size());
      field.apply(y.data(), tmp2.data());
      dydt += half_eps * tmp2;
    }
  };

  Trajectory traj;
  traj.total_accepted_steps = integrate_adaptive(
      rhs, psi.amplitudes, t_total, opts.record_every, opts.integrator,
      [&](double t, const Eigen::VectorXcd& y, double log_norm,
          double last_step) {
        const double p = std::min(1.0, std::max(0.0, t / t_total));
        StateVector state(start_bundle.basis, y);
        const Complex op =
            expectation_normalized(state, start_bundle.order_parameter);
        const double e0 =
            expectation_normalized(state, h0).real();
        const double e1 =
            expectation_normalized(state, h1).real();
        traj.times.push_back(t);
        traj.op_modulus.push_back(std::abs(op));
        traj.op_phase.push_back(std::arg(op));
        traj.energy.push_back((1.0 - p) * e0 + p * e1);
        traj.log_norm.push_back(log_norm);
        traj.step_sizes.push_back(last_step);
      });
  return traj;
}

SlopeFit fit_loglog(const std::vector<double>& x,
                    const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 4) {
    throw std::invalid_argument("fit_loglog: need at least 4 points per axis");
  }
  const int n = static_cast<int>(x.size());
  std::vector<double> lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw std::invalid_argument("fit_loglog: values must be positive");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  SlopeFit fit;
  fit.n = n;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.std_error = std::sqrt(ss_res / (n - 2) / sxx);
  return fit;
}

double wrap_angle(double a) {
  const double two_pi = 2.0 * M_PI;
  a = std::fmod(a, two_pi);
  if (a <= -M_PI) a += two_pi;
  if (a > M_PI) a -= two_pi;
  return a;
}

}  // namespace ssb
