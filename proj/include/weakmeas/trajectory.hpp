// Monte Carlo generation of detector records with conditioned-state and
// propagator evolution, plus the continuous-limit SME/SDE integrators.
#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "weakmeas/errors.hpp"
#include "weakmeas/mat2.hpp"
#include "weakmeas/qpc.hpp"
#include "weakmeas/qubit.hpp"
#include "weakmeas/rng.hpp"

namespace weakmeas {

/// Per-bin step propagators, precomputed once and shared read-only.
class StepPropagators {
  public:
    StepPropagators(const QpcModel& model, const QubitModel& qubit) {
        steps_.reserve(model.n_bins());
        for (int k = 0; k < model.n_bins(); ++k)
            steps_.push_back(step_propagator(model, qubit, k));
    }
    const Mat2& operator[](int bin) const { return steps_[static_cast<std::size_t>(bin)]; }
    int size() const { return static_cast<int>(steps_.size()); }

  private:
    std::vector<Mat2> steps_;
};

inline double expect_sigma_n(const DensityMatrix& rho, double beta) {
    return (rho.m * sigma_n(beta)).trace().real();
}

/// Draw a current bin with probability P_L(bin) <L|rho|L> + P_R(bin) <R|rho|R>
/// by inverse-CDF lookup on the precomputed per-state cdfs.
inline int sample_bin(const QpcModel& model, const QubitModel& qubit,
                      const DensityMatrix& rho, RngStream& rng) {
    const Vec2 l = charge_state_l(qubit.beta);
    const Vec2 r = charge_state_r(qubit.beta);
    const double wl = inner(l, rho.m * l).real();
    const double wr = inner(r, rho.m * r).real();
    const std::vector<double>& cl = model.cdf(ChargeState::L);
    const std::vector<double>& cr = model.cdf(ChargeState::R);

    const double u = rng.uniform();
    int lo = 0, hi = model.n_bins() - 1;
    while (lo < hi) {
        const int mid = lo + (hi - lo) / 2;
        if (wl * cl[mid] + wr * cr[mid] > u)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

/// rho -> u rho u^dag / tr(u rho u^dag). Throws ImpossibleOutcomeError on a
/// vanishing trace, which signals a sampler/propagator mismatch.
inline DensityMatrix apply_step(const DensityMatrix& rho, const Mat2& u) {
    Mat2 t = u * rho.m * u.adjoint();
    const double tr = t.trace().real();
    if (!(tr > 1e-300))
        throw ImpossibleOutcomeError("apply_step: outcome has vanishing probability");
    t = (t + t.adjoint()) * Complex(0.5);
    return DensityMatrix{t / tr};
}

/// Accumulates u_total = step * ... * step, rescaling whenever the Frobenius
/// norm leaves [1e-3, 1e3] and logging the divided-out factor. The schedule
/// is a pure function of the step sequence, so a replay of the same bins
/// reproduces u_total bit-for-bit.
struct UAccumulator {
    Mat2 u = Mat2::identity();
    double log_norm = 0.0;

    void apply(const Mat2& step) {
        u = step * u;
        const double n = u.frobenius_norm();
        if (n < 1e-3 || n > 1e3) {
            u = u / n;
            log_norm += std::log(n);
        }
    }
};

struct TrajectoryOptions {
    bool keep_bins = true;
    bool record_history = false;
    int history_stride = 10;
};

struct TrajectoryRecord {
    std::vector<std::int32_t> bins;
    DensityMatrix rho_final = DensityMatrix::maximally_mixed();
    Mat2 u_total = Mat2::identity();
    double log_norm = 0.0;
    std::vector<DensityMatrix> rho_history;
    int history_stride = 0;
};

inline TrajectoryRecord run_trajectory(const QpcModel& model, const QubitModel& qubit,
                                       const StepPropagators& steps,
                                       const DensityMatrix& rho0, int n_steps,
                                       RngStream& rng, const TrajectoryOptions& opt = {}) {
    if (n_steps < 1) throw std::invalid_argument("run_trajectory: n_steps must be >= 1");
    TrajectoryRecord rec;
    if (opt.keep_bins) rec.bins.reserve(static_cast<std::size_t>(n_steps));
    if (opt.record_history) {
        rec.history_stride = opt.history_stride;
        rec.rho_history.push_back(rho0);
    }
    DensityMatrix rho = rho0;
    UAccumulator acc;
    for (int k = 0; k < n_steps; ++k) {
        const int bin = sample_bin(model, qubit, rho, rng);
        const Mat2& step = steps[bin];
        rho = apply_step(rho, step);
        acc.apply(step);
        if (opt.keep_bins) rec.bins.push_back(bin);
        if (opt.record_history && (k + 1) % opt.history_stride == 0)
            rec.rho_history.push_back(rho);
    }
    rec.rho_final = rho;
    rec.u_total = acc.u;
    rec.log_norm = acc.log_norm;
    return rec;
}

inline TrajectoryRecord run_trajectory(const QpcModel& model, const QubitModel& qubit,
                                       const DensityMatrix& rho0, int n_steps,
                                       RngStream& rng, const TrajectoryOptions& opt = {}) {
    const StepPropagators steps(model, qubit);
    return run_trajectory(model, qubit, steps, rho0, n_steps, rng, opt);
}

/// Mirror a record about the central current value: bin k -> n_bins-1-k.
inline std::vector<std::int32_t> flip_record(std::span<const std::int32_t> bins, int n_bins) {
    std::vector<std::int32_t> out(bins.size());
    for (std::size_t i = 0; i < bins.size(); ++i)
        out[i] = static_cast<std::int32_t>(n_bins - 1 - bins[i]);
    return out;
}

struct ReplayResult {
    Mat2 u_total = Mat2::identity();
    double log_norm = 0.0;
};

/// Deterministically rebuild u_total for a given record. Uses the same
/// renormalization schedule as generation, hence bit-identical results.
inline ReplayResult replay_record(const QpcModel& model, const QubitModel& qubit,
                                  std::span<const std::int32_t> bins) {
    const StepPropagators steps(model, qubit);
    UAccumulator acc;
    for (std::int32_t bin : bins) {
        if (bin < 0 || bin >= model.n_bins())
            throw std::out_of_range("replay_record: bin index out of range");
        acc.apply(steps[bin]);
    }
    return {acc.u, acc.log_norm};
}

/// Unnormalized record probability tr(U rho0 U^dag) with the divided-out
/// normalization restored.
inline double record_probability(const ReplayResult& replay, const DensityMatrix& rho0) {
    const Mat2 t = replay.u_total * rho0.m * replay.u_total.adjoint();
    return t.trace().real() * std::exp(2.0 * replay.log_norm);
}

/// Euler-Maruyama step of the Ito stochastic master equation
///   drho = -i[H, rho] dt
///        + dW/(2 sqrt(tau_m)) (sn rho + rho sn - 2 <sn> rho)
///        + dt/(4 tau_m) (sn rho sn - rho),
/// followed by re-Hermitization and trace renormalization.
inline DensityMatrix sme_step(const DensityMatrix& rho, const QubitModel& qubit,
                              double tau_m, double dt, double dw) {
    if (!(dt > 0.0)) throw std::invalid_argument("sme_step: dt must be > 0");
    const Mat2 sn = sigma_n(qubit.beta);
    const Mat2 h = qubit.hamiltonian();
    const double mean_sn = (rho.m * sn).trace().real();

    const Mat2 commutator = h * rho.m - rho.m * h;
    const Mat2 dephasing = sn * rho.m * sn - rho.m;
    const Mat2 innovation = sn * rho.m + rho.m * sn - (2.0 * mean_sn) * rho.m;

    const Mat2 next = rho.m + Complex(0.0, -dt) * commutator +
                      (dt / (4.0 * tau_m)) * dephasing +
                      (dw / (2.0 * std::sqrt(tau_m))) * innovation;
    return DensityMatrix::renormalized(next);
}

/// Euler-Maruyama step of the companion propagator equation
///   dU = ([<sn>/(2 tau_m) + xi/(2 sqrt(tau_m))] sn - i H) U dt,
/// sharing the innovation dW with the paired sme_step.
inline Mat2 sde_u_step(const Mat2& u_total, const DensityMatrix& rho, const QubitModel& qubit,
                       double tau_m, double dt, double dw) {
    const Mat2 sn = sigma_n(qubit.beta);
    const double mean_sn = (rho.m * sn).trace().real();
    const Complex coeff(mean_sn * dt / (2.0 * tau_m) + dw / (2.0 * std::sqrt(tau_m)), 0.0);
    const Mat2 gen = coeff * sn + Complex(0.0, -dt) * qubit.hamiltonian();
    return u_total + gen * u_total;
}

/// Innovation increment implied by an observed current:
/// dW = (I - I_center - (dI_bar/2) <sn>) * 2 dt / (dI_bar sqrt(tau_m)).
inline double innovation_from_current(const QpcModel& model, double current, double mean_sn) {
    const double dt = model.delta_t();
    return (current - model.i_center() - 0.5 * model.delta_i_bar() * mean_sn) * 2.0 * dt /
           (model.delta_i_bar() * std::sqrt(model.tau_m()));
}

} // namespace weakmeas
