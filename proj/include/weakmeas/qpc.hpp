// Phenomenological detector model: binned current distributions for the two
// charge states, the measurement time, and the per-step propagators built
// from them.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "weakmeas/mat2.hpp"
#include "weakmeas/qubit.hpp"

namespace weakmeas {

enum class ChargeState { L, R };

/// Detector with Gaussian current distributions of width sigma_bins bins,
/// centered at i_mean_L / i_mean_R, discretized onto n_bins bin centers
/// placed symmetrically about the midpoint current.
///
/// The symmetric grid makes the two pmfs exact mirror images of each other
/// (pmf_R[k] == pmf_L[mirror(k)] bit-for-bit), which the opposite-signal
/// analysis relies on.
class QpcModel {
  public:
    QpcModel(double i_mean_l, double i_mean_r, double sigma_bins, int n_bins,
             double delta_t, double delta_i = 1.0)
        : i_mean_l_(i_mean_l), i_mean_r_(i_mean_r), sigma_bins_(sigma_bins),
          n_bins_(n_bins), delta_t_(delta_t), delta_i_(delta_i) {
        if (n_bins_ < 3) throw std::invalid_argument("QpcModel: need at least 3 bins");
        if (!(sigma_bins_ > 0.0)) throw std::invalid_argument("QpcModel: sigma_bins must be > 0");
        if (!(delta_t_ > 0.0)) throw std::invalid_argument("QpcModel: delta_t must be > 0");
        if (!(delta_i_ > 0.0)) throw std::invalid_argument("QpcModel: delta_I must be > 0");
        if (!(i_mean_r_ > i_mean_l_))
            throw std::invalid_argument("QpcModel: requires i_mean_R > i_mean_L");
        build_tables();
    }

    /// Build a detector from the coupling-strength knob E*tau_m/(2*pi), with
    /// delta_t = delta_t_factor * pi / E and the center-to-center distance
    /// derived from tau_m = 4 sigma^2 delta_t / (delta_I_bar)^2.
    static QpcModel from_coupling(double coupling, const QubitModel& qubit,
                                  int n_bins = 100, double sigma_bins = 10.0,
                                  double delta_t_factor = 0.1, double i_center = 0.0,
                                  double delta_i = 1.0) {
        if (!(coupling > 0.0)) throw std::invalid_argument("coupling must be > 0");
        if (!(qubit.energy > 0.0))
            throw std::invalid_argument("from_coupling needs a finite energy splitting");
        const double dt = delta_t_factor * std::numbers::pi / qubit.energy;
        const double tau_m = 2.0 * std::numbers::pi * coupling / qubit.energy;
        const double sigma = sigma_bins * delta_i;
        const double delta_i_bar = 2.0 * sigma * std::sqrt(dt / tau_m);
        return QpcModel(i_center - 0.5 * delta_i_bar, i_center + 0.5 * delta_i_bar,
                        sigma_bins, n_bins, dt, delta_i);
    }

    int n_bins() const { return n_bins_; }
    double delta_t() const { return delta_t_; }
    double delta_i() const { return delta_i_; }
    double sigma() const { return sigma_bins_ * delta_i_; }
    double i_mean(ChargeState s) const { return s == ChargeState::L ? i_mean_l_ : i_mean_r_; }
    double i_center() const { return 0.5 * (i_mean_l_ + i_mean_r_); }
    double delta_i_bar() const { return i_mean_r_ - i_mean_l_; }
    double tau_m() const {
        const double s = sigma();
        return 4.0 * s * s * delta_t_ / (delta_i_bar() * delta_i_bar());
    }

    double bin_center(int bin) const {
        return i_center() + (static_cast<double>(bin) - 0.5 * (n_bins_ - 1)) * delta_i_;
    }
    int mirror_bin(int bin) const { return n_bins_ - 1 - bin; }

    const std::vector<double>& pmf(ChargeState s) const {
        return s == ChargeState::L ? pmf_l_ : pmf_r_;
    }
    /// Cumulative pmf; cdf[k] = sum of pmf[0..k].
    const std::vector<double>& cdf(ChargeState s) const {
        return s == ChargeState::L ? cdf_l_ : cdf_r_;
    }

    /// Gaussian mass falling outside the bin grid before renormalization.
    double truncated_mass() const { return truncated_mass_; }

  private:
    void build_tables() {
        // pmf for state L on the symmetric grid; the R pmf is its mirror
        // image by construction, not a second rounding-sensitive sum.
        pmf_l_.resize(n_bins_);
        const double half = 0.5 * delta_i_bar();
        const double s = sigma();
        double total = 0.0;
        for (int k = 0; k < n_bins_; ++k) {
            const double x = (static_cast<double>(k) - 0.5 * (n_bins_ - 1)) * delta_i_;
            const double dev = x + half; // distance from i_mean_L
            pmf_l_[k] = std::exp(-0.5 * dev * dev / (s * s));
            total += pmf_l_[k];
        }
        for (double& p : pmf_l_) p /= total;
        truncated_mass_ = 1.0 - total * delta_i_ / (s * std::sqrt(2.0 * std::numbers::pi));

        pmf_r_.resize(n_bins_);
        for (int k = 0; k < n_bins_; ++k) pmf_r_[k] = pmf_l_[mirror_bin(k)];

        cdf_l_ = cumulative(pmf_l_);
        cdf_r_ = cumulative(pmf_r_);
    }

    static std::vector<double> cumulative(const std::vector<double>& p) {
        std::vector<double> c(p.size());
        double acc = 0.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            acc += p[k];
            c[k] = acc;
        }
        c.back() = 1.0;
        return c;
    }

    double i_mean_l_, i_mean_r_, sigma_bins_;
    int n_bins_;
    double delta_t_, delta_i_;
    std::vector<double> pmf_l_, pmf_r_, cdf_l_, cdf_r_;
    double truncated_mass_{};
};

struct CurrentSample {
    int bin_index{};
    double value{};
};

inline CurrentSample make_current_sample(const QpcModel& model, int bin) {
    return {bin, model.bin_center(bin)};
}

/// Probability vector over bins for a qubit pinned in the given charge state.
inline const std::vector<double>& current_pmf(const QpcModel& model, ChargeState s) {
    return model.pmf(s);
}

/// Exact (non-linearized) Kraus operator for one observed bin:
/// sqrt(P_L)|L><L| + sqrt(P_R)|R><R| in the energy eigenbasis.
inline Mat2 kraus_for_bin(const QpcModel& model, double beta, int bin) {
    if (bin < 0 || bin >= model.n_bins())
        throw std::out_of_range("kraus_for_bin: bin index out of range");
    const double wl = std::sqrt(model.pmf(ChargeState::L)[bin]);
    const double wr = std::sqrt(model.pmf(ChargeState::R)[bin]);
    const Vec2 l = charge_state_l(beta);
    const Vec2 r = charge_state_r(beta);
    return wl * Mat2::outer(l, l) + wr * Mat2::outer(r, r);
}

/// Linearized Kraus form 1 + dt (I - I_center) sigma_n / (tau_m dI_bar),
/// kept as a helper for the SDE-based code paths.
inline Mat2 kraus_for_bin_linearized(const QpcModel& model, double beta, int bin) {
    const double g = model.delta_t() * (model.bin_center(bin) - model.i_center()) /
                     (model.tau_m() * model.delta_i_bar());
    return Mat2::identity() + g * sigma_n(beta);
}

/// Exact free-evolution propagator exp(-i H delta_t) = diag(e^{+iE dt/2}, e^{-iE dt/2}).
inline Mat2 hamiltonian_step(const QpcModel& model, const QubitModel& qubit) {
    const double phase = 0.5 * qubit.energy * model.delta_t();
    return Mat2::diag(std::polar(1.0, phase), std::polar(1.0, -phase));
}

/// One full step: measurement applied after the free evolution, U = U_M * U_H.
inline Mat2 step_propagator(const QpcModel& model, const QubitModel& qubit, int bin) {
    return kraus_for_bin(model, qubit.beta, bin) * hamiltonian_step(model, qubit);
}

} // namespace weakmeas
