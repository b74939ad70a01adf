// Turning accumulated propagators into measurement information (basis,
// result, fidelity), and the ensemble statistics built on top of it:
// fidelity-vs-time curves, spectral coefficients of the basis distribution,
// fixed-basis average fidelity, and short-time Fourier components.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "weakmeas/decompose.hpp"
#include "weakmeas/errors.hpp"
#include "weakmeas/exec.hpp"
#include "weakmeas/mat2.hpp"
#include "weakmeas/qpc.hpp"
#include "weakmeas/qubit.hpp"
#include "weakmeas/rng.hpp"
#include "weakmeas/trajectory.hpp"

namespace weakmeas {

/// Measurement content of an accumulated propagator.
///
/// p1 >= p2 are the eigenvalues of U^dag U normalized to p1 + p2 = 1, so the
/// whole struct is invariant under rescaling of the propagator (the unitary
/// factor keeps only a phase freedom, pinned by giving it unit determinant
/// with the principal square root).
struct MeasurementDecomposition {
    double axis_theta{};            ///< upper-hemisphere representative, [0, pi/2]
    double axis_phi{};              ///< [0, 2pi); [0, pi) on the equator
    BlochVector result_direction{}; ///< oriented direction of the more likely state
    double p1{}, p2{};
    double fidelity{};              ///< (p1 - p2) / (p1 + p2)
    Mat2 rot;                       ///< unitary factor, det-normalized
};

namespace detail {

struct FoldedAxis {
    double theta{}, phi{};
};

/// Fold an oriented unit vector to the upper hemisphere; directions on the
/// equator (|z| < 1e-12) pick the representative with phi in [0, pi).
inline FoldedAxis fold_axis(BlochVector r) {
    constexpr double kEquator = 1e-12;
    if (std::abs(r.z) < kEquator) {
        if (r.y < 0.0 || (r.y == 0.0 && r.x < 0.0)) r = -r;
    } else if (r.z < 0.0) {
        r = -r;
    }
    const double z = std::clamp(r.z, -1.0, 1.0);
    double phi = std::atan2(r.y, r.x);
    if (phi < 0.0) phi += 2.0 * std::numbers::pi;
    if (std::abs(r.z) < kEquator && phi >= std::numbers::pi) phi -= std::numbers::pi;
    return {std::acos(z), phi};
}

inline BlochVector bloch_of_state(const Vec2& v) {
    const Complex cross = v.x * std::conj(v.y);
    return {2.0 * cross.real(), -2.0 * cross.imag(), std::norm(v.x) - std::norm(v.y)};
}

} // namespace detail

/// Polar-decompose a total evolution matrix and read off the measurement
/// basis, oriented result, weights and fidelity. A propagator that is
/// proportional to a unitary carries no information: its fidelity is exactly
/// zero (weights within 1e-13 of each other are treated as equal).
inline MeasurementDecomposition decompose(const Mat2& u_total) {
    if (!u_total.finite() || u_total.frobenius_norm_sq() < 1e-300)
        throw DegenerateInputError("decompose: zero or non-finite propagator");

    const PolarDecomposition polar = polar_decompose(u_total);
    const HermitianEigen eig = eig_hermitian2(polar.meas);
    const double s1 = std::max(eig.first.value, 0.0);
    const double s2 = std::max(eig.second.value, 0.0);
    const double total = s1 * s1 + s2 * s2;

    MeasurementDecomposition out;
    out.p1 = s1 * s1 / total;
    out.p2 = s2 * s2 / total;
    out.fidelity = out.p1 - out.p2;
    if (out.fidelity < 1e-13) out.fidelity = 0.0;
    out.result_direction = detail::bloch_of_state(eig.first.vector);
    const detail::FoldedAxis axis = detail::fold_axis(out.result_direction);
    out.axis_theta = axis.theta;
    out.axis_phi = axis.phi;

    // Unit-determinant convention via the principal square root (Re >= 0).
    const Complex det = polar.rot.det();
    out.rot = polar.rot * (Complex(1.0) / std::sqrt(det));
    return out;
}

/// Angle between two unoriented axes given as Bloch vectors.
inline double axis_angle(const BlochVector& a, const BlochVector& b) {
    const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
    return std::acos(std::min(c, 1.0));
}

// ---------------------------------------------------------------------------
// Ensemble drivers
// ---------------------------------------------------------------------------

struct EnsembleParams {
    int n_trajectories = 1000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::uint64_t stream_offset = 0; ///< decouples sub-ensembles sharing a seed
};

struct EnsembleDecompositions {
    std::vector<MeasurementDecomposition> decs;
    std::vector<double> final_purity;

    MeanStderr mean_purity() const { return mean_stderr(final_purity); }
};

/// Run independent trajectories and decompose each final propagator.
inline EnsembleDecompositions ensemble_final_decompositions(
    const QpcModel& model, const QubitModel& qubit, const DensityMatrix& rho0,
    int n_steps, const EnsembleParams& params) {
    const StepPropagators steps(model, qubit);
    EnsembleDecompositions out;
    out.decs.resize(static_cast<std::size_t>(params.n_trajectories));
    out.final_purity.resize(static_cast<std::size_t>(params.n_trajectories));
    TrajectoryOptions opt;
    opt.keep_bins = false;
    parallel_for(static_cast<std::size_t>(params.n_trajectories), params.workers,
                 [&](std::size_t i) {
                     RngStream rng(params.seed, params.stream_offset + i);
                     const TrajectoryRecord rec =
                         run_trajectory(model, qubit, steps, rho0, n_steps, rng, opt);
                     out.decs[i] = decompose(rec.u_total);
                     out.final_purity[i] = rec.rho_final.purity();
                 });
    return out;
}

struct CurvePoint {
    double t_over_tau_m{};
    double mean_f{};
    double stderr_of_mean{};
};

struct FidelityCurve {
    std::vector<CurvePoint> points;
    MeanStderr mean_final_purity;
};

/// Mean decomposition fidelity as a function of measurement duration,
/// sampled every `stride` steps (plus the trivial t = 0 point).
inline FidelityCurve fidelity_curve(const QpcModel& model, const QubitModel& qubit,
                                    const DensityMatrix& rho0, int n_steps, int stride,
                                    const EnsembleParams& params) {
    if (stride < 1 || n_steps < stride)
        throw std::invalid_argument("fidelity_curve: need 1 <= stride <= n_steps");
    const StepPropagators steps(model, qubit);
    const int n_checkpoints = n_steps / stride;
    const std::size_t n_traj = static_cast<std::size_t>(params.n_trajectories);
    std::vector<double> fid(static_cast<std::size_t>(n_checkpoints) * n_traj);
    std::vector<double> purity(n_traj);

    parallel_for(n_traj, params.workers, [&](std::size_t i) {
        RngStream rng(params.seed, params.stream_offset + i);
        DensityMatrix rho = rho0;
        UAccumulator acc;
        int checkpoint = 0;
        for (int k = 0; k < n_checkpoints * stride; ++k) {
            const int bin = sample_bin(model, qubit, rho, rng);
            rho = apply_step(rho, steps[bin]);
            acc.apply(steps[bin]);
            if ((k + 1) % stride == 0) {
                fid[static_cast<std::size_t>(checkpoint) * n_traj + i] =
                    decompose(acc.u).fidelity;
                ++checkpoint;
            }
        }
        purity[i] = rho.purity();
    });

    FidelityCurve curve;
    curve.points.reserve(static_cast<std::size_t>(n_checkpoints) + 1);
    curve.points.push_back({0.0, 0.0, 0.0});
    const double dt_over_tau = model.delta_t() / model.tau_m();
    for (int j = 0; j < n_checkpoints; ++j) {
        const MeanStderr ms = mean_stderr(
            std::span<const double>(fid).subspan(static_cast<std::size_t>(j) * n_traj, n_traj));
        curve.points.push_back(
            {static_cast<double>((j + 1) * stride) * dt_over_tau, ms.mean, ms.stderr_of_mean});
    }
    curve.mean_final_purity = mean_stderr(purity);
    return curve;
}

struct AverageFidelity {
    double f_bar{};
    double stderr_of_mean{};
    MeanStderr mean_final_purity{};
};

/// Correct-minus-wrong guessing score when the measurement basis is fixed by
/// hand: the qubit is prepared in the +1 eigenstate of the chosen axis, each
/// run's guess is the sign of result_direction . axis, and near-orthogonal
/// results (|dot| < 1e-9) count half right, half wrong.
inline AverageFidelity fixed_basis_average_fidelity(const QpcModel& model,
                                                    const QubitModel& qubit,
                                                    double theta_meas, double phi_meas,
                                                    int n_steps,
                                                    const EnsembleParams& params) {
    const BlochVector axis = BlochVector::from_angles(theta_meas, phi_meas);
    const DensityMatrix rho0 = density_from_bloch(axis);
    const EnsembleDecompositions ens =
        ensemble_final_decompositions(model, qubit, rho0, n_steps, params);
    std::vector<double> score(ens.decs.size());
    for (std::size_t i = 0; i < ens.decs.size(); ++i) {
        const double dot = ens.decs[i].result_direction.dot(axis);
        score[i] = (dot > 1e-9) ? 1.0 : (dot < -1e-9) ? -1.0 : 0.0;
    }
    const MeanStderr ms = mean_stderr(score);
    return {ms.mean, ms.stderr_of_mean, ens.mean_purity()};
}

struct SlopeEstimate {
    double slope{};
    double f_bar{};
    double stderr_of_mean{};
};

/// Fig.-7-style rate of charge-basis fidelity deterioration: evaluate F_bar
/// at the operating point E tau_m / (2 pi) = 0.06 with the charge basis as
/// the chosen axis, and return (1 - F_bar) / 0.06.
inline SlopeEstimate charge_basis_fidelity_slope(double beta, double energy,
                                                 int n_steps, const EnsembleParams& params,
                                                 int n_bins = 100, double sigma_bins = 10.0,
                                                 double delta_t_factor = 0.1) {
    constexpr double kOperatingPoint = 0.06;
    const QubitModel qubit(energy, beta);
    const QpcModel model =
        QpcModel::from_coupling(kOperatingPoint, qubit, n_bins, sigma_bins, delta_t_factor);
    const AverageFidelity fb =
        fixed_basis_average_fidelity(model, qubit, beta, 0.0, n_steps, params);
    return {(1.0 - fb.f_bar) / kOperatingPoint, fb.f_bar, fb.stderr_of_mean};
}

// ---------------------------------------------------------------------------
// Spectral analysis of the measurement-basis distribution
// ---------------------------------------------------------------------------

struct AxisSample {
    double theta{}, phi{};
};

/// Legendre polynomial P_n(x) by the standard three-term recurrence.
inline double legendre_pn(int n, double x) {
    if (n < 0) throw std::domain_error("legendre_pn: n must be >= 0");
    if (n == 0) return 1.0;
    double pm1 = 1.0, p = x;
    for (int k = 2; k <= n; ++k) {
        const double next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm1) / k;
        pm1 = p;
        p = next;
    }
    return p;
}

struct SpectralCoefficients {
    std::vector<int> n;
    std::vector<double> c;
    std::vector<double> stderr_of_mean;
};

/// c_n = (2/N) sum_j sqrt((2n+1)/4pi) P_n(cos theta_j) for even n only; the
/// hemisphere-folded distribution has no odd-harmonic content, and asking
/// for odd n is rejected.
inline SpectralCoefficients spectral_coefficients(std::span<const AxisSample> axes, int n_max) {
    if (n_max < 0 || n_max % 2 != 0)
        throw std::domain_error("spectral_coefficients: n_max must be even and >= 0");
    if (axes.empty()) throw std::invalid_argument("spectral_coefficients: no samples");
    for (const AxisSample& a : axes)
        if (!(a.theta >= -1e-12 && a.theta <= std::numbers::pi / 2 + 1e-9))
            throw std::domain_error("spectral_coefficients: theta outside [0, pi/2]");

    SpectralCoefficients out;
    std::vector<double> y(axes.size());
    for (int n = 0; n <= n_max; n += 2) {
        const double norm = std::sqrt((2.0 * n + 1.0) / (4.0 * std::numbers::pi));
        for (std::size_t j = 0; j < axes.size(); ++j)
            y[j] = 2.0 * norm * legendre_pn(n, std::cos(axes[j].theta));
        const MeanStderr ms = mean_stderr(y);
        out.n.push_back(n);
        out.c.push_back(ms.mean);
        out.stderr_of_mean.push_back(ms.stderr_of_mean);
    }
    return out;
}

inline std::vector<AxisSample> axes_of(const std::vector<MeasurementDecomposition>& decs) {
    std::vector<AxisSample> axes(decs.size());
    for (std::size_t i = 0; i < decs.size(); ++i) axes[i] = {decs[i].axis_theta, decs[i].axis_phi};
    return axes;
}

// ---------------------------------------------------------------------------
// Short-time Fourier components
// ---------------------------------------------------------------------------

struct ShortTimeComponents {
    double px{}, py{}, pz{};
};

/// Discrete-sum Fourier components of a record over [0, t_f]:
///   p_x = sin(beta) sum_k (I_k - I_center) cos(E t_k) dt / (tau_m dI_bar),
/// and likewise with sin(E t_k) and 1 for p_y, p_z. t_f must be an integer
/// multiple of the free-precession period 2 pi / E.
inline ShortTimeComponents short_time_components(std::span<const std::int32_t> bins,
                                                 const QubitModel& qubit,
                                                 const QpcModel& model, double t_f) {
    if (!(qubit.energy > 0.0))
        throw std::domain_error("short_time_components: needs a finite precession period");
    const double dt = model.delta_t();
    const double steps_exact = t_f / dt;
    const int n_steps = static_cast<int>(std::llround(steps_exact));
    if (std::abs(steps_exact - n_steps) > 1e-9 || n_steps < 1)
        throw std::domain_error("short_time_components: t_f is not a whole number of steps");
    const double periods = t_f * qubit.energy / (2.0 * std::numbers::pi);
    if (std::abs(periods - std::llround(periods)) > 1e-9 || periods < 0.5)
        throw std::domain_error(
            "short_time_components: t_f must be a multiple of the precession period");
    if (static_cast<std::size_t>(n_steps) > bins.size())
        throw std::invalid_argument("short_time_components: record shorter than t_f");

    const double weight = dt / (model.tau_m() * model.delta_i_bar());
    double sx = 0.0, sy = 0.0, sz = 0.0;
    for (int k = 0; k < n_steps; ++k) {
        const double dev = model.bin_center(bins[static_cast<std::size_t>(k)]) - model.i_center();
        const double phase = qubit.energy * k * dt;
        sx += dev * std::cos(phase);
        sy += dev * std::sin(phase);
        sz += dev;
    }
    const double sb = std::sin(qubit.beta), cb = std::cos(qubit.beta);
    return {sb * weight * sx, sb * weight * sy, cb * weight * sz};
}

/// Short-time components for an ensemble of records started from the
/// maximally mixed state.
inline std::vector<ShortTimeComponents> short_time_ensemble(const QpcModel& model,
                                                            const QubitModel& qubit,
                                                            double t_f,
                                                            const EnsembleParams& params) {
    const StepPropagators steps(model, qubit);
    const int n_steps = static_cast<int>(std::llround(t_f / model.delta_t()));
    std::vector<ShortTimeComponents> out(static_cast<std::size_t>(params.n_trajectories));
    parallel_for(out.size(), params.workers, [&](std::size_t i) {
        RngStream rng(params.seed, params.stream_offset + i);
        const TrajectoryRecord rec = run_trajectory(
            model, qubit, steps, DensityMatrix::maximally_mixed(), n_steps, rng);
        out[i] = short_time_components(rec.bins, qubit, model, t_f);
    });
    return out;
}

} // namespace weakmeas
