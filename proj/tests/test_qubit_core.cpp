#include "catch_amalgamated.hpp"

#include <cmath>
#include <numbers>

#include "weakmeas/decompose.hpp"
#include "weakmeas/mat2.hpp"
#include "weakmeas/qubit.hpp"
#include "weakmeas/rng.hpp"

using namespace weakmeas;
using Catch::Matchers::WithinAbs;

namespace {

Mat2 random_mat2(RngStream& rng, double scale = 1.0) {
    auto z = [&] { return Complex(rng.normal(), rng.normal()) * scale; };
    return {z(), z(), z(), z()};
}

DensityMatrix random_state(RngStream& rng) {
    for (;;) {
        const BlochVector r{2.0 * rng.uniform() - 1.0, 2.0 * rng.uniform() - 1.0,
                            2.0 * rng.uniform() - 1.0};
        if (r.norm_sq() <= 1.0) return density_from_bloch(r);
    }
}

} // namespace

TEST_CASE("bloch_from_density on reference states", "[qubit-core]") {
    const BlochVector up = bloch_from_density(DensityMatrix{Mat2::diag(1.0, 0.0)});
    CHECK_THAT(up.x, WithinAbs(0.0, 1e-15));
    CHECK_THAT(up.y, WithinAbs(0.0, 1e-15));
    CHECK_THAT(up.z, WithinAbs(1.0, 1e-15));

    const BlochVector mixed = bloch_from_density(DensityMatrix::maximally_mixed());
    CHECK(mixed.norm() == 0.0);

    const double beta = std::numbers::pi / 4;
    const BlochVector r = bloch_from_density(DensityMatrix::pure(charge_state_r(beta)));
    CHECK_THAT(r.x, WithinAbs(std::sin(beta), 1e-14));
    CHECK_THAT(r.y, WithinAbs(0.0, 1e-14));
    CHECK_THAT(r.z, WithinAbs(std::cos(beta), 1e-14));
}

TEST_CASE("density_from_bloch on reference vectors", "[qubit-core]") {
    CHECK(distance(density_from_bloch({0, 0, 0}).m, Mat2::diag(0.5, 0.5)) == 0.0);
    CHECK(distance(density_from_bloch({1, 0, 0}).m, Mat2{0.5, 0.5, 0.5, 0.5}) == 0.0);
    CHECK(distance(density_from_bloch({0, 0, -1}).m, Mat2::diag(0.0, 1.0)) == 0.0);
    CHECK_THROWS_AS(density_from_bloch({1.0, 1.0, 1.0}), std::domain_error);
}

TEST_CASE("bloch round trip is the identity on valid states", "[qubit-core]") {
    RngStream rng(11, 0);
    for (int i = 0; i < 10000; ++i) {
        const DensityMatrix rho = random_state(rng);
        const DensityMatrix back = density_from_bloch(bloch_from_density(rho));
        REQUIRE(distance(rho.m, back.m) <= 1e-12);
    }
}

TEST_CASE("sigma_n interpolates between sigma_z and sigma_x", "[qubit-core]") {
    CHECK(distance(sigma_n(0.0), sigma_z()) == 0.0);
    CHECK(distance(sigma_n(std::numbers::pi / 2), sigma_x()) <= 1e-15);
    const Mat2 mid = sigma_n(std::numbers::pi / 4);
    CHECK(distance(mid, (sigma_z() + sigma_x()) * Complex(1.0 / std::sqrt(2.0))) <= 1e-15);
}

TEST_CASE("eig_hermitian2 on reference matrices", "[qubit-core]") {
    const HermitianEigen diag = eig_hermitian2(Mat2::diag(3.0, 1.0));
    CHECK(diag.first.value == 3.0);
    CHECK(diag.second.value == 1.0);
    CHECK(std::abs(diag.first.vector.x) == 1.0);
    CHECK(std::abs(diag.second.vector.y) == 1.0);

    const HermitianEigen sx = eig_hermitian2(sigma_x());
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CHECK_THAT(sx.first.value, WithinAbs(1.0, 1e-15));
    CHECK_THAT(sx.second.value, WithinAbs(-1.0, 1e-15));
    CHECK_THAT(std::abs(sx.first.vector.x - Complex(inv_sqrt2)), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(sx.first.vector.y - Complex(inv_sqrt2)), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(sx.second.vector.x - Complex(inv_sqrt2)), WithinAbs(0.0, 1e-15));
    CHECK_THAT(std::abs(sx.second.vector.y + Complex(inv_sqrt2)), WithinAbs(0.0, 1e-15));

    for (const double beta : {0.1, 0.8, 1.4}) {
        const HermitianEigen en = eig_hermitian2(sigma_n(beta));
        CHECK_THAT(std::abs(en.first.vector.x - Complex(std::cos(beta / 2))), WithinAbs(0.0, 1e-14));
        CHECK_THAT(std::abs(en.first.vector.y - Complex(std::sin(beta / 2))), WithinAbs(0.0, 1e-14));
    }

    CHECK_THROWS_AS(eig_hermitian2(Mat2{1.0, 2.0, 3.0, 4.0}), std::domain_error);
}

TEST_CASE("eig_hermitian2 properties on random Hermitian matrices", "[qubit-core]") {
    RngStream rng(12, 0);
    for (int i = 0; i < 5000; ++i) {
        const Mat2 g = random_mat2(rng);
        const Mat2 h = (g + g.adjoint()) * Complex(0.5);
        const HermitianEigen eig = eig_hermitian2(h);
        REQUIRE(eig.first.value >= eig.second.value);
        REQUIRE_THAT(eig.first.vector.norm(), WithinAbs(1.0, 1e-10));
        REQUIRE_THAT(eig.second.vector.norm(), WithinAbs(1.0, 1e-10));
        REQUIRE_THAT(std::abs(inner(eig.first.vector, eig.second.vector)), WithinAbs(0.0, 1e-10));
        const Vec2 res1 = h * eig.first.vector - eig.first.vector * Complex(eig.first.value);
        const Vec2 res2 = h * eig.second.vector - eig.second.vector * Complex(eig.second.value);
        REQUIRE(res1.norm() <= 1e-9 * std::max(1.0, h.frobenius_norm()));
        REQUIRE(res2.norm() <= 1e-9 * std::max(1.0, h.frobenius_norm()));
    }
}

TEST_CASE("polar decomposition of simple matrices", "[qubit-core]") {
    const PolarDecomposition id = polar_decompose(Mat2::identity());
    CHECK(distance(id.rot, Mat2::identity()) <= 1e-14);
    CHECK(distance(id.meas, Mat2::identity()) <= 1e-14);

    const PolarDecomposition psd = polar_decompose(Mat2::diag(2.0, 1.0));
    CHECK(distance(psd.rot, Mat2::identity()) <= 1e-14);
    CHECK(distance(psd.meas, Mat2::diag(2.0, 1.0)) <= 1e-14);

    CHECK_THROWS_AS(polar_decompose(Mat2::zero()), DegenerateInputError);
}

TEST_CASE("polar decomposition reconstructs random matrices", "[qubit-core]") {
    RngStream rng(13, 0);
    for (int i = 0; i < 10000; ++i) {
        const Mat2 m = random_mat2(rng, i % 2 ? 1.0 : 1e-3);
        const PolarDecomposition pd = polar_decompose(m);
        REQUIRE(distance(m, pd.rot * pd.meas) <= 1e-10 * std::max(1.0, m.frobenius_norm()));
        REQUIRE(unitarity_defect(pd.rot) <= 1e-10);

        const HermitianEigen eig = eig_hermitian2(pd.meas);
        REQUIRE(eig.second.value >= -1e-12 * std::max(1.0, m.frobenius_norm()));
        // Singular-value identities give an independent cross-check.
        const double s1 = eig.first.value, s2 = eig.second.value;
        REQUIRE_THAT(s1 * s2, WithinAbs(std::abs(m.det()), 1e-9 * std::max(1.0, m.frobenius_norm_sq())));
        REQUIRE_THAT(s1 * s1 + s2 * s2,
                     WithinAbs(m.frobenius_norm_sq(), 1e-9 * std::max(1.0, m.frobenius_norm_sq())));
    }
}

TEST_CASE("polar decomposition handles rank-deficient and degenerate inputs", "[qubit-core]") {
    // Rank one: unitary factor must still be exactly unitary.
    const Vec2 u{Complex(0.6, 0.3), Complex(-0.2, 0.7)};
    const Vec2 v{Complex(0.5, -0.5), Complex(0.1, 0.8)};
    const Mat2 rank1 = Mat2::outer(u, v);
    const PolarDecomposition pd = polar_decompose(rank1);
    CHECK(distance(rank1, pd.rot * pd.meas) <= 1e-12);
    CHECK(unitarity_defect(pd.rot) <= 1e-12);

    // Equal singular values (a scaled unitary): reconstruction must hold,
    // with no particular eigenvector ordering promised.
    const double th = 0.7;
    const Mat2 rot{Complex(std::cos(th)), Complex(-std::sin(th)), Complex(std::sin(th)),
                   Complex(std::cos(th))};
    const Mat2 scaled = 3.0 * rot;
    const PolarDecomposition pd2 = polar_decompose(scaled);
    CHECK(distance(scaled, pd2.rot * pd2.meas) <= 1e-12);
    CHECK(distance(pd2.meas, Mat2::diag(3.0, 3.0)) <= 1e-12);
}

TEST_CASE("qubit model validates its parameters", "[qubit-core]") {
    CHECK_THROWS_AS(QubitModel(-1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(QubitModel(1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(QubitModel(1.0, 2.0), std::invalid_argument);
    const QubitModel q(2.0, 0.5);
    CHECK(distance(q.hamiltonian(), Mat2::diag(-1.0, 1.0)) == 0.0);
}

TEST_CASE("density matrix validation catches broken invariants", "[qubit-core]") {
    CHECK_THROWS(DensityMatrix::checked(Mat2{0.5, 0.2, 0.3, 0.5}));          // not Hermitian
    CHECK_THROWS(DensityMatrix::checked(Mat2::diag(0.7, 0.7)));              // trace != 1
    CHECK_THROWS(DensityMatrix::checked(Mat2::diag(1.5, -0.5)));             // not PSD
    CHECK_NOTHROW(DensityMatrix::checked(Mat2::diag(0.25, 0.75)));
}
