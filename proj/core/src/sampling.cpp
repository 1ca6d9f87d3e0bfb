#include "semiconj/sampling.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace semiconj {

namespace {

constexpr double kPi = 3.14159265358979323846;

double fract(double x) { return x - std::floor(x); }

/// Root of x^(d+1) = x + 1 (the "plastic" generalization of the golden ratio).
double harmonious_number(int d) {
    double x = 1.5;
    for (int i = 0; i < 64; ++i) {
        x = std::pow(1.0 + x, 1.0 / (d + 1));
    }
    return x;
}

}  // namespace

std::vector<double> kronecker_point(std::uint64_t k, int dim, std::uint64_t seed) {
    if (dim < 1) throw std::invalid_argument("kronecker_point: dim must be positive");
    const double g = harmonious_number(dim);
    std::vector<double> u(static_cast<std::size_t>(dim));
    // A seed-derived Cranley-Patterson shift keeps the sequence deterministic
    // per seed without touching its equidistribution.
    const double shift = fract(static_cast<double>(seed % 104729) * 0.6180339887498949);
    double alpha = 1.0;
    for (int i = 0; i < dim; ++i) {
        alpha /= g;
        u[static_cast<std::size_t>(i)] = fract(alpha * static_cast<double>(k + 1) + shift);
    }
    return u;
}

std::vector<Vec> unit_directions(int dimension, int count, std::uint64_t seed) {
    if (dimension < 1) throw std::invalid_argument("unit_directions: dimension must be positive");
    if (count < 1) throw std::invalid_argument("unit_directions: count must be positive");

    std::vector<Vec> dirs;
    dirs.reserve(static_cast<std::size_t>(count));

    if (dimension == 1) {
        for (int k = 0; k < count; ++k) {
            Vec u(1);
            u[0] = (k % 2 == 0) ? 1.0 : -1.0;
            dirs.push_back(u);
        }
        return dirs;
    }

    if (dimension == 2) {
        const double offset = fract(static_cast<double>(seed % 104729) * 0.6180339887498949);
        for (int k = 0; k < count; ++k) {
            const double theta = 2.0 * kPi * ((k + 0.5) / count + offset);
            Vec u(2);
            u[0] = std::cos(theta);
            u[1] = std::sin(theta);
            dirs.push_back(u);
        }
        return dirs;
    }

    if (dimension == 3) {
        // Fibonacci sphere.
        const double golden_angle = kPi * (3.0 - std::sqrt(5.0));
        const double offset = fract(static_cast<double>(seed % 104729) * 0.6180339887498949);
        for (int k = 0; k < count; ++k) {
            const double z = 1.0 - 2.0 * (k + 0.5) / count;
            const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double phi = golden_angle * k + 2.0 * kPi * offset;
            Vec u(3);
            u[0] = rho * std::cos(phi);
            u[1] = rho * std::sin(phi);
            u[2] = z;
            dirs.push_back(u);
        }
        return dirs;
    }

    // n > 3: Kronecker points mapped through Box-Muller, then normalized.
    const int pairs = (dimension + 1) / 2;
    for (int k = 0; k < count; ++k) {
        const auto u01 = kronecker_point(static_cast<std::uint64_t>(k), 2 * pairs, seed);
        Vec u(dimension);
        for (int j = 0; j < pairs; ++j) {
            const double u1 = std::min(std::max(u01[static_cast<std::size_t>(2 * j)], 1e-12), 1.0 - 1e-12);
            const double u2 = u01[static_cast<std::size_t>(2 * j + 1)];
            const double radius = std::sqrt(-2.0 * std::log(u1));
            const double angle = 2.0 * kPi * u2;
            if (2 * j < dimension) u[2 * j] = radius * std::cos(angle);
            if (2 * j + 1 < dimension) u[2 * j + 1] = radius * std::sin(angle);
        }
        const double norm = u.norm();
        if (norm < 1e-12) {
            u.setZero();
            u[0] = 1.0;
        } else {
            u /= norm;
        }
        dirs.push_back(u);
    }
    return dirs;
}

std::uint64_t seed_from_env(std::uint64_t fallback) {
    const char* raw = std::getenv("SEMICONJ_SEED");
    if (raw == nullptr || raw[0] == '\0') return fallback;
    try {
        return static_cast<std::uint64_t>(std::stoull(std::string(raw)));
    } catch (const std::exception&) {
        throw std::invalid_argument("SEMICONJ_SEED must be a nonnegative integer");
    }
}

}  // namespace semiconj
