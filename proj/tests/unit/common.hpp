#pragma once

#include "tunnel/harness.hpp"

#include <Eigen/Dense>

#include <random>

namespace testing {

// Built once per test binary; the phase and amplitude tables cost ~0.5 s.
inline const tunnel::SweepContext& model_a_context() {
    static const tunnel::SweepContext ctx = [] {
        tunnel::SweepConfig cfg;
        return tunnel::make_context(cfg);
    }();
    return ctx;
}

inline const tunnel::SweepContext& model_b_context() {
    static const tunnel::SweepContext ctx = [] {
        tunnel::SweepConfig cfg;
        cfg.model_name = "ModelB";
        return tunnel::make_context(cfg);
    }();
    return ctx;
}

inline Eigen::VectorXcd random_vector(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> d;
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) v[i] = {d(rng), d(rng)};
    return v;
}

}  // namespace testing
