#pragma once

// Test-only reference computations. Nothing here calls into the solver it
// is used to check.

#include <glucest/dataset.hpp>
#include <glucest/rng.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace glucest::oracle {

// cos^2(Xw, g) = (w'X'g)^2 / (w'X'Xw * g'g), evaluated on the L x L pencil.
inline double pencil_cos2(const Matrix& gram, const Vector& u, double gg, const Vector& w) {
    const double num = w.dot(u);
    const double den = w.dot(gram * w);
    return den > 0.0 ? num * num / (den * gg) : 0.0;
}

// Largest generalized eigenvalue of (X'gg'X, X'X), divided by g'g.
inline double pencil_max_cos2(const Matrix& windows, const Vector& g) {
    const Matrix gram = windows.transpose() * windows;
    const Vector u = windows.transpose() * g;
    const Matrix sa = u * u.transpose();
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(sa, gram);
    return es.eigenvalues().maxCoeff() / g.squaredNorm();
}

inline Vector random_unit(Rng& rng, Eigen::Index n) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.normal();
    return v / v.norm();
}

// Best cos^2 over `samples` random unit directions, then polished by a
// shrinking-step random hill climb.
inline double random_search_max_cos2(const Matrix& windows, const Vector& g, Rng& rng, int samples) {
    const Matrix gram = windows.transpose() * windows;
    const Vector u = windows.transpose() * g;
    const double gg = g.squaredNorm();
    const Eigen::Index n = windows.cols();

    Vector best = random_unit(rng, n);
    double best_q = pencil_cos2(gram, u, gg, best);
    for (int i = 1; i < samples; ++i) {
        const Vector w = random_unit(rng, n);
        const double q = pencil_cos2(gram, u, gg, w);
        if (q > best_q) {
            best_q = q;
            best = w;
        }
    }
    for (double step = 0.1; step > 1e-10; step *= 0.5) {
        for (int tries = 0; tries < 60; ++tries) {
            Vector w = best + step * random_unit(rng, n);
            w /= w.norm();
            const double q = pencil_cos2(gram, u, gg, w);
            if (q > best_q) {
                best_q = q;
                best = w;
            }
        }
    }
    return best_q;
}

// Raw uncentered cos^2 of two vectors.
inline double cos2(const Vector& a, const Vector& b) {
    const double d = a.dot(b);
    return d * d / (a.squaredNorm() * b.squaredNorm());
}

} // namespace glucest::oracle
