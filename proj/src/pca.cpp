#include "crest/pca.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace crest {

SymmetricEigen eigh(const std::vector<double>& sym, int n) {
    if (sym.size() != static_cast<size_t>(n) * n)
        throw ShapeError("eigh: matrix size " + std::to_string(sym.size()) +
                         " != " + std::to_string(n) + "^2");

    std::vector<double> a = sym;
    std::vector<double> v(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i) * n + i] = 1.0;

    auto A = [&](int r, int c) -> double& { return a[static_cast<size_t>(r) * n + c]; };
    auto V = [&](int r, int c) -> double& { return v[static_cast<size_t>(r) * n + c]; };

    // Cyclic Jacobi sweeps until off-diagonal mass vanishes.
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
        if (off < 1e-30) break;

        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = A(k, p), akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = A(p, k), aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = V(k, p), vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
    }

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return A(i, i) > A(j, j); });

    SymmetricEigen r;
    r.values.resize(n);
    r.vectors.assign(static_cast<size_t>(n) * n, 0.0);
    for (int k = 0; k < n; ++k) {
        r.values[k] = A(order[k], order[k]);
        for (int i = 0; i < n; ++i)
            r.vectors[static_cast<size_t>(i) * n + k] = V(i, order[k]);
    }
    return r;
}

PcaProjection fit_pca(const Tensor3& features, int out_channels) {
    const int c = features.channels;
    const size_t area = static_cast<size_t>(features.height) * features.width;
    if (out_channels <= 0 || out_channels > c)
        throw ArgumentError("fit_pca: out_channels " + std::to_string(out_channels) +
                            " not in [1, " + std::to_string(c) + "]");
    if (area < static_cast<size_t>(c))
        throw ArgumentError("fit_pca: spatial area " + std::to_string(area) +
                            " < channels " + std::to_string(c) +
                            ", not enough samples");

    PcaProjection proj;
    proj.in_dim = c;
    proj.out_dim = out_channels;
    proj.mean.assign(c, 0.0);
    for (int i = 0; i < c; ++i) {
        const double* p = features.channel(i);
        double m = 0.0;
        for (size_t k = 0; k < area; ++k) m += p[k];
        proj.mean[i] = m / static_cast<double>(area);
    }

    // Sample covariance over spatial locations, 1/(N-1).
    std::vector<double> cov(static_cast<size_t>(c) * c, 0.0);
    for (int i = 0; i < c; ++i) {
        const double* pi = features.channel(i);
        for (int j = i; j < c; ++j) {
            const double* pj = features.channel(j);
            double acc = 0.0;
            for (size_t k = 0; k < area; ++k)
                acc += (pi[k] - proj.mean[i]) * (pj[k] - proj.mean[j]);
            const double val = acc / static_cast<double>(area - 1);
            cov[static_cast<size_t>(i) * c + j] = val;
            cov[static_cast<size_t>(j) * c + i] = val;
        }
    }

    SymmetricEigen eig = eigh(cov, c);
    proj.eigenvalues = eig.values;

    const double tol = std::max(eig.values[0], 0.0) * 1e-12;
    proj.basis.assign(static_cast<size_t>(c) * out_channels, 0.0);
    for (int k = 0; k < out_channels; ++k) {
        if (eig.values[k] <= tol) {
            proj.rank_deficient = true;  // keep rank, zero-pad the rest
            continue;
        }
        // Sign convention: largest-magnitude entry positive.
        int arg = 0;
        for (int i = 1; i < c; ++i)
            if (std::abs(eig.vectors[static_cast<size_t>(i) * c + k]) >
                std::abs(eig.vectors[static_cast<size_t>(arg) * c + k]))
                arg = i;
        const double sign =
            eig.vectors[static_cast<size_t>(arg) * c + k] < 0.0 ? -1.0 : 1.0;
        for (int i = 0; i < c; ++i)
            proj.basis[static_cast<size_t>(i) * out_channels + k] =
                sign * eig.vectors[static_cast<size_t>(i) * c + k];
    }
    return proj;
}

Tensor3 apply_pca(const Tensor3& features, const PcaProjection& proj) {
    if (features.channels != proj.in_dim)
        throw ShapeError("apply_pca: features " + features.shape_str() +
                         " vs projection input dim " + std::to_string(proj.in_dim));
    Tensor3 out(proj.out_dim, features.height, features.width);
    const size_t area = static_cast<size_t>(features.height) * features.width;
    for (int k = 0; k < proj.out_dim; ++k) {
        double* dst = out.channel(k);
        for (int i = 0; i < proj.in_dim; ++i) {
            const double b = proj.basis_at(i, k);
            if (b == 0.0) continue;
            const double* src = features.channel(i);
            const double mu = proj.mean[i];
            for (size_t p = 0; p < area; ++p) dst[p] += b * (src[p] - mu);
        }
    }
    return out;
}

}  // namespace crest
