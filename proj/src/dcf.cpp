#include "crest/dcf.hpp"

#include <cmath>

namespace crest {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

void check_single_channel_pair(const Tensor3& x, const Tensor3& y,
                               const char* where) {
    if (x.channels != 1 || y.channels != 1)
        throw ShapeError(std::string(where) + ": single-channel only, got " +
                         x.shape_str() + " and " + y.shape_str());
    require_same_shape(x, y, where);
}

using cvec = std::vector<std::complex<double>>;

// 1-D naive DFT along rows, then columns.
cvec dft_rows(const cvec& in, int h, int w, bool inverse) {
    cvec out(in.size());
    const double sgn = inverse ? 1.0 : -1.0;
    for (int y = 0; y < h; ++y) {
        for (int k = 0; k < w; ++k) {
            std::complex<double> acc(0.0, 0.0);
            for (int x = 0; x < w; ++x) {
                const double a = sgn * kTau * k * x / w;
                acc += in[static_cast<size_t>(y) * w + x] *
                       std::complex<double>(std::cos(a), std::sin(a));
            }
            out[static_cast<size_t>(y) * w + k] = acc;
        }
    }
    return out;
}

cvec dft_cols(const cvec& in, int h, int w, bool inverse) {
    cvec out(in.size());
    const double sgn = inverse ? 1.0 : -1.0;
    for (int x = 0; x < w; ++x) {
        for (int k = 0; k < h; ++k) {
            std::complex<double> acc(0.0, 0.0);
            for (int y = 0; y < h; ++y) {
                const double a = sgn * kTau * k * y / h;
                acc += in[static_cast<size_t>(y) * w + x] *
                       std::complex<double>(std::cos(a), std::sin(a));
            }
            out[static_cast<size_t>(k) * w + x] = acc;
        }
    }
    return out;
}

}  // namespace

std::vector<std::complex<double>> dft2(const Tensor3& x) {
    if (x.channels != 1)
        throw ShapeError("dft2: single-channel only, got " + x.shape_str());
    cvec c(x.data.size());
    for (size_t i = 0; i < x.data.size(); ++i) c[i] = x.data[i];
    return dft_cols(dft_rows(c, x.height, x.width, false), x.height, x.width, false);
}

Tensor3 idft2_real(const std::vector<std::complex<double>>& f, int h, int w) {
    if (f.size() != static_cast<size_t>(h) * w)
        throw ShapeError("idft2_real: spectrum size " + std::to_string(f.size()) +
                         " != " + std::to_string(h) + "x" + std::to_string(w));
    cvec c = dft_cols(dft_rows(f, h, w, true), h, w, true);
    Tensor3 out(1, h, w);
    const double scale = 1.0 / (static_cast<double>(h) * w);
    for (size_t i = 0; i < c.size(); ++i) out.data[i] = c[i].real() * scale;
    return out;
}

double CircularFilter::spectrum_mismatch() const {
    cvec f = dft2(taps);
    double worst = 0.0;
    for (size_t i = 0; i < f.size(); ++i)
        worst = std::max(worst, std::abs(f[i] - spectrum[i]));
    return worst;
}

CircularFilter solve_dcf_closed_form(const Tensor3& x, const Tensor3& y,
                                     double lambda) {
    check_single_channel_pair(x, y, "solve_dcf_closed_form");
    if (lambda < 0.0)
        throw ArgumentError("solve_dcf_closed_form: lambda must be >= 0");

    cvec xf = dft2(x);
    cvec yf = dft2(y);
    cvec wf(xf.size());
    for (size_t i = 0; i < xf.size(); ++i) {
        const double mag2 = std::norm(xf[i]);
        if (lambda == 0.0 && mag2 < 1e-24)
            throw NumericError(
                "solve_dcf_closed_form: singular system, zero spectral bin " +
                std::to_string(i) + " with lambda = 0");
        wf[i] = std::conj(xf[i]) * yf[i] / (mag2 + lambda);
    }

    CircularFilter filt;
    filt.taps = idft2_real(wf, x.height, x.width);
    filt.spectrum = std::move(wf);
    return filt;
}

CircularFilter solve_dcf_direct(const Tensor3& x, const Tensor3& y,
                                double lambda) {
    check_single_channel_pair(x, y, "solve_dcf_direct");
    if (x.height > 16 || x.width > 16)
        throw ArgumentError("solve_dcf_direct: dims " + x.shape_str() +
                            " exceed the 16x16 dense-system limit");

    const int h = x.height, w = x.width;
    const int n = h * w;

    // response[p] = sum_q C[p][q] w[q] with C[p][q] = x[(p - q) mod dims].
    std::vector<double> c(static_cast<size_t>(n) * n);
    for (int py = 0; py < h; ++py)
        for (int px = 0; px < w; ++px)
            for (int qy = 0; qy < h; ++qy)
                for (int qx = 0; qx < w; ++qx) {
                    const int dy = ((py - qy) % h + h) % h;
                    const int dx = ((px - qx) % w + w) % w;
                    c[static_cast<size_t>(py * w + px) * n + (qy * w + qx)] =
                        x.at(0, dy, dx);
                }

    // Normal equations A = C^T C + lambda I, b = C^T y.
    std::vector<double> a(static_cast<size_t>(n) * n, 0.0);
    std::vector<double> b(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int k = 0; k < n; ++k)
                acc += c[static_cast<size_t>(k) * n + i] * c[static_cast<size_t>(k) * n + j];
            a[static_cast<size_t>(i) * n + j] = acc + (i == j ? lambda : 0.0);
        }
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k)
            acc += c[static_cast<size_t>(k) * n + i] * y.data[k];
        b[i] = acc;
    }

    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[static_cast<size_t>(r) * n + col]) >
                std::abs(a[static_cast<size_t>(piv) * n + col]))
                piv = r;
        if (std::abs(a[static_cast<size_t>(piv) * n + col]) < 1e-300)
            throw NumericError("solve_dcf_direct: singular normal equations");
        if (piv != col) {
            for (int j = 0; j < n; ++j)
                std::swap(a[static_cast<size_t>(piv) * n + j],
                          a[static_cast<size_t>(col) * n + j]);
            std::swap(b[piv], b[col]);
        }
        const double d = a[static_cast<size_t>(col) * n + col];
        for (int r = col + 1; r < n; ++r) {
            const double f = a[static_cast<size_t>(r) * n + col] / d;
            if (f == 0.0) continue;
            for (int j = col; j < n; ++j)
                a[static_cast<size_t>(r) * n + j] -= f * a[static_cast<size_t>(col) * n + j];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> sol(n);
    for (int i = n - 1; i >= 0; --i) {
        double acc = b[i];
        for (int j = i + 1; j < n; ++j)
            acc -= a[static_cast<size_t>(i) * n + j] * sol[j];
        sol[i] = acc / a[static_cast<size_t>(i) * n + i];
    }

    CircularFilter filt;
    filt.taps = Tensor3(1, h, w);
    filt.taps.data = std::move(sol);
    filt.spectrum = dft2(filt.taps);
    return filt;
}

ResponseMap circular_response(const CircularFilter& filter, const Tensor3& x) {
    require_same_shape(filter.taps, x, "circular_response");
    const int h = x.height, w = x.width;
    ResponseMap out(1, h, w);
#pragma omp parallel for schedule(static)
    for (int py = 0; py < h; ++py)
        for (int px = 0; px < w; ++px) {
            double acc = 0.0;
            for (int qy = 0; qy < h; ++qy)
                for (int qx = 0; qx < w; ++qx)
                    acc += filter.taps.at(0, qy, qx) *
                           x.at(0, ((py - qy) % h + h) % h, ((px - qx) % w + w) % w);
            out.at(0, py, px) = acc;
        }
    return out;
}

double dcf_objective(const CircularFilter& filter, const Tensor3& x,
                     const Tensor3& y, double lambda) {
    ResponseMap r = serial::circular_response(filter, x);
    double obj = 0.0;
    for (size_t i = 0; i < r.data.size(); ++i) {
        const double d = r.data[i] - y.data[i];
        obj += d * d;
    }
    for (double v : filter.taps.data) obj += lambda * v * v;
    return obj;
}

double dcf_objective_freq(const CircularFilter& filter, const Tensor3& x,
                          const Tensor3& y, double lambda) {
    cvec xf = dft2(x);
    cvec yf = dft2(y);
    const double n = static_cast<double>(x.height) * x.width;
    double obj = 0.0;
    for (size_t i = 0; i < xf.size(); ++i) {
        obj += std::norm(filter.spectrum[i] * xf[i] - yf[i]);
        obj += lambda * std::norm(filter.spectrum[i]);
    }
    return obj / n;
}

namespace serial {

ResponseMap circular_response(const CircularFilter& filter, const Tensor3& x) {
    require_same_shape(filter.taps, x, "circular_response");
    const int h = x.height, w = x.width;
    ResponseMap out(1, h, w);
    for (int py = 0; py < h; ++py)
        for (int px = 0; px < w; ++px) {
            double acc = 0.0;
            for (int qy = 0; qy < h; ++qy)
                for (int qx = 0; qx < w; ++qx)
                    acc += filter.taps.at(0, qy, qx) *
                           x.at(0, ((py - qy) % h + h) % h, ((px - qx) % w + w) % w);
            out.at(0, py, px) = acc;
        }
    return out;
}

}  // namespace serial

}  // namespace crest
