#pragma once

#include <complex>
#include <vector>

#include "crest/tensor.hpp"

namespace crest {

// Independent solvers for the ridge-regression filter objective
//   min_W ||W (*) X - Y||^2 + lambda ||W||^2
// under circular convolution, used as ground truth against the
// gradient-descent base layer. Single channel throughout.

// Full-size circular filter with its cached spectrum.
struct CircularFilter {
    Tensor3 taps;                               // 1 x H x W
    std::vector<std::complex<double>> spectrum; // row-major H x W

    // Max |dft(taps) - spectrum| over all bins; consistency invariant.
    double spectrum_mismatch() const;
};

// Naive separable 2-D DFT; correctness is pinned by the spatial-loop
// correlation oracle, so no fast radix is needed at these sizes.
std::vector<std::complex<double>> dft2(const Tensor3& x);
Tensor3 idft2_real(const std::vector<std::complex<double>>& f, int h, int w);

// Per-frequency ridge solution: What = conj(Xhat) .* Yhat / (|Xhat|^2 + lambda).
// Throws NumericError if lambda == 0 and X has a (near-)zero spectral bin.
CircularFilter solve_dcf_closed_form(const Tensor3& x, const Tensor3& y,
                                     double lambda);

// Dense witness: builds the explicit circulant system and solves the normal
// equations (C^T C + lambda I) w = C^T y. Refuses dims > 16x16.
CircularFilter solve_dcf_direct(const Tensor3& x, const Tensor3& y,
                                double lambda);

// Circular filtering with wraparound: out[p] = sum_q w[q] * x[(p - q) mod dims].
// OpenMP over output rows; fixed per-element accumulation order.
ResponseMap circular_response(const CircularFilter& filter, const Tensor3& x);

// Objective value of a filter on a training pair; used for cross-checks.
double dcf_objective(const CircularFilter& filter, const Tensor3& x,
                     const Tensor3& y, double lambda);

// Frequency-domain value of the same objective (Parseval route).
double dcf_objective_freq(const CircularFilter& filter, const Tensor3& x,
                          const Tensor3& y, double lambda);

namespace serial {
ResponseMap circular_response(const CircularFilter& filter, const Tensor3& x);
}

}  // namespace crest
