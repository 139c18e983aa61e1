#include "crest/selfcheck.hpp"

#include <cmath>
#include <functional>
#include <sstream>

#include "crest/adam.hpp"
#include "crest/conv.hpp"
#include "crest/dcf.hpp"
#include "crest/label.hpp"
#include "crest/metrics.hpp"
#include "crest/model.hpp"
#include "crest/pca.hpp"
#include "crest/rng.hpp"

namespace crest {

namespace {

Tensor3 random_tensor(Rng& rng, int c, int h, int w, double scale = 1.0) {
    Tensor3 t(c, h, w);
    for (double& v : t.data) v = rng.uniform(-scale, scale);
    return t;
}

double rel_err(double a, double b) {
    const double denom = std::max({std::abs(a), std::abs(b), 1e-8});
    return std::abs(a - b) / denom;
}

struct Battery {
    std::string inject;
    std::vector<CheckResult> results;

    void record(const std::string& name, bool pass, const std::string& detail) {
        results.push_back({name, pass, detail});
    }

    // fault injection: flips the named check's comparison input.
    double fault(const std::string& name) const { return inject == name ? 1e-3 : 0.0; }
};

void check_conv_forward(Battery& b) {
    Rng rng(11);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const int ic = 1 + static_cast<int>(rng.uniform_index(3));
        const int oc = 1 + static_cast<int>(rng.uniform_index(3));
        const int k = 1 + 2 * static_cast<int>(rng.uniform_index(3));
        Tensor3 x = random_tensor(rng, ic, 5 + static_cast<int>(rng.uniform_index(4)),
                                  5 + static_cast<int>(rng.uniform_index(4)));
        ConvLayer layer(ic, oc, k, k);
        layer.init_gaussian(rng, 0.5);
        Tensor3 fast = conv2d_forward(x, layer);
        Tensor3 ref = serial::conv2d_forward(x, layer);
        for (size_t j = 0; j < fast.data.size(); ++j)
            worst = std::max(worst, std::abs(fast.data[j] + b.fault("conv_forward") -
                                             ref.data[j]));
    }
    b.record("conv_forward", worst == 0.0,
             "parallel vs serial max abs diff = " + std::to_string(worst));
}

// Scalar objective for gradient checks: sum(out .* R).
void check_conv_backward(Battery& b) {
    Rng rng(13);
    double worst = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < 20; ++i) {
        const int ic = 1 + static_cast<int>(rng.uniform_index(2));
        const int oc = 1 + static_cast<int>(rng.uniform_index(2));
        const int k = 3;
        Tensor3 x = random_tensor(rng, ic, 6, 6);
        ConvLayer layer(ic, oc, k, k);
        layer.init_gaussian(rng, 0.5);
        Tensor3 r = random_tensor(rng, oc, 6, 6);

        ConvGrads g = conv2d_backward(x, layer, r);
        auto objective = [&](const Tensor3& xx, const ConvLayer& ll) {
            Tensor3 out = conv2d_forward(xx, ll);
            double s = 0.0;
            for (size_t j = 0; j < out.data.size(); ++j) s += out.data[j] * r.data[j];
            return s;
        };

        for (size_t j = 0; j < x.data.size(); ++j) {
            Tensor3 xp = x, xm = x;
            xp.data[j] += h;
            xm.data[j] -= h;
            const double fd = (objective(xp, layer) - objective(xm, layer)) / (2 * h);
            worst = std::max(worst, rel_err(g.input.data[j] + b.fault("conv_backward"), fd));
        }
        for (size_t j = 0; j < layer.weights.size(); ++j) {
            ConvLayer lp = layer, lm = layer;
            lp.weights[j] += h;
            lm.weights[j] -= h;
            const double fd = (objective(x, lp) - objective(x, lm)) / (2 * h);
            worst = std::max(worst, rel_err(g.weights[j] + b.fault("conv_backward"), fd));
        }
        for (size_t j = 0; j < layer.bias.size(); ++j) {
            ConvLayer lp = layer, lm = layer;
            lp.bias[j] += h;
            lm.bias[j] -= h;
            const double fd = (objective(x, lp) - objective(x, lm)) / (2 * h);
            worst = std::max(worst, rel_err(g.bias[j] + b.fault("conv_backward"), fd));
        }
    }
    b.record("conv_backward", worst < 1e-6,
             "max rel err vs finite differences = " + std::to_string(worst));
}

void check_relu_l2(Battery& b) {
    Rng rng(17);
    double worst = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < 20; ++i) {
        Tensor3 x = random_tensor(rng, 2, 4, 4);
        Tensor3 r = random_tensor(rng, 2, 4, 4);
        Tensor3 grad = relu_backward(x, r);
        for (size_t j = 0; j < x.data.size(); ++j) {
            if (std::abs(x.data[j]) < 1e-3) continue;  // away from the kink
            Tensor3 xp = x, xm = x;
            xp.data[j] += h;
            xm.data[j] -= h;
            double fp = 0.0, fm = 0.0;
            Tensor3 op = relu_forward(xp), om = relu_forward(xm);
            for (size_t q = 0; q < op.data.size(); ++q) {
                fp += op.data[q] * r.data[q];
                fm += om.data[q] * r.data[q];
            }
            worst = std::max(worst, rel_err(grad.data[j] + b.fault("relu_l2"),
                                            (fp - fm) / (2 * h)));
        }
        Tensor3 t = random_tensor(rng, 2, 4, 4);
        L2Loss loss = l2_loss(x, t);
        for (size_t j = 0; j < x.data.size(); ++j) {
            Tensor3 xp = x, xm = x;
            xp.data[j] += h;
            xm.data[j] -= h;
            const double fd =
                (l2_loss(xp, t).value - l2_loss(xm, t).value) / (2 * h);
            worst = std::max(worst,
                             rel_err(loss.grad_pred.data[j] + b.fault("relu_l2"), fd));
        }
    }
    b.record("relu_l2", worst < 1e-6,
             "max rel err vs finite differences = " + std::to_string(worst));
}

void check_adam(Battery& b) {
    // t = 1 hand evaluation: bias-corrected first step has magnitude ~lr.
    std::vector<double> p{1.0};
    std::vector<double> g{1.0};
    AdamState st(1);
    adam_step(p, g, st, 0.1);
    const double expect = 1.0 - 0.1 * 1.0 / (1.0 + 1e-8);
    bool ok = std::abs(p[0] + b.fault("adam") - expect) < 1e-12;

    // Zero gradient is a fixed point; lr = 0 never moves.
    std::vector<double> p2{0.7, -0.3};
    std::vector<double> zeros{0.0, 0.0};
    AdamState st2(2);
    adam_step(p2, zeros, st2, 0.5);
    ok = ok && p2[0] == 0.7 && p2[1] == -0.3;
    std::vector<double> p3{0.7};
    std::vector<double> g3{2.0};
    AdamState st3(1);
    adam_step(p3, g3, st3, 0.0);
    ok = ok && p3[0] == 0.7;

    b.record("adam", ok, "first-step value and fixed points");
}

void check_model_grads(Battery& b) {
    Rng rng(23);
    CrestModel model(2, 3, 3, 1e-4, BranchFlags::spatiotemporal(), 99);
    Tensor3 x = random_tensor(rng, 2, 7, 7, 0.5);
    Tensor3 x1 = random_tensor(rng, 2, 7, 7, 0.5);
    model.set_temporal_input(x1);
    GaussianLabelSpec spec{7, 7, 1.0, 1.0};
    Tensor3 y = gaussian_label(spec);

    auto lg = model.loss_and_grads(x, y);
    auto layers = model.parameter_layers();
    const double h = 1e-5;
    double worst = 0.0;
    // Spot-check a sample of parameters per layer.
    for (size_t li = 0; li < layers.size(); ++li) {
        for (int s = 0; s < 12; ++s) {
            const size_t j = rng.uniform_index(layers[li]->layer.weights.size());
            const double orig = layers[li]->layer.weights[j];
            layers[li]->layer.weights[j] = orig + h;
            const double fp = model.loss_and_grads(x, y).loss;
            layers[li]->layer.weights[j] = orig - h;
            const double fm = model.loss_and_grads(x, y).loss;
            layers[li]->layer.weights[j] = orig;
            worst = std::max(worst, rel_err(lg.weight_grads[li][j] +
                                            b.fault("model_grads"), (fp - fm) / (2 * h)));
        }
    }
    b.record("model_grads", worst < 1e-6,
             "max rel err vs finite differences = " + std::to_string(worst));
}

void check_dcf_oracles(Battery& b) {
    Rng rng(29);
    double worst_taps = 0.0, worst_resp = 0.0, worst_parseval = 0.0;
    for (double lambda : {1e-4, 0.1, 10.0}) {
        for (int i = 0; i < 4; ++i) {
            Tensor3 x = random_tensor(rng, 1, 6, 6);
            Tensor3 y = random_tensor(rng, 1, 6, 6);
            CircularFilter fa = solve_dcf_closed_form(x, y, lambda);
            CircularFilter fb = solve_dcf_direct(x, y, lambda);
            for (size_t j = 0; j < fa.taps.data.size(); ++j)
                worst_taps = std::max(worst_taps, std::abs(fa.taps.data[j] -
                                                           fb.taps.data[j]));
            ResponseMap fast = circular_response(fa, x);
            ResponseMap ref = serial::circular_response(fa, x);
            for (size_t j = 0; j < fast.data.size(); ++j)
                worst_resp = std::max(worst_resp, std::abs(fast.data[j] - ref.data[j]));
            worst_parseval = std::max(worst_parseval,
                                      std::abs(dcf_objective(fa, x, y, lambda) -
                                               dcf_objective_freq(fa, x, y, lambda)));
        }
    }
    worst_taps += std::abs(b.fault("dcf_oracles"));
    b.record("dcf_oracles",
             worst_taps < 1e-8 && worst_resp == 0.0 && worst_parseval < 1e-8,
             "taps " + std::to_string(worst_taps) + ", response " +
                 std::to_string(worst_resp) + ", parseval " +
                 std::to_string(worst_parseval));
}

void check_pca(Battery& b) {
    Rng rng(31);
    Tensor3 f = random_tensor(rng, 4, 8, 8);
    PcaProjection proj = fit_pca(f, 4);
    // Orthonormality.
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            double dot = 0.0;
            for (int r = 0; r < 4; ++r) dot += proj.basis_at(r, i) * proj.basis_at(r, j);
            worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }
    // Full-rank round trip reconstructs centered features.
    Tensor3 out = apply_pca(f, proj);
    double recon = 0.0;
    for (int yy = 0; yy < 8; ++yy)
        for (int xx = 0; xx < 8; ++xx)
            for (int c = 0; c < 4; ++c) {
                double back = 0.0;
                for (int k = 0; k < 4; ++k)
                    back += proj.basis_at(c, k) * out.at(k, yy, xx);
                recon = std::max(recon, std::abs(back - (f.at(c, yy, xx) -
                                                         proj.mean[c])));
            }
    worst += std::abs(b.fault("pca"));
    b.record("pca", worst < 1e-8 && recon < 1e-8,
             "orthonormality " + std::to_string(worst) + ", reconstruction " +
                 std::to_string(recon));
}

void check_metrics(Battery& b) {
    bool ok = std::abs(iou(BBox{0, 0, 2, 2}, BBox{0, 0, 2, 2}) - 1.0) < 1e-15;
    ok = ok && iou(BBox{0, 0, 2, 2}, BBox{5, 5, 2, 2}) == 0.0;
    ok = ok && std::abs(iou(BBox{0, 0, 2, 2}, BBox{1, 0, 2, 2}) - 1.0 / 3.0) < 1e-15;

    OpeResult r;
    r.center_errors = {0.0, 25.0, 10.0, 3.0};
    r.overlaps = {1.0, 0.2, 0.8, 0.9};
    compute_curves(r);
    ok = ok && r.precision20 == 0.75 && r.precision[30] == 1.0;
    for (int t = 1; t < kPrecisionThresholds; ++t)
        ok = ok && r.precision[t] >= r.precision[t - 1];
    for (int k = 1; k < kSuccessThresholds; ++k)
        ok = ok && r.success[k] <= r.success[k - 1];
    ok = ok && b.fault("metrics") == 0.0;
    b.record("metrics", ok, "fixtures and monotonicity");
}

void check_gaussian_label(Battery& b) {
    GaussianLabelSpec spec{5, 5, 1.0, 1.0};
    Tensor3 y = gaussian_label(spec);
    bool ok = y.at(0, 2, 2) == 1.0;
    ok = ok && std::abs(y.at(0, 2, 3) - std::exp(-0.5)) < 1e-15;
    ok = ok && y.at(0, 2, 1) == y.at(0, 2, 3) && y.at(0, 1, 2) == y.at(0, 3, 2);
    ok = ok && y.argmax().value == 1.0;
    ok = ok && b.fault("gaussian_label") == 0.0;
    b.record("gaussian_label", ok, "peak, symmetry, closed form");
}

}  // namespace

std::vector<CheckResult> run_selfcheck(const std::string& inject_fault) {
    Battery b;
    b.inject = inject_fault;
    check_conv_forward(b);
    check_conv_backward(b);
    check_relu_l2(b);
    check_adam(b);
    check_model_grads(b);
    check_dcf_oracles(b);
    check_pca(b);
    check_metrics(b);
    check_gaussian_label(b);
    return b.results;
}

}  // namespace crest
