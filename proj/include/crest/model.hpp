#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "crest/adam.hpp"
#include "crest/conv.hpp"
#include "crest/label.hpp"
#include "crest/rng.hpp"

namespace crest {

// Which mappings contribute to the response: the base correlation layer is
// always on; the residual branches are optional.
struct BranchFlags {
    bool spatial = true;
    bool temporal = true;

    static BranchFlags base_only() { return {false, false}; }
    static BranchFlags with_spatial() { return {true, false}; }
    static BranchFlags spatiotemporal() { return {true, true}; }

    std::string str() const {
        if (spatial && temporal) return "spatiotemporal";
        if (spatial) return "spatial";
        return "base";
    }
};

BranchFlags parse_branches(const std::string& s);

// One trainable conv layer plus its optimizer state.
struct TrainableLayer {
    ConvLayer layer;
    AdamState w_state;
    AdamState b_state;

    void reset_state() {
        w_state = AdamState(layer.weights.size());
        b_state = AdamState(layer.bias.size());
    }
};

// Residual branch: 1x1 (C -> width) -> ReLU -> 3x3 (width -> width) -> ReLU
// -> 3x3 (width -> 1). Kept strictly lighter than the base layer.
inline constexpr int kResidualWidth = 32;

// Response regressor: a single correlation-style conv layer sized to cover
// the target, plus spatial and temporal residual branches. The temporal
// branch always reads the frozen first-frame features.
class CrestModel {
public:
    CrestModel() = default;
    // base_kh/base_kw odd; in_channels is the (post-projection) feature depth.
    CrestModel(int in_channels, int base_kh, int base_kw, double lambda,
               BranchFlags branches, uint64_t seed);

    ResponseMap forward(const Tensor3& x) const;

    struct LossGrads {
        double loss = 0.0;
        // Parallel to parameter_layers(): gradient vectors for weights/bias.
        std::vector<std::vector<double>> weight_grads;
        std::vector<std::vector<double>> bias_grads;
    };
    LossGrads loss_and_grads(const Tensor3& x, const Tensor3& y) const;

    struct TrainConfig {
        double lr = 5e-3;
        double loss_threshold = 0.02;
        int max_iters = 500;
    };
    // Adam on a single pair until the loss drops below the threshold.
    // Returns the loss trace: trace[0] is the initial loss, trace[i] the
    // loss after i steps. Throws DivergenceError on NaN/Inf loss.
    std::vector<double> train_init(const Tensor3& x, const Tensor3& y,
                                   const TrainConfig& cfg);

    // `iters` Adam steps, each over the summed loss of all pairs.
    struct UpdateConfig {
        double lr = 1e-4;
        int iters = 2;
    };
    void train_update(const std::vector<std::pair<Tensor3, Tensor3>>& pairs,
                      const UpdateConfig& cfg);

    // Summed data+regularization loss over pairs at the current weights.
    double batch_loss(const std::vector<std::pair<Tensor3, Tensor3>>& pairs) const;

    void set_temporal_input(Tensor3 x1);
    const std::optional<Tensor3>& temporal_input() const { return temporal_input_; }

    BranchFlags branches() const { return branches_; }
    double lambda() const { return lambda_; }
    int in_channels() const { return in_channels_; }
    const ConvLayer& base_layer() const { return base_.layer; }

    // Enabled trainable layers in a fixed order: base, then spatial branch,
    // then temporal branch.
    std::vector<TrainableLayer*> parameter_layers();
    std::vector<const TrainableLayer*> parameter_layers() const;

    // Flat copy of every enabled parameter; order matches parameter_layers().
    std::vector<double> parameter_vector() const;
    void load_parameter_vector(const std::vector<double>& flat);

    std::array<TrainableLayer, 3>& spatial_branch() { return spatial_; }
    std::array<TrainableLayer, 3>& temporal_branch() { return temporal_; }
    TrainableLayer& base() { return base_; }
    const std::array<TrainableLayer, 3>& spatial_branch() const { return spatial_; }
    const std::array<TrainableLayer, 3>& temporal_branch() const { return temporal_; }
    const TrainableLayer& base() const { return base_; }

private:
    Tensor3 branch_forward(const std::array<TrainableLayer, 3>& branch,
                           const Tensor3& x) const;

    int in_channels_ = 0;
    double lambda_ = 1e-4;
    BranchFlags branches_;
    TrainableLayer base_;
    std::array<TrainableLayer, 3> spatial_;
    std::array<TrainableLayer, 3> temporal_;
    std::optional<Tensor3> temporal_input_;
};

}  // namespace crest
