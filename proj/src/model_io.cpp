#include "crest/model_io.hpp"

#include "crest/tensor_io.hpp"

namespace crest {

namespace {

Tensor3 weights_tensor(const ConvLayer& l) {
    Tensor3 t(l.out_channels, l.in_channels * l.kh, l.kw);
    t.data = l.weights;
    return t;
}

Tensor3 flat_tensor(const std::vector<double>& v) {
    Tensor3 t(1, 1, static_cast<int>(v.size()));
    t.data = v;
    return t;
}

void add_layer(TensorFile& tf, const std::string& prefix, const TrainableLayer& tl) {
    Tensor3 w = weights_tensor(tl.layer);
    tf.add(prefix + ".weights", w);
    tf.add(prefix + ".bias", flat_tensor(tl.layer.bias));
    Tensor3 wm = w, wv = w;
    wm.data = tl.w_state.m;
    wv.data = tl.w_state.v;
    tf.add(prefix + ".adam_w_m", wm);
    tf.add(prefix + ".adam_w_v", wv);
    tf.add(prefix + ".adam_b_m", flat_tensor(tl.b_state.m));
    tf.add(prefix + ".adam_b_v", flat_tensor(tl.b_state.v));
}

void read_layer(const TensorFile& tf, const std::string& prefix, TrainableLayer& tl,
                const nlohmann::json& steps) {
    const Tensor3& w = tf.get(prefix + ".weights");
    const Tensor3& b = tf.get(prefix + ".bias");
    if (w.data.size() != tl.layer.weights.size() ||
        b.data.size() != tl.layer.bias.size())
        throw ValidationError("model snapshot: tensor '" + prefix +
                              "' disagrees with declared architecture");
    tl.layer.weights = w.data;
    tl.layer.bias = b.data;
    tl.w_state.m = tf.get(prefix + ".adam_w_m").data;
    tl.w_state.v = tf.get(prefix + ".adam_w_v").data;
    tl.b_state.m = tf.get(prefix + ".adam_b_m").data;
    tl.b_state.v = tf.get(prefix + ".adam_b_v").data;
    tl.w_state.step = steps.value(prefix + ".w", 0);
    tl.b_state.step = steps.value(prefix + ".b", 0);
}

}  // namespace

void save_model(const CrestModel& model, const std::string& path) {
    TensorFile tf;
    tf.meta["kind"] = "crest_model";
    tf.meta["in_channels"] = model.in_channels();
    tf.meta["base_kh"] = model.base_layer().kh;
    tf.meta["base_kw"] = model.base_layer().kw;
    tf.meta["lambda"] = model.lambda();
    tf.meta["branches"] = model.branches().str();

    const AdamState& ref = model.base().w_state;
    tf.meta["adam"] = {{"beta1", ref.beta1}, {"beta2", ref.beta2}, {"eps", ref.eps}};

    nlohmann::json steps = nlohmann::json::object();
    auto record_steps = [&](const std::string& prefix, const TrainableLayer& tl) {
        steps[prefix + ".w"] = tl.w_state.step;
        steps[prefix + ".b"] = tl.b_state.step;
    };

    add_layer(tf, "base", model.base());
    record_steps("base", model.base());
    if (model.branches().spatial)
        for (int i = 0; i < 3; ++i) {
            add_layer(tf, "spatial" + std::to_string(i), model.spatial_branch()[i]);
            record_steps("spatial" + std::to_string(i), model.spatial_branch()[i]);
        }
    if (model.branches().temporal)
        for (int i = 0; i < 3; ++i) {
            add_layer(tf, "temporal" + std::to_string(i), model.temporal_branch()[i]);
            record_steps("temporal" + std::to_string(i), model.temporal_branch()[i]);
        }
    tf.meta["steps"] = steps;

    if (model.temporal_input()) tf.add("temporal_input", *model.temporal_input());
    write_tensor_file(tf, path);
}

CrestModel load_model(const std::string& path) {
    TensorFile tf = read_tensor_file(path);
    if (tf.meta.value("kind", "") != "crest_model")
        throw ValidationError("model snapshot: file kind is not crest_model: " + path);

    BranchFlags branches = parse_branches(tf.meta.value("branches", "base"));
    CrestModel model(tf.meta.value("in_channels", 0), tf.meta.value("base_kh", 0),
                     tf.meta.value("base_kw", 0), tf.meta.value("lambda", 0.0),
                     branches, /*seed=*/0);

    const nlohmann::json steps = tf.meta.value("steps", nlohmann::json::object());
    const nlohmann::json adam = tf.meta.value("adam", nlohmann::json::object());

    auto fix_adam = [&](TrainableLayer& tl) {
        for (AdamState* st : {&tl.w_state, &tl.b_state}) {
            st->beta1 = adam.value("beta1", 0.9);
            st->beta2 = adam.value("beta2", 0.999);
            st->eps = adam.value("eps", 1e-8);
        }
    };

    read_layer(tf, "base", model.base(), steps);
    fix_adam(model.base());
    if (branches.spatial)
        for (int i = 0; i < 3; ++i) {
            read_layer(tf, "spatial" + std::to_string(i), model.spatial_branch()[i],
                       steps);
            fix_adam(model.spatial_branch()[i]);
        }
    if (branches.temporal)
        for (int i = 0; i < 3; ++i) {
            read_layer(tf, "temporal" + std::to_string(i), model.temporal_branch()[i],
                       steps);
            fix_adam(model.temporal_branch()[i]);
        }
    if (tf.has("temporal_input")) model.set_temporal_input(tf.get("temporal_input"));
    return model;
}

}  // namespace crest
