#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csent/matrix.hpp"
#include "csent/model.hpp"

namespace csent {

struct NamedTensor {
    std::string name;
    Matrix<float> value;
};

struct TrainMetadata {
    int epochs_run = 0;
    double best_val_f1 = 0.0;
    std::uint64_t seed = 0;
};

// In-memory image of a trained model.  Parameters are stored as 32-bit
// floats regardless of the training scalar.
struct Checkpoint {
    ModelVariant variant = ModelVariant::DiffHcnn;
    HcnnConfig config;          // hierarchical variants
    double l2_lambda = 1e-4;    // lr-baseline only
    std::string vocab_fingerprint;
    std::size_t vocab_size = 0;
    TrainMetadata metadata;
    std::vector<NamedTensor> tensors;
};

// Container: `CSENT1` magic line, one JSON header line (variant, config,
// fingerprint, metadata, tensor manifest), then the raw little-endian
// float32 tensor blobs in manifest order.
void save_checkpoint(const std::string& path, const Checkpoint& checkpoint);
Checkpoint load_checkpoint(const std::string& path);

// Model <-> checkpoint conversion.  Loading into the wrong family (or a
// mismatched shape) is a ConfigError.
template <typename S>
Checkpoint make_checkpoint(HierarchicalCnn<S>& model,
                           const TrainMetadata& metadata) {
    Checkpoint ck;
    ck.variant = model.variant();
    ck.config = model.config();
    ck.vocab_fingerprint = model.vocab_fingerprint();
    ck.vocab_size = model.vocab_size();
    ck.metadata = metadata;
    for (auto& [name, param] : model.parameters()) {
        ck.tensors.push_back({name, param->value.template cast<float>()});
    }
    return ck;
}

template <typename S>
Checkpoint make_checkpoint(LrBaseline<S>& model,
                           const TrainMetadata& metadata) {
    Checkpoint ck;
    ck.variant = ModelVariant::LrBaseline;
    ck.l2_lambda = model.l2_lambda();
    ck.vocab_fingerprint = model.vocab_fingerprint();
    ck.vocab_size = model.vocab_size();
    ck.metadata = metadata;
    for (auto& [name, param] : model.parameters()) {
        ck.tensors.push_back({name, param->value.template cast<float>()});
    }
    return ck;
}

template <typename S>
void load_parameters(const Checkpoint& ck,
                     std::vector<std::pair<std::string, nn::Parameter<S>*>>
                         params) {
    if (ck.tensors.size() != params.size()) {
        throw ConfigError("checkpoint has " +
                          std::to_string(ck.tensors.size()) +
                          " tensors, model expects " +
                          std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < params.size(); ++i) {
        const NamedTensor& t = ck.tensors[i];
        nn::Parameter<S>* p = params[i].second;
        if (t.name != params[i].first ||
            t.value.rows() != p->value.rows() ||
            t.value.cols() != p->value.cols()) {
            throw ConfigError("checkpoint tensor '" + t.name +
                              "' does not match model parameter '" +
                              params[i].first + "'");
        }
        p->value = t.value.template cast<S>();
    }
}

template <typename S>
HierarchicalCnn<S> hcnn_from_checkpoint(const Checkpoint& ck) {
    if (ck.variant == ModelVariant::LrBaseline) {
        throw ConfigError(
            "checkpoint holds an lr-baseline, not a hierarchical model");
    }
    HierarchicalCnn<S> model(ck.variant, ck.config, ck.vocab_size,
                             ck.vocab_fingerprint);
    load_parameters<S>(ck, model.parameters());
    return model;
}

template <typename S>
LrBaseline<S> lr_from_checkpoint(const Checkpoint& ck) {
    if (ck.variant != ModelVariant::LrBaseline) {
        throw ConfigError("checkpoint holds a '" +
                          std::string(variant_name(ck.variant)) +
                          "' model, not the lr-baseline");
    }
    LrBaseline<S> model(ck.vocab_size, ck.vocab_fingerprint, ck.l2_lambda);
    load_parameters<S>(ck, model.parameters());
    return model;
}

}  // namespace csent
