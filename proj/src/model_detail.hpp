#pragma once

// Forward caches and backward passes shared by model.cpp / model_grad.cpp.

#include <vector>

#include "hs2s/model.hpp"

namespace hs2s::model::detail {

struct DecodeCache {
    nd::DenseCache proj;
    std::vector<nd::GruStepCache> dec;    // K steps
    std::vector<nd::DenseCache> pose1;    // K
    std::vector<nd::DenseCache> pose2;    // K
    std::vector<nd::GruStepCache> res1;   // T steps
    std::vector<nd::GruStepCache> res2;   // T steps
    std::vector<nd::DenseCache> res_out;  // T
};

// Final sub-encoder state over one tau-frame block; caches appended when
// requested (tau entries).
nd::Vec sub_encode_block(const ModelParams& p, const ArchConfig& cfg, const double* frames,
                         int tau, std::vector<nd::GruStepCache>* caches);

std::vector<nd::Vec> top_encode(const ModelParams& p, const ArchConfig& cfg,
                                const std::vector<nd::Vec>& sub_encodings,
                                std::vector<nd::GruStepCache>* caches);

nd::Matrix padded_input(const ArchConfig& cfg, const nd::Matrix& X);

nd::Matrix decode_cached(const ModelParams& p, const ArchConfig& cfg, const nd::Vec& z,
                         DecodeCache* cache);

// Backward through the decoder; accumulates into grads, returns dL/dz.
nd::Vec decode_backward(const ModelParams& p, const ArchConfig& cfg, const DecodeCache& cache,
                        const nd::Matrix& d_output, ModelParams& grads);

// Backward through one sub-encoded block given the gradient at its final
// state (input-frame gradients are discarded).
void sub_block_backward(const ModelParams& p, const ArchConfig& cfg,
                        const std::vector<nd::GruStepCache>& caches, int first_cache,
                        const nd::Vec& d_final, ModelParams& grads);

}  // namespace hs2s::model::detail
