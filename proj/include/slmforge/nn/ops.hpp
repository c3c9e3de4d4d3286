// include/slmforge/nn/ops.hpp

// Copyright 2026  The slmforge Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "slmforge/nn/tensor.hpp"

namespace slmforge::nn {

// Elementwise. `b` either matches `a` or matches a trailing block of a's
// shape, in which case it is broadcast over the leading dimensions.
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double factor);

Tensor MatMul(const Tensor& a, const Tensor& b);  // (M x K) . (K x N)
Tensor Transpose(const Tensor& a);                // 2-D only
Tensor Reshape(const Tensor& a, Shape shape);

// Concatenation and slicing along the last dimension (any leading shape).
Tensor ConcatLastDim(const std::vector<Tensor>& parts);
Tensor SliceLastDim(const Tensor& a, std::size_t start, std::size_t len);

// Concatenation and slicing of rows of 2-D tensors.
Tensor ConcatRows(const std::vector<Tensor>& parts);
Tensor SliceRows(const Tensor& a, std::size_t start, std::size_t len);

// Row-wise over the last dimension.
Tensor Softmax(const Tensor& a);
Tensor LogSoftmax(const Tensor& a);

Tensor Relu(const Tensor& a);
// Exact form x * Phi(x).
Tensor Gelu(const Tensor& a);

// Normalizes each row over the last dimension, then applies gamma and beta.
Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps = 1e-5);

// Rows of `table` (V x D) picked by ids; result ids.size() x D.
Tensor EmbeddingLookup(const Tensor& table, std::span<const int> ids);

// x: T x C_in (time-major). weight: (kernel * C_in) x C_out, row index
// j * C_in + c for tap j, channel c. bias: C_out. pad_right zero frames are
// appended before framing. Output frames: floor((T + pad_right - kernel) /
// stride) + 1, or 0 when the padded input is shorter than the kernel.
Tensor Conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t kernel,
              std::size_t stride, std::size_t pad_right = 0);

// Mean over positions with mask != 0 of -log_softmax(logits)[t][target[t]].
// Targets at mask-off positions are never read. An all-zero mask gives a
// scalar 0 whose gradient is zero.
Tensor CrossEntropy(const Tensor& logits, std::span<const int> targets,
                    std::span<const std::uint8_t> mask);

Tensor Sum(const Tensor& a);
Tensor Mean(const Tensor& a);

// Rows t of the 2-D `x` with mask[t] != 0 are replaced by `row` (1-D, same
// width). Gradient of replaced rows flows to `row`.
Tensor ReplaceRows(const Tensor& x, std::span<const std::uint8_t> mask, const Tensor& row);

}  // namespace slmforge::nn
