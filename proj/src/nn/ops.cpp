// src/nn/ops.cpp

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

#include "slmforge/nn/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace slmforge::nn {
namespace {

// Size of the trailing block b broadcasts over, or 0 when incompatible.
std::size_t BroadcastBlock(const Shape& a, const Shape& b) {
  if (b.size() > a.size()) return 0;
  if (!std::equal(b.begin(), b.end(), a.end() - static_cast<std::ptrdiff_t>(b.size()))) return 0;
  return NumElements(b);
}

std::size_t CheckBroadcast(const char* op, const Tensor& a, const Tensor& b) {
  const std::size_t block = BroadcastBlock(a.shape(), b.shape());
  if (block == 0 && a.size() != 0) {
    throw ShapeError(std::string(op) + ": shapes " + ShapeString(a.shape()) + " and " +
                     ShapeString(b.shape()) + " are not compatible");
  }
  return block;
}

std::size_t LastDim(const Tensor& a, const char* op) {
  if (a.rank() == 0) throw ShapeError(std::string(op) + ": needs rank >= 1");
  return a.shape().back();
}

void Require2d(const Tensor& a, const char* op) {
  if (a.rank() != 2) {
    throw ShapeError(std::string(op) + ": expected a 2-D tensor, got " + ShapeString(a.shape()));
  }
}

}  // namespace

Tensor Add(const Tensor& a, const Tensor& b) {
  const std::size_t block = CheckBroadcast("add", a, b);
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] + bv[i % block];
  return Tensor::FromOp("add", a.shape(), std::move(out), {a, b},
                        [block](auto, std::span<const double> g, std::span<double* const> pg) {
                          if (pg[0]) for (std::size_t i = 0; i < g.size(); ++i) pg[0][i] += g[i];
                          if (pg[1]) for (std::size_t i = 0; i < g.size(); ++i) pg[1][i % block] += g[i];
                        });
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  const std::size_t block = CheckBroadcast("sub", a, b);
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] - bv[i % block];
  return Tensor::FromOp("sub", a.shape(), std::move(out), {a, b},
                        [block](auto, std::span<const double> g, std::span<double* const> pg) {
                          if (pg[0]) for (std::size_t i = 0; i < g.size(); ++i) pg[0][i] += g[i];
                          if (pg[1]) for (std::size_t i = 0; i < g.size(); ++i) pg[1][i % block] -= g[i];
                        });
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  const std::size_t block = CheckBroadcast("mul", a, b);
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * bv[i % block];
  return Tensor::FromOp("mul", a.shape(), std::move(out), {a, b},
                        [a, b, block](auto, std::span<const double> g, std::span<double* const> pg) {
                          const auto av = a.values();
                          const auto bv = b.values();
                          if (pg[0]) for (std::size_t i = 0; i < g.size(); ++i) pg[0][i] += g[i] * bv[i % block];
                          if (pg[1]) for (std::size_t i = 0; i < g.size(); ++i) pg[1][i % block] += g[i] * av[i];
                        });
}

Tensor Scale(const Tensor& a, double factor) {
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] * factor;
  return Tensor::FromOp("scale", a.shape(), std::move(out), {a},
                        [factor](auto, std::span<const double> g, std::span<double* const> pg) {
                          for (std::size_t i = 0; i < g.size(); ++i) pg[0][i] += g[i] * factor;
                        });
}

Tensor MatMul(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2 || a.dim(1) != b.dim(0)) {
    throw ShapeError("matmul: shapes " + ShapeString(a.shape()) + " and " +
                     ShapeString(b.shape()) + " are not compatible");
  }
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  const double* A = a.values().data();
  const double* B = b.values().data();
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double* o = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = A[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = B + p * n;
      for (std::size_t j = 0; j < n; ++j) o[j] += aip * brow[j];
    }
  }
  return Tensor::FromOp(
      "matmul", {m, n}, std::move(out), {a, b},
      [a, b, m, k, n](auto, std::span<const double> g, std::span<double* const> pg) {
        const double* A = a.values().data();
        const double* B = b.values().data();
        if (pg[0]) {
          // dA = G . B^T
          for (std::size_t i = 0; i < m; ++i) {
            const double* gi = g.data() + i * n;
            for (std::size_t p = 0; p < k; ++p) {
              const double* brow = B + p * n;
              double acc = 0.0;
              for (std::size_t j = 0; j < n; ++j) acc += gi[j] * brow[j];
              pg[0][i * k + p] += acc;
            }
          }
        }
        if (pg[1]) {
          // dB = A^T . G
          for (std::size_t i = 0; i < m; ++i) {
            const double* gi = g.data() + i * n;
            for (std::size_t p = 0; p < k; ++p) {
              const double aip = A[i * k + p];
              if (aip == 0.0) continue;
              double* db = pg[1] + p * n;
              for (std::size_t j = 0; j < n; ++j) db[j] += aip * gi[j];
            }
          }
        }
      });
}

Tensor Transpose(const Tensor& a) {
  Require2d(a, "transpose");
  const std::size_t r = a.dim(0), c = a.dim(1);
  const auto av = a.values();
  std::vector<double> out(r * c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) out[j * r + i] = av[i * c + j];
  return Tensor::FromOp("transpose", {c, r}, std::move(out), {a},
                        [r, c](auto, std::span<const double> g, std::span<double* const> pg) {
                          for (std::size_t i = 0; i < r; ++i)
                            for (std::size_t j = 0; j < c; ++j) pg[0][i * c + j] += g[j * r + i];
                        });
}

Tensor Reshape(const Tensor& a, Shape shape) {
  if (NumElements(shape) != a.size()) {
    throw ShapeError("reshape: cannot view " + ShapeString(a.shape()) + " as " + ShapeString(shape));
  }
  const auto av = a.values();
  return Tensor::FromOp("reshape", std::move(shape), {av.begin(), av.end()}, {a},
                        [](auto, std::span<const double> g, std::span<double* const> pg) {
                          for (std::size_t i = 0; i < g.size(); ++i) pg[0][i] += g[i];
                        });
}

Tensor ConcatLastDim(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_last_dim: no inputs");
  Shape lead = parts[0].shape();
  LastDim(parts[0], "concat_last_dim");
  lead.pop_back();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    Shape pl = p.shape();
    const std::size_t w = LastDim(p, "concat_last_dim");
    pl.pop_back();
    if (pl != lead) {
      throw ShapeError("concat_last_dim: shapes " + ShapeString(parts[0].shape()) + " and " +
                       ShapeString(p.shape()) + " differ in leading dimensions");
    }
    widths.push_back(w);
    total += w;
  }
  const std::size_t rows = NumElements(lead);
  std::vector<double> out(rows * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto v = parts[k].values();
    for (std::size_t r = 0; r < rows; ++r)
      std::copy_n(v.data() + r * widths[k], widths[k], out.data() + r * total + offset);
    offset += widths[k];
  }
  Shape shape = lead;
  shape.push_back(total);
  return Tensor::FromOp("concat_last_dim", std::move(shape), std::move(out), parts,
                        [widths, rows, total](auto, std::span<const double> g,
                                              std::span<double* const> pg) {
                          std::size_t offset = 0;
                          for (std::size_t k = 0; k < widths.size(); ++k) {
                            if (pg[k]) {
                              for (std::size_t r = 0; r < rows; ++r)
                                for (std::size_t j = 0; j < widths[k]; ++j)
                                  pg[k][r * widths[k] + j] += g[r * total + offset + j];
                            }
                            offset += widths[k];
                          }
                        });
}

Tensor SliceLastDim(const Tensor& a, std::size_t start, std::size_t len) {
  const std::size_t w = LastDim(a, "slice_last_dim");
  if (start + len > w) {
    throw ShapeError("slice_last_dim: [" + std::to_string(start) + ", " +
                     std::to_string(start + len) + ") out of range for " + ShapeString(a.shape()));
  }
  const std::size_t rows = a.size() / std::max<std::size_t>(w, 1);
  const auto av = a.values();
  std::vector<double> out(rows * len);
  for (std::size_t r = 0; r < rows; ++r)
    std::copy_n(av.data() + r * w + start, len, out.data() + r * len);
  Shape shape = a.shape();
  shape.back() = len;
  return Tensor::FromOp("slice_last_dim", std::move(shape), std::move(out), {a},
                        [rows, w, start, len](auto, std::span<const double> g,
                                              std::span<double* const> pg) {
                          for (std::size_t r = 0; r < rows; ++r)
                            for (std::size_t j = 0; j < len; ++j) pg[0][r * w + start + j] += g[r * len + j];
                        });
}

Tensor ConcatRows(const std::vector<Tensor>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  Require2d(parts[0], "concat_rows");
  const std::size_t cols = parts[0].dim(1);
  std::size_t rows = 0;
  std::vector<std::size_t> sizes;
  for (const auto& p : parts) {
    Require2d(p, "concat_rows");
    if (p.dim(1) != cols) {
      throw ShapeError("concat_rows: shapes " + ShapeString(parts[0].shape()) + " and " +
                       ShapeString(p.shape()) + " differ in width");
    }
    rows += p.dim(0);
    sizes.push_back(p.size());
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  for (const auto& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  return Tensor::FromOp("concat_rows", {rows, cols}, std::move(out), parts,
                        [sizes](auto, std::span<const double> g, std::span<double* const> pg) {
                          std::size_t offset = 0;
                          for (std::size_t k = 0; k < sizes.size(); ++k) {
                            if (pg[k])
                              for (std::size_t i = 0; i < sizes[k]; ++i) pg[k][i] += g[offset + i];
                            offset += sizes[k];
                          }
                        });
}

Tensor SliceRows(const Tensor& a, std::size_t start, std::size_t len) {
  Require2d(a, "slice_rows");
  if (start + len > a.dim(0)) {
    throw ShapeError("slice_rows: [" + std::to_string(start) + ", " +
                     std::to_string(start + len) + ") out of range for " + ShapeString(a.shape()));
  }
  const std::size_t cols = a.dim(1);
  const auto av = a.values();
  std::vector<double> out(av.begin() + start * cols, av.begin() + (start + len) * cols);
  return Tensor::FromOp("slice_rows", {len, cols}, std::move(out), {a},
                        [start, cols](auto, std::span<const double> g, std::span<double* const> pg) {
                          for (std::size_t i = 0; i < g.size(); ++i) pg[0][start * cols + i] += g[i];
                        });
}

Tensor Softmax(const Tensor& a) {
  const std::size_t w = LastDim(a, "softmax");
  const std::size_t rows = w ? a.size() / w : 0;
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = av.data() + r * w;
    double* y = out.data() + r * w;
    const double mx = *std::max_element(x, x + w);
    double z = 0.0;
    for (std::size_t j = 0; j < w; ++j) z += (y[j] = std::exp(x[j] - mx));
    for (std::size_t j = 0; j < w; ++j) y[j] /= z;
  }
  return Tensor::FromOp("softmax", a.shape(), std::move(out), {a},
                        [rows, w](std::span<const double> y, std::span<const double> g,
                                  std::span<double* const> pg) {
                          for (std::size_t r = 0; r < rows; ++r) {
                            const double* yr = y.data() + r * w;
                            const double* gr = g.data() + r * w;
                            double dot = 0.0;
                            for (std::size_t j = 0; j < w; ++j) dot += yr[j] * gr[j];
                            for (std::size_t j = 0; j < w; ++j) pg[0][r * w + j] += yr[j] * (gr[j] - dot);
                          }
                        });
}

Tensor LogSoftmax(const Tensor& a) {
  const std::size_t w = LastDim(a, "log_softmax");
  const std::size_t rows = w ? a.size() / w : 0;
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* x = av.data() + r * w;
    double* y = out.data() + r * w;
    const double mx = *std::max_element(x, x + w);
    double z = 0.0;
    for (std::size_t j = 0; j < w; ++j) z += std::exp(x[j] - mx);
    const double lse = mx + std::log(z);
    for (std::size_t j = 0; j < w; ++j) y[j] = x[j] - lse;
  }
  return Tensor::FromOp("log_softmax", a.shape(), std::move(out), {a},
                        [rows, w](std::span<const double> y, std::span<const double> g,
                                  std::span<double* const> pg) {
                          for (std::size_t r = 0; r < rows; ++r) {
                            const double* yr = y.data() + r * w;
                            const double* gr = g.data() + r * w;
                            double gsum = 0.0;
                            for (std::size_t j = 0; j < w; ++j) gsum += gr[j];
                            for (std::size_t j = 0; j < w; ++j)
                              pg[0][r * w + j] += gr[j] - std::exp(yr[j]) * gsum;
                          }
                        });
}

Tensor Relu(const Tensor& a) {
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) out[i] = av[i] > 0.0 ? av[i] : 0.0;
  return Tensor::FromOp("relu", a.shape(), std::move(out), {a},
                        [a](auto, std::span<const double> g, std::span<double* const> pg) {
                          const auto av = a.values();
                          for (std::size_t i = 0; i < g.size(); ++i)
                            if (av[i] > 0.0) pg[0][i] += g[i];
                        });
}

Tensor Gelu(const Tensor& a) {
  const auto av = a.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) {
    out[i] = 0.5 * av[i] * (1.0 + std::erf(av[i] * M_SQRT1_2));
  }
  return Tensor::FromOp("gelu", a.shape(), std::move(out), {a},
                        [a](auto, std::span<const double> g, std::span<double* const> pg) {
                          const auto av = a.values();
                          const double inv_sqrt_2pi = 0.5 * M_2_SQRTPI * M_SQRT1_2;
                          for (std::size_t i = 0; i < g.size(); ++i) {
                            const double x = av[i];
                            const double cdf = 0.5 * (1.0 + std::erf(x * M_SQRT1_2));
                            const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
                            pg[0][i] += g[i] * (cdf + x * pdf);
                          }
                        });
}

Tensor LayerNorm(const Tensor& x, const Tensor& gamma, const Tensor& beta, double eps) {
  const std::size_t w = LastDim(x, "layer_norm");
  if (gamma.shape() != Shape{w} || beta.shape() != Shape{w}) {
    throw ShapeError("layer_norm: input " + ShapeString(x.shape()) + " with gamma " +
                     ShapeString(gamma.shape()) + " and beta " + ShapeString(beta.shape()));
  }
  const std::size_t rows = w ? x.size() / w : 0;
  const auto xv = x.values();
  const auto gv = gamma.values();
  const auto bv = beta.values();
  auto xhat = std::make_shared<std::vector<double>>(xv.size());
  auto inv_std = std::make_shared<std::vector<double>>(rows);
  std::vector<double> out(xv.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xr = xv.data() + r * w;
    double mean = 0.0;
    for (std::size_t j = 0; j < w; ++j) mean += xr[j];
    mean /= w;
    double var = 0.0;
    for (std::size_t j = 0; j < w; ++j) var += (xr[j] - mean) * (xr[j] - mean);
    var /= w;
    const double is = 1.0 / std::sqrt(var + eps);
    (*inv_std)[r] = is;
    for (std::size_t j = 0; j < w; ++j) {
      const double h = (xr[j] - mean) * is;
      (*xhat)[r * w + j] = h;
      out[r * w + j] = h * gv[j] + bv[j];
    }
  }
  return Tensor::FromOp(
      "layer_norm", x.shape(), std::move(out), {x, gamma, beta},
      [gamma, xhat, inv_std, rows, w](auto, std::span<const double> g, std::span<double* const> pg) {
        const auto gv = gamma.values();
        for (std::size_t r = 0; r < rows; ++r) {
          const double* gr = g.data() + r * w;
          const double* hr = xhat->data() + r * w;
          if (pg[1]) for (std::size_t j = 0; j < w; ++j) pg[1][j] += gr[j] * hr[j];
          if (pg[2]) for (std::size_t j = 0; j < w; ++j) pg[2][j] += gr[j];
          if (pg[0]) {
            double sum_dh = 0.0, sum_dh_h = 0.0;
            for (std::size_t j = 0; j < w; ++j) {
              const double dh = gr[j] * gv[j];
              sum_dh += dh;
              sum_dh_h += dh * hr[j];
            }
            const double is = (*inv_std)[r];
            for (std::size_t j = 0; j < w; ++j) {
              const double dh = gr[j] * gv[j];
              pg[0][r * w + j] += is * (dh - sum_dh / w - hr[j] * sum_dh_h / w);
            }
          }
        }
      });
}

Tensor EmbeddingLookup(const Tensor& table, std::span<const int> ids) {
  Require2d(table, "embedding_lookup");
  const std::size_t v = table.dim(0), d = table.dim(1);
  std::vector<int> idx(ids.begin(), ids.end());
  for (int id : idx) {
    if (id < 0 || static_cast<std::size_t>(id) >= v) {
      throw ShapeError("embedding_lookup: id " + std::to_string(id) + " out of range for table " +
                       ShapeString(table.shape()));
    }
  }
  const auto tv = table.values();
  std::vector<double> out(idx.size() * d);
  for (std::size_t i = 0; i < idx.size(); ++i)
    std::copy_n(tv.data() + idx[i] * d, d, out.data() + i * d);
  return Tensor::FromOp("embedding_lookup", {idx.size(), d}, std::move(out), {table},
                        [idx, d](auto, std::span<const double> g, std::span<double* const> pg) {
                          for (std::size_t i = 0; i < idx.size(); ++i)
                            for (std::size_t j = 0; j < d; ++j) pg[0][idx[i] * d + j] += g[i * d + j];
                        });
}

Tensor Conv1d(const Tensor& x, const Tensor& weight, const Tensor& bias, std::size_t kernel,
              std::size_t stride, std::size_t pad_right) {
  Require2d(x, "conv1d");
  Require2d(weight, "conv1d");
  const std::size_t t_in = x.dim(0), c_in = x.dim(1), c_out = weight.dim(1);
  if (kernel == 0 || stride == 0 || weight.dim(0) != kernel * c_in || bias.shape() != Shape{c_out}) {
    throw ShapeError("conv1d: input " + ShapeString(x.shape()) + ", weight " +
                     ShapeString(weight.shape()) + ", bias " + ShapeString(bias.shape()) +
                     ", kernel " + std::to_string(kernel));
  }
  const std::size_t padded = t_in + pad_right;
  const std::size_t t_out = padded >= kernel ? (padded - kernel) / stride + 1 : 0;
  const double* X = x.values().data();
  const double* W = weight.values().data();
  const double* B = bias.values().data();
  std::vector<double> out(t_out * c_out);
  for (std::size_t t = 0; t < t_out; ++t) {
    double* o = out.data() + t * c_out;
    std::copy_n(B, c_out, o);
    for (std::size_t j = 0; j < kernel; ++j) {
      const std::size_t src = t * stride + j;
      if (src >= t_in) break;
      for (std::size_t c = 0; c < c_in; ++c) {
        const double xv = X[src * c_in + c];
        const double* wrow = W + (j * c_in + c) * c_out;
        for (std::size_t o2 = 0; o2 < c_out; ++o2) o[o2] += xv * wrow[o2];
      }
    }
  }
  return Tensor::FromOp(
      "conv1d", {t_out, c_out}, std::move(out), {x, weight, bias},
      [x, weight, kernel, stride, t_in, c_in, c_out, t_out](auto, std::span<const double> g,
                                                            std::span<double* const> pg) {
        const double* X = x.values().data();
        const double* W = weight.values().data();
        for (std::size_t t = 0; t < t_out; ++t) {
          const double* gt = g.data() + t * c_out;
          if (pg[2]) for (std::size_t o = 0; o < c_out; ++o) pg[2][o] += gt[o];
          for (std::size_t j = 0; j < kernel; ++j) {
            const std::size_t src = t * stride + j;
            if (src >= t_in) break;
            for (std::size_t c = 0; c < c_in; ++c) {
              const std::size_t wr = (j * c_in + c) * c_out;
              if (pg[0]) {
                double acc = 0.0;
                for (std::size_t o = 0; o < c_out; ++o) acc += gt[o] * W[wr + o];
                pg[0][src * c_in + c] += acc;
              }
              if (pg[1]) {
                const double xv = X[src * c_in + c];
                for (std::size_t o = 0; o < c_out; ++o) pg[1][wr + o] += xv * gt[o];
              }
            }
          }
        }
      });
}

Tensor CrossEntropy(const Tensor& logits, std::span<const int> targets,
                    std::span<const std::uint8_t> mask) {
  Require2d(logits, "cross_entropy");
  const std::size_t n = logits.dim(0), k = logits.dim(1);
  if (targets.size() != n || mask.size() != n) {
    throw ShapeError("cross_entropy: logits " + ShapeString(logits.shape()) + " with " +
                     std::to_string(targets.size()) + " targets and mask of length " +
                     std::to_string(mask.size()));
  }
  std::vector<int> tg(targets.begin(), targets.end());
  std::vector<std::uint8_t> mk(mask.begin(), mask.end());
  std::size_t count = 0;
  for (std::size_t t = 0; t < n; ++t) {
    if (!mk[t]) continue;
    ++count;
    if (tg[t] < 0 || static_cast<std::size_t>(tg[t]) >= k) {
      throw ShapeError("cross_entropy: target " + std::to_string(tg[t]) + " out of range for " +
                       std::to_string(k) + " classes");
    }
  }
  const double* L = logits.values().data();
  // Per-row softmax kept for the backward pass.
  auto probs = std::make_shared<std::vector<double>>();
  double loss = 0.0;
  if (count > 0) {
    probs->assign(n * k, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      if (!mk[t]) continue;
      const double* row = L + t * k;
      const double mx = *std::max_element(row, row + k);
      double z = 0.0;
      for (std::size_t j = 0; j < k; ++j) z += ((*probs)[t * k + j] = std::exp(row[j] - mx));
      for (std::size_t j = 0; j < k; ++j) (*probs)[t * k + j] /= z;
      loss += -(row[tg[t]] - mx - std::log(z));
    }
    loss /= static_cast<double>(count);
  }
  return Tensor::FromOp("cross_entropy", {}, {loss}, {logits},
                        [probs, tg, mk, n, k, count](auto, std::span<const double> g,
                                                     std::span<double* const> pg) {
                          if (count == 0) return;
                          const double scale = g[0] / static_cast<double>(count);
                          for (std::size_t t = 0; t < n; ++t) {
                            if (!mk[t]) continue;
                            for (std::size_t j = 0; j < k; ++j) {
                              const double y = (*probs)[t * k + j] - (static_cast<int>(j) == tg[t] ? 1.0 : 0.0);
                              pg[0][t * k + j] += scale * y;
                            }
                          }
                        });
}

Tensor Sum(const Tensor& a) {
  const auto av = a.values();
  const double s = std::accumulate(av.begin(), av.end(), 0.0);
  return Tensor::FromOp("sum", {}, {s}, {a},
                        [n = av.size()](auto, std::span<const double> g, std::span<double* const> pg) {
                          for (std::size_t i = 0; i < n; ++i) pg[0][i] += g[0];
                        });
}

Tensor Mean(const Tensor& a) {
  if (a.size() == 0) throw ShapeError("mean of an empty tensor");
  return Scale(Sum(a), 1.0 / static_cast<double>(a.size()));
}

Tensor ReplaceRows(const Tensor& x, std::span<const std::uint8_t> mask, const Tensor& row) {
  Require2d(x, "replace_rows");
  const std::size_t t = x.dim(0), d = x.dim(1);
  if (mask.size() != t || row.shape() != Shape{d}) {
    throw ShapeError("replace_rows: input " + ShapeString(x.shape()) + ", mask of length " +
                     std::to_string(mask.size()) + ", row " + ShapeString(row.shape()));
  }
  std::vector<std::uint8_t> mk(mask.begin(), mask.end());
  const auto xv = x.values();
  const auto rv = row.values();
  std::vector<double> out(xv.begin(), xv.end());
  for (std::size_t i = 0; i < t; ++i)
    if (mk[i]) std::copy(rv.begin(), rv.end(), out.begin() + i * d);
  return Tensor::FromOp("replace_rows", x.shape(), std::move(out), {x, row},
                        [mk, t, d](auto, std::span<const double> g, std::span<double* const> pg) {
                          for (std::size_t i = 0; i < t; ++i) {
                            double* dst = mk[i] ? pg[1] : (pg[0] ? pg[0] + i * d : nullptr);
                            if (!dst) continue;
                            for (std::size_t j = 0; j < d; ++j) dst[j] += g[i * d + j];
                          }
                        });
}

}  // namespace slmforge::nn
