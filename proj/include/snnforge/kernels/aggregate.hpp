#pragma once

// Input aggregation over a connection: dense, CSR-sparse, one-to-one and
// 2-D convolution, each with its reverse-mode rule. Arrays are row-major with
// the batch dimension first. Dense weights are presynaptic-major:
// w[i * n_post + j] is the weight from pre neuron i onto post neuron j.

#include <algorithm>
#include <cassert>
#include <cstddef>
#include <span>

namespace snnforge::kernels {

inline void weight_sum(std::span<const double> w, std::span<const double> s,
                       std::span<double> out, std::size_t batch, std::size_t n_pre,
                       std::size_t n_post) {
  assert(w.size() == n_pre * n_post);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t b = 0; b < batch; ++b) {
    const double* sb = s.data() + b * n_pre;
    double* ob = out.data() + b * n_post;
    for (std::size_t i = 0; i < n_pre; ++i) {
      const double si = sb[i];
      if (si == 0.0) continue;
      const double* row = w.data() + i * n_post;
      for (std::size_t j = 0; j < n_post; ++j) ob[j] += si * row[j];
    }
  }
}

inline void weight_sum_backward(std::span<const double> w, std::span<const double> s,
                                std::span<const double> g_out, std::span<double> g_w,
                                std::span<double> g_s, std::size_t batch, std::size_t n_pre,
                                std::size_t n_post) {
  for (std::size_t b = 0; b < batch; ++b) {
    const double* sb = s.data() + b * n_pre;
    const double* gb = g_out.data() + b * n_post;
    for (std::size_t i = 0; i < n_pre; ++i) {
      const double* row = w.data() + i * n_post;
      if (!g_w.empty() && sb[i] != 0.0) {
        double* grow = g_w.data() + i * n_post;
        for (std::size_t j = 0; j < n_post; ++j) grow[j] += sb[i] * gb[j];
      }
      if (!g_s.empty()) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n_post; ++j) acc += row[j] * gb[j];
        g_s[b * n_pre + i] += acc;
      }
    }
  }
}

/// CSR by presynaptic neuron: edges of pre i are [row_ptr[i], row_ptr[i+1]).
template <class Index>
void sparse_weight_sum(std::span<const Index> row_ptr, std::span<const Index> post_idx,
                       std::span<const double> w, std::span<const double> s,
                       std::span<double> out, std::size_t batch, std::size_t n_pre,
                       std::size_t n_post) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t b = 0; b < batch; ++b) {
    const double* sb = s.data() + b * n_pre;
    double* ob = out.data() + b * n_post;
    for (std::size_t i = 0; i < n_pre; ++i) {
      const double si = sb[i];
      if (si == 0.0) continue;
      const auto end = static_cast<std::size_t>(row_ptr[i + 1]);
      for (auto e = static_cast<std::size_t>(row_ptr[i]); e < end; ++e)
        ob[static_cast<std::size_t>(post_idx[e])] += si * w[e];
    }
  }
}

template <class Index>
void sparse_weight_sum_backward(std::span<const Index> row_ptr, std::span<const Index> post_idx,
                                std::span<const double> w, std::span<const double> s,
                                std::span<const double> g_out, std::span<double> g_w,
                                std::span<double> g_s, std::size_t batch, std::size_t n_pre,
                                std::size_t n_post) {
  for (std::size_t b = 0; b < batch; ++b) {
    const double* sb = s.data() + b * n_pre;
    const double* gb = g_out.data() + b * n_post;
    for (std::size_t i = 0; i < n_pre; ++i) {
      const auto end = static_cast<std::size_t>(row_ptr[i + 1]);
      double acc = 0.0;
      for (auto e = static_cast<std::size_t>(row_ptr[i]); e < end; ++e) {
        const double g = gb[static_cast<std::size_t>(post_idx[e])];
        if (!g_w.empty()) g_w[e] += sb[i] * g;
        acc += w[e] * g;
      }
      if (!g_s.empty()) g_s[b * n_pre + i] += acc;
    }
  }
}

inline void one_to_one_sum(std::span<const double> w, std::span<const double> s,
                           std::span<double> out, std::size_t batch, std::size_t n) {
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t i = 0; i < n; ++i) out[b * n + i] = w[i] * s[b * n + i];
}

inline void one_to_one_sum_backward(std::span<const double> w, std::span<const double> s,
                                    std::span<const double> g_out, std::span<double> g_w,
                                    std::span<double> g_s, std::size_t batch, std::size_t n) {
  for (std::size_t b = 0; b < batch; ++b)
    for (std::size_t i = 0; i < n; ++i) {
      const double g = g_out[b * n + i];
      if (!g_w.empty()) g_w[i] += s[b * n + i] * g;
      if (!g_s.empty()) g_s[b * n + i] += w[i] * g;
    }
}

struct Conv2dGeometry {
  std::size_t in_channels = 1, in_height = 1, in_width = 1;
  std::size_t out_channels = 1, out_height = 1, out_width = 1;
  std::size_t kernel = 1, stride = 1, padding = 0;

  std::size_t in_size() const { return in_channels * in_height * in_width; }
  std::size_t out_size() const { return out_channels * out_height * out_width; }
  std::size_t kernel_size() const { return out_channels * in_channels * kernel * kernel; }

  /// Output extent implied by the input extent, or 0 when it does not fit.
  static std::size_t out_extent(std::size_t in, std::size_t k, std::size_t s, std::size_t p) {
    if (in + 2 * p < k || s == 0) return 0;
    return (in + 2 * p - k) / s + 1;
  }
};

namespace detail {
template <class F>
void conv2d_visit(const Conv2dGeometry& g, F&& f) {
  const auto pad = static_cast<long>(g.padding);
  for (std::size_t co = 0; co < g.out_channels; ++co)
    for (std::size_t y = 0; y < g.out_height; ++y)
      for (std::size_t x = 0; x < g.out_width; ++x) {
        const std::size_t o = (co * g.out_height + y) * g.out_width + x;
        for (std::size_t ci = 0; ci < g.in_channels; ++ci)
          for (std::size_t ky = 0; ky < g.kernel; ++ky) {
            const long iy = static_cast<long>(y * g.stride + ky) - pad;
            if (iy < 0 || iy >= static_cast<long>(g.in_height)) continue;
            for (std::size_t kx = 0; kx < g.kernel; ++kx) {
              const long ix = static_cast<long>(x * g.stride + kx) - pad;
              if (ix < 0 || ix >= static_cast<long>(g.in_width)) continue;
              const std::size_t in =
                  (ci * g.in_height + static_cast<std::size_t>(iy)) * g.in_width +
                  static_cast<std::size_t>(ix);
              const std::size_t k = ((co * g.in_channels + ci) * g.kernel + ky) * g.kernel + kx;
              f(o, in, k);
            }
          }
      }
}
}  // namespace detail

/// Cross-correlation; kernels laid out (out_channels, in_channels, k, k).
inline void conv2d_weight_sum(std::span<const double> kernels, std::span<const double> s,
                              std::span<double> out, std::size_t batch,
                              const Conv2dGeometry& g) {
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t b = 0; b < batch; ++b) {
    const double* sb = s.data() + b * g.in_size();
    double* ob = out.data() + b * g.out_size();
    detail::conv2d_visit(g, [&](std::size_t o, std::size_t in, std::size_t k) {
      ob[o] += kernels[k] * sb[in];
    });
  }
}

inline void conv2d_weight_sum_backward(std::span<const double> kernels,
                                       std::span<const double> s,
                                       std::span<const double> g_out, std::span<double> g_k,
                                       std::span<double> g_s, std::size_t batch,
                                       const Conv2dGeometry& g) {
  for (std::size_t b = 0; b < batch; ++b) {
    const double* sb = s.data() + b * g.in_size();
    const double* gb = g_out.data() + b * g.out_size();
    detail::conv2d_visit(g, [&](std::size_t o, std::size_t in, std::size_t k) {
      if (!g_k.empty()) g_k[k] += sb[in] * gb[o];
      if (!g_s.empty()) g_s[b * g.in_size() + in] += kernels[k] * gb[o];
    });
  }
}

}  // namespace snnforge::kernels
