#include "snet/kernels.hpp"

#include <atomic>
#include <cstdint>
#include <string>

#include "snet/tensor.hpp"

#ifdef SNET_HAVE_OPENMP
#include <omp.h>
#endif

namespace snet::kernels {

namespace {

std::atomic<Backend> g_backend{Backend::Parallel};

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kParallelWork = 1u << 15;

void check(bool ok, const char* op, std::size_t a, std::size_t b) {
  if (!ok) {
    throw Error(std::string("kernels::") + op + ": inner dimensions differ (" +
                std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

void set_backend(Backend b) { g_backend.store(b); }
Backend backend() { return g_backend.load(); }

int max_threads() {
#ifdef SNET_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace reference {

void matmul(ConstMat a, ConstMat b, Mat c) {
  check(a.cols == b.rows && c.rows == a.rows && c.cols == b.cols, "matmul",
        a.cols, b.rows);
  for (std::size_t i = 0; i < a.rows; ++i) {
    for (std::size_t j = 0; j < b.cols; ++j) {
      double acc = 0.0;
      for (std::size_t r = 0; r < a.cols; ++r) {
        acc += a.data[i * a.cols + r] * b.data[r * b.cols + j];
      }
      c.data[i * c.cols + j] = acc;
    }
  }
}

void matmul_tn_acc(ConstMat a, ConstMat g, Mat c) {
  check(a.rows == g.rows && c.rows == a.cols && c.cols == g.cols,
        "matmul_tn_acc", a.rows, g.rows);
  for (std::size_t i = 0; i < a.cols; ++i) {
    for (std::size_t j = 0; j < g.cols; ++j) {
      double acc = c.data[i * c.cols + j];
      for (std::size_t r = 0; r < a.rows; ++r) {
        acc += a.data[r * a.cols + i] * g.data[r * g.cols + j];
      }
      c.data[i * c.cols + j] = acc;
    }
  }
}

void matmul_nt(ConstMat g, ConstMat w, Mat c) {
  check(g.cols == w.cols && c.rows == g.rows && c.cols == w.rows, "matmul_nt",
        g.cols, w.cols);
  for (std::size_t i = 0; i < g.rows; ++i) {
    for (std::size_t j = 0; j < w.rows; ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < g.cols; ++k) {
        acc += g.data[i * g.cols + k] * w.data[j * w.cols + k];
      }
      c.data[i * c.cols + j] = acc;
    }
  }
}

void col_sum_acc(ConstMat g, std::span<double> out) {
  check(out.size() == g.cols, "col_sum_acc", out.size(), g.cols);
  for (std::size_t j = 0; j < g.cols; ++j) {
    double acc = out[j];
    for (std::size_t i = 0; i < g.rows; ++i) acc += g.data[i * g.cols + j];
    out[j] = acc;
  }
}

}  // namespace reference

namespace parallel {

void matmul(ConstMat a, ConstMat b, Mat c) {
  check(a.cols == b.rows && c.rows == a.rows && c.cols == b.cols, "matmul",
        a.cols, b.rows);
  const auto m = static_cast<std::int64_t>(a.rows);
  const std::size_t k = a.cols;
  const std::size_t n = b.cols;
  const double* ad = a.data.data();
  const double* bd = b.data.data();
  double* cd = c.data.data();
#pragma omp parallel for schedule(static) if (a.rows * k * n >= kParallelWork)
  for (std::int64_t i = 0; i < m; ++i) {
    double* crow = cd + i * n;
    const double* arow = ad + i * k;
    for (std::size_t j = 0; j < n; ++j) crow[j] = 0.0;
    for (std::size_t r = 0; r < k; ++r) {
      const double av = arow[r];
      const double* brow = bd + r * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
}

void matmul_tn_acc(ConstMat a, ConstMat g, Mat c) {
  check(a.rows == g.rows && c.rows == a.cols && c.cols == g.cols,
        "matmul_tn_acc", a.rows, g.rows);
  const auto k = static_cast<std::int64_t>(a.cols);
  const std::size_t m = a.rows;
  const std::size_t n = g.cols;
  const double* ad = a.data.data();
  const double* gd = g.data.data();
  double* cd = c.data.data();
#pragma omp parallel for schedule(static) if (m * a.cols * n >= kParallelWork)
  for (std::int64_t i = 0; i < k; ++i) {
    double* crow = cd + i * n;
    for (std::size_t r = 0; r < m; ++r) {
      const double av = ad[r * a.cols + i];
      if (av == 0.0) continue;  // ReLU-sparse inputs; skipping adds +0.0 only
      const double* grow = gd + r * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * grow[j];
    }
  }
}

void matmul_nt(ConstMat g, ConstMat w, Mat c) {
  check(g.cols == w.cols && c.rows == g.rows && c.cols == w.rows, "matmul_nt",
        g.cols, w.cols);
  const auto m = static_cast<std::int64_t>(g.rows);
  const std::size_t inner = g.cols;
  const std::size_t n = w.rows;
  const double* gd = g.data.data();
  const double* wd = w.data.data();
  double* cd = c.data.data();
#pragma omp parallel for schedule(static) if (g.rows * inner * n >= kParallelWork)
  for (std::int64_t i = 0; i < m; ++i) {
    const double* grow = gd + i * inner;
    for (std::size_t j = 0; j < n; ++j) {
      const double* wrow = wd + j * inner;
      double acc = 0.0;
      for (std::size_t k = 0; k < inner; ++k) acc += grow[k] * wrow[k];
      cd[i * n + j] = acc;
    }
  }
}

void col_sum_acc(ConstMat g, std::span<double> out) {
  check(out.size() == g.cols, "col_sum_acc", out.size(), g.cols);
  for (std::size_t i = 0; i < g.rows; ++i) {
    const double* grow = g.data.data() + i * g.cols;
    for (std::size_t j = 0; j < g.cols; ++j) out[j] += grow[j];
  }
}

}  // namespace parallel

void matmul(ConstMat a, ConstMat b, Mat c) {
  if (backend() == Backend::Reference) {
    reference::matmul(a, b, c);
  } else {
    parallel::matmul(a, b, c);
  }
}

void matmul_tn_acc(ConstMat a, ConstMat g, Mat c) {
  if (backend() == Backend::Reference) {
    reference::matmul_tn_acc(a, g, c);
  } else {
    parallel::matmul_tn_acc(a, g, c);
  }
}

void matmul_nt(ConstMat g, ConstMat w, Mat c) {
  if (backend() == Backend::Reference) {
    reference::matmul_nt(g, w, c);
  } else {
    parallel::matmul_nt(g, w, c);
  }
}

void col_sum_acc(ConstMat g, std::span<double> out) {
  if (backend() == Backend::Reference) {
    reference::col_sum_acc(g, out);
  } else {
    parallel::col_sum_acc(g, out);
  }
}

}  // namespace snet::kernels
