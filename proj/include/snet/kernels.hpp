#pragma once

// Dense matrix kernels behind every Linear layer.
//
// Two implementations are kept: `reference` is the textbook triple loop and
// exists for testing; `parallel` reorders the loops for contiguous access and
// splits output rows across OpenMP threads. Every output element is summed in
// the same order by both, so their results are bit-identical and training is
// reproducible regardless of thread count.

#include <cstddef>
#include <span>

namespace snet::kernels {

enum class Backend { Reference, Parallel };

void set_backend(Backend b);
Backend backend();
int max_threads();

/// Row-major matrix views: element (r, c) is data[r * cols + c].
struct ConstMat {
  std::span<const double> data;
  std::size_t rows;
  std::size_t cols;
};
struct Mat {
  std::span<double> data;
  std::size_t rows;
  std::size_t cols;
};

namespace reference {
void matmul(ConstMat a, ConstMat b, Mat c);
void matmul_tn_acc(ConstMat a, ConstMat g, Mat c);
void matmul_nt(ConstMat g, ConstMat w, Mat c);
void col_sum_acc(ConstMat g, std::span<double> out);
}  // namespace reference

namespace parallel {
void matmul(ConstMat a, ConstMat b, Mat c);
void matmul_tn_acc(ConstMat a, ConstMat g, Mat c);
void matmul_nt(ConstMat g, ConstMat w, Mat c);
void col_sum_acc(ConstMat g, std::span<double> out);
}  // namespace parallel

/// c = a * b
void matmul(ConstMat a, ConstMat b, Mat c);
/// c += a^T * g
void matmul_tn_acc(ConstMat a, ConstMat g, Mat c);
/// c = g * w^T
void matmul_nt(ConstMat g, ConstMat w, Mat c);
/// out[j] += sum_i g(i, j)
void col_sum_acc(ConstMat g, std::span<double> out);

}  // namespace snet::kernels
