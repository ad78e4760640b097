// Times the reference and OpenMP kernels on the shapes used in training.

#include <chrono>
#include <cstdio>
#include <vector>

#include "snet/kernels.hpp"
#include "snet/rng.hpp"

namespace {

using clock_type = std::chrono::steady_clock;
namespace k = snet::kernels;

struct Shape {
  const char* name;
  std::size_t m, kk, n;
};

template <typename Fn>
double time_ms(Fn&& fn, int reps) {
  fn();
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto t1 = clock_type::now();
  return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
  const Shape shapes[] = {
      {"mnist fc1 (32x784 * 784x256)", 32, 784, 256},
      {"mnist fc2 (32x256 * 256x128)", 32, 256, 128},
      {"eval fc1 (1024x784 * 784x256)", 1024, 784, 256},
      {"q-net (32x64 * 64x64)", 32, 64, 64},
  };
  snet::Rng rng(1);
  std::printf("threads: %d\n", k::max_threads());
  std::printf("%-34s %12s %12s %12s %12s %8s\n", "shape", "ref fwd ms", "par fwd ms",
              "ref dW ms", "par dW ms", "same");
  for (const Shape& s : shapes) {
    std::vector<double> a(s.m * s.kk), b(s.kk * s.n), g(s.m * s.n);
    for (auto& v : a) v = snet::uniform01(rng) - 0.5;
    for (auto& v : b) v = snet::uniform01(rng) - 0.5;
    for (auto& v : g) v = snet::uniform01(rng) - 0.5;
    std::vector<double> c_ref(s.m * s.n), c_par(s.m * s.n);
    std::vector<double> w_ref(s.kk * s.n), w_par(s.kk * s.n);
    const int reps = s.m > 100 ? 5 : 50;

    const double fr = time_ms([&] { k::reference::matmul({a, s.m, s.kk}, {b, s.kk, s.n}, {c_ref, s.m, s.n}); }, reps);
    const double fp = time_ms([&] { k::parallel::matmul({a, s.m, s.kk}, {b, s.kk, s.n}, {c_par, s.m, s.n}); }, reps);
    std::fill(w_ref.begin(), w_ref.end(), 0.0);
    std::fill(w_par.begin(), w_par.end(), 0.0);
    const double dr = time_ms([&] { k::reference::matmul_tn_acc({a, s.m, s.kk}, {g, s.m, s.n}, {w_ref, s.kk, s.n}); }, reps);
    const double dp = time_ms([&] { k::parallel::matmul_tn_acc({a, s.m, s.kk}, {g, s.m, s.n}, {w_par, s.kk, s.n}); }, reps);
    const bool same = c_ref == c_par && w_ref == w_par;
    std::printf("%-34s %12.3f %12.3f %12.3f %12.3f %8s\n", s.name, fr, fp, dr, dp, same ? "yes" : "NO");
  }
  return 0;
}
