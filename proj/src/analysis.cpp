#include "snet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace snet {

namespace {

constexpr std::size_t kChunk = 1024;

template <typename Fn>
void for_chunks(const Tensor& inputs, Fn&& fn) {
  const std::size_t n = inputs.rows();
  const std::size_t d = inputs.cols();
  for (std::size_t start = 0; start < n; start += kChunk) {
    const std::size_t len = std::min(kChunk, n - start);
    const auto src = inputs.data().subspan(start * d, len * d);
    Tensor chunk({len, d}, std::vector<double>(src.begin(), src.end()));
    fn(start, chunk);
  }
}

}  // namespace

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::correct() const {
  std::uint64_t s = 0;
  for (std::size_t c = 0; c < classes; ++c) s += at(c, c);
  return s;
}

ConfusionMatrix ConfusionMatrix::failures_only() const {
  ConfusionMatrix out = *this;
  for (std::size_t c = 0; c < classes; ++c) out.at(c, c) = 0;
  return out;
}

double ConfusionMatrix::accuracy() const {
  const auto t = total();
  return t == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(t);
}

std::vector<int> predict_classes(const Network& net, const Tensor& inputs) {
  std::vector<int> out(inputs.rows());
  for_chunks(inputs, [&](std::size_t start, const Tensor& chunk) {
    const Tensor logits = net.infer(chunk);
    for (std::size_t r = 0; r < logits.rows(); ++r) {
      const auto row = logits.row_span(r);
      out[start + r] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
  });
  return out;
}

double classification_accuracy(const Network& net, const Dataset& ds) {
  if (ds.size() == 0) return 0.0;
  const auto pred = predict_classes(net, ds.inputs);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == ds.labels[i];
  return static_cast<double>(hit) / static_cast<double>(ds.size());
}

ConfusionResult confusion_failures(const Network& net, const Dataset& ds) {
  ConfusionMatrix m(static_cast<std::size_t>(ds.num_classes));
  const auto pred = predict_classes(net, ds.inputs);
  for (std::size_t i = 0; i < pred.size(); ++i) {
    m.at(static_cast<std::size_t>(ds.labels[i]), static_cast<std::size_t>(pred[i]))++;
  }
  return {m, m.failures_only()};
}

std::vector<double> screener_weights(const Network& screener, const Tensor& inputs) {
  std::vector<double> out(inputs.rows());
  for_chunks(inputs, [&](std::size_t start, const Tensor& chunk) {
    const Tensor w = screener.infer(chunk);
    std::copy(w.data().begin(), w.data().end(), out.begin() + static_cast<std::ptrdiff_t>(start));
  });
  return out;
}

void WeightTracker::record(const Network& screener, const Dataset& ds, std::size_t epoch) {
  epochs_.push_back(epoch);
  history_.push_back(screener_weights(screener, ds.inputs));
}

const std::vector<double>& WeightTracker::latest() const {
  if (history_.empty()) throw Error("weight tracker: nothing recorded");
  return history_.back();
}

WeightTrace WeightTracker::trace(std::size_t sample_index) const {
  WeightTrace t;
  t.sample_id = sample_index;
  t.epochs = epochs_;
  for (const auto& snap : history_) {
    if (sample_index >= snap.size()) throw Error("weight tracker: sample index out of range");
    t.weights.push_back(snap[sample_index]);
  }
  return t;
}

std::vector<ExtremeSample> WeightTracker::extremes(const Dataset& ds, std::size_t k,
                                                   bool highest) const {
  const auto& w = latest();
  std::vector<std::size_t> order(w.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return highest ? w[a] > w[b] : w[a] < w[b];
  });
  order.resize(std::min(k, order.size()));
  std::vector<ExtremeSample> out;
  for (std::size_t i : order) out.push_back({ds.sample_ids[i], ds.labels[i], w[i]});
  return out;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> rank(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) rank[idx[k]] = r;
    i = j + 1;
  }
  return rank;
}

}  // namespace

double spearman(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw Error("spearman: need two equal-length samples");
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

void write_pgm(const std::filesystem::path& path, std::span<const double> pixels,
               std::size_t width, std::size_t height) {
  if (pixels.size() != width * height) throw Error("pgm: pixel count does not match dimensions");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("pgm: cannot write " + path.string());
  out << "P5\n" << width << ' ' << height << "\n255\n";
  for (double v : pixels) {
    const long q = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
    out.put(static_cast<char>(static_cast<unsigned char>(q)));
  }
}

}  // namespace snet
