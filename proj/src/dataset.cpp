#include "snet/dataset.hpp"

#include <array>
#include <cstdlib>
#include <fstream>
#include <random>

#include "snet/rng.hpp"

namespace snet {

Tensor Dataset::gather(std::span<const std::size_t> indices) const {
  const std::size_t d = dim();
  Tensor out({indices.size(), d});
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto src = inputs.row_span(indices[k]);
    std::copy(src.begin(), src.end(), out.row_span(k).begin());
  }
  return out;
}

std::vector<int> Dataset::gather_labels(std::span<const std::size_t> indices) const {
  std::vector<int> out(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) out[k] = labels[indices[k]];
  return out;
}

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IdxError("idx: cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<unsigned char>& b, std::size_t off) {
  return (std::uint32_t{b[off]} << 24) | (std::uint32_t{b[off + 1]} << 16) |
         (std::uint32_t{b[off + 2]} << 8) | std::uint32_t{b[off + 3]};
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 Split split, int num_classes) {
  const auto img = read_file(images);
  const auto lab = read_file(labels);

  if (img.size() < 16) throw IdxTruncatedError("idx: " + images.string() + " has no full header");
  if (be32(img, 0) != kIdxImagesMagic) {
    throw IdxMagicError("idx: " + images.string() + " has bad magic (expected 0x00000803)");
  }
  if (lab.size() < 8) throw IdxTruncatedError("idx: " + labels.string() + " has no full header");
  if (be32(lab, 0) != kIdxLabelsMagic) {
    throw IdxMagicError("idx: " + labels.string() + " has bad magic (expected 0x00000801)");
  }
  const std::size_t n = be32(img, 4);
  const std::size_t rows = be32(img, 8);
  const std::size_t cols = be32(img, 12);
  const std::size_t n_labels = be32(lab, 4);
  if (n != n_labels) {
    throw IdxCountMismatchError("idx: " + std::to_string(n) + " images but " +
                                std::to_string(n_labels) + " labels");
  }
  const std::size_t d = rows * cols;
  if (img.size() < 16 + n * d) {
    throw IdxTruncatedError("idx: " + images.string() + " holds fewer pixels than its header declares");
  }
  if (lab.size() < 8 + n) {
    throw IdxTruncatedError("idx: " + labels.string() + " holds fewer labels than its header declares");
  }

  Dataset ds;
  ds.split = split;
  ds.num_classes = num_classes;
  ds.inputs = Tensor({n, d});
  auto px = ds.inputs.data();
  for (std::size_t i = 0; i < n * d; ++i) px[i] = static_cast<double>(img[16 + i]) / 255.0;
  ds.labels.resize(n);
  ds.sample_ids.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    ds.labels[i] = lab[8 + i];
    if (ds.labels[i] >= num_classes) {
      throw IdxError("idx: label " + std::to_string(ds.labels[i]) + " at index " +
                     std::to_string(i) + " exceeds class count");
    }
    ds.sample_ids[i] = i;
  }
  return ds;
}

MnistFiles mnist_files(const std::filesystem::path& root, Split split) {
  const std::string prefix = split == Split::Train ? "train" : "t10k";
  return {root / (prefix + "-images-idx3-ubyte"), root / (prefix + "-labels-idx1-ubyte")};
}

Dataset load_mnist(const std::filesystem::path& root, Split split) {
  const MnistFiles f = mnist_files(root, split);
  for (const auto& p : {f.images, f.labels}) {
    if (!std::filesystem::exists(p)) {
      throw IdxError("mnist: missing " + p.string() + " (expected " + f.images.string() +
                     " and " + f.labels.string() + "; set SNET_DATA_DIR)");
    }
  }
  return load_idx(f.images, f.labels, split, 10);
}

std::filesystem::path default_data_root() {
  if (const char* env = std::getenv("SNET_DATA_DIR"); env && *env) return env;
  return "data/mnist";
}

Dataset make_two_gaussians(const SyntheticSpec& spec, Split split) {
  if (spec.n < 4) throw Error("synthetic: need at least 4 samples");
  if (!(spec.overlap >= 0.0 && spec.overlap < 1.0)) {
    throw Error("synthetic: overlap must lie in [0, 1)");
  }
  Rng rng(spec.seed);
  std::normal_distribution<double> band(0.0, 0.5);
  std::normal_distribution<double> side(2.5, 1.0);
  std::normal_distribution<double> noise(0.0, 1.0);

  Dataset ds;
  ds.split = split;
  ds.num_classes = 2;
  ds.inputs = Tensor({spec.n, 2});
  ds.labels.resize(spec.n);
  ds.sample_ids.resize(spec.n);
  ds.hard.resize(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    const int label = static_cast<int>(rng() & 1u);
    const bool hard = uniform01(rng) < spec.overlap;
    double x0;
    if (hard) {
      do {
        x0 = band(rng);
      } while (!(std::abs(x0) < kOverlapBand));
    } else {
      do {
        x0 = side(rng);
      } while (!(x0 >= kOverlapBand));
      if (label == 0) x0 = -x0;
    }
    ds.inputs.at(i, 0) = x0;
    ds.inputs.at(i, 1) = noise(rng);
    ds.labels[i] = label;
    ds.sample_ids[i] = i;
    ds.hard[i] = hard;
  }
  return ds;
}

}  // namespace snet
