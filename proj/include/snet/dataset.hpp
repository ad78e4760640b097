#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "snet/tensor.hpp"

namespace snet {

enum class Split { Train, Test };

/// N x D inputs with integer labels. `hard` is filled only by the synthetic
/// generator and flags samples inside the class-overlap band.
struct Dataset {
  Tensor inputs;
  std::vector<int> labels;
  std::vector<std::size_t> sample_ids;
  std::vector<bool> hard;
  int num_classes = 0;
  Split split = Split::Train;

  std::size_t size() const { return labels.size(); }
  std::size_t dim() const { return inputs.cols(); }
  /// Rows `indices` of the inputs as a (k, D) tensor.
  Tensor gather(std::span<const std::size_t> indices) const;
  std::vector<int> gather_labels(std::span<const std::size_t> indices) const;
};

class IdxError : public Error {
 public:
  using Error::Error;
};
class IdxMagicError : public IdxError {
 public:
  using IdxError::IdxError;
};
class IdxTruncatedError : public IdxError {
 public:
  using IdxError::IdxError;
};
class IdxCountMismatchError : public IdxError {
 public:
  using IdxError::IdxError;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Reads an IDX image file (magic 0x803, big-endian dims) and its label
/// file (magic 0x801); pixels are scaled by 1/255.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 Split split = Split::Train, int num_classes = 10);

struct MnistFiles {
  std::filesystem::path images;
  std::filesystem::path labels;
};
MnistFiles mnist_files(const std::filesystem::path& root, Split split);

/// Loads one MNIST split from `root`; throws with the expected paths if a
/// file is missing.
Dataset load_mnist(const std::filesystem::path& root, Split split);

/// Dataset root from SNET_DATA_DIR, or "data/mnist" when unset.
std::filesystem::path default_data_root();

struct SyntheticSpec {
  std::size_t n = 2'000;
  double overlap = 0.2;
  std::uint64_t seed = 0;
};

/// Half-width of the overlap band on the first coordinate.
inline constexpr double kOverlapBand = 1.0;

/// Two 2-D Gaussian classes. A fraction `overlap` of samples is drawn inside
/// the band |x0| < 1 from a class-independent N(0, 0.5^2) (truncated to the
/// band), the rest from N(+-2.5, 1) truncated to the class side of the band.
/// The second coordinate is N(0, 1) noise. overlap = 0 is linearly separable.
Dataset make_two_gaussians(const SyntheticSpec& spec, Split split = Split::Train);

}  // namespace snet
