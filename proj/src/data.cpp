#include "defcg/data.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <vector>

#include "defcg/random.hpp"

namespace defcg {

namespace {

std::vector<unsigned char> read_all(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t off,
                        const std::string& what) {
  if (buf.size() < off + 4) throw TruncatedFile(what + ": header truncated");
  return (std::uint32_t{buf[off]} << 24) | (std::uint32_t{buf[off + 1]} << 16) |
         (std::uint32_t{buf[off + 2]} << 8) | std::uint32_t{buf[off + 3]};
}

}  // namespace

Dataset load_mnist_idx(const std::filesystem::path& images,
                       const std::filesystem::path& labels, int digit_a,
                       int digit_b, std::size_t max_n) {
  const auto img = read_all(images);
  const auto lab = read_all(labels);

  if (const auto m = read_be32(img, 0, images.string()); m != kIdxImagesMagic)
    throw BadMagic(m, kIdxImagesMagic);
  if (const auto m = read_be32(lab, 0, labels.string()); m != kIdxLabelsMagic)
    throw BadMagic(m, kIdxLabelsMagic);

  const std::size_t count = read_be32(img, 4, images.string());
  const std::size_t rows = read_be32(img, 8, images.string());
  const std::size_t cols = read_be32(img, 12, images.string());
  const std::size_t label_count = read_be32(lab, 4, labels.string());
  if (label_count != count)
    throw DataError("image and label files disagree on the item count");
  const std::size_t pixels = rows * cols;
  if (img.size() < 16 + count * pixels) throw TruncatedFile(images.string() + ": pixel data truncated");
  if (lab.size() < 8 + count) throw TruncatedFile(labels.string() + ": label data truncated");

  std::vector<std::size_t> picked;
  for (std::size_t i = 0; i < count && picked.size() < max_n; ++i) {
    const int digit = lab[8 + i];
    if (digit == digit_a || digit == digit_b) picked.push_back(i);
  }
  bool seen_a = false;
  bool seen_b = false;
  for (std::size_t i = 0; i < count; ++i) {
    seen_a = seen_a || lab[8 + i] == digit_a;
    seen_b = seen_b || lab[8 + i] == digit_b;
  }
  if (!seen_a || !seen_b)
    throw DigitAbsent("digit " + std::to_string(seen_a ? digit_b : digit_a) +
                      " does not occur in " + labels.string());

  Dataset ds{Matrix(picked.size(), pixels), Labels(picked.size())};
  for (std::size_t r = 0; r < picked.size(); ++r) {
    const std::size_t src = picked[r];
    const auto row = ds.X.row(r);
    for (std::size_t c = 0; c < pixels; ++c) row[c] = img[16 + src * pixels + c] / 255.0;
    ds.y[r] = lab[8 + src] == digit_a ? 1 : -1;
  }
  return ds;
}

Dataset gen_synthetic(std::size_t n, std::size_t d, std::uint64_t seed,
                      double separation) {
  if (n < 2 || d < 1) throw std::invalid_argument("gen_synthetic: need n >= 2, d >= 1");
  Rng rng(seed);
  Dataset ds{Matrix(n, d), Labels(n)};
  for (std::size_t i = 0; i < n; ++i) {
    ds.y[i] = i % 2 == 0 ? 1 : -1;
    const auto row = ds.X.row(i);
    for (std::size_t c = 0; c < d; ++c) row[c] = rng.normal();
    row[0] += ds.y[i] * 0.5 * separation;
  }
  return ds;
}

}  // namespace defcg
