#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "defcg/dense.hpp"
#include "defcg/gpc.hpp"

namespace defcg {

/// Any failure to obtain a usable data set.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BadMagic : public DataError {
 public:
  BadMagic(std::uint32_t got, std::uint32_t expected)
      : DataError("IDX file has magic " + std::to_string(got) + ", expected " +
                  std::to_string(expected)),
        found(got) {}
  std::uint32_t found;
};

class TruncatedFile : public DataError {
 public:
  using DataError::DataError;
};

class DigitAbsent : public DataError {
 public:
  using DataError::DataError;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

struct Dataset {
  Matrix X;
  Labels y;
};

/// Two-digit subset of an MNIST IDX pair. digit_a maps to +1, digit_b to
/// -1; file order is kept and the result truncated to max_n rows. Pixels
/// are scaled to [0, 1].
Dataset load_mnist_idx(const std::filesystem::path& images,
                       const std::filesystem::path& labels, int digit_a,
                       int digit_b, std::size_t max_n);

/// Two isotropic unit-variance Gaussian clusters centred at
/// +-(separation/2) e_1. Labels alternate +1, -1 so the classes are
/// balanced. Deterministic per seed.
Dataset gen_synthetic(std::size_t n, std::size_t d, std::uint64_t seed,
                      double separation);

}  // namespace defcg
