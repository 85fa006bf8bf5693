#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "defcg/data.hpp"

using namespace defcg;
namespace fs = std::filesystem;

namespace {

using Bytes = std::vector<unsigned char>;

void put_be32(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<unsigned char>(v >> 24));
  out.push_back(static_cast<unsigned char>(v >> 16));
  out.push_back(static_cast<unsigned char>(v >> 8));
  out.push_back(static_cast<unsigned char>(v));
}

// IDX pair of 28x28 images; image i is filled with the byte pattern
// (i * 40 + pixel) mod 256.
struct Fixture {
  fs::path dir;
  fs::path images;
  fs::path labels;

  explicit Fixture(const std::vector<int>& digits, std::uint32_t image_magic = 2051,
                   std::size_t drop_tail = 0) {
    dir = fs::temp_directory_path() / ("defcg_idx_" + std::to_string(counter()++));
    fs::create_directories(dir);
    images = dir / "images.idx";
    labels = dir / "labels.idx";
    Bytes img, lab;
    put_be32(img, image_magic);
    put_be32(img, static_cast<std::uint32_t>(digits.size()));
    put_be32(img, 28);
    put_be32(img, 28);
    for (std::size_t i = 0; i < digits.size(); ++i)
      for (std::size_t p = 0; p < 784; ++p) img.push_back(static_cast<unsigned char>((i * 40 + p) % 256));
    put_be32(lab, 2049);
    put_be32(lab, static_cast<std::uint32_t>(digits.size()));
    for (int d : digits) lab.push_back(static_cast<unsigned char>(d));
    img.resize(img.size() - drop_tail);
    write(images, img);
    write(labels, lab);
  }
  ~Fixture() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  static int& counter() {
    static int c = 0;
    return c;
  }
  static void write(const fs::path& p, const Bytes& b) {
    std::ofstream out(p, std::ios::binary);
    out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size()));
  }
};

}  // namespace

TEST_CASE("two-image IDX fixture") {
  const Fixture fx({3, 5});
  const Dataset ds = load_mnist_idx(fx.images, fx.labels, 3, 5, 100);
  CHECK(ds.X.rows() == 2);
  CHECK(ds.X.cols() == 784);
  CHECK(ds.y == Labels{1, -1});
  CHECK(ds.X(0, 0) == 0.0);
  CHECK(ds.X(0, 255) == 1.0);
  CHECK(ds.X(1, 0) == doctest::Approx(40.0 / 255));
  CHECK(ds.X(1, 783) == doctest::Approx(((40 + 783) % 256) / 255.0));
}

TEST_CASE("IDX filtering keeps file order and truncates") {
  const Fixture fx({1, 5, 3, 7, 3, 5});
  const Dataset all = load_mnist_idx(fx.images, fx.labels, 3, 5, 100);
  CHECK(all.y == Labels{-1, 1, 1, -1});
  CHECK(all.X(0, 0) == doctest::Approx(40.0 / 255));

  const Dataset one = load_mnist_idx(fx.images, fx.labels, 3, 5, 1);
  CHECK(one.X.rows() == 1);
  CHECK(one.y.size() == 1);
  CHECK(one.y[0] == -1);
}

TEST_CASE("IDX error cases") {
  const Fixture fx({3, 5});
  try {
    load_mnist_idx(fx.labels, fx.labels, 3, 5, 10);
    FAIL("expected BadMagic");
  } catch (const BadMagic& e) {
    CHECK(e.found == 2049);
  }

  const Fixture truncated({3, 5}, 2051, 100);
  CHECK_THROWS_AS(load_mnist_idx(truncated.images, truncated.labels, 3, 5, 10), TruncatedFile);

  const Fixture no_five({3, 3, 1});
  CHECK_THROWS_AS(load_mnist_idx(no_five.images, no_five.labels, 3, 5, 10), DigitAbsent);

  CHECK_THROWS_AS(load_mnist_idx(fx.dir / "missing", fx.labels, 3, 5, 10), IoError);
}

TEST_CASE("gen_synthetic is deterministic per seed") {
  const Dataset a = gen_synthetic(50, 3, 9, 2.0);
  const Dataset b = gen_synthetic(50, 3, 9, 2.0);
  CHECK(a.X == b.X);
  CHECK(a.y == b.y);
  CHECK_FALSE(a.X == gen_synthetic(50, 3, 10, 2.0).X);
  CHECK(a.X.rows() == 50);
  CHECK(a.X.cols() == 3);
  int balance = 0;
  for (int y : a.y) balance += y;
  CHECK(balance == 0);
}

TEST_CASE("gen_synthetic with coinciding clusters is still valid") {
  const Dataset ds = gen_synthetic(10, 2, 0, 0.0);
  CHECK(ds.X.all_finite());
  for (int y : ds.y) CHECK((y == 1 || y == -1));
}

TEST_CASE("large separation makes labels follow the sign of x") {
  const Dataset ds = gen_synthetic(4, 1, 1, 100.0);
  for (std::size_t i = 0; i < 4; ++i) CHECK((ds.X(i, 0) > 0) == (ds.y[i] == 1));
  CHECK_THROWS_AS(gen_synthetic(1, 1, 0, 1.0), std::invalid_argument);
}
