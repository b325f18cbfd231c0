#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mosaic {

/// Dense boolean connectivity matrix, row = presynaptic neuron.
class Mask {
 public:
  Mask() = default;
  Mask(int rows, int cols)
      : rows_(rows), cols_(cols),
        bits_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0) {
    if (rows < 0 || cols < 0)
      throw std::invalid_argument("Mask: negative dimensions");
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  bool at(int pre, int post) const { return bits_[index(pre, post)] != 0; }
  void set(int pre, int post, bool value = true) {
    bits_[index(pre, post)] = value ? 1 : 0;
  }

  std::int64_t count() const {
    std::int64_t n = 0;
    for (auto b : bits_) n += b;
    return n;
  }

  friend bool operator==(const Mask&, const Mask&) = default;

 private:
  std::size_t index(int pre, int post) const {
    if (pre < 0 || pre >= rows_ || post < 0 || post >= cols_)
      throw std::out_of_range("Mask: index out of range");
    return static_cast<std::size_t>(pre) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(post);
  }

  int rows_ = 0;
  int cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

}  // namespace mosaic
