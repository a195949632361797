#ifndef NAGNTK_PATTERNS_H_
#define NAGNTK_PATTERNS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nagntk {

// Activation indicators I{<w^r, x_i> >= 0}, one bit per (instance, neuron).
class PatternMatrix {
 public:
  PatternMatrix() = default;
  PatternMatrix(std::size_t instances, std::size_t neurons)
      : n_(instances),
        m_(neurons),
        words_per_row_((neurons + 63) / 64),
        bits_(instances * words_per_row_, 0) {}

  std::size_t instances() const { return n_; }
  std::size_t neurons() const { return m_; }

  void set(std::size_t i, std::size_t r) {
    bits_[i * words_per_row_ + r / 64] |= std::uint64_t{1} << (r % 64);
  }
  bool test(std::size_t i, std::size_t r) const {
    return (bits_[i * words_per_row_ + r / 64] >> (r % 64)) & 1u;
  }

  std::span<const std::uint64_t> row(std::size_t i) const {
    return {bits_.data() + i * words_per_row_, words_per_row_};
  }
  std::span<std::uint64_t> row(std::size_t i) {
    return {bits_.data() + i * words_per_row_, words_per_row_};
  }

  // Number of neurons active on instance i.
  std::size_t active_count(std::size_t i) const;
  // Number of neurons active on both instance i and instance j.
  std::size_t joint_count(std::size_t i, std::size_t j) const;
  // Number of neurons whose indicator on instance i differs from `other`.
  std::size_t flip_count(const PatternMatrix& other, std::size_t i) const;

  friend bool operator==(const PatternMatrix&, const PatternMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> bits_;
};

}  // namespace nagntk

#endif  // NAGNTK_PATTERNS_H_
