#include "nagntk/patterns.h"

#include <bit>

#include "nagntk/errors.h"

namespace nagntk {

std::size_t PatternMatrix::active_count(std::size_t i) const {
  std::size_t c = 0;
  for (std::uint64_t w : row(i)) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::size_t PatternMatrix::joint_count(std::size_t i, std::size_t j) const {
  const auto a = row(i);
  const auto b = row(j);
  std::size_t c = 0;
  for (std::size_t k = 0; k < a.size(); ++k)
    c += static_cast<std::size_t>(std::popcount(a[k] & b[k]));
  return c;
}

std::size_t PatternMatrix::flip_count(const PatternMatrix& other,
                                      std::size_t i) const {
  if (other.n_ != n_ || other.m_ != m_) {
    throw DimensionError("pattern matrices have different shapes");
  }
  const auto a = row(i);
  const auto b = other.row(i);
  std::size_t c = 0;
  for (std::size_t k = 0; k < a.size(); ++k)
    c += static_cast<std::size_t>(std::popcount(a[k] ^ b[k]));
  return c;
}

}  // namespace nagntk
