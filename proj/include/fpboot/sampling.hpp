#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "fpboot/error.hpp"
#include "fpboot/rng.hpp"

namespace fpboot {

struct PublicationRecord {
  double ncs = 0.0;  // field-normalized citation score
  bool top10 = false;

  friend bool operator==(const PublicationRecord&, const PublicationRecord&) = default;
};

// Immutable finite population, N >= 1, every ncs finite and nonnegative.
class Population {
 public:
  explicit Population(std::vector<PublicationRecord> records);

  std::size_t size() const noexcept { return records_.size(); }
  std::span<const PublicationRecord> records() const noexcept { return records_; }
  const PublicationRecord& operator[](std::size_t i) const { return records_[i]; }

 private:
  std::vector<PublicationRecord> records_;
};

// An SRSWOR draw. Indices are kept in ascending population order so that a
// census sample reproduces the population record order exactly.
struct Sample {
  std::vector<std::size_t> indices;
  std::vector<PublicationRecord> values;
  std::size_t population_size = 0;

  std::size_t n() const noexcept { return values.size(); }
  double fraction() const noexcept {
    return static_cast<double>(values.size()) / static_cast<double>(population_size);
  }
};

// Build a Sample from records that are already in hand (e.g. a sample file),
// given the size of the population they came from.
Sample make_sample(std::vector<PublicationRecord> records, std::size_t population_size);

// Reusable partial Fisher-Yates over 0..size-1. Each call to draw() returns a
// uniformly random ordered subset whatever permutation the buffer was left in
// by previous calls, so the buffer is never reset between draws.
class IndexSampler {
 public:
  explicit IndexSampler(std::size_t size) : perm_(size) {
    if (size > 0xFFFFFFFFULL) throw InvalidArgument("IndexSampler: size exceeds 2^32 - 1");
    std::iota(perm_.begin(), perm_.end(), std::uint32_t{0});
  }

  std::size_t size() const noexcept { return perm_.size(); }

  // Returns a view of k distinct indices; valid until the next draw().
  std::span<const std::uint32_t> draw(std::size_t k, RngStream& rng) noexcept {
    const std::size_t size = perm_.size();
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.uniform_index(size - i));
      std::swap(perm_[i], perm_[j]);
    }
    return {perm_.data(), k};
  }

 private:
  std::vector<std::uint32_t> perm_;
};

Sample srswor(const Population& pop, std::size_t n, RngStream& rng);

template <typename T>
std::vector<T> srswr(std::span<const T> items, std::size_t m, RngStream& rng) {
  if (items.empty()) throw InvalidArgument("srswr: cannot draw from an empty sequence");
  std::vector<T> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) out.push_back(items[rng.uniform_index(items.size())]);
  return out;
}

template <typename T>
std::vector<T> srswr(const std::vector<T>& items, std::size_t m, RngStream& rng) {
  return srswr(std::span<const T>(items), m, rng);
}

}  // namespace fpboot
