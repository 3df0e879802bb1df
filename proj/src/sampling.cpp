#include "fpboot/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fpboot {

Population::Population(std::vector<PublicationRecord> records) : records_(std::move(records)) {
  if (records_.empty()) throw InvalidArgument("population must contain at least one record");
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const double x = records_[i].ncs;
    if (!std::isfinite(x) || x < 0.0)
      throw InvalidArgument("record " + std::to_string(i) + ": ncs must be finite and >= 0");
  }
}

Sample make_sample(std::vector<PublicationRecord> records, std::size_t population_size) {
  if (records.empty()) throw InvalidArgument("sample must contain at least one record");
  if (records.size() > population_size)
    throw InvalidArgument("sample size " + std::to_string(records.size()) +
                          " exceeds population size " + std::to_string(population_size));
  Sample s;
  s.indices.resize(records.size());
  std::iota(s.indices.begin(), s.indices.end(), std::size_t{0});
  s.values = std::move(records);
  s.population_size = population_size;
  return s;
}

Sample srswor(const Population& pop, std::size_t n, RngStream& rng) {
  const std::size_t N = pop.size();
  if (n == 0 || n > N)
    throw InvalidArgument("srswor: need 1 <= n <= N, got n=" + std::to_string(n) +
                          ", N=" + std::to_string(N));
  IndexSampler sampler(N);
  auto picked = sampler.draw(n, rng);

  Sample s;
  s.indices.assign(picked.begin(), picked.end());
  std::sort(s.indices.begin(), s.indices.end());
  s.values.reserve(n);
  for (std::size_t i : s.indices) s.values.push_back(pop[i]);
  s.population_size = N;
  return s;
}

}  // namespace fpboot
