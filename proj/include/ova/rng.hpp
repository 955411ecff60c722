#pragma once

#include <cstdint>
#include <random>

namespace ova {

// Deterministic uniform stream. The shift-based conversion to doubles avoids
// depending on library distribution internals, so equal seeds give equal
// streams everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // uniform on [0, 1)
  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace ova
