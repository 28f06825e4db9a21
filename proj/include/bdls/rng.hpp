#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace bdls {

// A reproducible random stream keyed by (seed, stream id). Two streams with
// the same key and the same call sequence produce identical draws.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// One stream per particle slot so that the diffusion phase can run in
// parallel without changing the draws any slot sees.
class StreamBank {
 public:
  StreamBank(std::uint64_t seed, std::size_t slots, std::uint64_t first_stream = 0);

  RngStream& operator[](std::size_t slot) { return streams_[slot]; }
  std::size_t size() const { return streams_.size(); }

 private:
  std::vector<RngStream> streams_;
};

// Stable 64-bit mixing used to derive per-cell seeds: hash(base, label, index).
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t base, std::string_view label, std::uint64_t index);

}  // namespace bdls
