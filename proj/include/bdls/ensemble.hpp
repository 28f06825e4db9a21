#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "bdls/geometry.hpp"

namespace bdls {

// N particles in d dimensions, stored row-major (particle i occupies
// positions()[i*d, (i+1)*d)). The particle count is fixed at construction;
// samplers only ever overwrite positions.
class Ensemble {
 public:
  Ensemble(DomainGeometry geometry, std::size_t count);
  Ensemble(DomainGeometry geometry, std::vector<double> positions);

  std::size_t size() const { return count_; }
  std::size_t dim() const { return geometry_.dim(); }
  const DomainGeometry& geometry() const { return geometry_; }

  std::span<double> particle(std::size_t i) { return {positions_.data() + i * dim(), dim()}; }
  std::span<const double> particle(std::size_t i) const {
    return {positions_.data() + i * dim(), dim()};
  }
  double& at(std::size_t i, std::size_t axis) { return positions_[i * dim() + axis]; }
  double at(std::size_t i, std::size_t axis) const { return positions_[i * dim() + axis]; }

  std::span<double> positions() { return positions_; }
  std::span<const double> positions() const { return positions_; }

  // Overwrites particle dst with a copy of particle src.
  void copy_particle(std::size_t src, std::size_t dst);

  std::uint64_t generation() const { return generation_; }
  void advance_generation() { ++generation_; }

  void project_all();
  bool all_in_domain() const;

  bool operator==(const Ensemble& other) const {
    return count_ == other.count_ && positions_ == other.positions_;
  }

 private:
  DomainGeometry geometry_;
  std::size_t count_;
  std::vector<double> positions_;
  std::uint64_t generation_ = 0;
};

// Snapshot CSV: a "# iteration=<j>" line, a header x1..xd, then one row per
// particle with coordinates at full precision.
void write_snapshot_csv(std::ostream& os, const Ensemble& ensemble, std::uint64_t iteration);

}  // namespace bdls
