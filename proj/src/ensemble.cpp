#include "bdls/ensemble.hpp"

#include <algorithm>
#include <stdexcept>

#include "bdls/csv.hpp"

namespace bdls {

Ensemble::Ensemble(DomainGeometry geometry, std::size_t count)
    : geometry_(std::move(geometry)), count_(count), positions_(count * geometry_.dim(), 0.0) {}

Ensemble::Ensemble(DomainGeometry geometry, std::vector<double> positions)
    : geometry_(std::move(geometry)), count_(0), positions_(std::move(positions)) {
  if (positions_.size() % geometry_.dim() != 0)
    throw std::invalid_argument("ensemble: position array is not a multiple of the dimension");
  count_ = positions_.size() / geometry_.dim();
}

void Ensemble::copy_particle(std::size_t src, std::size_t dst) {
  const std::size_t d = dim();
  std::copy_n(positions_.begin() + static_cast<std::ptrdiff_t>(src * d), d,
              positions_.begin() + static_cast<std::ptrdiff_t>(dst * d));
}

void Ensemble::project_all() {
  for (std::size_t i = 0; i < count_; ++i) geometry_.project(particle(i));
}

bool Ensemble::all_in_domain() const {
  for (std::size_t i = 0; i < count_; ++i)
    if (!geometry_.contains(particle(i))) return false;
  return true;
}

void write_snapshot_csv(std::ostream& os, const Ensemble& ensemble, std::uint64_t iteration) {
  os << "# iteration=" << iteration << '\n';
  for (std::size_t a = 0; a < ensemble.dim(); ++a) os << (a ? "," : "") << 'x' << (a + 1);
  os << '\n';
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto p = ensemble.particle(i);
    for (std::size_t a = 0; a < p.size(); ++a) {
      if (a) os << ',';
      os << format_real(p[a]);
    }
    os << '\n';
  }
}

}  // namespace bdls
