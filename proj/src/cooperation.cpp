#include "modnet/cooperation.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "modnet/errors.hpp"

namespace modnet {

std::optional<double> similarity(const UserProfile& u, const UserProfile& v,
                                 std::uint32_t min_overlap) {
  std::vector<double> a;
  std::vector<double> b;
  for (const auto& [model, est] : u.estimates) {
    if (!est.has_data()) continue;
    auto it = v.estimates.find(model);
    if (it == v.estimates.end() || !it->second.has_data()) continue;
    a.push_back(*est.mean());
    b.push_back(*it->second.mean());
  }
  if (a.size() < std::max<std::uint32_t>(min_overlap, 1)) return std::nullopt;

  const double n = static_cast<double>(a.size());
  double ma = 0.0;
  double mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double sab = 0.0;
  double saa = 0.0;
  double sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::optional<double> predict_fit(const UserProfile& user, ModelId model,
                                  std::span<const Neighbor> neighbors) {
  if (auto it = user.estimates.find(model); it != user.estimates.end() && it->second.has_data()) {
    throw StateError("predict_fit: user already has measurements for this model");
  }
  double num = 0.0;
  double den = 0.0;
  double lo = 1.0;
  double hi = 0.0;
  for (const auto& n : neighbors) {
    if (!(n.similarity > 0.0) || n.profile == nullptr) continue;
    auto it = n.profile->estimates.find(model);
    if (it == n.profile->estimates.end() || !it->second.has_data()) continue;
    const double m = *it->second.mean();
    num += n.similarity * m;
    den += n.similarity;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  if (den == 0.0) return std::nullopt;
  // the weighted mean is a convex combination; clamp rounding back into range
  return std::clamp(num / den, lo, hi);
}

}  // namespace modnet
