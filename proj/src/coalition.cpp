#include "ragattr/coalition.hpp"

#include <cmath>

#include "ragattr/errors.hpp"

namespace ragattr {

namespace {

void check_player_count(int n) {
  if (n < 1 || n > kMaxPlayers) {
    throw BoundsError("player count " + std::to_string(n) + " outside [1, " +
                      std::to_string(kMaxPlayers) + "]");
  }
}

}  // namespace

std::uint32_t full_bits(int n) {
  check_player_count(n);
  return (1u << n) - 1u;
}

CoalitionMask::CoalitionMask(int n, std::uint32_t bits) : n_(n), bits_(bits) {
  if ((bits & ~full_bits(n)) != 0) {
    throw BoundsError("mask " + std::to_string(bits) + " has members outside 0.." +
                      std::to_string(n - 1));
  }
}

CoalitionMask CoalitionMask::full(int n) { return CoalitionMask(n, full_bits(n)); }

CoalitionMask CoalitionMask::of(int n, std::initializer_list<int> members) {
  CoalitionMask m = empty(n);
  for (int i : members) m = m.with(i);
  return m;
}

CoalitionMask CoalitionMask::with(int i) const {
  if (i < 0 || i >= n_) throw BoundsError("player " + std::to_string(i) + " out of range");
  return CoalitionMask(n_, bits_ | (1u << i));
}

CoalitionMask CoalitionMask::without(int i) const {
  if (i < 0 || i >= n_) throw BoundsError("player " + std::to_string(i) + " out of range");
  return CoalitionMask(n_, bits_ & ~(1u << i));
}

CoalitionMask CoalitionMask::complement() const {
  return CoalitionMask(n_, ~bits_ & full_bits(n_));
}

void CoalitionMask::check_same_width(const CoalitionMask& o) const {
  if (n_ != o.n_) throw BoundsError("mask width mismatch");
}

CoalitionMask CoalitionMask::operator|(const CoalitionMask& o) const {
  check_same_width(o);
  return CoalitionMask(n_, bits_ | o.bits_);
}

CoalitionMask CoalitionMask::operator&(const CoalitionMask& o) const {
  check_same_width(o);
  return CoalitionMask(n_, bits_ & o.bits_);
}

CoalitionMask CoalitionMask::operator-(const CoalitionMask& o) const {
  check_same_width(o);
  return CoalitionMask(n_, bits_ & ~o.bits_);
}

std::vector<int> CoalitionMask::members() const {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(cardinality()));
  for (std::uint32_t b = bits_; b; b &= b - 1) out.push_back(std::countr_zero(b));
  return out;
}

std::string CoalitionMask::to_string() const {
  std::string s = "{";
  bool first = true;
  for (int i : members()) {
    if (!first) s += ',';
    s += std::to_string(i);
    first = false;
  }
  return s + "}";
}

std::vector<CoalitionMask> enumerate_coalitions(int n) {
  const std::uint32_t last = full_bits(n);
  std::vector<CoalitionMask> out;
  out.reserve(std::size_t{1} << n);
  for (std::uint64_t b = 0; b <= last; ++b) out.emplace_back(n, static_cast<std::uint32_t>(b));
  return out;
}

std::vector<CoalitionMask> enumerate_k_subsets(int n, int k) {
  check_player_count(n);
  if (k < 0 || k > n) {
    throw BoundsError("subset size " + std::to_string(k) + " outside [0, " + std::to_string(n) + "]");
  }
  std::vector<CoalitionMask> out;
  if (k == 0) {
    out.emplace_back(n, 0u);
    return out;
  }
  // Gosper's hack: next larger integer with the same popcount.
  const std::uint64_t limit = std::uint64_t{1} << n;
  for (std::uint64_t v = (std::uint64_t{1} << k) - 1; v < limit;) {
    out.emplace_back(n, static_cast<std::uint32_t>(v));
    const std::uint64_t c = v & (~v + 1);
    const std::uint64_t r = v + c;
    v = (((r ^ v) >> 2) / c) | r;
  }
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double shapley_weight(int n, int s) {
  check_player_count(n);
  if (s < 0 || s >= n) {
    throw BoundsError("coalition size " + std::to_string(s) + " outside [0, " +
                      std::to_string(n - 1) + "]");
  }
  return std::exp(std::lgamma(s + 1.0) + std::lgamma(static_cast<double>(n - s)) -
                  std::lgamma(n + 1.0));
}

double shap_kernel_weight(int n, int s) {
  check_player_count(n);
  if (s <= 0 || s >= n) {
    throw BoundsError("SHAP kernel is infinite at size " + std::to_string(s));
  }
  return (n - 1.0) / (binomial(n, s) * s * (n - s));
}

}  // namespace ragattr
