#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace ragattr {

inline constexpr int kMaxPlayers = 30;

// Subset of the players {0, ..., n-1}. Bit i is set when document i is in
// the coalition. Bits at positions >= n are always zero.
class CoalitionMask {
 public:
  CoalitionMask() = default;

  // Throws BoundsError if n is outside [1, kMaxPlayers] or bits has members >= n.
  CoalitionMask(int n, std::uint32_t bits);

  static CoalitionMask empty(int n) { return CoalitionMask(n, 0); }
  static CoalitionMask full(int n);
  static CoalitionMask of(int n, std::initializer_list<int> members);

  int n() const { return n_; }
  std::uint32_t bits() const { return bits_; }
  int cardinality() const { return std::popcount(bits_); }
  bool empty() const { return bits_ == 0; }

  bool contains(int i) const { return i >= 0 && i < n_ && ((bits_ >> i) & 1u); }
  CoalitionMask with(int i) const;
  CoalitionMask without(int i) const;
  CoalitionMask complement() const;
  CoalitionMask operator|(const CoalitionMask& o) const;
  CoalitionMask operator&(const CoalitionMask& o) const;
  // Set difference this \ o.
  CoalitionMask operator-(const CoalitionMask& o) const;
  bool subset_of(const CoalitionMask& o) const { return (bits_ & ~o.bits_) == 0; }

  std::vector<int> members() const;
  std::string to_string() const;  // "{0,2}"

  friend bool operator==(const CoalitionMask&, const CoalitionMask&) = default;
  friend auto operator<=>(const CoalitionMask& a, const CoalitionMask& b) {
    return a.bits_ <=> b.bits_;
  }

 private:
  void check_same_width(const CoalitionMask& o) const;

  int n_ = 0;
  std::uint32_t bits_ = 0;
};

std::uint32_t full_bits(int n);

// All 2^n masks in ascending integer order, empty first and full last.
std::vector<CoalitionMask> enumerate_coalitions(int n);

// All C(n, k) masks of cardinality k, in ascending integer order.
std::vector<CoalitionMask> enumerate_k_subsets(int n, int k);

double binomial(int n, int k);

// s! (n-s-1)! / n!, the weight of a coalition of size s in the Shapley sum
// over subsets of the other n-1 players. Computed from log-factorials.
double shapley_weight(int n, int s);

// SHAP kernel weight (n-1) / (C(n,s) s (n-s)) for 0 < s < n.
double shap_kernel_weight(int n, int s);

}  // namespace ragattr
