#pragma once

// Finitely generated group models with exact integer encodings, word-metric
// balls by breadth-first search, Følner ratios, growth fits and the
// Heisenberg normal form.

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/rational.hpp>

#include "ncerg/errors.hpp"

namespace ncerg::groups {

inline constexpr int kMaxRank = 6;
inline constexpr std::size_t kDefaultElementCap = 5'000'000;

/// Canonical encoding of a group element: an integer tuple whose meaning
/// depends on the model (lattice coordinates, Heisenberg matrix entries
/// (a, b, c), residues, or a bit mask in slot 0 for the locally finite model).
struct Code {
  std::array<std::int64_t, kMaxRank> v{};

  std::int64_t& operator[](std::size_t i) { return v[i]; }
  std::int64_t operator[](std::size_t i) const { return v[i]; }
  friend bool operator==(const Code&, const Code&) = default;
  friend auto operator<=>(const Code&, const Code&) = default;
};

struct CodeHash {
  std::size_t operator()(const Code& c) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (std::int64_t x : c.v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

template <class T>
using CodeMap = std::unordered_map<Code, T, CodeHash>;

enum class GroupKind { kIntegerLattice, kHeisenberg, kCyclicProduct, kLocallyFinite };

class GroupModel {
 public:
  /// Z^d with V = {±e_1, ..., ±e_d}.
  static GroupModel integer_lattice(int d);
  /// Discrete Heisenberg group as unipotent integer matrices
  /// [[1,a,c],[0,1,b],[0,0,1]] encoded (a, b, c). V = {x^{±1}, y^{±1}}, plus
  /// z^{±1} when `with_center` (the generating set T closed under commutators).
  static GroupModel heisenberg(bool with_center = false);
  /// (Z/mZ)^d with V = {±e_i}.
  static GroupModel cyclic_product(std::int64_t modulus, int d);
  /// The restricted product ⊕_{i<levels} Z/2Z as bit masks, with V the unit
  /// vectors of the first `levels` factors.
  static GroupModel locally_finite(int levels = 62);

  /// Same group with another generating set; throws DomainError unless the
  /// set is symmetric.
  GroupModel with_generators(std::vector<Code> generators) const;

  GroupKind kind() const { return kind_; }
  int rank() const { return rank_; }
  std::int64_t modulus() const { return modulus_; }
  const std::vector<Code>& generators() const { return generators_; }
  std::string name() const;

  Code identity() const { return Code{}; }
  Code multiply(const Code& g, const Code& h) const;
  Code inverse(const Code& g) const;
  Code power(const Code& g, std::int64_t k) const;
  /// Builds a code from its coordinates (reduced for cyclic models).
  Code make(std::initializer_list<std::int64_t> coords) const;
  std::string format(const Code& g) const;

 private:
  GroupModel(GroupKind kind, int rank, std::int64_t modulus, std::vector<Code> generators);

  GroupKind kind_;
  int rank_;
  std::int64_t modulus_;
  std::vector<Code> generators_;
};

/// The closed word-metric ball B_n = {g : d(e, g) ≤ n}, identity included.
/// Elements are stored in breadth-first order with their word length and a
/// parent link (element index and generator index) giving a geodesic word.
struct Ball {
  int radius = 0;
  std::vector<Code> elements;
  std::vector<int> lengths;
  std::vector<std::size_t> parent;
  std::vector<int> parent_generator;
  CodeMap<std::size_t> index;

  std::size_t size() const { return elements.size(); }
  bool contains(const Code& g) const { return index.contains(g); }
  /// Word length of g, or -1 when g lies outside the ball.
  int length(const Code& g) const;
  std::vector<Code> boundary() const;
  /// |B_r| for r ≤ radius.
  std::size_t size_at(int r) const;
  /// Generator indices of a geodesic word for the element at `i`.
  std::vector<int> geodesic(std::size_t i) const;
};

Ball ball(const GroupModel& group, int n, std::size_t cap = kDefaultElementCap);

/// The raw product set V^n (no identity adjoined).
std::vector<Code> product_set_power(const GroupModel& group, int n,
                                    std::size_t cap = kDefaultElementCap);

using Rational = boost::rational<std::int64_t>;

/// |F g △ F| / |F| as an exact ratio of counts.
Rational folner_ratio(const GroupModel& group, std::span<const Code> set, const Code& g);

struct GrowthFit {
  double exponent = 0.0;
  bool degenerate = false;
  std::vector<std::size_t> sizes;  ///< |B_n| for n = 0..n_max
};

/// Least-squares slope of log|B_n| against log n over n ∈ [n_max/2, n_max].
GrowthFit growth_exponent(const GroupModel& group, int n_max,
                          std::size_t cap = kDefaultElementCap);

struct AnnulusFit {
  double delta = 0.0;  ///< fitted decay |B_{n+1} \ B_n| / |B_n| ≈ C n^{-δ}
  double constant = 0.0;
  std::vector<double> ratios;  ///< shell ratio for n = 1..n_max-1
};

AnnulusFit annulus_decay(const GroupModel& group, int n_max,
                         std::size_t cap = kDefaultElementCap);

/// Exponents of g = x^a y^b z^c with x, y, z the unit upper-triangular
/// matrices E_12, E_23, E_13.
struct HeisenbergNormalForm {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::int64_t c = 0;
  friend bool operator==(const HeisenbergNormalForm&, const HeisenbergNormalForm&) = default;
};

HeisenbergNormalForm heisenberg_normal_form(const Code& g);
/// Evaluates x^a y^b z^c by explicit group multiplication.
Code evaluate_normal_form(const GroupModel& heisenberg, const HeisenbergNormalForm& nf);

struct BassBounds {
  double c_ab = 0.0;  ///< max(|a|, |b|) / n over B_n
  double c_z = 0.0;   ///< max |c| / n² over B_n
  std::int64_t max_a = 0;
  std::int64_t max_b = 0;
  std::int64_t max_c = 0;
};

/// Normal-form exponent bounds over B_n. For Z^d models only `c_ab` (the
/// largest |coordinate| / n) is meaningful.
BassBounds verify_bass_bounds(const GroupModel& group, int n,
                              std::size_t cap = kDefaultElementCap);

/// G_n = (Z/2Z)^n inside the locally finite model, as bit masks 0..2^n-1.
std::vector<Code> locally_finite_chain(int n, std::size_t cap = kDefaultElementCap);

/// Least N such that every product u1^{±1} u2^{±1} of coset representatives
/// equals u·t with u ∈ U and t ∈ T^N, searching N ≤ max_n. `in_subgroup`
/// decides membership in the normal subgroup H generated by T. Returns -1
/// when no N ≤ max_n works.
int coset_word_constant(const GroupModel& group, std::span<const Code> representatives,
                        std::span<const Code> subgroup_generators,
                        const std::function<bool(const Code&)>& in_subgroup, int max_n,
                        std::size_t cap = kDefaultElementCap);

}  // namespace ncerg::groups
