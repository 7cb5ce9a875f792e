#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chincl/certificate.hpp"
#include "chincl/channel.hpp"

namespace chincl {

/// Hard cap on enumerated measurement columns; exceeding it is an error
/// rather than silent sampling, since the decision procedures need the
/// complete atom set.
inline constexpr std::size_t kEnumerationCap = 1'000'000;

/// All maps {0..n_from-1} -> {0..n_to-1} as pure channels, lexicographic
/// with row 0 most significant. Throws: size_limit.
std::vector<PureChannel> enumerate_pure(Index n_from, Index n_to);

/// The measurement system of the inclusion polytope: columns of `a` are
/// vec(pre_a K1 post_a) over every pure pair, and h = vec(K2), both with
/// column-stacked vec. Atom alpha decodes as (pre = alpha / |post set|,
/// post = alpha mod |post set|).
struct AtomSystem {
  Channel k1;
  Channel k2;
  Index n2 = 0, m2 = 0;
  enum class Family { general, permutation } family = Family::general;
  bool dedup = false;
  std::size_t atom_count = 0;            // q, before dedup
  Eigen::MatrixXd a;                     // p x column_count
  Vec h;                                 // p
  std::vector<std::uint32_t> dedup_map;  // atom index -> column index
  std::vector<std::size_t> column_atom;  // column index -> representative atom

  std::size_t column_count() const { return static_cast<std::size_t>(a.cols()); }
  /// Decode an atom index into its pure pair. Throws: index_out_of_range.
  PurePair atom(std::size_t alpha) const;
};

/// Builds (A, h) for deciding inclusion of k2 in k1. With dedup, columns
/// equal within 1e-12 collapse onto the lowest-index representative.
/// Throws: size_limit.
AtomSystem build_system(const Channel& k1, const Channel& k2, bool dedup);

/// Restricts the atom set to permutation pairs; sound when both channels
/// are square doubly stochastic. Throws: not_doubly_stochastic.
AtomSystem restrict_to_permutations(const AtomSystem& sys);

/// Carathéodory support bound: n2(m2-1)+1, improved to (n-1)^2+1 for
/// doubly stochastic pairs. Throws: shape_mismatch.
Index caratheodory_bound(Index n2, Index m2, bool doubly_stochastic);

/// Recomputes the certificate residual from the system columns, checks the
/// weights form a probability vector (non-negative within 1e-10, sum 1
/// within max(1e-8, tol)), and compares the residual against tol.
/// Throws: index_out_of_range.
bool verify_certificate(const AtomSystem& sys, const InclusionCertificate& cert, double tol);

/// Certificate from selected columns of the system; indices are converted
/// to representative atom indices and the residual is recomputed.
InclusionCertificate make_certificate(const AtomSystem& sys, const std::vector<std::size_t>& columns,
                                      const std::vector<double>& weights);

/// Deterministic column shuffle (keyed by seed) for probing order
/// sensitivity of the greedy algorithms; bookkeeping is remapped so
/// extracted certificates still name original atoms.
AtomSystem shuffle_columns(const AtomSystem& sys, std::uint64_t seed);

/// Binary cache (versioned header) to avoid re-enumeration across runs.
/// Throws: parse_error on malformed or version-mismatched files.
void save_cache(const AtomSystem& sys, const std::string& path);
AtomSystem load_cache(const std::string& path);

}  // namespace chincl
