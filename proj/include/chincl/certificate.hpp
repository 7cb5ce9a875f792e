#pragma once

#include <cstddef>
#include <vector>

#include "chincl/channel.hpp"

namespace chincl {

/// One pure pair (pre, post): the included channel is simulated by feeding
/// pre-processed inputs through K1 and post-processing the outputs.
struct PurePair {
  PureChannel pre;   // n2 x n1
  PureChannel post;  // m1 x m2
};

/// A convex-combination witness for inclusion: sum_a weight_a * pre_a K1 post_a
/// reproduces K2 up to residual_inf (max-abs entry deviation).
/// atom_indices refer to the atom system the certificate was extracted from
/// and may be empty for synthesized certificates (e.g. Kronecker lifts).
struct InclusionCertificate {
  std::vector<std::size_t> atom_indices;
  std::vector<double> weights;
  std::vector<PurePair> atoms;
  double residual_inf = 0.0;
};

/// The mixture sum_a weight_a * pre_a K1 post_a as a dense matrix.
Mat certificate_mixture(const Channel& k1, const InclusionCertificate& cert);

/// Max-abs entry of (mixture - K2). Throws shape_mismatch on bad atoms.
double certificate_residual(const Channel& k1, const Channel& k2, const InclusionCertificate& cert);

/// Lifts a level-1 certificate for K2 within K1 to a certificate for
/// K2^(x)N within K1^(x)N: one term per map {1..N} -> {1..beta}, with
/// weight prod_i g_{j(i)} and atoms the Kronecker products of the level-1
/// pure pairs. Produces beta^N terms; residual_inf is recomputed against
/// the lifted channels. Throws: size_overflow.
InclusionCertificate kron_lift_certificate(const Channel& k1, const Channel& k2,
                                           const InclusionCertificate& cert, int order);

}  // namespace chincl
