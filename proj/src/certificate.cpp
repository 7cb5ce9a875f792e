#include "chincl/certificate.hpp"

#include <cmath>

namespace chincl {

Mat certificate_mixture(const Channel& k1, const InclusionCertificate& cert) {
  if (cert.atoms.empty() || cert.atoms.size() != cert.weights.size())
    fail(errc::shape_mismatch, "certificate needs matching non-empty atoms and weights");
  Mat acc = Mat::Zero(cert.atoms[0].pre.rows(), cert.atoms[0].post.cols());
  for (std::size_t a = 0; a < cert.atoms.size(); ++a)
    acc += cert.weights[a] * pure_product(cert.atoms[a].pre, k1.matrix(), cert.atoms[a].post);
  return acc;
}

double certificate_residual(const Channel& k1, const Channel& k2, const InclusionCertificate& cert) {
  Mat mix = certificate_mixture(k1, cert);
  if (mix.rows() != k2.rows() || mix.cols() != k2.cols())
    fail(errc::shape_mismatch, "certificate mixture shape differs from target channel");
  return (mix - k2.matrix()).cwiseAbs().maxCoeff();
}

InclusionCertificate kron_lift_certificate(const Channel& k1, const Channel& k2,
                                           const InclusionCertificate& cert, int order) {
  if (order < 1) fail(errc::out_of_range, "Kronecker order must be >= 1");
  const std::size_t beta = cert.atoms.size();
  if (beta == 0 || beta != cert.weights.size())
    fail(errc::shape_mismatch, "certificate needs matching non-empty atoms and weights");

  double terms = 1.0;
  for (int i = 0; i < order; ++i) {
    terms *= static_cast<double>(beta);
    if (terms > 1e6) fail(errc::size_overflow, "lifted certificate would exceed 1e6 terms");
  }

  const Channel k1n = kron_power(k1, order);
  const Channel k2n = kron_power(k2, order);

  InclusionCertificate lifted;
  lifted.weights.reserve(static_cast<std::size_t>(terms));
  lifted.atoms.reserve(static_cast<std::size_t>(terms));

  // odometer over maps {0..order-1} -> {0..beta-1}, first factor most significant
  std::vector<std::size_t> idx(static_cast<std::size_t>(order), 0);
  while (true) {
    double w = 1.0;
    PureChannel pre = cert.atoms[idx[0]].pre;
    PureChannel post = cert.atoms[idx[0]].post;
    w *= cert.weights[idx[0]];
    for (int i = 1; i < order; ++i) {
      pre = kron(pre, cert.atoms[idx[static_cast<std::size_t>(i)]].pre);
      post = kron(post, cert.atoms[idx[static_cast<std::size_t>(i)]].post);
      w *= cert.weights[idx[static_cast<std::size_t>(i)]];
    }
    lifted.weights.push_back(w);
    lifted.atoms.push_back(PurePair{std::move(pre), std::move(post)});

    int pos = order - 1;
    while (pos >= 0 && ++idx[static_cast<std::size_t>(pos)] == beta) {
      idx[static_cast<std::size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }

  lifted.residual_inf = certificate_residual(k1n, k2n, lifted);
  return lifted;
}

}  // namespace chincl
