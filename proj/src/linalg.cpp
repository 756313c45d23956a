#include "fusion/linalg.hpp"

#include <cmath>

namespace fusion {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::NotPSD: return "NotPSD";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::NonFinite: return "NonFinite";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::AllZeroWeights: return "AllZeroWeights";
    case Errc::SeriesNonConvergence: return "SeriesNonConvergence";
    case Errc::ChainDiverged: return "ChainDiverged";
    case Errc::AcceptanceStarvation: return "AcceptanceStarvation";
    case Errc::BadZeta: return "BadZeta";
    case Errc::BadBeta: return "BadBeta";
    case Errc::CountMismatch: return "CountMismatch";
    case Errc::TooFewSamples: return "TooFewSamples";
    case Errc::UnboundedRegion: return "UnboundedRegion";
    case Errc::ConfigInvalid: return "ConfigInvalid";
    case Errc::BadArgument: return "BadArgument";
  }
  return "Unknown";
}

bool is_symmetric(const Mat& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

namespace {

Eigen::SelfAdjointEigenSolver<Mat> eig_checked(const Mat& m) {
  require(m.rows() == m.cols() && m.rows() > 0, Errc::DimensionMismatch, "square matrix expected");
  require(m.allFinite(), Errc::NonFinite, "matrix has non-finite entries");
  require(is_symmetric(m, 1e-9), Errc::NotPSD, "matrix not symmetric");
  Mat sym = 0.5 * (m + m.transpose());
  return Eigen::SelfAdjointEigenSolver<Mat>(sym);
}

}  // namespace

Mat psd_sqrt(const Mat& m) {
  auto es = eig_checked(m);
  Vec ev = es.eigenvalues();
  double norm = ev.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (ev(i) < -1e-10 * norm) throw Error(Errc::NotPSD, "negative eigenvalue in psd_sqrt");
    ev(i) = ev(i) > 0 ? std::sqrt(ev(i)) : 0.0;
  }
  const Mat& q = es.eigenvectors();
  return q * ev.asDiagonal() * q.transpose();
}

Mat psd_inv_sqrt(const Mat& m) {
  auto es = eig_checked(m);
  Vec ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (!(ev(i) > 0)) throw Error(Errc::NotPSD, "matrix not positive definite");
    ev(i) = 1.0 / std::sqrt(ev(i));
  }
  const Mat& q = es.eigenvectors();
  return q * ev.asDiagonal() * q.transpose();
}

Mat spd_inverse(const Mat& m) {
  require(m.rows() == m.cols(), Errc::DimensionMismatch, "square matrix expected");
  Eigen::LLT<Mat> llt(m);
  if (llt.info() != Eigen::Success) throw Error(Errc::NotPSD, "Cholesky failed");
  Mat inv = llt.solve(Mat::Identity(m.rows(), m.cols()));
  return 0.5 * (inv + inv.transpose());
}

Pooled pooled_precision(const std::vector<Mat>& lambdas) {
  require(!lambdas.empty(), Errc::EmptyInput, "no matrices to pool");
  const auto d = lambdas.front().rows();
  Mat prec = Mat::Zero(d, d);
  for (const auto& l : lambdas) {
    require(l.rows() == d && l.cols() == d, Errc::DimensionMismatch, "pooled_precision");
    prec += spd_inverse(l);
  }
  return {prec, spd_inverse(prec)};
}

Vec weighted_center(const Mat& pooled_cov, const std::vector<Mat>& inverses,
                    const std::vector<Vec>& points) {
  require(inverses.size() == points.size(), Errc::DimensionMismatch, "weighted_center");
  Vec acc = Vec::Zero(pooled_cov.rows());
  for (size_t c = 0; c < points.size(); ++c) {
    require(points[c].size() == acc.size(), Errc::DimensionMismatch, "weighted_center");
    acc += inverses[c] * points[c];
  }
  return pooled_cov * acc;
}

Vec weighted_center(const std::vector<Mat>& lambdas, const std::vector<Vec>& points) {
  require(lambdas.size() == points.size(), Errc::DimensionMismatch, "weighted_center");
  std::vector<Mat> inv;
  inv.reserve(lambdas.size());
  for (const auto& l : lambdas) inv.push_back(spd_inverse(l));
  Pooled p = pooled_precision(lambdas);
  return weighted_center(p.cov, inv, points);
}

double operator_norm(const Mat& m) {
  require(m.allFinite(), Errc::NonFinite, "operator_norm");
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && is_symmetric(m)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<Mat> svd(m);
  return svd.singularValues()(0);
}

Vec weighted_mean(const Mat& x, const Vec& w) {
  require(x.cols() > 0, Errc::EmptyInput, "weighted_mean");
  if (w.size() == 0) return x.rowwise().mean();
  require(w.size() == x.cols(), Errc::DimensionMismatch, "weighted_mean");
  double s = w.sum();
  require(s > 0, Errc::AllZeroWeights, "weighted_mean");
  return x * w / s;
}

Mat weighted_cov(const Mat& x, const Vec& w) {
  require(x.cols() > 1, Errc::TooFewSamples, "weighted_cov needs two columns");
  Vec wn = w.size() == 0 ? Vec::Constant(x.cols(), 1.0 / double(x.cols())) : Vec(w / w.sum());
  require(wn.size() == x.cols(), Errc::DimensionMismatch, "weighted_cov");
  Vec mu = x * wn;
  Mat xc = x.colwise() - mu;
  Mat cov = xc * wn.asDiagonal() * xc.transpose();
  double denom = 1.0 - wn.squaredNorm();
  if (denom > 0) cov /= denom;
  return 0.5 * (cov + cov.transpose());
}

}  // namespace fusion
