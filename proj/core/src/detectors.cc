/* Copyright 2026 The oodkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "oodkit/detectors.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <type_traits>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "oodkit/error.h"
#include "oodkit/softmax.h"

namespace oodkit {
namespace {

constexpr double kMahaRidge = 1e-6;
constexpr double kKlmFloor = 1e-12;
constexpr double kUnitTolerance = 1e-9;
constexpr double kHeadConsistencyTolerance = 1e-3;
// Residual-norm sum below this fraction of the total offset-feature norm is
// treated as "features lie inside the principal subspace".
constexpr double kZeroResidualRatio = 1e-10;
// KNN candidate scoring keeps at most this many doubles per block.
constexpr Eigen::Index kKnnBlockBudget = 1 << 22;

std::span<const double> RowSpan(const Matrix& m, Eigen::Index i) {
  return {m.row(i).data(), static_cast<std::size_t>(m.cols())};
}

[[noreturn]] void Malformed(const std::string& what) {
  throw Error(ErrorCode::kMalformed, what);
}

void ValidateHead(const ModelHead& head, const char* who) {
  if (head.num_classes() < 2) Malformed(std::string(who) + ": bad head");
}

void ValidatePayload(DetectorKind kind, const DetectorPayload& payload) {
  switch (kind) {
    case DetectorKind::kMsp:
    case DetectorKind::kMls:
    case DetectorKind::kGradNorm:
      if (!std::holds_alternative<std::monostate>(payload)) {
        Malformed("detector takes no fitted state");
      }
      return;
    case DetectorKind::kGen: {
      const auto* s = std::get_if<GenState>(&payload);
      if (s == nullptr) Malformed("gen needs GenState");
      if (!(s->gamma > 0.0 && s->gamma < 1.0)) {
        Malformed("gen gamma must lie in (0, 1)");
      }
      return;
    }
    case DetectorKind::kMaha: {
      const auto* s = std::get_if<MahaState>(&payload);
      if (s == nullptr) Malformed("maha needs MahaState");
      const Eigen::Index d = s->cholesky.rows();
      if (d < 1 || s->cholesky.cols() != d || s->centroids.cols() != d ||
          s->centroids.rows() < 1 ||
          static_cast<std::size_t>(s->centroids.rows()) != s->classes.size()) {
        Malformed("maha state dimensions are inconsistent");
      }
      if (!s->centroids.allFinite() || !s->cholesky.allFinite()) {
        Malformed("maha state has non-finite entries");
      }
      for (Eigen::Index i = 0; i < d; ++i) {
        if (!(s->cholesky(i, i) > 0.0)) {
          Malformed("maha factor is not positive definite");
        }
        for (Eigen::Index j = i + 1; j < d; ++j) {
          if (s->cholesky(i, j) != 0.0) Malformed("maha factor not lower");
        }
      }
      for (int32_t cls : s->classes) {
        if (cls < 0) Malformed("maha class index is negative");
      }
      return;
    }
    case DetectorKind::kReactEnergy: {
      const auto* s = std::get_if<ReactState>(&payload);
      if (s == nullptr) Malformed("react needs ReactState");
      if (!std::isfinite(s->clamp)) Malformed("react clamp is not finite");
      ValidateHead(s->head, "react");
      return;
    }
    case DetectorKind::kKlm: {
      const auto* s = std::get_if<KlmState>(&payload);
      if (s == nullptr) Malformed("klm needs KlmState");
      const Matrix& t = s->templates;
      if (t.rows() < 2 || t.rows() != t.cols()) {
        Malformed("klm templates must be c x c");
      }
      for (Eigen::Index k = 0; k < t.rows(); ++k) {
        double sum = 0.0;
        for (Eigen::Index i = 0; i < t.cols(); ++i) {
          if (!(t(k, i) >= 0.0) || !std::isfinite(t(k, i))) {
            Malformed("klm template entry out of range");
          }
          sum += t(k, i);
        }
        if (std::fabs(sum - 1.0) > kUnitTolerance) {
          Malformed("klm template does not sum to one");
        }
      }
      return;
    }
    case DetectorKind::kKnn: {
      const auto* s = std::get_if<KnnState>(&payload);
      if (s == nullptr) Malformed("knn needs KnnState");
      if (s->bank.rows() < 1 || s->bank.cols() < 1) Malformed("empty knn bank");
      if (s->k < 1 || s->k > s->bank.rows()) {
        Malformed("knn k must lie in [1, bank size]");
      }
      if (!s->bank.allFinite()) Malformed("knn bank has non-finite entries");
      for (Eigen::Index i = 0; i < s->bank.rows(); ++i) {
        if (std::fabs(s->bank.row(i).norm() - 1.0) > kUnitTolerance) {
          Malformed("knn bank row is not unit norm");
        }
      }
      return;
    }
    case DetectorKind::kVim: {
      const auto* s = std::get_if<VimState>(&payload);
      if (s == nullptr) Malformed("vim needs VimState");
      const Eigen::Index d = s->offset.size();
      const Eigen::Index m = s->residual_basis.cols();
      if (d < 2 || s->residual_basis.rows() != d || m < 1 || m > d - 1) {
        Malformed("vim basis must be d x m with 1 <= m <= d - 1");
      }
      if (static_cast<Eigen::Index>(s->head.feature_dim()) != d) {
        Malformed("vim head does not match offset dimension");
      }
      if (!s->offset.allFinite() || !s->residual_basis.allFinite()) {
        Malformed("vim state has non-finite entries");
      }
      if (!(s->alpha > 0.0) || !std::isfinite(s->alpha)) {
        Malformed("vim alpha must be positive");
      }
      const Eigen::MatrixXd gram =
          s->residual_basis.transpose() * s->residual_basis;
      if ((gram - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() >
          kUnitTolerance) {
        Malformed("vim basis is not orthonormal");
      }
      return;
    }
  }
  Malformed("unknown detector kind");
}

void RequireLabels(const EmbeddingSet& train, DetectorKind kind) {
  if (!train.has_labels()) {
    throw Error(ErrorCode::kMissingInput, std::string(DetectorName(kind)) +
                                              " needs labelled train data");
  }
}

const ModelHead& RequireHead(const ModelHead* head, const EmbeddingSet& train,
                             DetectorKind kind,
                             std::vector<std::string>* warnings) {
  if (head == nullptr) {
    throw Error(ErrorCode::kMissingInput,
                std::string(DetectorName(kind)) + " needs the model head");
  }
  if (head->feature_dim() != train.feature_dim() ||
      head->num_classes() != train.num_classes()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "head shape does not match train embeddings");
  }
  const double gap = MaxLogitDiscrepancy(train, *head);
  if (gap > kHeadConsistencyTolerance && warnings != nullptr) {
    std::ostringstream msg;
    msg << DetectorName(kind) << ": stored logits differ from W*f+b by up to "
        << gap << "; continuing";
    warnings->push_back(msg.str());
  }
  return *head;
}

MahaState FitMaha(const EmbeddingSet& train) {
  RequireLabels(train, DetectorKind::kMaha);
  if (train.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "maha needs train samples");
  }
  const Matrix& f = train.features();
  const auto& labels = *train.labels();
  const Eigen::Index d = f.cols();

  std::map<int32_t, std::pair<Vector, std::size_t>> sums;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto [it, inserted] =
        sums.try_emplace(labels[i], Vector::Zero(d), std::size_t{0});
    it->second.first += f.row(static_cast<Eigen::Index>(i)).transpose();
    ++it->second.second;
  }
  std::vector<int32_t> classes;
  Matrix centroids(static_cast<Eigen::Index>(sums.size()), d);
  std::map<int32_t, Eigen::Index> row_of;
  for (const auto& [cls, acc] : sums) {
    row_of[cls] = static_cast<Eigen::Index>(classes.size());
    centroids.row(static_cast<Eigen::Index>(classes.size())) =
        acc.first.transpose() / static_cast<double>(acc.second);
    classes.push_back(cls);
  }

  Matrix centered(f.rows(), d);
  for (Eigen::Index i = 0; i < f.rows(); ++i) {
    centered.row(i) =
        f.row(i) - centroids.row(row_of[labels[static_cast<std::size_t>(i)]]);
  }
  Eigen::MatrixXd cov = centered.transpose() * centered;
  cov /= static_cast<double>(f.rows());
  const double ridge = kMahaRidge * cov.trace() / static_cast<double>(d);
  cov.diagonal().array() += ridge;
  return MahaState::FromCovariance(std::move(classes), std::move(centroids),
                                   cov);
}

ReactState FitReact(const DetectorParams& params, const EmbeddingSet& train,
                    const ModelHead& head) {
  const double q = params.react_percentile;
  if (!(q > 0.0 && q <= 100.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "react percentile must lie in (0, 100]");
  }
  if (train.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "react needs train samples");
  }
  const Matrix& f = train.features();
  std::vector<double> pooled(f.data(), f.data() + f.size());
  return ReactState{Percentile(std::move(pooled), q), head};
}

KlmState FitKlm(const EmbeddingSet& train) {
  const Eigen::Index c = static_cast<Eigen::Index>(train.num_classes());
  const Matrix probs = SoftmaxRows(train.logits());
  const auto predicted = ArgmaxRows(train.logits());
  Matrix sums = Matrix::Zero(c, c);
  std::vector<std::size_t> counts(static_cast<std::size_t>(c), 0);
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const int32_t k = predicted[static_cast<std::size_t>(i)];
    sums.row(k) += probs.row(i);
    ++counts[static_cast<std::size_t>(k)];
  }
  for (Eigen::Index k = 0; k < c; ++k) {
    if (counts[static_cast<std::size_t>(k)] == 0) {
      sums.row(k).setZero();
      sums(k, k) = 1.0;
    } else {
      sums.row(k) /= static_cast<double>(counts[static_cast<std::size_t>(k)]);
    }
  }
  return KlmState{std::move(sums)};
}

// Rows divided by their Euclidean norm; zero rows stay zero.
Matrix NormalizeRows(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

KnnState FitKnn(const DetectorParams& params, const EmbeddingSet& train) {
  const int k = ResolveKnnK(params, train.num_classes());
  if (static_cast<std::size_t>(k) > train.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "knn k=" + std::to_string(k) + " exceeds train size " +
                    std::to_string(train.size()));
  }
  for (Eigen::Index i = 0; i < train.features().rows(); ++i) {
    if (train.features().row(i).norm() == 0.0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "knn bank cannot hold a zero feature vector (row " +
                      std::to_string(i) + ")");
    }
  }
  return KnnState{NormalizeRows(train.features()), k};
}

VimState FitVim(const DetectorParams& params, const EmbeddingSet& train,
                const ModelHead& head) {
  const Eigen::Index d = static_cast<Eigen::Index>(train.feature_dim());
  if (d < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "vim needs feature dimension >= 2");
  }
  if (train.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "vim needs train samples");
  }
  const int principal = ResolveVimDim(params, train.feature_dim());

  // o = -pinv(W) b; the complete orthogonal decomposition yields the
  // minimum-norm least-squares solution.
  const Eigen::MatrixXd w = head.weight();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(w);
  const Vector offset = -cod.solve(head.bias());

  Matrix shifted = train.features();
  shifted.rowwise() -= offset.transpose();
  Eigen::MatrixXd moment = shifted.transpose() * shifted;
  moment /= static_cast<double>(shifted.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(moment);
  if (eig.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument,
                "vim eigendecomposition did not converge");
  }
  // Eigenvalues ascend, so the residual space is the leading block.
  const Eigen::Index residual_dim = d - principal;
  Matrix basis = eig.eigenvectors().leftCols(residual_dim);

  const Matrix projected = shifted * basis;
  double residual_sum = 0.0;
  double total_sum = 0.0;
  for (Eigen::Index i = 0; i < shifted.rows(); ++i) {
    residual_sum += projected.row(i).norm();
    total_sum += shifted.row(i).norm();
  }
  if (!(residual_sum > kZeroResidualRatio * total_sum)) {
    throw Error(ErrorCode::kZeroResidual,
                "train features have no component outside the principal "
                "subspace; lower the subspace dimension");
  }
  double max_logit_sum = 0.0;
  for (Eigen::Index i = 0; i < train.logits().rows(); ++i) {
    max_logit_sum += train.logits().row(i).maxCoeff();
  }
  const double alpha = max_logit_sum / residual_sum;
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw Error(ErrorCode::kInvalidArgument,
                "vim scale is not positive (mean train max-logit <= 0)");
  }
  return VimState{offset, std::move(basis), alpha, head};
}

void CheckBatch(const DetectorState& state, const EmbeddingSet& batch) {
  if (auto d = state.feature_dim(); d && *d != batch.feature_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "batch feature dim " + std::to_string(batch.feature_dim()) +
                    " != fitted " + std::to_string(*d));
  }
  if (auto c = state.num_classes(); c && *c != batch.num_classes()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "batch class count " + std::to_string(batch.num_classes()) +
                    " != fitted " + std::to_string(*c));
  }
}

std::vector<double> ScoreMaha(const MahaState& s, const EmbeddingSet& batch) {
  const Matrix& f = batch.features();
  std::vector<double> out(batch.size(), std::numeric_limits<double>::infinity());
  const auto lower = s.cholesky.triangularView<Eigen::Lower>();
  for (Eigen::Index k = 0; k < s.centroids.rows(); ++k) {
    Eigen::MatrixXd diff = (f.rowwise() - s.centroids.row(k)).transpose();
    lower.solveInPlace(diff);
    const Eigen::VectorXd dist = diff.colwise().squaredNorm().transpose();
    for (Eigen::Index i = 0; i < dist.size(); ++i) {
      auto& best = out[static_cast<std::size_t>(i)];
      best = std::min(best, dist(i));
    }
  }
  return out;
}

std::vector<double> ScoreReact(const ReactState& s, const EmbeddingSet& batch) {
  const Matrix clamped = batch.features().cwiseMin(s.clamp);
  const Vector lse = LogSumExpRows(s.head.Apply(clamped));
  std::vector<double> out(batch.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = -lse(static_cast<Eigen::Index>(i));
  }
  return out;
}

std::vector<double> ScoreKlm(const KlmState& s, const EmbeddingSet& batch) {
  const Matrix probs = SoftmaxRows(batch.logits());
  const Matrix log_templates =
      s.templates.cwiseMax(kKlmFloor).array().log().matrix();
  std::vector<double> out(batch.size());
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < s.templates.rows(); ++k) {
      double kl = 0.0;
      for (Eigen::Index j = 0; j < probs.cols(); ++j) {
        const double p = probs(i, j);
        if (p > 0.0) kl += p * (std::log(p) - log_templates(k, j));
      }
      best = std::min(best, kl);
    }
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

double SquaredDistance(const Matrix& a, Eigen::Index i, const Matrix& b,
                       Eigen::Index j) {
  double sum = 0.0;
  for (Eigen::Index t = 0; t < a.cols(); ++t) {
    const double diff = a(i, t) - b(j, t);
    sum += diff * diff;
  }
  return sum;
}

// Exact k-th nearest distance. A Gram-matrix pass shortlists candidates whose
// approximate squared distance is within 2 * bound of the approximate k-th
// value (bound covers the rounding of the Gram route); the shortlist is then
// rescored by direct differences, which are exact for coincident points.
std::vector<double> ScoreKnn(const KnnState& s, const EmbeddingSet& batch) {
  const Matrix queries = NormalizeRows(batch.features());
  const Eigen::Index bank_rows = s.bank.rows();
  const Eigen::Index d = s.bank.cols();
  const auto k = static_cast<std::size_t>(s.k);
  const double bound =
      8.0 * static_cast<double>(d + 2) * std::numeric_limits<double>::epsilon();
  const Eigen::Index block =
      std::max<Eigen::Index>(1, kKnnBlockBudget / std::max<Eigen::Index>(1, bank_rows));

  std::vector<double> out(batch.size());
  std::vector<double> approx(static_cast<std::size_t>(bank_rows));
  std::vector<double> exact;
  for (Eigen::Index start = 0; start < queries.rows(); start += block) {
    const Eigen::Index rows = std::min(block, queries.rows() - start);
    const Matrix gram = queries.middleRows(start, rows) * s.bank.transpose();
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Eigen::Index qi = start + r;
      const double qnorm2 = queries.row(qi).squaredNorm();
      for (Eigen::Index j = 0; j < bank_rows; ++j) {
        approx[static_cast<std::size_t>(j)] =
            qnorm2 + 1.0 - 2.0 * gram(r, j);
      }
      std::vector<double> sorted = approx;
      std::nth_element(sorted.begin(), sorted.begin() + (k - 1), sorted.end());
      const double cutoff = sorted[k - 1] + 2.0 * bound;
      exact.clear();
      for (Eigen::Index j = 0; j < bank_rows; ++j) {
        if (approx[static_cast<std::size_t>(j)] <= cutoff) {
          exact.push_back(SquaredDistance(queries, qi, s.bank, j));
        }
      }
      std::nth_element(exact.begin(), exact.begin() + (k - 1), exact.end());
      out[static_cast<std::size_t>(qi)] = std::sqrt(exact[k - 1]);
    }
  }
  return out;
}

Vector VimResidualNorms(const VimState& s, const EmbeddingSet& batch) {
  Matrix shifted = batch.features();
  shifted.rowwise() -= s.offset.transpose();
  const Matrix projected = shifted * s.residual_basis;
  return projected.rowwise().norm();
}

std::vector<double> ScoreVim(const VimState& s, const EmbeddingSet& batch) {
  const Vector residual = VimResidualNorms(s, batch);
  const Vector lse = LogSumExpRows(batch.logits());
  std::vector<double> out(batch.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out[i] = s.alpha * residual(r) - lse(r);
  }
  return out;
}

}  // namespace

std::string_view DetectorName(DetectorKind kind) {
  switch (kind) {
    case DetectorKind::kMsp:
      return "msp";
    case DetectorKind::kMaha:
      return "maha";
    case DetectorKind::kReactEnergy:
      return "react";
    case DetectorKind::kGradNorm:
      return "gradnorm";
    case DetectorKind::kMls:
      return "mls";
    case DetectorKind::kKlm:
      return "klm";
    case DetectorKind::kKnn:
      return "knn";
    case DetectorKind::kVim:
      return "vim";
    case DetectorKind::kGen:
      return "gen";
  }
  return "unknown";
}

DetectorKind ParseDetectorKind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  for (DetectorKind kind : kAllDetectors) {
    if (lower == DetectorName(kind)) return kind;
  }
  if (lower == "r+e" || lower == "react+energy" || lower == "react_energy") {
    return DetectorKind::kReactEnergy;
  }
  if (lower == "grn") return DetectorKind::kGradNorm;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown detector '" + std::string(name) + "'");
}

std::vector<DetectorKind> ParseDetectorList(std::string_view csv) {
  std::vector<DetectorKind> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const std::size_t comma = std::min(csv.find(',', start), csv.size());
    std::string_view token = csv.substr(start, comma - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty()) {
      const DetectorKind kind = ParseDetectorKind(token);
      if (std::find(out.begin(), out.end(), kind) != out.end()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "detector listed twice: " + std::string(token));
      }
      out.push_back(kind);
    }
    start = comma + 1;
  }
  return out;
}

bool NeedsHead(DetectorKind kind) {
  return kind == DetectorKind::kReactEnergy || kind == DetectorKind::kVim;
}

int ResolveKnnK(const DetectorParams& params, std::size_t num_classes) {
  const int k = params.knn_k
                    ? *params.knn_k
                    : static_cast<int>(std::lround(2.5 * static_cast<double>(
                                                             num_classes)));
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "knn k must be >= 1");
  return k;
}

int ResolveVimDim(const DetectorParams& params, std::size_t feature_dim) {
  const auto d = static_cast<long>(feature_dim);
  const long requested =
      params.vim_dim ? *params.vim_dim
                     : std::lround(static_cast<double>(feature_dim) / 2.0);
  return static_cast<int>(std::clamp(requested, 1L, std::max(1L, d - 1)));
}

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "percentile of nothing");
  }
  if (!(q >= 0.0 && q <= 100.0)) {
    throw Error(ErrorCode::kInvalidArgument, "percentile must lie in [0, 100]");
  }
  const double pos = q / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  std::nth_element(values.begin(), values.begin() + static_cast<long>(lo),
                   values.end());
  const double lo_value = values[lo];
  if (lo + 1 >= values.size() || pos == static_cast<double>(lo)) {
    return lo_value;
  }
  const double hi_value = *std::min_element(
      values.begin() + static_cast<long>(lo) + 1, values.end());
  return lo_value + (pos - static_cast<double>(lo)) * (hi_value - lo_value);
}

MahaState MahaState::FromCovariance(std::vector<int32_t> classes,
                                    Matrix centroids,
                                    const Matrix& covariance) {
  if (covariance.rows() != covariance.cols() ||
      covariance.rows() != centroids.cols()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "covariance must be d x d for d-dimensional centroids");
  }
  const Eigen::MatrixXd cov = covariance;
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success || !cov.allFinite()) {
    throw Error(ErrorCode::kNotPositiveDefinite,
                "tied covariance is not positive definite after "
                "regularisation");
  }
  Matrix lower = llt.matrixL();
  if (!(lower.diagonal().array() > 0.0).all()) {
    throw Error(ErrorCode::kNotPositiveDefinite,
                "tied covariance is numerically singular");
  }
  return MahaState{std::move(classes), std::move(centroids), std::move(lower)};
}

DetectorState::DetectorState(DetectorKind kind, DetectorPayload payload)
    : kind_(kind), payload_(std::move(payload)) {
  ValidatePayload(kind_, payload_);
}

std::optional<std::size_t> DetectorState::feature_dim() const {
  return std::visit(
      [](const auto& s) -> std::optional<std::size_t> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, MahaState>) {
          return static_cast<std::size_t>(s.centroids.cols());
        } else if constexpr (std::is_same_v<T, ReactState>) {
          return s.head.feature_dim();
        } else if constexpr (std::is_same_v<T, KnnState>) {
          return static_cast<std::size_t>(s.bank.cols());
        } else if constexpr (std::is_same_v<T, VimState>) {
          return static_cast<std::size_t>(s.offset.size());
        } else {
          return std::nullopt;
        }
      },
      payload_);
}

std::optional<std::size_t> DetectorState::num_classes() const {
  return std::visit(
      [](const auto& s) -> std::optional<std::size_t> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, ReactState> ||
                      std::is_same_v<T, VimState>) {
          return s.head.num_classes();
        } else if constexpr (std::is_same_v<T, KlmState>) {
          return static_cast<std::size_t>(s.templates.rows());
        } else {
          return std::nullopt;
        }
      },
      payload_);
}

DetectorState Fit(DetectorKind kind, const DetectorParams& params,
                  const EmbeddingSet& train, const ModelHead* head,
                  std::vector<std::string>* warnings) {
  switch (kind) {
    case DetectorKind::kMsp:
    case DetectorKind::kMls:
    case DetectorKind::kGradNorm:
      return DetectorState(kind, std::monostate{});
    case DetectorKind::kGen:
      if (!(params.gen_gamma > 0.0 && params.gen_gamma < 1.0)) {
        throw Error(ErrorCode::kInvalidArgument, "gen gamma must lie in (0, 1)");
      }
      return DetectorState(kind, GenState{params.gen_gamma});
    case DetectorKind::kMaha:
      return DetectorState(kind, FitMaha(train));
    case DetectorKind::kReactEnergy:
      return DetectorState(
          kind, FitReact(params, train, RequireHead(head, train, kind, warnings)));
    case DetectorKind::kKlm:
      return DetectorState(kind, FitKlm(train));
    case DetectorKind::kKnn:
      return DetectorState(kind, FitKnn(params, train));
    case DetectorKind::kVim:
      return DetectorState(
          kind, FitVim(params, train, RequireHead(head, train, kind, warnings)));
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown detector kind");
}

std::vector<double> Score(const DetectorState& state,
                          const EmbeddingSet& batch) {
  CheckBatch(state, batch);
  const std::size_t n = batch.size();
  std::vector<double> out(n);
  switch (state.kind()) {
    case DetectorKind::kMsp:
      for (std::size_t i = 0; i < n; ++i) {
        const auto p = Softmax(RowSpan(batch.logits(), static_cast<Eigen::Index>(i)));
        out[i] = -*std::max_element(p.begin(), p.end());
      }
      return out;
    case DetectorKind::kMls:
      for (std::size_t i = 0; i < n; ++i) {
        out[i] = -batch.logits().row(static_cast<Eigen::Index>(i)).maxCoeff();
      }
      return out;
    case DetectorKind::kGen: {
      const double gamma = state.get<GenState>().gamma;
      for (std::size_t i = 0; i < n; ++i) {
        const auto p = Softmax(RowSpan(batch.logits(), static_cast<Eigen::Index>(i)));
        double g = 0.0;
        for (double v : p) g += std::pow(v, gamma) * std::pow(1.0 - v, gamma);
        out[i] = g;
      }
      return out;
    }
    case DetectorKind::kGradNorm: {
      const double uniform = 1.0 / static_cast<double>(batch.num_classes());
      for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const auto p = Softmax(RowSpan(batch.logits(), r));
        double prob_l1 = 0.0;
        for (double v : p) prob_l1 += std::fabs(v - uniform);
        out[i] = -prob_l1 * batch.features().row(r).lpNorm<1>();
      }
      return out;
    }
    case DetectorKind::kMaha:
      return ScoreMaha(state.get<MahaState>(), batch);
    case DetectorKind::kReactEnergy:
      return ScoreReact(state.get<ReactState>(), batch);
    case DetectorKind::kKlm:
      return ScoreKlm(state.get<KlmState>(), batch);
    case DetectorKind::kKnn:
      return ScoreKnn(state.get<KnnState>(), batch);
    case DetectorKind::kVim:
      return ScoreVim(state.get<VimState>(), batch);
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown detector kind");
}

std::vector<double> VimVirtualProbability(const VimState& state,
                                          const EmbeddingSet& batch) {
  const Vector residual = VimResidualNorms(state, batch);
  std::vector<double> out(batch.size());
  std::vector<double> augmented(batch.num_classes() + 1);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    augmented[0] = state.alpha * residual(r);
    for (std::size_t j = 0; j < batch.num_classes(); ++j) {
      augmented[j + 1] = batch.logits()(r, static_cast<Eigen::Index>(j));
    }
    out[i] = Softmax(augmented)[0];
  }
  return out;
}

double MaxLogitDiscrepancy(const EmbeddingSet& set, const ModelHead& head,
                           std::size_t max_rows) {
  const auto rows =
      static_cast<Eigen::Index>(std::min(max_rows, set.size()));
  if (rows == 0) return 0.0;
  const Matrix recomputed = head.Apply(set.features().topRows(rows));
  return (recomputed - set.logits().topRows(rows)).cwiseAbs().maxCoeff();
}

}  // namespace oodkit
