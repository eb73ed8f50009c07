#include "tvdiff/thermo.hpp"

#include <cmath>
#include <stdexcept>

namespace tvdiff::thermo {

namespace {

constexpr double kDegenerateL1 = 1e-12;

double row_entropy(const Eigen::Ref<const Eigen::RowVectorXd>& p) {
  double s = 0.0;
  for (Index j = 0; j < p.size(); ++j)
    if (p[j] > 0.0) s -= p[j] * std::log(p[j]);
  return s;
}

}  // namespace

ProbabilityMatrix normalize_reconstruction(const Mat& raw, Genre genre) {
  ProbabilityMatrix out;
  out.genre = genre;
  out.rows.resize(raw.rows(), raw.cols());
  out.flagged.assign(static_cast<std::size_t>(raw.rows()), 0);

  for (Index u = 0; u < raw.rows(); ++u) {
    if (genre == Genre::kDiffusionNorm) {
      const double l1 = raw.row(u).array().abs().sum();
      if (l1 < kDegenerateL1) {
        out.flagged[static_cast<std::size_t>(u)] = 1;
        out.rows.row(u).setZero();
      } else {
        out.rows.row(u) = raw.row(u).array().abs() / l1;
      }
    } else {
      const double mx = raw.row(u).maxCoeff();
      out.rows.row(u) = (raw.row(u).array() - mx).exp();
      out.rows.row(u) /= out.rows.row(u).sum();
    }
  }
  return out;
}

double energy(const ProbabilityMatrix& p_prime, const ProbabilityMatrix& p,
              const SpMat& R) {
  if (p_prime.rows.rows() != R.rows() || p_prime.rows.cols() != R.cols() ||
      p.rows.rows() != R.rows() || p.rows.cols() != R.cols())
    throw std::runtime_error("energy: shape mismatch");

  double u_total = 0.0;
  for (Index u = 0; u < R.outerSize(); ++u) {
    if (p_prime.flagged[static_cast<std::size_t>(u)]) continue;
    for (SpMat::InnerIterator it(R, u); it; ++it) {
      if (it.value() == 0.0) continue;
      const double base = p.rows(u, it.col());
      if (!(base > 0.0)) continue;  // unobservable reference probability
      const double recon = p_prime.rows(u, it.col());
      u_total += recon >= base ? 1.0 : recon / base;
    }
  }
  return u_total;
}

double entropy(const ProbabilityMatrix& p) {
  double s = 0.0;
  for (Index u = 0; u < p.rows.rows(); ++u) {
    if (p.flagged[static_cast<std::size_t>(u)]) continue;
    s += row_entropy(p.rows.row(u));
  }
  return s;
}

double theorem1_delta_S(const SpMat& R) {
  if (R.rows() == 0 || R.cols() == 0 || R.nonZeros() == 0)
    throw std::runtime_error("theorem1_delta_S: empty graph");

  std::vector<double> item_degree(static_cast<std::size_t>(R.cols()), 0.0);
  for (Index u = 0; u < R.outerSize(); ++u)
    for (SpMat::InnerIterator it(R, u); it; ++it)
      if (it.value() != 0.0) item_degree[static_cast<std::size_t>(it.col())] += 1.0;

  double s_bipartite = 0.0;  // uniform rows of D_U^-1 R: sum_u log d_u
  double s_laplacian = 0.0;  // rows proportional to 1/sqrt(d_i)
  for (Index u = 0; u < R.outerSize(); ++u) {
    double d_u = 0.0;
    double z = 0.0;
    double w_log_w = 0.0;
    for (SpMat::InnerIterator it(R, u); it; ++it) {
      if (it.value() == 0.0) continue;
      d_u += 1.0;
      const double w =
          1.0 / std::sqrt(item_degree[static_cast<std::size_t>(it.col())]);
      z += w;
      w_log_w += w * std::log(w);
    }
    if (d_u == 0.0) continue;  // isolated user, skipped by contract
    s_bipartite += std::log(d_u);
    s_laplacian += std::log(z) - w_log_w / z;
  }
  return s_laplacian - s_bipartite;
}

std::vector<double> multilayer_entropy_probe(const SpMat& R, int K) {
  if (K < 1) throw std::runtime_error("multilayer_entropy_probe: K >= 1 required");
  const Index m = R.rows();
  const Index n = R.cols();

  std::vector<double> user_degree(static_cast<std::size_t>(m), 0.0);
  std::vector<double> item_degree(static_cast<std::size_t>(n), 0.0);
  for (Index u = 0; u < R.outerSize(); ++u)
    for (SpMat::InnerIterator it(R, u); it; ++it)
      if (it.value() != 0.0) {
        user_degree[static_cast<std::size_t>(u)] += 1.0;
        item_degree[static_cast<std::size_t>(it.col())] += 1.0;
      }

  SpMat r_bar(m, n);
  {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(R.nonZeros()));
    for (Index u = 0; u < R.outerSize(); ++u)
      for (SpMat::InnerIterator it(R, u); it; ++it)
        if (it.value() != 0.0)
          trip.emplace_back(u, it.col(),
                            1.0 / std::sqrt(user_degree[static_cast<std::size_t>(u)] *
                                            item_degree[static_cast<std::size_t>(it.col())]));
    r_bar.setFromTriplets(trip.begin(), trip.end());
    r_bar.makeCompressed();
  }

  // Per user, alternate user->item and item->user propagation and record the
  // entropy of the normalized item-side mass after each round.
  std::vector<double> series(static_cast<std::size_t>(K), 0.0);
  Vec w(n), v(m), p(n);
  for (Index u = 0; u < m; ++u) {
    if (user_degree[static_cast<std::size_t>(u)] == 0.0) continue;  // disconnected

    w.setZero();
    for (SpMat::InnerIterator it(r_bar, u); it; ++it) w[it.col()] = it.value();
    for (int k = 1; k <= K; ++k) {
      const double l1 = w.array().abs().sum();
      if (l1 >= kDegenerateL1) {
        p = w.array().abs() / l1;
        double s = 0.0;
        for (Index j = 0; j < n; ++j)
          if (p[j] > 0.0) s -= p[j] * std::log(p[j]);
        series[static_cast<std::size_t>(k) - 1] += s;
      }
      if (k == K) break;
      v.setZero();
      for (Index r = 0; r < m; ++r) {
        double acc = 0.0;
        for (SpMat::InnerIterator it(r_bar, r); it; ++it)
          acc += it.value() * w[it.col()];
        v[r] = acc;
      }
      w.setZero();
      for (Index r = 0; r < m; ++r) {
        if (v[r] == 0.0) continue;
        for (SpMat::InnerIterator it(r_bar, r); it; ++it)
          w[it.col()] += v[r] * it.value();
      }
    }
  }
  return series;
}

std::vector<ThermoReport> pilot_report(double u_initial, double s_initial,
                                       double u_final, double s_final) {
  return {
      {"initial", u_initial, s_initial, 0.0, 0.0},
      {"final", u_final, s_final, u_final - u_initial, s_final - s_initial},
  };
}

}  // namespace tvdiff::thermo
