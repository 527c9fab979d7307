// Apache License, Version 2.0, refer to LICENSE.txt

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>

#include <nlohmann/json.hpp>

#include "opaque/cfa.hpp"
#include "opaque/quadrature.hpp"
#include "opaque/special_functions.hpp"
#include "testutil.hpp"

using namespace opaque;

namespace {

CfaParams paper_truth(double loading) {
  CfaParams t;
  t.intercepts = Eigen::VectorXd::Zero(9);
  t.loadings = Eigen::VectorXd::Constant(9, loading);
  t.factor_corr = Eigen::MatrixXd::Identity(3, 3);
  t.residual_sd = Eigen::VectorXd::Ones(9);
  t.latent_sd = Eigen::VectorXd::Ones(3);
  return t;
}

double column_mean(const PosteriorDraws& d, const std::string& name) {
  const auto col = d.column(name);
  double m = 0.0;
  for (double v : col) m += v;
  return m / static_cast<double>(col.size());
}

CfaParams flipped(const CfaParams& p, const CfaModel& model,
                  const std::vector<int>& flip_factors) {
  CfaParams out = p;
  std::vector<double> sign(model.n_factors, 1.0);
  for (int f : flip_factors) sign[f] = -1.0;
  for (int j = 0; j < model.n_items; ++j) out.loadings[j] *= sign[model.item_factor[j]];
  for (int a = 0; a < model.n_factors; ++a)
    for (int b = 0; b < model.n_factors; ++b)
      if (a != b) out.factor_corr(a, b) *= sign[a] * sign[b];
  return out;
}

}  // namespace

TEST_CASE("model validation") {
  CHECK_THROWS_AS(CfaModel::simple(1, 1), std::invalid_argument);
  CfaModel m = CfaModel::simple(2, 3);
  CHECK(m.n_items == 6);
  CHECK(m.focal_item == std::vector<int>{0, 3});
  CHECK_FALSE(m.loading_fixed(0));
  CfaModel fixed = CfaModel::simple(2, 3, Identification::FirstLoadingFixedToOne);
  CHECK(fixed.loading_fixed(0));
  CHECK(fixed.loading_fixed(3));
  CHECK_FALSE(fixed.loading_fixed(1));
}

TEST_CASE("model json round trip") {
  const auto doc = nlohmann::json::parse(R"({
    "factors": [{"name": "visual", "items": ["x1","x2","x3"]},
                {"name": "textual", "items": ["x4","x5","x6"]}],
    "identification": "latent_variance_fixed",
    "sign_restrict_focal": true,
    "focal": ["x2", "x4"]
  })");
  const CfaModel m = CfaModel::from_json(doc);
  CHECK(m.n_items == 6);
  CHECK(m.n_factors == 2);
  CHECK(m.sign_restrict_focal);
  CHECK(m.focal_item == std::vector<int>{1, 3});
  CHECK(m.item_name(4) == "x5");
}

TEST_CASE("negative loadings still imply positive within-factor covariance") {
  const CfaModel model = CfaModel::simple(3, 3);
  const Eigen::MatrixXd data = generate_data(model, paper_truth(-1.0), 100'000, 7);
  for (int f = 0; f < 3; ++f) {
    const int a = 3 * f, b = 3 * f + 1;
    const double cov = ((data.col(a).array() - data.col(a).mean()) *
                        (data.col(b).array() - data.col(b).mean()))
                           .mean();
    CHECK(cov == doctest::Approx(1.0).epsilon(0.03));
  }
}

TEST_CASE("zero loadings give independent items") {
  const CfaModel model = CfaModel::simple(3, 3);
  const Eigen::MatrixXd data = generate_data(model, paper_truth(0.0), 50'000, 8);
  for (int a = 0; a < 9; ++a)
    for (int b = 0; b < a; ++b) {
      const double ca = std::sqrt((data.col(a).array() - data.col(a).mean()).square().mean());
      const double cb = std::sqrt((data.col(b).array() - data.col(b).mean()).square().mean());
      const double cov = ((data.col(a).array() - data.col(a).mean()) *
                          (data.col(b).array() - data.col(b).mean()))
                             .mean();
      CHECK(std::fabs(cov / (ca * cb)) < 0.02);
    }
}

TEST_CASE("single-row generation is finite") {
  const CfaModel model = CfaModel::simple(2, 2);
  CfaParams t;
  t.intercepts = Eigen::VectorXd::Zero(4);
  t.loadings = Eigen::VectorXd::Ones(4);
  t.factor_corr = Eigen::MatrixXd::Identity(2, 2);
  t.residual_sd = Eigen::VectorXd::Ones(4);
  t.latent_sd = Eigen::VectorXd::Ones(2);
  const Eigen::MatrixXd row = generate_data(model, t, 1, 9);
  CHECK(row.rows() == 1);
  CHECK(row.allFinite());
}

TEST_CASE("log likelihood is invariant to factor sign flips") {
  const CfaModel model = CfaModel::simple(3, 3);
  Rng rng(77);
  CfaPriors priors;
  priors.loading = NormalPrior{0.5, 1.0};
  const Eigen::MatrixXd data = generate_data(model, paper_truth(0.7), 200, 10);
  for (int trial = 0; trial < 50; ++trial) {
    const CfaParams p = sample_params_from_priors(model, priors, rng);
    const double base = log_likelihood(model, p, data);
    CHECK(std::fabs(base - log_likelihood(model, flipped(p, model, {0}), data)) < 1e-10);
    CHECK(std::fabs(base - log_likelihood(model, flipped(p, model, {0, 2}), data)) < 1e-10);
    CHECK(std::fabs(base - log_likelihood(model, flipped(p, model, {0, 1, 2}), data)) <
          1e-10);
  }
}

TEST_CASE("log likelihood of pure noise matches the iid normal value") {
  const CfaModel model = CfaModel::simple(3, 3);
  const int n = 20'000;
  const Eigen::MatrixXd data = generate_data(model, paper_truth(0.0), n, 11);
  const double ll = log_likelihood(model, paper_truth(0.0), data);
  const double expected = -0.5 * n * 9.0 * (std::log(2.0 * M_PI) + 1.0);
  // relative sampling error of the quadratic form is ~sqrt(2/(n p))
  CHECK(ll == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("log likelihood at the mean has zero quadratic form") {
  const CfaModel model = CfaModel::simple(1, 2);
  CfaParams p;
  p.intercepts = Eigen::VectorXd::Constant(2, 1.5);
  p.loadings = Eigen::VectorXd::Zero(2);
  p.factor_corr = Eigen::MatrixXd::Identity(1, 1);
  p.residual_sd = Eigen::VectorXd::Constant(2, 0.8);
  p.latent_sd = Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd row(1, 2);
  row << 1.5, 1.5;
  const double expected = -0.5 * 2.0 * std::log(2.0 * M_PI * 0.64);
  CHECK(log_likelihood(model, p, row) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("non-PD implied covariance raises") {
  const CfaModel model = CfaModel::simple(1, 2);
  CfaParams p;
  p.intercepts = Eigen::VectorXd::Zero(2);
  p.loadings = Eigen::VectorXd::Ones(2);
  p.factor_corr = Eigen::MatrixXd::Identity(1, 1);
  p.residual_sd = Eigen::VectorXd::Zero(2);  // singular
  p.latent_sd = Eigen::VectorXd::Ones(1);
  Eigen::MatrixXd row(1, 2);
  row << 0.0, 0.0;
  CHECK_THROWS_AS(log_likelihood(model, p, row), std::domain_error);
}

TEST_CASE("sign-flip demonstration: relabeled posteriors center near +1") {
  const CfaModel model = CfaModel::simple(3, 3);
  const Eigen::MatrixXd data = generate_data(model, paper_truth(-1.0), 1000, 7);
  const CfaPriors priors;  // noninformative defaults
  const PosteriorDraws draws = gibbs_fit(model, priors, data, {3, 500, 1000, 1, 2});
  const PosteriorDraws rel = relabel(draws, model);
  for (int j = 0; j < 9; ++j) {
    const double m = column_mean(rel, lambda_name(j));
    CHECK(m > 0.8);
    CHECK(m < 1.2);
  }
  // likelihood untouched by relabeling, draw by draw
  for (std::size_t r = 0; r < rel.rows(); r += 97) {
    const double a = log_likelihood(model, draws.params_at(r, model), data);
    const double b = log_likelihood(model, rel.params_at(r, model), data);
    CHECK(std::fabs(a - b) < 1e-10);
  }
}

TEST_CASE("relabel is idempotent and fixes focal signs") {
  const CfaModel model = CfaModel::simple(2, 3);
  const Eigen::MatrixXd data = generate_data(model, [] {
    CfaParams t;
    t.intercepts = Eigen::VectorXd::Zero(6);
    t.loadings = Eigen::VectorXd::Constant(6, -0.9);
    t.factor_corr = Eigen::MatrixXd::Identity(2, 2);
    t.factor_corr(0, 1) = t.factor_corr(1, 0) = 0.4;
    t.residual_sd = Eigen::VectorXd::Ones(6);
    t.latent_sd = Eigen::VectorXd::Ones(2);
    return t;
  }(), 300, 13);
  const PosteriorDraws draws =
      gibbs_fit(model, CfaPriors{}, data, {1, 200, 400, 2, 1, true});
  const PosteriorDraws rel = relabel(draws, model);
  for (int f = 0; f < 2; ++f) {
    const auto col = rel.column(lambda_name(model.focal_item[f]));
    for (double v : col) CHECK(v >= 0.0);
  }
  const PosteriorDraws rel2 = relabel(rel, model);
  CHECK(rel.table().to_csv() == rel2.table().to_csv());

  // already-positive draws pass through unchanged
  const PosteriorDraws rel3 = relabel(rel2, model);
  CHECK(rel2.table().to_csv() == rel3.table().to_csv());
}

TEST_CASE("sign-restricted focal loadings never go negative") {
  CfaModel model = CfaModel::simple(2, 3);
  model.sign_restrict_focal = true;
  CfaParams truth;
  truth.intercepts = Eigen::VectorXd::Zero(6);
  truth.loadings = Eigen::VectorXd::Constant(6, -0.8);  // truth pulls negative
  truth.factor_corr = Eigen::MatrixXd::Identity(2, 2);
  truth.residual_sd = Eigen::VectorXd::Ones(6);
  truth.latent_sd = Eigen::VectorXd::Ones(2);
  const Eigen::MatrixXd data = generate_data(model, truth, 300, 19);
  const PosteriorDraws d = gibbs_fit(model, CfaPriors{}, data, {1, 150, 300, 5, 1, true});
  for (int f = 0; f < 2; ++f)
    for (double v : d.column(lambda_name(model.focal_item[f]))) CHECK(v >= 0.0);
}

TEST_CASE("informative prior shrinks zero-loading posteriors toward its mean") {
  // n is small enough that the N(1, 1/16) prior keeps a visible grip: the
  // conjugate fixed point 16/(16 + n E[eta^2]) predicts ~0.35 at n=30.
  const CfaModel model = CfaModel::simple(1, 3);
  CfaParams truth;
  truth.intercepts = Eigen::VectorXd::Zero(3);
  truth.loadings = Eigen::VectorXd::Zero(3);
  truth.factor_corr = Eigen::MatrixXd::Identity(1, 1);
  truth.residual_sd = Eigen::VectorXd::Ones(3);
  truth.latent_sd = Eigen::VectorXd::Ones(1);
  const Eigen::MatrixXd data = generate_data(model, truth, 30, 17);
  CfaPriors priors;
  priors.loading = NormalPrior{1.0, 1.0 / 16.0};
  const PosteriorDraws d = gibbs_fit(model, priors, data, {2, 400, 800, 3, 1, true});
  for (int j = 0; j < 3; ++j) {
    const double m = column_mean(d, lambda_name(j));
    CHECK(m > 0.2);
    CHECK(m < 1.0);
  }
  // widening the prior releases the shrinkage toward zero
  CfaPriors wide;
  wide.loading = NormalPrior{1.0, 100.0};
  const PosteriorDraws dw = gibbs_fit(model, wide, data, {2, 400, 800, 3, 1, true});
  double pulled = 0.0, released = 0.0;
  for (int j = 0; j < 3; ++j) {
    pulled += column_mean(d, lambda_name(j));
    released += std::fabs(column_mean(dw, lambda_name(j)));
  }
  CHECK(released < pulled);
}

TEST_CASE("posterior means agree with the method-of-moments oracle at n=1e5") {
  const CfaModel model = CfaModel::simple(3, 3);
  CfaParams truth = paper_truth(0.8);
  truth.intercepts = Eigen::VectorXd::LinSpaced(9, -0.4, 0.4);
  truth.factor_corr(0, 1) = truth.factor_corr(1, 0) = 0.3;
  truth.factor_corr(0, 2) = truth.factor_corr(2, 0) = 0.2;
  truth.factor_corr(1, 2) = truth.factor_corr(2, 1) = 0.1;
  const int n = 100'000;
  const Eigen::MatrixXd data = generate_data(model, truth, n, 23);
  const PosteriorDraws rel =
      relabel(gibbs_fit(model, CfaPriors{}, data, {1, 150, 250, 5, 1, true}), model);
  auto cov = [&](int a, int b) {
    return ((data.col(a).array() - data.col(a).mean()) *
            (data.col(b).array() - data.col(b).mean()))
        .mean();
  };
  for (int f = 0; f < 3; ++f) {
    const int i0 = 3 * f, i1 = 3 * f + 1, i2 = 3 * f + 2;
    const double mom = std::sqrt(cov(i0, i1) * cov(i0, i2) / cov(i1, i2));
    const double post = column_mean(rel, lambda_name(i0));
    CHECK(std::fabs(post - mom) < 0.05);
    CHECK(std::fabs(post - truth.loadings[i0]) < 0.05);
  }
}

TEST_CASE("factor correlation draws stay positive definite with unit diagonal") {
  const CfaModel model = CfaModel::simple(3, 3);
  const Eigen::MatrixXd data = generate_data(model, paper_truth(0.9), 300, 29);
  const PosteriorDraws d = gibbs_fit(model, CfaPriors{}, data, {1, 200, 300, 7, 1, true});
  for (std::size_t r = 0; r < d.rows(); r += 11) {
    const CfaParams p = d.params_at(r, model);
    Eigen::LLT<Eigen::MatrixXd> llt(p.factor_corr);
    CHECK(llt.info() == Eigen::Success);
    for (int f = 0; f < 3; ++f) CHECK(p.factor_corr(f, f) == 1.0);
  }
}

TEST_CASE("gibbs_fit input validation") {
  const CfaModel model = CfaModel::simple(2, 2);
  Eigen::MatrixXd data = Eigen::MatrixXd::Random(50, 4);
  CfaPriors priors;

  Eigen::MatrixXd bad = data;
  bad(3, 2) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(gibbs_fit(model, priors, bad, {1, 10, 10, 1, 1, true}),
                  std::invalid_argument);

  CfaPriors bad_loading;
  bad_loading.loading = GammaPrior{1.0, 1.0};
  CHECK_THROWS_AS(gibbs_fit(model, bad_loading, data, {1, 10, 10, 1, 1, true}),
                  std::invalid_argument);

  CfaPriors bad_sd;
  bad_sd.residual_sd = NormalPrior{0.0, 1.0};
  CHECK_THROWS_AS(gibbs_fit(model, bad_sd, data, {1, 10, 10, 1, 1, true}),
                  std::invalid_argument);

  CHECK_THROWS_AS(gibbs_fit(model, priors, data.leftCols(3), {1, 10, 10, 1, 1, true}),
                  std::invalid_argument);
}

TEST_CASE("chains merge deterministically under any worker count") {
  const CfaModel model = CfaModel::simple(2, 2);
  const Eigen::MatrixXd data = generate_data(model, [] {
    CfaParams t;
    t.intercepts = Eigen::VectorXd::Zero(4);
    t.loadings = Eigen::VectorXd::Ones(4);
    t.factor_corr = Eigen::MatrixXd::Identity(2, 2);
    t.residual_sd = Eigen::VectorXd::Ones(4);
    t.latent_sd = Eigen::VectorXd::Ones(2);
    return t;
  }(), 100, 31);
  const PosteriorDraws a = gibbs_fit(model, CfaPriors{}, data, {3, 50, 100, 9, 1});
  const PosteriorDraws b = gibbs_fit(model, CfaPriors{}, data, {3, 50, 100, 9, 3});
  CHECK(a.table().to_csv() == b.table().to_csv());
}

TEST_CASE("posterior draws csv round trip") {
  const CfaModel model = CfaModel::simple(2, 2);
  const Eigen::MatrixXd data = Eigen::MatrixXd::Random(60, 4);
  const PosteriorDraws d = gibbs_fit(model, CfaPriors{}, data, {2, 20, 30, 11, 1, true});
  const std::string path = "/tmp/opaque_test_draws.csv";
  d.write_csv(path);
  const SampleTable t = SampleTable::read_csv(path);
  CHECK(t.rows() == d.rows());
  CHECK(t.columns() == d.table().columns());
  CHECK(t.to_csv() == d.table().to_csv());
  std::remove(path.c_str());
}

TEST_CASE("marker identification frees the latent SDs") {
  const CfaModel model = CfaModel::simple(2, 3, Identification::FirstLoadingFixedToOne);
  CfaParams truth;
  truth.intercepts = Eigen::VectorXd::Zero(6);
  truth.loadings = Eigen::VectorXd::Ones(6);
  truth.factor_corr = Eigen::MatrixXd::Identity(2, 2);
  truth.residual_sd = Eigen::VectorXd::Ones(6);
  truth.latent_sd = Eigen::VectorXd::Constant(2, 1.5);
  const Eigen::MatrixXd data = generate_data(model, truth, 2'000, 37);
  const PosteriorDraws d = gibbs_fit(model, CfaPriors{}, data, {1, 300, 500, 13, 1, true});
  // fixed loadings stay pinned at one
  for (double v : d.column(lambda_name(0))) CHECK(v == 1.0);
  // latent SD posterior tracks the truth
  CHECK(column_mean(d, psi_name(0)) == doctest::Approx(1.5).epsilon(0.1));
  CHECK(column_mean(d, psi_name(1)) == doctest::Approx(1.5).epsilon(0.1));
}

// The two non-conjugate steps validated against exact one-dimensional
// posteriors: pinning every other parameter with near-degenerate priors
// leaves a target density computable by quadrature.
TEST_CASE("residual-SD step matches the exact posterior") {
  // lambda and nu pinned at 0, so p(s | y) ~ p_sd(s) s^-n exp(-SSR/(2 s^2))
  const CfaModel model = CfaModel::simple(1, 2);
  CfaParams truth;
  truth.intercepts = Eigen::VectorXd::Zero(2);
  truth.loadings = Eigen::VectorXd::Zero(2);
  truth.factor_corr = Eigen::MatrixXd::Identity(1, 1);
  truth.residual_sd = Eigen::VectorXd::Constant(2, 1.3);
  truth.latent_sd = Eigen::VectorXd::Ones(1);
  const Eigen::MatrixXd data = generate_data(model, truth, 60, 5);
  CfaPriors priors;
  priors.intercept = NormalPrior{0.0, 1e-12};
  priors.loading = NormalPrior{0.0, 1e-12};
  priors.residual_sd = GammaPrior{1.0, 0.5};
  const PosteriorDraws d = gibbs_fit(model, priors, data, {1, 500, 8000, 9, 1, true});

  const double ssr = data.col(0).squaredNorm();
  const int n = 60;
  const auto logpost = [&](double s) {
    return prior_log_density(UnivariatePrior{GammaPrior{1.0, 0.5}}, s) -
           n * std::log(s) - 0.5 * ssr / (s * s);
  };
  const double peak = logpost(std::sqrt(ssr / n));
  const auto dens = [&](double s) { return std::exp(logpost(s) - peak); };
  const double norm = integrate(dens, 0.05, 6.0, {1e-10, 48});
  const auto cdf = [&](double s) {
    return integrate(dens, 0.05, std::max(0.051, s), {1e-9, 48}) / norm;
  };
  const auto col = d.column(theta_name(0));
  std::vector<double> thinned;
  for (std::size_t i = 0; i < col.size(); i += 4) thinned.push_back(col[i]);
  CHECK(testutil::ks_statistic(thinned, cdf) < 0.037);  // 1% critical at n=2000
}

TEST_CASE("factor-correlation step matches the exact posterior") {
  // loadings pinned at 1, intercepts at 0, residual SDs pinned at 0.5;
  // p(r | y) ~ prod_i N(y_i; 0, Lambda Phi(r) Lambda' + 0.25 I) under LKJ(1)
  const CfaModel model = CfaModel::simple(2, 2);
  CfaParams truth;
  truth.intercepts = Eigen::VectorXd::Zero(4);
  truth.loadings = Eigen::VectorXd::Ones(4);
  truth.factor_corr = Eigen::MatrixXd::Identity(2, 2);
  truth.factor_corr(0, 1) = truth.factor_corr(1, 0) = 0.45;
  truth.residual_sd = Eigen::VectorXd::Constant(4, 0.5);
  truth.latent_sd = Eigen::VectorXd::Ones(2);
  const Eigen::MatrixXd data = generate_data(model, truth, 80, 6);
  CfaPriors priors;
  priors.intercept = NormalPrior{0.0, 1e-12};
  priors.loading = NormalPrior{1.0, 1e-12};
  priors.residual_sd = GammaPrior{25e6, 5e7};  // mean 0.5, sd 1e-4
  const PosteriorDraws d = gibbs_fit(model, priors, data, {1, 2000, 60000, 11, 1, true});

  const Eigen::MatrixXd crossprod = data.transpose() * data;
  Eigen::MatrixXd lam = Eigen::MatrixXd::Zero(4, 2);
  lam(0, 0) = lam(1, 0) = 1.0;
  lam(2, 1) = lam(3, 1) = 1.0;
  const int n = 80;
  const auto logpost = [&](double r) {
    Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(2, 2);
    phi(0, 1) = phi(1, 0) = r;
    const Eigen::MatrixXd sigma =
        lam * phi * lam.transpose() + 0.25 * Eigen::MatrixXd::Identity(4, 4);
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    double logdet = 0.0;
    for (int i = 0; i < 4; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    return -0.5 * n * logdet - 0.5 * llt.solve(crossprod).trace();
  };
  const double peak = logpost(0.45);
  const auto dens = [&](double r) { return std::exp(logpost(r) - peak); };
  const double norm = integrate(dens, -0.999, 0.999, {1e-10, 48});
  const auto cdf = [&](double r) {
    return integrate(dens, -0.999, std::max(-0.998, r), {1e-9, 48}) / norm;
  };
  const auto col = d.column(phi_name(0, 1));
  std::vector<double> thinned;
  for (std::size_t i = 0; i < col.size(); i += 40) thinned.push_back(col[i]);
  CHECK(testutil::ks_statistic(thinned, cdf) < 0.043);  // 1% critical at n=1500
}

TEST_CASE("lkj onion sampler matches the analytic marginal") {
  Rng rng(41);
  SUBCASE("dim 3, eta 1: marginal density proportional to sqrt(1-r^2)") {
    std::vector<double> draws(100'000);
    for (auto& d : draws) d = lkj_onion_sample(3, 1.0, rng)(0, 1);
    const double ks = testutil::ks_statistic(draws, [](double r) {
      return 0.5 + (r * std::sqrt(1.0 - r * r) + std::asin(r)) / M_PI;
    });
    CHECK(ks < 0.02);
  }
  SUBCASE("dim 2, eta 2: (r+1)/2 is Beta(2,2)") {
    std::vector<double> draws(100'000);
    for (auto& d : draws) d = lkj_onion_sample(2, 2.0, rng)(0, 1);
    const double ks = testutil::ks_statistic(draws, [](double r) {
      const double u = 0.5 * (r + 1.0);
      return u * u * (3.0 - 2.0 * u);
    });
    CHECK(ks < 0.02);
  }
  SUBCASE("draws are PD correlation matrices") {
    for (int trial = 0; trial < 2'000; ++trial) {
      const Eigen::MatrixXd r = lkj_onion_sample(4, 1.0, rng);
      Eigen::LLT<Eigen::MatrixXd> llt(r);
      CHECK(llt.info() == Eigen::Success);
      for (int i = 0; i < 4; ++i) CHECK(r(i, i) == 1.0);
    }
  }
}

TEST_CASE("prior draws cover every parameter") {
  const CfaModel model = CfaModel::simple(3, 3);
  CfaPriors priors;
  Rng rng(43);
  const CfaParams p = sample_params_from_priors(model, priors, rng);
  CHECK(p.intercepts.size() == 9);
  CHECK(p.loadings.allFinite());
  CHECK(p.residual_sd.minCoeff() > 0.0);
  CHECK(p.latent_sd == Eigen::VectorXd::Ones(3));
  Eigen::LLT<Eigen::MatrixXd> llt(p.factor_corr);
  CHECK(llt.info() == Eigen::Success);
}
