// Apache License, Version 2.0, refer to LICENSE.txt

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "opaque/cfa.hpp"
#include "opaque/rng.hpp"
#include "opaque/sample_table.hpp"

namespace fs = std::filesystem;

namespace {

#ifndef OPAQUE_CLI_PATH
#error "OPAQUE_CLI_PATH must be defined by the build"
#endif
#ifndef OPAQUE_SOURCE_DIR
#error "OPAQUE_SOURCE_DIR must be defined by the build"
#endif

const std::string cli = OPAQUE_CLI_PATH;
const std::string src = OPAQUE_SOURCE_DIR;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args, const std::string& env = "") {
  const std::string log = (fs::temp_directory_path() / "opaque_cli_test.log").string();
  const std::string cmd = env + " " + cli + " " + args + " > " + log + " 2>&1";
  const int rc = std::system(cmd.c_str());
  std::ifstream in(log);
  std::ostringstream ss;
  ss << in.rdbuf();
  return {WEXITSTATUS(rc), ss.str()};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("usage errors exit with code 1") {
  CHECK(run("definitely-not-a-subcommand").exit_code == 1);
  CHECK(run("threshold-prior --n 0 --out /tmp/x.csv").exit_code == 1);
  const RunResult missing = run("sbc run --config /nonexistent/sbc.json --out /tmp/x.csv");
  CHECK(missing.exit_code == 1);
  CHECK(missing.output.find("/nonexistent/sbc.json") != std::string::npos);
  CHECK(run("--help").exit_code == 0);
}

TEST_CASE("implied-prior writes identical bytes for any worker count") {
  const fs::path dir = fs::temp_directory_path() / "opaque_cli_ip";
  fs::create_directories(dir);
  const std::string base = "implied-prior --pattern " + src +
                           "/configs/bollen_pattern.json --priors " + src +
                           "/configs/uniform_priors.json --n 20000 --seed 11 ";
  const std::string out1 = (dir / "w1.csv").string();
  const std::string out2 = (dir / "w2.csv").string();
  CHECK(run(base + "--workers 1 --out " + out1).exit_code == 0);
  CHECK(run(base + "--workers 2 --out " + out2).exit_code == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(fs::exists(dir / "manifest.json"));
  const opaque::SampleTable t = opaque::SampleTable::read_csv(out1);
  CHECK(t.cols() == 6);
  CHECK(t.has_column("y2~~y4"));
  CHECK(t.rows() > 7000);
  fs::remove_all(dir);
}

TEST_CASE("threshold-prior curves and svg switch") {
  const fs::path dir = fs::temp_directory_path() / "opaque_cli_th";
  fs::create_directories(dir);
  const std::string csv = (dir / "curves.csv").string();
  const std::string svg = (dir / "curves.svg").string();
  CHECK(run("threshold-prior --n 3 --mean 0 --sd-arg 5 --translation reorder --seed 1 "
            "--out " + csv + " --svg " + svg).exit_code == 0);
  CHECK(fs::exists(csv));
  CHECK(fs::exists(svg));
  const std::string head = slurp(csv).substr(0, 16);
  CHECK(head == "curve,x,density\n");

  // OPAQUE_NO_SVG disables the overlay
  const std::string svg2 = (dir / "curves2.svg").string();
  CHECK(run("threshold-prior --n 3 --sd-arg 5 --translation reorder --seed 1 --out " +
            csv + " --svg " + svg2, "OPAQUE_NO_SVG=1").exit_code == 0);
  CHECK_FALSE(fs::exists(svg2));
  fs::remove_all(dir);
}

TEST_CASE("chol-structure prints the classification") {
  const RunResult r =
      run("chol-structure --pattern " + src + "/configs/bollen_block_cov.json");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("L(y6,y4) = determined") != std::string::npos);
  CHECK(r.output.find("L(y8,y2) = zero") != std::string::npos);
  CHECK(r.output.find("free parameters: 8") != std::string::npos);
}

TEST_CASE("reproduce rejects unknown sections") {
  const fs::path dir = fs::temp_directory_path() / "opaque_cli_rep";
  const RunResult r = run("reproduce --section 9.9 --out " + dir.string());
  CHECK(r.exit_code == 1);
  fs::remove_all(dir);
}

TEST_CASE("cfa fit consumes a data csv and emits the draws schema") {
  const fs::path dir = fs::temp_directory_path() / "opaque_cli_cfa";
  fs::create_directories(dir);
  // generate a small dataset with the library and feed it through the CLI
  const opaque::CfaModel model = opaque::CfaModel::simple(3, 3);
  opaque::CfaParams truth;
  truth.intercepts = Eigen::VectorXd::Zero(9);
  truth.loadings = Eigen::VectorXd::Ones(9);
  truth.factor_corr = Eigen::MatrixXd::Identity(3, 3);
  truth.residual_sd = Eigen::VectorXd::Ones(9);
  truth.latent_sd = Eigen::VectorXd::Ones(3);
  const Eigen::MatrixXd data = opaque::generate_data(model, truth, 150, 3);
  opaque::SampleTable table(model.item_names);
  std::vector<double> row(9);
  for (int i = 0; i < data.rows(); ++i) {
    for (int j = 0; j < 9; ++j) row[j] = data(i, j);
    table.add_row(row);
  }
  const std::string data_csv = (dir / "data.csv").string();
  table.write_csv(data_csv);

  const std::string out = (dir / "draws.csv").string();
  const RunResult r = run("cfa fit --model " + src + "/configs/hs_model.json --data " +
                          data_csv + " --chains 1 --warmup 50 --iters 80 --seed 2 "
                          "--relabel --out " + out + " 2>/dev/null");
  CHECK(r.exit_code == 0);
  const opaque::SampleTable draws = opaque::SampleTable::read_csv(out);
  CHECK(draws.rows() == 80);
  CHECK(draws.has_column("lambda[9]"));
  CHECK(draws.has_column("phi[1,2]"));
  CHECK(draws.has_column("chain"));
  CHECK(draws.has_column("iter"));
  fs::remove_all(dir);
}

TEST_CASE("savage-dickey cli computes both modes from files") {
  const fs::path dir = fs::temp_directory_path() / "opaque_cli_sd";
  fs::create_directories(dir);
  // synthetic posterior concentrated away from zero
  opaque::SampleTable post({"y2~~y4", "y2~~y6", "y4~~y8", "y6~~y8"});
  opaque::Rng rng(5);
  std::vector<double> row(4);
  for (int i = 0; i < 2000; ++i) {
    row[0] = rng.normal(0.35, 0.08);
    row[1] = rng.normal(0.30, 0.08);
    row[2] = rng.normal(0.20, 0.10);
    row[3] = rng.normal(-0.10, 0.10);
    post.add_row(row);
  }
  const std::string post_csv = (dir / "post.csv").string();
  post.write_csv(post_csv);
  const std::string out = (dir / "sd.csv").string();
  const RunResult r =
      run("savage-dickey --pattern " + src + "/configs/bollen_pattern.json --priors " +
          src + "/configs/uniform_priors.json --focal y2~~y4,y2~~y6 --posterior " +
          post_csv + " --mode corrected --n-prior 40000 --seed 7 --workers 2 --out " +
          out);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("log BF10 (corrected)") != std::string::npos);
  const opaque::SampleTable rep = opaque::SampleTable::read_csv(out);
  CHECK(rep.rows() == 1);
  // naive prior term is log(0.25)
  CHECK(rep.at(0, rep.column_index("log_prior_naive")) ==
        doctest::Approx(-1.3862943611198906).epsilon(1e-12));
  // corrected BF assembles from its components
  CHECK(rep.at(0, rep.column_index("log_bf10_corrected")) ==
        doctest::Approx(rep.at(0, rep.column_index("log_prior_constrained")) -
                        rep.at(0, rep.column_index("log_posterior")) +
                        rep.at(0, rep.column_index("log_correction"))).epsilon(1e-10));
  fs::remove_all(dir);
}
