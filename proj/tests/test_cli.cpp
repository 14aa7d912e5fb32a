#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "ansfd/cli.hpp"
#include "ansfd/csv.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = ansfd::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> result;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) result.push_back(line);
  return result;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "ansfd_cli_test";
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("solve writes the trajectory with reference columns") {
  const auto r = run({"solve", "--problem", "dahlquist:-1", "--scheme", "explicit_euler", "--h", "0.1"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 12);
  CHECK(ls[0] == "t,y,y_ref,abs_err");
  CHECK(ls[1] == "0,1,1,0");
  CHECK(ls[2].starts_with("0.10000000000000001,0.90000000000000002,"));
  CHECK(ls[3].starts_with("0.20000000000000001,0.81000000000000005,"));
  CHECK(r.out.find('\r') == std::string::npos);
  CHECK(r.out.back() == '\n');
}

TEST_CASE("solve without a reference has only t,y") {
  const auto r = run({"solve", "--problem", "dahlquist_noisy:-1", "--h", "0.25", "--seed", "3"});
  REQUIRE(r.code == 0);
  CHECK(lines(r.out)[0] == "t,y");
}

TEST_CASE("seeded solve runs are byte-identical") {
  const auto dir = scratch_dir();
  const auto a = dir / "a.csv";
  const auto b = dir / "b.csv";
  for (const auto& path : {a, b}) {
    const auto r = run({"solve", "--problem", "dahlquist_noisy:-1", "--scheme", "rk_ansfd:eta=3,delta=random,seed=7",
                        "--h", "0.01", "--output", path.string()});
    REQUIRE(r.code == 0);
  }
  CHECK(slurp(a) == slurp(b));
  CHECK(!slurp(a).empty());
}

TEST_CASE("error contract") {
  const auto unknown = run({"solve", "--problem", "nosuch"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("dahlquist") != std::string::npos);

  CHECK(run({"solve", "--scheme", "warp_drive"}).code == 2);
  CHECK(run({"solve", "--scheme", "euler_ansfd:eta=0"}).code == 2);
  CHECK(run({"solve", "--h", "-1"}).code == 2);
  CHECK(run({"solve", "--bogus-flag"}).code == 2);
  CHECK(run({}).code == 2);

  const auto diverged = run({"solve", "--problem", "dahlquist:-1", "--h", "3", "--t-final", "1000"});
  CHECK(diverged.code == 3);
  CHECK(diverged.err.find("step 40") != std::string::npos);

  CHECK(run({"stability", "--bracket", "3:4"}).code == 2);
  CHECK(run({"stability", "--bracket", "3"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("coeffs subcommand") {
  const auto r = run({"coeffs", "--eta", "3", "--h", "1", "--gain", "unit"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() >= 5);
  CHECK(ls[0] == "j,weight");
  CHECK(ls[1] == "0,3");
  CHECK(ls[2] == "1,2");
  CHECK(ls[3] == "2,-2");
  CHECK(ls[4] == "3,-3");
  CHECK(r.out.find("# K=1\n") != std::string::npos);

  const auto j = run({"coeffs", "--eta", "5", "--format", "json"});
  REQUIRE(j.code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  CHECK(doc["eta"] == 5);
  CHECK(doc["K"].get<double>() == doctest::Approx(25.0 / 27.0));
  CHECK(doc["weights"].size() == 6);
}

TEST_CASE("order, stability and noise headers") {
  const auto order = run({"order", "--scheme", "rk4_classic"});
  REQUIRE(order.code == 0);
  const auto ol = lines(order.out);
  CHECK(ol[0] == "h,final_error,pairwise_order");
  CHECK(ol.size() == 5);
  CHECK(ol[1].ends_with(","));
  CHECK(order.err.find("summary order") != std::string::npos);

  const auto stab = run({"stability", "--scheme", "euler_ansfd", "--eta-list", "1,2"});
  REQUIRE(stab.code == 0);
  const auto sl = lines(stab.out);
  CHECK(sl[0] == "scheme,eta,lambda,h_max");
  CHECK(sl[1].starts_with("euler_ansfd,1,-1,"));
  CHECK(std::abs(ansfd::parse_number(ansfd::split(sl[1], ',')[3], "h_max") - 2.0) < 1e-3);
  CHECK(sl.size() == 3);

  const auto noise = run({"noise", "--eta-list", "2,8", "--trials", "2000"});
  REQUIRE(noise.code == 0);
  const auto nl = lines(noise.out);
  CHECK(nl[0] == "eta,algebraic_std,two_point_std,analytic_std");
  CHECK(nl.size() == 3);
  CHECK(run({"noise", "--trials", "10"}).code == 2);
}

TEST_CASE("sweep output is sorted and independent of thread count") {
  const std::vector<std::string> base{"sweep", "--scheme", "euler_ansfd", "--grid", "eta=5,1,3:h=0.05,0.1"};
  auto serial = base;
  serial.insert(serial.end(), {"--jobs", "1"});
  auto parallel = base;
  parallel.insert(parallel.end(), {"--jobs", "4"});
  const auto a = run(serial);
  const auto b = run(parallel);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const auto ls = lines(a.out);
  REQUIRE(ls.size() == 7);
  CHECK(ls[0] == "scheme,eta,h,seed,final_value,final_error,linf,l2,status");
  CHECK(ls[1].starts_with("euler_ansfd,1,0.050000000000000003,"));
  CHECK(ls[2].starts_with("euler_ansfd,1,0.10000000000000001,"));
  CHECK(ls[6].starts_with("euler_ansfd,5,0.10000000000000001,"));

  const auto diverging = run({"sweep", "--scheme", "explicit_euler", "--grid", "h=3", "--t-final", "1000"});
  REQUIRE(diverging.code == 0);
  CHECK(diverging.out.find("diverged@40") != std::string::npos);
  CHECK(run({"sweep", "--grid", "zeta=1"}).code == 2);
}

TEST_CASE("json config mirrors flags and flags override it") {
  const auto cfg = scratch_dir() / "run.json";
  {
    std::ofstream f(cfg);
    f << R"({"problem": "dahlquist:-2", "scheme": "rk4_classic", "h": 0.05, "t_final": 0.1})";
  }
  const auto from_file = run({"solve", "--config", cfg.string()});
  REQUIRE(from_file.code == 0);
  CHECK(lines(from_file.out).size() == 4);

  const auto direct = run({"solve", "--problem", "dahlquist:-2", "--scheme", "rk4_classic", "--h", "0.05", "--t-final", "0.1"});
  CHECK(from_file.out == direct.out);

  const auto overridden = run({"solve", "--config", cfg.string(), "--h", "0.025"});
  REQUIRE(overridden.code == 0);
  CHECK(lines(overridden.out).size() == 6);

  CHECK(run({"solve", "--config", (scratch_dir() / "missing.json").string()}).code == 2);
}

TEST_CASE("json trajectory output") {
  const auto r = run({"solve", "--format", "json", "--h", "0.5"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["problem"] == "dahlquist:-1");
  CHECK(doc["t"].size() == 3);
  CHECK(doc["y"][1][0].get<double>() == doctest::Approx(0.5));
  CHECK(doc.contains("y_ref"));
}

TEST_CASE("ANSFD_SEED provides the default seed") {
  const std::vector<std::string> args{"solve", "--problem", "dahlquist_noisy:-1", "--h", "0.1"};
  auto with_flag = args;
  with_flag.insert(with_flag.end(), {"--seed", "77"});
  ::setenv("ANSFD_SEED", "77", 1);
  const auto env = run(args);
  ::unsetenv("ANSFD_SEED");
  const auto flag = run(with_flag);
  const auto none = run(args);
  REQUIRE(env.code == 0);
  CHECK(env.out == flag.out);
  CHECK(env.out != none.out);
}
