#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "hms/io.hpp"

using hms::io::Json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  Json json() const { return Json::parse(out); }
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + HMS_BINARY + std::string(" ") + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("hms_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string put(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

double cabs(const Json& c) { return std::hypot(c[0].get<double>(), c[1].get<double>()); }

}  // namespace

TEST_CASE("theta values and usage errors") {
  Run r = run("theta --tau 0,1 --z 0.5,0.5 --tol 1e-12");
  CHECK(r.code == 0);
  CHECK(cabs(r.json()["value"]) < 1e-12);

  r = run("theta --tau 0,1 --z 0,0");
  CHECK(r.code == 0);
  // pi^{1/4} / Gamma(3/4)
  CHECK(std::abs(r.json()["value"][0].get<double>() - 1.0864348112133080) < 1e-14);
  CHECK(r.json()["truncation_M"].get<int>() > 0);

  CHECK(run("theta --z 0,0").code == 2);
  CHECK(run("theta --tau ' 0;1' --z 0,0").code == 2);
  CHECK(run("theta --tau 0,1 --z 0,0 --char 1/0").code == 2);
  CHECK(run("nonsense").code == 2);
  CHECK(run("").code == 2);
  CHECK(run("theta --tau 0,1 --z 0,0", "HMS_TOL=abc").code == 2);

  r = run("theta --tau 0,-1 --z 0,0");
  CHECK(r.code == 1);
  CHECK(r.json()["error"]["code"] == "INVALID_ARGUMENT");
}

TEST_CASE("tolerance precedence") {
  CHECK(run("theta --tau 0,1 --z 0,0", "HMS_TOL=1e-6").json()["tol"].get<double>() == 1e-6);
  CHECK(run("theta --tau 0,1 --z 0,0 --tol 1e-9", "HMS_TOL=1e-6").json()["tol"].get<double>() == 1e-9);
  const Run v = run("verify --suite theta", "HMS_TOL=1e-300");
  CHECK(v.code == 1);
  for (const auto& rep : v.json()) CHECK(rep["tolerance"].get<double>() == 1e-300);
}

TEST_CASE("worked composition on both sides") {
  const std::string o = put("O.json", R"({"side":"B","kind":"bundle","degree":0})");
  const std::string l = put("L.json", R"({"side":"B","kind":"bundle","degree":1})");
  const std::string l2 = put("L2.json", R"({"side":"B","kind":"bundle","degree":2})");

  const Run h1 = run("hom " + o + " " + l), h2 = run("hom " + l + " " + l2);
  REQUIRE(h1.code == 0);
  CHECK(h1.json()["dimension"] == 1);
  CHECK(run("hom " + o + " " + l2).json()["dimension"] == 2);
  CHECK(run("hom " + l2 + " " + o + " --degree 1").json()["dimension"] == 2);
  const std::string s1 = put("s1.json", h1.json()["basis"][0].dump());
  const std::string s2 = put("s2.json", h2.json()["basis"][0].dump());

  const double t0 = 1.0037348854877390;  // theta[0,0](2i, 0)
  const double t1 = 0.4157606025960272;  // theta[1/2,0](2i, 0)
  const Run b = run("compose --side b " + s1 + " " + s2);
  REQUIRE(b.code == 0);
  const Json bj = b.json();
  CHECK(bj["kind"] == "section");
  REQUIRE(bj["terms"].size() == 2);
  CHECK(std::abs(cabs(bj["terms"][0]["coeff"][0][0]) - t0) < 1e-12);
  CHECK(std::abs(cabs(bj["terms"][1]["coeff"][0][0]) - t1) < 1e-12);

  const std::string a1 = put("a1.json", run("mirror " + s1).out);
  const std::string a2 = put("a2.json", run("mirror " + s2).out);
  const Run a = run("compose --side a " + a1 + " " + a2);
  REQUIRE(a.code == 0);
  const Json aj = a.json();
  CHECK(aj["kind"] == "point_sum");
  REQUIRE(aj["terms"].size() == 2);
  CHECK(std::abs(cabs(aj["terms"][0]["coeff"][0][0]) - t0) < 1e-12);
  CHECK(std::abs(cabs(aj["terms"][1]["coeff"][0][0]) - t1) < 1e-12);

  // the mirror of the B-side composite is the A-side composite
  const Json image = Json::parse(run("mirror " + put("s12.json", b.out)).out);
  for (int i = 0; i < 2; ++i) {
    CHECK(image["terms"][i]["point"] == aj["terms"][i]["point"]);
    CHECK(std::abs(cabs(image["terms"][i]["coeff"][0][0]) - cabs(aj["terms"][i]["coeff"][0][0])) < 1e-12);
  }

  const Run bad = run("compose --side b " + s2 + " " + s1);
  CHECK(bad.code == 1);
  CHECK(bad.json()["error"]["code"] == "ENDPOINT_MISMATCH");
  CHECK(run("compose --side a " + s1 + " " + s2).code == 1);
  CHECK(run("compose --side c " + s1 + " " + s2).code == 2);
  CHECK(run("compose --side b " + s1).code == 2);
  CHECK(run("compose --side b " + s1 + " /nonexistent/file.json").code == 2);
}

TEST_CASE("mirror objects") {
  Json j = run("mirror " + put("L3.json", R"({"kind":"bundle","degree":3,"twist_a":[1,2],"twist_b":0.25})")).json();
  CHECK(j["kind"] == "brane");
  CHECK(j["slope"] == Json::array({3, 1}));
  CHECK(j["intercept"] == Json::array({1, 6}));
  CHECK(j["phase_b"].get<double>() == 0.25);

  j = run("mirror " + put("S.json", R"({"kind":"torsion","point_a":[2,5],"point_b":0.3})")).json();
  CHECK(j["slope"] == Json::array({1, 0}));
  CHECK(j["alpha"].get<double>() == 0.5);

  j = run("mirror " + put("P.json", R"({"kind":"bundle","degree":2,"level":2})")).json();
  CHECK(j["kind"] == "tuple");
  CHECK(j["components"].size() == 2);

  const Run bad = run("mirror " + put("bad.json", R"({"kind":"bundle","degree":1,"twist_a":[2,4]})"));
  CHECK(bad.code == 1);
  CHECK(bad.json()["error"]["code"] == "SCHEMA");
  CHECK(run("mirror " + put("junk.json", "{")).json()["error"]["code"] == "SCHEMA");
}

TEST_CASE("verify: exit codes, determinism, output file") {
  CHECK(run("verify --suite simple-example --tau 0,1").code == 0);

  const Run tight = run("verify --suite functoriality --tol 1e-20");
  CHECK(tight.code == 1);
  for (const auto& rep : tight.json()) {
    CHECK(rep["pass"] == false);
    CHECK(rep["max_error"].get<double>() > 0.0);
  }

  const Run x = run("verify --suite all --tau 0.3,1.2 --seed 7");
  const Run y = run("verify --suite all --tau 0.3,1.2 --seed 7");
  CHECK(x.code == 0);
  CHECK(x.out == y.out);
  CHECK(run("verify --suite all --tau 0.3,1.2 --seed 8").out != x.out);

  const std::string path = (scratch() / "report.json").string();
  const Run f = run("verify --suite serre --out " + path);
  CHECK(f.code == 0);
  CHECK(f.out.empty());
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text == run("verify --suite serre").out);

  CHECK(run("verify --suite bogus").code == 2);
  CHECK(run("verify --seed -3").code == 2);
}
