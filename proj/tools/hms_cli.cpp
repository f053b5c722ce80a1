// hms: JSON front end for the mirror functor on elliptic curves.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "hms/commands.hpp"
#include "hms/error.hpp"
#include "hms/io.hpp"
#include "hms/mirror.hpp"

using namespace hms;
using io::Json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

cplx parse_pair(const std::string& text, const char* what) {
  std::istringstream is(text);
  double re = 0, im = 0;
  char comma = 0;
  if (!(is >> re >> comma >> im) || comma != ',' || !(is >> std::ws).eof())
    throw UsageError(std::string(what) + " must look like re,im (got '" + text + "')");
  return {re, im};
}

Rational parse_rational(const std::string& text) {
  std::istringstream is(text);
  std::int64_t n = 0, d = 1;
  if (!(is >> n)) throw UsageError("characteristic must look like p or p/q (got '" + text + "')");
  if (is.peek() == '/') {
    is.get();
    if (!(is >> d) || d == 0) throw UsageError("bad denominator in '" + text + "'");
  }
  if (!(is >> std::ws).eof()) throw UsageError("characteristic must look like p or p/q (got '" + text + "')");
  return Rational(n, d);
}

TorusModulus modulus(const std::string& text) {
  const cplx t = parse_pair(text, "--tau");
  return TorusModulus::make(t.real(), t.imag());
}

// --tol beats HMS_TOL beats the built-in default.
std::optional<double> tolerance_override(const std::optional<double>& flag) {
  if (flag) return flag;
  const char* env = std::getenv("HMS_TOL");
  if (!env || !*env) return std::nullopt;
  char* end = nullptr;
  const double v = std::strtod(env, &end);
  if (*end != '\0' || !(v > 0.0)) throw UsageError(std::string("HMS_TOL must be a positive number (got '") + env + "')");
  return v;
}

Json read_doc(const std::string& path) {
  std::stringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read '" + path + "'");
    buf << in.rdbuf();
  }
  return io::parse(buf.str());
}

// ---- theta -----------------------------------------------------------------

struct ThetaArgs {
  std::string tau, z, characteristic = "0";
  std::string delta = "0";
  double beta = 0.0;
  int level = 1, freq = 1, deriv = 0;
  std::optional<double> tol;
};

Json cmd_theta(const ThetaArgs& a) {
  const TorusModulus t = modulus(a.tau);
  const cplx z = parse_pair(a.z, "--z");
  const double tol = tolerance_override(a.tol).value_or(kDefaultTol);
  const ThetaParams p = ThetaParams::make(parse_rational(a.characteristic), Translation{parse_rational(a.delta), a.beta},
                                          a.level, a.freq);
  if (a.deriv < 0) throw UsageError("--deriv must be non-negative");
  const SeriesValue v = theta_series(p, t, z, a.deriv, tol);
  return Json{{"value", io::to_json(v.value)}, {"truncation_M", v.truncation}, {"tol", tol}};
}

void emit(const Json& j, const std::string& out) {
  const std::string text = io::dump(j);
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out);
  if (!f) throw UsageError("cannot write '" + out + "'");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mirror symmetry for elliptic curves: theta functions, Fukaya compositions, the mirror functor."};
  app.require_subcommand(1);
  app.fallthrough();
  std::string out;
  app.add_option("--out", out, "Write JSON here instead of stdout");

  ThetaArgs ta;
  auto* theta = app.add_subcommand("theta", "Evaluate theta[a, delta tau + beta](level tau, freq z)");
  theta->add_option("--tau", ta.tau, "Modulus re,im")->required();
  theta->add_option("--z", ta.z, "Point re,im")->required();
  theta->add_option("--char", ta.characteristic, "Characteristic p or p/q");
  theta->add_option("--delta", ta.delta, "Rational part of the translation, p or p/q");
  theta->add_option("--beta", ta.beta, "Real part of the translation");
  theta->add_option("--level", ta.level, "Level L in theta(L tau, .)")->check(CLI::PositiveNumber);
  theta->add_option("--freq", ta.freq, "Frequency f in theta(., f z)")->check(CLI::PositiveNumber);
  theta->add_option("--deriv", ta.deriv, "Order of D = -(1/2 pi i) d/dz")->check(CLI::NonNegativeNumber);
  theta->add_option("--tol", ta.tol, "Tail tolerance")->check(CLI::PositiveNumber);

  std::string side, first, second, tau = "0,1";
  std::optional<double> tol;
  auto* comp = app.add_subcommand("compose", "Compose two morphism documents (second after first)");
  comp->add_option("--side", side, "a or b")->required()->check(CLI::IsMember({"a", "b"}));
  comp->add_option("first", first, "First morphism (path or -)")->required();
  comp->add_option("second", second, "Second morphism (path or -)")->required();
  comp->add_option("--tau", tau, "Modulus re,im");
  comp->add_option("--tol", tol, "Series / expansion tolerance")->check(CLI::PositiveNumber);

  std::string doc;
  auto* mir = app.add_subcommand("mirror", "Image of a B-side object or morphism document");
  mir->add_option("doc", doc, "Document (path or -)")->required();
  mir->add_option("--tau", tau, "Modulus re,im");

  int degree = 0;
  auto* hom = app.add_subcommand("hom", "Dimension (and basis where explicit) of Hom(X, Y[degree])");
  hom->add_option("source", first, "Source object (path or -)")->required();
  hom->add_option("target", second, "Target object (path or -)")->required();
  hom->add_option("--degree", degree, "0 or 1");

  std::string suite = "all";
  std::uint64_t seed = 1;
  auto* ver = app.add_subcommand("verify", "Run verification suites; exit 0 iff all pass");
  std::vector<std::string> suites = suite_names();
  suites.push_back("all");
  ver->add_option("--suite", suite, "Suite name")->check(CLI::IsMember(suites));
  ver->add_option("--tau", tau, "Modulus re,im");
  ver->add_option("--seed", seed, "Seed for the random cases");
  ver->add_option("--tol", tol, "Override every suite's threshold")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    int code = kExitOk;
    Json result;
    if (*theta) {
      result = cmd_theta(ta);
    } else if (*comp) {
      const TorusModulus t = modulus(tau);
      const double tl = tolerance_override(tol).value_or(kDefaultTol);
      result = io::compose_docs(side, read_doc(first), read_doc(second), t, tl);
    } else if (*mir) {
      result = io::mirror_doc(read_doc(doc), modulus(tau));
    } else if (*hom) {
      result = io::hom_doc(read_doc(first), read_doc(second), degree);
    } else if (*ver) {
      VerifyOptions opts;
      opts.tau = modulus(tau);
      opts.seed = seed;
      opts.tol = tolerance_override(tol);
      const auto reports = run_suite(suite, opts);
      for (const auto& r : reports)
        if (!r.pass) code = kExitFailure;
      result = io::to_json(reports);
    }
    emit(result, out);
    return code;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    try {
      emit(io::error_doc(e.code(), e.what()), out);
    } catch (const UsageError& u) {
      std::cerr << "usage error: " << u.what() << '\n';
      return kExitUsage;
    }
    return kExitFailure;
  }
}
