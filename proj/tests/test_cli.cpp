#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <sstream>

#include "cli.hpp"

using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = gmoe::cli::dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("decompose") {
  const Run ok = run({"decompose", "--tau", "2", "--n", "1"});
  CHECK(ok.code == 0);
  const json j = json::parse(ok.out);
  CHECK(j["schema"] == 1);
  CHECK(j["T"].get<double>() == doctest::Approx(1.0));
  CHECK(j["G"].get<double>() == doctest::Approx(2.0));
  CHECK(j["r"].get<double>() == doctest::Approx(std::acosh(std::sqrt(2.0))));
  CHECK(j["manifest"]["command_line"] == "gmoe decompose --tau 2 --n 1");
  CHECK(ok.err.find("wall_clock_seconds") != std::string::npos);

  const Run bad = run({"decompose", "--tau", "0.5", "--n", "0.2"});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("completely positive") != std::string::npos);
}

TEST_CASE("usage errors") {
  const Run unknown = run({"frobnicate"});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 1);
  CHECK(run({"schmidt", "--k", "1"}).code == 1);
  CHECK(run({"schmidt", "--k", "1", "--lambda", "1.5"}).code == 1);
  CHECK(run({"decompose", "--tau", "1", "--n", "0", "--format", "csv"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("matrix verification") {
  const Run d = run({"matrix", "--family", "D", "--lambda", "0.5", "--verify", "--k", "0"});
  CHECK(d.code == 0);
  CHECK(d.out.find("n,m,value") != std::string::npos);
  const auto start = d.err.find('{');
  const auto stop = d.err.find("\nmanifest:");
  const json report = json::parse(d.err.substr(start, stop - start));
  CHECK(report["verification"]["passed"] == true);

  const Run r = run({"matrix", "--family", "R", "--k", "1", "--lambda", "0.5", "--lambda-prime", "0.45", "--verify"});
  CHECK(r.code == 2);
}

TEST_CASE("schmidt and entropy") {
  const Run s = run({"schmidt", "--k", "1", "--lambda", "0.5"});
  CHECK(s.code == 0);
  const json j = json::parse(s.out);
  CHECK(j["probs"][0].get<double>() == doctest::Approx(0.5625));
  CHECK(j["tail_mass"].get<double>() < 1e-12);

  const Run csv = run({"schmidt", "--k", "0", "--lambda", "0.5", "--format", "csv", "--nmax", "2"});
  CHECK(csv.code == 0);
  CHECK(csv.out.find("n,p\n0,0.75\n1,0.1875\n2,0.046875\n") != std::string::npos);

  const Run e = run({"entropy", "--state", "fock:0", "--r", "0"});
  CHECK(e.code == 0);
  CHECK(json::parse(e.out)["value"].get<double>() == 0.0);
  const Run trunc = run({"entropy", "--state", "fock:2", "--r", "1.0", "--nmax", "4"});
  CHECK(trunc.code == 3);
  CHECK(run({"entropy", "--state", "coeffs:[0;0]", "--r", "1"}).code == 1);
}

TEST_CASE("majorize") {
  const Run a = run({"majorize", "--p", "schmidt:0:0.5", "--q", "schmidt:1:0.5"});
  CHECK(a.code == 0);
  CHECK(json::parse(a.out)["holds"] == true);
  const Run b = run({"majorize", "--p", "0.6,0.2,0.2", "--q", "0.5,0.5"});
  CHECK(json::parse(b.out)["holds"] == false);
  CHECK(run({"majorize", "--p", "0.6,0.2", "--q", "0.5,0.5"}).code == 1);
  CHECK(run({"majorize", "--p", "schmidt:0:0.9", "--q", "0.5,0.5", "--eps", "1e-3"}).code == 3);
}

TEST_CASE("locc") {
  const Run r = run({"locc", "reduce", "--k", "1", "--dk", "2", "--lambda", "0.6"});
  CHECK(r.code == 0);
  CHECK(json::parse(r.out)["deterministic"] == true);
  const Run a = run({"locc", "attenuate", "--k", "2", "--lambda", "0.6", "--lambda-prime", "0.3"});
  CHECK(a.code == 0);
  CHECK(json::parse(a.out)["protocol"] == "bs_attenuate");
  CHECK(run({"locc"}).code == 1);
}

TEST_CASE("scans are byte-identical across runs and thread counts") {
  const Run a = run({"scan", "random", "--dim", "6", "--count", "20", "--r", "0.8", "--seed", "5"});
  const Run b = run({"scan", "random", "--dim", "6", "--count", "20", "--r", "0.8", "--seed", "5"});
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  const json ja = json::parse(a.out);
  const Run c = run({"scan", "random", "--dim", "6", "--count", "20", "--r", "0.8", "--seed", "5", "--threads", "3"});
  json jc = json::parse(c.out);
  jc.erase("manifest");
  json ja2 = ja;
  ja2.erase("manifest");
  CHECK(ja2 == jc);
  CHECK(ja["violations"] == 0);

  const Run f = run({"scan", "fock", "--kmax", "3", "--rmin", "0", "--rmax", "1.0", "--steps", "5"});
  CHECK(f.code == 0);
  CHECK(f.out.find("r,k,entanglement,tail_bound") != std::string::npos);
  CHECK(f.out.find("# monotone_in_r: true") != std::string::npos);
}

TEST_CASE("crossing and minimize") {
  const Run c = run({"crossing", "--a", "coeffs:[0;0.6324555320336759;0.7745966692414834]", "--b", "fock:1", "--lo",
                     "0.3", "--hi", "1.2", "--tol", "1e-6"});
  CHECK(c.code == 0);
  const double r = json::parse(c.out)["r_star"].get<double>();
  CHECK(r > 0.70);
  CHECK(r < 0.80);

  const Run m = run({"minimize", "--dim", "3", "--r", "0.5", "--restarts", "2", "--seed", "1", "--penalty", "1"});
  CHECK(m.code == 0);
  const json j = json::parse(m.out);
  CHECK(j["per_restart_history"].size() == 2);
  CHECK(j["vacuum_gap"].get<double>() >= -1e-6);
}

TEST_CASE("precision flag") {
  const Run p = run({"decompose", "--tau", "2", "--n", "1", "--precision", "4"});
  CHECK(json::parse(p.out)["r"].get<double>() == 0.8814);
}
