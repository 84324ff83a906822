#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gmoe/channel.hpp"
#include "gmoe/error.hpp"
#include "gmoe/explore.hpp"
#include "gmoe/io.hpp"
#include "gmoe/locc.hpp"
#include "gmoe/majorization.hpp"
#include "gmoe/squeezer.hpp"

namespace gmoe::cli {

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { kOk = 0, kUsage = 1, kVerify = 2, kInconclusive = 3 };

struct Globals {
  std::optional<std::size_t> nmax;
  double eps = kDefaultEps;
  double eta = kDefaultEta;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::string format = "auto";
  int precision = 17;
  std::string manifest_path;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Rounds every number to `digits` significant digits; 17 keeps full precision.
void round_numbers(json& j, int digits) {
  if (digits >= 17) return;
  if (j.is_number_float()) {
    std::ostringstream os;
    os << std::setprecision(digits) << j.get<double>();
    j = std::stod(os.str());
  } else if (j.is_structured()) {
    for (auto& v : j) round_numbers(v, digits);
  }
}

struct Runner {
  const std::vector<std::string>& args;
  std::ostream& out;
  std::ostream& err;
  Globals g;
  std::string command;

  json manifest() const {
    std::string line = "gmoe";
    for (const auto& a : args) line += " " + a;
    json m{{"tool", "gmoe"}, {"version", kVersion}, {"command_line", line}, {"seed", g.seed}, {"eps", g.eps},
           {"eta", g.eta}};
    m["nmax"] = g.nmax ? json(*g.nmax) : json(nullptr);
    m["precision"] = g.precision;
    return m;
  }

  std::string format_or(const char* fallback) const { return g.format == "auto" ? fallback : g.format; }

  void emit_json(json body) const {
    json doc{{"schema", 1}, {"command", command}};
    for (auto& [k, v] : body.items()) doc[k] = v;
    doc["manifest"] = manifest();
    round_numbers(doc, g.precision);
    out << doc.dump(2) << '\n';
  }

  void emit_csv_header(const std::string& columns) const {
    out << "# schema: 1\n# command: " << command << '\n';
    const json m = manifest();
    for (const auto& [k, v] : m.items()) out << "# " << k << ": " << v.dump() << '\n';
    out << columns << '\n';
  }

  std::ostream& num(std::ostream& os) const { return os << std::setprecision(g.precision); }

  void require_format(const std::string& fmt, std::initializer_list<const char*> allowed) const {
    for (const char* a : allowed) {
      if (fmt == a) return;
    }
    throw UsageError("--format " + fmt + " is not supported by '" + command + "'");
  }
};

double squeeze_lambda(const std::optional<double>& lambda, const std::optional<double>& r) {
  if (lambda && r) throw UsageError("give either --lambda or --r, not both");
  if (lambda) return SqueezeParam::from_lambda(*lambda).lambda();
  if (r) return SqueezeParam::from_r(*r).lambda();
  throw UsageError("one of --lambda or --r is required");
}

std::vector<double> linspace(double lo, double hi, std::size_t steps) {
  if (steps < 1) throw UsageError("--steps must be >= 1");
  std::vector<double> v(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    v[i] = i == steps ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps);
  }
  return v;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  Runner run{args, out, err, {}, {}};
  Globals& g = run.g;

  CLI::App app{"Fock-space toolkit for Gaussian channel output entropy and majorization", "gmoe"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--nmax", g.nmax, "Largest Fock level kept (default: chosen from --eps)");
  app.add_option("--eps", g.eps, "Truncation tail tolerance")->check(CLI::PositiveNumber);
  app.add_option("--eta", g.eta, "Majorization tolerance")->check(CLI::NonNegativeNumber);
  app.add_option("--seed", g.seed, "Base RNG seed");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"auto", "json", "csv"}));
  app.add_option("--precision", g.precision, "Significant digits")->check(CLI::Range(1, 17));
  app.add_option("--manifest", g.manifest_path, "Write the run manifest (with timing) here instead of stderr");

  std::function<int()> action;
  auto bind = [&](CLI::App* sub, std::string name, std::function<int()> fn) {
    sub->callback([&run, &action, name = std::move(name), fn = std::move(fn)] {
      run.command = name;
      action = fn;
    });
  };

  // decompose
  double tau = 1.0;
  double noise = 0.0;
  auto* decompose_cmd = app.add_subcommand("decompose", "Split a phase-insensitive channel into loss and amplifier");
  decompose_cmd->add_option("--tau", tau, "Gain/transmissivity factor")->required();
  decompose_cmd->add_option("--n", noise, "Added noise")->required();
  bind(decompose_cmd, "decompose", [&] {
    run.require_format(run.format_or("json"), {"json"});
    const ChannelDecomposition d = decompose({tau, noise});
    run.emit_json(json{{"T", d.transmissivity}, {"G", d.gain}, {"r", d.squeeze}, {"cp_margin", d.cp_margin}});
    return kOk;
  });

  // channel
  std::string state_spec = "fock:0";
  std::size_t out_dim = 0;
  bool dump_rho = false;
  auto* channel_cmd = app.add_subcommand("channel", "Apply a channel to a pure Fock-space input");
  channel_cmd->add_option("--tau", tau)->required();
  channel_cmd->add_option("--n", noise)->required();
  channel_cmd->add_option("--state", state_spec, "fock:k | coeffs:[re,im;...] | @file.json");
  channel_cmd->add_option("--out-dim", out_dim, "Output dimension (default: automatic)");
  channel_cmd->add_flag("--dump", dump_rho, "Include the output density matrix");
  bind(channel_cmd, "channel", [&] {
    run.require_format(run.format_or("json"), {"json"});
    const FockState phi = parse_state_spec(state_spec);
    const ChannelParams params{tau, noise};
    const DensityMatrix rho = apply_channel(DensityMatrix::pure(phi), params, out_dim, g.eps);
    const EntropyValue s = entropy(spectrum(rho));
    json body{{"entropy", s.value},
              {"tail_bound", s.tail_bound},
              {"trace", rho.trace()},
              {"vacuum_output_entropy", vacuum_output_entropy(params)},
              {"out_dim", rho.dim()}};
    if (dump_rho) body["density"] = to_json(rho);
    run.emit_json(std::move(body));
    return kOk;
  });

  // schmidt
  std::size_t k = 0;
  std::optional<double> lambda_opt;
  std::optional<double> r_opt;
  auto* schmidt_cmd = app.add_subcommand("schmidt", "Schmidt coefficients of the squeezed number state");
  schmidt_cmd->add_option("--k", k, "Input photon number");
  schmidt_cmd->add_option("--lambda", lambda_opt, "tanh r");
  schmidt_cmd->add_option("--r", r_opt, "Squeezing parameter");
  bind(schmidt_cmd, "schmidt", [&] {
    const double lambda = squeeze_lambda(lambda_opt, r_opt);
    const ProbabilityVector p = schmidt_vector(k, lambda, g.nmax, g.eps);
    const std::string fmt = run.format_or("json");
    run.require_format(fmt, {"json", "csv"});
    if (fmt == "csv") {
      run.emit_csv_header("n,p");
      for (std::size_t n = 0; n < p.size(); ++n) run.num(out) << n << ',' << p[n] << '\n';
      run.num(out) << "# tail_mass: " << p.tail_mass() << '\n';
    } else {
      json body = to_json(p);
      body["k"] = k;
      body["lambda"] = lambda;
      body["nmax"] = p.size() - 1;
      run.emit_json(std::move(body));
    }
    return kOk;
  });

  // entropy
  bool bits = false;
  double r = 0.0;
  auto* entropy_cmd = app.add_subcommand("entropy", "Output entanglement of the squeezer for a pure input");
  entropy_cmd->add_option("--state", state_spec, "fock:k | coeffs:[re,im;...] | @file.json")->required();
  entropy_cmd->add_option("--r", r, "Squeezing parameter")->required();
  entropy_cmd->add_flag("--bits", bits, "Report in bits");
  bind(entropy_cmd, "entropy", [&] {
    run.require_format(run.format_or("json"), {"json"});
    const FockState phi = parse_state_spec(state_spec);
    std::optional<std::size_t> b_dim;
    if (g.nmax) b_dim = *g.nmax + 1;
    const BipartiteAmplitudeMatrix m = output_state(phi, r, b_dim, g.eps);
    const EntropyValue e = entropy(schmidt_spectrum(m), bits ? EntropyUnit::Bits : EntropyUnit::Nats);
    run.emit_json(json{{"value", e.value},
                       {"tail_bound", e.tail_bound},
                       {"unit", bits ? "bits" : "nats"},
                       {"b_dim", m.b_dim()}});
    return kOk;
  });

  // majorize
  std::string p_spec;
  std::string q_spec;
  auto* majorize_cmd = app.add_subcommand("majorize", "Test p majorizes q by prefix sums");
  majorize_cmd->add_option("--p", p_spec, "p0,p1,... | schmidt:k:lambda | @file.json")->required();
  majorize_cmd->add_option("--q", q_spec, "p0,p1,... | schmidt:k:lambda | @file.json")->required();
  bind(majorize_cmd, "majorize", [&] {
    run.require_format(run.format_or("json"), {"json"});
    const MajorizationVerdict v =
        majorizes(parse_probability_spec(p_spec, g.eps), parse_probability_spec(q_spec, g.eps), g.eta);
    json body = to_json(v);
    body["eta"] = g.eta;
    run.emit_json(std::move(body));
    return kOk;
  });

  // matrix
  std::string family = "D";
  int dk = 1;
  double lambda = 0.5;
  double lambda_prime = 0.0;
  bool verify = false;
  std::string report_path;
  auto* matrix_cmd = app.add_subcommand("matrix", "Dump a transfer matrix (CSV) with an optional check");
  matrix_cmd->add_option("--family", family, "D, Dk or R")->check(CLI::IsMember({"D", "Dk", "R"}));
  matrix_cmd->add_option("--k", k, "Photon number of the source vector");
  matrix_cmd->add_option("--dk", dk, "Photon step for Dk")->check(CLI::PositiveNumber);
  matrix_cmd->add_option("--lambda", lambda)->required();
  matrix_cmd->add_option("--lambda-prime", lambda_prime);
  matrix_cmd->add_flag("--verify", verify, "Run the stochasticity and mapping check");
  matrix_cmd->add_option("--report", report_path, "Write the JSON report here instead of stderr");
  bind(matrix_cmd, "matrix", [&] {
    run.require_format(run.format_or("csv"), {"csv"});
    const int step = family == "D" ? 1 : dk;
    TransferMatrix m;
    ProbabilityVector p_in;
    ProbabilityVector p_out;
    if (family == "R") {
      const std::size_t n = g.nmax.value_or(auto_truncation(k, lambda, g.eps));
      m = build_R(static_cast<int>(k), lambda, lambda_prime, n);
      p_in = schmidt_vector(k, lambda_prime, n);
      p_out = schmidt_vector(k, lambda, n);
    } else {
      const std::size_t n = g.nmax.value_or(auto_truncation(k + static_cast<std::size_t>(step), lambda, g.eps));
      m = build_D(step, lambda, n);
      p_in = schmidt_vector(k, lambda, n);
      p_out = schmidt_vector(k + static_cast<std::size_t>(step), lambda, n);
    }
    run.emit_csv_header("n,m,value");
    for (Eigen::Index c = 0; c < m.size(); ++c) {
      for (Eigen::Index row = c; row < m.size(); ++row) run.num(out) << row << ',' << c << ',' << m.entries(row, c) << '\n';
    }
    int code = kOk;
    json report{{"schema", 1}, {"family", family}, {"size", m.size()}, {"column_tail", m.column_tail}};
    if (verify) {
      const TransferReport rep = verify_transfer(m, p_in, p_out);
      report["verification"] = to_json(rep);
      if (!rep.passed()) code = kVerify;
    }
    round_numbers(report, g.precision);
    if (report_path.empty()) {
      err << report.dump(2) << '\n';
    } else {
      std::ofstream f(report_path);
      if (!f) throw UsageError("cannot write " + report_path);
      f << report.dump(2) << '\n';
    }
    return code;
  });

  // locc
  auto* locc_cmd = app.add_subcommand("locc", "Run a deterministic LOCC protocol");
  locc_cmd->require_subcommand(1);
  auto* reduce_cmd = locc_cmd->add_subcommand("reduce", "Lower the input photon number by dk");
  reduce_cmd->add_option("--k", k)->required();
  reduce_cmd->add_option("--dk", dk)->required()->check(CLI::NonNegativeNumber);
  reduce_cmd->add_option("--lambda", lambda)->required();
  auto* attenuate_cmd = locc_cmd->add_subcommand("attenuate", "Lower the squeezing from lambda to lambda'");
  attenuate_cmd->add_option("--k", k)->required();
  attenuate_cmd->add_option("--lambda", lambda)->required();
  attenuate_cmd->add_option("--lambda-prime", lambda_prime)->required();
  auto emit_trace = [&](const ProtocolTrace& t) {
    run.require_format(run.format_or("json"), {"json"});
    run.emit_json(to_json(t));
    return t.deterministic ? kOk : kVerify;
  };
  bind(reduce_cmd, "locc reduce",
       [&] { return emit_trace(povm_reduce(static_cast<int>(k), dk, lambda, g.nmax, g.eps)); });
  bind(attenuate_cmd, "locc attenuate",
       [&] { return emit_trace(bs_attenuate(static_cast<int>(k), lambda, lambda_prime, g.nmax, g.eps)); });

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "Parameter sweeps");
  scan_cmd->require_subcommand(1);
  std::size_t k_max = 5;
  double r_min = 0.0;
  double r_max = 1.5;
  std::size_t steps = 30;
  auto* fock_cmd = scan_cmd->add_subcommand("fock", "Entanglement of squeezed number states on an (r, k) grid");
  fock_cmd->add_option("--kmax", k_max);
  fock_cmd->add_option("--rmin", r_min)->check(CLI::NonNegativeNumber);
  fock_cmd->add_option("--rmax", r_max)->check(CLI::NonNegativeNumber);
  fock_cmd->add_option("--steps", steps, "Number of r intervals");
  bind(fock_cmd, "scan fock", [&] {
    if (r_max < r_min) throw UsageError("--rmax must be >= --rmin");
    const FockScanTable t = fock_scan(k_max, linspace(r_min, r_max, steps), g.eps, 1e-10, g.threads);
    const std::string fmt = run.format_or("csv");
    run.require_format(fmt, {"csv", "json"});
    if (fmt == "csv") {
      run.emit_csv_header("r,k,entanglement,tail_bound");
      for (const FockScanRow& row : t.rows) {
        run.num(out) << row.r << ',' << row.k << ',' << row.entanglement << ',' << row.tail_bound << '\n';
      }
      out << "# monotone_in_r: " << (t.monotone_in_r ? "true" : "false") << '\n';
      out << "# monotone_in_k: " << (t.monotone_in_k ? "true" : "false") << '\n';
    } else {
      json rows = json::array();
      for (const FockScanRow& row : t.rows) {
        rows.push_back(json{{"r", row.r}, {"k", row.k}, {"entanglement", row.entanglement}, {"tail_bound", row.tail_bound}});
      }
      run.emit_json(json{{"monotone_in_r", t.monotone_in_r},
                         {"monotone_in_k", t.monotone_in_k},
                         {"min_step_r", t.min_step_r},
                         {"min_step_k", t.min_step_k},
                         {"rows", std::move(rows)}});
    }
    return t.monotone_in_r && t.monotone_in_k ? kOk : kVerify;
  });

  ScanConfig scan;
  bool zero_mean = false;
  std::string zero_mean_mode;
  bool with_samples = false;
  auto* random_cmd = scan_cmd->add_subcommand("random", "Seeded majorization scan over random superpositions");
  random_cmd->add_option("--dim", scan.dim);
  random_cmd->add_option("--count", scan.count);
  random_cmd->add_option("--r", scan.r);
  random_cmd->add_option("--r-grid", scan.r_grid, "Ascending r values; switches to the chain test")->delimiter(',');
  random_cmd->add_flag("--zero-mean", zero_mean, "Keep only samples with |<a>| <= --mean-tol");
  random_cmd->add_option("--zero-mean-mode", zero_mean_mode, "off, filter or penalty")
      ->check(CLI::IsMember({"off", "filter", "penalty"}));
  random_cmd->add_option("--mean-tol", scan.mean_tol);
  random_cmd->add_flag("--samples", with_samples, "Include per-sample records");
  bind(random_cmd, "scan random", [&] {
    const std::string fmt = run.format_or("json");
    run.require_format(fmt, {"json", "csv"});
    scan.seed = g.seed;
    scan.eta = g.eta;
    scan.eps = g.eps;
    scan.threads = g.threads;
    scan.mode = scan.r_grid.empty() ? ScanMode::Vacuum : ScanMode::RChain;
    scan.zero_mean_mode = zero_mean ? ZeroMeanMode::Filter : ZeroMeanMode::Off;
    if (zero_mean_mode == "filter") scan.zero_mean_mode = ZeroMeanMode::Filter;
    if (zero_mean_mode == "penalty") scan.zero_mean_mode = ZeroMeanMode::Penalty;
    if (zero_mean_mode == "off") scan.zero_mean_mode = ZeroMeanMode::Off;
    const ScanReport rep = random_majorization_scan(scan);
    if (fmt == "csv") {
      run.emit_csv_header("index,mean_photon,mean_lowering_abs,margin,holds,skipped,inconclusive");
      for (const ScanSample& s : rep.samples) {
        run.num(out) << s.index << ',' << s.mean_photon << ',' << s.mean_lowering_abs << ',' << s.margin << ','
                     << s.holds << ',' << s.skipped << ',' << s.inconclusive << '\n';
      }
    } else {
      json body = to_json(rep);
      if (!with_samples) body.erase("samples");
      body["config"] = json{{"dim", scan.dim},
                            {"count", scan.count},
                            {"r", scan.r},
                            {"r_grid", scan.r_grid},
                            {"mode", scan.mode == ScanMode::Vacuum ? "vacuum" : "r-chain"},
                            {"zero_mean_mode", scan.zero_mean_mode == ZeroMeanMode::Off      ? "off"
                                               : scan.zero_mean_mode == ZeroMeanMode::Filter ? "filter"
                                                                                             : "penalty"},
                            {"mean_tol", scan.mean_tol}};
      run.emit_json(std::move(body));
    }
    if (rep.violations > 0) return kVerify;
    if (rep.inconclusive > 0) return kInconclusive;
    return kOk;
  });

  // crossing
  std::string a_spec;
  std::string b_spec;
  double lo = 0.0;
  double hi = 1.5;
  double tol = 1e-6;
  std::size_t points = 32;
  auto* crossing_cmd = app.add_subcommand("crossing", "Find r where two inputs swap entanglement order");
  crossing_cmd->add_option("--a", a_spec)->required();
  crossing_cmd->add_option("--b", b_spec)->required();
  crossing_cmd->add_option("--lo", lo);
  crossing_cmd->add_option("--hi", hi);
  crossing_cmd->add_option("--tol", tol)->check(CLI::PositiveNumber);
  crossing_cmd->add_option("--points", points, "Coarse scan points");
  bind(crossing_cmd, "crossing", [&] {
    run.require_format(run.format_or("json"), {"json"});
    const CrossingResult c = crossing_finder(parse_state_spec(a_spec), parse_state_spec(b_spec), lo, hi, tol, points, g.eps);
    run.emit_json(to_json(c));
    return kOk;
  });

  // minimize
  std::size_t dim = 8;
  double min_r = 0.8;
  std::size_t restarts = 32;
  double penalty = 0.0;
  MinimizeOptions mopt;
  auto* minimize_cmd = app.add_subcommand("minimize", "Multi-start search for the least entangled output");
  minimize_cmd->add_option("--dim", dim);
  minimize_cmd->add_option("--r", min_r);
  minimize_cmd->add_option("--restarts", restarts);
  minimize_cmd->add_option("--penalty", penalty, "Weight of the |<a>|^2 penalty");
  minimize_cmd->add_option("--max-iter", mopt.max_iterations);
  bind(minimize_cmd, "minimize", [&] {
    run.require_format(run.format_or("json"), {"json"});
    mopt.eps = g.eps;
    mopt.threads = g.threads;
    const SearchResult s = minimize_entropy(dim, min_r, restarts, g.seed, penalty, mopt);
    run.emit_json(to_json(s));
    return kOk;
  });

  std::vector<const char*> argv{"gmoe"};
  for (const auto& a : args) argv.push_back(a.c_str());

  int code = kOk;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsage;
  }

  try {
    code = action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const TruncationError& e) {
    err << "error: " << e.what() << " (required dimension " << e.required_dim() << ")\n";
    return kInconclusive;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::InconclusiveTruncation:
      case ErrorKind::TruncationError:
        return kInconclusive;
      case ErrorKind::ProtocolInconsistent:
        return kVerify;
      default:
        return kUsage;
    }
  }

  json full = run.manifest();
  full["command"] = run.command;
  full["exit_code"] = code;
  full["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (g.manifest_path.empty()) {
    err << "manifest: " << full.dump() << '\n';
  } else {
    std::ofstream f(g.manifest_path);
    f << full.dump(2) << '\n';
  }
  return code;
}

}  // namespace gmoe::cli
