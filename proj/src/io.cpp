#include "gmoe/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gmoe/error.hpp"
#include "gmoe/squeezer.hpp"

namespace gmoe {

namespace {

json complex_pair(cplx c) { return json::array({c.real(), c.imag()}); }

[[noreturn]] void bad_state(const std::string& what) { throw Error(ErrorKind::InvalidParameter, what); }

json read_json_file(std::string_view path) {
  std::ifstream in{std::string(path)};
  if (!in) bad_state("cannot open " + std::string(path));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad_state("malformed JSON in " + std::string(path) + ": " + e.what());
  }
}

double parse_double(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad_state("not a number: '" + std::string(text) + "'");
  return v;
}

std::size_t parse_index(std::string_view text) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) bad_state("not an index: '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

}  // namespace

json to_json(const FockState& s) {
  json arr = json::array();
  for (cplx c : s.amplitudes()) arr.push_back(complex_pair(c));
  return arr;
}

json to_json(const ProbabilityVector& p) {
  return json{{"probs", std::vector<double>(p.probs().begin(), p.probs().end())}, {"tail_mass", p.tail_mass()}};
}

json to_json(const DensityMatrix& rho) {
  json re = json::array();
  json im = json::array();
  const auto& m = rho.entries();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json rr = json::array();
    json ii = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ii.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ii));
  }
  return json{{"dim", rho.dim()}, {"real", std::move(re)}, {"imag", std::move(im)}};
}

json to_json(const MajorizationVerdict& v) {
  json j{{"holds", v.holds}, {"margin", v.margin}};
  j["first_violation"] = v.first_violation ? json(*v.first_violation) : json(nullptr);
  return j;
}

json to_json(const TransferReport& r) {
  return json{{"passed", r.passed()},
              {"stochastic", r.stochastic()},
              {"nonnegative", r.nonnegative},
              {"columns_ok", r.columns_ok},
              {"rows_ok", r.rows_ok},
              {"mapping_ok", r.mapping_ok},
              {"entropy_ok", r.entropy_ok},
              {"max_column_deficit", r.max_column_deficit},
              {"min_entry", r.min_entry},
              {"max_row_sum", r.max_row_sum},
              {"mapping_residual", r.mapping_residual},
              {"entropy_delta", r.entropy_delta}};
}

json to_json(const ProtocolTrace& t) {
  json outcomes = json::array();
  for (const ProtocolOutcome& o : t.outcomes) {
    outcomes.push_back(json{{"label", o.label},
                            {"probability", o.probability},
                            {"predicted_probability", o.predicted_probability},
                            {"fidelity", o.fidelity},
                            {"window_tail", o.window_tail},
                            {"full_fidelity", o.full_fidelity},
                            {"final_entropy", o.final_entropy}});
  }
  return json{{"protocol", t.protocol},
              {"deterministic", t.deterministic},
              {"bob_levels", t.bob_levels},
              {"completeness_residual", t.completeness_residual},
              {"completeness_bound", t.completeness_bound},
              {"probability_residual", t.probability_residual},
              {"probability_sum_residual", t.probability_sum_residual},
              {"tail_mass", t.tail_mass},
              {"shift_leak", t.shift_leak},
              {"initial_entropy", t.initial_entropy},
              {"max_final_entropy", t.max_final_entropy},
              {"outcomes", std::move(outcomes)}};
}

json to_json(const ScanReport& r) {
  json samples = json::array();
  for (const ScanSample& s : r.samples) {
    samples.push_back(json{{"index", s.index},
                           {"mean_photon", s.mean_photon},
                           {"mean_lowering_abs", s.mean_lowering_abs},
                           {"margin", s.margin},
                           {"holds", s.holds},
                           {"skipped", s.skipped},
                           {"inconclusive", s.inconclusive}});
  }
  json j{{"violations", r.violations},
         {"inconclusive", r.inconclusive},
         {"skipped", r.skipped},
         {"checked", r.checked},
         {"worst_margin", r.worst_margin}};
  j["worst_index"] = r.worst_index ? json(*r.worst_index) : json(nullptr);
  j["mean_photon_avg"] = r.mean_photon_avg;
  j["mean_lowering_abs_avg"] = r.mean_lowering_abs_avg;
  j["mean_lowering_abs_max"] = r.mean_lowering_abs_max;
  j["samples"] = std::move(samples);
  return j;
}

json to_json(const CrossingResult& c) {
  json j;
  j["found"] = c.r_star.has_value();
  j["r_star"] = c.r_star ? json(*c.r_star) : json(nullptr);
  j["bracket"] = json::array({c.bracket_lo, c.bracket_hi});
  j["f_lo"] = c.f_lo;
  j["f_hi"] = c.f_hi;
  j["evaluations"] = c.evaluations;
  return j;
}

json to_json(const SearchResult& s) {
  json history = json::array();
  for (const RestartRecord& r : s.per_restart_history) {
    history.push_back(json{{"index", r.index},
                           {"entropy", r.entropy},
                           {"objective", r.objective},
                           {"mean_photon", r.mean_photon},
                           {"mean_lowering_abs", r.mean_lowering_abs},
                           {"iterations", r.iterations},
                           {"converged", r.converged},
                           {"gradient_norm", r.gradient_norm}});
  }
  return json{{"best_entropy", s.best_entropy},
              {"vacuum_entropy", s.vacuum_entropy},
              {"vacuum_gap", s.vacuum_gap},
              {"best_state", to_json(s.best_state)},
              {"per_restart_history", std::move(history)}};
}

FockState fock_state_from_json(const json& j) {
  if (!j.is_array() || j.empty()) bad_state("state JSON must be a non-empty array");
  std::vector<cplx> amps;
  for (const json& e : j) {
    if (e.is_number()) {
      amps.emplace_back(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      amps.emplace_back(e[0].get<double>(), e[1].get<double>());
    } else {
      bad_state("state entries must be [re, im] pairs");
    }
  }
  return normalize(amps);
}

ProbabilityVector probability_from_json(const json& j) {
  try {
    if (j.is_array()) return ProbabilityVector(j.get<std::vector<double>>());
    if (j.is_object() && j.contains("probs")) {
      return ProbabilityVector(j.at("probs").get<std::vector<double>>(), j.value("tail_mass", 0.0));
    }
  } catch (const json::exception& e) {
    bad_state(std::string("malformed probability vector: ") + e.what());
  }
  bad_state("probability JSON must be an array or {\"probs\": [...]}");
}

DensityMatrix density_from_json(const json& j) {
  try {
    const auto re = j.at("real").get<std::vector<std::vector<double>>>();
    std::vector<std::vector<double>> im;
    if (j.contains("imag")) im = j.at("imag").get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(re.size());
    Eigen::MatrixXcd m(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      if (static_cast<Eigen::Index>(re[a].size()) != n) bad_state("density matrix must be square");
      for (Eigen::Index b = 0; b < n; ++b) {
        const double imag = im.empty() ? 0.0 : im.at(a).at(b);
        m(a, b) = {re[a][b], imag};
      }
    }
    return DensityMatrix(std::move(m));
  } catch (const json::exception& e) {
    bad_state(std::string("malformed density matrix: ") + e.what());
  } catch (const std::out_of_range&) {
    bad_state("imag part has the wrong shape");
  }
}

FockState parse_state_spec(std::string_view spec) {
  if (spec.starts_with("fock:")) return FockState::number(parse_index(spec.substr(5)));
  if (spec.starts_with("@")) return fock_state_from_json(read_json_file(spec.substr(1)));
  if (spec.starts_with("coeffs:")) {
    std::string_view body = spec.substr(7);
    if (body.size() < 2 || body.front() != '[' || body.back() != ']') bad_state("coeffs must look like [re,im;...]");
    body = body.substr(1, body.size() - 2);
    std::vector<cplx> amps;
    for (std::string_view entry : split(body, ';')) {
      const auto parts = split(entry, ',');
      if (parts.size() == 1) {
        amps.emplace_back(parse_double(parts[0]), 0.0);
      } else if (parts.size() == 2) {
        amps.emplace_back(parse_double(parts[0]), parse_double(parts[1]));
      } else {
        bad_state("each coefficient is re or re,im");
      }
    }
    return normalize(amps);
  }
  if (!spec.empty() && spec.front() == '[') {
    try {
      return fock_state_from_json(json::parse(spec));
    } catch (const json::exception&) {
    }
  }
  bad_state("unrecognized state spec '" + std::string(spec) + "'");
}

ProbabilityVector parse_probability_spec(std::string_view spec, double eps) {
  if (spec.starts_with("@")) return probability_from_json(read_json_file(spec.substr(1)));
  if (spec.starts_with("schmidt:")) {
    const auto parts = split(spec.substr(8), ':');
    if (parts.size() != 2) bad_state("schmidt spec is schmidt:k:lambda");
    return schmidt_vector(parse_index(parts[0]), parse_double(parts[1]), std::nullopt, eps);
  }
  std::vector<double> probs;
  for (std::string_view item : split(spec, ',')) probs.push_back(parse_double(item));
  return ProbabilityVector(std::move(probs));
}

}  // namespace gmoe
