#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gmoe/channel.hpp"
#include "gmoe/error.hpp"
#include "gmoe/explore.hpp"
#include "gmoe/io.hpp"
#include "gmoe/locc.hpp"
#include "gmoe/majorization.hpp"
#include "gmoe/squeezer.hpp"

namespace py = pybind11;
using namespace gmoe;

namespace {

py::object to_py(const json& j) {
  switch (j.type()) {
    case json::value_t::null:
      return py::none();
    case json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case json::value_t::number_integer:
      return py::int_(j.get<std::int64_t>());
    case json::value_t::number_unsigned:
      return py::int_(j.get<std::uint64_t>());
    case json::value_t::number_float:
      return py::float_(j.get<double>());
    case json::value_t::string:
      return py::str(j.get<std::string>());
    case json::value_t::array: {
      py::list out;
      for (const json& e : j) out.append(to_py(e));
      return out;
    }
    default: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_py(v);
      return out;
    }
  }
}

FockState state_from(const std::vector<cplx>& amps) { return normalize(amps); }

}  // namespace

PYBIND11_MODULE(_core, m) {
  static py::handle error = py::exception<Error>(m, "GmoeError").release();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = error(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(error.ptr(), exc.ptr());
    }
  });

  m.def("decompose", [](double tau, double noise) {
    const ChannelDecomposition d = decompose({tau, noise});
    py::dict out;
    out["transmissivity"] = d.transmissivity;
    out["gain"] = d.gain;
    out["squeeze"] = d.squeeze;
    out["cp_margin"] = d.cp_margin;
    return out;
  }, py::arg("tau"), py::arg("noise"));

  m.def("schmidt_coefficient", &schmidt_coefficient, py::arg("k"), py::arg("lam"), py::arg("n"));
  m.def("schmidt_vector", [](std::size_t k, double lam, std::optional<std::size_t> N, double eps) {
    const ProbabilityVector p = schmidt_vector(k, lam, N, eps);
    return py::make_tuple(std::vector<double>(p.probs().begin(), p.probs().end()), p.tail_mass());
  }, py::arg("k"), py::arg("lam"), py::arg("N") = std::nullopt, py::arg("eps") = kDefaultEps);
  m.def("auto_truncation", &auto_truncation, py::arg("k"), py::arg("lam"), py::arg("eps") = kDefaultEps);

  m.def("output_entanglement", [](const std::vector<cplx>& amps, double r, double eps) {
    return output_entanglement(state_from(amps), r, std::nullopt, eps).value;
  }, py::arg("amplitudes"), py::arg("r"), py::arg("eps") = kDefaultEps);
  m.def("tmsv_entropy", &tmsv_entropy, py::arg("r"));

  m.def("majorizes", [](const std::vector<double>& p, const std::vector<double>& q, double eta) {
    return to_py(to_json(majorizes(ProbabilityVector(p), ProbabilityVector(q), eta)));
  }, py::arg("p"), py::arg("q"), py::arg("eta") = kDefaultEta);

  m.def("build_D", [](int dk, double lam, std::size_t N) { return build_D(dk, lam, N).entries; },
        py::arg("delta_k"), py::arg("lam"), py::arg("N"));
  m.def("build_R", [](int k, double lam, double lam_prime, std::size_t N) {
    return build_R(k, lam, lam_prime, N).entries;
  }, py::arg("k"), py::arg("lam"), py::arg("lam_prime"), py::arg("N"));

  m.def("apply_channel", [](const Eigen::MatrixXcd& rho, double tau, double noise, std::size_t out_dim) {
    return apply_channel(DensityMatrix(rho), {tau, noise}, out_dim).entries();
  }, py::arg("rho"), py::arg("tau"), py::arg("noise"), py::arg("out_dim") = 0);

  m.def("povm_reduce", [](int k, int dk, double lam) { return to_py(to_json(povm_reduce(k, dk, lam))); },
        py::arg("k"), py::arg("delta_k"), py::arg("lam"));
  m.def("bs_attenuate", [](int k, double lam, double lam_prime) {
    return to_py(to_json(bs_attenuate(k, lam, lam_prime)));
  }, py::arg("k"), py::arg("lam"), py::arg("lam_prime"));

  m.def("random_scan", [](std::size_t dim, std::size_t count, double r, std::uint64_t seed, std::size_t threads) {
    ScanConfig cfg;
    cfg.dim = dim;
    cfg.count = count;
    cfg.r = r;
    cfg.seed = seed;
    cfg.threads = threads;
    ScanReport rep;
    {
      py::gil_scoped_release release;
      rep = random_majorization_scan(cfg);
    }
    return to_py(to_json(rep));
  }, py::arg("dim"), py::arg("count"), py::arg("r"), py::arg("seed") = 0, py::arg("threads") = 1);

  m.def("crossing", [](const std::vector<cplx>& a, const std::vector<cplx>& b, double lo, double hi, double tol) {
    return to_py(to_json(crossing_finder(state_from(a), state_from(b), lo, hi, tol)));
  }, py::arg("a"), py::arg("b"), py::arg("lo"), py::arg("hi"), py::arg("tol") = 1e-8);

  m.def("minimize_entropy", [](std::size_t dim, double r, std::size_t restarts, std::uint64_t seed, double penalty) {
    SearchResult res;
    {
      py::gil_scoped_release release;
      res = minimize_entropy(dim, r, restarts, seed, penalty);
    }
    return to_py(to_json(res));
  }, py::arg("dim"), py::arg("r"), py::arg("restarts") = 8, py::arg("seed") = 0, py::arg("penalty") = 0.0);
}
