#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "gmoe/explore.hpp"
#include "gmoe/fock.hpp"
#include "gmoe/locc.hpp"
#include "gmoe/majorization.hpp"

namespace gmoe {

using json = nlohmann::ordered_json;

json to_json(const FockState& s);
json to_json(const ProbabilityVector& p);
json to_json(const DensityMatrix& rho);
json to_json(const MajorizationVerdict& v);
json to_json(const TransferReport& r);
json to_json(const ProtocolTrace& t);
json to_json(const ScanReport& r);
json to_json(const CrossingResult& c);
json to_json(const SearchResult& s);

/// Array of [re, im] pairs; bare reals are accepted as well.
FockState fock_state_from_json(const json& j);
/// {"probs": [...], "tail_mass": t} or a bare array.
ProbabilityVector probability_from_json(const json& j);
/// {"real": [[...]], "imag": [[...]]}; imag may be omitted.
DensityMatrix density_from_json(const json& j);

/// fock:k | coeffs:[re,im;re,im;...] | @file.json
FockState parse_state_spec(std::string_view spec);
/// p0,p1,... | schmidt:k:lambda | @file.json. Schmidt vectors use N chosen
/// from eps.
ProbabilityVector parse_probability_spec(std::string_view spec, double eps = kDefaultEps);

}  // namespace gmoe
