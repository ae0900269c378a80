#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "hylyap/geometry.hpp"

namespace hylyap {

/// Caveat carried by every sampled certificate.
inline constexpr const char* kSamplingCaveat =
    "numerical evidence: conditions were checked on a finite sample standing in for a dense set";

struct Counterexample {
  Vec x;
  int piece = -1;  ///< index of the offending piece, -1 when not applicable
  double value = 0.0;
  std::string detail;
};

/// Outcome of a certification pass. pass holds exactly when counterexamples is empty.
struct CheckReport {
  std::string check;
  bool pass = true;
  double worst_margin = 0.0;
  std::size_t evaluated = 0;
  std::vector<Counterexample> counterexamples;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();

  void add_counterexample(Counterexample c) {
    counterexamples.push_back(std::move(c));
    pass = false;
  }
};

}  // namespace hylyap
