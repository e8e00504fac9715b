#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "bcert/bound.hpp"
#include "bcert/certificate.hpp"
#include "bcert/compose.hpp"
#include "bcert/dwell.hpp"
#include "bcert/grid.hpp"
#include "bcert/model.hpp"
#include "bcert/sim.hpp"

namespace bcert {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

enum class SigmaMode { automatic, identity };

struct CompositionSettings {
  SigmaMode sigma = SigmaMode::automatic;
  std::optional<UnsafeSemantics> semantics;  // default_semantics when unset
};

struct SynthesisSettings {
  std::string subsystem;  // empty = first
  int mode = 1;
  unsigned degree = 2;
  std::size_t budget = 200;
  std::uint64_t seed = 1;
  std::vector<double> kappa_grid;   // empty = defaults
  std::vector<double> lambda_grid;  // empty = {1}
};

struct Project {
  NetworkSpec net;
  std::optional<std::string> fixture;  // set when the network came from a fixture
  std::size_t fixture_n = 0;
  // Per-subsystem certificates keyed by id; "*" applies to every subsystem.
  std::map<std::string, std::vector<CbcCertificate>> certificates;
  std::optional<DwellParams> dwell;
  CompositionSettings composition;
  long horizon = 10;
  GridConfig grid;
  SynthesisSettings synthesis;
  SimConfig simulation;

  // Certificates for one subsystem (own entry, else "*"), sorted by mode.
  std::vector<CbcCertificate> certificates_for(const std::string& id) const;
};

// Throws SchemaError with a "$.a.b[2]" location, or line/column for syntax
// errors. Unknown keys are rejected.
Project parse_project(std::string_view text);
Project load_project(const std::filesystem::path& path);
Json project_to_json(const Project& p);

Json polynomial_to_json(const Polynomial& p);
// Accepts an expression string or {"vars": [...], "terms": [{"exp", "coef"}]}.
Polynomial polynomial_from_json(const Json& j, const SpacePtr& space, const std::string& path = "$");

Json boxset_to_json(const BoxSet& s);
BoxSet boxset_from_json(const Json& j, std::size_t dim, const std::string& path = "$");

Json network_to_json(const NetworkSpec& net);
NetworkSpec network_from_json(const Json& j, const std::string& path = "$");

Json constants_to_json(const CertConstants& k);
CertConstants constants_from_json(const Json& j, const std::string& path = "$");
Json verification_to_json(const Verification& v);
Json cbc_to_json(const CbcCertificate& c);
CbcCertificate cbc_from_json(const Json& j, const SpacePtr& state_space, const std::string& path = "$");
Json apbc_to_json(const ApbcCertificate& c);
Json abc_to_json(const AbcCertificate& c);
Json report_to_json(const CheckReport& r);
Json reports_to_json(std::span<const CheckReport> r);
Json bound_to_json(const SafetyBound& b);
Json mu_to_json(const MuEstimate& m);
Json small_gain_to_json(const SmallGainResult& r, const GainDigraph& g);
Json derivation_to_json(std::span<const DerivationRow> rows);
Json proportion_to_json(const ProportionEstimate& e);
Json sim_report_to_json(const SimReport& r);
Json violations_to_json(std::span<const Violation> v);

// Writes {"schema_version": 1, ...j} with a trailing newline; creates parent
// directories.
void write_json(const std::filesystem::path& path, const Json& j);
std::string read_text(const std::filesystem::path& path);

}  // namespace bcert
