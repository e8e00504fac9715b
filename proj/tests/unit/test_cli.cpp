#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "../support/systems.hpp"

#include "bcert/cli.hpp"
#include "bcert/io.hpp"

using namespace bcert;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "bcert");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  static const fs::path root = [] {
    auto p = fs::temp_directory_path() / "bcert_cli_test";
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
  }();
  return root;
}

fs::path write_project(const std::string& name, double lambda) {
  Project p;
  p.net.subsystems = {testsys::scalar_switched("a", {0.5, 0.6}), testsys::scalar_switched("b", {0.5, 0.6})};
  auto certs = testsys::scalar_cbcs(p.net.subsystems[0]);
  for (auto& c : certs) c.constants.lambda = lambda;
  p.certificates["*"] = certs;
  p.dwell = DwellParams{2.0, 0.0, 0};
  p.horizon = 10;
  p.simulation.trajectories = 200;
  const auto path = scratch() / name;
  std::ofstream(path) << project_to_json(p).dump(2);
  return path;
}

Json load(const fs::path& p) { return Json::parse(read_text(p)); }

}  // namespace

TEST_CASE("pipeline commands on a valid project") {
  const auto proj = write_project("ok.json", 0.5).string();
  const auto out = scratch() / "ok";
  for (const std::string cmd : {"check", "lift", "compose", "bound", "simulate"}) {
    const auto r = cli({cmd, "--project", proj, "--out", out.string()});
    INFO(cmd << ": " << r.err);
    CHECK(r.code == 0);
  }
  CHECK(load(out / "check.json")["schema_version"] == 1);
  CHECK(load(out / "lift.json")["schema_version"] == 1);
  CHECK(load(out / "compose.json")["schema_version"] == 1);
  const auto bound = load(out / "bound.json");
  CHECK(bound["schema_version"] == 1);
  CHECK(fs::exists(out / "simulate.json"));
  const auto b = cli({"bound", "--gamma", "0.16", "--lambda", "1.2", "--kappa", "0.99", "--psi", "7.07e-4", "--horizon",
                      "10", "--out", (scratch() / "b").string()});
  CHECK(b.code == 0);
  CHECK(load(scratch() / "b" / "bound.json").dump().find("0.138") != std::string::npos);
}

TEST_CASE("simulate flags override the project") {
  const auto proj = write_project("simflags.json", 0.5).string();
  const auto out = scratch() / "simflags";
  const auto r = cli({"simulate", "--project", proj, "--out", out.string(), "--horizon", "4", "--initial-mode", "2",
                      "--trajectories", "30", "--seed", "7"});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto s = load(out / "simulate.json");
  CHECK(s["horizon"] == 4);
  CHECK(s["trajectories"] == 30);
  CHECK(s["seed"] == 7);
  CHECK(cli({"simulate", "--project", proj, "--out", out.string(), "--initial-mode", "3"}).code == 2);
}

TEST_CASE("refuted certificates exit with 1") {
  const auto proj = write_project("bad.json", 5.0).string();
  const auto out = scratch() / "bad";
  const auto r = cli({"check", "--project", proj, "--out", out.string()});
  CHECK(r.code == 1);
  CHECK(fs::exists(out / "check.json"));
  CHECK(fs::exists(out / "counterexamples.json"));
}

TEST_CASE("input problems exit with 2") {
  const auto out = (scratch() / "err").string();
  CHECK(cli({"check", "--project", (scratch() / "none.json").string(), "--out", out}).code == 2);
  std::ofstream(scratch() / "broken.json") << "{ not json";
  CHECK(cli({"check", "--project", (scratch() / "broken.json").string(), "--out", out}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"check", "--out", out}).code == 2);
  CHECK(cli({"bound", "--gamma", "2", "--lambda", "1", "--kappa", "0.5", "--psi", "0", "--horizon", "3", "--out", out})
            .code == 2);
  CHECK(cli({"demo", "nosuch", "--out", out}).code == 2);
}

TEST_CASE("repeated runs produce identical artifacts") {
  const auto proj = write_project("idem.json", 0.5).string();
  const auto a = scratch() / "idem_a", b = scratch() / "idem_b";
  for (const std::string cmd : {"check", "lift", "compose", "simulate"}) {
    REQUIRE(cli({cmd, "--project", proj, "--out", a.string()}).code == 0);
    REQUIRE(cli({cmd, "--project", proj, "--out", b.string()}).code == 0);
  }
  for (const auto& e : fs::directory_iterator(a)) {
    INFO(e.path().filename().string());
    CHECK(read_text(e.path()) == read_text(b / e.path().filename()));
  }
}

TEST_CASE("fixture and synthesize commands") {
  const auto fx = scratch() / "fx.json";
  CHECK(cli({"fixture", "room-temp", "--n", "3", "--out", fx.string()}).code == 0);
  CHECK(load(fx)["fixture"]["n"] == 3);
  const auto proj = write_project("syn.json", 0.5).string();
  const auto r = cli({"synthesize", "--project", proj, "--out", (scratch() / "syn").string()});
  CHECK(r.code == 0);
  CHECK(load(scratch() / "syn" / "synthesis.json")["schema_version"] == 1);
}
