#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "app/commands.hpp"
#include "u1lab/error.hpp"

using namespace u1lab;
using namespace u1lab::app;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("u1lab_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json manifest(const fs::path& dir, const std::string& sub) {
  std::ifstream in(dir / (sub + ".manifest.json"));
  return nlohmann::json::parse(in);
}

// Every CSV in the directory is listed and every listed file exists.
void check_complete(const fs::path& dir, const std::string& sub) {
  const auto m = manifest(dir, sub);
  std::set<std::string> listed;
  for (const auto& o : m["outputs"]) listed.insert(o.get<std::string>());
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".csv") CHECK(listed.count(e.path().filename().string()) == 1);
  }
  for (const auto& name : listed) CHECK(fs::exists(dir / name));
  for (const char* key : {"subcommand", "config", "version", "wall_time_s", "outputs", "warnings"}) CHECK(m.contains(key));
  CHECK(m["rng_used"] == false);
}

Globals globals(const fs::path& dir) {
  Globals g;
  g.out_dir = dir;
  g.seedless = true;
  return g;
}

QuenchConfig small_quench() {
  QuenchConfig c;
  c.params = {1.0, 1.0, 1.0, 0.0, 0.6055353934 * std::numbers::pi / 4};
  c.length = 16;
  c.steps = 6;
  c.chi = 16;
  c.measure_every = 3;
  return c;
}

}  // namespace

TEST_CASE("identical configs give identical bytes") {
  std::ostringstream sink;
  const auto a = scratch("det_a"), b = scratch("det_b");
  for (const auto& dir : {a, b}) {
    PhaseDiagramOptions pd;
    pd.tau_hi = 2.0;
    pd.tau_n = 41;
    run_phase_diagram(globals(dir), pd, sink);
    SpectrumScanOptions sp;
    sp.tau_hi = 2.0;
    sp.tau_n = 9;
    run_spectrum_scan(globals(dir), sp, sink);
    run_quench(globals(dir), small_quench(), sink);
  }
  int compared = 0;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().extension() != ".csv") continue;
    CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    ++compared;
  }
  CHECK(compared >= 6);
}

TEST_CASE("manifests list every output") {
  std::ostringstream sink;
  const auto dir = scratch("manifest");
  run_classify(globals(dir), {1.0, 1.0, 1.0, 0.0, 0.0}, linspace(0.1, 1.5, 5), sink);
  check_complete(dir, "classify");
  const auto qdir = scratch("manifest_quench");
  run_quench(globals(qdir), small_quench(), sink);
  check_complete(qdir, "quench");
  QuenchConfig helix = small_quench();
  helix.kind = QuenchKind::helix_tilde_x;
  const auto hdir = scratch("manifest_helix");
  run_quench(globals(hdir), helix, sink);
  check_complete(hdir, "quench");
  SymmetryCheckOptions sym;
  sym.params.tau = 0.6055353934 * std::numbers::pi / 4;
  sym.length = 4;
  const auto sdir = scratch("manifest_sym");
  run_symmetry_check(globals(sdir), sym, sink);
  check_complete(sdir, "symmetry-check");
}

TEST_CASE("with B = 0 the critical and U_q overlays coincide") {
  for (const auto& [delta, d] : {std::pair{0.7, 0.5}, std::pair{1.3, -0.8}, std::pair{0.4, 0.0}}) {
    const auto taus = linspace(0.01, 3.0, 1500);
    const auto f = overlay_flags({delta, d, 0.0, 0.0, 0.0}, taus);
    int n = 0;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      if (f.critical[i] || f.qgroup[i]) {
        bool near = false;
        for (std::size_t j = i > 0 ? i - 1 : 0; j <= std::min(i + 1, taus.size() - 1); ++j)
          near = near || (f.critical[i] ? f.qgroup[j] : f.critical[j]);
        CHECK(near);
        ++n;
      }
    }
    CHECK(n > 0);
  }
}

TEST_CASE("deep phase I carries no overlay flags") {
  const double q = std::numbers::pi / 4;
  const auto taus = linspace(0.95 * q, 1.05 * q, 11);
  const auto f = overlay_flags({1.0, 1.0, 1.0, 0.0, 0.0}, taus);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    CHECK_FALSE(f.critical[i]);
    CHECK_FALSE(f.qgroup[i]);
    CHECK_FALSE(f.localization[i]);
    CHECK_FALSE(f.free_point[i]);
  }
}

TEST_CASE("quench config from JSON") {
  const auto c = quench_from_json(nlohmann::json::parse(R"({"kind": "helix", "length": 40, "tau": 2.0, "d": 0.5})"),
                                  TauUnits::quarter_pi);
  CHECK(c.kind == QuenchKind::helix_tilde_x);
  CHECK(c.length == 40);
  CHECK(c.params.tau == doctest::Approx(std::numbers::pi / 2));
  CHECK(c.params.d == 0.5);
  CHECK_THROWS_AS(quench_from_json(nlohmann::json::parse(R"({"lenght": 40})"), TauUnits::raw), ConfigError);
  CHECK_THROWS_AS(quench_from_json(nlohmann::json::parse(R"({"kind": "spiral"})"), TauUnits::raw), ConfigError);
}

TEST_CASE("bad inputs are configuration errors") {
  std::ostringstream sink;
  const auto dir = scratch("errors");
  PhaseDiagramOptions pd;
  pd.axis = "mu";
  CHECK_THROWS_AS(run_phase_diagram(globals(dir), pd, sink), ConfigError);
  CHECK_THROWS_AS(run_reproduce(globals(dir), "fig9", sink), ConfigError);
  CHECK_THROWS_AS(linspace(0.0, 1.0, 0), ConfigError);
  QuenchConfig bad = small_quench();
  bad.chi = 2;
  CHECK_THROWS_AS(run_quench(globals(dir), bad, sink), ConfigError);
}

TEST_CASE("fast figures pass") {
  std::ostringstream sink;
  const auto dir = scratch("figures");
  for (const char* id : {"fig1", "fig2"}) {
    INFO(id);
    CHECK(run_reproduce(globals(dir), id, sink) == 0);
  }
  INFO(sink.str());
  CHECK(sink.str().find("FAIL") == std::string::npos);
}
