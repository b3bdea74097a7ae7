// Command-line driver: check | run | allocate.

#include "hcr/report.hpp"
#include "hcr/scenario_io.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kError = 1;
constexpr int kNotCertified = 2;

struct Overrides {
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> z_mode;
  std::optional<double> max_time;
};

hcr::ScenarioFile load(const fs::path& path, const Overrides& ov) {
  hcr::ScenarioFile file = hcr::load_scenario(path);
  hcr::Scenario& s = file.scenario;
  if (ov.dt) s.dt = *ov.dt;
  if (ov.seed) s.seed = *ov.seed;
  if (ov.z_mode) s.z_mode = hcr::zmode_from_string(*ov.z_mode);
  if (ov.max_time) s.max_time = *ov.max_time;
  if (s.name.empty()) s.name = path.stem().string();
  s.validate();
  return file;
}

std::vector<fs::path> batch_files(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw hcr::Error(hcr::Errc::InvalidArgument, "no .yaml scenarios in " + dir.string());
  return files;
}

std::string fmt(double v, const char* spec = "%.6g") {
  if (!std::isfinite(v)) return "-";
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string check_table(const hcr::Scenario& s, const hcr::CheckResult& check) {
  std::vector<const hcr::GameEdge*> all;
  for (const auto& e : check.graph.edges) all.push_back(&e);
  for (const auto& e : check.graph.rejected) all.push_back(&e);
  std::sort(all.begin(), all.end(), [](const hcr::GameEdge* a, const hcr::GameEdge* b) {
    if (a->coalition.size() != b->coalition.size()) return a->coalition.size() < b->coalition.size();
    if (a->coalition != b->coalition) return a->coalition < b->coalition;
    return a->evader < b->evader;
  });
  std::ostringstream os;
  os << "scenario " << s.name << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-14s %-10s %-10s %-12s %-12s %-14s %s\n", "edge", "gate", "cm", "threshold",
                "rho", "verdict", "theorem");
  os << line;
  for (const auto* e : all) {
    std::string gate;
    for (const auto& wp : e->certificate.params) gate += wp.passes() ? "pass " : "fail ";
    double cm = e->certificate.params[0].cm_bound;
    if (e->coalition.size() == 2) {
      const double a1 = e->certificate.params[0].alpha, a2 = e->certificate.params[1].alpha;
      cm = a1 > 3.0 && a2 > 3.0 ? hcr::cm2(a1, a2) : std::numeric_limits<double>::infinity();
    }
    std::snprintf(line, sizeof line, "%-14s %-10s %-10s %-12s %-12s %-14s %s\n",
                  hcr::edge_label(e->coalition, e->evader, s.pursuer_ids, s.evader_ids).c_str(), gate.c_str(),
                  fmt(cm).c_str(), fmt(e->certificate.threshold, "%.6f").c_str(), fmt(e->rho, "%.6f").c_str(),
                  hcr::to_string(e->certificate.winner), hcr::to_string(e->certificate.which));
    os << line;
  }
  os << "matching:";
  if (check.matching.assignments.empty()) os << " (none)";
  for (const auto& [c, j] : check.matching.assignments) os << ' ' << hcr::edge_label(c, j, s.pursuer_ids, s.evader_ids);
  os << "\nall evaders covered: " << (check.covers_all ? "yes" : "no") << "\n";
  return os.str();
}

int do_check(const fs::path& path, const Overrides& ov, const std::optional<fs::path>& out, std::ostream& log) {
  const hcr::ScenarioFile file = load(path, ov);
  const hcr::CheckResult check = hcr::check_scenario(file.scenario);
  log << check_table(file.scenario, check);
  if (out) {
    fs::create_directories(*out);
    std::ofstream(*out / "certificate_report.json") << hcr::certificate_report_json(file.scenario, check);
  }
  return check.covers_all ? kOk : kNotCertified;
}

int do_run(const fs::path& path, const Overrides& ov, const std::optional<fs::path>& out, std::ostream& log) {
  const hcr::ScenarioFile file = load(path, ov);
  const hcr::Scenario& s = file.scenario;
  fs::path dir = out ? *out : (file.output_dir.empty() ? fs::path("out") / s.name : fs::path(file.output_dir));
  const hcr::CheckResult check = hcr::check_scenario(s);
  const hcr::TrajectoryLog result = hcr::run_simulation(s);
  hcr::write_run_outputs(s, result, check, dir);
  int captured = 0, arrived = 0;
  for (const auto& e : result.events) {
    captured += e.kind == hcr::EventKind::Capture;
    arrived += e.kind == hcr::EventKind::Arrival;
  }
  log << s.name << ": " << result.ticks.size() << " ticks, t_end=" << result.ticks.back().t << ", captures=" << captured
      << ", arrivals=" << arrived << ", outputs in " << dir.string() << "\n";
  return kOk;
}

using Command = int (*)(const fs::path&, const Overrides&, const std::optional<fs::path>&, std::ostream&);

int guarded(Command cmd, const fs::path& path, const Overrides& ov, const std::optional<fs::path>& out,
            std::ostream& log) {
  try {
    return cmd(path, ov, out, log);
  } catch (const hcr::Error& err) {
    log << "error: " << err.what() << "\n";
  } catch (const std::exception& err) {
    log << "error: " << path.string() << ": " << err.what() << "\n";
  }
  return kError;
}

// Runs every scenario in dir concurrently; outputs go to out/<stem>.
int batch(Command cmd, const fs::path& dir, const Overrides& ov, const std::optional<fs::path>& out) {
  std::vector<fs::path> files;
  try {
    files = batch_files(dir);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kError;
  }
  const fs::path root = out ? *out : fs::path("out");
  std::vector<std::future<std::pair<int, std::string>>> jobs;
  for (const auto& f : files) {
    jobs.push_back(std::async(std::launch::async, [=] {
      std::ostringstream log;
      const int code = guarded(cmd, f, ov, root / f.stem(), log);
      return std::pair{code, log.str()};
    }));
  }
  int worst = kOk;
  for (auto& j : jobs) {
    auto [code, text] = j.get();
    std::cout << text;
    if (code == kError || (code == kNotCertified && worst == kOk)) worst = code;
  }
  return worst;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiplayer Homicidal Chauffeur reach-avoid simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string batch_dir;
  std::string out_dir;
  Overrides ov;
  double dt = 0.0, max_time = 0.0;
  std::uint64_t seed = 0;
  std::string z_mode;

  auto add_common = [&](CLI::App* sub, bool with_overrides) {
    sub->add_option("scenario", scenario, "Scenario file (YAML)")->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    if (!with_overrides) return;
    sub->add_option("--batch", batch_dir, "Run every .yaml scenario in a directory")->check(CLI::ExistingDirectory);
    sub->add_option("--dt", dt, "Override the time step")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Override the random seed");
    sub->add_option("--z-mode", z_mode, "Tie-break weights: zero, max-rho or min-rho")
        ->check(CLI::IsMember({"zero", "max-rho", "min-rho"}));
    sub->add_option("--max-time", max_time, "Override the horizon")->check(CLI::PositiveNumber);
  };

  CLI::App* check = app.add_subcommand("check", "Certify every coalition-evader pair at the initial state");
  add_common(check, true);
  CLI::App* run = app.add_subcommand("run", "Simulate and write trajectory.csv, events.json, plot.svg, certificate_report.json");
  add_common(run, true);
  CLI::App* allocate = app.add_subcommand("allocate", "Print the game graph and the optimal matching as JSON");
  add_common(allocate, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kError;
  }

  for (CLI::App* sub : {check, run, allocate}) {
    if (!sub->parsed()) continue;
    if (sub->count("--dt")) ov.dt = dt;
    if (sub->count("--seed")) ov.seed = seed;
    if (sub->count("--z-mode")) ov.z_mode = z_mode;
    if (sub->count("--max-time")) ov.max_time = max_time;
  }
  const std::optional<fs::path> out = out_dir.empty() ? std::nullopt : std::optional<fs::path>(out_dir);

  if (scenario.empty() == batch_dir.empty()) {
    std::cerr << "error: give exactly one of a scenario file or --batch <dir>\n";
    return kError;
  }

  if (allocate->parsed()) {
    auto cmd = [](const fs::path& path, const Overrides& o, const std::optional<fs::path>& dir, std::ostream& log) {
      const hcr::ScenarioFile file = load(path, o);
      const hcr::CheckResult result = hcr::check_scenario(file.scenario);
      const std::string text = hcr::allocation_json(file.scenario, result);
      if (dir) {
        fs::create_directories(*dir);
        std::ofstream(*dir / "allocation.json") << text;
      }
      log << text;
      return kOk;
    };
    if (!batch_dir.empty()) return batch(cmd, batch_dir, ov, out);
    return guarded(cmd, scenario, ov, out, std::cout);
  }

  const Command cmd = check->parsed() ? do_check : do_run;
  if (!batch_dir.empty()) return batch(cmd, batch_dir, ov, out);
  std::ostringstream log;
  const int code = guarded(cmd, scenario, ov, out, log);
  (code == kError ? std::cerr : std::cout) << log.str();
  return code;
}
