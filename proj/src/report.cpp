#include "hcr/report.hpp"

#include "hcr/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace hcr {

namespace {

using nlohmann::json;

std::string g12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string f3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json edge_json(const Scenario& s, const GameEdge& e) {
  json j;
  j["edge"] = edge_label(e.coalition, e.evader, s.pursuer_ids, s.evader_ids);
  json coalition = json::array();
  json alpha = json::array(), r = json::array(), kappa = json::array(), cm = json::array(),
       gate = json::array();
  for (std::size_t k = 0; k < e.coalition.size(); ++k) {
    const auto& p = s.pursuers[static_cast<std::size_t>(e.coalition[k])];
    coalition.push_back(s.pursuer_ids[static_cast<std::size_t>(e.coalition[k])]);
    const WinningParams& wp = e.certificate.params.at(k);
    alpha.push_back(wp.alpha);
    r.push_back(p.capture_radius);
    kappa.push_back(p.kappa);
    cm.push_back(number_or_null(wp.cm_bound));
    gate.push_back(wp.passes());
  }
  j["coalition"] = coalition;
  j["evader"] = s.evader_ids[static_cast<std::size_t>(e.evader)];
  const bool single = e.coalition.size() == 1;
  j["alpha"] = single ? alpha[0] : alpha;
  j["r"] = single ? r[0] : r;
  j["kappa"] = single ? kappa[0] : kappa;
  if (single) {
    j["cm"] = cm[0];
  } else if (e.certificate.params[0].alpha > 3.0 && e.certificate.params[1].alpha > 3.0) {
    j["cm"] = cm2(e.certificate.params[0].alpha, e.certificate.params[1].alpha);
  } else {
    j["cm"] = nullptr;
  }
  j["parameter_gate"] = single ? gate[0] : gate;
  j["threshold"] = number_or_null(e.certificate.threshold);
  j["rho"] = e.rho;
  j["margin"] = std::isfinite(e.certificate.threshold) ? json(e.rho - e.certificate.threshold) : json(nullptr);
  j["verdict"] = to_string(e.certificate.winner);
  j["theorem"] = to_string(e.certificate.which);
  if (e.certificate.pursuer_index >= 0) {
    j["winning_pursuer"] = s.pursuer_ids[static_cast<std::size_t>(e.coalition[static_cast<std::size_t>(e.certificate.pursuer_index)])];
  }
  if (!single) {
    json sup = json::array();
    for (int k : e.certificate.supports) sup.push_back(s.pursuer_ids[static_cast<std::size_t>(e.coalition[static_cast<std::size_t>(k)])]);
    j["support_constraints"] = sup;
  }
  return j;
}

struct Frame {
  double xmin, ymin, scale, pad, height;
  double X(double x) const { return pad + (x - xmin) * scale; }
  double Y(double y) const { return height - pad - (y - ymin) * scale; }
};

}  // namespace

CheckResult check_scenario(const Scenario& s) {
  s.validate();
  CheckResult out;
  GraphOptions opts;
  opts.relaxed = s.relaxed;
  opts.numeric = s.numeric;
  opts.threads = std::max(1u, s.threads);
  opts.keep_rejected = true;
  out.graph = build_game_graph(s.pursuers, s.evaders, s.goal, opts);
  out.matching = solve_bip(out.graph, build_conflict_graph(out.graph), s.z_mode);
  out.covers_all = out.matching.size() == out.graph.evader_vertices.size();
  return out;
}

std::string certificate_report_json(const Scenario& s, const CheckResult& check) {
  std::vector<const GameEdge*> all;
  for (const auto& e : check.graph.edges) all.push_back(&e);
  for (const auto& e : check.graph.rejected) all.push_back(&e);
  // Coalition size, then members, then evader.
  std::sort(all.begin(), all.end(), [](const GameEdge* a, const GameEdge* b) {
    if (a->coalition.size() != b->coalition.size()) return a->coalition.size() < b->coalition.size();
    if (a->coalition != b->coalition) return a->coalition < b->coalition;
    return a->evader < b->evader;
  });
  json doc;
  doc["scenario"] = s.name;
  json edges = json::array();
  for (const auto* e : all) edges.push_back(edge_json(s, *e));
  doc["edges"] = edges;
  json m = json::array();
  for (const auto& [c, j] : check.matching.assignments) m.push_back(edge_label(c, j, s.pursuer_ids, s.evader_ids));
  doc["matching"] = m;
  doc["covers_all_evaders"] = check.covers_all;
  json warnings = json::array();
  for (const auto& w : check.graph.warnings) warnings.push_back(w);
  doc["warnings"] = warnings;
  return doc.dump(2) + "\n";
}

std::string allocation_json(const Scenario& s, const CheckResult& check) {
  json doc;
  doc["z_mode"] = to_string(s.z_mode);
  json vp = json::array();
  for (const auto& c : check.graph.coalition_vertices) {
    json members = json::array();
    for (int i : c) members.push_back(s.pursuer_ids[static_cast<std::size_t>(i)]);
    vp.push_back(members);
  }
  doc["coalition_vertices"] = vp;
  json ve = json::array();
  for (int j : check.graph.evader_vertices) ve.push_back(s.evader_ids[static_cast<std::size_t>(j)]);
  doc["evader_vertices"] = ve;
  json edges = json::array();
  for (const auto& e : check.graph.edges) {
    edges.push_back({{"edge", edge_label(e.coalition, e.evader, s.pursuer_ids, s.evader_ids)},
                     {"rho", e.rho},
                     {"theorem", to_string(e.certificate.which)}});
  }
  doc["edges"] = edges;
  const ConflictGraph cg = build_conflict_graph(check.graph);
  json conflicts = json::array();
  for (const auto& [a, b] : cg.conflict_edges) {
    const auto& ea = check.graph.edges[static_cast<std::size_t>(a)];
    const auto& eb = check.graph.edges[static_cast<std::size_t>(b)];
    conflicts.push_back({edge_label(ea.coalition, ea.evader, s.pursuer_ids, s.evader_ids),
                         edge_label(eb.coalition, eb.evader, s.pursuer_ids, s.evader_ids)});
  }
  doc["conflicts"] = conflicts;
  json m = json::array();
  for (const auto& [c, j] : check.matching.assignments) m.push_back(edge_label(c, j, s.pursuer_ids, s.evader_ids));
  doc["matching"] = m;
  doc["objective"] = check.matching.objective;
  doc["matched_evaders"] = check.matching.size();
  return doc.dump(2) + "\n";
}

std::string events_json(const TrajectoryLog& log) {
  json arr = json::array();
  for (const auto& e : log.events) {
    json j{{"t", e.t}, {"kind", to_string(e.kind)}, {"actors", e.actors}};
    if (!e.detail.empty()) j["detail"] = e.detail;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::string trajectory_csv(const Scenario& s, const TrajectoryLog& log) {
  const std::size_t np = s.pursuers.size();
  const std::size_t ne = s.evaders.size();
  std::vector<std::pair<std::vector<int>, int>> columns;
  std::vector<std::vector<int>> coalitions;
  for (int i = 0; i < static_cast<int>(np); ++i) coalitions.push_back({i});
  for (int i = 0; i < static_cast<int>(np); ++i) {
    for (int k = i + 1; k < static_cast<int>(np); ++k) coalitions.push_back({i, k});
  }
  for (const auto& c : coalitions) {
    for (int j = 0; j < static_cast<int>(ne); ++j) columns.emplace_back(c, j);
  }

  std::ostringstream os;
  os << "t";
  for (const auto& id : s.pursuer_ids) os << ',' << id << ".x," << id << ".y," << id << ".theta," << id << ".u";
  for (const auto& id : s.evader_ids) os << ',' << id << ".x," << id << ".y," << id << ".theta," << id << ".u";
  for (const auto& [c, j] : columns) os << ",edge." << edge_label(c, j, s.pursuer_ids, s.evader_ids) << ".rho";
  os << '\n';

  for (const auto& tick : log.ticks) {
    os << g12(tick.t);
    for (std::size_t i = 0; i < np; ++i) {
      os << ',' << g12(tick.pursuer_pos[i].x()) << ',' << g12(tick.pursuer_pos[i].y()) << ','
         << g12(tick.pursuer_heading[i]) << ',' << g12(tick.pursuer_u[i]);
    }
    for (std::size_t j = 0; j < ne; ++j) {
      const Vec2& u = tick.evader_u[j];
      const double mag = u.norm();
      os << ',' << g12(tick.evader_pos[j].x()) << ',' << g12(tick.evader_pos[j].y()) << ','
         << g12(mag > 0.0 ? heading_of(u) : 0.0) << ',' << g12(mag);
    }
    for (const auto& [c, j] : columns) {
      os << ',';
      for (const auto& e : tick.edges) {
        if (e.coalition == c && e.evader == j) {
          os << g12(e.rho);
          break;
        }
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string plot_svg(const Scenario& s, const TrajectoryLog& log) {
  constexpr double kWidth = 800.0;
  constexpr double kPad = 30.0;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  auto grow = [&](const Vec2& p, double r = 0.0) {
    xmin = std::min(xmin, p.x() - r);
    xmax = std::max(xmax, p.x() + r);
    ymin = std::min(ymin, p.y() - r);
    ymax = std::max(ymax, p.y() + r);
  };
  if (const auto* d = std::get_if<GoalRegion::Disk>(&s.goal.kind())) {
    grow(d->center, d->radius);
  } else if (const auto* el = std::get_if<GoalRegion::Ellipse>(&s.goal.kind())) {
    grow(el->center + el->semi_axes);
    grow(el->center - el->semi_axes);
  }
  for (const auto& t : log.ticks) {
    for (std::size_t i = 0; i < t.pursuer_pos.size(); ++i) grow(t.pursuer_pos[i], s.pursuers[i].capture_radius);
    for (const auto& p : t.evader_pos) grow(p);
  }
  if (!std::isfinite(xmin)) {
    xmin = ymin = -1.0;
    xmax = ymax = 1.0;
  }
  const double span = std::max({xmax - xmin, ymax - ymin, 1e-9});
  const double scale = (kWidth - 2.0 * kPad) / (xmax - xmin > 0.0 ? xmax - xmin : span);
  const double height = (ymax - ymin) * scale + 2.0 * kPad;
  const Frame fr{xmin, ymin, scale, kPad, height};

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f3(kWidth) << "\" height=\"" << f3(height)
     << "\" viewBox=\"0 0 " << f3(kWidth) << ' ' << f3(height) << "\">\n";
  os << "<title>" << xml_escape(s.name.empty() ? "simulation" : s.name) << "</title>\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  os << "<g id=\"goal\">\n";
  if (const auto* d = std::get_if<GoalRegion::Disk>(&s.goal.kind())) {
    os << "<circle cx=\"" << f3(fr.X(d->center.x())) << "\" cy=\"" << f3(fr.Y(d->center.y())) << "\" r=\""
       << f3(d->radius * scale) << "\" fill=\"#f4c7c3\" stroke=\"#c0392b\"/>\n";
  } else if (const auto* el = std::get_if<GoalRegion::Ellipse>(&s.goal.kind())) {
    os << "<ellipse cx=\"" << f3(fr.X(el->center.x())) << "\" cy=\"" << f3(fr.Y(el->center.y())) << "\" rx=\""
       << f3(el->semi_axes.x() * scale) << "\" ry=\"" << f3(el->semi_axes.y() * scale)
       << "\" fill=\"#f4c7c3\" stroke=\"#c0392b\"/>\n";
  }
  os << "</g>\n";

  // Snapshot ticks: configured times, else four evenly spaced ones.
  std::vector<std::size_t> snaps;
  if (!log.ticks.empty()) {
    std::vector<double> times = s.snapshot_times;
    if (times.empty()) {
      const double T = log.ticks.back().t;
      for (int k = 0; k < 4; ++k) times.push_back(T * k / 4.0);
    }
    for (double t : times) {
      std::size_t best = 0;
      for (std::size_t k = 0; k < log.ticks.size(); ++k) {
        if (std::abs(log.ticks[k].t - t) < std::abs(log.ticks[best].t - t)) best = k;
      }
      if (std::find(snaps.begin(), snaps.end(), best) == snaps.end()) snaps.push_back(best);
    }
  }

  os << "<g id=\"enclosures\" fill=\"#a9dfbf\" fill-opacity=\"0.35\" stroke=\"#27ae60\">\n";
  for (std::size_t k : snaps) {
    const TickRecord& tick = log.ticks[k];
    for (int m : tick.matched) {
      const EdgeRecord& e = tick.edges[static_cast<std::size_t>(m)];
      EvaderState ev = s.evaders[static_cast<std::size_t>(e.evader)];
      ev.pos = tick.evader_pos[static_cast<std::size_t>(e.evader)];
      std::vector<PairState> pairs;
      for (int i : e.coalition) {
        PursuerState p = s.pursuers[static_cast<std::size_t>(i)];
        p.pos = tick.pursuer_pos[static_cast<std::size_t>(i)];
        pairs.push_back({p, ev});
      }
      os << "<polygon data-t=\"" << g12(tick.t) << "\" points=\"";
      constexpr int kSamples = 180;
      for (int q = 0; q < kSamples; ++q) {
        const double psi = 2.0 * std::numbers::pi * q / kSamples;
        double rho = std::numeric_limits<double>::infinity();
        for (const auto& pr : pairs) rho = std::min(rho, boundary_radius(psi, 0.0, pr));
        const Vec2 x = ev.pos + rho * polar_dir(psi);
        os << (q ? " " : "") << f3(fr.X(x.x())) << ',' << f3(fr.Y(x.y()));
      }
      os << "\"/>\n";
    }
  }
  os << "</g>\n";

  auto polyline = [&](const std::vector<Vec2>& pts, const char* color, const std::string& id) {
    const std::size_t stride = std::max<std::size_t>(1, pts.size() / 2000);
    os << "<polyline id=\"" << xml_escape(id) << "\" fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < pts.size(); k += stride) {
      os << (k ? " " : "") << f3(fr.X(pts[k].x())) << ',' << f3(fr.Y(pts[k].y()));
    }
    if (!pts.empty() && (pts.size() - 1) % stride != 0) {
      os << ' ' << f3(fr.X(pts.back().x())) << ',' << f3(fr.Y(pts.back().y()));
    }
    os << "\"/>\n";
  };

  os << "<g id=\"trajectories\">\n";
  for (std::size_t i = 0; i < s.pursuers.size(); ++i) {
    std::vector<Vec2> pts;
    for (const auto& t : log.ticks) pts.push_back(t.pursuer_pos[i]);
    polyline(pts, "#2e86c1", "traj-" + s.pursuer_ids[i]);
  }
  for (std::size_t j = 0; j < s.evaders.size(); ++j) {
    std::vector<Vec2> pts;
    for (const auto& t : log.ticks) {
      pts.push_back(t.evader_pos[j]);
      if (t.evader_status[j] != EvaderStatus::Active) break;
    }
    polyline(pts, "#c0392b", "traj-" + s.evader_ids[j]);
  }
  os << "</g>\n";

  os << "<g id=\"capture-circles\" fill=\"none\" stroke=\"#2e86c1\" stroke-dasharray=\"4 3\">\n";
  std::vector<std::size_t> circle_ticks = snaps;
  if (!log.ticks.empty() && std::find(snaps.begin(), snaps.end(), log.ticks.size() - 1) == snaps.end()) {
    circle_ticks.push_back(log.ticks.size() - 1);
  }
  for (std::size_t k : circle_ticks) {
    const TickRecord& tick = log.ticks[k];
    for (std::size_t i = 0; i < s.pursuers.size(); ++i) {
      os << "<circle cx=\"" << f3(fr.X(tick.pursuer_pos[i].x())) << "\" cy=\"" << f3(fr.Y(tick.pursuer_pos[i].y()))
         << "\" r=\"" << f3(s.pursuers[i].capture_radius * scale) << "\"/>\n";
    }
  }
  os << "</g>\n";

  os << "<g id=\"labels\" font-family=\"sans-serif\" font-size=\"12\">\n";
  if (!log.ticks.empty()) {
    const TickRecord& first = log.ticks.front();
    for (std::size_t i = 0; i < s.pursuers.size(); ++i) {
      os << "<text x=\"" << f3(fr.X(first.pursuer_pos[i].x()) + 4) << "\" y=\"" << f3(fr.Y(first.pursuer_pos[i].y()) - 4)
         << "\" fill=\"#2e86c1\">" << xml_escape(s.pursuer_ids[i]) << "</text>\n";
    }
    for (std::size_t j = 0; j < s.evaders.size(); ++j) {
      os << "<text x=\"" << f3(fr.X(first.evader_pos[j].x()) + 4) << "\" y=\"" << f3(fr.Y(first.evader_pos[j].y()) - 4)
         << "\" fill=\"#c0392b\">" << xml_escape(s.evader_ids[j]) << "</text>\n";
    }
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

void write_run_outputs(const Scenario& s, const TrajectoryLog& log, const CheckResult& check,
                       const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  auto put = [&](const char* name, const std::string& content) {
    const auto path = dir / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::InvalidState, "cannot write " + path.string());
    written.push_back(path);
    out << content;
    out.close();
    if (!out) throw Error(Errc::InvalidState, "write failed for " + path.string());
  };
  try {
    put("trajectory.csv", trajectory_csv(s, log));
    put("events.json", events_json(log));
    put("plot.svg", plot_svg(s, log));
    put("certificate_report.json", certificate_report_json(s, check));
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) std::filesystem::remove(p, ec);
    throw;
  }
}

}  // namespace hcr
