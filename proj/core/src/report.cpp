#include "ess/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ess {

namespace {

using nlohmann::json;

std::string fixed(double v, int precision) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double ci95_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  return 1.96 * sd / std::sqrt(static_cast<double>(v.size()));
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

const char* qcp_status_name(QcpStatus s) {
  switch (s) {
    case QcpStatus::Infeasible: return "infeasible";
    case QcpStatus::Feasible: return "feasible";
    case QcpStatus::Unresolved: return "unresolved";
  }
  return "unknown";
}

QcpStatus qcp_status_from(const std::string& s) {
  if (s == "infeasible") return QcpStatus::Infeasible;
  if (s == "feasible") return QcpStatus::Feasible;
  if (s == "unresolved") return QcpStatus::Unresolved;
  throw Error(ErrorCode::ParseError, "bad qcp status " + s);
}

CertPath cert_path_from(const std::string& s) {
  for (CertPath p : {CertPath::StrictShortcut, CertPath::PureInvaded,
                     CertPath::MixedInvaded, CertPath::Neutral,
                     CertPath::MixedPass, CertPath::QcqpInfeasible})
    if (s == cert_path_name(p)) return p;
  throw Error(ErrorCode::ParseError, "bad certificate path " + s);
}

json record_to_json(const SupportRecord& rec) {
  json j;
  j["support"] = rec.support.actions;
  j["status"] = qcp_status_name(rec.qcp_status);
  if (rec.sne) j["sne"] = rec.sne->probs();
  if (rec.certificate) {
    const EssCertificate& c = *rec.certificate;
    json cj;
    cj["ess"] = c.is_ess;
    cj["path"] = cert_path_name(c.path);
    if (c.path == CertPath::PureInvaded) cj["invader"] = c.invader;
    if (c.margin) cj["margin"] = *c.margin;
    cj["br"] = c.br_set.actions;
    j["certificate"] = std::move(cj);
  }
  if (rec.ess_unresolved) j["ess_unresolved"] = true;
  return j;
}

SupportRecord record_from_json(const json& j) {
  SupportRecord rec;
  rec.support = Support(j.at("support").get<std::vector<int>>());
  rec.qcp_status = qcp_status_from(j.at("status").get<std::string>());
  if (j.contains("sne"))
    rec.sne = MixedStrategy(j["sne"].get<std::vector<double>>());
  if (j.contains("certificate")) {
    if (!rec.sne)
      throw Error(ErrorCode::ParseError, "certificate without equilibrium");
    const json& cj = j["certificate"];
    EssCertificate c{*rec.sne,
                     cj.at("ess").get<bool>(),
                     cert_path_from(cj.at("path").get<std::string>()),
                     cj.contains("invader") ? cj["invader"].get<int>() : -1,
                     std::nullopt,
                     Support(cj.at("br").get<std::vector<int>>())};
    if (cj.contains("margin")) c.margin = cj["margin"].get<double>();
    rec.certificate = std::move(c);
  }
  rec.ess_unresolved = j.value("ess_unresolved", false);
  return rec;
}

json run_to_json(const EssRun& run) {
  json j;
  j["records"] = json::array();
  for (const auto& rec : run.records) j["records"].push_back(record_to_json(rec));
  j["counts"] = {{"total_sne", run.counts.total_sne},
                 {"strict", run.counts.strict},
                 {"pure_pass", run.counts.pure_pass},
                 {"mixed_pass", run.counts.mixed_pass},
                 {"total_ess", run.counts.total_ess()}};
  j["fully_resolved"] = run.fully_resolved;
  j["complete_enumeration"] = run.complete_enumeration;
  j["total_seconds"] = run.total_seconds;
  j["first_ess_seconds"] = run.first_ess_seconds;
  return j;
}

EssRun run_from_json(const json& j) {
  EssRun run;
  for (const auto& rj : j.at("records")) run.records.push_back(record_from_json(rj));
  run.fully_resolved = j.value("fully_resolved", true);
  run.complete_enumeration = j.value("complete_enumeration", true);
  run.total_seconds = j.value("total_seconds", 0.0);
  run.first_ess_seconds = j.value("first_ess_seconds", 0.0);

  // recompute counts and the deduplicated list from the records
  for (const auto& rec : run.records) {
    if (rec.qcp_status == QcpStatus::Feasible) ++run.counts.total_sne;
    if (!rec.certificate) continue;
    const EssCertificate& c = *rec.certificate;
    switch (c.path) {
      case CertPath::StrictShortcut: ++run.counts.strict; break;
      case CertPath::MixedInvaded:
      case CertPath::Neutral:
      case CertPath::MixedPass:
      case CertPath::QcqpInfeasible:
        ++run.counts.pure_pass;
        if (c.path == CertPath::MixedPass) ++run.counts.mixed_pass;
        break;
      case CertPath::PureInvaded: break;
    }
    if (c.is_ess) {
      bool dup = false;
      for (const auto& kept : run.ess)
        if (kept.strategy.linf_distance(c.strategy) < 1e-6) dup = true;
      if (!dup) run.ess.push_back(c);
    }
  }
  return run;
}

json config_to_json(const SolverConfig& c) {
  return json{{"eps_s", c.eps_s},       {"eps_p", c.eps_p},
              {"delta", c.delta},       {"eps_dist", c.eps_dist},
              {"feas_tol", c.feas_tol}, {"opt_gap", c.opt_gap},
              {"node_budget", c.node_budget}, {"threads", c.threads},
              {"first_only", c.first_only}};
}

SolverConfig config_from_json(const json& j) {
  SolverConfig c;
  c.eps_s = j.value("eps_s", c.eps_s);
  c.eps_p = j.value("eps_p", c.eps_p);
  c.delta = j.value("delta", c.delta);
  c.eps_dist = j.value("eps_dist", c.eps_dist);
  c.feas_tol = j.value("feas_tol", c.feas_tol);
  c.opt_gap = j.value("opt_gap", c.opt_gap);
  c.node_budget = j.value("node_budget", c.node_budget);
  c.threads = j.value("threads", c.threads);
  c.first_only = j.value("first_only", c.first_only);
  return c;
}

std::string csv_or_pad(const std::string& cell, int width, OutputFormat format,
                       bool last) {
  if (format == OutputFormat::Csv) return last ? cell : cell + ",";
  std::string s = cell;
  if (!last && static_cast<int>(s.size()) < width)
    s += std::string(static_cast<size_t>(width - static_cast<int>(s.size())), ' ');
  return last ? s : s + "  ";
}

}  // namespace

OutputFormat parse_output_format(const std::string& name) {
  if (name == "table") return OutputFormat::Table;
  if (name == "json") return OutputFormat::Json;
  if (name == "csv") return OutputFormat::Csv;
  throw Error(ErrorCode::ParseError, "unknown format " + name);
}

SweepAggregates compute_aggregates(const SweepResult& sweep) {
  SweepAggregates agg;
  agg.ess_histogram.assign(8, 0);
  agg.support_size_counts.assign(static_cast<size_t>(sweep.num_actions) + 1, 0);

  std::vector<double> totals, firsts;
  for (const auto& g : sweep.games) {
    size_t n_ess = g.run.ess.size();
    if (n_ess >= agg.ess_histogram.size()) agg.ess_histogram.resize(n_ess + 1, 0);
    ++agg.ess_histogram[n_ess];
    if (n_ess > 0) ++agg.games_with_ess;
    if (!g.run.fully_resolved) ++agg.unresolved_games;
    for (const auto& cert : g.run.ess) {
      size_t s = static_cast<size_t>(cert.strategy.support().size());
      if (s >= agg.support_size_counts.size()) agg.support_size_counts.resize(s + 1, 0);
      ++agg.support_size_counts[s];
    }
    agg.breakdown.total_sne += g.run.counts.total_sne;
    agg.breakdown.strict += g.run.counts.strict;
    agg.breakdown.pure_pass += g.run.counts.pure_pass;
    agg.breakdown.mixed_pass += g.run.counts.mixed_pass;
    totals.push_back(g.run.total_seconds);
    firsts.push_back(g.run.first_ess_seconds);
  }
  agg.runtime.mean_total = mean_of(totals);
  agg.runtime.ci_total = ci95_of(totals);
  agg.runtime.median_total = median_of(totals);
  agg.runtime.mean_first = mean_of(firsts);
  agg.runtime.ci_first = ci95_of(firsts);
  agg.runtime.median_first = median_of(firsts);
  return agg;
}

std::string sweep_to_json(const SweepResult& sweep) {
  json doc;
  doc["command"] = "experiment";
  doc["players"] = sweep.players;
  doc["actions"] = sweep.num_actions;
  doc["count"] = sweep.count;
  doc["seed"] = sweep.master_seed;
  doc["config"] = config_to_json(sweep.config);
  doc["games"] = json::array();
  for (const auto& g : sweep.games) {
    json gj = run_to_json(g.run);
    gj["index"] = g.index;
    gj["game_seed"] = g.seed;
    doc["games"].push_back(std::move(gj));
  }
  SweepAggregates agg = compute_aggregates(sweep);
  doc["aggregates"] = {
      {"ess_histogram", agg.ess_histogram},
      {"support_size_counts", agg.support_size_counts},
      {"breakdown",
       {{"total_sne", agg.breakdown.total_sne},
        {"strict", agg.breakdown.strict},
        {"pure_pass", agg.breakdown.pure_pass},
        {"mixed_pass", agg.breakdown.mixed_pass},
        {"total_ess", agg.breakdown.total_ess()}}},
      {"runtime",
       {{"mean_total", agg.runtime.mean_total},
        {"ci_total", agg.runtime.ci_total},
        {"median_total", agg.runtime.median_total},
        {"mean_first", agg.runtime.mean_first},
        {"ci_first", agg.runtime.ci_first},
        {"median_first", agg.runtime.median_first}}},
      {"games_with_ess", agg.games_with_ess},
      {"unresolved_games", agg.unresolved_games}};
  return doc.dump(1);
}

SweepResult sweep_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  if (!doc.is_object() || !doc.contains("games"))
    throw Error(ErrorCode::ParseError, "not an experiment results document");
  SweepResult sweep;
  try {
    sweep.players = doc.value("players", 3);
    sweep.num_actions = doc.at("actions").get<int>();
    sweep.count = doc.value("count", 0);
    sweep.master_seed = doc.value("seed", uint64_t{0});
    if (doc.contains("config")) sweep.config = config_from_json(doc["config"]);
    for (const auto& gj : doc["games"]) {
      SweepGame g;
      g.index = gj.value("index", 0);
      g.seed = gj.value("game_seed", uint64_t{0});
      g.run = run_from_json(gj);
      sweep.games.push_back(std::move(g));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, e.what());
  }
  return sweep;
}

void write_sweep(const SweepResult& sweep, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ParseError, "cannot open " + path + " for writing");
  out << sweep_to_json(sweep) << "\n";
}

SweepResult read_sweep(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return sweep_from_json(buf.str());
}

std::string format_solve_report(const SymmetricGame& game, const EssRun& run,
                                const DegeneracyReport* degeneracy,
                                OutputFormat format, bool include_timing) {
  if (format == OutputFormat::Json) {
    json doc;
    doc["game"] = game.name().empty() ? "unnamed" : game.name();
    doc["players"] = game.players();
    doc["actions"] = game.num_actions();
    json rj = run_to_json(run);
    if (!include_timing) {
      rj.erase("total_seconds");
      rj.erase("first_ess_seconds");
    }
    doc["result"] = std::move(rj);
    json ess = json::array();
    for (const auto& cert : run.ess) {
      ess.push_back({{"strategy", cert.strategy.probs()},
                     {"support", cert.strategy.support().actions},
                     {"path", cert.path_string()}});
    }
    doc["ess"] = std::move(ess);
    if (degeneracy) {
      json dj;
      dj["degenerate"] = degeneracy->degenerate;
      dj["fully_resolved"] = degeneracy->fully_resolved;
      json wj = json::array();
      for (const auto& w : degeneracy->witnesses)
        wj.push_back({{"support", w.support.actions}, {"d_star", w.d_star}});
      dj["witnesses"] = std::move(wj);
      doc["degeneracy"] = std::move(dj);
    }
    if (include_timing)
      doc["timing"] = {{"total_seconds", run.total_seconds},
                       {"first_ess_seconds", run.first_ess_seconds}};
    return doc.dump(1) + "\n";
  }

  std::ostringstream os;
  if (format == OutputFormat::Csv) {
    os << "kind,support,strategy,path,margin\n";
    for (const auto& rec : run.records) {
      if (!rec.sne) continue;
      os << "sne," << rec.support.to_string() << ","
         << rec.sne->to_string(7) << ","
         << (rec.certificate ? rec.certificate->path_string() : "unresolved") << ",";
      if (rec.certificate && rec.certificate->margin)
        os << fixed(*rec.certificate->margin, 9);
      os << "\n";
    }
    for (const auto& cert : run.ess) {
      os << "ess," << cert.strategy.support().to_string() << ","
         << cert.strategy.to_string(7) << "," << cert.path_string() << ",";
      if (cert.margin) os << fixed(*cert.margin, 9);
      os << "\n";
    }
    return os.str();
  }

  os << "game: " << (game.name().empty() ? "unnamed" : game.name())
     << " (n=" << game.players() << ", K=" << game.num_actions() << ")\n";

  std::vector<const SupportRecord*> sne_records;
  std::vector<const SupportRecord*> unresolved;
  for (const auto& rec : run.records) {
    if (rec.sne) sne_records.push_back(&rec);
    if (rec.unresolved()) unresolved.push_back(&rec);
  }

  os << "sne (" << sne_records.size() << "):\n";
  for (const auto* rec : sne_records) {
    std::string sup = rec->support.to_string();
    os << "  " << sup << std::string(sup.size() < 12 ? 12 - sup.size() : 1, ' ')
       << rec->sne->to_string(7) << "\n";
  }

  os << "ess (" << run.ess.size() << "):\n";
  if (run.ess.empty()) os << "  none\n";
  for (const auto& cert : run.ess) {
    std::string sup = cert.strategy.support().to_string();
    os << "  " << sup << std::string(sup.size() < 12 ? 12 - sup.size() : 1, ' ')
       << cert.strategy.to_string(7) << "  path=" << cert.path_string();
    if (cert.margin) os << "  margin=" << fixed(*cert.margin, 9);
    os << "\n";
  }

  os << "certificates:\n";
  for (const auto* rec : sne_records) {
    std::string sup = rec->support.to_string();
    os << "  " << sup << std::string(sup.size() < 12 ? 12 - sup.size() : 1, ' ');
    if (!rec->certificate) {
      os << "unresolved\n";
      continue;
    }
    const EssCertificate& c = *rec->certificate;
    os << (c.is_ess ? "ESS     " : "not-ess ") << " " << c.path_string();
    if (c.margin) os << "  margin=" << fixed(*c.margin, 9);
    os << "\n";
  }

  if (!unresolved.empty()) {
    os << "unresolved supports:";
    for (const auto* rec : unresolved) os << " " << rec->support.to_string();
    os << "\n";
  }
  if (!run.complete_enumeration) os << "enumeration: halted at first ess\n";

  if (degeneracy) {
    os << "degeneracy: " << (degeneracy->degenerate ? "degenerate" : "nondegenerate");
    if (!degeneracy->fully_resolved) os << " (incomplete)";
    os << "\n";
    for (const auto& w : degeneracy->witnesses) {
      os << "  witness " << w.support.to_string() << "  d*="
         << fixed(w.d_star, 9) << "\n";
    }
  }

  if (include_timing) {
    os << "timing: total=" << fixed(run.total_seconds, 4)
       << "s first_ess=" << fixed(run.first_ess_seconds, 4) << "s\n";
  }
  return os.str();
}

std::string format_runtime_table(std::span<const SweepResult> sweeps,
                                 OutputFormat format) {
  std::ostringstream os;
  if (format == OutputFormat::Csv) {
    os << "K,mean_total,ci_total,median_total,mean_first,ci_first,median_first\n";
    for (const auto& sweep : sweeps) {
      RuntimeStats r = compute_aggregates(sweep).runtime;
      os << sweep.num_actions << "," << fixed(r.mean_total, 4) << ","
         << fixed(r.ci_total, 4) << "," << fixed(r.median_total, 4) << ","
         << fixed(r.mean_first, 4) << "," << fixed(r.ci_first, 4) << ","
         << fixed(r.median_first, 4) << "\n";
    }
    return os.str();
  }
  os << "runtime (seconds)\n";
  os << csv_or_pad("K", 3, format, false) << csv_or_pad("mean total", 18, format, false)
     << csv_or_pad("median total", 13, format, false)
     << csv_or_pad("mean first", 18, format, false)
     << csv_or_pad("median first", 12, format, true) << "\n";
  for (const auto& sweep : sweeps) {
    RuntimeStats r = compute_aggregates(sweep).runtime;
    os << csv_or_pad(std::to_string(sweep.num_actions), 3, format, false)
       << csv_or_pad(fixed(r.mean_total, 4) + " +/- " + fixed(r.ci_total, 4), 18,
                     format, false)
       << csv_or_pad(fixed(r.median_total, 4), 13, format, false)
       << csv_or_pad(fixed(r.mean_first, 4) + " +/- " + fixed(r.ci_first, 4), 18,
                     format, false)
       << csv_or_pad(fixed(r.median_first, 4), 12, format, true) << "\n";
  }
  return os.str();
}

std::string format_histogram_table(std::span<const SweepResult> sweeps,
                                   OutputFormat format) {
  size_t width = 8;
  std::vector<SweepAggregates> aggs;
  for (const auto& sweep : sweeps) {
    aggs.push_back(compute_aggregates(sweep));
    width = std::max(width, aggs.back().ess_histogram.size());
  }
  std::ostringstream os;
  if (format != OutputFormat::Csv) os << "ess count histogram (games per count)\n";
  os << csv_or_pad("K", 3, format, false);
  for (size_t i = 0; i < width; ++i)
    os << csv_or_pad(std::to_string(i), 6, format, i + 1 == width);
  os << "\n";
  for (size_t s = 0; s < sweeps.size(); ++s) {
    os << csv_or_pad(std::to_string(sweeps[s].num_actions), 3, format, false);
    for (size_t i = 0; i < width; ++i) {
      long c = i < aggs[s].ess_histogram.size() ? aggs[s].ess_histogram[i] : 0;
      os << csv_or_pad(std::to_string(c), 6, format, i + 1 == width);
    }
    os << "\n";
  }
  return os.str();
}

std::string format_support_size_table(std::span<const SweepResult> sweeps,
                                      OutputFormat format) {
  size_t width = 2;
  std::vector<SweepAggregates> aggs;
  for (const auto& sweep : sweeps) {
    aggs.push_back(compute_aggregates(sweep));
    width = std::max(width, aggs.back().support_size_counts.size());
  }
  std::ostringstream os;
  if (format != OutputFormat::Csv) os << "ess support-size distribution\n";
  os << csv_or_pad("K", 3, format, false);
  for (size_t s = 1; s < width; ++s)
    os << csv_or_pad("s=" + std::to_string(s), 6, format, s + 1 == width);
  os << "\n";
  for (size_t i = 0; i < sweeps.size(); ++i) {
    os << csv_or_pad(std::to_string(sweeps[i].num_actions), 3, format, false);
    for (size_t s = 1; s < width; ++s) {
      long c = s < aggs[i].support_size_counts.size() ? aggs[i].support_size_counts[s] : 0;
      os << csv_or_pad(std::to_string(c), 6, format, s + 1 == width);
    }
    os << "\n";
  }
  return os.str();
}

std::string format_breakdown_table(std::span<const SweepResult> sweeps,
                                   OutputFormat format) {
  std::ostringstream os;
  if (format != OutputFormat::Csv) os << "screen breakdown\n";
  os << csv_or_pad("K", 3, format, false)
     << csv_or_pad("TotalSNE", 9, format, false)
     << csv_or_pad("StrictSNE", 10, format, false)
     << csv_or_pad("PurePass", 9, format, false)
     << csv_or_pad("MixedPass", 10, format, false)
     << csv_or_pad("TotalESS", 8, format, true) << "\n";
  for (const auto& sweep : sweeps) {
    ScreenCounts b = compute_aggregates(sweep).breakdown;
    os << csv_or_pad(std::to_string(sweep.num_actions), 3, format, false)
       << csv_or_pad(std::to_string(b.total_sne), 9, format, false)
       << csv_or_pad(std::to_string(b.strict), 10, format, false)
       << csv_or_pad(std::to_string(b.pure_pass), 9, format, false)
       << csv_or_pad(std::to_string(b.mixed_pass), 10, format, false)
       << csv_or_pad(std::to_string(b.total_ess()), 8, format, true) << "\n";
  }
  return os.str();
}

std::string format_per_game_table(const SweepResult& sweep, OutputFormat format) {
  std::ostringstream os;
  if (format != OutputFormat::Csv)
    os << "per-game summary (K=" << sweep.num_actions << ")\n";
  os << csv_or_pad("game", 5, format, false) << csv_or_pad("seed", 20, format, false)
     << csv_or_pad("sne", 4, format, false) << csv_or_pad("ess", 4, format, false)
     << csv_or_pad("ess strategies", 20, format, true) << "\n";
  for (const auto& g : sweep.games) {
    std::string strategies;
    for (size_t i = 0; i < g.run.ess.size(); ++i) {
      if (i) strategies += " ";
      strategies += g.run.ess[i].strategy.to_string(4);
    }
    if (format == OutputFormat::Csv) {
      std::string quoted = "\"" + strategies + "\"";
      strategies = std::move(quoted);
    }
    os << csv_or_pad(std::to_string(g.index), 5, format, false)
       << csv_or_pad(std::to_string(g.seed), 20, format, false)
       << csv_or_pad(std::to_string(g.run.counts.total_sne), 4, format, false)
       << csv_or_pad(std::to_string(g.run.ess.size()), 4, format, false)
       << csv_or_pad(strategies, 20, format, true) << "\n";
  }
  return os.str();
}

}  // namespace ess
