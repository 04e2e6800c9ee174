#include "shillguard/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <iterator>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "shillguard/calibration.hpp"
#include "shillguard/detector.hpp"
#include "shillguard/error.hpp"
#include "shillguard/rdakf.hpp"
#include "shillguard/rng.hpp"

namespace shillguard {

EvalReport score(const std::set<UserId>& predicted, const std::set<UserId>& truth) {
  EvalReport rep;
  for (const UserId u : predicted)
    truth.contains(u) ? ++rep.tp : ++rep.fp;
  for (const UserId u : truth)
    if (!predicted.contains(u)) ++rep.fn;
  if (rep.tp + rep.fp > 0)
    rep.precision = static_cast<double>(rep.tp) / static_cast<double>(rep.tp + rep.fp);
  if (rep.tp + rep.fn > 0)
    rep.recall = static_cast<double>(rep.tp) / static_cast<double>(rep.tp + rep.fn);
  return rep;
}

std::size_t ExperimentGrid::cell_count() const {
  return models.size() * attack_sizes.size() * filler_sizes.size() * conf_totals.size() *
         conf_avgs.size() * static_cast<std::size_t>(replicates);
}

namespace {

// Seed sub-streams per cell.
constexpr std::uint64_t kSampleStream = 1;
constexpr std::uint64_t kCampaignStream = 2;
constexpr std::uint64_t kTargetPickStream = 3;

struct CellConfig {
  AttackModel model;
  double attack_size;
  double filler_size;
  double conf_total;
  double conf_avg;
};

std::vector<CellConfig> expand_cells(const ExperimentGrid& grid) {
  std::vector<CellConfig> cells;
  cells.reserve(grid.cell_count());
  for (const AttackModel model : grid.models)
    for (const double size : grid.attack_sizes)
      for (const double filler : grid.filler_sizes)
        for (const double ct : grid.conf_totals)
          for (const double ca : grid.conf_avgs)
            for (int r = 0; r < grid.replicates; ++r)
              cells.push_back({model, size, filler, ct, ca});
  return cells;
}

}  // namespace

std::vector<CellResult> run_experiment(const Dataset& ds, const ExperimentGrid& grid,
                                       const TrainSpec& train, std::uint64_t master_seed) {
  const auto cells = expand_cells(grid);
  std::vector<CellResult> results(cells.size());
  if (cells.empty()) return results;

  // Shared read-only context for every cell.
  const GlobalStats stats = global_stats(ds);
  const std::vector<ItemProfile> profiles = build_profiles(stats);
  const double mean_count = mean_item_count(stats);
  const std::vector<BlockSeries> clean_series = partition_blocks(ds, train.block_days);
  std::unordered_map<ItemId, std::size_t> series_index;
  series_index.reserve(clean_series.size() * 2);
  for (std::size_t i = 0; i < clean_series.size(); ++i)
    series_index.emplace(clean_series[i].item, i);

  std::int64_t last_block = 0;
  for (const BlockSeries& s : clean_series)
    for (const BlockEntry& e : s.entries) last_block = std::max(last_block, e.block);

  const auto run_one = [&](const CellConfig& cell, std::uint64_t cell_seed) {
    // Training phase: thresholds from a stratified item sample of clean data.
    const auto sample = stratified_sample(profiles, mean_count, train.counts,
                                          derive_seed(cell_seed, kSampleStream));
    std::vector<DeviationRecord> train_devs;
    for (const ItemId item : sample) {
      const auto recs = run_item(clean_series[series_index.at(item)]);
      train_devs.insert(train_devs.end(), recs.begin(), recs.end());
    }
    const Thresholds th = train_thresholds(train_devs, cell.conf_total, cell.conf_avg);

    // Test phase: inject a seeded campaign and rescan every item from scratch.
    AttackConfig cfg;
    cfg.model = cell.model;
    cfg.intent = grid.intent;
    cfg.attack_size = cell.attack_size;
    cfg.filler_size = cell.filler_size;
    cfg.seed = derive_seed(cell_seed, kCampaignStream);
    cfg.targets = grid.targets.empty()
                      ? default_targets(ds, grid.target_count,
                                        derive_seed(cell_seed, kTargetPickStream))
                      : grid.targets;
    if (cell.model == AttackModel::Bandwagon)
      cfg.selected = grid.selected.empty() ? std::vector<ItemId>{most_rated_item(ds)}
                                           : grid.selected;
    cfg.injection_block = grid.injection_block >= 0 ? grid.injection_block : last_block / 2;

    const AttackCampaign campaign = generate(ds, stats, cfg, train.block_days);
    const InjectResult injected = inject(ds, campaign);
    const auto attacked_series = partition_blocks_serial(injected.data, train.block_days);
    const auto devs = run_items_serial(attacked_series);
    const auto flagged = flag_blocks(devs, th, grid.intent);
    const DetectionResult detection =
        extract_suspects(injected.data, train.block_days, flagged, grid.intent);

    const std::set<UserId> truth(injected.truth.begin(), injected.truth.end());
    EvalReport rep = score(detection.suspicious_users, truth);
    rep.model = cell.model;
    rep.intent = grid.intent;
    rep.attack_size = cell.attack_size;
    rep.filler_size = cell.filler_size;
    rep.conf_total = cell.conf_total;
    rep.conf_avg = cell.conf_avg;
    rep.seed = cell_seed;
    return CellResult{rep, detection.suspicious_users};
  };

  // exceptions may not cross the parallel region; surface the first one after
  std::exception_ptr failure = nullptr;

#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < cells.size(); ++i) {
    try {
      results[i] = run_one(cells[i], derive_seed(master_seed, static_cast<std::uint64_t>(i)));
    } catch (...) {
#pragma omp critical
      if (failure == nullptr) failure = std::current_exception();
    }
  }
  if (failure != nullptr) std::rethrow_exception(failure);
  return results;
}

namespace {

std::string format_metric(const std::optional<double>& m) {
  if (!m) return "NA";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", *m);
  return buf;
}

std::string format_config(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream& out, std::span<const CellResult> results) {
  out << "model,intent,attack_size,filler_size,conf_total,conf_avg,seed,tp,fp,fn,precision,"
         "recall\n";
  for (const CellResult& r : results) {
    const EvalReport& e = r.report;
    out << to_string(e.model) << ',' << to_string(e.intent) << ','
        << format_config(e.attack_size) << ',' << format_config(e.filler_size) << ','
        << format_config(e.conf_total) << ',' << format_config(e.conf_avg) << ',' << e.seed << ','
        << e.tp << ',' << e.fp << ',' << e.fn << ',' << format_metric(e.precision) << ','
        << format_metric(e.recall) << '\n';
  }
}

namespace {

std::string trim(std::string s) {
  const auto issp = [](unsigned char c) { return c == ' ' || c == '\t'; };
  while (!s.empty() && issp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(s[i])) ++i;
  return s.substr(i);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    part = trim(part);
    if (!part.empty()) out.push_back(part);
  }
  return out;
}

double to_double(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("bad numeric value for '" + key + "': " + s);
  }
}

std::int64_t to_int(const std::string& s, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError("bad integer value for '" + key + "': " + s);
  }
}

}  // namespace

ExperimentSpec parse_experiment_file(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("unterminated section header", line_no);
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value", line_no);
    const std::string key = trim(line.substr(0, eq));
    kv[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }

  ExperimentSpec spec;
  const auto get = [&kv](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  if (const auto* v = get("attack.models")) {
    spec.grid.models.clear();
    for (const auto& name : split_list(*v)) spec.grid.models.push_back(attack_model_from_string(name));
    if (spec.grid.models.empty()) throw ValidationError("attack.models is empty");
  }
  if (const auto* v = get("attack.intent")) spec.grid.intent = attack_intent_from_string(*v);
  if (const auto* v = get("attack.attack_sizes")) {
    spec.grid.attack_sizes.clear();
    for (const auto& s : split_list(*v)) spec.grid.attack_sizes.push_back(to_double(s, "attack_sizes"));
    if (spec.grid.attack_sizes.empty()) throw ValidationError("attack.attack_sizes is empty");
  }
  if (const auto* v = get("attack.filler_sizes")) {
    spec.grid.filler_sizes.clear();
    for (const auto& s : split_list(*v)) spec.grid.filler_sizes.push_back(to_double(s, "filler_sizes"));
    if (spec.grid.filler_sizes.empty()) throw ValidationError("attack.filler_sizes is empty");
  }
  if (const auto* v = get("attack.targets"))
    for (const auto& s : split_list(*v)) spec.grid.targets.push_back(to_int(s, "targets"));
  if (const auto* v = get("attack.target_count"))
    spec.grid.target_count = static_cast<std::size_t>(to_int(*v, "target_count"));
  if (const auto* v = get("attack.selected"))
    for (const auto& s : split_list(*v)) spec.grid.selected.push_back(to_int(s, "selected"));
  if (const auto* v = get("attack.block")) spec.grid.injection_block = to_int(*v, "block");

  if (const auto* v = get("thresholds.conf_total")) {
    spec.grid.conf_totals.clear();
    for (const auto& s : split_list(*v)) spec.grid.conf_totals.push_back(to_double(s, "conf_total"));
  }
  if (const auto* v = get("thresholds.conf_avg")) {
    spec.grid.conf_avgs.clear();
    for (const auto& s : split_list(*v)) spec.grid.conf_avgs.push_back(to_double(s, "conf_avg"));
  }

  if (const auto* v = get("train.fad")) spec.train.counts.fad = static_cast<int>(to_int(*v, "fad"));
  if (const auto* v = get("train.fashion"))
    spec.train.counts.fashion = static_cast<int>(to_int(*v, "fashion"));
  if (const auto* v = get("train.style"))
    spec.train.counts.style = static_cast<int>(to_int(*v, "style"));
  if (const auto* v = get("train.scallop"))
    spec.train.counts.scallop = static_cast<int>(to_int(*v, "scallop"));
  if (const auto* v = get("train.block_days"))
    spec.train.block_days = static_cast<int>(to_int(*v, "block_days"));

  if (const auto* v = get("run.replicates"))
    spec.grid.replicates = static_cast<int>(to_int(*v, "replicates"));
  if (spec.grid.replicates < 1) throw ValidationError("run.replicates must be >= 1");

  return spec;
}

}  // namespace shillguard
