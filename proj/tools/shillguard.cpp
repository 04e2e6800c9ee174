#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "shillguard/attackgen.hpp"
#include "shillguard/calibration.hpp"
#include "shillguard/dataset.hpp"
#include "shillguard/detector.hpp"
#include "shillguard/error.hpp"
#include "shillguard/evaluation.hpp"
#include "shillguard/rdakf.hpp"
#include "shillguard/taxonomy.hpp"

namespace {

using namespace shillguard;

std::string fmt9(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// All file outputs go through a temp file plus rename.
void atomic_write(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    if (!out) throw IoError("write failed: " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move " + tmp + " into place: " + ec.message());
}

std::vector<ItemId> parse_id_list(const std::string& s) {
  std::vector<ItemId> ids;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    try {
      std::size_t pos = 0;
      ids.push_back(std::stoll(part, &pos));
      if (pos != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw ValidationError("bad item id '" + part + "'");
    }
  }
  return ids;
}

std::set<UserId> read_user_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::set<UserId> users;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      std::size_t pos = 0;
      users.insert(std::stoll(line, &pos));
      if (pos != line.size()) throw std::invalid_argument(line);
    } catch (const std::exception&) {
      throw ParseError("bad user id '" + line + "'", line_no);
    }
  }
  return users;
}

std::string users_to_text(const std::set<UserId>& users) {
  std::ostringstream out;
  for (const UserId u : users) out << u << '\n';
  return out.str();
}

std::string normalize_key(std::string key) {
  for (char& c : key)
    if (c == '_') c = '-';
  return key;
}

// Expands "--config FILE" into synthesized "--key=value" arguments placed
// before the user's own flags, so explicit flags always win. The file holds
// key=value lines, optionally under [subcommand] sections; unsectioned keys
// apply to every subcommand that has the option.
std::vector<std::string> apply_config(const std::vector<std::string>& args,
                                      const CLI::App& app) {
  std::string config_path;
  std::string subcommand;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) throw ValidationError("--config needs a file argument");
      config_path = args[++i];
      continue;
    }
    if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
      continue;
    }
    if (subcommand.empty() && !a.empty() && a.front() != '-') subcommand = a;
    rest.push_back(a);
  }
  if (config_path.empty()) return rest;

  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open config file " + config_path);
  std::map<std::string, std::string> values;  // key -> value, section-resolved
  std::string section;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    line = line.substr(first, last - first + 1);
    if (line.front() == '[' && line.back() == ']') {
      section = line.substr(1, line.size() - 2);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value in config", line_no);
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t");
      return s.substr(b, e - b + 1);
    };
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      values.try_emplace(key, value);  // sectioned keys take precedence
    } else if (section == subcommand) {
      values[key] = value;
    }
  }

  // drop keys the command line already sets
  std::set<std::string> given;
  for (const std::string& a : rest) {
    if (a.rfind("--", 0) != 0) continue;
    const auto eq = a.find('=');
    given.insert(normalize_key(eq == std::string::npos ? a.substr(2) : a.substr(2, eq - 2)));
  }

  // unsectioned keys only apply where the subcommand actually has the option
  const CLI::App* sub = nullptr;
  for (const CLI::App* s : app.get_subcommands([](const CLI::App*) { return true; }))
    if (s->get_name() == subcommand) sub = s;

  std::vector<std::string> out;
  if (!subcommand.empty()) out.push_back(subcommand);
  for (const auto& [key, value] : values) {
    if (given.contains(key)) continue;
    if (sub != nullptr && sub->get_option_no_throw("--" + key) == nullptr) continue;
    out.push_back("--" + key + "=" + value);
  }
  bool skipped_sub = false;
  for (const std::string& a : rest) {
    if (!skipped_sub && a == subcommand) {
      skipped_sub = true;
      continue;
    }
    out.push_back(a);
  }
  return out;
}

// Options shared by the subcommands that read a rating log.
struct DataArgs {
  std::string path;
  int block_days = 4;
  int rmin = 1;
  int rmax = 5;
  bool allow_duplicates = false;

  Dataset load() const {
    LoadOptions opts;
    opts.scale = RatingScale{rmin, rmax};
    opts.allow_duplicates = allow_duplicates;
    return load_ratings_file(path, opts);
  }
};

void add_config_option(CLI::App* sub) {
  // handled by apply_config() before parsing; registered so --help lists it
  static std::string ignored;
  sub->add_option("--config", ignored, "Read option defaults from a config file");
}

void add_data_options(CLI::App* sub, DataArgs& args) {
  add_config_option(sub);
  sub->add_option("--data", args.path, "Rating log (TSV: user item rating timestamp)")
      ->required();
  sub->add_option("--block-days", args.block_days, "Time-block width in days")
      ->default_val(4)
      ->check(CLI::PositiveNumber);
  sub->add_option("--rmin", args.rmin, "Rating scale minimum")->default_val(1);
  sub->add_option("--rmax", args.rmax, "Rating scale maximum")->default_val(5);
  sub->add_flag("--allow-duplicates", args.allow_duplicates,
                "Accept duplicate (user, item) pairs");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"shillguard - Kalman-filter shilling-attack detection workbench"};

  static const std::set<std::string> known = {"stats",  "classify", "attack", "deviations",
                                              "train",  "detect",   "eval",   "experiment"};
  if (argc >= 2 && argv[1][0] != '-' && !known.contains(argv[1])) {
    std::cerr << "shillguard: unknown subcommand '" << argv[1] << "'\n";
    return 2;
  }
  if (argc == 1) {
    std::cerr << app.help();
    return 2;
  }

  // --- stats ---
  auto* stats_cmd = app.add_subcommand("stats", "Summarize a rating log");
  auto stats_args = std::make_shared<DataArgs>();
  auto stats_out = std::make_shared<std::string>();
  add_data_options(stats_cmd, *stats_args);
  stats_cmd->add_option("--out", *stats_out, "Write per-item statistics TSV here");
  stats_cmd->callback([stats_args, stats_out]() {
    const Dataset ds = stats_args->load();
    std::ostringstream sum;
    sum << "ratings=" << ds.size() << "\nusers=" << ds.users.size()
        << "\nitems=" << ds.items.size() << "\nt_start=" << ds.t_start << "\nt_end=" << ds.t_end
        << '\n';
    if (!ds.empty()) {
      const GlobalStats st = global_stats(ds);
      const auto series = partition_blocks(ds, stats_args->block_days);
      sum << "blocks=" << distinct_block_count(series) << "\nmean=" << fmt9(st.mean)
          << "\nstd=" << fmt9(st.stddev) << '\n';
      if (!stats_out->empty()) {
        std::ostringstream tsv;
        for (const ItemId item : ds.items) {
          const ItemStats& s = st.items.at(item);
          tsv << item << '\t' << s.count << '\t' << fmt9(s.mean) << '\t' << fmt9(s.stddev) << '\t'
              << s.first_ts << '\t' << s.last_ts << '\n';
        }
        atomic_write(*stats_out, tsv.str());
      }
    } else {
      sum << "blocks=0\n";
    }
    std::cout << sum.str();
  });

  // --- classify ---
  auto* classify_cmd = app.add_subcommand("classify", "Item taxonomy from life cycles");
  auto classify_args = std::make_shared<DataArgs>();
  auto classify_out = std::make_shared<std::string>();
  add_data_options(classify_cmd, *classify_args);
  classify_cmd->add_option("--out", *classify_out, "Write the classification TSV here");
  classify_cmd->callback([classify_args, classify_out]() {
    const Dataset ds = classify_args->load();
    const GlobalStats st = global_stats(ds);
    const auto profiles = build_profiles(st);
    const double nbar = mean_item_count(st);
    std::ostringstream tsv;
    for (const ItemProfile& p : profiles)
      tsv << p.item << '\t' << to_string(classify(p, nbar)) << '\t' << fmt9(p.zscore) << '\t'
          << p.n << '\n';
    if (classify_out->empty())
      std::cout << tsv.str();
    else
      atomic_write(*classify_out, tsv.str());
  });

  // --- attack ---
  auto* attack_cmd = app.add_subcommand("attack", "Generate and inject an attack campaign");
  auto attack_args = std::make_shared<DataArgs>();
  struct AttackCli {
    std::string model = "average";
    std::string intent = "push";
    double attack_size = 0.10;
    double filler_size = 0.05;
    std::string targets;
    std::size_t target_count = 5;
    std::string selected;
    std::int64_t block = -1;
    std::uint64_t seed = 0;
    std::string out;
    std::string labels_out;
  };
  auto attack_cli = std::make_shared<AttackCli>();
  add_data_options(attack_cmd, *attack_args);
  attack_cmd->add_option("--model", attack_cli->model, "random, average, or bandwagon")
      ->default_val("average");
  attack_cmd->add_option("--intent", attack_cli->intent, "push or nuke")->default_val("push");
  attack_cmd->add_option("--attack-size", attack_cli->attack_size,
                         "Profiles as a fraction of genuine users")
      ->default_val(0.10);
  attack_cmd->add_option("--filler-size", attack_cli->filler_size,
                         "Fillers as a fraction of the item catalog")
      ->default_val(0.05);
  attack_cmd->add_option("--targets", attack_cli->targets,
                         "Comma-separated target item ids (default: seeded pick)");
  attack_cmd->add_option("--target-count", attack_cli->target_count,
                         "Size of the default target pick")
      ->default_val(5);
  attack_cmd->add_option("--selected", attack_cli->selected,
                         "Comma-separated selected item ids (bandwagon; default: most rated)");
  attack_cmd->add_option("--block", attack_cli->block,
                         "Injection block index (default: middle block)");
  attack_cmd->add_option("--seed", attack_cli->seed, "Campaign seed")
      ->envname("SHILLGUARD_SEED");
  attack_cmd->add_option("--out", attack_cli->out, "Write the injected TSV here")->required();
  attack_cmd->add_option("--labels-out", attack_cli->labels_out,
                         "Write the ground-truth user ids here")
      ->required();
  attack_cmd->callback([attack_args, attack_cli]() {
    const Dataset ds = attack_args->load();
    const GlobalStats st = global_stats(ds);

    AttackConfig cfg;
    cfg.model = attack_model_from_string(attack_cli->model);
    cfg.intent = attack_intent_from_string(attack_cli->intent);
    cfg.attack_size = attack_cli->attack_size;
    cfg.filler_size = attack_cli->filler_size;
    cfg.seed = attack_cli->seed;
    cfg.targets = attack_cli->targets.empty()
                      ? default_targets(ds, attack_cli->target_count, attack_cli->seed)
                      : parse_id_list(attack_cli->targets);
    if (cfg.model == AttackModel::Bandwagon)
      cfg.selected = attack_cli->selected.empty() ? std::vector<ItemId>{most_rated_item(ds)}
                                                  : parse_id_list(attack_cli->selected);
    if (attack_cli->block >= 0) {
      cfg.injection_block = attack_cli->block;
    } else {
      const BlockGrid grid = make_grid(ds, attack_args->block_days);
      cfg.injection_block = grid.block_of(ds.t_end) / 2;
    }

    const AttackCampaign campaign = generate(ds, st, cfg, attack_args->block_days);
    const InjectResult injected = inject(ds, campaign);

    std::ostringstream tsv;
    write_ratings(tsv, injected.data);
    atomic_write(attack_cli->out, tsv.str());
    const std::set<UserId> labels(campaign.labels.begin(), campaign.labels.end());
    atomic_write(attack_cli->labels_out, users_to_text(labels));

    std::cout << "profiles=" << campaign.profiles.size()
              << "\ninjected_ratings=" << campaign.rating_count()
              << "\nblock=" << cfg.injection_block << "\ntargets=";
    for (std::size_t i = 0; i < cfg.targets.size(); ++i)
      std::cout << (i ? "," : "") << cfg.targets[i];
    std::cout << "\nselected=";
    for (std::size_t i = 0; i < cfg.selected.size(); ++i)
      std::cout << (i ? "," : "") << cfg.selected[i];
    std::cout << '\n';
  });

  // --- deviations ---
  auto* dev_cmd = app.add_subcommand("deviations", "Per-item filter deviations");
  auto dev_args = std::make_shared<DataArgs>();
  auto dev_out = std::make_shared<std::string>();
  add_data_options(dev_cmd, *dev_args);
  dev_cmd->add_option("--out", *dev_out, "Write the deviation TSV here");
  dev_cmd->callback([dev_args, dev_out]() {
    const Dataset ds = dev_args->load();
    const auto series = partition_blocks(ds, dev_args->block_days);
    const auto devs = run_items(series);
    std::ostringstream tsv;
    for (const DeviationRecord& d : devs)
      tsv << d.item << '\t' << d.block << '\t' << d.n_P << '\t' << fmt9(d.v) << '\t'
          << fmt9(d.v_A) << '\n';
    if (dev_out->empty())
      std::cout << tsv.str();
    else
      atomic_write(*dev_out, tsv.str());
  });

  // --- train ---
  auto* train_cmd = app.add_subcommand("train", "Train detection thresholds on clean data");
  auto train_args = std::make_shared<DataArgs>();
  struct TrainCli {
    StratifiedCounts counts;
    double conf_total = 0.99;
    double conf_avg = 0.90;
    std::uint64_t seed = 0;
    std::string out = "thresholds.txt";
  };
  auto train_cli = std::make_shared<TrainCli>();
  add_data_options(train_cmd, *train_args);
  train_cmd->add_option("--fad", train_cli->counts.fad, "Fad items in the training sample")
      ->default_val(12);
  train_cmd->add_option("--fashion", train_cli->counts.fashion,
                        "Fashion items in the training sample")
      ->default_val(6);
  train_cmd->add_option("--style", train_cli->counts.style, "Style items in the training sample")
      ->default_val(32);
  train_cmd->add_option("--scallop", train_cli->counts.scallop,
                        "Scallop items in the training sample")
      ->default_val(50);
  train_cmd->add_option("--conf-total", train_cli->conf_total,
                        "Confidence level for the total deviation")
      ->default_val(0.99);
  train_cmd->add_option("--conf-avg", train_cli->conf_avg,
                        "Confidence level for the average deviation")
      ->default_val(0.90);
  train_cmd->add_option("--seed", train_cli->seed, "Stratified-sample seed")
      ->envname("SHILLGUARD_SEED");
  train_cmd->add_option("--out", train_cli->out, "Write the thresholds file here")
      ->default_val("thresholds.txt");
  train_cmd->callback([train_args, train_cli]() {
    const Dataset ds = train_args->load();
    const GlobalStats st = global_stats(ds);
    const auto profiles = build_profiles(st);
    const double nbar = mean_item_count(st);
    const auto sample = stratified_sample(profiles, nbar, train_cli->counts, train_cli->seed);

    const auto series = partition_blocks(ds, train_args->block_days);
    std::unordered_map<ItemId, std::size_t> index;
    for (std::size_t i = 0; i < series.size(); ++i) index.emplace(series[i].item, i);
    std::vector<DeviationRecord> devs;
    for (const ItemId item : sample) {
      const auto recs = run_item(series[index.at(item)]);
      devs.insert(devs.end(), recs.begin(), recs.end());
    }

    const Thresholds th = train_thresholds(devs, train_cli->conf_total, train_cli->conf_avg);
    std::ostringstream text;
    save_thresholds(text, th);
    atomic_write(train_cli->out, text.str());

    std::cout << "sample_items=" << sample.size() << "\nsample_count=" << th.sample_count
              << "\neta=" << fmt9(th.eta) << "\neta_A=" << fmt9(th.eta_A) << '\n';
  });

  // --- detect ---
  auto* detect_cmd = app.add_subcommand("detect", "Flag blocks and extract suspicious users");
  auto detect_args = std::make_shared<DataArgs>();
  struct DetectCli {
    std::string thresholds;
    std::string intent = "push";
    std::string flagged_out;
    std::string users_out;
  };
  auto detect_cli = std::make_shared<DetectCli>();
  add_data_options(detect_cmd, *detect_args);
  detect_cmd->add_option("--thresholds", detect_cli->thresholds, "Trained thresholds file")
      ->required();
  detect_cmd->add_option("--intent", detect_cli->intent, "push or nuke")->default_val("push");
  detect_cmd->add_option("--flagged-out", detect_cli->flagged_out,
                         "Write the flagged-blocks TSV here");
  detect_cmd->add_option("--users-out", detect_cli->users_out,
                         "Write the suspicious-user list here");
  detect_cmd->callback([detect_args, detect_cli]() {
    const Dataset ds = detect_args->load();
    const Thresholds th = load_thresholds_file(detect_cli->thresholds);
    const AttackIntent intent = attack_intent_from_string(detect_cli->intent);

    const auto series = partition_blocks(ds, detect_args->block_days);
    const auto devs = run_items(series);
    const auto flagged = flag_blocks(devs, th, intent);
    const DetectionResult result = extract_suspects(ds, detect_args->block_days, flagged, intent);

    if (!detect_cli->flagged_out.empty()) {
      std::ostringstream tsv;
      for (const FlaggedBlock& f : result.flagged)
        tsv << f.item << '\t' << f.block << '\t' << fmt9(f.v) << '\t' << fmt9(f.v_A) << '\n';
      atomic_write(detect_cli->flagged_out, tsv.str());
    }
    if (!detect_cli->users_out.empty())
      atomic_write(detect_cli->users_out, users_to_text(result.suspicious_users));

    std::cout << "records=" << devs.size() << "\nflagged=" << result.flagged.size()
              << "\nsuspicious_ratings=" << result.suspicious_ratings.size()
              << "\nsuspicious_users=" << result.suspicious_users.size() << '\n';
  });

  // --- eval ---
  auto* eval_cmd = app.add_subcommand("eval", "Score a prediction against ground truth");
  struct EvalCli {
    std::string predicted;
    std::string truth;
    std::string out;
  };
  auto eval_cli = std::make_shared<EvalCli>();
  add_config_option(eval_cmd);
  eval_cmd->add_option("--predicted", eval_cli->predicted, "Suspicious-user list")->required();
  eval_cmd->add_option("--truth", eval_cli->truth, "Ground-truth user list")->required();
  eval_cmd->add_option("--out", eval_cli->out, "Also write the metrics here");
  eval_cmd->callback([eval_cli]() {
    const auto predicted = read_user_list(eval_cli->predicted);
    const auto truth = read_user_list(eval_cli->truth);
    const EvalReport rep = score(predicted, truth);
    std::ostringstream text;
    text << "tp=" << rep.tp << "\nfp=" << rep.fp << "\nfn=" << rep.fn << "\nprecision="
         << (rep.precision ? fmt9(*rep.precision) : "NA") << "\nrecall="
         << (rep.recall ? fmt9(*rep.recall) : "NA") << '\n';
    std::cout << text.str();
    if (!eval_cli->out.empty()) atomic_write(eval_cli->out, text.str());
  });

  // --- experiment ---
  auto* exp_cmd = app.add_subcommand("experiment", "Run a seeded attack/detection grid");
  auto exp_args = std::make_shared<DataArgs>();
  struct ExpCli {
    std::string grid;
    std::string out;
    std::string outdir;
    std::uint64_t seed = 0;
  };
  auto exp_cli = std::make_shared<ExpCli>();
  add_data_options(exp_cmd, *exp_args);
  exp_cmd->add_option("--grid", exp_cli->grid, "Grid config file (key=value sections)")
      ->required();
  exp_cmd->add_option("--out", exp_cli->out, "Write the report CSV here")->required();
  exp_cmd->add_option("--outdir", exp_cli->outdir,
                      "Directory for per-cell suspicious-user lists");
  exp_cmd->add_option("--seed", exp_cli->seed, "Master seed")->envname("SHILLGUARD_SEED");
  exp_cmd->callback([exp_args, exp_cli]() {
    const Dataset ds = exp_args->load();
    std::ifstream grid_in(exp_cli->grid);
    if (!grid_in) throw IoError("cannot open " + exp_cli->grid);
    ExperimentSpec spec = parse_experiment_file(grid_in);
    spec.train.block_days = exp_args->block_days;

    const auto results = run_experiment(ds, spec.grid, spec.train, exp_cli->seed);

    std::ostringstream csv;
    write_report_csv(csv, results);
    atomic_write(exp_cli->out, csv.str());

    if (!exp_cli->outdir.empty()) {
      std::filesystem::create_directories(exp_cli->outdir);
      for (std::size_t i = 0; i < results.size(); ++i) {
        char name[48];
        std::snprintf(name, sizeof name, "cell_%04zu_users.txt", i);
        atomic_write(std::filesystem::path(exp_cli->outdir) / name,
                     users_to_text(results[i].suspicious_users));
      }
    }
    std::cout << "cells=" << results.size() << "\nout=" << exp_cli->out << '\n';
  });

  try {
    const std::vector<std::string> raw(argv + 1, argv + argc);
    const std::vector<std::string> expanded = apply_config(raw, app);
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const std::string& s : expanded) cargs.push_back(s.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  } catch (const IoError& e) {
    std::cerr << "shillguard: " << e.what() << '\n';
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "shillguard: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "shillguard: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
