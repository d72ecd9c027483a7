// cogmab command line front end.
//
//   cogmab simulate  run one Monte Carlo experiment, write a metrics CSV
//   cogmab bounds    evaluate the closed-form regret bounds for a setting
//   cogmab figure    reproduce one of the canonical figures (CSV + plot script)
//   cogmab oracle    expected time for rank randomization to settle
//
// Exit codes: 0 success, 1 invalid configuration (message names the violated
// constraint), 2 usage errors.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cogmab/cogmab.hpp"

namespace {

using namespace cogmab;

std::vector<double> parse_mu_list(const std::string& text) {
  std::vector<double> mu;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    mu.push_back(std::stod(item));
  }
  return mu;
}

std::vector<double> default_mu(int channels) {
  std::vector<double> mu(static_cast<std::size_t>(channels));
  for (int i = 0; i < channels; ++i)
    mu[static_cast<std::size_t>(i)] =
        static_cast<double>(i + 1) / static_cast<double>(channels + 1);
  return mu;
}

int parallelism_from_env() {
  const char* env = std::getenv("COGMAB_THREADS");
  if (env == nullptr) return 0;
  const int v = std::atoi(env);
  return v > 0 ? v : 0;
}

struct SimulateFlags {
  std::string policy = "rho-rand";
  std::string statistic = "mean";
  std::string feedback = "transmission";
  int users = 1;
  int channels = 9;
  std::string mu_list;
  std::int64_t slots = 2500;
  std::int64_t reps = 1;
  std::uint64_t seed = 1;
  double threshold_scale = 1.0;
  std::string out;
};

PolicyKind parse_policy(const std::string& name) {
  if (name == "single") return PolicyKind::single;
  if (name == "centralized") return PolicyKind::centralized;
  if (name == "rho-rand") return PolicyKind::rho_rand;
  if (name == "rho-est") return PolicyKind::rho_est;
  if (name == "perfect-rho-rand") return PolicyKind::perfect_rho_rand;
  throw std::invalid_argument("unknown policy: " + name);
}

ExperimentConfig build_config(const SimulateFlags& flags) {
  ExperimentConfig config;
  config.users = flags.users;
  config.mu = flags.mu_list.empty() ? default_mu(flags.channels)
                                    : parse_mu_list(flags.mu_list);
  if (static_cast<int>(config.mu.size()) != flags.channels)
    throw std::invalid_argument(
        "--mu lists " + std::to_string(config.mu.size()) +
        " channels but --channels says " + std::to_string(flags.channels));
  config.horizon = flags.slots;
  config.replications = flags.reps;
  config.policy = parse_policy(flags.policy);
  config.statistic = flags.statistic == "opt" ? Statistic::opt : Statistic::mean;
  config.feedback = flags.feedback == "overlap" ? FeedbackMode::sensing_overlap
                                                : FeedbackMode::transmission;
  config.threshold_scale = flags.threshold_scale;
  config.seed = flags.seed;
  config.parallelism = parallelism_from_env();
  return config;
}

int cmd_simulate(const SimulateFlags& flags) {
  const ExperimentConfig config = build_config(flags);
  const ExperimentResult result = run_experiment(config);

  CsvWriter csv(flags.out);
  csv.raw_line("slot,metric,mean,stderr,policy,U,C,seed");
  auto emit = [&](const char* metric, const SeriesStat& s) {
    for (std::size_t p = 0; p < result.checkpoints.size(); ++p)
      csv.row(result.checkpoints[p], metric, s.mean[p], s.stderr_[p],
              flags.policy, config.users, config.channels(), config.seed);
  };
  emit("regret", result.regret);
  emit("collisions", result.best_collisions);
  emit("wrong_order", result.wrong_order);
  emit("successes", result.successes);
  if (config.policy == PolicyKind::rho_est) emit("uhat_max", result.uhat_max);
  csv.close();
  std::cout << "wrote " << flags.out << " (" << result.checkpoints.size()
            << " checkpoints, " << config.replications << " replications)\n";
  return 0;
}

struct BoundsFlags {
  std::string mu_list;
  int users = 1;
  int channels = 9;
  double slots = 2500;
  std::string regime = "all";
  std::string out;        // empty = stdout
  std::string terms_out;  // optional per-term breakdown
};

int cmd_bounds(const BoundsFlags& flags) {
  const std::vector<double> mu = flags.mu_list.empty()
                                     ? default_mu(flags.channels)
                                     : parse_mu_list(flags.mu_list);
  ChannelParams probe(mu);
  const int users = flags.users;
  if (users < 1 || users > static_cast<int>(mu.size()))
    throw std::invalid_argument("need 1 <= users U <= channels C");
  if (flags.regime == "single" && users != 1)
    throw std::invalid_argument("the single-user regime requires --users 1");
  const bool want_single = (flags.regime == "all" && users == 1) ||
                           flags.regime == "single";
  const bool want_cent = flags.regime == "all" || flags.regime == "centralized";
  const bool want_dist = flags.regime == "all" || flags.regime == "distributed";

  std::vector<std::pair<std::string, double>> rows;
  std::vector<BoundReport> reports;
  if (want_single) {
    rows.emplace_back("lower_single_coeff",
                      asymptotic_lower_bound(mu, users, Regime::single));
    reports.push_back(
        finite_time_upper_bound(mu, users, flags.slots, BoundKind::single_gmean));
    rows.emplace_back("upper_single_gmean", reports.back().value);
  }
  if (want_cent) {
    rows.emplace_back("lower_centralized_coeff",
                      asymptotic_lower_bound(mu, users, Regime::centralized));
    reports.push_back(finite_time_upper_bound(mu, users, flags.slots,
                                              BoundKind::centralized_gmean));
    rows.emplace_back("upper_centralized_gmean", reports.back().value);
  }
  if (want_dist) {
    rows.emplace_back("lower_distributed_coeff",
                      asymptotic_lower_bound(mu, users, Regime::distributed));
    for (BoundKind kind :
         {BoundKind::uworst_time, BoundKind::wrong_order, BoundKind::collisions}) {
      reports.push_back(finite_time_upper_bound(mu, users, flags.slots, kind));
      const char* label = kind == BoundKind::uworst_time ? "upper_uworst_time"
                          : kind == BoundKind::wrong_order ? "upper_wrong_order"
                                                           : "upper_collisions";
      rows.emplace_back(label, reports.back().value);
    }
    const CompositionsBound comp = compositions_bound(users);
    rows.emplace_back("compositions_count", static_cast<double>(comp.compositions));
    rows.emplace_back("compositions_collision_bound",
                      static_cast<double>(comp.collision_bound));
  }

  std::ostringstream text;
  text << "bound,value\n";
  for (const auto& [name, value] : rows)
    text << name << "," << format_double(value) << "\n";
  if (flags.out.empty()) {
    std::cout << text.str();
  } else {
    std::ofstream out(flags.out, std::ios::binary);
    out << text.str();
    if (!out) throw std::runtime_error("cannot write " + flags.out);
    std::cout << "wrote " << flags.out << "\n";
  }
  if (!flags.terms_out.empty()) {
    CsvWriter terms(flags.terms_out);
    terms.raw_line("bound,term,value");
    const char* names[] = {"single_gmean", "centralized_gmean", "uworst_time",
                           "wrong_order", "collisions"};
    for (const BoundReport& report : reports)
      for (const auto& [term, value] : report.per_term)
        terms.row(names[static_cast<int>(report.kind)], term, value);
    terms.close();
    std::cout << "wrote " << flags.terms_out << "\n";
  }
  return 0;
}

struct OracleFlags {
  int users = 2;
  int channels = 2;
  std::int64_t mc_runs = 0;
  std::uint64_t seed = 1;
};

int cmd_oracle(const OracleFlags& flags) {
  if (flags.users < 1 || flags.channels < 1)
    throw std::invalid_argument("--users and --channels must be >= 1");
  AbsorptionSpec spec{flags.users, flags.channels};
  const std::optional<double> exact = expected_absorption_time(spec);
  std::cout << "users " << flags.users << ", channels " << flags.channels << "\n";
  if (!exact.has_value()) {
    std::cout << "expected settling time: diverges (no collision-free "
                 "configuration exists)\n";
    return 0;
  }
  std::cout << "expected settling time (exact solve): " << format_double(*exact)
            << " slots\n";
  if (flags.users <= flags.channels) {
    const CompositionsBound comp = compositions_bound(flags.users);
    std::cout << "geometric bound via compositions: "
              << format_double(static_cast<double>(comp.compositions) - 1.0)
              << " slots\n";
  }
  if (flags.mc_runs > 0) {
    const McEstimate mc =
        mc_absorption_time(flags.users, flags.channels, flags.mc_runs, flags.seed);
    std::cout << "monte carlo (" << mc.runs << " runs): " << format_double(mc.mean)
              << " +/- " << format_double(1.96 * mc.stderr_) << " (95% CI)\n";
  }
  return 0;
}

struct FigureFlags {
  std::string id;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  std::int64_t reps = 0;
  bool no_overlays = false;
};

int cmd_figure(const FigureFlags& flags) {
  const std::optional<FigureId> id = parse_figure_id(flags.id);
  if (!id.has_value()) {
    std::ostringstream msg;
    msg << "unknown figure id '" << flags.id << "'; valid ids:";
    for (const auto& [name, fid] : figure_names()) msg << " " << name;
    std::cerr << msg.str() << "\n";
    return 2;
  }
  FigureSpec spec;
  spec.id = *id;
  spec.out_dir = flags.out_dir;
  spec.seed = flags.seed;
  spec.reps_override = flags.reps;
  spec.overlays = !flags.no_overlays;
  const std::string csv = write_figure(spec);
  std::cout << "wrote " << csv << " and companion plot script\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulator and bound calculator for distributed channel "
               "selection with collision feedback"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from a key=value file");

  SimulateFlags sim;
  CLI::App* simulate = app.add_subcommand("simulate", "run a Monte Carlo experiment");
  simulate->add_option("--policy", sim.policy,
                       "single|centralized|rho-rand|rho-est|perfect-rho-rand")
      ->check(CLI::IsMember({"single", "centralized", "rho-rand", "rho-est",
                             "perfect-rho-rand"}));
  simulate->add_option("--statistic", sim.statistic, "mean|opt")
      ->check(CLI::IsMember({"mean", "opt"}));
  simulate->add_option("--feedback", sim.feedback, "transmission|overlap")
      ->check(CLI::IsMember({"transmission", "overlap"}));
  simulate->add_option("--users", sim.users, "number of secondary users");
  simulate->add_option("--channels", sim.channels, "number of channels");
  simulate->add_option("--mu", sim.mu_list,
                       "comma-separated availability probabilities "
                       "(default: evenly spaced)");
  simulate->add_option("--slots", sim.slots, "horizon in slots");
  simulate->add_option("--reps", sim.reps, "number of replications");
  simulate->add_option("--seed", sim.seed, "master seed");
  simulate->add_option("--threshold-scale", sim.threshold_scale,
                       "scale of the estimate-increment threshold (rho-est)");
  simulate->add_option("--out", sim.out, "output CSV path")->required();

  BoundsFlags bnd;
  CLI::App* bounds = app.add_subcommand("bounds", "evaluate closed-form bounds");
  bounds->add_option("--mu", bnd.mu_list, "comma-separated availabilities");
  bounds->add_option("--users", bnd.users, "number of secondary users");
  bounds->add_option("--channels", bnd.channels, "number of channels");
  bounds->add_option("--slots", bnd.slots, "horizon for the finite-time bounds");
  bounds->add_option("--regime", bnd.regime, "all|single|centralized|distributed")
      ->check(CLI::IsMember({"all", "single", "centralized", "distributed"}));
  bounds->add_option("--out", bnd.out, "write the table here instead of stdout");
  bounds->add_option("--terms-out", bnd.terms_out, "per-term breakdown CSV");

  OracleFlags orc;
  CLI::App* oracle =
      app.add_subcommand("oracle", "expected settling time of rank randomization");
  oracle->add_option("--users", orc.users, "number of users");
  oracle->add_option("--channels", orc.channels, "number of channels randomized over");
  oracle->add_option("--mc", orc.mc_runs, "cross-check with this many Monte Carlo runs");
  oracle->add_option("--seed", orc.seed, "Monte Carlo seed");

  FigureFlags fig;
  CLI::App* figure =
      app.add_subcommand("figure", "reproduce a canonical figure (CSV + plot script)");
  figure->add_option("id", fig.id, "figure id (see --help for the list)")->required();
  figure->add_option("--out-dir", fig.out_dir, "output directory");
  figure->add_option("--seed", fig.seed, "master seed");
  figure->add_option("--reps", fig.reps, "override the replication count");
  figure->add_flag("--no-overlays", fig.no_overlays, "omit bound overlays");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (simulate->parsed()) {
      if (static_cast<int>(sim.channels) < sim.users)
        throw std::invalid_argument("need users U <= channels C, got U=" +
                                    std::to_string(sim.users) + " > C=" +
                                    std::to_string(sim.channels));
      return cmd_simulate(sim);
    }
    if (bounds->parsed()) return cmd_bounds(bnd);
    if (oracle->parsed()) return cmd_oracle(orc);
    if (figure->parsed()) return cmd_figure(fig);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
