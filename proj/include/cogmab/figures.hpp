#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cogmab/absorption.hpp"
#include "cogmab/analysis.hpp"
#include "cogmab/csv.hpp"
#include "cogmab/simulation.hpp"

namespace cogmab {

// Canonical experiment figures shipped with the CLI. Every figure is a pure
// function of (id, seed): rerunning writes byte-identical CSV data. The
// companion plot script only reads the CSV; it never recomputes results.
enum class FigureId {
  algocomp,    // centralized vs rank-randomized regret, normalized by ln n
  statcomp,    // mean vs opt statistic under the rank-randomized policy
  collisions,  // collision growth with and without knowledge of mu
  users,       // regret as the user count grows, channels fixed
  channels,    // regret as the channel count grows, users fixed
  fixed_ratio, // users and channels grow together at ratio 1/2
  fairness     // which user ends up on the best channel
};

inline const std::vector<std::pair<std::string, FigureId>>& figure_names() {
  static const std::vector<std::pair<std::string, FigureId>> names = {
      {"algocomp", FigureId::algocomp},   {"statcomp", FigureId::statcomp},
      {"collisions", FigureId::collisions}, {"users", FigureId::users},
      {"channels", FigureId::channels},   {"fixed-ratio", FigureId::fixed_ratio},
      {"fairness", FigureId::fairness}};
  return names;
}

inline std::optional<FigureId> parse_figure_id(const std::string& name) {
  for (const auto& [n, id] : figure_names())
    if (n == name) return id;
  return std::nullopt;
}

inline std::string figure_name(FigureId id) {
  for (const auto& [n, i] : figure_names())
    if (i == id) return n;
  return "?";
}

struct FigureSpec {
  FigureId id = FigureId::algocomp;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  bool overlays = true;
  std::int64_t reps_override = 0;  // 0 = figure default
};

namespace detail {

inline std::vector<double> evenly_spaced_mu(int channels) {
  std::vector<double> mu(static_cast<std::size_t>(channels));
  for (int i = 0; i < channels; ++i)
    mu[static_cast<std::size_t>(i)] =
        static_cast<double>(i + 1) / static_cast<double>(channels + 1);
  return mu;
}

inline ExperimentConfig canonical_config(int users, int channels,
                                         std::int64_t reps, std::uint64_t seed) {
  ExperimentConfig config;
  config.users = users;
  config.mu = evenly_spaced_mu(channels);
  config.horizon = 2500;
  config.replications = reps;
  config.seed = seed;
  return config;
}

inline void write_series_rows(CsvWriter& csv, const ExperimentResult& result,
                              const std::string& policy_label,
                              const ExperimentConfig& config) {
  for (std::size_t p = 0; p < result.checkpoints.size(); ++p) {
    csv.row(result.checkpoints[p], "regret", result.regret.mean[p],
            result.regret.stderr_[p], policy_label, config.users,
            config.channels(), config.seed);
    csv.row(result.checkpoints[p], "collisions", result.best_collisions.mean[p],
            result.best_collisions.stderr_[p], policy_label, config.users,
            config.channels(), config.seed);
  }
}

inline void write_plot_script(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << body;
  if (!out) throw std::runtime_error("error while writing: " + path);
}

inline std::string series_plot_script(const std::string& csv_name,
                                      const std::string& png_name,
                                      bool normalized) {
  std::string y = normalized ? "mean / math.log(slot)" : "mean";
  std::string ylabel = normalized ? "regret / ln(slots)" : "collisions";
  std::string metric = normalized ? "regret" : "collisions";
  return std::string("#!/usr/bin/env python3\n"
                     "# Plots " + csv_name + "; data is read as-is.\n"
                     "import csv, math\n"
                     "import matplotlib\n"
                     "matplotlib.use(\"Agg\")\n"
                     "import matplotlib.pyplot as plt\n\n"
                     "series, overlays = {}, {}\n"
                     "with open(\"" + csv_name + "\") as f:\n"
                     "    for r in csv.DictReader(f):\n"
                     "        slot, mean = int(r[\"slot\"]), float(r[\"mean\"])\n"
                     "        if r[\"metric\"] == \"" + metric + "\" and slot > 1:\n"
                     "            series.setdefault(r[\"policy\"], []).append((slot, " + y + "))\n"
                     "        elif slot == 0:\n"
                     "            overlays[(r[\"policy\"], r[\"metric\"])] = mean\n\n"
                     "plt.figure(figsize=(6, 4))\n"
                     "for label, pts in sorted(series.items()):\n"
                     "    pts.sort()\n"
                     "    plt.plot([p[0] for p in pts], [p[1] for p in pts], label=label)\n"
                     "for (label, metric), v in sorted(overlays.items()):\n"
                     "    plt.axhline(v, linestyle=\"--\", alpha=0.6, label=f\"{label} {metric}\")\n"
                     "plt.xlabel(\"slots\")\n"
                     "plt.ylabel(\"" + ylabel + "\")\n"
                     "plt.legend(fontsize=7)\n"
                     "plt.tight_layout()\n"
                     "plt.savefig(\"" + png_name + "\", dpi=150)\n"
                     "print(\"wrote " + png_name + "\")\n");
}

inline std::string sweep_plot_script(const std::string& csv_name,
                                     const std::string& png_name,
                                     const std::string& xlabel) {
  return std::string("#!/usr/bin/env python3\n"
                     "# Plots " + csv_name + "; data is read as-is.\n"
                     "import csv, math\n"
                     "import matplotlib\n"
                     "matplotlib.use(\"Agg\")\n"
                     "import matplotlib.pyplot as plt\n\n"
                     "series = {}\n"
                     "with open(\"" + csv_name + "\") as f:\n"
                     "    for r in csv.DictReader(f):\n"
                     "        key = (r[\"policy\"], r[\"metric\"])\n"
                     "        series.setdefault(key, []).append((int(r[\"value\"]), float(r[\"mean\"])))\n\n"
                     "plt.figure(figsize=(6, 4))\n"
                     "for (policy, metric), pts in sorted(series.items()):\n"
                     "    pts.sort()\n"
                     "    style = \"--\" if metric.startswith(\"lower\") else \"-\"\n"
                     "    plt.plot([p[0] for p in pts], [p[1] for p in pts], style,\n"
                     "             marker=\"o\", label=f\"{policy} {metric}\")\n"
                     "plt.xlabel(\"" + xlabel + "\")\n"
                     "plt.ylabel(\"regret / ln(slots)\")\n"
                     "plt.legend(fontsize=7)\n"
                     "plt.tight_layout()\n"
                     "plt.savefig(\"" + png_name + "\", dpi=150)\n"
                     "print(\"wrote " + png_name + "\")\n");
}

inline std::string fairness_plot_script(const std::string& csv_name,
                                        const std::string& png_name) {
  return std::string("#!/usr/bin/env python3\n"
                     "# Plots " + csv_name + "; data is read as-is.\n"
                     "import csv\n"
                     "import matplotlib\n"
                     "matplotlib.use(\"Agg\")\n"
                     "import matplotlib.pyplot as plt\n\n"
                     "users, freqs = [], []\n"
                     "with open(\"" + csv_name + "\") as f:\n"
                     "    for r in csv.DictReader(f):\n"
                     "        users.append(int(r[\"user\"]))\n"
                     "        freqs.append(float(r[\"frequency\"]))\n\n"
                     "plt.figure(figsize=(5, 4))\n"
                     "plt.bar(users, freqs)\n"
                     "plt.xticks(users)\n"
                     "plt.xlabel(\"user\")\n"
                     "plt.ylabel(\"frequency of ending on the best channel\")\n"
                     "plt.ylim(0, 0.5)\n"
                     "plt.tight_layout()\n"
                     "plt.savefig(\"" + png_name + "\", dpi=150)\n"
                     "print(\"wrote " + png_name + "\")\n");
}

}  // namespace detail

// Emits <out_dir>/<name>.csv and <out_dir>/<name>_plot.py for the requested
// figure. Returns the CSV path.
inline std::string write_figure(const FigureSpec& spec) {
  namespace fs = std::filesystem;
  const std::string name = figure_name(spec.id);
  fs::create_directories(spec.out_dir);
  const std::string csv_path = (fs::path(spec.out_dir) / (name + ".csv")).string();
  const std::string py_path =
      (fs::path(spec.out_dir) / (name + "_plot.py")).string();
  auto reps = [&](std::int64_t fallback) {
    return spec.reps_override > 0 ? spec.reps_override : fallback;
  };

  switch (spec.id) {
    case FigureId::algocomp: {
      ExperimentConfig config = detail::canonical_config(4, 9, reps(200), spec.seed);
      CsvWriter csv(csv_path);
      csv.raw_line("slot,metric,mean,stderr,policy,U,C,seed");
      config.policy = PolicyKind::centralized;
      detail::write_series_rows(csv, run_experiment(config), "centralized", config);
      config.policy = PolicyKind::rho_rand;
      detail::write_series_rows(csv, run_experiment(config), "rho-rand", config);
      if (spec.overlays) {
        csv.row(0, "lower_bound_coeff",
                asymptotic_lower_bound(config.mu, config.users, Regime::centralized),
                0.0, "centralized", config.users, config.channels(), config.seed);
        csv.row(0, "lower_bound_coeff",
                asymptotic_lower_bound(config.mu, config.users, Regime::distributed),
                0.0, "distributed", config.users, config.channels(), config.seed);
      }
      csv.close();
      detail::write_plot_script(
          py_path, detail::series_plot_script(name + ".csv", name + ".png", true));
      break;
    }
    case FigureId::statcomp: {
      ExperimentConfig config = detail::canonical_config(4, 9, reps(200), spec.seed);
      config.policy = PolicyKind::rho_rand;
      CsvWriter csv(csv_path);
      csv.raw_line("slot,metric,mean,stderr,policy,U,C,seed");
      config.statistic = Statistic::mean;
      detail::write_series_rows(csv, run_experiment(config), "rho-rand-mean", config);
      config.statistic = Statistic::opt;
      detail::write_series_rows(csv, run_experiment(config), "rho-rand-opt", config);
      if (spec.overlays) {
        csv.row(0, "lower_bound_coeff",
                asymptotic_lower_bound(config.mu, config.users, Regime::distributed),
                0.0, "distributed", config.users, config.channels(), config.seed);
      }
      csv.close();
      detail::write_plot_script(
          py_path, detail::series_plot_script(name + ".csv", name + ".png", true));
      break;
    }
    case FigureId::collisions: {
      ExperimentConfig config = detail::canonical_config(4, 9, reps(200), spec.seed);
      CsvWriter csv(csv_path);
      csv.raw_line("slot,metric,mean,stderr,policy,U,C,seed");
      config.policy = PolicyKind::rho_rand;
      detail::write_series_rows(csv, run_experiment(config), "rho-rand", config);
      config.policy = PolicyKind::perfect_rho_rand;
      detail::write_series_rows(csv, run_experiment(config), "perfect-rho-rand",
                                config);
      if (spec.overlays) {
        AbsorptionSpec chain{config.users, config.users};
        const double upsilon = expected_absorption_time(chain).value();
        csv.row(0, "known_mu_expectation",
                static_cast<double>(config.users) * upsilon, 0.0, "oracle",
                config.users, config.channels(), config.seed);
        csv.row(0, "known_mu_bound",
                static_cast<double>(compositions_bound(config.users).collision_bound),
                0.0, "oracle", config.users, config.channels(), config.seed);
      }
      csv.close();
      detail::write_plot_script(
          py_path, detail::series_plot_script(name + ".csv", name + ".png", false));
      break;
    }
    case FigureId::users:
    case FigureId::channels:
    case FigureId::fixed_ratio: {
      CsvWriter csv(csv_path);
      csv.raw_line("value,metric,mean,stderr,policy,U,C,seed");
      struct Point { int users; int channels; std::int64_t value; };
      std::vector<Point> grid;
      if (spec.id == FigureId::users) {
        for (int u = 2; u <= 8; ++u) grid.push_back({u, 9, u});
      } else if (spec.id == FigureId::channels) {
        for (int c = 2; c <= 9; ++c) grid.push_back({2, c, c});
      } else {
        for (int u = 1; u <= 4; ++u) grid.push_back({u, 2 * u, u});
      }
      for (PolicyKind policy : {PolicyKind::centralized, PolicyKind::rho_rand}) {
        const std::string label =
            policy == PolicyKind::centralized ? "centralized" : "rho-rand";
        for (const Point& pt : grid) {
          ExperimentConfig config =
              detail::canonical_config(pt.users, 9, reps(100), spec.seed);
          const std::vector<double> full = detail::evenly_spaced_mu(9);
          config.mu.assign(full.begin(), full.begin() + pt.channels);
          config.policy = policy;
          const ExperimentResult result = run_experiment(config);
          const double logn = std::log(static_cast<double>(config.horizon));
          csv.row(pt.value, "regret_norm", result.regret.mean.back() / logn,
                  result.regret.stderr_.back() / logn, label, config.users,
                  config.channels(), config.seed);
          if (spec.overlays && policy == PolicyKind::centralized) {
            csv.row(pt.value, "lower_centralized",
                    asymptotic_lower_bound(config.mu, config.users,
                                           Regime::centralized),
                    0.0, "bound", config.users, config.channels(), config.seed);
            csv.row(pt.value, "lower_distributed",
                    asymptotic_lower_bound(config.mu, config.users,
                                           Regime::distributed),
                    0.0, "bound", config.users, config.channels(), config.seed);
          }
        }
      }
      csv.close();
      const std::string xlabel = spec.id == FigureId::channels ? "channels C"
                                                               : "users U";
      detail::write_plot_script(
          py_path, detail::sweep_plot_script(name + ".csv", name + ".png", xlabel));
      break;
    }
    case FigureId::fairness: {
      ExperimentConfig config = detail::canonical_config(4, 9, reps(1000), spec.seed);
      config.policy = PolicyKind::rho_rand;
      const ExperimentResult result = run_experiment(config);
      CsvWriter csv(csv_path);
      csv.raw_line("user,frequency,count,policy,U,C,seed");
      for (int j = 0; j < config.users; ++j) {
        const double f = result.best_channel_frequency[static_cast<std::size_t>(j)];
        csv.row(j + 1, f,
                static_cast<std::int64_t>(std::llround(
                    f * static_cast<double>(config.replications))),
                "rho-rand", config.users, config.channels(), config.seed);
      }
      csv.close();
      detail::write_plot_script(
          py_path, detail::fairness_plot_script(name + ".csv", name + ".png"));
      break;
    }
  }
  return csv_path;
}

}  // namespace cogmab
