// Copyright 2026 The hetnoma Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: scenario generation, single simulations, parameter
// sweeps and the oracle verification suite.
//
// Exit codes: 0 success, 1 infeasibility or failed check, 2 usage or config
// error.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hetnoma/hetnoma.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using namespace hetnoma;

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

std::vector<std::string> split(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  for (const auto& s : split(list)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw ConfigError("not a number in --values: '" + s + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--values is empty");
  return out;
}

std::vector<Scheme> parse_schemes(const std::string& list) {
  std::vector<Scheme> out;
  for (const auto& s : split(list)) out.push_back(parse_scheme(s));
  if (out.empty()) throw ConfigError("--schemes is empty");
  return out;
}

void write_file(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write '" + path.string() + "'");
  body(os);
  if (!os) throw std::runtime_error("write to '" + path.string() + "' failed");
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir.string() + "': " + ec.message());
}

SimConfig with_seed(SimConfig cfg, std::optional<std::uint64_t> seed) {
  if (seed) cfg.seed = *seed;
  return cfg;
}

nlohmann::json scenario_document(const NetworkScenario& sc, const SimConfig& cfg) {
  nlohmann::json j = sc;
  j["config_hash"] = hex64(config_hash(cfg));
  j["seed"] = cfg.seed;
  return j;
}

struct GenerateArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out = ".";
};

int cmd_generate(const GenerateArgs& a) {
  const SimConfig cfg = with_seed(load_config(a.config), a.seed);
  const auto sc = generate_scenario(cfg, cfg.seed);
  const fs::path dir(a.out);
  prepare_dir(dir);
  write_file(dir / "scenario.json",
             [&](std::ostream& os) { os << scenario_document(sc, cfg).dump(2) << '\n'; });
  std::vector<Cluster> clusters;
  for (const auto& bs : sc.bss) {
    const auto c = cluster_bs(sc, bs.id, cfg.cluster_size, cfg.clustering);
    clusters.insert(clusters.end(), c.begin(), c.end());
  }
  write_file(dir / "clusters.csv", [&](std::ostream& os) {
    os << provenance_line(cfg, cfg.seed) << '\n';
    write_clusters_csv(os, clusters);
  });
  std::cout << "scenario " << hex64(scenario_hash(sc)) << ": " << sc.bss.size()
            << " BSs, " << sc.ues.size() << " UEs, " << clusters.size()
            << " clusters -> " << dir.string() << '\n';
  return kOk;
}

struct SimulateArgs {
  std::string config;
  std::string scheme = "noma";
  std::optional<std::uint64_t> seed;
  std::string out = ".";
  bool dump_candidates = false;
};

int cmd_simulate(const SimulateArgs& a) {
  const SimConfig cfg = with_seed(load_config(a.config), a.seed);
  const Scheme scheme = parse_scheme(a.scheme);
  const auto sc = generate_scenario(cfg, cfg.seed);
  const auto rep = run_scheme(sc, cfg, scheme);
  const fs::path dir(a.out);
  prepare_dir(dir);
  write_file(dir / "scenario.json",
             [&](std::ostream& os) { os << scenario_document(sc, cfg).dump(2) << '\n'; });
  write_file(dir / "report.json", [&](std::ostream& os) {
    os << report_to_json(rep, cfg, cfg.seed).dump(2) << '\n';
  });
  write_file(dir / "rates.csv",
             [&](std::ostream& os) { write_rates_csv(os, rep, cfg, cfg.seed); });
  write_file(dir / "trace.csv",
             [&](std::ostream& os) { write_trace_csv(os, rep, cfg, cfg.seed); });
  if (a.dump_candidates) {
    write_file(dir / "candidates.csv", [&](std::ostream& os) {
      os << provenance_line(cfg, cfg.seed) << '\n';
      for (const auto& co : rep.clusters) {
        os << "# bs=" << co.cluster.bs_id << " cluster=" << co.cluster.index << '\n';
        const auto in = derive_slave_params(co.cluster, co.theta, co.varpi, sc);
        write_candidates_csv(os, enumerate_candidates(in));
      }
    });
  }
  const auto s = metrics(rep);
  std::cout << to_string(rep.scheme) << ": sumrate " << rep.sumrate / 1e6 << " Mbps, "
            << s.qos_satisfied << "/" << s.num_ues << " QoS met, " << s.num_clusters
            << " clusters (" << s.oma_fallbacks << " OMA fallback), "
            << rep.outer_iterations << " outer iterations"
            << (rep.outer_converged && rep.all_inner_converged() ? "" : " (not converged)")
            << '\n';
  if (rep.globally_infeasible) {
    std::cerr << "global QoS infeasibility: " << rep.diagnosis << '\n';
    return kFailure;
  }
  return kOk;
}

struct SweepArgs {
  std::string config;
  std::string axis;
  std::string values;
  int seeds = 10;
  std::string schemes = "noma,oma,equal";
  unsigned threads = 0;
  std::string out = "-";
};

int cmd_sweep(const SweepArgs& a) {
  const SimConfig cfg = load_config(a.config);
  SweepSpec spec;
  spec.axis = parse_axis(a.axis);
  spec.values = parse_values(a.values);
  spec.seeds = a.seeds;
  spec.schemes = parse_schemes(a.schemes);
  const auto rows = run_sweep(cfg, spec, a.threads);
  if (a.out == "-") {
    write_sweep_csv(std::cout, rows, spec.axis, cfg);
  } else {
    const fs::path path(a.out);
    if (path.has_parent_path()) prepare_dir(path.parent_path());
    write_file(path, [&](std::ostream& os) { write_sweep_csv(os, rows, spec.axis, cfg); });
  }
  return kOk;
}

struct VerifyArgs {
  std::string config;
  int instances = 100;
  std::uint64_t seed = 1;
  double eps_max = 1e-3;
  double grid_step = 1e-3;
  bool psi_flip = false;
  std::string out;
};

int cmd_verify(const VerifyArgs& a) {
  const SimConfig cfg = a.config.empty() ? SimConfig{} : load_config(a.config);
  if (a.instances < 0) throw ConfigError("--instances must be >= 0");
  if (a.instances == 0) {
    std::cerr << "warning: no instances requested, nothing was verified\n";
    std::cout << "verify: PASS (vacuous)\n";
    return kOk;
  }
  oracle::VerifyOptions opt;
  opt.instances = a.instances;
  opt.seed = a.seed;
  opt.eps_max = a.eps_max;
  opt.grid_step = a.grid_step;
  opt.psi_sign = a.psi_flip ? -1.0 : 1.0;
  const auto lines = oracle::run_verification(cfg, opt);

  if (!a.out.empty()) {
    write_file(a.out, [&](std::ostream& os) {
      os << provenance_line(cfg, a.seed) << '\n';
      os << "instance,check,closed_form_sumrate_bps,oracle_sumrate_bps,max_abs_diff,pass,detail\n";
      for (const auto& l : lines) {
        os << l.instance << ',' << l.check << ',' << format_double(l.closed_form_sumrate)
           << ',' << format_double(l.oracle_sumrate) << ','
           << format_double(l.max_abs_diff) << ',' << (l.pass ? 1 : 0) << ','
           << l.detail << '\n';
      }
    });
  }
  std::map<std::string, std::pair<int, int>> tally;  // check -> (failed, total)
  std::vector<std::string> order;
  for (const auto& l : lines) {
    auto [it, fresh] = tally.try_emplace(l.check, 0, 0);
    if (fresh) order.push_back(l.check);
    ++it->second.second;
    if (!l.pass) {
      if (++it->second.first <= 3) {
        std::cout << "FAIL instance " << l.instance << ' ' << l.check << ": closed form "
                  << l.closed_form_sumrate << ", oracle " << l.oracle_sumrate
                  << ", max|dw| " << l.max_abs_diff << ' ' << l.detail << '\n';
      }
    }
  }
  bool ok = true;
  for (const auto& check : order) {
    const auto [failed, total] = tally.at(check);
    ok = ok && failed == 0;
    std::cout << check << ": " << total - failed << '/' << total << " pass\n";
  }
  std::cout << "verify: " << (ok ? "PASS" : "FAIL") << '\n';
  return ok ? kOk : kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hetnoma: imperfect-SIC NOMA power and bandwidth allocation in HetNets"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Draw a scenario and its clusters");
  generate->add_option("--config", gen.config, "JSON config file")->required();
  generate->add_option("--seed", gen.seed, "Override the config seed");
  generate->add_option("--out", gen.out, "Output directory");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Run one allocation scheme");
  simulate->add_option("--config", sim.config, "JSON config file")->required();
  simulate->add_option("--scheme", sim.scheme, "noma, oma or equal");
  simulate->add_option("--seed", sim.seed, "Override the config seed");
  simulate->add_option("--out", sim.out, "Output directory");
  simulate->add_flag("--dump-candidates", sim.dump_candidates,
                     "Write every active-set candidate of the final clusters");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter over seeds");
  sweep->add_option("--config", sw.config, "JSON config file")->required();
  sweep->add_option("--axis", sw.axis, "epsilon, p_delta, S, U, beta, K or ici_db")
      ->required();
  sweep->add_option("--values", sw.values, "Comma-separated axis values")->required();
  sweep->add_option("--seeds", sw.seeds, "Scenarios per value");
  sweep->add_option("--schemes", sw.schemes, "Comma-separated schemes");
  sweep->add_option("--threads", sw.threads, "Worker threads (0 = all cores)");
  sweep->add_option("--out", sw.out, "Output CSV ('-' for stdout)");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Check the closed forms against the oracles");
  verify->add_option("--config", ver.config, "JSON config file (default: built-in)");
  verify->add_option("--instances", ver.instances, "Number of random instances");
  verify->add_option("--seed", ver.seed, "Instance generator seed");
  verify->add_option("--eps-max", ver.eps_max, "Upper end of the random SIC error");
  verify->add_option("--grid-step", ver.grid_step, "Grid oracle resolution");
  verify->add_flag("--inject-psi-flip", ver.psi_flip,
                   "Negate the SIC-error correction (mutation check)");
  verify->add_option("--out", ver.out, "Per-check CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*generate) return cmd_generate(gen);
    if (*simulate) return cmd_simulate(sim);
    if (*sweep) return cmd_sweep(sw);
    if (*verify) return cmd_verify(ver);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}
