// Command-line frontend: phase reports, growth simulations, urn runs,
// coupled certification runs, convergence scans, and verification gates.
//
// Exit codes: 0 success, 1 statistical gate failure, 2 invariant or hard
// failure (bad config, violated coupling condition, unreadable input).

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pafit/coupling.hpp"
#include "pafit/graph.hpp"
#include "pafit/sweep.hpp"
#include "pafit/theory.hpp"
#include "pafit/urn.hpp"
#include "pafit/verify.hpp"

namespace fs = std::filesystem;
using namespace pafit;

namespace {

struct ModelOptions {
  std::string name = "dirac";
  double f = 1.0;
  double f1 = 1.0, f2 = 2.0, q1 = 0.5;
  double h = 1.0;
  double alpha = 1.0, beta = 3.0;
  double theta = 2.0;
  double rate = 1.0;
  std::vector<double> atoms, probs;

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--model", name, "dirac|twopoint|uniform|beta|zeta|exponential|finite")
        ->required();
    cmd->add_option("--f", f, "dirac fitness");
    cmd->add_option("--f1", f1, "twopoint lower fitness");
    cmd->add_option("--f2", f2, "twopoint upper fitness");
    cmd->add_option("--q1", q1, "twopoint lower-atom probability");
    cmd->add_option("--sup", h, "uniform supremum");
    cmd->add_option("--alpha", alpha, "beta shape alpha");
    cmd->add_option("--beta", beta, "beta shape beta");
    cmd->add_option("--theta", theta, "zeta family tail parameter");
    cmd->add_option("--rate", rate, "exponential rate");
    cmd->add_option("--atoms", atoms, "finite model atoms (ascending)")->delimiter(',');
    cmd->add_option("--probs", probs, "finite model probabilities")->delimiter(',');
  }

  FitnessModel build() const {
    if (name == "dirac") return dirac(f);
    if (name == "twopoint") return two_point(f1, f2, q1);
    if (name == "uniform") return uniform_fitness(h);
    if (name == "beta") return beta_fitness(alpha, beta);
    if (name == "zeta") return zeta_family(theta);
    if (name == "exponential") return exponential_fitness(rate);
    if (name == "finite") return finite_discrete(atoms, probs);
    throw CLI::ValidationError("--model", "unknown model '" + name + "'");
  }

  nlohmann::json descriptor() const {
    nlohmann::json j;
    j["name"] = name;
    if (name == "dirac") j["f"] = f;
    if (name == "twopoint") j.update({{"f1", f1}, {"f2", f2}, {"q1", q1}});
    if (name == "uniform") j["h"] = h;
    if (name == "beta") j.update({{"alpha", alpha}, {"beta", beta}});
    if (name == "zeta") j["theta"] = theta;
    if (name == "exponential") j["rate"] = rate;
    if (name == "finite") j.update({{"atoms", atoms}, {"probs", probs}});
    return j;
  }
};

std::string default_out_root() {
  const char* env = std::getenv("PAFIT_OUT_ROOT");
  return env ? env : "pafit-out";
}

fs::path make_run_dir(const std::string& root, const std::string& command) {
  fs::path dir = fs::path(root) / command;
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream os(p);
  if (!os) throw std::runtime_error("cannot write " + p.string());
  os << content;
}

void echo_config(CLI::App& app, const fs::path& dir) {
  write_file(dir / "config_echo.ini", app.config_to_str(true, true));
}

graph::CollectorConfig collector_from(const FitnessModel& model, int cells,
                                      const std::vector<double>& edges, int64_t track_first,
                                      const std::vector<double>& window,
                                      const std::vector<uint64_t>& checkpoints) {
  graph::CollectorConfig cfg;
  if (!edges.empty()) {
    cfg.cell_edges = edges;
  } else if (!model.discrete()) {
    if (model.bounded()) {
      cfg.cell_edges = graph::uniform_cells(model.sup, cells);
    } else {
      for (int i = 0; i <= cells; ++i)
        cfg.cell_edges.push_back(model.quantile(0.9999 * i / cells));
    }
  }
  cfg.track_first = track_first;
  if (window.size() == 2) {
    cfg.track_window_lo = window[0];
    cfg.track_window_hi = window[1];
  }
  cfg.extra_checkpoints = checkpoints;
  return cfg;
}

int validated_or_exit(const FitnessModel& model) {
  auto report = validate(model);
  if (!report.ok) {
    std::cerr << "model validation failed:\n";
    for (auto& f : report.failures) std::cerr << "  - " << f << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"preferential attachment with fitness: simulation and verification toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key/value config file; command-line flags win");
  app.allow_config_extras(false);

  std::string out_root = default_out_root();
  app.add_option("--out", out_root, "output root directory (env PAFIT_OUT_ROOT)");

  // --- phase -----------------------------------------------------------
  auto* cmd_phase = app.add_subcommand("phase", "limit laws and phase classification");
  cmd_phase->configurable(true);
  cmd_phase->fallthrough();
  ModelOptions phase_model;
  phase_model.add_flags(cmd_phase);
  int64_t phase_kmax = 10, phase_atoms = 20;
  int phase_cells = 20;
  cmd_phase->add_option("--k-max", phase_kmax, "degree rows in the eta table");
  cmd_phase->add_option("--atoms-max", phase_atoms, "atom rows for countable models");
  cmd_phase->add_option("--cells", phase_cells, "interval cells for continuous models");

  // --- simulate ---------------------------------------------------------
  auto* cmd_sim = app.add_subcommand("simulate", "run the growth process");
  cmd_sim->configurable(true);
  cmd_sim->fallthrough();
  ModelOptions sim_model;
  sim_model.add_flags(cmd_sim);
  uint64_t sim_n = 100000, sim_seeds = 1, sim_seed0 = 1;
  int64_t sim_track_first = 0;
  int sim_cells = 20;
  bool sim_serial = false;
  std::vector<double> sim_window, sim_edges;
  std::vector<uint64_t> sim_checkpoints;
  cmd_sim->add_option("--n", sim_n, "steps per seed");
  cmd_sim->add_option("--seeds", sim_seeds, "number of seeds");
  cmd_sim->add_option("--seed0", sim_seed0, "first seed");
  cmd_sim->add_option("--track-first", sim_track_first, "track the first K vertices");
  cmd_sim->add_option("--track-window", sim_window, "track vertices with fitness in [a,b]")
      ->delimiter(',');
  cmd_sim->add_option("--cells", sim_cells, "cells for continuous bucketing");
  cmd_sim->add_option("--edges", sim_edges, "explicit cell edges")->delimiter(',');
  cmd_sim->add_option("--checkpoints", sim_checkpoints, "extra checkpoints")->delimiter(',');
  cmd_sim->add_flag("--serial", sim_serial, "disable the seed-parallel worker pool");
  bool sim_log_edges = false;
  cmd_sim->add_flag("--log-edges", sim_log_edges, "record the edge list (capped at 1e5 steps)");

  // --- urn --------------------------------------------------------------
  auto* cmd_urn = app.add_subcommand("urn", "generalized urn runs and eigenpairs");
  cmd_urn->configurable(true);
  cmd_urn->fallthrough();
  ModelOptions urn_model;
  urn_model.add_flags(cmd_urn);
  std::string urn_builder = "degree";
  int64_t urn_k = 5, urn_I = 10;
  uint64_t urn_n = 0, urn_seed = 1;
  bool urn_perron = false;
  cmd_urn->add_option("--builder", urn_builder, "degree|fitness|joint|discretization");
  cmd_urn->add_option("--k", urn_k, "max tracked degree");
  cmd_urn->add_option("--I", urn_I, "discretization cells");
  cmd_urn->add_option("--n", urn_n, "simulation steps (0: none)");
  cmd_urn->add_option("--seed", urn_seed, "simulation seed");
  cmd_urn->add_flag("--perron", urn_perron, "print the dominant eigenpair");

  // --- couple -----------------------------------------------------------
  auto* cmd_couple = app.add_subcommand("couple", "coupled truncation certification runs");
  cmd_couple->configurable(true);
  cmd_couple->fallthrough();
  ModelOptions couple_model;
  couple_model.add_flags(cmd_couple);
  int64_t couple_I = 5;
  uint64_t couple_n = 10000, couple_seeds = 1, couple_seed0 = 1;
  bool couple_full = false;
  cmd_couple->add_option("--I", couple_I, "truncation index");
  cmd_couple->add_option("--n", couple_n, "steps per run");
  cmd_couple->add_option("--seeds", couple_seeds, "number of seeds");
  cmd_couple->add_option("--seed0", couple_seed0, "first seed");
  cmd_couple->add_flag("--full", couple_full, "couple the degree tails too");

  // --- scan --------------------------------------------------------------
  auto* cmd_scan = app.add_subcommand("scan", "truncation / discretization root convergence");
  cmd_scan->configurable(true);
  cmd_scan->fallthrough();
  ModelOptions scan_model;
  scan_model.add_flags(cmd_scan);
  std::vector<int64_t> scan_Is{10, 50, 250};
  cmd_scan->add_option("--I", scan_Is, "truncation/discretization indices")->delimiter(',');

  // --- verify -------------------------------------------------------------
  auto* cmd_verify = app.add_subcommand("verify", "statistical gates against the limit laws");
  cmd_verify->configurable(true);
  cmd_verify->fallthrough();
  ModelOptions verify_model;
  verify_model.add_flags(cmd_verify);
  uint64_t ver_n = 100000, ver_seeds = 3, ver_seed0 = 1;
  double ver_tol = 0.02;
  int64_t ver_kmin = 5;
  int ver_cells = 20;
  std::string ver_check = "links", ver_from;
  bool ver_serial = false;
  cmd_verify->add_option("--check", ver_check, "links|tails|vertex|condensation");
  cmd_verify->add_option("--n", ver_n, "steps per seed");
  cmd_verify->add_option("--seeds", ver_seeds, "number of seeds");
  cmd_verify->add_option("--seed0", ver_seed0, "first seed");
  cmd_verify->add_option("--tolerance", ver_tol, "gate tolerance");
  cmd_verify->add_option("--kmin", ver_kmin, "tail fit lower cutoff");
  cmd_verify->add_option("--cells", ver_cells, "cells for continuous models");
  cmd_verify->add_option("--from", ver_from, "read summary CSVs from a simulate output dir");
  double ver_eps = 0.05;
  cmd_verify->add_option("--eps", ver_eps, "condensation top-window width");
  cmd_verify->add_flag("--serial", ver_serial, "disable the seed-parallel worker pool");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // invalid configuration is a hard failure
  }

  try {
    if (*cmd_phase) {
      auto model = phase_model.build();
      if (int rc = validated_or_exit(model)) return rc;
      auto rep = classify_phase(model);
      std::vector<double> edges;
      if (!model.discrete()) {
        if (model.bounded()) {
          edges = graph::uniform_cells(model.sup, phase_cells);
        } else {
          for (int i = 0; i <= phase_cells; ++i)
            edges.push_back(model.quantile(0.9999 * i / phase_cells));
        }
      }
      auto law = limit_law(model, rep, phase_atoms, phase_kmax, edges);
      auto j = to_json(rep, law);
      j["model"] = phase_model.descriptor();
      auto dir = make_run_dir(out_root, "phase");
      echo_config(app, dir);
      write_file(dir / "phase.json", j.dump(2) + "\n");
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*cmd_sim) {
      auto model = sim_model.build();
      if (int rc = validated_or_exit(model)) return rc;
      auto cfg = collector_from(model, sim_cells, sim_edges, sim_track_first, sim_window,
                                sim_checkpoints);
      cfg.log_edges = sim_log_edges;
      auto dir = make_run_dir(out_root, "simulate");
      echo_config(app, dir);
      auto runs = sweep::run_seeds(model, sim_n, sim_seed0, sim_seeds, cfg, !sim_serial);
      for (auto& s : runs) {
        const std::string tag = "seed" + std::to_string(s.seed);
        write_file(dir / ("summary_" + tag + ".csv"), s.summary_csv());
        write_file(dir / ("degrees_" + tag + ".csv"), s.degrees_csv());
        if (!s.trajectories.empty())
          write_file(dir / ("trajectories_" + tag + ".csv"), s.trajectories_csv());
        if (!s.edges.empty()) write_file(dir / ("edges_" + tag + ".csv"), s.edges_csv());
        auto report = s.run_report();
        report["model"] = sim_model.descriptor();
        write_file(dir / ("run_report_" + tag + ".json"), report.dump(2) + "\n");
      }
      std::cout << "wrote " << runs.size() << " run(s) to " << dir << "\n";
      return 0;
    }

    if (*cmd_urn) {
      auto model = urn_model.build();
      urn::UrnSpec spec;
      if (urn_builder == "degree") {
        spec = urn::degree_urn(urn_k);
      } else {
        if (int rc = validated_or_exit(model)) return rc;
        if (urn_builder == "fitness") spec = urn::fitness_urn(model);
        else if (urn_builder == "joint") spec = urn::joint_urn(model, urn_k);
        else if (urn_builder == "discretization") spec = urn::discretization_urn(model, urn_I);
        else throw CLI::ValidationError("--builder", "unknown builder '" + urn_builder + "'");
      }
      auto dir = make_run_dir(out_root, "urn");
      echo_config(app, dir);
      write_file(dir / "urn_spec.json", spec.to_json().dump(2) + "\n");
      if (urn_perron) {
        auto pr = urn::perron(spec);
        nlohmann::json j;
        j["lambda1"] = pr.lambda1;
        j["v1"] = pr.v1;
        j["u1"] = pr.u1;
        j["iterations"] = pr.iterations;
        j["residual"] = pr.residual;
        write_file(dir / "perron.json", j.dump(2) + "\n");
        std::cout << j.dump(2) << "\n";
      }
      if (urn_n > 0) {
        Rng rng(urn_seed);
        auto traj = urn::run_urn(spec, urn_n, rng);
        std::ostringstream os;
        os << "step,bin,count\n";
        for (size_t c = 0; c < traj.checkpoint_steps.size(); ++c)
          for (size_t b = 0; b < traj.counts[c].size(); ++b)
            os << traj.checkpoint_steps[c] << "," << b << "," << traj.counts[c][b] << "\n";
        write_file(dir / ("trajectory_seed" + std::to_string(urn_seed) + ".csv"), os.str());
        std::cout << "urn run of " << urn_n << " steps written to " << dir << "\n";
      }
      return 0;
    }

    if (*cmd_couple) {
      auto model = couple_model.build();
      if (int rc = validated_or_exit(model)) return rc;
      auto dir = make_run_dir(out_root, "couple");
      echo_config(app, dir);
      size_t total_violations = 0;
      for (uint64_t s = 0; s < couple_seeds; ++s) {
        const uint64_t seed = couple_seed0 + s;
        auto res = couple_full ? coupling::coupled_degree_run(model, couple_I, couple_n, seed)
                               : coupling::coupled_triple_run(model, couple_I, couple_n, seed);
        total_violations += res.violations.size();
        write_file(dir / ("violations_seed" + std::to_string(seed) + ".jsonl"),
                   res.violations_jsonl());
      }
      std::cout << total_violations << " violation(s) across " << couple_seeds << " run(s)\n";
      return total_violations == 0 ? 0 : 2;
    }

    if (*cmd_scan) {
      auto model = scan_model.build();
      if (int rc = validated_or_exit(model)) return rc;
      auto rows = coupling::lambda0_convergence_scan(model, scan_Is);
      auto csv = coupling::scan_csv(rows);
      auto dir = make_run_dir(out_root, "scan");
      echo_config(app, dir);
      write_file(dir / "scan.csv", csv);
      std::cout << csv;
      return 0;
    }

    if (*cmd_verify) {
      auto model = verify_model.build();
      if (int rc = validated_or_exit(model)) return rc;
      auto rep = classify_phase(model);
      auto dir = make_run_dir(out_root, "verify");
      echo_config(app, dir);

      std::vector<graph::EmpiricalSummary> runs;
      graph::CollectorConfig cfg = collector_from(model, ver_cells, {}, 0, {}, {});
      if (!ver_from.empty()) {
        if (!model.discrete())
          throw std::runtime_error("--from reload supports discrete models only");
        // reload final link counts from summary CSVs written by `simulate`
        for (auto& entry : fs::directory_iterator(ver_from)) {
          const auto name = entry.path().filename().string();
          if (name.rfind("summary_seed", 0) != 0) continue;
          std::ifstream is(entry.path());
          std::string line;
          std::getline(is, line);
          if (line != "checkpoint,target,M,n,M_over_n")
            throw std::runtime_error("unrecognized summary header in " + name);
          graph::EmpiricalSummary s;
          s.model_name = model.name;
          s.discrete = model.discrete();
          s.cell_edges = cfg.cell_edges;
          while (std::getline(is, line)) {
            std::istringstream ls(line);
            std::string step_s, target_s, m_s, n_s, share_s;
            if (!std::getline(ls, step_s, ',') || !std::getline(ls, target_s, ',') ||
                !std::getline(ls, m_s, ',') || !std::getline(ls, n_s, ',') ||
                !std::getline(ls, share_s))
              throw std::runtime_error("corrupt summary row in " + name);
            uint64_t step = 0;
            try {
              step = std::stoull(step_s);
            } catch (...) {
              throw std::runtime_error("corrupt summary row in " + name);
            }
            if (step < s.steps) throw std::runtime_error("non-monotone checkpoints in " + name);
            if (step > s.steps) {
              s.steps = step;
              s.final_state.M.clear();
            }
            s.final_state.step = step;
            if (s.discrete) s.final_state.M[std::stoll(target_s)] = std::stoll(m_s);
          }
          if (s.steps == 0) throw std::runtime_error("empty summary " + name);
          runs.push_back(std::move(s));
        }
        if (runs.empty()) throw std::runtime_error("no summary files under " + ver_from);
      } else {
        if (ver_check == "vertex") cfg.track_first = 1;
        if (ver_check == "condensation") cfg.extra_checkpoints = {ver_n / 100, ver_n / 10};
        runs = sweep::run_seeds(model, ver_n, ver_seed0, ver_seeds, cfg, !ver_serial);
      }

      if (ver_check == "links") {
        auto report = verify::compare_link_shares(runs, model, rep, ver_tol);
        write_file(dir / "links.csv", report.csv());
        write_file(dir / "links.json", report.to_json().dump(2) + "\n");
        std::cout << report.csv();
        return report.pass ? 0 : 1;
      }
      if (ver_check == "tails") {
        bool pass = true;
        nlohmann::json out = nlohmann::json::array();
        const int64_t J = model.kind == FitnessKind::finite_discrete
                              ? static_cast<int64_t>(model.finite_size())
                              : 1;
        for (int64_t j = 1; j <= J; ++j) {
          std::vector<double> mles;
          for (auto& s : runs) mles.push_back(verify::estimate_tail_exponent(s, j, ver_kmin).mle);
          std::sort(mles.begin(), mles.end());
          const double med = mles[mles.size() / 2];
          const double want = tail_exponent(rep, model.atom_fitness(j));
          pass = pass && std::abs(med - want) <= ver_tol;
          out.push_back({{"atom", j}, {"mle", med}, {"predicted", want}});
        }
        write_file(dir / "tails.json", out.dump(2) + "\n");
        std::cout << out.dump(2) << "\n";
        return pass ? 0 : 1;
      }
      if (ver_check == "vertex") {
        nlohmann::json out = nlohmann::json::array();
        bool pass = true;
        for (auto& s : runs) {
          auto est = verify::vertex_exponent(s.trajectories.at(0), std::max<uint64_t>(ver_n / 1000, 8));
          const double want = s.trajectories.at(0).fitness / rep.lambda0;
          pass = pass && std::abs(est.slope - want) <= ver_tol;
          out.push_back({{"seed", s.seed}, {"slope", est.slope}, {"predicted", want}});
        }
        write_file(dir / "vertex.json", out.dump(2) + "\n");
        std::cout << out.dump(2) << "\n";
        return pass ? 0 : 1;
      }
      if (ver_check == "condensation") {
        nlohmann::json out = nlohmann::json::array();
        bool pass = true;
        for (auto& s : runs) {
          auto table = verify::condensation_scan(s, model, rep, ver_eps,
                                                 {ver_n / 100, ver_n / 10, ver_n});
          pass = pass && table.increasing;
          nlohmann::json rows = nlohmann::json::array();
          for (auto& r : table.rows)
            rows.push_back({{"n", r.n}, {"top_mass", r.top_mass}, {"max_fitness", r.max_fitness}});
          out.push_back({{"seed", s.seed},
                         {"increasing", table.increasing},
                         {"phase_warning", table.phase_warning},
                         {"rows", rows}});
        }
        write_file(dir / "condensation.json", out.dump(2) + "\n");
        std::cout << out.dump(2) << "\n";
        return pass ? 0 : 1;
      }
      throw CLI::ValidationError("--check", "unknown check '" + ver_check + "'");
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
