// graphlim: batch harness for graph-limit diagnostics.
//
// Subcommands: generate, distance, quotients, energy, ld, regularity,
// convergence-report. Every report embeds the resolved config (seed
// included) and is deterministic given that config. Exit codes: 0 ok,
// 2 validation, 3 budget, 4 infeasible ensemble.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "graphlim/io.hpp"
#include "graphlim/models.hpp"
#include "graphlim/rearrangement.hpp"

using namespace graphlim;

namespace {

struct CommonOpts {
  std::string input, input2, model_path, out, format = "json", target_path, partition_path;
  double budget = 1e6;
  long long samples = 0;
  double mesh = 0.0;
  uint64_t seed = 1;
};

void emit(const json& report, const std::string& out) {
  if (out.empty())
    std::cout << report.dump(2) << "\n";
  else
    save_json_file(out, report);
}

json resolved_config(const CLI::App* cmd, const CommonOpts& o) {
  json cfg;
  cfg["subcommand"] = cmd->get_name();
  cfg["seed"] = o.seed;
  cfg["budget"] = o.budget;
  if (!o.input.empty()) cfg["input"] = o.input;
  if (!o.input2.empty()) cfg["input2"] = o.input2;
  if (!o.model_path.empty()) cfg["model"] = o.model_path;
  if (o.samples > 0) cfg["samples"] = o.samples;
  if (o.mesh > 0.0) cfg["mesh"] = o.mesh;
  cfg["format"] = o.format;
  return cfg;
}

Mat parse_block_matrix(const std::string& spec) {
  // rows separated by ';', entries by ','
  std::vector<std::vector<double>> rows;
  std::stringstream ss(spec);
  std::string row;
  while (std::getline(ss, row, ';')) {
    std::vector<double> vals;
    std::stringstream rs(row);
    std::string cell;
    while (std::getline(rs, cell, ',')) vals.push_back(std::stod(cell));
    rows.push_back(vals);
  }
  int k = static_cast<int>(rows.size());
  Mat m(k, k);
  for (int i = 0; i < k; ++i) {
    if (static_cast<int>(rows[i].size()) != k)
      throw ValidationError("block matrix spec must be square");
    for (int j = 0; j < k; ++j) m(i, j) = rows[i][j];
  }
  return m;
}

std::vector<std::pair<double, double>> parse_k_table(const std::string& spec) {
  // "0.5:8,0.1:40" -> {(0.5, 8), (0.1, 40)}
  std::vector<std::pair<double, double>> out;
  std::stringstream ss(spec);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    auto pos = cell.find(':');
    if (pos == std::string::npos) throw ValidationError("K table entries must be eps:K pairs");
    out.emplace_back(std::stod(cell.substr(0, pos)), std::stod(cell.substr(pos + 1)));
  }
  return out;
}

struct FamilyOpts {
  std::string family;
  int n = 100;
  double p = 0.5;
  std::string block_spec;
  double rho = 0.1;
  double alpha = 0.5, beta = 0.0;
  int cn = 10;
  int cycle_len = 4, copies = 1;
  std::string wrandom_input;
};

WeightedGraph generate_family(const FamilyOpts& f, uint64_t seed) {
  if (f.family == "er") return erdos_renyi(f.n, f.p, seed);
  if (f.family == "sbm") {
    if (f.block_spec.empty()) throw ValidationError("sbm needs --B");
    return sbm(f.n, parse_block_matrix(f.block_spec), f.rho, seed);
  }
  if (f.family == "powerlaw") return power_law(f.n, f.alpha, f.beta, seed);
  if (f.family == "wrandom") {
    if (f.wrandom_input.empty()) throw ValidationError("wrandom needs --input with a graphon");
    return w_random(graphon_from_json(load_json_file(f.wrandom_input)), f.n, f.rho, seed);
  }
  if (f.family == "clique") return clique_plus_isolated(f.n, f.cn);
  if (f.family == "cycles") return cycle_union(f.cycle_len, f.copies);
  throw ValidationError("unknown family: " + f.family);
}

json family_config(const FamilyOpts& f) {
  json j;
  j["family"] = f.family;
  j["n"] = f.n;
  if (f.family == "er") j["p"] = f.p;
  if (f.family == "sbm") {
    j["B"] = f.block_spec;
    j["rho"] = f.rho;
  }
  if (f.family == "powerlaw") {
    j["alpha"] = f.alpha;
    j["beta"] = f.beta;
  }
  if (f.family == "wrandom") {
    j["rho"] = f.rho;
    j["W"] = f.wrandom_input;
  }
  if (f.family == "clique") j["cn"] = f.cn;
  if (f.family == "cycles") {
    j["len"] = f.cycle_len;
    j["copies"] = f.copies;
  }
  return j;
}

void add_family_flags(CLI::App* cmd, FamilyOpts& f) {
  cmd->add_option("--family", f.family, "er | sbm | powerlaw | wrandom | clique | cycles")
      ->required();
  cmd->add_option("--n", f.n, "vertex count");
  cmd->add_option("--p", f.p, "edge probability (er)");
  cmd->add_option("--B", f.block_spec, "block matrix, rows ';'-separated (sbm)");
  cmd->add_option("--rho", f.rho, "target density (sbm, wrandom)");
  cmd->add_option("--alpha", f.alpha, "power-law exponent");
  cmd->add_option("--beta", f.beta, "power-law scaling exponent");
  cmd->add_option("--cn", f.cn, "clique size (clique)");
  cmd->add_option("--len", f.cycle_len, "cycle length, 4 or 6 (cycles)");
  cmd->add_option("--copies", f.copies, "number of disjoint cycles (cycles)");
}

StepGraphon load_graphon_or_normalize(const std::string& path, bool as_graphon) {
  json j = load_json_file(path);
  if (as_graphon || j.contains("step_lengths")) return graphon_from_json(j);
  return normalize(graph_from_json(j));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"graphlim: executable diagnostics for sparse graph limits"};
  app.require_subcommand(1);

  CommonOpts o;
  FamilyOpts fam;
  bool as_graphon = false;
  bool exact = false, anneal = false;
  int q = 2, k_target = 16, iters = 200, restarts = 8;
  double cap = 1e6, eps = 0.3, c_param = 2.0, eta = 0.1, p_norm = 2.0, eps_ball = 0.01;
  std::string check = "lp", ktable_spec = "0.5:8,0.1:40,0.05:80,0.01:400", method = "enum";
  std::string sizes_spec = "100,200,400";
  int n_seeds = 1;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", o.out, "output path (stdout when omitted)");
    cmd->add_option("--seed", o.seed, "random seed (always recorded)");
    cmd->add_option("--budget", o.budget, "enumeration / alignment budget");
    cmd->add_option("--format", o.format, "json | csv");
  };

  CLI::App* generate = app.add_subcommand("generate", "sample a graph from a model family");
  add_family_flags(generate, fam);
  add_common(generate);

  CLI::App* distance = app.add_subcommand("distance", "certified normalized cut distance");
  distance->add_option("--input", o.input)->required();
  distance->add_option("--input2", o.input2)->required();
  distance->add_flag("--graphon", as_graphon, "inputs are step graphons");
  add_common(distance);

  CLI::App* quot = app.add_subcommand("quotients", "quotient sets and Hausdorff distances");
  quot->add_option("--input", o.input)->required();
  quot->add_option("--input2", o.input2, "optional second object for a Hausdorff comparison");
  quot->add_flag("--graphon", as_graphon, "inputs are step graphons");
  quot->add_option("--q", q, "number of parts");
  quot->add_option("--cap", cap, "enumeration cap for graph quotient sets");
  quot->add_option("--mesh", o.mesh, "simplex grid mesh for graphon nets");
  quot->add_option("--samples", o.samples, "random net size when the grid is too large");
  add_common(quot);

  CLI::App* energy = app.add_subcommand("energy", "ground-state and free energies");
  energy->add_option("--input", o.input)->required();
  energy->add_option("--model", o.model_path, "coupling model JSON")->required();
  energy->add_flag("--graphon", as_graphon, "input is a step graphon");
  energy->add_flag("--exact", exact, "exact enumeration (graphs)");
  energy->add_flag("--anneal", anneal, "simulated annealing (graphs)");
  energy->add_option("--mesh", o.mesh, "certification grid mesh (graphons)");
  energy->add_option("--iters", iters, "mean-field iterations (graphons)");
  energy->add_option("--restarts", restarts, "optimizer restarts");
  add_common(energy);

  CLI::App* ld = app.add_subcommand("ld", "quotient-ball probabilities and rate functions");
  ld->add_option("--input", o.input)->required();
  ld->add_option("--target", o.target_path, "target quotient JSON")->required();
  ld->add_option("--q", q, "number of parts");
  ld->add_option("--eps", eps_ball, "ball radius");
  ld->add_option("--method", method, "enum | multinomial | mc (graphs)");
  ld->add_option("--partition", o.partition_path, "class list JSON for multinomial");
  ld->add_option("--samples", o.samples, "Monte Carlo samples");
  ld->add_flag("--graphon", as_graphon, "input is a step graphon (rate function)");
  ld->add_option("--mesh", o.mesh, "net mesh for the graphon rate");
  ld->add_option("--restarts", restarts, "search restarts");
  add_common(ld);

  CLI::App* reg = app.add_subcommand("regularity", "upper regularity checks and partitioning");
  reg->add_option("--input", o.input)->required();
  reg->add_option("--check", check, "lp | uniform | equi | partition | regularize");
  reg->add_option("--C", c_param, "Lp regularity constant");
  reg->add_option("--eta", eta, "minimum class weight fraction");
  reg->add_option("--p", p_norm, "Lp exponent");
  reg->add_option("--q", q, "parts for the equipartition check");
  reg->add_option("--eps", eps, "weak regularity accuracy");
  reg->add_option("--k", k_target, "target class count");
  reg->add_option("--ktable", ktable_spec, "eps:K pairs, comma separated");
  add_common(reg);

  CLI::App* conv = app.add_subcommand("convergence-report",
                                      "size-ladder diagnostics for a generator family");
  add_family_flags(conv, fam);
  conv->add_option("--sizes", sizes_spec, "comma-separated ladder of sizes");
  conv->add_option("--seeds", n_seeds, "number of seeds per size");
  conv->add_option("--q", q, "quotient dimension for the Hausdorff diagnostic");
  conv->add_option("--eps", eps, "weak regularity accuracy");
  conv->add_option("--k", k_target, "regularization class count");
  conv->add_option("--model", o.model_path, "coupling model for the energy diagnostic");
  conv->add_option("--reference", o.input2, "reference graphon JSON (default: constant 1)");
  add_common(conv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    json err = {{"error", {{"type", "validation"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 2;
  }

  try {
    if (*generate) {
      WeightedGraph g = generate_family(fam, o.seed);
      json cfg = resolved_config(generate, o);
      cfg["params"] = family_config(fam);
      json rep = {{"config", cfg}, {"graph", graph_to_json(g)}};
      if (o.out.empty())
        std::cout << rep.dump(2) << "\n";
      else
        save_json_file(o.out, graph_to_json(g));  // bare graph for reuse as --input
      return 0;
    }

    if (*distance) {
      StepGraphon u = load_graphon_or_normalize(o.input, as_graphon);
      StepGraphon w = load_graphon_or_normalize(o.input2, as_graphon);
      DistanceBound b = cut_distance(u, w, static_cast<int>(o.budget), o.seed);
      json rep = {{"config", resolved_config(distance, o)},
                  {"result", distance_bound_to_json(b)}};
      emit(rep, o.out);
      return 0;
    }

    if (*quot) {
      auto set_of = [&](const std::string& path) {
        json j = load_json_file(path);
        if (!as_graphon && j.contains("vertex_weights")) {
          WeightedGraph g = graph_from_json(j);
          QuotientSet s;
          s.points = enumerate_quotients(g, q, cap);
          s.meta.q = q;
          s.meta.seed = o.seed;
          s.meta.covering_radius = 0.0;  // exact set
          return s;
        }
        StepGraphon w = graphon_from_json(j);
        double mesh = o.mesh > 0.0 ? o.mesh : 0.125;
        return sample_quotient_set(w, q, mesh, o.samples, o.seed);
      };
      QuotientSet a = set_of(o.input);
      json result;
      result["set"] = quotient_set_to_json(a);
      if (!o.input2.empty()) {
        QuotientSet b = set_of(o.input2);
        result["hausdorff"] = hausdorff(a, b);
        result["set2"] = quotient_set_to_json(b);
      }
      json rep = {{"config", resolved_config(quot, o)}, {"result", result}};
      emit(rep, o.out);
      return 0;
    }

    if (*energy) {
      CouplingModel m = model_from_json(load_json_file(o.model_path));
      json result;
      if (as_graphon) {
        StepGraphon w = graphon_from_json(load_json_file(o.input));
        double mesh = o.mesh > 0.0 ? o.mesh : 1.0 / 16;
        result["gse"] = energy_result_to_json(graphon_gse(w, m.j, m.a, mesh, restarts, o.seed));
        result["free_energy"] =
            energy_result_to_json(graphon_free_energy(w, m.j, m.a, iters, restarts, o.seed));
      } else {
        WeightedGraph g = graph_from_json(load_json_file(o.input));
        OptMethod om = anneal && !exact ? OptMethod::kAnneal : OptMethod::kExact;
        result["microcanonical_gse"] =
            energy_result_to_json(microcanonical_gse(g, m, om, o.budget, o.seed));
        if (om == OptMethod::kExact) {
          result["microcanonical_free_energy"] =
              energy_result_to_json(microcanonical_free_energy(g, m, o.budget));
          result["free_energy"] = energy_result_to_json(free_energy(g, m.j, m.h, o.budget));
        }
        result["ground_state_energy"] =
            energy_result_to_json(ground_state_energy(g, m.j, m.h, o.budget, om, o.seed));
      }
      json rep = {{"config", resolved_config(energy, o)}, {"result", result}};
      emit(rep, o.out);
      return 0;
    }

    if (*ld) {
      Quotient target = quotient_from_json(load_json_file(o.target_path));
      json result;
      if (as_graphon) {
        StepGraphon w = graphon_from_json(load_json_file(o.input));
        double mesh = o.mesh > 0.0 ? o.mesh : 0.125;
        GraphonRateResult r = graphon_rate(w, q, target, mesh, restarts, o.seed);
        result = {{"value", std::isfinite(r.value) ? json(r.value) : json()},
                  {"tol", r.tol},
                  {"net_radius", r.net_radius},
                  {"method", r.method}};
      } else {
        WeightedGraph g = graph_from_json(load_json_file(o.input));
        LdMethod lm = method == "multinomial" ? LdMethod::kExactMultinomial
                      : method == "mc"        ? LdMethod::kMonteCarlo
                                              : LdMethod::kExactEnumeration;
        BlockStructure blocks;
        RateEstimate r;
        if (lm == LdMethod::kExactMultinomial) {
          if (o.partition_path.empty())
            throw ValidationError("multinomial needs --partition with the class list");
          json pj = load_json_file(o.partition_path);
          blocks.class_of = pj.at("assignment").get<std::vector<int>>();
          blocks.classes = pj.at("q").get<int>();
          r = quotient_ball_probability(g, q, target, eps_ball, lm, o.budget, o.samples, o.seed,
                                        &blocks);
        } else {
          r = quotient_ball_probability(g, q, target, eps_ball, lm, o.budget, o.samples, o.seed);
        }
        result = rate_estimate_to_json(r);
        if (o.format == "csv") {
          CsvWriter csv({"n", "eps", "probability", "rate", "stderr", "method"});
          csv.add_row({std::to_string(r.n), format_double(r.eps), format_double(r.probability),
                       std::isfinite(r.value) ? format_double(r.value) : "inf",
                       format_double(r.stderr_value), method});
          if (o.out.empty())
            std::cout << csv.str();
          else
            csv.save(o.out);
          return 0;
        }
      }
      json rep = {{"config", resolved_config(ld, o)}, {"result", result}};
      emit(rep, o.out);
      return 0;
    }

    if (*reg) {
      WeightedGraph g = graph_from_json(load_json_file(o.input));
      json result;
      long long budget = static_cast<long long>(o.budget);
      if (check == "lp") {
        result = regularity_report_to_json(
            upper_lp_regular_check(g, c_param, eta, p_norm, budget, o.seed));
      } else if (check == "uniform") {
        result = regularity_report_to_json(
            uniform_upper_regular_check(g, parse_k_table(ktable_spec), eta, budget, o.seed));
      } else if (check == "equi") {
        result = regularity_report_to_json(
            equipartition_upper_regular_check(g, parse_k_table(ktable_spec), q, budget, o.seed));
      } else if (check == "partition") {
        result = weak_regularity_to_json(weak_regularity_partition(g, eps, k_target, o.seed));
      } else if (check == "regularize") {
        RegularizeResult r = regularize(g, eps, k_target, o.seed);
        result = {{"graphon", graphon_to_json(r.graphon)},
                  {"partition", partition_to_json(r.partition)},
                  {"evidence", weak_regularity_to_json(r.evidence)},
                  {"k_alpha_ratio", r.k_alpha_ratio},
                  {"density_bound_ok", graphon_lp_norm(r.graphon, 1.0) <= 1.0 + 1e-12}};
      } else {
        throw ValidationError("unknown regularity check: " + check);
      }
      json rep = {{"config", resolved_config(reg, o)}, {"result", result}};
      emit(rep, o.out);
      return 0;
    }

    if (*conv) {
      std::vector<int> sizes;
      {
        std::stringstream ss(sizes_spec);
        std::string cell;
        while (std::getline(ss, cell, ',')) sizes.push_back(std::stoi(cell));
      }
      StepGraphon ref = o.input2.empty() ? StepGraphon::constant(1.0)
                                         : graphon_from_json(load_json_file(o.input2));
      std::optional<CouplingModel> m;
      if (!o.model_path.empty()) m = model_from_json(load_json_file(o.model_path));
      std::filesystem::path dir = o.out.empty() ? "." : o.out;
      std::filesystem::create_directories(dir);

      CsvWriter dist_csv({"size", "seed", "dhat_upper", "residual_lower", "residual_target", "k"});
      CsvWriter quot_csv({"size", "seed", "q", "hausdorff", "net_radius_sum"});
      CsvWriter energy_csv({"size", "seed", "gse_anneal"});
      CsvWriter ld_csv({"size", "seed", "eps", "probability", "rate", "stderr", "method"});

      QuotientSet ref_set = sample_quotient_set(ref, q, 0.125, 0, o.seed);
      Quotient ld_target =
          fractional_quotient(ref, StepFractionalPartition::uniform(ref.step_lengths(), q));

      for (int s = 0; s < n_seeds; ++s) {
        uint64_t seed = o.seed + s;
        for (int n : sizes) {
          FamilyOpts f = fam;
          f.n = n;
          WeightedGraph g = generate_family(f, seed);
          RegularizeResult r = regularize(g, eps, k_target, seed);
          double dhat = cut_norm_exact(overlay_difference(r.graphon, ref), 24);
          dist_csv.add_row({std::to_string(n), std::to_string(seed), format_double(dhat),
                            format_double(r.evidence.lower_evidence),
                            format_double(r.evidence.target), std::to_string(r.partition.q)});
          QuotientSet gs = sample_quotient_set(r.graphon, q, 0.125, 0, seed);
          quot_csv.add_row(
              {std::to_string(n), std::to_string(seed), std::to_string(q),
               format_double(hausdorff(gs, ref_set)),
               format_double(gs.meta.covering_radius + ref_set.meta.covering_radius)});
          if (m) {
            EnergyResult er = microcanonical_gse(g, *m, OptMethod::kAnneal, o.budget, seed);
            energy_csv.add_row(
                {std::to_string(n), std::to_string(seed), format_double(er.value)});
          }
          long long samples = o.samples > 0 ? o.samples : 2000;
          RateEstimate rate = quotient_ball_probability(g, q, ld_target, 0.05,
                                                        LdMethod::kMonteCarlo, o.budget,
                                                        samples, seed);
          ld_csv.add_row({std::to_string(n), std::to_string(seed), format_double(rate.eps),
                          format_double(rate.probability),
                          std::isfinite(rate.value) ? format_double(rate.value) : "inf",
                          format_double(rate.stderr_value), "mc"});
        }
      }
      dist_csv.save((dir / "distance.csv").string());
      quot_csv.save((dir / "quotients.csv").string());
      if (m) energy_csv.save((dir / "energy.csv").string());
      ld_csv.save((dir / "ld.csv").string());
      json cfg = resolved_config(conv, o);
      cfg["params"] = family_config(fam);
      cfg["sizes"] = sizes;
      cfg["seeds"] = n_seeds;
      save_json_file((dir / "config.json").string(), cfg);
      return 0;
    }
  } catch (const BudgetError& e) {
    json err = {{"error", {{"type", "budget"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 3;
  } catch (const InfeasibleError& e) {
    json err = {{"error", {{"type", "infeasible"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 4;
  } catch (const ValidationError& e) {
    json err = {{"error", {{"type", "validation"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    json err = {{"error", {{"type", "internal"}, {"message", e.what()}}}};
    std::cout << err.dump(2) << "\n";
    return 1;
  }
  return 0;
}
