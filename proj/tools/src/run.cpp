#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "ncerg/cli/run.hpp"
#include "ncerg/errors.hpp"

namespace ncerg::cli {

int run(const ExperimentConfig& config, std::ostream& out, std::ostream& err) {
  Report report("", {});
  try {
    report = execute(config);
  } catch (const std::invalid_argument& e) {
    err << "ncerg: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "ncerg: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StructuralError& e) {
    err << "ncerg: " << e.what() << '\n';
    return kExitUsage;
  } catch (const CapExceeded& e) {
    err << "ncerg: " << e.what() << " (raise --cap or NCERG_CAP)\n";
    return kExitUsage;
  } catch (const NonConvergence& e) {
    err << "ncerg: " << e.what() << '\n';
    return kExitViolation;
  }

  const auto summary = report.summary(to_json(config));
  if (config.out.empty()) {
    report.write_csv(out);
  } else {
    const std::filesystem::path dir(config.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream csv(dir / (config.command + ".csv"), std::ios::binary);
    std::ofstream json(dir / (config.command + ".json"), std::ios::binary);
    if (!csv || !json) {
      err << "ncerg: cannot write to " << dir.string() << '\n';
      return kExitUsage;
    }
    report.write_csv(csv);
    json << summary.dump(2) << '\n';
    out << summary.dump() << '\n';
  }
  for (const auto& v : report.violations()) err << "violation: " << v << '\n';
  return report.violated() ? kExitViolation : kExitPass;
}

std::variant<ExperimentConfig, int> parse_args(int argc, const char* const* argv, std::ostream& out,
                                               std::ostream& err) {
  CLI::App app{"Numerical experiments on noncommutative maximal ergodic inequalities", "ncerg"};
  app.require_subcommand(1);
  ExperimentConfig c;
  std::string config_file;
  std::optional<std::string> schedule_text;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "RNG seed");
    sub->add_option("--out", c.out, "directory for <command>.csv and <command>.json");
    sub->add_option("--cap", c.cap, "element cap for balls and supports");
    sub->add_option("--config", config_file, "load the experiment from a JSON config");
  };
  auto group_opt = [&](CLI::App* sub) {
    sub->add_option("--group", c.group, "Z | Zd:<d> | heisenberg | cyclic:<m>^<d> | locfin");
  };
  auto n_opt = [&](CLI::App* sub, const char* help) { sub->add_option("--n", c.n, help); };
  auto action_opt = [&](CLI::App* sub) {
    sub->add_option("--action", c.action, "shift:<m> | heisenberg:<q> | conj:<d> | flip:<levels>");
  };

  std::map<std::string, CLI::App*> subs;
  const std::map<std::string, std::string> about{
      {"balls", "ball sizes |B_n|"},
      {"growth", "polynomial growth exponent fit"},
      {"folner", "Folner ratios of balls"},
      {"dyadic", "covering of balls by adjacent dyadic cells"},
      {"walk-dominate", "ball averages against Cesaro means of the lazy walk"},
      {"maximal", "weak and strong type maximal estimates"},
      {"ergodic-converge", "ball averages against the mean projection"},
      {"transference", "maximal constants on the algebra and on the group"},
      {"iterated", "ball average against iterated one-parameter averages"},
      {"subgroup", "averages over an increasing chain of finite subgroups"}};
  for (const auto& name : kCommands) subs[name] = app.add_subcommand(name, about.at(name));
  for (auto& [name, sub] : subs) common(sub);

  group_opt(subs["balls"]);
  n_opt(subs["balls"], "largest radius");
  group_opt(subs["growth"]);
  n_opt(subs["growth"], "n_max of the fit");
  group_opt(subs["folner"]);
  n_opt(subs["folner"], "largest radius");

  auto* dy = subs["dyadic"];
  dy->add_option("--d", c.d, "dimension (1-3)");
  dy->add_option("--window", c.window, "window side, a power of two");
  dy->add_option("--rmax", c.rmax, "largest ball radius");
  dy->add_option("--metric", c.metric, "linf | l1");
  dy->add_option("--samples", c.samples, "sampled balls for d >= 2");

  auto* wd = subs["walk-dominate"];
  group_opt(wd);
  n_opt(wd, "ball radius");
  wd->add_flag("--exact", c.exact, "rational arithmetic");
  action_opt(wd);
  wd->add_option("--trials", c.trials, "random inputs for the operator check");

  auto* mx = subs["maximal"];
  mx->add_option("--sites", c.sites, "sites of C(Z_sites) ⊗ M_dim, a power of two");
  mx->add_option("--dim", c.dim, "block dimension");
  mx->add_option("--trials", c.trials, "random martingales");
  mx->add_option("--p", c.ps, "exponents in (1, inf)")->allow_extra_args(false);
  mx->add_option("--lambda", c.lambdas, "weak-type thresholds")->allow_extra_args(false);

  auto* ec = subs["ergodic-converge"];
  action_opt(ec);
  ec->add_option("--rmax", c.rmax, "lacunary schedule up to this radius");
  ec->add_option("--schedule", schedule_text, "explicit increasing radii, comma separated");
  ec->add_option("--p", c.ps, "norm exponents")->allow_extra_args(false);
  ec->add_option("--lambda", c.lambdas, "witness thresholds")->allow_extra_args(false);

  auto* tr = subs["transference"];
  action_opt(tr);
  n_opt(tr, "measures are uniform on B_0, ..., B_n");
  tr->add_option("--folner", c.folner, "half-widths L of F = [-L, L]")->allow_extra_args(false);
  tr->add_option("--p", c.ps, "exponents in (1, inf)")->allow_extra_args(false);

  auto* it = subs["iterated"];
  action_opt(it);
  n_opt(it, "largest radius");

  auto* sg = subs["subgroup"];
  n_opt(sg, "chain length");
  sg->add_option("--trials", c.trials, "random inputs");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) c.command = name;
  }
  if (schedule_text) {
    std::stringstream ss(*schedule_text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        c.schedule.push_back(std::stoi(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        err << "ncerg: bad schedule entry '" << item << "'\n";
        return kExitUsage;
      }
    }
    if (c.schedule.empty()) {
      err << "ncerg: empty schedule\n";
      return kExitUsage;
    }
  }
  if (!config_file.empty()) {
    std::ifstream in(config_file);
    if (!in) {
      err << "ncerg: cannot read " << config_file << '\n';
      return kExitUsage;
    }
    try {
      const auto loaded = from_json(nlohmann::json::parse(in));
      if (!loaded.command.empty() && loaded.command != c.command) {
        err << "ncerg: config is for '" << loaded.command << "'\n";
        return kExitUsage;
      }
      const std::string command = c.command;
      c = loaded;
      c.command = command;
    } catch (const std::exception& e) {
      err << "ncerg: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  if (const char* env = std::getenv("NCERG_CAP"); env && *env) {
    try {
      const long long v = std::stoll(env);
      if (v <= 0) throw std::invalid_argument("non-positive");
      c.cap = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
      err << "ncerg: NCERG_CAP must be a positive integer\n";
      return kExitUsage;
    }
  }
  return c;
}

}  // namespace ncerg::cli
