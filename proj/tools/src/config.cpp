#include "ncerg/cli/config.hpp"

#include <algorithm>
#include <stdexcept>

namespace ncerg::cli {

using nlohmann::json;

json to_json(const ExperimentConfig& c) {
  return json{{"command", c.command}, {"group", c.group},     {"action", c.action},
              {"n", c.n},             {"rmax", c.rmax},       {"d", c.d},
              {"window", c.window},   {"metric", c.metric},   {"sites", c.sites},
              {"dim", c.dim},         {"trials", c.trials},   {"samples", c.samples},
              {"schedule", c.schedule}, {"folner", c.folner}, {"p", c.ps},
              {"lambda", c.lambdas},  {"seed", c.seed},       {"exact", c.exact},
              {"out", c.out},         {"cap", c.cap}};
}

namespace {

template <class T>
void read(const json& j, const char* key, T& field) {
  if (const auto it = j.find(key); it != j.end()) field = it->get<T>();
}

}  // namespace

ExperimentConfig from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::vector<std::string> keys{
      "command", "group", "action",   "n",      "rmax",   "d",      "window",
      "metric",  "sites", "dim",      "trials", "samples", "schedule", "folner",
      "p",       "lambda", "seed",    "exact",  "out",    "cap"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  ExperimentConfig c;
  try {
    read(j, "command", c.command);
    read(j, "group", c.group);
    read(j, "action", c.action);
    read(j, "n", c.n);
    read(j, "rmax", c.rmax);
    read(j, "d", c.d);
    read(j, "window", c.window);
    read(j, "metric", c.metric);
    read(j, "sites", c.sites);
    read(j, "dim", c.dim);
    read(j, "trials", c.trials);
    read(j, "samples", c.samples);
    read(j, "schedule", c.schedule);
    read(j, "folner", c.folner);
    read(j, "p", c.ps);
    read(j, "lambda", c.lambdas);
    read(j, "seed", c.seed);
    read(j, "exact", c.exact);
    read(j, "out", c.out);
    read(j, "cap", c.cap);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  return c;
}

std::string canonical(const ExperimentConfig& config) { return to_json(config).dump(); }

void validate(const ExperimentConfig& c) {
  if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
    throw std::invalid_argument("unknown command '" + c.command + "'");
  }
  if (c.n < 0) throw std::invalid_argument("--n must be non-negative");
  if (c.rmax < 0) throw std::invalid_argument("--rmax must be non-negative");
  if (c.trials < 1) throw std::invalid_argument("--trials must be positive");
  if (c.samples < 1) throw std::invalid_argument("--samples must be positive");
  if (c.metric != "linf" && c.metric != "l1") throw std::invalid_argument("--metric must be linf or l1");
  for (double p : c.ps) {
    if (!(p >= 1.0)) throw std::invalid_argument("--p values must be >= 1");
  }
  for (double l : c.lambdas) {
    if (!(l > 0.0)) throw std::invalid_argument("--lambda values must be positive");
  }
}

}  // namespace ncerg::cli
