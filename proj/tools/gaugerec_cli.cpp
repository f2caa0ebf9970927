#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "gaugerec/harness.hpp"

using namespace gaugerec;
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

int execute(const std::string& mode, const Options& o) {
  json j = json::object();
  fs::path base;
  if (!o.config.empty()) {
    try {
      j = read_json(o.config);
    } catch (const std::exception& e) {
      throw ConfigError("/", std::string("cannot read config: ") + e.what());
    }
    base = fs::path(o.config).parent_path();
  }
  if (!j.is_object()) throw ConfigError("/", "expected an object");
  if (j.contains("mode") && j["mode"] != mode) {
    const std::string given = j["mode"].is_string() ? j["mode"].get<std::string>() : j["mode"].dump();
    throw ConfigError("/mode", "config is for '" + given + "' but the command is '" + mode + "'");
  }
  j["mode"] = mode;
  if (o.seed) j["seed"] = *o.seed;
  if (o.threads) j["threads"] = *o.threads;

  const ExperimentConfig cfg = parse_config(j, base);
  std::optional<fs::path> out;
  if (!o.out.empty()) out = fs::path(o.out);
  const RunResult r = run(cfg, out);

  std::cout << mode << ": " << r.report["status"].get<std::string>();
  if (out) std::cout << " (" << r.outputs.size() << " files in " << out->string() << ")";
  std::cout << '\n';
  if (!out) std::cout << r.report.dump(1) << '\n';
  return r.admissibility_failed ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconstruction of elliptic coefficients from internal functionals"};
  app.require_subcommand(1);
  Options o;
  const std::pair<const char*, const char*> verbs[] = {
      {"synthesize", "solve the forward problem and write field archives"},
      {"reconstruct", "recover the class representative from field archives"},
      {"roundtrip", "synthesize, reconstruct and compare with the truth"},
      {"qpat", "photo-acoustic pipeline on the demo coefficients"},
      {"elasto", "elastography pipeline on the demo coefficients"},
      {"stability", "noise sweep with fitted log-log slopes"}};
  for (const auto& [name, help] : verbs) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "noise seed override");
    sub->add_option("--threads", o.threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // usage errors are hard errors; --help exits cleanly
    return app.exit(e) == 0 ? 0 : 1;
  }

  const std::string mode = app.get_subcommands().front()->get_name();
  try {
    return execute(mode, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
