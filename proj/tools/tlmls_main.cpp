// Command-line front end: solve | build | verify | classify-realform |
// example.  Exit codes: 0 success, 1 verification/pipeline failure,
// 2 usage or input error.

#include <chrono>
#include <cstdio>

#include "CLI11.hpp"
#include "pipeline.hpp"

namespace {

using tlmls::Complex;
namespace cli = tlmls::cli;

Complex parse_lambda_token(const std::string& tok) {
  double re = 0.0, im = 0.0;
  int n = 0;
  if (std::sscanf(tok.c_str(), "%lf%lfi%n", &re, &im, &n) == 2 &&
      n == static_cast<int>(tok.size()))
    return {re, im};
  if (std::sscanf(tok.c_str(), "%lf%n", &re, &n) == 1 &&
      n == static_cast<int>(tok.size()))
    return {re, 0.0};
  throw cli::config_error("--lambda: cannot parse `" + tok +
                          "` (expected re or re+imi)");
}

void apply_overrides(cli::RunConfig& cfg, const std::string& out,
                     const std::vector<std::string>& lambdas,
                     const std::vector<std::string>& tols, bool obj) {
  if (!out.empty()) cfg.out = out;
  if (!lambdas.empty()) {
    cfg.lambdas.clear();
    for (const std::string& tok : lambdas) {
      Complex lam = parse_lambda_token(tok);
      if (lam == Complex(0.0))
        throw cli::config_error("--lambda: lambda = 0 is not allowed");
      cfg.lambdas.push_back(lam);
    }
  }
  for (const std::string& t : tols) {
    auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0)
      throw cli::config_error("--tol: expected name=value, got `" + t + "`");
    char* end = nullptr;
    double val = std::strtod(t.c_str() + eq + 1, &end);
    if (end == t.c_str() + eq + 1 || *end != '\0' || !(val > 0.0))
      throw cli::config_error("--tol: value in `" + t +
                              "` must be a positive number");
    cfg.tolerances[t.substr(0, eq)] = val;
  }
  if (obj) cfg.obj = true;
}

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(
             std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Timelike minimal-surface toolkit: structure-equation solver, "
               "spectral frame integration, and verification"};
  app.require_subcommand(1);

  std::string config_path, out_dir, example_name;
  std::vector<std::string> lambda_toks, tol_toks;
  bool obj = false;

  auto add_common = [&](CLI::App* sub, bool need_config) {
    auto* c = sub->add_option("--config", config_path, "JSON run configuration");
    if (need_config) c->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--tol", tol_toks, "tolerance override name=value");
  };

  CLI::App* solve = app.add_subcommand("solve", "march the structure equation");
  add_common(solve, true);
  CLI::App* build =
      app.add_subcommand("build", "integrate frames and export surfaces");
  add_common(build, true);
  build->add_option("--lambda", lambda_toks,
                    "spectral parameters (re or re+imi), overrides config");
  build->add_flag("--obj", obj, "also write OBJ meshes");
  CLI::App* verify =
      app.add_subcommand("verify", "check built artifacts and emit report.json");
  add_common(verify, true);
  CLI::App* classify = app.add_subcommand(
      "classify-realform", "automorphism relations and real-form table");
  classify->add_option("--out", out_dir, "output directory");
  CLI::App* example =
      app.add_subcommand("example", "reproduce a named reference surface");
  example->add_option("name", example_name, "rp or clifford")->required();
  example->add_option("--out", out_dir, "output directory");
  example->add_flag("--obj", obj, "also write OBJ meshes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    auto t0 = std::chrono::steady_clock::now();
    if (solve->parsed()) {
      cli::RunConfig cfg = cli::load_config(config_path);
      apply_overrides(cfg, out_dir, {}, tol_toks, false);
      double res = cli::cmd_solve(cfg);
      std::printf("solve: residual %.3e, %.0f ms, wrote %s/omega.csv\n", res,
                  ms_since(t0), cfg.out.c_str());
    } else if (build->parsed()) {
      cli::RunConfig cfg = cli::load_config(config_path);
      apply_overrides(cfg, out_dir, lambda_toks, tol_toks, obj);
      cli::cmd_build(cfg);
      std::printf("build: %zu spectral parameter(s), %.0f ms, wrote %s\n",
                  cfg.lambdas.size(), ms_since(t0), cfg.out.c_str());
    } else if (verify->parsed()) {
      cli::RunConfig cfg = cli::load_config(config_path);
      apply_overrides(cfg, out_dir, {}, tol_toks, false);
      bool ok = cli::cmd_verify(cfg);
      std::printf("verify: %s, %.0f ms, wrote %s/report.json\n",
                  ok ? "pass" : "FAIL", ms_since(t0), cfg.out.c_str());
      return ok ? 0 : 1;
    } else if (classify->parsed()) {
      std::string out = out_dir.empty() ? "." : out_dir;
      bool ok = cli::cmd_classify_realform(out);
      std::printf("classify-realform: %s, wrote %s/classify_realform.json\n",
                  ok ? "pass" : "FAIL", out.c_str());
      return ok ? 0 : 1;
    } else if (example->parsed()) {
      std::string out = out_dir.empty() ? "example_" + example_name : out_dir;
      bool ok = cli::cmd_example(example_name, out, obj);
      std::printf("example %s: %s, %.0f ms, wrote %s\n", example_name.c_str(),
                  ok ? "pass" : "FAIL", ms_since(t0), out.c_str());
      return ok ? 0 : 1;
    }
  } catch (const cli::config_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
