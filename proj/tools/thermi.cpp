// thermi: sweep and verify mutual-information routes from a JSON config.
//
// Exit status: 0 success, 1 a verify check failed, 2 configuration error,
// 3 numerical failure.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "thermi/config.hpp"
#include "thermi/errors.hpp"
#include "thermi/report.hpp"
#include "thermi/sweep.hpp"
#include "thermi/version.hpp"

namespace {

constexpr int kCheckFailed = 1;
constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw thermi::Error(thermi::ErrorCode::ConfigError, "cannot write " + path);
  out << text;
}

int run_sweep_command(const std::string& config_path, const std::string& out_path,
                      const std::string& routes, int jobs, const std::string& csv_path, bool timing) {
  thermi::SweepOptions opt;
  opt.routes = thermi::parse_routes(routes);
  opt.jobs = jobs;
  opt.timing = timing;
  const thermi::RunConfig cfg = thermi::load_config(config_path);
  const thermi::SweepReport rep = thermi::run_sweep(cfg, opt);
  write_file(out_path, thermi::format_report(rep));
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw thermi::Error(thermi::ErrorCode::ConfigError, "cannot write " + csv_path);
    thermi::write_csv(rep, csv);
  }
  std::cout << thermi::format_summary(rep);
  std::cout << rep.records.size() << " records written to " << out_path << "\n";
  return 0;
}

int run_verify_command(const std::string& config_path, int jobs) {
  const thermi::RunConfig cfg = thermi::load_config(config_path);
  const thermi::VerifyReport rep = thermi::run_verify(cfg, jobs);
  std::cout << thermi::format_verify(rep);
  std::cout << (rep.passed() ? "all checks passed" : "some checks FAILED") << "\n";
  return rep.passed() ? 0 : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mutual information of the Gaussian channel by thermodynamic integration"};
  app.set_version_flag("--version", std::string(thermi::kToolVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string routes = "thermo,gsv";
  std::string csv_path;
  int jobs = 1;
  bool timing = false;

  auto* sweep = app.add_subcommand("sweep", "Evaluate every route over the beta grid");
  sweep->add_option("--config", config_path, "JSON config file")->required();
  sweep->add_option("--out", out_path, "JSON report to write")->required();
  sweep->add_option("--routes", routes, "Comma-separated subset of thermo,gsv,classical");
  sweep->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--csv", csv_path, "Also write the records as CSV");
  sweep->add_flag("--timing", timing, "Record per-beta runtime_ms in the report");

  auto* verify = app.add_subcommand("verify", "Run the invariant checks");
  verify->add_option("--config", config_path, "JSON config file")->required();
  verify->add_option("--jobs", jobs, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*sweep) return run_sweep_command(config_path, out_path, routes, jobs, csv_path, timing);
    return run_verify_command(config_path, jobs);
  } catch (const thermi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return thermi::is_numeric_failure(e.code()) ? kNumericError : kConfigError;
  }
}
