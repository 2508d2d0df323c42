#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "domcert/cli.hpp"

namespace {

int run(const std::string& task, const std::string& config_path,
        const std::vector<std::string>& overrides, const std::string& out_path) {
  nlohmann::json report;
  int code = 1;
  std::string report_path = out_path;
  try {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open config file " + config_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    domcert::Config config = domcert::Config::parse(buf.str());
    for (const auto& spec : overrides) domcert::apply_override(config, spec);
    if (report_path.empty()) report_path = config.get("output", "report", "");
    domcert::RunOutcome outcome = domcert::run_task(task, config);
    report = std::move(outcome.report);
    code = outcome.exit_code;
  } catch (const std::exception& e) {
    report["tool"] = "domcert";
    report["task"] = task;
    report["status"] = "error";
    report["detail"] = e.what();
    code = 1;
  }
  const std::string text = report.dump(2) + "\n";
  if (!report_path.empty()) {
    try {
      domcert::write_file_atomic(report_path, text);
    } catch (const std::exception& e) {
      std::cerr << "warning: " << e.what() << "\n";
    }
  }
  std::cout << text;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-dominance and differential dissipativity certification"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  int exit_code = 0;

  const std::vector<std::string> tasks = {"scan",    "analyze",  "dissipate", "gain",
                                          "compose", "simulate", "verify"};
  for (const auto& task : tasks) {
    CLI::App* sub = app.add_subcommand(task, task + " task");
    sub->add_option("--config", config_path, "config file path")->required();
    sub->add_option("--set", overrides, "section.key=value override (repeatable)");
    sub->add_option("--out", out_path, "also write the report JSON here");
    sub->callback([&, task]() { exit_code = run(task, config_path, overrides, out_path); });
  }
  CLI11_PARSE(app, argc, argv);
  return exit_code;
}
