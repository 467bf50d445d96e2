/* Copyright 2026-present the pisasim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pisa/cost.hpp"
#include "pisa/report_io.hpp"
#include "pisa/runner.hpp"
#include "pisa/spec_io.hpp"
#include "pisa/trace.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitSpecError = 1;
constexpr int kExitTraceError = 2;

std::optional<pisa::PipelineSpec> load_spec_or_complain(const std::string& path) {
  try {
    return pisa::load_pipeline_spec_file(path);
  } catch (const pisa::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::nullopt;
  }
}

int cmd_validate(const std::string& spec_path) {
  std::ifstream in(spec_path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open spec file: " << spec_path << "\n";
    return kExitSpecError;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    pisa::PipelineSpec spec = pisa::parse_pipeline_document(
        ss.str(), std::filesystem::path(spec_path).parent_path().string());
    pisa::ValidationReport report = pisa::validate_spec(spec);
    if (!report.ok()) {
      std::cerr << report.str();
      std::cerr << report.violations.size() << " violation(s)\n";
      return kExitSpecError;
    }
  } catch (const pisa::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpecError;
  }
  std::cout << "valid\n";
  return kExitOk;
}

int cmd_run(const std::string& spec_path, const std::string& trace_path, const std::string& out_path,
            const std::string& stats_path, std::optional<uint64_t> seed) {
  auto spec = load_spec_or_complain(spec_path);
  if (!spec) return kExitSpecError;

  std::ifstream trace_in(trace_path);
  if (!trace_in) {
    std::cerr << "error: cannot open trace file: " << trace_path << "\n";
    return kExitTraceError;
  }
  std::vector<pisa::TraceRecord> input;
  try {
    input = pisa::read_input_trace(trace_in);
  } catch (const pisa::TraceError& e) {
    std::cerr << "error: " << trace_path << ": " << e.what() << "\n";
    return kExitTraceError;
  }

  try {
    pisa::PipelineRuntime runtime(*spec, seed);
    pisa::PipelineRuntime::Output out = runtime.run(input);

    if (out_path.empty()) {
      pisa::write_output_trace(std::cout, out.records);
    } else {
      std::ofstream f(out_path);
      if (!f) {
        std::cerr << "error: cannot write " << out_path << "\n";
        return kExitSpecError;
      }
      pisa::write_output_trace(f, out.records);
    }

    const std::string stats = out.stats.to_json().dump(2) + "\n";
    if (stats_path.empty()) {
      std::cerr << stats;
    } else {
      std::ofstream f(stats_path);
      if (!f) {
        std::cerr << "error: cannot write " << stats_path << "\n";
        return kExitSpecError;
      }
      f << stats;
    }
  } catch (const pisa::TableIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpecError;
  }
  return kExitOk;
}

int cmd_report(const std::string& spec_path, bool as_json, bool sweep, const std::string& out_path) {
  auto spec = load_spec_or_complain(spec_path);
  if (!spec) return kExitSpecError;

  std::string body;
  try {
    if (sweep) {
      body = pisa::cost::sweep_csv(spec->platform);
    } else {
      pisa::cost::CostReport report = pisa::cost::pipeline_report(*spec);
      body = as_json ? pisa::cost::report_to_json(report).dump(2) + "\n"
                     : pisa::cost::report_to_text(report);
    }
  } catch (const pisa::TableIoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitSpecError;
  }

  if (out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream f(out_path);
    if (!f) {
      std::cerr << "error: cannot write " << out_path << "\n";
      return kExitSpecError;
    }
    f << body;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"functional PISA pipeline model and FPGA-mapping cost estimator"};
  app.require_subcommand(1);

  std::string spec_path, trace_path, out_path, stats_path;
  std::optional<uint64_t> seed;
  bool as_json = false, as_text = false, sweep = false;

  CLI::App* validate = app.add_subcommand("validate", "check a pipeline spec");
  validate->add_option("spec", spec_path, "pipeline spec (JSON)")->required();

  CLI::App* run = app.add_subcommand("run", "replay a packet trace through the pipeline");
  run->add_option("spec", spec_path, "pipeline spec (JSON)")->required();
  run->add_option("trace", trace_path, "input packet trace")->required();
  run->add_option("--out", out_path, "output trace file (default: stdout)");
  run->add_option("--stats", stats_path, "stats JSON file (default: stderr)");
  run->add_option("--seed", seed, "override the spec's hash seed");

  CLI::App* report = app.add_subcommand("report", "emit the cost report for a spec");
  report->add_option("spec", spec_path, "pipeline spec (JSON)")->required();
  report->add_flag("--json", as_json, "machine-readable JSON report");
  report->add_flag("--text", as_text, "aligned text report (default)");
  report->add_flag("--sweep-bus", sweep, "emit the bus-width sweep CSV instead");
  report->add_option("--out", out_path, "write to a file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(spec_path);
  if (run->parsed()) return cmd_run(spec_path, trace_path, out_path, stats_path, seed);
  if (report->parsed()) return cmd_report(spec_path, as_json, sweep, out_path);
  return kExitOk;
}
