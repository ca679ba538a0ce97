// Command-line front end. Exit codes: 0 ok, 1 validation, 2 runtime.

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "sdc/api.hpp"
#include "sdc/api_server.hpp"
#include "sdc/forecast.hpp"
#include "sdc/json_io.hpp"
#include "sdc/scenario.hpp"

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [p, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || p != end) throw sdc::ValidationError("--values", "not a number: '" + s + "'");
  return v;
}

// "2032,2034" or integer ranges "2032..2040" (inclusive), freely mixed.
std::vector<double> parse_values(const std::string& list) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const auto comma = list.find(',', start);
    const std::string item = list.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const double a = parse_double(item.substr(0, dots));
      const double b = parse_double(item.substr(dots + 2));
      if (a != static_cast<long long>(a) || b != static_cast<long long>(b) || b < a)
        throw sdc::ValidationError("--values", "bad range '" + item + "'");
      for (long long v = static_cast<long long>(a); v <= static_cast<long long>(b); ++v)
        out.push_back(static_cast<double>(v));
    } else if (!item.empty()) {
      out.push_back(parse_double(item));
    }
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw sdc::ValidationError("--values", "empty value list");
  return out;
}

void print_validation(const sdc::ValidationError& e) {
  for (const auto& fe : e.errors()) std::cerr << "error: " << (fe.path.empty() ? "/" : fe.path) << ": " << fe.message << "\n";
}

void print_paths(const std::vector<std::filesystem::path>& paths) {
  for (const auto& p : paths) std::cout << p.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Space data center scenario evaluator"};
  app.require_subcommand(1);

  std::string scenario_ref, out_dir, format, axis, values;
  int port = 8080;
  std::string host = "0.0.0.0", ui_dir;
  std::string preset_name, calib_out;

  auto* run = app.add_subcommand("run", "Evaluate a scenario file or preset name");
  run->add_option("scenario", scenario_ref, "Scenario JSON path or preset name")->required();
  run->add_option("--out", out_dir, "Output directory (default: scenario output.dir)");
  run->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* sweep = app.add_subcommand("sweep", "Evaluate a scenario over values of one numeric field");
  sweep->add_option("scenario", scenario_ref, "Scenario JSON path or preset name")->required();
  sweep->add_option("--axis", axis, "Dotted field path, e.g. design.year")->required();
  sweep->add_option("--values", values, "Comma list; a..b expands integer ranges")->required();
  sweep->add_option("--out", out_dir, "Output directory (default: scenario output.dir)");
  sweep->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  auto* serve = app.add_subcommand("serve", "Run the HTTP/JSON service");
  serve->add_option("--port", port, "TCP port")->check(CLI::Range(1, 65535));
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--ui", ui_dir, "Directory with the built explorer UI");

  auto* presets = app.add_subcommand("presets", "List or show shipped presets");
  presets->require_subcommand(1);
  auto* presets_list = presets->add_subcommand("list", "List preset names");
  auto* presets_show = presets->add_subcommand("show", "Print a resolved preset");
  presets_show->add_option("name", preset_name)->required();

  auto* calibrate = app.add_subcommand("calibrate", "Fit roadmaps to the reference design table");
  calibrate->add_option("--out", calib_out, "Write the fitted roadmap set to FILE");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitValidation;
  }

  namespace sc = sdc::scenario;
  try {
    if (*run) {
      auto s = sc::resolve_scenario(scenario_ref);
      const auto report = sc::run(s);
      print_paths(sc::emit(report, out_dir.empty() ? s.output.dir : out_dir, format.empty() ? s.output.format : format));
      for (const auto& e : report.at("errors")) std::cerr << "warning: " << e.at("analysis").get<std::string>() << ": "
                                                         << e.at("message").get<std::string>() << "\n";
      return report.at("errors").empty() ? 0 : kExitRuntime;
    }
    if (*sweep) {
      const auto s = sc::resolve_scenario(scenario_ref);
      const auto result = sc::sweep(s, axis, parse_values(values));
      print_paths(sc::emit_sweep(result, out_dir.empty() ? s.output.dir : out_dir, format.empty() ? s.output.format : format));
      return 0;
    }
    if (*serve) {
      sdc::api::Service service;
      sdc::api::ServerOptions opt;
      opt.host = host;
      opt.port = port;
      opt.static_dir = ui_dir;
      std::cerr << "listening on " << host << ":" << port << "\n";
      if (!sdc::api::serve(service, opt)) {
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return kExitRuntime;
      }
      return 0;
    }
    if (*presets_list) {
      for (const auto& n : sc::list_presets()) std::cout << n << "\n";
      return 0;
    }
    if (*presets_show) {
      std::cout << sc::to_json(sc::load_scenario(sc::preset_path(preset_name))).dump(2) << "\n";
      return 0;
    }
    if (*calibrate) {
      const auto result = sdc::forecast::calibrate(sdc::forecast::reference_design_targets(), sdc::forecast::prior_roadmaps());
      for (const auto& c : result.cells)
        std::printf("%-24s target %12.6g  model %12.6g  error %+.3f%%\n", c.cell.c_str(), c.target, c.model,
                    100.0 * c.rel_error);
      std::printf("max relative error %.3f%%\n", 100.0 * result.max_rel_error);
      if (!calib_out.empty()) sc::write_file(calib_out, sdc::forecast::to_json(result.roadmaps).dump(2) + "\n");
      return 0;
    }
  } catch (const sdc::ValidationError& e) {
    print_validation(e);
    return kExitValidation;
  } catch (const sdc::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const sdc::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
