#pragma once

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bcw/bounds.hpp"
#include "bcw/channels.hpp"
#include "bcw/io.hpp"
#include "bcw/verify.hpp"
#include "bcw/version.hpp"

// Command-line front end: bounds, figure, verify, holevo, plus the append-only
// run log (enabled by --runlog or the BCW_RUNLOG environment variable).

namespace bcw::cli {

namespace detail {

inline std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> grid;
  if (s.find(':') != std::string::npos) {
    const auto parts = io::detail::split(s, ':');
    if (parts.size() != 3)
      throw std::invalid_argument("grid spec must be start:stop:step");
    const double start = std::stod(parts[0]);
    const double stop = std::stod(parts[1]);
    const double step = std::stod(parts[2]);
    if (step <= 0.0) throw std::invalid_argument("grid step must be > 0");
    const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9));
    for (int i = 0; i <= count; ++i) grid.push_back(start + i * step);
    return grid;
  }
  for (const auto& tok : io::detail::split(s, ','))
    grid.push_back(std::stod(tok));
  return grid;
}

inline std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Newline-delimited JSON run records; unwritable paths warn, never fail.
class RunLogger {
 public:
  RunLogger(std::string cli_runlog_flag, std::ostream& err) : err_(err) {
    if (!cli_runlog_flag.empty()) {
      path_ = std::move(cli_runlog_flag);
    } else if (const char* env = std::getenv("BCW_RUNLOG");
               env != nullptr && *env != '\0') {
      path_ = env;
    }
  }

  void log(const std::string& command, const nlohmann::json& resolved_config,
           const std::vector<std::string>& outputs) {
    if (!path_) return;
    nlohmann::json record{
        {"timestamp", iso_timestamp()},
        {"command", command},
        {"config", resolved_config},
        {"version", version},
        {"input_digest", io::digest_hex(resolved_config.dump())},
        {"outputs", outputs}};
    std::ofstream out(*path_, std::ios::app);
    if (!out) {
      err_ << "warning: run log not writable: " << *path_ << "\n";
      return;
    }
    out << record.dump() << "\n";
  }

 private:
  std::optional<std::string> path_;
  std::ostream& err_;
};

}  // namespace detail

/// Entry point shared by the binary and the tests. args excludes argv[0].
inline int run(const std::vector<std::string>& args, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Capacity bounds and exact simulation for bosonic attenuation "
               "and classical-noise channels"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);
  std::string runlog_flag;
  app.add_option("--runlog", runlog_flag,
                 "append run records to this file (or set BCW_RUNLOG)");

  // defaults shared by several commands
  std::string method_name = "epi";
  std::string format_name = "json";
  std::string out_path;
  std::string grid_spec = "0:20:0.1";

  // ---- bounds ----
  auto* bounds_cmd =
      app.add_subcommand("bounds", "closed-form capacity bound curves");
  bounds_cmd->require_subcommand(1);

  struct AttArgs {
    double lambda = 0.75;
    std::string env;
  } att_args;
  auto* battn = bounds_cmd->add_subcommand("attenuator",
                                           "beamsplitter with environment");
  battn->add_option("--lambda", att_args.lambda, "transmissivity in [0,1]")
      ->required();
  battn->add_option("--env", att_args.env,
                    "environment: thermal:N, number:n, vacuum, coherent:re[,im], "
                    "superposition:c0,c1,..., or a JSON file")
      ->required();
  battn->add_option("--N", grid_spec, "photon budget grid start:stop:step or list");
  battn->add_option("--method", method_name, "epi or epni")
      ->check(CLI::IsMember({"epi", "epni"}));
  battn->add_option("--format", format_name, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  battn->add_option("--out", out_path, "write to file instead of stdout");

  struct NoiseArgs {
    double t = 1.0;
    std::string dist;
  } noise_args;
  auto* bnoise = bounds_cmd->add_subcommand("classical-noise",
                                            "random displacement noise");
  bnoise->add_option("--t", noise_args.t, "noise strength t > 0")->required();
  bnoise->add_option("--dist", noise_args.dist,
                     "density: gaussian:iso, uniform-disc:R, or a JSON file")
      ->required();
  bnoise->add_option("--N", grid_spec, "photon budget grid start:stop:step or list");
  bnoise->add_option("--method", method_name, "epi or epni")
      ->check(CLI::IsMember({"epi", "epni"}));
  bnoise->add_option("--format", format_name, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  bnoise->add_option("--out", out_path, "write to file instead of stdout");

  // ---- figure ----
  std::string figure_name;
  std::string figure_out = "figure.csv";
  auto* figure_cmd = app.add_subcommand(
      "figure", "bound-curve data for the captioned channel specs");
  figure_cmd->add_option("name", figure_name, "fig1 or fig2")
      ->required()
      ->check(CLI::IsMember({"fig1", "fig2"}));
  figure_cmd->add_option("--out", figure_out, "output CSV path");
  figure_cmd->add_option("--N", grid_spec, "photon budget grid");

  // ---- verify ----
  std::string verify_config_path;
  std::string verify_out;
  std::string verify_csv;
  auto* verify_cmd = app.add_subcommand(
      "verify", "run the entropy-inequality verification suite");
  verify_cmd->add_option("--config", verify_config_path,
                         "plain-text key = value config file");
  verify_cmd->add_option("--out", verify_out, "write JSON report here");
  verify_cmd->add_option("--csv", verify_csv, "also write a flat CSV view");

  // ---- holevo ----
  auto* holevo_cmd = app.add_subcommand(
      "holevo", "coherent-ensemble Holevo rate with sandwiching bounds");
  holevo_cmd->require_subcommand(1);
  double holevo_N = 1.0;
  int holevo_dim = 30;
  int holevo_quad = 41;
  auto* hattn = holevo_cmd->add_subcommand("attenuator", "");
  hattn->add_option("--lambda", att_args.lambda, "transmissivity")->required();
  hattn->add_option("--env", att_args.env, "environment spec")->required();
  hattn->add_option("--N", holevo_N, "photon budget")->required();
  hattn->add_option("--dim", holevo_dim, "Fock truncation");
  auto* hnoise = holevo_cmd->add_subcommand("classical-noise", "");
  hnoise->add_option("--t", noise_args.t, "noise strength")->required();
  hnoise->add_option("--dist", noise_args.dist, "density spec")->required();
  hnoise->add_option("--N", holevo_N, "photon budget")->required();
  hnoise->add_option("--dim", holevo_dim, "Fock truncation");
  hnoise->add_option("--quad-nodes", holevo_quad, "quadrature nodes per axis");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("bcw");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()),
              const_cast<char**>(argv.data()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  detail::RunLogger runlog(runlog_flag, err);
  std::ostringstream command;
  command << "bcw";
  for (const auto& a : args) command << ' ' << a;

  try {
    const auto method = method_name == "epni" ? bounds::Method::epni
                                              : bounds::Method::epi;

    if (battn->parsed() || bnoise->parsed()) {
      channels::ChannelSpec spec =
          battn->parsed()
              ? channels::ChannelSpec(channels::AttenuatorSpec{
                    att_args.lambda, io::parse_env_spec(att_args.env)})
              : channels::ChannelSpec(channels::ClassicalNoiseSpec{
                    noise_args.t, io::parse_noise_spec(noise_args.dist)});
      const auto grid = detail::parse_grid(grid_spec);
      const auto curve = bounds::bound_curve(spec, grid, method);
      std::string payload;
      if (format_name == "csv") {
        payload = io::bound_curve_csv(curve);
      } else {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& r : curve) arr.push_back(io::to_json(r));
        payload = arr.dump(2) + "\n";
      }
      std::vector<std::string> outputs;
      if (out_path.empty()) {
        out << payload;
      } else {
        detail::write_file(out_path, payload);
        outputs.push_back(out_path);
      }
      nlohmann::json resolved{{"grid", grid_spec},
                              {"method", method_name},
                              {"channel", io::to_json(curve.front().channel)}};
      runlog.log(command.str(), resolved, outputs);
      return 0;
    }

    if (figure_cmd->parsed()) {
      const auto grid = detail::parse_grid(grid_spec);
      std::ostringstream csv;
      csv << "# bcw figure data: " << figure_name << "\n";
      csv << "# version: " << version << "\n";
      csv << "# units: nats\n";
      if (figure_name == "fig1") {
        csv << "# channel: attenuator lambda=0.75 N_E=2 S_E=0.91\n";
      } else {
        csv << "# channel: classical-noise t=1 E_f=2 H_f=ln(15.1)\n";
      }
      csv << "# columns: N,epi_lower,epi_upper,epni_lower,epni_upper\n";
      csv << "N,epi_lower,epi_upper,epni_lower,epni_upper\n";
      for (const double N : grid) {
        bounds::BoundReport epi, epni;
        if (figure_name == "fig1") {
          epi = bounds::attenuator_bounds_epi(N, 0.75, 2.0, 0.91);
          epni = bounds::attenuator_bounds_epni(N, 0.75, 2.0, 0.91);
        } else {
          const double H_f = std::log(15.1);
          epi = bounds::classical_noise_bounds_epi(N, 1.0, 2.0, H_f);
          epni = bounds::classical_noise_bounds_epni(N, 1.0, 2.0, H_f);
        }
        csv << io::format_double(N) << ',' << io::format_double(epi.lower)
            << ',' << io::format_double(epi.upper) << ','
            << io::format_double(epni.lower) << ','
            << io::format_double(epni.upper) << "\n";
      }
      detail::write_file(figure_out, csv.str());
      runlog.log(command.str(),
                 nlohmann::json{{"figure", figure_name}, {"grid", grid_spec}},
                 {figure_out});
      return 0;
    }

    if (verify_cmd->parsed()) {
      verify::SuiteConfig config;
      if (!verify_config_path.empty()) {
        std::ifstream in(verify_config_path);
        if (!in)
          throw std::invalid_argument("cannot read config: " +
                                      verify_config_path);
        config = verify::SuiteConfig::parse(in);
      }
      const auto report = verify::run_suite(config);
      const std::string payload = io::to_json(report).dump(2) + "\n";
      std::vector<std::string> outputs;
      if (verify_out.empty()) {
        out << payload;
      } else {
        detail::write_file(verify_out, payload);
        outputs.push_back(verify_out);
      }
      if (!verify_csv.empty()) {
        detail::write_file(verify_csv, io::suite_csv(report));
        outputs.push_back(verify_csv);
      }
      err << "verify: " << report.violations() << " violation(s), "
          << report.candidates() << " conjecture candidate(s), "
          << report.errors.size() << " error(s)\n";
      runlog.log(command.str(), io::to_json(report.config), outputs);
      return report.passed() ? 0 : 1;
    }

    if (holevo_cmd->parsed()) {
      channels::ChannelSpec spec =
          hattn->parsed()
              ? channels::ChannelSpec(channels::AttenuatorSpec{
                    att_args.lambda, io::parse_env_spec(att_args.env)})
              : channels::ChannelSpec(channels::ClassicalNoiseSpec{
                    noise_args.t, io::parse_noise_spec(noise_args.dist)});
      channels::QuadratureSpec quad;
      quad.nodes_per_axis = holevo_quad;
      const double rate =
          channels::holevo_coherent_rate(spec, holevo_N, holevo_dim, quad);
      const auto epi = bounds::evaluate(spec, holevo_N, bounds::Method::epi);
      const auto epni = bounds::evaluate(spec, holevo_N, bounds::Method::epni);
      nlohmann::json record{
          {"N", holevo_N},
          {"dim", holevo_dim},
          {"rate", rate},
          {"units", "nats"},
          {"channel", io::to_json(epi.channel)},
          {"epi", {{"lower", epi.lower}, {"upper", epi.upper},
                   {"gap_bound", epi.gap_bound}}},
          {"epni", {{"lower", epni.lower}, {"upper", epni.upper},
                    {"gap_bound", epni.gap_bound}}}};
      out << record.dump(2) << "\n";
      runlog.log(command.str(), record, {});
      return 0;
    }
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << "\n";
    return 2;
  }
  err << "error: no command executed\n";
  return 2;
}

}  // namespace bcw::cli
