#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bcw/bounds.hpp"
#include "bcw/channels.hpp"
#include "bcw/fock.hpp"
#include "bcw/noise.hpp"
#include "bcw/verify.hpp"
#include "bcw/version.hpp"

// JSON schemas and CSV emitters for every externally visible type, plus the
// inline spec grammar used by the CLI (thermal:2, number:3, gaussian:iso, ...).

namespace bcw::io {

using nlohmann::json;

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// DensityMatrix <-> {dim, modes, re, im}, row-major; exact round-trip.

inline json to_json(const fock::DensityMatrix& rho) {
  const int n = rho.total_dim();
  std::vector<double> re, im;
  re.reserve(static_cast<std::size_t>(n) * n);
  im.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      re.push_back(rho.entries(i, j).real());
      im.push_back(rho.entries(i, j).imag());
    }
  return json{{"dim", rho.dim}, {"modes", rho.modes}, {"re", re}, {"im", im}};
}

inline fock::DensityMatrix density_from_json(const json& j) {
  fock::DensityMatrix rho;
  rho.dim = j.at("dim").get<int>();
  rho.modes = j.at("modes").get<int>();
  if (rho.dim < 1 || (rho.modes != 1 && rho.modes != 2))
    throw std::invalid_argument("density matrix JSON: bad dim/modes");
  const int n = rho.total_dim();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<int>(re.size()) != n * n ||
      static_cast<int>(im.size()) != n * n)
    throw std::invalid_argument("density matrix JSON: entry count mismatch");
  rho.entries.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j2 = 0; j2 < n; ++j2) {
      const std::size_t k = static_cast<std::size_t>(i) * n + j2;
      rho.entries(i, j2) = fock::complexd(re[k].get<double>(),
                                          im[k].get<double>());
    }
  return rho;
}

// ---------------------------------------------------------------------------
// EnvironmentSpec <-> {"variant": ..., parameters...}

inline json to_json(const channels::EnvironmentSpec& env) {
  using Kind = channels::EnvironmentSpec::Kind;
  switch (env.kind()) {
    case Kind::thermal:
      return json{{"variant", "thermal"}, {"N", env.thermal_N()}};
    case Kind::number:
      return json{{"variant", "number"}, {"n", env.number_n()}};
    case Kind::coherent:
      return json{{"variant", "coherent"},
                  {"re", env.coherent_alpha().real()},
                  {"im", env.coherent_alpha().imag()}};
    case Kind::superposition: {
      const auto& c = env.superposition_coeffs();
      std::vector<double> re(c.size()), im(c.size());
      for (int i = 0; i < c.size(); ++i) {
        re[i] = c(i).real();
        im[i] = c(i).imag();
      }
      return json{{"variant", "superposition"}, {"re", re}, {"im", im}};
    }
    case Kind::explicit_state:
    default:
      return json{{"variant", "explicit"},
                  {"state", to_json(env.explicit_matrix())}};
  }
}

inline channels::EnvironmentSpec env_from_json(const json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "thermal")
    return channels::EnvironmentSpec::thermal(j.at("N").get<double>());
  if (variant == "number")
    return channels::EnvironmentSpec::number(j.at("n").get<int>());
  if (variant == "coherent")
    return channels::EnvironmentSpec::coherent(
        {j.at("re").get<double>(), j.value("im", 0.0)});
  if (variant == "superposition") {
    const auto re = j.at("re").get<std::vector<double>>();
    std::vector<double> im(re.size(), 0.0);
    if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
    if (im.size() != re.size())
      throw std::invalid_argument("superposition re/im length mismatch");
    Eigen::VectorXcd c(re.size());
    for (std::size_t i = 0; i < re.size(); ++i)
      c(static_cast<int>(i)) = fock::complexd(re[i], im[i]);
    return channels::EnvironmentSpec::superposition(std::move(c));
  }
  if (variant == "explicit")
    return channels::EnvironmentSpec::explicit_state(
        density_from_json(j.at("state")));
  throw std::invalid_argument("unknown environment variant: " + variant);
}

// ---------------------------------------------------------------------------
// NoiseDensity <-> {"variant": ..., parameters...}

inline json to_json(const channels::NoiseDensity& f) {
  using Kind = channels::NoiseDensity::Kind;
  switch (f.kind()) {
    case Kind::gaussian: {
      const auto& c = f.components().front();
      return json{{"variant", "gaussian"},
                  {"mean", {c.mean(0), c.mean(1)}},
                  {"cov", {{c.cov(0, 0), c.cov(0, 1)},
                           {c.cov(1, 0), c.cov(1, 1)}}}};
    }
    case Kind::gaussian_mixture: {
      json comps = json::array();
      for (const auto& c : f.components())
        comps.push_back(json{{"weight", c.weight},
                             {"mean", {c.mean(0), c.mean(1)}},
                             {"cov", {{c.cov(0, 0), c.cov(0, 1)},
                                      {c.cov(1, 0), c.cov(1, 1)}}}});
      return json{{"variant", "gaussian-mixture"}, {"components", comps}};
    }
    case Kind::uniform_disc:
      return json{{"variant", "uniform-disc"}, {"radius", f.disc_radius()}};
    case Kind::tabulated:
    default: {
      const auto& g = f.grid();
      return json{{"variant", "tabulated"}, {"xmin", g.xmin},
                  {"xmax", g.xmax},         {"ymin", g.ymin},
                  {"ymax", g.ymax},         {"nx", g.nx},
                  {"ny", g.ny},             {"values", g.values}};
    }
  }
}

namespace detail {

inline Eigen::Matrix2d cov_from_json(const json& j) {
  Eigen::Matrix2d m;
  m << j.at(0).at(0).get<double>(), j.at(0).at(1).get<double>(),
      j.at(1).at(0).get<double>(), j.at(1).at(1).get<double>();
  return m;
}

inline Eigen::Vector2d vec_from_json(const json& j) {
  return {j.at(0).get<double>(), j.at(1).get<double>()};
}

}  // namespace detail

inline channels::NoiseDensity noise_from_json(const json& j) {
  const std::string variant = j.at("variant").get<std::string>();
  if (variant == "gaussian") {
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    if (j.contains("mean")) mean = detail::vec_from_json(j.at("mean"));
    return channels::NoiseDensity::gaussian(detail::cov_from_json(j.at("cov")),
                                            mean);
  }
  if (variant == "gaussian-mixture") {
    std::vector<channels::GaussianComponent> comps;
    for (const auto& cj : j.at("components")) {
      channels::GaussianComponent c;
      c.weight = cj.at("weight").get<double>();
      c.mean = detail::vec_from_json(cj.at("mean"));
      c.cov = detail::cov_from_json(cj.at("cov"));
      comps.push_back(c);
    }
    return channels::NoiseDensity::gaussian_mixture(std::move(comps));
  }
  if (variant == "uniform-disc")
    return channels::NoiseDensity::uniform_disc(j.at("radius").get<double>());
  if (variant == "tabulated") {
    channels::TabulatedGrid g;
    g.xmin = j.at("xmin").get<double>();
    g.xmax = j.at("xmax").get<double>();
    g.ymin = j.at("ymin").get<double>();
    g.ymax = j.at("ymax").get<double>();
    g.nx = j.at("nx").get<int>();
    g.ny = j.at("ny").get<int>();
    g.values = j.at("values").get<std::vector<double>>();
    return channels::NoiseDensity::tabulated(std::move(g));
  }
  throw std::invalid_argument("unknown noise variant: " + variant);
}

// ---------------------------------------------------------------------------
// Bound reports

inline json to_json(const bounds::ChannelSummary& c) {
  if (c.kind == bounds::ChannelSummary::Kind::attenuator)
    return json{{"kind", "attenuator"}, {"lambda", c.lambda},
                {"N_E", c.N_E},         {"S_E", c.S_E},
                {"N_E_ep", c.N_E_ep}};
  return json{
      {"kind", "classical-noise"}, {"t", c.t}, {"E_f", c.E_f}, {"H_f", c.H_f}};
}

inline json to_json(const bounds::BoundReport& r) {
  return json{{"N", r.N},
              {"lower", r.lower},
              {"lower_clamped", r.lower_clamped},
              {"upper", r.upper},
              {"gap_bound", r.gap_bound},
              {"method", bounds::method_name(r.method)},
              {"channel", to_json(r.channel)},
              {"units", "nats"}};
}

inline bounds::BoundReport bound_report_from_json(const json& j) {
  bounds::BoundReport r;
  r.N = j.at("N").get<double>();
  r.lower = j.at("lower").get<double>();
  r.lower_clamped = j.at("lower_clamped").get<double>();
  r.upper = j.at("upper").get<double>();
  r.gap_bound = j.at("gap_bound").get<double>();
  r.method = j.at("method").get<std::string>() == "epni"
                 ? bounds::Method::epni
                 : bounds::Method::epi;
  const auto& cj = j.at("channel");
  if (cj.at("kind").get<std::string>() == "attenuator") {
    r.channel.kind = bounds::ChannelSummary::Kind::attenuator;
    r.channel.lambda = cj.at("lambda").get<double>();
    r.channel.N_E = cj.at("N_E").get<double>();
    r.channel.S_E = cj.at("S_E").get<double>();
    r.channel.N_E_ep = cj.at("N_E_ep").get<double>();
  } else {
    r.channel.kind = bounds::ChannelSummary::Kind::classical_noise;
    r.channel.t = cj.at("t").get<double>();
    r.channel.E_f = cj.at("E_f").get<double>();
    r.channel.H_f = cj.at("H_f").get<double>();
  }
  return r;
}

inline std::string channel_summary_line(const bounds::ChannelSummary& c) {
  std::ostringstream os;
  if (c.kind == bounds::ChannelSummary::Kind::attenuator)
    os << "attenuator lambda=" << format_double(c.lambda)
       << " N_E=" << format_double(c.N_E) << " S_E=" << format_double(c.S_E)
       << " N_E_ep=" << format_double(c.N_E_ep);
  else
    os << "classical-noise t=" << format_double(c.t)
       << " E_f=" << format_double(c.E_f) << " H_f=" << format_double(c.H_f);
  return os.str();
}

/// CSV with #-prefixed header lines recording spec, method, units and version.
inline std::string bound_curve_csv(const std::vector<bounds::BoundReport>& curve) {
  std::ostringstream os;
  os << "# bcw bound curve\n";
  os << "# version: " << version << "\n";
  os << "# units: nats\n";
  if (!curve.empty()) {
    os << "# method: " << bounds::method_name(curve.front().method) << "\n";
    os << "# channel: " << channel_summary_line(curve.front().channel) << "\n";
  }
  os << "N,lower,lower_clamped,upper,gap_bound,method\n";
  for (const auto& r : curve)
    os << format_double(r.N) << ',' << format_double(r.lower) << ','
       << format_double(r.lower_clamped) << ',' << format_double(r.upper)
       << ',' << format_double(r.gap_bound) << ','
       << bounds::method_name(r.method) << "\n";
  return os.str();
}

/// Reader for the CSV emitted above (numeric columns plus method tag).
inline std::vector<bounds::BoundReport> bound_curve_from_csv(std::istream& in) {
  std::vector<bounds::BoundReport> out;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line.rfind("N,", 0) != 0)
        throw std::invalid_argument("bound CSV: missing column header");
      header_seen = true;
      continue;
    }
    std::istringstream ls(line);
    std::string field;
    bounds::BoundReport r;
    auto next = [&]() {
      if (!std::getline(ls, field, ','))
        throw std::invalid_argument("bound CSV: short row");
      return field;
    };
    r.N = std::stod(next());
    r.lower = std::stod(next());
    r.lower_clamped = std::stod(next());
    r.upper = std::stod(next());
    r.gap_bound = std::stod(next());
    r.method = next() == "epni" ? bounds::Method::epni : bounds::Method::epi;
    out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Verification suite

inline json to_json(const verify::InequalityMargin& m) {
  json params = json::object();
  for (const auto& [k, v] : m.params) params[k] = v;
  return json{{"check", m.check},
              {"lhs", m.lhs},
              {"rhs", m.rhs},
              {"margin", m.margin},
              {"dim", m.dim},
              {"bias_bound", m.bias_bound},
              {"tolerance", m.tolerance},
              {"theorem", m.theorem},
              {"violated", m.violated},
              {"flagged", m.flagged},
              {"params", params}};
}

inline json to_json(const verify::SuiteConfig& c) {
  return json{{"seed", c.seed},
              {"qepi_trials", c.qepi_trials},
              {"qepi_dim", c.qepi_dim},
              {"cqepi_trials", c.cqepi_trials},
              {"cqepi_dim", c.cqepi_dim},
              {"quad_nodes", c.quad_nodes},
              {"maxent_trials", c.maxent_trials},
              {"maxent_dim", c.maxent_dim},
              {"minout_trials", c.minout_trials},
              {"minout_dim", c.minout_dim},
              {"cqepni_thermal_trials", c.cqepni_thermal_trials},
              {"photon_cap", c.photon_cap},
              {"lambda_min", c.lambda_min},
              {"lambda_max", c.lambda_max},
              {"t_min", c.t_min},
              {"t_max", c.t_max},
              {"bias_step", c.bias_step}};
}

inline json to_json(const verify::SuiteReport& r) {
  auto group = [](const std::vector<verify::InequalityMargin>& v) {
    json arr = json::array();
    for (const auto& m : v) arr.push_back(to_json(m));
    return arr;
  };
  return json{{"config", to_json(r.config)},
              {"units", "nats"},
              {"checks",
               {{"qepi", group(r.qepi)},
                {"epni", group(r.epni)},
                {"cqepi", group(r.cqepi)},
                {"cqepni", group(r.cqepni)},
                {"cqepni_thermal", group(r.cqepni_thermal)},
                {"maxent", group(r.maxent)},
                {"minout", group(r.minout)}}},
              {"summary",
               {{"violations", r.violations()},
                {"candidates", r.candidates()},
                {"errors", r.errors},
                {"passed", r.passed()}}}};
}

/// Flat CSV view of a suite report, one row per margin record.
inline std::string suite_csv(const verify::SuiteReport& r) {
  std::ostringstream os;
  os << "# bcw verification suite\n";
  os << "# version: " << version << "\n";
  os << "# units: nats\n";
  os << "check,dim,lhs,rhs,margin,bias_bound,tolerance,theorem,violated,flagged\n";
  auto emit = [&](const std::vector<verify::InequalityMargin>& v) {
    for (const auto& m : v)
      os << m.check << ',' << m.dim << ',' << format_double(m.lhs) << ','
         << format_double(m.rhs) << ',' << format_double(m.margin) << ','
         << format_double(m.bias_bound) << ',' << format_double(m.tolerance)
         << ',' << (m.theorem ? 1 : 0) << ',' << (m.violated ? 1 : 0) << ','
         << (m.flagged ? 1 : 0) << "\n";
  };
  emit(r.qepi);
  emit(r.epni);
  emit(r.cqepi);
  emit(r.cqepni);
  emit(r.cqepni_thermal);
  emit(r.maxent);
  emit(r.minout);
  return os.str();
}

// ---------------------------------------------------------------------------
// Inline spec grammar (CLI): thermal:2, number:3, vacuum, coherent:re[,im],
// superposition:c0,c1,..., gaussian:iso, uniform-disc:R, or a JSON file path.

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::istringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file: " + path);
  json j;
  in >> j;
  return j;
}

inline bool looks_like_file(const std::string& s) {
  return s.size() > 5 && s.substr(s.size() - 5) == ".json";
}

}  // namespace detail

inline channels::EnvironmentSpec parse_env_spec(const std::string& s) {
  if (detail::looks_like_file(s) || std::filesystem::exists(s))
    return env_from_json(detail::load_json_file(s));
  const auto parts = detail::split(s, ':');
  const std::string& head = parts[0];
  if (head == "vacuum") return channels::EnvironmentSpec::vacuum();
  if (parts.size() < 2)
    throw std::invalid_argument("environment spec needs name:args, got " + s);
  if (head == "thermal")
    return channels::EnvironmentSpec::thermal(std::stod(parts[1]));
  if (head == "number")
    return channels::EnvironmentSpec::number(std::stoi(parts[1]));
  if (head == "coherent") {
    const auto xy = detail::split(parts[1], ',');
    const double re = std::stod(xy[0]);
    const double im = xy.size() > 1 ? std::stod(xy[1]) : 0.0;
    return channels::EnvironmentSpec::coherent({re, im});
  }
  if (head == "superposition") {
    const auto cs = detail::split(parts[1], ',');
    Eigen::VectorXcd c(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i)
      c(static_cast<int>(i)) = std::stod(cs[i]);
    return channels::EnvironmentSpec::superposition(std::move(c));
  }
  throw std::invalid_argument("unknown environment family: " + head);
}

inline channels::NoiseDensity parse_noise_spec(const std::string& s) {
  if (detail::looks_like_file(s) || std::filesystem::exists(s))
    return noise_from_json(detail::load_json_file(s));
  const auto parts = detail::split(s, ':');
  const std::string& head = parts[0];
  if (head == "gaussian") {
    if (parts.size() >= 2 && parts[1] == "iso")
      return channels::NoiseDensity::standard_gaussian();
    throw std::invalid_argument(
        "inline gaussian supports gaussian:iso; use a JSON file otherwise");
  }
  if (head == "uniform-disc" && parts.size() >= 2)
    return channels::NoiseDensity::uniform_disc(std::stod(parts[1]));
  throw std::invalid_argument("unknown noise spec: " + s);
}

// ---------------------------------------------------------------------------
// Stable digests for run records

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string digest_hex(std::string_view s) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(s)));
  return buf;
}

}  // namespace bcw::io
