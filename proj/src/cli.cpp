#include "brinkmann/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "brinkmann/catalog.hpp"
#include "brinkmann/dynamics.hpp"
#include "brinkmann/geodesic.hpp"
#include "brinkmann/report.hpp"
#include "brinkmann/sampling.hpp"
#include "brinkmann/spec.hpp"
#include "brinkmann/verify.hpp"

namespace brinkmann::cli {

using nlohmann::json;

namespace {

/// Argument problem detected after CLI11 parsing; maps to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string spacetime;
  std::vector<std::string> params;
  std::string spec_file;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string out;
  std::string format;
};

void add_common(CLI::App* cmd, Common& c, bool spacetime) {
  if (spacetime) {
    cmd->add_option("--spacetime", c.spacetime, "catalog key (see `list`)");
    cmd->add_option("--param", c.params, "catalog parameter key=value (repeatable)");
    cmd->add_option("--spec", c.spec_file, "spacetime JSON document instead of a catalog key");
  }
  cmd->add_option("--seed", c.seed, "random seed (default 0)");
  cmd->add_option("--jobs", c.jobs, "worker threads (default: available parallelism; BRINKMANN_JOBS overrides)");
  cmd->add_option("--out", c.out, "output path (default stdout)");
  cmd->add_option("--format", c.format, "json or csv (default: csv when --out ends in .csv)")
      ->check(CLI::IsMember({"json", "csv"}));
}

std::string keys_text() {
  std::string s;
  for (const auto& k : catalog_keys()) s += (s.empty() ? "" : ", ") + k;
  return s;
}

Spacetime load(const Common& c) {
  if (c.spacetime.empty() == c.spec_file.empty())
    throw UsageError("exactly one of --spacetime or --spec is required (catalog keys: " + keys_text() + ")");
  if (!c.spec_file.empty()) {
    if (!c.params.empty()) throw UsageError("--param applies to catalog entries only");
    std::ifstream in(c.spec_file);
    if (!in) throw UsageError("cannot read spec file " + c.spec_file);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      return Spacetime(load_spacetime_spec(ss.str()));
    } catch (const SchemaError& e) {
      throw UsageError(e.what());
    }
  }
  Params params;
  for (const auto& kv : c.params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects key=value, got '" + kv + "'");
    params[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  try {
    return build(c.spacetime, params);
  } catch (const CatalogError& e) {
    throw UsageError(e.what());
  }
}

int jobs_for(const Common& c) {
  if (const char* env = std::getenv("BRINKMANN_JOBS"); env && *env) {
    try {
      const int j = std::stoi(env);
      if (j > 0) return j;
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("BRINKMANN_JOBS must be a positive integer, got '") + env + "'");
  }
  if (c.jobs < 0) throw UsageError("--jobs must be positive");
  return c.jobs;
}

bool want_csv(const Common& c) {
  if (!c.format.empty()) return c.format == "csv";
  return c.out.size() >= 4 && c.out.compare(c.out.size() - 4, 4, ".csv") == 0;
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out, std::ios::binary);
  if (!f) throw Error("cannot write " + c.out);
  f << text;
}

std::vector<double> parse_numbers(const std::string& text, const char* what) {
  std::vector<double> v;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string(what) + ": '" + item + "' is not a number");
    }
  }
  return v;
}

json with_header(json report, const std::string& command, const Spacetime* s) {
  report["command"] = command;
  if (s) report["spacetime"] = s->name();
  return report;
}

json full_certificate_extras(const Spacetime& s, const BrinkmannCertificate& cert, std::uint64_t seed) {
  json extras;
  if (!cert.pass) {
    const json skipped = {{"skipped", "certificate failed"}};
    return {{"surface", skipped}, {"control_surface", skipped}, {"frame_transport", skipped}};
  }
  ChartPoint p;
  for (std::uint64_t k = 1; k < 10000 && p.coords.empty(); ++k) {
    auto x = s.sample_box_point(halton_point(k, s.dim()));
    if (s.metric().domain_margin(x) > 1e-2) p.coords = std::move(x);
  }
  auto guarded = [&](const char* key, auto&& fn) {
    try {
      extras[key] = fn();
    } catch (const Error& e) {
      extras[key] = {{"error", e.what()}};
    }
  };
  guarded("surface", [&] { return to_json(totally_geodesic_surface(s, p, random_transverse_to_V(s, p, seed))); });
  guarded("control_surface", [&] {
    const auto [a, b] = random_control_plane(s, p, seed);
    return to_json(ruled_surface(s, p, a, b));
  });
  guarded("frame_transport", [&] {
    if (s.dim() < 3) throw Error("E = V^perp / V is trivial in dimension < 3");
    return to_json(frame_transport_along_V(s, coordinate_frame_on_E(s, p), 1.0));
  });
  return extras;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Brinkmann spacetime geometry toolkit", "brinkmann"};
  app.require_subcommand(1);
  Common common;

  auto* list = app.add_subcommand("list", "catalog keys, descriptions and parameters");
  add_common(list, common, false);

  auto* geo = app.add_subcommand("geodesic", "integrate one geodesic");
  add_common(geo, common, true);
  std::string init;
  double tmax = 10.0, tol = 1e-10;
  geo->add_option("--init", init, "initial condition \"p;v\", e.g. \"1,0;1,0\" (default: seeded sample)");
  geo->add_option("--tmax", tmax, "affine parameter horizon (default 10)");
  geo->add_option("--tol", tol, "relative tolerance (default 1e-10)");

  auto* scan = app.add_subcommand("scan", "completeness scan over seeded geodesics");
  add_common(scan, common, true);
  int samples = 100;
  double scan_tmax = 100.0;
  scan->add_option("--samples", samples, "number of geodesics (default 100)");
  scan->add_option("--tmax", scan_tmax, "affine parameter horizon (default 100)");
  scan->add_option("--tol", tol, "relative tolerance (default 1e-10)");

  auto* cert = app.add_subcommand("certify", "Brinkmann certificate of the distinguished field");
  add_common(cert, common, true);
  int cert_samples = 128;
  bool full = false;
  cert->add_option("--samples", cert_samples, "quasi-random sample points (default 128)");
  cert->add_flag("--full", full, "add totally geodesic surface and frame-transport sub-reports");

  auto* flow = app.add_subcommand("flow", "equicontinuity diagnostic of a vector field flow");
  add_common(flow, common, true);
  std::string field = "V";
  int flow_samples = 50, grid = 200;
  double flow_tmax = 100.0;
  flow->add_option("--field", field, "V or comma-separated component expressions (default V)");
  flow->add_option("--samples", flow_samples, "start points (default 50)");
  flow->add_option("--tmax", flow_tmax, "horizon (default 100)");
  flow->add_option("--grid", grid, "output intervals (default 200)");

  auto* ricci = app.add_subcommand("ricci", "pp-wave Ricci / Laplacian check");
  add_common(ricci, common, false);
  std::string H;
  int dim = 2, ricci_samples = 100;
  ricci->add_option("--H", H, "profile H(u, z1..zn)")->required();
  ricci->add_option("--dim", dim, "number of transverse coordinates n >= 2 (default 2)");
  ricci->add_option("--samples", ricci_samples, "sample points (default 100)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help() << "catalog keys: " << keys_text() << "\n";
    return 2;
  }

  try {
    if (list->parsed()) {
      if (want_csv(common)) throw UsageError("list has no CSV form");
      json entries = json::array();
      std::ostringstream text;
      for (const auto& e : catalog_entries()) {
        json params = json::array();
        text << e.key << "  " << e.description << "\n";
        for (const auto& p : e.params) {
          params.push_back({{"name", p.name}, {"type", p.type}, {"default", p.default_value}, {"description", p.description}});
          text << "    --param " << p.name << "=<" << p.type << ">  " << p.description << " (default " << p.default_value << ")\n";
        }
        entries.push_back({{"key", e.key},
                           {"description", e.description},
                           {"params", std::move(params)},
                           {"document", catalog_document(e.key)}});
      }
      emit(common, common.format == "json" || !common.out.empty() ? dump_json({{"command", "list"}, {"entries", entries}}) : text.str(), out);
      return 0;
    }
    if (ricci->parsed()) {
      if (dim < 2) throw UsageError("--dim must be at least 2");
      if (ricci_samples < 1) throw UsageError("--samples must be positive");
      RicciHarmonicReport r;
      try {
        r = ppwave_ricci_harmonic(H, dim, ricci_samples, common.seed);
      } catch (const CatalogError& e) {
        throw UsageError(e.what());
      }
      emit(common, want_csv(common) ? ricci_csv(r) : dump_json(with_header(to_json(r), "ricci", nullptr)), out);
      return 0;
    }

    const Spacetime s = load(common);
    const int jobs = jobs_for(common);
    if (geo->parsed()) {
      if (!(tmax > 0.0) || !(tol > 0.0)) throw UsageError("--tmax and --tol must be positive");
      GeodesicState st;
      if (init.empty()) {
        st = default_initial_condition(s, common.seed, 0);
      } else {
        const auto parts = split_list(init, ';');
        if (parts.size() != 2) throw UsageError("--init expects \"p;v\"");
        st.point.coords = parse_numbers(parts[0], "--init");
        st.velocity.components = parse_numbers(parts[1], "--init");
        if (st.point.dim() != s.dim() || static_cast<int>(st.velocity.components.size()) != s.dim())
          throw UsageError("--init needs " + std::to_string(s.dim()) + " coordinates for point and velocity");
        st.velocity.base = st.point;
      }
      IntegratorConfig cfg;
      cfg.rel_tol = tol;
      cfg.abs_tol = tol * 1e-2;
      const Trajectory t = integrate_geodesic(s, st, tmax, cfg);
      json j = with_header(to_json(t), "geodesic", &s);
      j["init"] = {{"point", st.point.coords}, {"velocity", st.velocity.components}};
      j["tmax"] = tmax;
      emit(common, want_csv(common) ? trajectory_csv(t) : dump_json(j), out);
      return 0;
    }
    if (scan->parsed()) {
      if (samples < 1) throw UsageError("--samples must be positive");
      if (!(scan_tmax > 0.0) || !(tol > 0.0)) throw UsageError("--tmax and --tol must be positive");
      ScanOptions o;
      o.samples = samples;
      o.seed = common.seed;
      o.tmax = scan_tmax;
      o.jobs = jobs;
      o.config.rel_tol = tol;
      o.config.abs_tol = tol * 1e-2;
      const auto r = completeness_scan(s, o);
      emit(common, want_csv(common) ? scan_csv(r) : dump_json(with_header(to_json(r), "scan", &s)), out);
      return 0;
    }
    if (cert->parsed()) {
      if (cert_samples < 1) throw UsageError("--samples must be positive");
      const auto c = brinkmann_certificate(s, cert_samples);
      if (want_csv(common)) {
        emit(common, certificate_csv(c), out);
        return 0;
      }
      json j = with_header(to_json(c), "certify", &s);
      if (full) j["full"] = full_certificate_extras(s, c, common.seed);
      emit(common, dump_json(j), out);
      return 0;
    }
    if (flow->parsed()) {
      if (flow_samples < 1 || grid < 2 || !(flow_tmax > 0.0)) throw UsageError("--samples, --grid and --tmax must be positive");
      VectorField X;
      if (field == "V") {
        X = s.V();
      } else {
        const auto comps = split_list(field);
        if (static_cast<int>(comps.size()) != s.dim())
          throw UsageError("--field needs " + std::to_string(s.dim()) + " components");
        X = VectorField::parse(comps, s.spec().coords);
      }
      EquicontinuityOptions o;
      o.grid = grid;
      o.jobs = jobs;
      const auto r = equicontinuity_diagnostic(s, X, flow_samples, flow_tmax, common.seed, o);
      json j = with_header(to_json(r), "flow", &s);
      j["field"] = field;
      j["seed"] = common.seed;
      emit(common, want_csv(common) ? flow_csv(r) : dump_json(j), out);
      return 0;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace brinkmann::cli
