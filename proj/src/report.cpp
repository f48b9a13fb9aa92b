#include "brinkmann/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace brinkmann {

using nlohmann::json;

namespace {

std::string num(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// CSV cells keep NaN visible instead of null.
std::string cell(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return num(x);
}

void dump(const json& j, int depth, std::string& out) {
  const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(2 * depth), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(it.key()).dump() + ": ";
        dump(it.value(), depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool flat = std::all_of(j.begin(), j.end(), [](const json& e) { return e.is_primitive(); });
      if (flat) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          dump(j[i], depth + 1, out);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump(j[i], depth + 1, out);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float:
      out += num(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

json vec(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::string joined(const std::vector<double>& v, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += cell(v[i]);
  }
  return s;
}

}  // namespace

std::string dump_json(const json& j) {
  std::string out;
  dump(j, 0, out);
  out += "\n";
  return out;
}

json to_json(const CompletenessVerdict& v) {
  return {{"kind", to_string(v.kind)},
          {"t", v.t},
          {"blowup_exponent", v.blowup_exponent},
          {"extrapolated_t", v.extrapolated_t},
          {"final_speed", v.final_speed},
          {"detail", v.detail}};
}

json to_json(const Trajectory& t, bool with_samples) {
  json j = {{"termination", to_json(t.termination)},
            {"drift",
             {{"energy", t.drift.energy}, {"clairaut", t.drift.clairaut}, {"has_clairaut", t.drift.has_clairaut}}},
            {"initial_energy", t.initial_energy},
            {"initial_clairaut", t.initial_clairaut},
            {"growth_exponent", t.growth_exponent},
            {"max_speed", t.max_speed},
            {"accepted_steps", t.accepted_steps},
            {"rejected_steps", t.rejected_steps},
            {"deck_letters", t.deck_letters}};
  if (with_samples) {
    json s = json::array();
    for (const auto& st : t.samples)
      s.push_back({{"t", st.affine_param}, {"point", vec(st.point.coords)}, {"velocity", vec(st.velocity.components)}});
    j["samples"] = std::move(s);
  }
  return j;
}

json to_json(const ScanReport& r) {
  json records = json::array();
  for (const auto& rec : r.records)
    records.push_back({{"index", rec.index},
                       {"init", {{"point", vec(rec.init.point.coords)}, {"velocity", vec(rec.init.velocity.components)}}},
                       {"trajectory", to_json(rec.trajectory, false)}});
  json escapes = json::array();
  for (const auto& [idx, t] : r.escapes) escapes.push_back({{"index", idx}, {"t_star", t}});
  return {{"spacetime", r.spacetime},
          {"seed", r.seed},
          {"tmax", r.tmax},
          {"samples", r.records.size()},
          {"fraction_complete", r.fraction_complete},
          {"escapes", std::move(escapes)},
          {"max_growth_exponent", r.max_growth_exponent},
          {"max_energy_drift", r.max_energy_drift},
          {"max_clairaut_drift", r.max_clairaut_drift},
          {"records", std::move(records)}};
}

json to_json(const BrinkmannCertificate& c) {
  json checks = json::array();
  for (const auto& k : c.checks)
    checks.push_back({{"name", k.name}, {"value", k.value}, {"tolerance", k.tolerance}, {"pass", k.pass}});
  return {{"spacetime", c.spacetime},
          {"samples", c.samples},
          {"max_nabla_V", c.max_nabla_V},
          {"max_g_VV", c.max_g_VV},
          {"max_d_alpha", c.max_d_alpha},
          {"max_killing", c.max_killing},
          {"checks", std::move(checks)},
          {"pass", c.pass}};
}

json to_json(const SurfacePatch& p) {
  json points = json::array(), II = json::array(), K = json::array();
  for (int i = 0; i < p.rows; ++i) {
    json prow = json::array(), irow = json::array(), krow = json::array();
    for (int j = 0; j < p.cols; ++j) {
      const auto idx = static_cast<std::size_t>(i * p.cols + j);
      prow.push_back(vec(p.points[idx].coords));
      irow.push_back(p.second_fundamental_form[idx]);
      krow.push_back(p.induced_curvature[idx]);
    }
    points.push_back(std::move(prow));
    II.push_back(std::move(irow));
    K.push_back(std::move(krow));
  }
  return {{"rows", p.rows},
          {"cols", p.cols},
          {"border", p.border},
          {"sigma", vec(p.sigma)},
          {"tau", vec(p.tau)},
          {"points", std::move(points)},
          {"second_fundamental_form", std::move(II)},
          {"induced_curvature", std::move(K)},
          {"max_second_fundamental_form", p.max_second_fundamental_form},
          {"max_induced_curvature", p.max_induced_curvature}};
}

json to_json(const FrameOnE& f) {
  json v = json::array();
  for (const auto& e : f.vectors) v.push_back(vec(e.components));
  return {{"base", vec(f.base.coords)}, {"vectors", std::move(v)}};
}

json to_json(const FrameTransportResult& r) {
  return {{"frame", to_json(r.frame)},
          {"pushforward", to_json(r.pushforward)},
          {"horizontality_residual", r.horizontality_residual},
          {"max_g_eV", r.check.max_g_eV},
          {"gram_residual", r.check.gram_residual}};
}

json to_json(const EquicontinuityReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples) {
    json j = {{"start", vec(s.start.coords)}, {"log_norms", vec(s.log_norms)}};
    if (!s.failure.empty()) j["failure"] = s.failure;
    samples.push_back(std::move(j));
  }
  return {{"times", vec(r.times)},
          {"samples", std::move(samples)},
          {"mean_log_norm", vec(r.mean_log_norm)},
          {"max_log_norm", r.max_log_norm},
          {"fitted_rate", r.fitted_rate},
          {"bounded_margin", r.bounded_margin},
          {"classification", to_string(r.classification)},
          {"failures", r.failures}};
}

json to_json(const RicciHarmonicReport& r) {
  json pts = json::array();
  for (const auto& p : r.points) pts.push_back(vec(p));
  return {{"H", r.H},
          {"n", r.n},
          {"seed", r.seed},
          {"points", std::move(pts)},
          {"ricci_norm", vec(r.ricci_norm)},
          {"ricci_uu", vec(r.ricci_uu)},
          {"laplacian", vec(r.laplacian)},
          {"max_ricci_residual", r.max_ricci_residual},
          {"max_laplacian_residual", r.max_laplacian_residual},
          {"ratio_min", r.ratio_min},
          {"ratio_max", r.ratio_max},
          {"ratio_samples", r.ratio_samples}};
}

json to_json(const NormGrowthReport& r) {
  json trials = json::array();
  for (const auto& t : r.trials)
    trials.push_back({{"speed", t.speed},
                      {"index", t.index},
                      {"max_slope", t.max_slope},
                      {"max_ratio", t.max_ratio},
                      {"violation", t.violation}});
  return {{"epsilon", r.epsilon}, {"C", r.C}, {"fitted", r.fitted}, {"violations", r.violations}, {"trials", std::move(trials)}};
}

std::string trajectory_csv(const Trajectory& t) {
  std::ostringstream os;
  const std::size_t n = t.samples.empty() ? 0 : t.samples.front().point.coords.size();
  os << "t";
  for (std::size_t i = 0; i < n; ++i) os << ",x" << i;
  for (std::size_t i = 0; i < n; ++i) os << ",xdot" << i;
  os << "\n";
  for (const auto& s : t.samples)
    os << cell(s.affine_param) << "," << joined(s.point.coords, ",") << "," << joined(s.velocity.components, ",") << "\n";
  return os.str();
}

std::string scan_csv(const ScanReport& r) {
  std::ostringstream os;
  os << "index,seed,point,velocity,verdict,t_star,energy_drift,clairaut_drift,growth_exponent,blowup_exponent\n";
  for (const auto& rec : r.records) {
    const auto& tr = rec.trajectory;
    os << rec.index << "," << r.seed << "," << joined(rec.init.point.coords, " ") << ","
       << joined(rec.init.velocity.components, " ") << "," << to_string(tr.termination.kind) << ","
       << cell(tr.termination.t) << "," << cell(tr.drift.energy) << "," << cell(tr.drift.clairaut) << ","
       << cell(tr.growth_exponent) << "," << cell(tr.termination.blowup_exponent) << "\n";
  }
  return os.str();
}

std::string certificate_csv(const BrinkmannCertificate& c) {
  std::ostringstream os;
  os << "check,value,tolerance,pass\n";
  for (const auto& k : c.checks) os << k.name << "," << cell(k.value) << "," << cell(k.tolerance) << "," << (k.pass ? "true" : "false") << "\n";
  os << "killing," << cell(c.max_killing) << ",,\n";
  return os.str();
}

std::string surface_csv(const SurfacePatch& p) {
  std::ostringstream os;
  const std::size_t n = p.points.empty() ? 0 : p.points.front().coords.size();
  os << "i,j,sigma,tau";
  for (std::size_t k = 0; k < n; ++k) os << ",x" << k;
  os << ",second_fundamental_form,induced_curvature\n";
  for (int i = 0; i < p.rows; ++i)
    for (int j = 0; j < p.cols; ++j) {
      const auto idx = static_cast<std::size_t>(i * p.cols + j);
      os << i << "," << j << "," << cell(p.sigma[static_cast<std::size_t>(i)]) << "," << cell(p.tau[static_cast<std::size_t>(j)])
         << "," << joined(p.points[idx].coords, ",") << "," << cell(p.second_fundamental_form[idx]) << ","
         << cell(p.induced_curvature[idx]) << "\n";
    }
  return os.str();
}

std::string flow_csv(const EquicontinuityReport& r) {
  std::ostringstream os;
  os << "t,mean_log_norm";
  for (std::size_t s = 0; s < r.samples.size(); ++s) os << ",sample_" << s;
  os << "\n";
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    os << cell(r.times[k]) << "," << cell(r.mean_log_norm[k]);
    for (const auto& s : r.samples) os << "," << (k < s.log_norms.size() ? cell(s.log_norms[k]) : "");
    os << "\n";
  }
  return os.str();
}

std::string ricci_csv(const RicciHarmonicReport& r) {
  std::ostringstream os;
  os << "u";
  for (int i = 1; i <= r.n; ++i) os << ",z" << i;
  os << ",ricci_norm,ricci_uu,laplacian\n";
  for (std::size_t k = 0; k < r.points.size(); ++k)
    os << joined(r.points[k], ",") << "," << cell(r.ricci_norm[k]) << "," << cell(r.ricci_uu[k]) << ","
       << cell(r.laplacian[k]) << "\n";
  return os.str();
}

}  // namespace brinkmann
