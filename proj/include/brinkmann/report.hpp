#pragma once

// JSON and CSV serialization of every report type. JSON output is
// deterministic: object keys sorted, doubles printed with %.17g, non-finite
// values written as null.

#include <string>

#include "json.hpp"

#include "brinkmann/dynamics.hpp"
#include "brinkmann/geodesic.hpp"
#include "brinkmann/verify.hpp"

namespace brinkmann {

std::string dump_json(const nlohmann::json& j);

nlohmann::json to_json(const CompletenessVerdict& v);
nlohmann::json to_json(const Trajectory& t, bool with_samples = true);
nlohmann::json to_json(const ScanReport& r);
nlohmann::json to_json(const BrinkmannCertificate& c);
nlohmann::json to_json(const SurfacePatch& p);
nlohmann::json to_json(const FrameOnE& f);
nlohmann::json to_json(const FrameTransportResult& r);
nlohmann::json to_json(const EquicontinuityReport& r);
nlohmann::json to_json(const RicciHarmonicReport& r);
nlohmann::json to_json(const NormGrowthReport& r);

// CSV column orders:
//   trajectory  t, x0..x{n-1}, xdot0..xdot{n-1}
//   scan        index, seed, point, velocity, verdict, t_star, energy_drift, clairaut_drift, growth_exponent, blowup_exponent
//               (point and velocity are space-separated lists)
//   certificate check, value, tolerance, pass
//   surface     i, j, sigma, tau, x0..x{n-1}, second_fundamental_form, induced_curvature
//   flow        t, mean_log_norm, sample_0 .. sample_{N-1}
//   ricci       u, z1..zn, ricci_norm, ricci_uu, laplacian
std::string trajectory_csv(const Trajectory& t);
std::string scan_csv(const ScanReport& r);
std::string certificate_csv(const BrinkmannCertificate& c);
std::string surface_csv(const SurfacePatch& p);
std::string flow_csv(const EquicontinuityReport& r);
std::string ricci_csv(const RicciHarmonicReport& r);

}  // namespace brinkmann
