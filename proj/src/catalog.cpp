#include "brinkmann/catalog.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "brinkmann/errors.hpp"

namespace brinkmann {

namespace {

using nlohmann::json;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw CatalogError("parameter " + what + ": expected a number, got '" + text + "'");
  return out;
}

int parse_int(const std::string& text, const std::string& what) {
  const std::string t = trim(text);
  int out = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw CatalogError("parameter " + what + ": expected an integer, got '" + text + "'");
  return out;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const CatalogEntry& entry_for(const std::string& name) {
  for (const CatalogEntry& e : catalog_entries())
    if (e.key == name) return e;
  std::string keys;
  for (const std::string& k : catalog_keys()) keys += (keys.empty() ? "" : ", ") + k;
  throw CatalogError("unknown spacetime '" + name + "' (valid keys: " + keys + ")");
}

std::string param(const CatalogEntry& entry, const Params& params, const std::string& name) {
  auto it = params.find(name);
  if (it != params.end()) return it->second;
  for (const CatalogParam& p : entry.params)
    if (p.name == name) return p.default_value;
  throw CatalogError("internal: no parameter " + name);
}

json box(const std::vector<double>& lo, const std::vector<double>& hi) { return {{"lower", lo}, {"upper", hi}}; }

json identity_rows(int n, int skip_axis = -1, double diag = 1.0) {
  json rows = json::array();
  for (int r = 0; r < n; ++r) {
    json row = json::array();
    for (int c = 0; c < n; ++c) row.push_back(r == c ? (r == skip_axis ? 1.0 : diag) : 0.0);
    rows.push_back(row);
  }
  return rows;
}

json translation(int n, int axis, double amount) {
  std::vector<double> t(static_cast<std::size_t>(n), 0.0);
  t[static_cast<std::size_t>(axis)] = amount;
  return t;
}

std::vector<std::string> null_coords(int transverse, const std::string& prefix) {
  std::vector<std::string> c = {"u", "v"};
  for (int i = 1; i <= transverse; ++i) c.push_back(prefix + std::to_string(i));
  return c;
}

json doc_minkowski(const CatalogEntry& e, const Params& p) {
  const int n = parse_int(param(e, p, "n"), "n");
  if (n < 2 || n > kMaxDim - 1) throw CatalogError("parameter n: expected 2 <= n <= " + std::to_string(kMaxDim - 1));
  const int dim = n + 1;
  return {{"name", "minkowski"},
          {"description", "2du dv + sum dx_i^2 on R^" + std::to_string(dim)},
          {"chart_kind", "brinkmann"},
          {"coordinates", null_coords(n - 1, "x")},
          {"coefficients", json::object()},
          {"flags", {{"claims_brinkmann", true}, {"claims_compact_quotient", false}}},
          {"sample_box", box(std::vector<double>(dim, -1.0), std::vector<double>(dim, 1.0))}};
}

json doc_clifton_pohl(const CatalogEntry&, const Params&) {
  return {{"name", "clifton_pohl"},
          {"description", "dx dy/(x^2+y^2) on R^2 minus the origin, modulo (x,y) -> (2x,2y)"},
          {"chart_kind", "general"},
          {"coordinates", {"x", "y"}},
          {"coefficients", {{"g_x_y", "1/(2*(x^2+y^2))"}}},
          {"domain", {"x^2+y^2"}},
          {"deck", {{{"linear", identity_rows(2, -1, 2.0)}, {"translation", {0.0, 0.0}}}}},
          {"fundamental_domain", {{{"kind", "shell"}, {"axes", {0, 1}}, {"generators", {0}}, {"ratio", 2.0}}}},
          {"flags", {{"claims_brinkmann", false}, {"claims_compact_quotient", true}}},
          {"sample_box", box({-2.0, -2.0}, {2.0, 2.0})}};
}

json doc_clifton_pohl_3d(const CatalogEntry&, const Params&) {
  const std::string c = "1/(2*(x^2+y^2))";
  return {{"name", "clifton_pohl_3d"},
          {"description", "(dx dy + dx dz + dy dz)/(x^2+y^2) modulo (2x,2y,z) and (x,y,z+1); V = d/dz null Killing"},
          {"chart_kind", "general"},
          {"coordinates", {"x", "y", "z"}},
          {"coefficients", {{"g_x_y", c}, {"g_x_z", c}, {"g_y_z", c}}},
          {"domain", {"x^2+y^2"}},
          {"deck",
           {{{"linear", identity_rows(3, 2, 2.0)}, {"translation", {0.0, 0.0, 0.0}}},
            {{"linear", identity_rows(3)}, {"translation", {0.0, 0.0, 1.0}}}}},
          {"fundamental_domain",
           {{{"kind", "shell"}, {"axes", {0, 1}}, {"generators", {0}}, {"ratio", 2.0}},
            {{"kind", "slab"}, {"axes", {2}}, {"generators", {1}}, {"period", 1.0}}}},
          {"V", {"0", "0", "1"}},
          {"flags", {{"claims_brinkmann", false}, {"claims_compact_quotient", true}, {"check_deck_isometry", false}}},
          {"sample_box", box({-2.0, -2.0, 0.0}, {2.0, 2.0, 1.0})}};
}

json doc_half_plane(const CatalogEntry&, const Params&) {
  return {{"name", "half_plane"},
          {"description", "2dx dy on {y > 0}, V = d/dx"},
          {"chart_kind", "general"},
          {"coordinates", {"x", "y"}},
          {"coefficients", {{"g_x_y", "1"}}},
          {"domain", {"y"}},
          {"V", {"1", "0"}},
          {"flags", {{"claims_brinkmann", true}, {"claims_compact_quotient", false}}},
          {"sample_box", box({-1.0, 0.1}, {1.0, 2.0})}};
}

json pp_wave_doc(const std::string& name, const std::string& description, const std::string& h, int n) {
  const int dim = n + 2;
  return {{"name", name},
          {"description", description},
          {"chart_kind", "brinkmann"},
          {"coordinates", null_coords(n, "z")},
          {"coefficients", {{"H", "2*(" + h + ")"}}},
          {"flags", {{"claims_brinkmann", true}, {"claims_compact_quotient", false}}},
          {"sample_box", box(std::vector<double>(dim, -1.0), std::vector<double>(dim, 1.0))}};
}

json doc_pp_wave(const CatalogEntry& e, const Params& p) {
  const int n = parse_int(param(e, p, "n"), "n");
  if (n < 1 || n > kMaxDim - 2) throw CatalogError("parameter n: expected 1 <= n <= " + std::to_string(kMaxDim - 2));
  const std::string h = param(e, p, "H");
  return pp_wave_doc("pp_wave", "2du(dv + H du) + sum dz_i^2 with H = " + h, h, n);
}

json doc_cahen_wallach(const CatalogEntry& e, const Params& p) {
  const auto items = split_list(param(e, p, "lambda"));
  if (items.empty() || static_cast<int>(items.size()) > kMaxDim - 2)
    throw CatalogError("parameter lambda: expected 1 to " + std::to_string(kMaxDim - 2) + " numbers");
  std::string h;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const double l = parse_double(items[i], "lambda");
    if (i) h += " + ";
    h += "(" + fmt(l) + ")*z" + std::to_string(i + 1) + "^2";
  }
  return pp_wave_doc("cahen_wallach", "pp-wave with H = " + h, h, static_cast<int>(items.size()));
}

json doc_rosen_torus(const CatalogEntry& e, const Params& p) {
  const auto alpha = split_matrix(param(e, p, "alpha"));
  const int n = static_cast<int>(alpha.size());
  if (n < 1 || n > kMaxDim - 2) throw CatalogError("parameter alpha: expected a square matrix of expressions in u");
  for (const auto& row : alpha)
    if (static_cast<int>(row.size()) != n) throw CatalogError("parameter alpha: matrix is not square");
  const double period = parse_double(param(e, p, "period"), "period");
  if (!(period > 0.0)) throw CatalogError("parameter period: must be positive");

  const int dim = n + 2;
  const auto coords = null_coords(n, "z");
  json coeffs = json::object();
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const std::string a = trim(alpha[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      const std::string b = trim(alpha[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)]);
      if (i != j) {
        const auto ea = dsl::parse_expr(a, coords);
        const auto eb = dsl::parse_expr(b, coords);
        if (!ea.structurally_equal(eb)) throw CatalogError("parameter alpha: matrix is not symmetric");
      }
      for (int c = 1; c < dim; ++c)
        if (dsl::parse_expr(a, coords).depends_on(c)) throw CatalogError("parameter alpha: entries may depend on u only");
      coeffs["g_" + std::to_string(i + 1) + std::to_string(j + 1)] = a;
    }

  // Lattice of (v, z) translations, basis vectors as columns.
  Eigen::MatrixXd basis = Eigen::MatrixXd::Identity(n + 1, n + 1);
  const std::string lattice = param(e, p, "lattice");
  if (!trim(lattice).empty() && trim(lattice) != "identity") {
    const auto rows = split_matrix(lattice);
    if (static_cast<int>(rows.size()) != n + 1) throw CatalogError("parameter lattice: expected an (n+1)x(n+1) matrix");
    for (int r = 0; r <= n; ++r) {
      if (static_cast<int>(rows[static_cast<std::size_t>(r)].size()) != n + 1)
        throw CatalogError("parameter lattice: expected an (n+1)x(n+1) matrix");
      for (int c = 0; c <= n; ++c)
        basis(r, c) = parse_double(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)], "lattice");
    }
    if (!(std::abs(basis.determinant()) > 1e-12)) throw CatalogError("parameter lattice: basis is degenerate");
  }

  json deck = json::array();
  deck.push_back({{"linear", identity_rows(dim)}, {"translation", translation(dim, 0, period)}});
  std::vector<int> axes, gens;
  for (int c = 0; c <= n; ++c) {
    std::vector<double> t(static_cast<std::size_t>(dim), 0.0);
    for (int r = 0; r <= n; ++r) t[static_cast<std::size_t>(r + 1)] = basis(r, c);
    deck.push_back({{"linear", identity_rows(dim)}, {"translation", t}});
    axes.push_back(c + 1);
    gens.push_back(c + 1);
  }
  std::vector<double> lo(static_cast<std::size_t>(dim), 0.0), hi(static_cast<std::size_t>(dim), 1.0);
  hi[0] = period;
  json doc = {{"name", "rosen_torus"},
              {"description", "2du dv + alpha_ij(u) dz^i dz^j modulo u -> u + period and a lattice of (v, z) translations"},
              {"chart_kind", "rosen"},
              {"coordinates", coords},
              {"coefficients", coeffs},
              {"deck", deck},
              {"fundamental_domain",
               {{{"kind", "slab"}, {"axes", {0}}, {"generators", {0}}, {"period", period}},
                {{"kind", "lattice"}, {"axes", axes}, {"generators", gens}}}},
              {"flags", {{"claims_brinkmann", true}, {"claims_compact_quotient", true}}},
              {"sample_box", box(lo, hi)}};
  return doc;
}

json doc_suspension(const CatalogEntry& e, const Params& p) {
  const auto rows = split_matrix(param(e, p, "A"));
  if (rows.size() != 2 || rows[0].size() != 2 || rows[1].size() != 2)
    throw CatalogError("parameter A: expected a 2x2 integer matrix");
  Eigen::Matrix2d a;
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) a(r, c) = parse_int(rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)], "A");
  const double det = a.determinant();
  const double tr = a.trace();
  if (std::abs(det - 1.0) > 0.5) throw CatalogError("parameter A: must have determinant 1 (A in SL(2,Z))");
  if (std::abs(tr) <= 2.0)
    throw CatalogError("parameter A: not hyperbolic (|trace| = " + fmt(std::abs(tr)) + " <= 2)");
  const double disc = std::sqrt(tr * tr - 4.0);
  const double lambda = tr > 0 ? (tr + disc) / 2.0 : (tr - disc) / 2.0;
  const double mu = 1.0 / lambda;
  // Eigenvectors of A for lambda and mu (columns of P); (xi, eta) = P^-1 (a, b).
  auto eigvec = [&](double l) {
    Eigen::Vector2d v = std::abs(a(0, 1)) > 0.0 ? Eigen::Vector2d(a(0, 1), l - a(0, 0)) : Eigen::Vector2d(l - a(1, 1), a(1, 0));
    return Eigen::Vector2d(v / v.norm());
  };
  Eigen::Matrix2d pmat;
  pmat.col(0) = eigvec(lambda);
  pmat.col(1) = eigvec(mu);
  const Eigen::Matrix2d pinv = pmat.inverse();

  json twist_linear = {{lambda, 0.0, 0.0}, {0.0, mu, 0.0}, {0.0, 0.0, 1.0}};
  json deck = json::array();
  deck.push_back({{"linear", twist_linear}, {"translation", {0.0, 0.0, 1.0}}});
  for (int c = 0; c < 2; ++c)
    deck.push_back({{"linear", identity_rows(3)}, {"translation", {pinv(0, c), pinv(1, c), 0.0}}});
  return {{"name", "suspension_anosov"},
          {"description", "flat 2dxi deta + ds^2 modulo Z^2 (A-eigenbasis) and the twist (lambda xi, eta/lambda, s+1)"},
          {"chart_kind", "general"},
          {"coordinates", {"xi", "eta", "s"}},
          {"coefficients", {{"g_xi_eta", "1"}, {"g_s_s", "1"}}},
          {"deck", deck},
          {"fundamental_domain",
           {{{"kind", "slab"}, {"axes", {2}}, {"generators", {0}}, {"period", 1.0}},
            {{"kind", "lattice"}, {"axes", {0, 1}}, {"generators", {1, 2}}}}},
          {"V", {"0", "0", "1"}},
          {"flags", {{"claims_brinkmann", false}, {"claims_compact_quotient", true}}},
          {"sample_box", box({-1.0, -1.0, 0.0}, {1.0, 1.0, 1.0})}};
}

}  // namespace

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = {
      {"minkowski", "flat 2du dv + sum dx_i^2 on R^(n+1), V = d/dv", {{"n", "integer", "3", "spacetime dimension minus one"}}},
      {"clifton_pohl", "Clifton-Pohl torus dx dy/(x^2+y^2), incomplete", {}},
      {"clifton_pohl_3d", "3d Clifton-Pohl variant with null Killing (not parallel) d/dz", {}},
      {"half_plane", "2dx dy on the half plane y > 0, incomplete, V = d/dx", {}},
      {"pp_wave", "pp-wave 2du(dv + H du) + sum dz_i^2, V = d/dv",
       {{"H", "expression in u, z1..zn", "z1^2-z2^2", "wave profile"}, {"n", "integer", "2", "number of transverse coordinates"}}},
      {"cahen_wallach", "Cahen-Wallach plane wave, H = sum lambda_i z_i^2",
       {{"lambda", "comma-separated numbers", "-1,-1", "eigenvalues of the quadratic form"}}},
      {"rosen_torus", "compact plane wave 2du dv + alpha(u) dz dz, V = d/dv",
       {{"alpha", "matrix of expressions in u (rows ';', entries ',')", "2+sin(2*pi*u),0;0,1", "transverse metric, periodic in u"},
        {"lattice", "(n+1)x(n+1) matrix or 'identity'", "identity", "basis (columns) of the (v, z) translation lattice"},
        {"period", "number", "1", "u-period of alpha"}}},
      {"suspension_anosov", "flat suspension of a hyperbolic A in SL(2,Z), parallel spacelike d/ds",
       {{"A", "2x2 integer matrix (rows ';')", "2,1;1,1", "hyperbolic monodromy"}}},
  };
  return entries;
}

std::vector<std::string> catalog_keys() {
  std::vector<std::string> keys;
  for (const CatalogEntry& e : catalog_entries()) keys.push_back(e.key);
  return keys;
}

std::vector<std::string> split_list(const std::string& text, char sep) {
  std::vector<std::string> out;
  if (trim(text).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.push_back(trim(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::vector<std::string>> split_matrix(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  for (const std::string& row : split_list(text, ';')) rows.push_back(split_list(row, ','));
  return rows;
}

json catalog_document(const std::string& name, const Params& params) {
  const CatalogEntry& entry = entry_for(name);
  for (const auto& [key, value] : params) {
    bool known = false;
    for (const CatalogParam& p : entry.params) known = known || p.name == key;
    if (!known) {
      std::string names;
      for (const CatalogParam& p : entry.params) names += (names.empty() ? "" : ", ") + p.name;
      throw CatalogError("unknown parameter '" + key + "' for " + name +
                         (names.empty() ? " (it takes none)" : " (valid: " + names + ")"));
    }
  }
  if (name == "minkowski") return doc_minkowski(entry, params);
  if (name == "clifton_pohl") return doc_clifton_pohl(entry, params);
  if (name == "clifton_pohl_3d") return doc_clifton_pohl_3d(entry, params);
  if (name == "half_plane") return doc_half_plane(entry, params);
  if (name == "pp_wave") return doc_pp_wave(entry, params);
  if (name == "cahen_wallach") return doc_cahen_wallach(entry, params);
  if (name == "rosen_torus") return doc_rosen_torus(entry, params);
  return doc_suspension(entry, params);
}

Spacetime build(const std::string& name, const Params& params) {
  json doc;
  try {
    doc = catalog_document(name, params);
    return Spacetime(load_spacetime_json(doc));
  } catch (const CatalogError&) {
    throw;
  } catch (const SchemaError& e) {
    if (name == "rosen_torus" && e.path() == "/deck")
      throw CatalogError("parameter alpha: not periodic in u with the given period (" + std::string(e.what()) + ")");
    throw CatalogError("parameters for " + name + " are invalid: " + e.what());
  } catch (const ParseError& e) {
    throw CatalogError("parameters for " + name + " contain a bad expression: " + e.what());
  }
}

}  // namespace brinkmann
