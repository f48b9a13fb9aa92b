#include "brinkmann/spec.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "brinkmann/errors.hpp"

namespace brinkmann {

namespace {

using nlohmann::json;

const std::set<std::string> kReserved = {"sin", "cos", "exp", "log", "sqrt", "tanh", "pi"};

bool is_identifier(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

const json& require(const json& doc, const char* key, const std::string& path) {
  if (!doc.contains(key)) throw SchemaError(path + "/" + key, "missing required field");
  return doc.at(key);
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw SchemaError(path, "expected a string");
  return j.get<std::string>();
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

// Expressions may be given as strings or plain numbers.
std::string expr_text(const json& j, const std::string& path) {
  if (j.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", j.get<double>());
    return buf;
  }
  return as_string(j, path);
}

dsl::Expr parse_at(const std::string& text, const std::vector<std::string>& coords, const std::string& path) {
  try {
    return dsl::parse_expr(text, coords);
  } catch (const UnknownIdentifierError& e) {
    throw SchemaError(path, e.what());
  } catch (const ParseError& e) {
    throw SchemaError(path, e.what());
  }
}

Eigen::MatrixXd parse_matrix(const json& j, int n, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw SchemaError(path, "expected " + std::to_string(n) + " rows");
  Eigen::MatrixXd m(n, n);
  for (int r = 0; r < n; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    const std::string rp = path + "/" + std::to_string(r);
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw SchemaError(rp, "expected " + std::to_string(n) + " columns");
    for (int c = 0; c < n; ++c) m(r, c) = as_number(row[static_cast<std::size_t>(c)], rp + "/" + std::to_string(c));
  }
  return m;
}

Eigen::VectorXd parse_vector(const json& j, int n, const std::string& path) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw SchemaError(path, "expected " + std::to_string(n) + " entries");
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = as_number(j[static_cast<std::size_t>(i)], path + "/" + std::to_string(i));
  return v;
}

std::vector<int> parse_axes(const json& j, int n, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of indices");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const int a = as_int(j[i], path + "/" + std::to_string(i));
    if (a < 0 || a >= n) throw SchemaError(path + "/" + std::to_string(i), "index out of range");
    out.push_back(a);
  }
  return out;
}

// Maps a coefficient key to the metric slot it fills.
struct Slot {
  int a;
  int b;
  double scale;
};

Slot brinkmann_slot(const std::string& key, ChartKind kind, int n, const std::string& path) {
  const int m = n - 2;
  if (key == "H" || (key.size() > 2 && key.compare(0, 2, "W_") == 0)) {
    if (kind == ChartKind::Rosen) throw SchemaError(path, "rosen charts only take transverse g_ij coefficients, not '" + key + "'");
    if (key == "H") return {0, 0, 1.0};
    const std::string idx = key.substr(2);
    if (idx.size() != 1 || !std::isdigit(static_cast<unsigned char>(idx[0])))
      throw SchemaError(path, "bad coefficient key '" + key + "'");
    const int i = idx[0] - '0';
    if (i < 1 || i > m) throw SchemaError(path, "transverse index out of range in '" + key + "'");
    return {0, i + 1, 0.5};
  }
  if (key.size() == 4 && key.compare(0, 2, "g_") == 0 && std::isdigit(static_cast<unsigned char>(key[2])) &&
      std::isdigit(static_cast<unsigned char>(key[3]))) {
    const int i = key[2] - '0';
    const int j = key[3] - '0';
    if (i < 1 || i > m || j < 1 || j > m) throw SchemaError(path, "transverse index out of range in '" + key + "'");
    return {std::min(i, j) + 1, std::max(i, j) + 1, 1.0};
  }
  throw SchemaError(path, "bad coefficient key '" + key + "' for a " + to_string(kind) + " chart");
}

Slot general_slot(const std::string& key, const std::vector<std::string>& coords, const std::string& path) {
  if (key.compare(0, 2, "g_") != 0) throw SchemaError(path, "bad coefficient key '" + key + "'");
  const std::string rest = key.substr(2);
  const auto sep = rest.find('_');
  if (sep == std::string::npos) throw SchemaError(path, "expected key of the form g_<coord>_<coord>");
  const std::string a = rest.substr(0, sep);
  const std::string b = rest.substr(sep + 1);
  const auto ia = std::find(coords.begin(), coords.end(), a);
  const auto ib = std::find(coords.begin(), coords.end(), b);
  if (ia == coords.end() || ib == coords.end()) throw SchemaError(path, "unknown coordinate in '" + key + "'");
  const int i = static_cast<int>(ia - coords.begin());
  const int j = static_cast<int>(ib - coords.begin());
  return {std::min(i, j), std::max(i, j), 1.0};
}

void check_affine(const AffineMapSpec& map, const std::string& path) {
  const double det = map.linear.determinant();
  if (!(std::abs(det) > 1e-12)) throw SchemaError(path + "/linear", "deck map is not invertible");
}

void check_reducer(const SpacetimeSpec& spec, const DomainReducer& r, const std::string& path) {
  const int n = spec.dimension;
  const int ngen = static_cast<int>(spec.deck.size());
  for (std::size_t i = 0; i < r.generators.size(); ++i)
    if (r.generators[i] < 0 || r.generators[i] >= ngen)
      throw SchemaError(path + "/generators/" + std::to_string(i), "no such deck generator");
  switch (r.kind) {
    case DomainReducer::Kind::Shell: {
      if (r.axes.size() != 2 || r.generators.size() != 1) throw SchemaError(path, "shell needs two axes and one generator");
      if (!(r.ratio > 1.0)) throw SchemaError(path + "/ratio", "ratio must exceed 1");
      const AffineMapSpec& g = spec.deck[static_cast<std::size_t>(r.generators[0])];
      for (int a : r.axes)
        for (int c = 0; c < n; ++c) {
          const double want = c == a ? r.ratio : 0.0;
          if (std::abs(g.linear(a, c) - want) > 1e-12 || std::abs(g.translation(a)) > 1e-12)
            throw SchemaError(path, "generator does not scale the shell axes by the ratio");
        }
      break;
    }
    case DomainReducer::Kind::Slab: {
      if (r.axes.size() != 1 || r.generators.size() != 1) throw SchemaError(path, "slab needs one axis and one generator");
      if (!(r.period > 0.0)) throw SchemaError(path + "/period", "period must be positive");
      const int a = r.axes[0];
      const AffineMapSpec& g = spec.deck[static_cast<std::size_t>(r.generators[0])];
      for (int c = 0; c < n; ++c)
        if (std::abs(g.linear(a, c) - (c == a ? 1.0 : 0.0)) > 1e-12)
          throw SchemaError(path, "generator must act on the slab axis as a translation");
      if (std::abs(g.translation(a) - r.period) > 1e-12)
        throw SchemaError(path, "generator does not shift the slab axis by the period");
      break;
    }
    case DomainReducer::Kind::Lattice: {
      if (r.axes.empty() || r.axes.size() != r.generators.size())
        throw SchemaError(path, "lattice needs one generator per axis");
      Eigen::MatrixXd basis(static_cast<Eigen::Index>(r.axes.size()), static_cast<Eigen::Index>(r.axes.size()));
      for (std::size_t j = 0; j < r.generators.size(); ++j) {
        const AffineMapSpec& g = spec.deck[static_cast<std::size_t>(r.generators[j])];
        if ((g.linear - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-12)
          throw SchemaError(path, "lattice generators must be translations");
        for (int c = 0; c < n; ++c)
          if (std::find(r.axes.begin(), r.axes.end(), c) == r.axes.end() && std::abs(g.translation(c)) > 1e-12)
            throw SchemaError(path, "lattice generator moves a coordinate outside its axes");
        for (std::size_t i = 0; i < r.axes.size(); ++i)
          basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g.translation(r.axes[i]);
      }
      if (!(std::abs(basis.determinant()) > 1e-12)) throw SchemaError(path, "lattice basis is degenerate");
      break;
    }
  }
}

}  // namespace

SpacetimeSpec load_spacetime_json(const json& doc) {
  if (!doc.is_object()) throw SchemaError("", "expected a JSON object");
  static const std::set<std::string> known = {"name", "description", "chart_kind", "coordinates", "coefficients",
                                              "domain", "deck", "fundamental_domain", "V", "flags", "sample_box"};
  for (const auto& [key, value] : doc.items())
    if (!known.count(key)) throw SchemaError("/" + key, "unknown field");

  SpacetimeSpec spec;
  spec.document = doc;
  spec.name = doc.contains("name") ? as_string(doc["name"], "/name") : "custom";
  if (doc.contains("description")) spec.description = as_string(doc["description"], "/description");

  const std::string kind = as_string(require(doc, "chart_kind", ""), "/chart_kind");
  if (kind == "brinkmann") spec.chart_kind = ChartKind::Brinkmann;
  else if (kind == "rosen") spec.chart_kind = ChartKind::Rosen;
  else if (kind == "general") spec.chart_kind = ChartKind::General;
  else throw SchemaError("/chart_kind", "expected brinkmann, rosen or general");

  const json& coords = require(doc, "coordinates", "");
  if (!coords.is_array()) throw SchemaError("/coordinates", "expected an array of names");
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const std::string path = "/coordinates/" + std::to_string(i);
    std::string name = as_string(coords[i], path);
    if (!is_identifier(name) || kReserved.count(name)) throw SchemaError(path, "invalid coordinate name '" + name + "'");
    if (std::find(spec.coords.begin(), spec.coords.end(), name) != spec.coords.end())
      throw SchemaError(path, "duplicate coordinate '" + name + "'");
    spec.coords.push_back(std::move(name));
  }
  spec.dimension = static_cast<int>(spec.coords.size());
  const int n = spec.dimension;
  if (n < 2 || n > kMaxDim) throw SchemaError("/coordinates", "dimension must be between 2 and " + std::to_string(kMaxDim));
  const bool null_chart = spec.chart_kind != ChartKind::General;
  if (null_chart) {
    if (n < 3) throw SchemaError("/coordinates", "brinkmann and rosen charts need at least one transverse coordinate");
    if (n - 2 > 9) throw SchemaError("/coordinates", "at most 9 transverse coordinates");
    if (spec.coords[0] != "u" || spec.coords[1] != "v")
      throw SchemaError("/coordinates", "brinkmann and rosen charts start with (u, v)");
  }

  const json& coeffs = require(doc, "coefficients", "");
  if (!coeffs.is_object()) throw SchemaError("/coefficients", "expected an object");
  std::set<std::pair<int, int>> filled;
  for (const auto& [key, value] : coeffs.items()) {
    const std::string path = "/coefficients/" + key;
    const Slot slot = null_chart ? brinkmann_slot(key, spec.chart_kind, n, path) : general_slot(key, spec.coords, path);
    if (!filled.insert({slot.a, slot.b}).second) throw SchemaError(path, "coefficient given twice");
    std::string text = expr_text(value, path);
    dsl::Expr e = parse_at(text, spec.coords, path);
    if (null_chart && e.depends_on(1)) throw SchemaError(path, "coefficients must not depend on v");
    spec.coefficients.push_back({key, std::move(text), std::move(e)});
  }

  if (doc.contains("domain")) {
    const json& d = doc["domain"];
    if (!d.is_array()) throw SchemaError("/domain", "expected an array of expressions");
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string path = "/domain/" + std::to_string(i);
      std::string text = expr_text(d[i], path);
      spec.domain.push_back(parse_at(text, spec.coords, path));
      spec.domain_text.push_back(std::move(text));
    }
  }

  if (doc.contains("deck")) {
    const json& d = doc["deck"];
    if (!d.is_array()) throw SchemaError("/deck", "expected an array of affine maps");
    for (std::size_t i = 0; i < d.size(); ++i) {
      const std::string path = "/deck/" + std::to_string(i);
      if (!d[i].is_object()) throw SchemaError(path, "expected an object");
      AffineMapSpec map;
      map.linear = d[i].contains("linear") ? parse_matrix(d[i]["linear"], n, path + "/linear")
                                           : Eigen::MatrixXd::Identity(n, n);
      map.translation = d[i].contains("translation") ? parse_vector(d[i]["translation"], n, path + "/translation")
                                                     : Eigen::VectorXd::Zero(n);
      check_affine(map, path);
      spec.deck.push_back(std::move(map));
    }
  }

  if (doc.contains("fundamental_domain")) {
    const json& f = doc["fundamental_domain"];
    if (!f.is_array()) throw SchemaError("/fundamental_domain", "expected an array of reducers");
    for (std::size_t i = 0; i < f.size(); ++i) {
      const std::string path = "/fundamental_domain/" + std::to_string(i);
      const json& r = f[i];
      if (!r.is_object()) throw SchemaError(path, "expected an object");
      DomainReducer red;
      const std::string k = as_string(require(r, "kind", path), path + "/kind");
      if (k == "shell") red.kind = DomainReducer::Kind::Shell;
      else if (k == "slab") red.kind = DomainReducer::Kind::Slab;
      else if (k == "lattice") red.kind = DomainReducer::Kind::Lattice;
      else throw SchemaError(path + "/kind", "expected shell, slab or lattice");
      red.axes = parse_axes(require(r, "axes", path), n, path + "/axes");
      red.generators = parse_axes(require(r, "generators", path), 1 << 20, path + "/generators");
      if (r.contains("ratio")) red.ratio = as_number(r["ratio"], path + "/ratio");
      if (r.contains("period")) red.period = as_number(r["period"], path + "/period");
      check_reducer(spec, red, path);
      spec.fundamental_domain.push_back(std::move(red));
    }
  }

  if (doc.contains("V")) {
    const json& v = doc["V"];
    if (!v.is_array() || static_cast<int>(v.size()) != n)
      throw SchemaError("/V", "expected " + std::to_string(n) + " component expressions");
    std::vector<std::string> texts;
    std::vector<dsl::Expr> exprs;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string path = "/V/" + std::to_string(i);
      texts.push_back(expr_text(v[i], path));
      exprs.push_back(parse_at(texts.back(), spec.coords, path));
    }
    spec.v_text = std::move(texts);
    spec.v_field = std::move(exprs);
  } else if (null_chart) {
    std::vector<std::string> texts(static_cast<std::size_t>(n), "0");
    texts[1] = "1";
    std::vector<dsl::Expr> exprs;
    for (const auto& t : texts) exprs.push_back(dsl::parse_expr(t, spec.coords));
    spec.v_text = std::move(texts);
    spec.v_field = std::move(exprs);
  }

  if (doc.contains("flags")) {
    const json& f = doc["flags"];
    if (!f.is_object()) throw SchemaError("/flags", "expected an object");
    for (const auto& [key, value] : f.items()) {
      if (!value.is_boolean()) throw SchemaError("/flags/" + key, "expected a boolean");
      if (key == "claims_brinkmann") spec.claims_brinkmann = value.get<bool>();
      else if (key == "claims_compact_quotient") spec.claims_compact_quotient = value.get<bool>();
      else if (key == "check_deck_isometry") spec.check_deck_isometry = value.get<bool>();
      else throw SchemaError("/flags/" + key, "unknown flag");
    }
  }
  if (spec.claims_compact_quotient && spec.deck.empty())
    throw SchemaError("/flags/claims_compact_quotient", "a compact quotient needs deck generators");

  spec.sample_lower.assign(static_cast<std::size_t>(n), -1.0);
  spec.sample_upper.assign(static_cast<std::size_t>(n), 1.0);
  if (doc.contains("sample_box")) {
    const json& b = doc["sample_box"];
    if (!b.is_object()) throw SchemaError("/sample_box", "expected an object");
    const Eigen::VectorXd lo = parse_vector(require(b, "lower", "/sample_box"), n, "/sample_box/lower");
    const Eigen::VectorXd hi = parse_vector(require(b, "upper", "/sample_box"), n, "/sample_box/upper");
    for (int i = 0; i < n; ++i) {
      if (!(lo(i) < hi(i))) throw SchemaError("/sample_box", "lower must be below upper");
      spec.sample_lower[static_cast<std::size_t>(i)] = lo(i);
      spec.sample_upper[static_cast<std::size_t>(i)] = hi(i);
    }
  }
  return spec;
}

SpacetimeSpec load_spacetime_spec(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return load_spacetime_json(doc);
}

MetricField build_metric_field(const SpacetimeSpec& spec) {
  const int n = spec.dimension;
  std::vector<MetricField::Entry> entries;
  std::set<std::pair<int, int>> filled;
  for (const CoefficientSpec& c : spec.coefficients) {
    const Slot s = spec.chart_kind == ChartKind::General ? general_slot(c.key, spec.coords, "/coefficients/" + c.key)
                                                          : brinkmann_slot(c.key, spec.chart_kind, n, "/coefficients/" + c.key);
    filled.insert({s.a, s.b});
    entries.push_back({s.a, s.b, dsl::Program(c.expr), s.scale});
  }
  if (spec.chart_kind != ChartKind::General) {
    entries.push_back({0, 1, dsl::Program(dsl::Expr::constant(1.0, spec.coords)), 1.0});
    for (int i = 2; i < n; ++i)
      if (!filled.count({i, i})) entries.push_back({i, i, dsl::Program(dsl::Expr::constant(1.0, spec.coords)), 1.0});
  }
  std::vector<dsl::Program> domain;
  for (const dsl::Expr& e : spec.domain) domain.emplace_back(e);
  return MetricField(spec.chart_kind, n, std::move(entries), std::move(domain));
}

}  // namespace brinkmann
