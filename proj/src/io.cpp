#include "sepform/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace sepform::io {

namespace {

template <class T>
std::vector<T> array_of(const json& j, const std::string& key) {
  if (!j.contains(key)) throw InputError("missing field \"" + key + "\"");
  const json& a = j.at(key);
  if (!a.is_array()) throw InputError("field \"" + key + "\" must be an array");
  std::vector<T> out;
  out.reserve(a.size());
  for (const auto& x : a) {
    if (!x.is_number()) throw InputError("field \"" + key + "\" must hold numbers");
    if constexpr (std::is_integral_v<T>) {
      if (!x.is_number_integer()) throw InputError("field \"" + key + "\" must hold integers");
    }
    out.push_back(x.get<T>());
  }
  return out;
}

const json& terms_of(const json& j) {
  if (!j.is_object() || !j.contains("terms") || !j.at("terms").is_array())
    throw InputError("expected an object with a \"terms\" array");
  return j.at("terms");
}

}  // namespace

CVector read_complex(const json& j, const std::string& key) {
  const auto re = array_of<double>(j, key + "_re");
  std::vector<double> im(re.size(), 0.0);
  if (j.contains(key + "_im")) im = array_of<double>(j, key + "_im");
  if (im.size() != re.size()) throw ShapeError("\"" + key + "_re\" and \"" + key + "_im\" differ in length");
  CVector v(re.size());
  for (std::size_t t = 0; t < re.size(); ++t) v[t] = Complex(re[t], im[t]);
  return v;
}

void write_complex(json& j, const std::string& key, std::span<const Complex> v) {
  json re = json::array(), im = json::array();
  for (const auto& c : v) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  j[key + "_re"] = std::move(re);
  j[key + "_im"] = std::move(im);
}

json form_to_json(const HermitianForm& rho) {
  json j;
  j["m"] = rho.m();
  j["n"] = rho.n();
  json re = json::array(), im = json::array();
  for (const auto& c : rho.coefficients()) {
    re.push_back(c.real());
    im.push_back(c.imag());
  }
  j["re"] = std::move(re);
  j["im"] = std::move(im);
  return j;
}

HermitianForm form_from_json(const json& j) {
  if (!j.is_object() || !j.contains("m") || !j.contains("n")) throw InputError("form: expected {m, n, re, im}");
  const auto m = j.at("m").get<std::int64_t>();
  const auto n = j.at("n").get<std::int64_t>();
  if (m <= 0 || n <= 0) throw InputError("form: m and n must be positive");
  const auto re = array_of<double>(j, "re");
  std::vector<double> im(re.size(), 0.0);
  if (j.contains("im")) im = array_of<double>(j, "im");
  if (im.size() != re.size()) throw ShapeError("form: re and im differ in length");
  CVector c(re.size());
  for (std::size_t t = 0; t < re.size(); ++t) c[t] = Complex(re[t], im[t]);
  return HermitianForm::from_coefficients(static_cast<std::size_t>(m), static_cast<std::size_t>(n), c);
}

json ensemble_to_json(const WavepacketEnsemble& e) {
  json j;
  j["alpha"] = e.alpha;
  json terms = json::array();
  for (const auto& t : e.terms) {
    json x;
    write_complex(x, "phi", t.phi);
    write_complex(x, "psi", t.psi);
    terms.push_back(std::move(x));
  }
  j["terms"] = std::move(terms);
  return j;
}

WavepacketEnsemble ensemble_from_json(const json& j) {
  WavepacketEnsemble e;
  if (!j.is_object() || !j.contains("alpha") || !j.at("alpha").is_number())
    throw InputError("ensemble: missing numeric \"alpha\"");
  e.alpha = j.at("alpha").get<double>();
  for (const auto& t : terms_of(j)) e.terms.push_back({read_complex(t, "phi"), read_complex(t, "psi")});
  validate(e);
  return e;
}

json torus_to_json(const TorusEnsemble& e) {
  json terms = json::array();
  for (const auto& t : e.terms) {
    json x;
    write_complex(x, "phi", t.phi);
    x["a"] = t.a;
    x["b"] = t.b;
    x["c"] = t.c;
    terms.push_back(std::move(x));
  }
  return json{{"terms", std::move(terms)}};
}

TorusEnsemble torus_from_json(const json& j) {
  TorusEnsemble e;
  for (const auto& t : terms_of(j)) {
    TorusMode mode;
    mode.phi = read_complex(t, "phi");
    mode.a = array_of<std::int64_t>(t, "a");
    mode.b = array_of<std::int64_t>(t, "b");
    if (!t.contains("c") || !t.at("c").is_number_integer()) throw InputError("torus term: missing integer \"c\"");
    mode.c = t.at("c").get<std::int64_t>();
    e.terms.push_back(std::move(mode));
  }
  validate(e);
  return e;
}

json term_to_json(const ProductTerm& t) {
  json x;
  x["weight"] = t.weight;
  write_complex(x, "phi", t.phi);
  write_complex(x, "psi", t.psi);
  return x;
}

ProductTerm term_from_json(const json& j) {
  ProductTerm t;
  if (j.contains("weight")) {
    if (!j.at("weight").is_number()) throw InputError("term: \"weight\" must be a number");
    t.weight = j.at("weight").get<double>();
  }
  t.phi = read_complex(j, "phi");
  t.psi = read_complex(j, "psi");
  return t;
}

json basis_to_json(const SeparableBasis& b) {
  json forms = json::array();
  for (const auto& g : b.generators) {
    json terms = json::array();
    for (const auto& t : g) terms.push_back(term_to_json(t));
    forms.push_back(json{{"terms", std::move(terms)}});
  }
  return json{{"m", b.m}, {"n", b.n}, {"forms", std::move(forms)}};
}

SeparableBasis basis_from_json(const json& j) {
  if (!j.is_object() || !j.contains("m") || !j.contains("n") || !j.contains("forms") || !j.at("forms").is_array())
    throw InputError("basis: expected {m, n, forms}");
  SeparableBasis b;
  b.m = j.at("m").get<std::size_t>();
  b.n = j.at("n").get<std::size_t>();
  for (const auto& f : j.at("forms")) {
    std::vector<ProductTerm> terms;
    for (const auto& t : terms_of(f)) terms.push_back(term_from_json(t));
    b.forms.push_back(separable_mixture(terms));
    b.generators.push_back(std::move(terms));
  }
  validate(b);
  return b;
}

RVector lambda_from_json(const json& j) {
  if (j.is_array()) return array_of<double>(json{{"lambda", j}}, "lambda");
  if (j.is_object() && j.contains("lambda")) return array_of<double>(j, "lambda");
  throw InputError("lambda: expected an array or {\"lambda\": [...]}");
}

json irc_to_json(const IrcReport& r) {
  json j;
  j["satisfied"] = r.satisfied;
  j["min_value"] = r.min_product_value;
  j["threshold"] = r.threshold;
  json w;
  write_complex(w, "v", r.witness_v);
  write_complex(w, "w", r.witness_w);
  j["witness"] = std::move(w);
  j["ker_K_dim"] = r.ker_K_dim;
  j["ker_L_dim"] = r.ker_L_dim;
  j["restarts_used"] = r.restarts_used;
  return j;
}

json report_to_json(const AnalysisReport& r) {
  json j;
  j["psd"] = r.psd;
  j["min_eigenvalue"] = r.min_eigenvalue;
  j["rank"] = r.rank;
  j["ppt"] = r.ppt;
  j["pt_min_eigenvalue"] = r.pt_min_eigenvalue;
  j["irc"] = r.irc ? irc_to_json(*r.irc) : json(nullptr);
  j["ker_K_dim"] = r.ker_K_dim;
  j["ker_L_dim"] = r.ker_L_dim;
  j["classification"] = r.classification;
  return j;
}

std::string convergence_csv(const ConvergenceStudy& s) {
  std::ostringstream os;
  os << "alpha,frobenius_error\n" << std::setprecision(17);
  for (const auto& r : s.rows) os << r.alpha << ',' << r.error << '\n';
  return os.str();
}

json read_json_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path);
  try {
    return json::parse(is);
  } catch (const json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << text;
  if (!os) throw Error("write failed: " + path);
}

}  // namespace sepform::io
