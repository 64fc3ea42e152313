#include "tresca/config.hpp"

#include "tresca/exponents.hpp"
#include "tresca/fe.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace tresca {

using nlohmann::json;

namespace {

Expression read_expr(const json& node, int dim, const std::string& name) {
  try {
    if (node.is_number()) return Expression::constant(node.get<double>());
    if (node.is_string()) return Expression::parse(node.get<std::string>(), dim);
  } catch (const ExpressionError& e) {
    throw ConfigError(name + ": " + e.what());
  }
  throw ConfigError(name + ": expected a number or an expression string");
}

std::vector<Expression> read_vector_expr(const json& doc, const char* key, int dim,
                                         bool required) {
  if (!doc.contains(key)) {
    if (required) throw ConfigError(std::string("missing field '") + key + "'");
    return std::vector<Expression>(dim, Expression::constant(0.0));
  }
  const json& node = doc.at(key);
  if (!node.is_array() || static_cast<int>(node.size()) != dim)
    throw ConfigError(std::string(key) + ": expected " + std::to_string(dim) + " components");
  std::vector<Expression> out;
  for (int i = 0; i < dim; ++i)
    out.push_back(read_expr(node[i], dim, std::string(key) + "[" + std::to_string(i) + "]"));
  return out;
}

Vec read_vec(const json& node, int size, const std::string& name) {
  if (!node.is_array() || static_cast<int>(node.size()) != size)
    throw ConfigError(name + ": expected " + std::to_string(size) + " numbers");
  Vec v(size);
  for (int i = 0; i < size; ++i) v(i) = node[i].get<double>();
  return v;
}

VectorFn vector_fn(const std::vector<Expression>& e) {
  return [e](const Vec& x) {
    Vec v(static_cast<int>(e.size()));
    for (std::size_t i = 0; i < e.size(); ++i) v(i) = e[i](x);
    return v;
  };
}

template <class T>
T number(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(key) + ": expected a number");
  }
}

ViscosityModel read_viscosity(const json& node) {
  const std::string kind = node.value("kind", std::string("constant"));
  auto param = [&](const char* key, double fallback) {
    const double v = number<double>(node, key, fallback);
    if (!std::isfinite(v)) throw ValidationError("(rop)", std::string("viscosity parameter ") + key + " is not finite");
    return v;
  };
  if (kind == "constant") return ViscosityModel::constant(param("mu", param("mu0", 1.0)));
  if (kind == "shear_thickening")
    return ViscosityModel::shear_thickening(param("mu0", 1.0), param("mu1", 1.0), param("a", 1.0));
  if (kind == "temperature_coupled")
    return ViscosityModel::temperature_coupled(param("mu0", 1.0), param("mu1", 1.0),
                                               param("a", 1.0), param("beta", 0.0),
                                               param("base", 0.0));
  throw ValidationError("(rop)", "unsupported viscosity family '" + kind + "'");
}

HeatSource read_heat_source(const json& node) {
  HeatSource r;
  const std::string kind = node.value("kind", std::string("constant"));
  if (kind == "constant") {
    r.kind = HeatSource::Kind::constant;
    r.r0 = number<double>(node, "value", number<double>(node, "r0", 0.0));
  } else if (kind == "saturating") {
    r.kind = HeatSource::Kind::saturating;
    r.r0 = number<double>(node, "r0", 0.0);
    r.r1 = number<double>(node, "r1", 0.0);
    r.scale = number<double>(node, "scale", 1.0);
  } else {
    throw ValidationError("(Cr)", "unsupported heat source family '" + kind + "'");
  }
  if (!std::isfinite(r.r0) || !std::isfinite(r.r1) || !(r.scale > 0.0) || !std::isfinite(r.scale))
    throw ValidationError("(Cr)", "heat source parameters must be finite with scale > 0");
  if (node.contains("sup")) {
    const double declared = node.at("sup").get<double>();
    if (!(declared >= r.sup() * (1.0 - 1e-12)))
      throw ValidationError("(Cr)", "declared sup |r| is below the family bound");
  }
  return r;
}

SolverSettings read_solver(const json& node) {
  SolverSettings s;
  s.tol_flow = number<double>(node, "tol_flow", s.tol_flow);
  s.tol_uzawa = number<double>(node, "tol_uzawa", s.tol_uzawa);
  s.tol_div = number<double>(node, "tol_div", s.tol_div);
  s.tol_fp = number<double>(node, "tol_fp", s.tol_fp);
  s.tol_heat = number<double>(node, "tol_heat", s.tol_heat);
  s.max_newton = number<int>(node, "max_newton", s.max_newton);
  s.max_uzawa = number<int>(node, "max_uzawa", s.max_uzawa);
  s.max_fp = number<int>(node, "max_fp", s.max_fp);
  s.min_fp = number<int>(node, "min_fp", s.min_fp);
  s.rho_factor = number<double>(node, "rho_factor", s.rho_factor);
  s.relaxation = number<double>(node, "relaxation", s.relaxation);
  s.eps_reg = number<double>(node, "eps_reg", s.eps_reg);
  s.quadrature_degree = number<int>(node, "quadrature_degree", s.quadrature_degree);
  if (!(s.relaxation > 0.0 && s.relaxation <= 1.0))
    throw ConfigError("solver.relaxation must lie in (0, 1]");
  if (!(s.rho_factor > 0.0)) throw ConfigError("solver.rho_factor must be positive");
  return s;
}

}  // namespace

ChannelDomain ProblemConfig::domain() const {
  ChannelDomain d;
  d.dim = dim;
  d.lower = lower;
  d.upper = upper;
  d.height = [h = height](const Vec& x) { return h(x); };
  d.resolution = resolution;
  return d;
}

int ProblemConfig::quadrature_degree() const {
  if (solver.quadrature_degree > 0) return solver.quadrature_degree;
  return std::max(4, static_cast<int>(std::ceil(p)) + 1);
}

VectorFn ProblemConfig::f_fn() const { return vector_fn(f); }
VectorFn ProblemConfig::G_fn() const { return vector_fn(G); }
VectorFn ProblemConfig::s_fn() const { return vector_fn(s); }
ScalarFn ProblemConfig::k_fn() const {
  return [e = k](const Vec& x) { return e(x); };
}
ScalarFn ProblemConfig::theta_b_fn() const {
  return [e = theta_b](const Vec& x) { return e(x); };
}

ProblemConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("JSON parse error: ") + e.what());
  }
  return parse_config_json(doc);
}

ProblemConfig parse_config_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  ProblemConfig c;
  c.source = doc;
  c.dim = number<int>(doc, "dimension", 2);
  if (c.dim != 2 && c.dim != 3) throw ConfigError("dimension must be 2 or 3");
  const int d = c.dim;

  const json domain = doc.value("domain", json::object());
  c.lower = domain.contains("lower") ? read_vec(domain.at("lower"), d - 1, "domain.lower")
                                     : Vec::Zero(d - 1);
  c.upper = domain.contains("upper") ? read_vec(domain.at("upper"), d - 1, "domain.upper")
                                     : Vec::Ones(d - 1);
  c.height = domain.contains("height") ? read_expr(domain.at("height"), d, "domain.height")
                                       : Expression::constant(1.0);
  c.resolution = number<int>(doc, "resolution", 8);
  if (c.resolution < 1) throw ConfigError("resolution must be >= 1");

  c.p = number<double>(doc, "p", 2.0);
  c.q = number<double>(doc, "q", 1.25);
  c.viscosity = read_viscosity(doc.value("viscosity", json::object()));

  c.f = read_vector_expr(doc, "f", d, false);
  c.G = read_vector_expr(doc, "G", d, false);
  if (doc.contains("g")) c.g = read_vector_expr(doc, "g", d, true);
  c.s = read_vector_expr(doc, "s", d, false);
  c.k = doc.contains("k") ? read_expr(doc.at("k"), d, "k") : Expression::constant(0.0);

  const json cond = doc.value("conductivity", json::object());
  c.K = Mat::Identity(d, d);
  if (cond.contains("K")) {
    const json& K = cond.at("K");
    if (!K.is_array() || static_cast<int>(K.size()) != d)
      throw ConfigError("conductivity.K: expected a " + std::to_string(d) + "x" + std::to_string(d) + " matrix");
    for (int i = 0; i < d; ++i) c.K.row(i) = read_vec(K[i], d, "conductivity.K").transpose();
  }
  c.k0 = number<double>(cond, "k0", 1.0);

  c.r = read_heat_source(doc.value("heat_source", json::object()));
  c.theta_b = doc.contains("theta_b") ? read_expr(doc.at("theta_b"), d, "theta_b")
                                      : Expression::constant(0.0);
  c.solver = read_solver(doc.value("solver", json::object()));
  if (doc.contains("schedule")) {
    c.schedule = doc.at("schedule").get<std::vector<int>>();
  }
  c.seed = number<std::uint64_t>(doc, "seed", 0);
  validate_config(c);
  return c;
}

void validate_exponents(double p, double q) {
  if (q == 1.0 && p <= 3.0)
    throw ValidationError("(compa2)", "q = 1 requires p > 3");
  if (!(p > 1.5)) throw ValidationError("(compa1)", "no admissible q for p <= 3/2");
  if (!valid_q_range(p).contains(q))
    throw ValidationError("(compa1)", "q outside the admissible window for p");
}

void validate_config(const ProblemConfig& c) {
  const int d = c.dim;
  validate_exponents(c.p, c.q);

  if (c.schedule.empty()) throw ConfigError("schedule must not be empty");
  for (std::size_t i = 0; i < c.schedule.size(); ++i)
    if (c.schedule[i] < 1 || (i > 0 && c.schedule[i] <= c.schedule[i - 1]))
      throw ConfigError("schedule must be strictly increasing positive integers");

  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (!std::isfinite(c.K(i, j))) throw ValidationError("(TEM2)", "conductivity entry is not finite");
  if ((c.K - c.K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, c.K.cwiseAbs().maxCoeff()))
    throw ValidationError("(TEM2)", "conductivity must be symmetric");
  if (!(c.k0 > 0.0)) throw ValidationError("(TEM2bis)", "k0 must be positive");
  {
    std::mt19937_64 rng(c.seed);
    std::normal_distribution<double> normal;
    for (int t = 0; t < 100; ++t) {
      Vec xi(d);
      for (int i = 0; i < d; ++i) xi(i) = normal(rng);
      if (xi.dot(c.K * xi) < c.k0 * xi.squaredNorm() * (1.0 - 1e-12))
        throw ValidationError("(TEM2bis)", "K xi . xi < k0 |xi|^2 for a sampled xi");
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(c.K);
    if (eig.eigenvalues().minCoeff() < c.k0 * (1.0 - 1e-12))
      throw ValidationError("(TEM2bis)", "smallest eigenvalue of K is below k0");
  }

  Mesh mesh;
  try {
    ChannelDomain dom = c.domain();
    dom.resolution = std::min(c.resolution, 16);
    mesh = build_mesh(dom);
  } catch (const DomainError& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
  const Discretization disc(std::move(mesh), 4);
  const Mesh& m = disc.mesh();

  const VectorFn G = c.G_fn();
  const VectorFn s = c.s_fn();
  const VectorFn f = c.f_fn();
  const VectorFn g = c.g ? vector_fn(*c.g) : G;

  double scale = 1.0;
  for (int n = 0; n < disc.num_nodes(); ++n) scale = std::max(scale, G(disc.node(n)).cwiseAbs().maxCoeff());

  for (const auto& fp : disc.friction_points()) {
    const double kv = c.k(fp.x);
    if (!std::isfinite(kv) || kv < 0.0) throw ValidationError("(eqfk)", "friction threshold k must be finite and >= 0 on Gamma0");
    const Vec sv = s(fp.x);
    if (!sv.allFinite()) throw ValidationError("(eqfk)", "wall velocity s is not finite on Gamma0");
    if (std::abs(sv(d - 1)) > 1e-12 * std::max(1.0, sv.norm()))
      throw ValidationError("(eqfk)", "wall velocity s must be tangent to Gamma0");
    if (!std::isfinite(c.theta_b(fp.x))) throw ValidationError("(thetab)", "theta_b is not finite on Gamma0");
  }
  for (std::size_t cell = 0; cell < m.num_cells(); ++cell)
    for (std::size_t q = 0; q < disc.shapes().rule.size(); ++q)
      if (!f(disc.quadrature_point(cell, q)).allFinite())
        throw ValidationError("(eqfk)", "body force f is not finite");

  const double tol = 1e-8 * scale;
  for (int n = 0; n < disc.num_nodes(); ++n) {
    const Vec Gx = G(disc.node(n));
    if (!Gx.allFinite()) throw ValidationError("(eqG)", "extension G is not finite");
    if (disc.node_on_gamma0(n) && std::abs(Gx(d - 1)) > tol)
      throw ValidationError("(eqG)", "G . n != 0 on Gamma0");
  }
  for (const auto& facet : m.facets()) {
    if (facet.tag != FacetTag::gamma1) continue;
    for (int i = 0; i < d; ++i) {
      const Vec x = m.vertex(facet.vertices[i]);
      if (G(x).norm() > tol) throw ValidationError("(eqG)", "G != 0 on Gamma1");
      if (g(x).norm() > tol) throw ValidationError("(sdf)", "g != 0 on Gamma1");
    }
  }

  // weak divergence of G against the P1 hats, div by 4th-order differences
  {
    const double h = 1e-3;
    Eigen::VectorXd weak = Eigen::VectorXd::Zero(disc.num_vertices());
    const Eigen::VectorXd mass = p1_mass_vector(disc);
    const auto& rule = disc.shapes().rule;
    for (std::size_t cell = 0; cell < m.num_cells(); ++cell)
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const Vec x = disc.quadrature_point(cell, q);
        double div = 0.0;
        for (int i = 0; i < d; ++i) {
          auto at = [&](double t) {
            Vec y = x;
            y(i) += t;
            return G(y)(i);
          };
          div += (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
        }
        for (int j = 0; j <= d; ++j)
          weak(m.cell(cell)[j]) += disc.quadrature_weight(cell, q) * div * rule.barycentric[q](j);
      }
    for (int j = 0; j < disc.num_vertices(); ++j)
      if (std::abs(weak(j)) > tol * mass(j)) throw ValidationError("(eqG)", "div G != 0 (weak test against P1 functions)");
  }

  // boundary data g
  {
    const QuadratureRule frule = simplex_rule(d - 1, 4);
    double flux = 0.0, measure = 0.0;
    const double fscale = d == 3 ? 2.0 : 1.0;
    for (const auto& facet : m.facets()) {
      for (std::size_t q = 0; q < frule.size(); ++q) {
        Vec x = Vec::Zero(d);
        for (int i = 0; i < d; ++i) x += frule.barycentric[q](i) * m.vertex(facet.vertices[i]);
        const Vec gx = g(x);
        if (!gx.allFinite()) throw ValidationError("(sdf)", "boundary data g is not finite");
        const double w = frule.weights[q] * facet.measure * fscale;
        if (facet.tag == FacetTag::lateral) {
          flux += w * gx.dot(facet.normal);
          measure += w;
          if (c.g && (gx - G(x)).norm() > tol) throw ValidationError("(eqG)", "G does not extend g on the lateral boundary");
        } else if (facet.tag == FacetTag::gamma0 && std::abs(gx.dot(facet.normal)) > tol) {
          throw ValidationError("(sdf)", "g . n != 0 on Gamma0");
        }
      }
    }
    if (std::abs(flux) > tol * std::max(1.0, measure))
      throw ValidationError("(sdf)", "lateral flux of g . n does not vanish");
  }
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string config_hash(const ProblemConfig& config) { return fnv1a_hex(config.source.dump()); }

}  // namespace tresca
