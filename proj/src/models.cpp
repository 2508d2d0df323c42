#include "domcert/models.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace domcert {

namespace {

double sech2(double x) {
  const double c = std::cosh(x);
  return 1.0 / (c * c);
}

struct Alpha {
  std::function<double(double)> value;
  std::function<double(double)> slope;
  double dmin_default;
  double dmax_default;
};

Alpha make_alpha(const std::string& kind) {
  if (kind == "linear") {
    return {[](double x) { return x; }, [](double) { return 1.0; }, 1.0, 1.0};
  }
  if (kind == "double_well") {
    // force of the potential x^2/4 + cos(x); slope in [-1/2, 3/2], enveloped
    // by the wider analysis interval by default
    return {[](double x) { return 0.5 * x - std::sin(x); },
            [](double x) { return 0.5 - std::cos(x); }, -2.0, 5.0};
  }
  if (kind == "poly_double_well") {
    // x^4/4 - x^2/2 potential; slope unbounded above, bounds must be supplied
    return {[](double x) { return x * x * x - x; }, [](double x) { return 3.0 * x * x - 1.0; },
            -1.0, std::numeric_limits<double>::infinity()};
  }
  throw std::invalid_argument("unknown alpha kind: " + kind);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

ModelDef make_duffing(const ModelParams& p) {
  const double c = p.get("c", 5.0);
  const double u = p.get("u", 0.0);
  require(c > 0, "duffing: damping c must be positive");
  const Alpha alpha = make_alpha(p.get("alpha", "double_well"));
  const double dmin = p.get("dalpha_min", alpha.dmin_default);
  const double dmax = p.get("dalpha_max", alpha.dmax_default);
  require(dmin <= dmax, "duffing: dalpha_min must not exceed dalpha_max");

  ModelDef m;
  m.name = "duffing";
  m.n = 2;
  m.params = p;
  m.vector_field = [alpha, c, u](const Eigen::VectorXd& x) {
    Eigen::VectorXd d(2);
    d << x[1], -alpha.value(x[0]) - c * x[1] + u;
    return d;
  };
  m.jacobian = [alpha, c](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(2, 2);
    j << 0, 1, -alpha.slope(x[0]), -c;
    return j;
  };
  m.jac_template.resize(2, 2);
  m.jac_template << 0, 1, 0, -c;
  if (dmin == dmax) {
    m.jac_template(1, 0) = -dmin;
  } else {
    m.entry_bounds.push_back({1, 0, -dmax, -dmin});
  }
  m.B = (Eigen::MatrixXd(2, 1) << 0, 1).finished();
  m.C = (Eigen::MatrixXd(1, 2) << -1, 0).finished();  // passivity output y = -x_p
  m.D = Eigen::MatrixXd::Zero(1, 1);
  return m;
}

ModelDef make_duffing_dc(const ModelParams& p, bool with_pi) {
  const double c = p.get("c", 5.0);
  const double r_el = p.get("R", 1.0);
  const double k_f = p.get("k_f", 1.0);
  const double k_e = p.get("k_e", 1.0);
  const double ind = p.get("L", 0.1);
  require(c > 0 && r_el > 0 && ind > 0, "duffing_dc: c, R, L must be positive");
  const Alpha alpha = make_alpha(p.get("alpha", "double_well"));
  const double dmin = p.get("dalpha_min", alpha.dmin_default);
  const double dmax = p.get("dalpha_max", alpha.dmax_default);
  require(dmin <= dmax, "duffing_dc: dalpha_min must not exceed dalpha_max");

  ModelDef m;
  m.params = p;
  if (!with_pi) {
    const double volt = p.get("V", 0.0);
    m.name = "duffing_dc";
    m.n = 3;
    m.vector_field = [alpha, c, r_el, k_f, k_e, ind, volt](const Eigen::VectorXd& x) {
      Eigen::VectorXd d(3);
      d << x[1], -alpha.value(x[0]) - c * x[1] + k_f * x[2],
          (-r_el * x[2] - k_e * x[1] + volt) / ind;
      return d;
    };
    m.jacobian = [alpha, c, r_el, k_f, k_e, ind](const Eigen::VectorXd& x) {
      Eigen::MatrixXd j(3, 3);
      j << 0, 1, 0, -alpha.slope(x[0]), -c, k_f, 0, -k_e / ind, -r_el / ind;
      return j;
    };
    m.jac_template.resize(3, 3);
    m.jac_template << 0, 1, 0, 0, -c, k_f, 0, -k_e / ind, -r_el / ind;
    m.B = (Eigen::MatrixXd(3, 1) << 0, 0, 1.0 / ind).finished();  // voltage input
    m.C = (Eigen::MatrixXd(1, 3) << 1, 0, 0).finished();
    m.D = Eigen::MatrixXd::Zero(1, 1);
  } else {
    const double k_p = p.get("k_P", 1.0);
    const double k_i = p.get("k_I", 5.0);
    const double ref = p.get("r", 0.0);
    m.name = "duffing_dc_pi";
    m.n = 4;
    // states (x_p, x_v, x_i, x_c); V = k_P (r - x_p) + k_I x_c, x_c' = r - x_p
    m.vector_field = [alpha, c, r_el, k_f, k_e, ind, k_p, k_i, ref](const Eigen::VectorXd& x) {
      const double volt = k_p * (ref - x[0]) + k_i * x[3];
      Eigen::VectorXd d(4);
      d << x[1], -alpha.value(x[0]) - c * x[1] + k_f * x[2],
          (-r_el * x[2] - k_e * x[1] + volt) / ind, ref - x[0];
      return d;
    };
    m.jacobian = [alpha, c, r_el, k_f, k_e, ind, k_p, k_i](const Eigen::VectorXd& x) {
      Eigen::MatrixXd j(4, 4);
      j << 0, 1, 0, 0, -alpha.slope(x[0]), -c, k_f, 0, -k_p / ind, -k_e / ind, -r_el / ind,
          k_i / ind, -1, 0, 0, 0;
      return j;
    };
    m.jac_template.resize(4, 4);
    m.jac_template << 0, 1, 0, 0, 0, -c, k_f, 0, -k_p / ind, -k_e / ind, -r_el / ind,
        k_i / ind, -1, 0, 0, 0;
    m.B = (Eigen::MatrixXd(4, 1) << 0, 0, 1.0 / ind, 0).finished();
    m.C = (Eigen::MatrixXd(1, 4) << 1, 0, 0, 0).finished();
    m.D = Eigen::MatrixXd::Zero(1, 1);
  }
  if (dmin == dmax) {
    m.jac_template(1, 0) = -dmin;
  } else {
    m.entry_bounds.push_back({1, 0, -dmax, -dmin});
  }
  return m;
}

ModelDef make_tanh_p(const ModelParams& p) {
  const double c = p.get("c", 5.0);
  const double k_p = p.get("k_P", 1.0);
  const double v_in = p.get("v", 0.0);
  require(c > 0 && k_p >= 0, "mass_spring_tanh_P: need c > 0 and k_P >= 0");

  ModelDef m;
  m.name = "mass_spring_tanh_P";
  m.n = 2;
  m.params = p;
  m.vector_field = [c, k_p, v_in](const Eigen::VectorXd& x) {
    Eigen::VectorXd d(2);
    d << x[1], -x[0] - c * x[1] + k_p * std::tanh(2.0 * x[0]) + v_in;
    return d;
  };
  m.jacobian = [c, k_p](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(2, 2);
    j << 0, 1, -1.0 + 2.0 * k_p * sech2(2.0 * x[0]), -c;
    return j;
  };
  m.jac_template.resize(2, 2);
  m.jac_template << 0, 1, -1, -c;
  if (k_p > 0) m.entry_bounds.push_back({1, 0, -1.0, -1.0 + 2.0 * k_p});
  m.B = (Eigen::MatrixXd(2, 1) << 0, 1).finished();
  m.C = (Eigen::MatrixXd(1, 2) << 1, 0).finished();
  m.D = Eigen::MatrixXd::Zero(1, 1);
  return m;
}

ModelDef make_tanh_pi(const ModelParams& p) {
  const double c = p.get("c", 5.0);
  const double k_p = p.get("k_P", 1.0);
  const double k_i = p.get("k_I", -1.0);
  const double v_in = p.get("v", 0.0);
  const double kap_s = p.get("kappa_spring", 0.0);
  const double kap_d = p.get("kappa_damp", 0.0);
  const std::string output = p.get("output", "x_p");
  require(c > 0 && k_p >= 0, "mass_spring_tanh_PI: need c > 0 and k_P >= 0");
  require(output == "x_p" || output == "x_v", "mass_spring_tanh_PI: output must be x_p or x_v");

  ModelDef m;
  m.name = "mass_spring_tanh_PI";
  m.n = 3;
  m.params = p;
  // states (x_p, x_v, x_c); x_c' = x_p and the controller force is
  // k_P tanh(2 x_p) + k_I x_c; spring/damping perturbations kappa*sin(.)
  m.vector_field = [c, k_p, k_i, v_in, kap_s, kap_d](const Eigen::VectorXd& x) {
    Eigen::VectorXd d(3);
    d << x[1],
        -x[0] - kap_s * std::sin(x[0]) - c * x[1] - kap_d * std::sin(x[1]) +
            k_p * std::tanh(2.0 * x[0]) + k_i * x[2] + v_in,
        x[0];
    return d;
  };
  m.jacobian = [c, k_p, k_i, kap_s, kap_d](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(3, 3);
    j << 0, 1, 0, -1.0 - kap_s * std::cos(x[0]) + 2.0 * k_p * sech2(2.0 * x[0]),
        -c - kap_d * std::cos(x[1]), k_i, 1, 0, 0;
    return j;
  };
  m.jac_template.resize(3, 3);
  m.jac_template << 0, 1, 0, -1, -c, k_i, 1, 0, 0;
  const double kas = std::abs(kap_s);
  const double kad = std::abs(kap_d);
  if (k_p > 0 || kas > 0) {
    m.entry_bounds.push_back({1, 0, -1.0 - kas, -1.0 + 2.0 * k_p + kas});
  }
  if (kad > 0) m.entry_bounds.push_back({1, 1, -c - kad, -c + kad});
  m.B = (Eigen::MatrixXd(3, 1) << 0, 1, 0).finished();
  m.C = output == "x_p" ? (Eigen::MatrixXd(1, 3) << 1, 0, 0).finished()
                        : (Eigen::MatrixXd(1, 3) << 0, 1, 0).finished();
  m.D = Eigen::MatrixXd::Zero(1, 1);
  return m;
}

ModelDef make_pendulum(const ModelParams& p) {
  const double c = p.get("c", 5.0);
  const double u = p.get("u", 0.0);
  require(c > 0, "pendulum: damping c must be positive");

  ModelDef m;
  m.name = "pendulum";
  m.n = 2;
  m.params = p;
  // cylinder state space lifted to R^2
  m.vector_field = [c, u](const Eigen::VectorXd& x) {
    Eigen::VectorXd d(2);
    d << x[1], -std::sin(x[0]) - c * x[1] + u;
    return d;
  };
  m.jacobian = [c](const Eigen::VectorXd& x) {
    Eigen::MatrixXd j(2, 2);
    j << 0, 1, -std::cos(x[0]), -c;
    return j;
  };
  m.jac_template.resize(2, 2);
  m.jac_template << 0, 1, 0, -c;
  m.entry_bounds.push_back({1, 0, -1.0, 1.0});
  m.B = (Eigen::MatrixXd(2, 1) << 0, 1).finished();
  m.C = (Eigen::MatrixXd(1, 2) << 1, 0).finished();
  m.D = Eigen::MatrixXd::Zero(1, 1);
  return m;
}

}  // namespace

double ModelParams::get(const std::string& key, double fallback) const {
  auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

std::string ModelParams::get(const std::string& key, const std::string& fallback) const {
  auto it = options.find(key);
  return it == options.end() ? fallback : it->second;
}

ModelDef builtin(const std::string& name, const ModelParams& params) {
  if (name == "duffing") return make_duffing(params);
  if (name == "duffing_dc") return make_duffing_dc(params, false);
  if (name == "duffing_dc_pi") return make_duffing_dc(params, true);
  if (name == "mass_spring_tanh_P") return make_tanh_p(params);
  if (name == "mass_spring_tanh_PI") return make_tanh_pi(params);
  if (name == "pendulum") return make_pendulum(params);
  throw std::invalid_argument("unknown builtin model: " + name);
}

std::vector<std::string> builtin_names() {
  return {"duffing",            "duffing_dc",          "duffing_dc_pi",
          "mass_spring_tanh_P", "mass_spring_tanh_PI", "pendulum"};
}

VertexFamily jacobian_vertices(const ModelDef& model) {
  for (const auto& b : model.entry_bounds) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw std::invalid_argument("jacobian_vertices: unbounded nonlinear entry (" +
                                  std::to_string(b.row) + "," + std::to_string(b.col) + ")");
    }
  }
  const int k = static_cast<int>(model.entry_bounds.size());
  VertexFamily family;
  family.n = model.n;
  for (int mask = 0; mask < (1 << k); ++mask) {
    Eigen::MatrixXd a = model.jac_template;
    for (int i = 0; i < k; ++i) {
      const auto& b = model.entry_bounds[i];
      a(b.row, b.col) = (mask >> i) & 1 ? b.hi : b.lo;
    }
    family.vertices.push_back(a);
  }
  return family;
}

OpenVertexFamily open_vertex_family(const ModelDef& model) {
  if (!model.is_open()) {
    throw std::invalid_argument("open_vertex_family: model has no input/output blocks");
  }
  const VertexFamily a = jacobian_vertices(model);
  OpenVertexFamily family;
  family.n = model.n;
  family.m_u = static_cast<int>(model.B.cols());
  family.m_y = static_cast<int>(model.C.rows());
  for (const auto& v : a.vertices) {
    family.vertices.push_back(OpenVertex{v, model.B, model.C, model.D});
  }
  return family;
}

std::vector<Eigen::MatrixXd> jacobian_samples(const ModelDef& model,
                                              const std::vector<Eigen::VectorXd>& states) {
  if (states.empty()) throw std::invalid_argument("jacobian_samples: empty grid");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(states.size());
  for (const auto& x : states) {
    if (x.size() != model.n) {
      throw std::invalid_argument("jacobian_samples: state dimension mismatch");
    }
    out.push_back(model.jacobian(x));
  }
  return out;
}

std::vector<Eigen::VectorXd> axis_grid(int n, int axis, double lo, double hi, int count) {
  if (axis < 0 || axis >= n || count < 1) {
    throw std::invalid_argument("axis_grid: invalid axis or count");
  }
  std::vector<Eigen::VectorXd> grid;
  grid.reserve(count);
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    x[axis] = count == 1 ? lo : lo + (hi - lo) * i / (count - 1);
    grid.push_back(x);
  }
  return grid;
}

}  // namespace domcert
