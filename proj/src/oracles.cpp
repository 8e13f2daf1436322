#include "aqnbf/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "aqnbf/errors.hpp"

namespace aqnbf {

namespace {

using cd = std::complex<double>;

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Projectors onto the +1 and -1 eigenspaces of n . sigma.
std::vector<Eigen::MatrixXcd> qubit_measurement(double nx, double ny, double nz) {
  Eigen::MatrixXcd o(2, 2);
  o << cd(nz, 0), cd(nx, -ny), cd(nx, ny), cd(-nz, 0);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(2, 2);
  return {(id + o) / 2.0, (id - o) / 2.0};
}

Eigen::MatrixXcd random_unitary(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::MatrixXcd m(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = cd(g(rng), g(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(m);
  return qr.householderQ() * Eigen::MatrixXcd::Identity(d, d);
}

std::vector<Eigen::MatrixXcd> basis_measurement(const Eigen::MatrixXcd& u) {
  std::vector<Eigen::MatrixXcd> out;
  for (Eigen::Index a = 0; a < u.cols(); ++a) out.push_back(u.col(a) * u.col(a).adjoint());
  return out;
}

}  // namespace

double QuantumModel::residual() const {
  double worst = std::abs(state.norm() - 1.0);
  for (std::size_t k = 0; k < projectors.size(); ++k) {
    const auto id = Eigen::MatrixXcd::Identity(dims[k], dims[k]);
    for (const auto& setting : projectors[k]) {
      Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dims[k], dims[k]);
      for (std::size_t a = 0; a < setting.size(); ++a) {
        const auto& p = setting[a];
        worst = std::max(worst, (p * p - p).cwiseAbs().maxCoeff());
        worst = std::max(worst, (p - p.adjoint()).cwiseAbs().maxCoeff());
        for (std::size_t b = a + 1; b < setting.size(); ++b)
          worst = std::max(worst, (p * setting[b]).cwiseAbs().maxCoeff());
        sum += p;
      }
      worst = std::max(worst, (sum - id).cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

void QuantumModel::validate(const Scenario& s) const {
  if (static_cast<int>(projectors.size()) != s.parties() || dims.size() != projectors.size())
    throw InvalidArgument("quantum model has the wrong number of parties");
  long total = 1;
  for (int k = 0; k < s.parties(); ++k) {
    total *= dims[static_cast<std::size_t>(k)];
    const auto& party = projectors[static_cast<std::size_t>(k)];
    if (static_cast<int>(party.size()) != s.settings(k)) throw InvalidArgument("quantum model has the wrong setting count");
    for (const auto& setting : party) {
      if (static_cast<int>(setting.size()) != s.outcomes()) throw InvalidArgument("quantum model has the wrong outcome count");
      for (const auto& p : setting)
        if (p.rows() != dims[static_cast<std::size_t>(k)] || p.cols() != p.rows())
          throw InvalidArgument("projector has the wrong dimension");
    }
  }
  if (state.size() != total) throw InvalidArgument("state has the wrong dimension");
  if (const double r = residual(); r > 1e-12) throw InvalidArgument("quantum model violates projector identities: " + std::to_string(r));
}

Behavior quantum_behavior(const QuantumModel& model, const Scenario& s) {
  model.validate(s);
  std::vector<double> table(s.joint_events());
  std::vector<int> outs(static_cast<std::size_t>(s.parties())), sets(outs.size());
  for (std::size_t e = 0; e < table.size(); ++e) {
    s.decode_event(e, outs, sets);
    Eigen::MatrixXcd op = model.projectors[0][static_cast<std::size_t>(sets[0])][static_cast<std::size_t>(outs[0])];
    for (int k = 1; k < s.parties(); ++k)
      op = kron(op, model.projectors[static_cast<std::size_t>(k)][static_cast<std::size_t>(sets[static_cast<std::size_t>(k)])]
                                    [static_cast<std::size_t>(outs[static_cast<std::size_t>(k)])]);
    table[e] = model.state.dot(op * model.state).real();
  }
  return behavior_from_table(s, std::move(table));
}

double quantum_value(const BellFunctional& f, const QuantumModel& model) {
  return evaluate(f, quantum_behavior(model, f.scenario()));
}

QuantumModel tsirelson_chsh_model() {
  QuantumModel m;
  m.name = "tsirelson";
  m.dims = {2, 2};
  const double r = 1.0 / std::sqrt(2.0);
  m.projectors = {{qubit_measurement(0, 0, 1), qubit_measurement(1, 0, 0)},
                  {qubit_measurement(r, 0, r), qubit_measurement(-r, 0, r)}};
  m.state = Eigen::VectorXcd::Zero(4);
  m.state(0) = r;
  m.state(3) = r;
  return m;
}

QuantumModel random_product_model(const Scenario& s, std::mt19937_64& rng) {
  if (s.outcomes() != 2) throw InvalidArgument("product qubit models need two outcomes");
  std::normal_distribution<double> g;
  QuantumModel m;
  m.name = "random_product";
  m.state = Eigen::VectorXcd::Ones(1);
  for (int k = 0; k < s.parties(); ++k) {
    m.dims.push_back(2);
    std::vector<std::vector<Eigen::MatrixXcd>> party;
    for (int x = 0; x < s.settings(k); ++x) {
      Eigen::Vector3d n(g(rng), g(rng), g(rng));
      n.normalize();
      party.push_back(qubit_measurement(n(0), n(1), n(2)));
    }
    m.projectors.push_back(std::move(party));
    Eigen::VectorXcd psi(2);
    psi << cd(g(rng), g(rng)), cd(g(rng), g(rng));
    psi.normalize();
    m.state = kron(m.state, psi);
  }
  return m;
}

QuantumModel random_entangled_model(const Scenario& s, std::mt19937_64& rng) {
  const int d = s.outcomes();
  std::normal_distribution<double> g;
  QuantumModel m;
  m.name = "random_entangled";
  long total = 1;
  for (int k = 0; k < s.parties(); ++k) {
    m.dims.push_back(d);
    total *= d;
    std::vector<std::vector<Eigen::MatrixXcd>> party;
    for (int x = 0; x < s.settings(k); ++x) party.push_back(basis_measurement(random_unitary(d, rng)));
    m.projectors.push_back(std::move(party));
  }
  m.state.resize(total);
  for (long i = 0; i < total; ++i) m.state(i) = cd(g(rng), g(rng));
  m.state.normalize();
  return m;
}

QuantumModel ghz_model(const Scenario& s) {
  if (s.outcomes() != 2) throw InvalidArgument("GHZ models need two outcomes");
  QuantumModel m;
  m.name = "ghz";
  const long total = 1L << s.parties();
  for (int k = 0; k < s.parties(); ++k) {
    m.dims.push_back(2);
    std::vector<std::vector<Eigen::MatrixXcd>> party;
    for (int x = 0; x < s.settings(k); ++x) {
      const double t = x * std::numbers::pi / s.settings(k);
      party.push_back(qubit_measurement(std::cos(t), std::sin(t), 0.0));
    }
    m.projectors.push_back(std::move(party));
  }
  m.state = Eigen::VectorXcd::Zero(total);
  m.state(0) = 1.0 / std::sqrt(2.0);
  m.state(total - 1) = 1.0 / std::sqrt(2.0);
  return m;
}

BellFunctional normalized_chsh() {
  const auto s = make_scenario(2, 2, 2);
  std::vector<double> w(s.joint_events());
  int o[2], x[2];
  for (std::size_t e = 0; e < w.size(); ++e) {
    s.decode_event(e, o, x);
    const double sign = (o[0] + o[1] + x[0] * x[1]) % 2 == 0 ? 1.0 : -1.0;
    w[e] = (1.0 + sign) / 8.0;
  }
  return functional_from_full_table(s, w);
}

std::pair<double, double> deterministic_range(const BellFunctional& f, std::size_t guard) {
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& b : enumerate_deterministic(f.scenario(), guard)) {
    const double v = evaluate(f, b);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

Eigen::MatrixXd trace_moment_matrix(const MomentStructure& st) {
  const auto& s = st.scenario();
  const int d = s.outcomes();
  // Global product basis: parties in order, each party's setting factors in
  // order, last factor fastest.
  std::vector<int> offset(static_cast<std::size_t>(s.parties()));
  int factors = 0;
  for (int k = 0; k < s.parties(); ++k) {
    offset[static_cast<std::size_t>(k)] = factors;
    factors += s.settings(k);
  }
  const auto factor_diag = [d](int a) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(d);
    v(a) = 1.0;
    return v;
  };
  const auto kron_vec = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
  };

  const int n = st.size();
  std::vector<Eigen::VectorXd> diag;
  for (const auto& mono : st.basis()) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(1);
    for (int f = 0; f < factors; ++f) {
      Eigen::VectorXd fd = Eigen::VectorXd::Ones(d);
      for (const auto& l : mono)
        if (offset[static_cast<std::size_t>(l.party)] + l.setting == f) fd = factor_diag(l.outcome);
      v = kron_vec(v, fd);
    }
    diag.push_back(std::move(v));
  }
  const double dim = static_cast<double>(diag.front().size());
  Eigen::MatrixXd gamma(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) gamma(r, c) = diag[static_cast<std::size_t>(r)].dot(diag[static_cast<std::size_t>(c)]) / dim;
  return gamma;
}

}  // namespace aqnbf
