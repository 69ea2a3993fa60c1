#include "fheom/oracle.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

namespace fheom {

namespace {

FockSpace global_space_for(std::size_t n_env, const FockOperator& h_sys) {
  const int total = static_cast<int>(n_env) + h_sys.space.n_modes();
  if (n_env == 0) fail(ErrorCode::invalid_argument, "oracle needs at least one bath mode");
  if (total > kMaxOracleModes)
    fail(ErrorCode::invalid_argument, "oracle is limited to " + std::to_string(kMaxOracleModes) +
                                          " modes, got " + std::to_string(total));
  return FockSpace(total);
}

SparseMat identity_sparse(Eigen::Index d) {
  SparseMat id(d, d);
  id.setIdentity();
  return id;
}

std::vector<double> bath_energies(const std::vector<BathMode>& modes) {
  std::vector<double> e;
  for (const auto& m : modes) e.push_back(m.energy);
  return e;
}

// Full Gauss-Legendre rule on [-1, 1] from the library's half rule.
template <std::size_t N>
std::vector<std::pair<double, double>> legendre_rule() {
  using rule = boost::math::quadrature::gauss<double, N>;
  const auto& x = rule::abscissa();
  const auto& w = rule::weights();
  std::vector<std::pair<double, double>> out;
  for (std::size_t k = 0; k < x.size(); ++k) {
    out.emplace_back(x[k], w[k]);
    if (x[k] != 0.0) out.emplace_back(-x[k], w[k]);
  }
  return out;
}

template <std::size_t N>
DenseMat second_order_term(const CompositeModel& model, const CorrelationFn& corr, double t) {
  const auto rule = legendre_rule<N>();
  const DenseMat& rho0 = model.system_initial_state();
  DenseMat acc = DenseMat::Zero(rho0.rows(), rho0.cols());
  for (const auto& [x2, w2] : rule) {
    const double t2 = 0.5 * t * (x2 + 1.0);
    for (const auto& [x1, w1] : rule) {
      const double t1 = 0.5 * t2 * (x1 + 1.0);
      const SuperOperator w = make_W_composed(corr, model.coupling(), model.system_hamiltonian(), t2, t1);
      acc += (0.25 * t * t2 * w2 * w1) * w.apply(rho0);
    }
  }
  return acc;
}

}  // namespace

CompositeModel::CompositeModel(std::vector<BathMode> modes, FockOperator h_sys, FockOperator s,
                               InverseTemperature beta, double mu, DenseMat rho_sys0)
    : modes_(std::move(modes)),
      h_sys_(std::move(h_sys)),
      s_(std::move(s)),
      beta_(beta),
      mu_(mu),
      rho_sys0_(std::move(rho_sys0)),
      env_(static_cast<int>(std::max<std::size_t>(modes_.size(), 1))),
      sys_(h_sys_.space),
      global_(global_space_for(modes_.size(), h_sys_)),
      h_int_(zero_op(global_)),
      h_full_(zero_op(global_)) {
  if (!(s_.space == sys_)) fail(ErrorCode::invalid_argument, "s and H_S act on different spaces");
  if (parity_violation(s_, Parity::odd) > 1e-12)
    fail(ErrorCode::invalid_argument, "system coupling operator must have odd parity");
  if (parity_violation(h_sys_, Parity::even) > 1e-12)
    fail(ErrorCode::invalid_argument, "system Hamiltonian must have even parity");
  if (rho_sys0_.rows() != sys_.dim() || rho_sys0_.cols() != sys_.dim())
    fail(ErrorCode::invalid_argument, "initial system state does not match the system space");

  const FockOperator s_global = embed_system(s_);
  FockOperator h_env = zero_op(global_);
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    const FockOperator c = env_annihilation(static_cast<int>(k));
    h_env += modes_[k].energy * (c.adjoint() * c);
    h_int_ += modes_[k].coupling * (s_global * c.adjoint() - s_global.adjoint() * c);
  }
  h_full_ = embed_system(h_sys_) + h_env + h_int_;
  const SparseMat herm = h_full_.matrix - SparseMat(h_full_.matrix.adjoint());
  if (herm.nonZeros() > 0 && DenseMat(herm).cwiseAbs().maxCoeff() > 1e-12)
    fail(ErrorCode::invalid_argument, "full Hamiltonian is not Hermitian");

  const DenseMat rho_env =
      thermal_state(env_, bath_energies(modes_), beta_, mu_).matrix;
  const DenseMat rho_env_global = kron(identity_sparse(sys_.dim()), rho_env.sparseView(0.0, 0.0));
  rho0_ = rho_env_global * embed_system(rho_sys0_);
}

FockOperator CompositeModel::embed_system(const FockOperator& op) const {
  const SparseMat id_env = identity_sparse(env_.dim());
  const SparseMat p_env = parity_op(env_).matrix;
  return {global_, SparseMat(kron(parity_project(op, Parity::even).matrix, id_env) +
                             kron(parity_project(op, Parity::odd).matrix, p_env))};
}

DenseMat CompositeModel::embed_system(const DenseMat& op) const {
  return embed_system(FockOperator(sys_, op.sparseView(0.0, 0.0))).dense();
}

FockOperator CompositeModel::env_annihilation(int k) const {
  return {global_, kron(identity_sparse(sys_.dim()), annihilation_op(env_, k).matrix)};
}

FockOperator CompositeModel::env_parity() const {
  return {global_, kron(identity_sparse(sys_.dim()), parity_op(env_).matrix)};
}

CompositeModel build_composite(std::vector<BathMode> modes, FockOperator h_sys, FockOperator s,
                               InverseTemperature beta, double mu, DenseMat rho_sys0) {
  return CompositeModel(std::move(modes), std::move(h_sys), std::move(s), beta, mu,
                        std::move(rho_sys0));
}

ExactEvolution::ExactEvolution(const CompositeModel& model) : rho0_(model.initial_state()) {
  const Eigen::SelfAdjointEigenSolver<DenseMat> eig(model.hamiltonian().dense());
  if (eig.info() != Eigen::Success) fail(ErrorCode::solver, "diagonalization of H_full failed");
  vectors_ = eig.eigenvectors();
  energies_ = eig.eigenvalues();
}

DenseMat ExactEvolution::propagator(double t) const {
  const Vec phase = (-I * energies_.cast<cplx>() * t).array().exp();
  return vectors_ * phase.asDiagonal() * vectors_.adjoint();
}

DenseMat ExactEvolution::evolve(const DenseMat& x, double t) const {
  const DenseMat u = propagator(t);
  return u * x * u.adjoint();
}

DenseMat ExactEvolution::state(double t) const { return evolve(rho0_, t); }

DenseMat evolve_exact(const CompositeModel& model, double t) { return ExactEvolution(model).state(t); }

DenseMat reduce_parity_aware(int n_env, int n_sys, const DenseMat& rho_full) {
  const Eigen::Index de = Eigen::Index{1} << n_env, ds = Eigen::Index{1} << n_sys;
  if (rho_full.rows() != de * ds || rho_full.cols() != de * ds)
    fail(ErrorCode::invalid_argument, "full state does not match the composite dimension");
  DenseMat out = DenseMat::Zero(ds, ds);
  for (Eigen::Index s2 = 0; s2 < ds; ++s2)
    for (Eigen::Index s1 = 0; s1 < ds; ++s1) {
      const bool weighted = parity_of(s1) != parity_of(s2);
      cplx acc{};
      for (Eigen::Index w = 0; w < de; ++w) {
        const cplx v = rho_full(w + de * s1, w + de * s2);
        acc += (weighted && parity_of(w) == Parity::odd) ? -v : v;
      }
      out(s1, s2) = acc;
    }
  return out;
}

DenseMat reduce_parity_aware(const CompositeModel& model, const DenseMat& rho_full) {
  return reduce_parity_aware(model.env_space().n_modes(), model.sys_space().n_modes(), rho_full);
}

DenseMat plain_partial_trace(int n_env, int n_sys, const DenseMat& rho_full) {
  const Eigen::Index de = Eigen::Index{1} << n_env, ds = Eigen::Index{1} << n_sys;
  if (rho_full.rows() != de * ds || rho_full.cols() != de * ds)
    fail(ErrorCode::invalid_argument, "full state does not match the composite dimension");
  DenseMat out = DenseMat::Zero(ds, ds);
  for (Eigen::Index s2 = 0; s2 < ds; ++s2)
    for (Eigen::Index s1 = 0; s1 < ds; ++s1)
      for (Eigen::Index w = 0; w < de; ++w) out(s1, s2) += rho_full(w + de * s1, w + de * s2);
  return out;
}

BathCorrelator::BathCorrelator(std::vector<BathMode> modes, InverseTemperature beta, double mu)
    : modes_(std::move(modes)), space_(static_cast<int>(std::max<std::size_t>(modes_.size(), 1))) {
  if (modes_.empty() || modes_.size() > 4)
    fail(ErrorCode::invalid_argument, "bath correlator supports 1 to 4 modes");
  for (int k = 0; k < space_.n_modes(); ++k) annihilators_.push_back(annihilation_op(space_, k).dense());
  parity_ = parity_op(space_).dense();
  rho_eq_ = thermal_state(space_, bath_energies(modes_), beta, mu).matrix;
}

DenseMat BathCorrelator::field(bool dagger, double t) const {
  DenseMat b = DenseMat::Zero(space_.dim(), space_.dim());
  for (std::size_t k = 0; k < modes_.size(); ++k)
    b += modes_[k].coupling * std::exp(-I * modes_[k].energy * t) * annihilators_[k];
  return dagger ? DenseMat(b.adjoint()) : b;
}

cplx BathCorrelator::super_correlation(const SuperCorrelationQuery& query) const {
  if (query.empty()) fail(ErrorCode::invalid_argument, "empty correlation query");
  if (query.size() % 2 == 1) return 0.0;

  std::vector<std::size_t> order(query.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return query[a].time > query[b].time; });
  std::size_t inversions = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t j = i + 1; j < order.size(); ++j)
      if (order[i] > order[j]) ++inversions;

  DenseMat x = rho_eq_;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const auto& q = query[*it];
    const DenseMat b = field(q.dagger, q.time);
    x = q.action == Action::left ? DenseMat(b * x) : DenseMat(parity_ * (x * b) * parity_);
  }
  const cplx value = x.trace();
  return inversions % 2 == 0 ? value : -value;
}

cplx BathCorrelator::wick_pairing_sum(const SuperCorrelationQuery& query) const {
  if (query.size() % 2 == 1) fail(ErrorCode::invalid_argument, "pairing sum needs an even number of fields");
  if (query.empty()) return 1.0;
  // Pair the first field with each later one; the sign counts the fields jumped over.
  cplx total{};
  for (std::size_t k = 1; k < query.size(); ++k) {
    const cplx pair = super_correlation({query[0], query[k]});
    if (pair == cplx{}) continue;
    SuperCorrelationQuery rest;
    for (std::size_t i = 1; i < query.size(); ++i)
      if (i != k) rest.push_back(query[i]);
    const double sgn = (k - 1) % 2 == 0 ? 1.0 : -1.0;
    total += sgn * pair * wick_pairing_sum(rest);
  }
  return total;
}

DenseMat dyson_reduced(const CompositeModel& model, int order, double t) {
  if (order < 0 || order > 2) fail(ErrorCode::invalid_argument, "Dyson order must be 0, 1 or 2");
  if (t < 0.0) fail(ErrorCode::invalid_argument, "Dyson evaluation needs t >= 0");
  const Eigen::SelfAdjointEigenSolver<DenseMat> eig(model.system_hamiltonian().dense());
  const Vec phase = (-I * eig.eigenvalues().cast<cplx>() * t).array().exp();
  const DenseMat u = eig.eigenvectors() * phase.asDiagonal() * eig.eigenvectors().adjoint();

  DenseMat interaction = model.system_initial_state();
  if (order == 2 && t > 0.0) {
    const BathSpec bath{DiscreteModes{model.modes()}, model.beta(), model.mu()};
    const CorrelationFn corr = [&bath](Sigma s, double t2, double t1) {
      return correlation_exact(bath, s, t2, t1);
    };
    const DenseMat coarse = second_order_term<24>(model, corr, t);
    const DenseMat fine = second_order_term<32>(model, corr, t);
    const double scale = std::max(1.0, fine.cwiseAbs().maxCoeff());
    if ((fine - coarse).cwiseAbs().maxCoeff() > 1e-10 * scale)
      fail(ErrorCode::quadrature, "Dyson time quadrature not converged; reduce t");
    interaction += fine;
  }
  return u * interaction * u.adjoint();
}

}  // namespace fheom
